use mdrate_core::simulate::{
    array_tail_mc, crude_mc, split_estimate, tilted_mc_truncated, Executor, Sequential,
    TriangularArray,
};
use mdrate_core::tails::catalog;
use mdrate_core::{ScaleFunction, TailModel};
use proptest::prelude::*;

/// Runs chunks last to first, then restores index order.
struct Reversed;

impl Executor for Reversed {
    fn map_chunks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out: Vec<(usize, T)> = (0..count).rev().map(|k| (k, f(k))).collect();
        out.sort_by_key(|(k, _)| *k);
        out.into_iter().map(|(_, t)| t).collect()
    }
}

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

#[test]
fn schedule_does_not_change_results() {
    let g = ScaleFunction::identity();
    let m = TailModel::pareto(3.0, 1.0).unwrap();
    let a = crude_mc(&m, &g, 50, 0.5, 5000, 17, &Sequential).unwrap();
    let b = crude_mc(&m, &g, 50, 0.5, 5000, 17, &Reversed).unwrap();
    assert_eq!(a, b);
    let a = tilted_mc_truncated(&m, &g, 50, 1.0, 3000, 17, 0.1, &Sequential).unwrap();
    let b = tilted_mc_truncated(&m, &g, 50, 1.0, 3000, 17, 0.1, &Reversed).unwrap();
    assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}

#[test]
fn different_seeds_give_different_draws() {
    let g = ScaleFunction::identity();
    let m = TailModel::standard_gaussian();
    let a = tilted_mc_truncated(&m, &g, 20, 1.0, 2000, 1, 0.0, &Sequential).unwrap();
    let b = tilted_mc_truncated(&m, &g, 20, 1.0, 2000, 2, 0.0, &Sequential).unwrap();
    assert_ne!(a.p_hat, b.p_hat);
}

#[test]
fn tilted_agrees_with_crude_when_truncation_is_inactive() {
    let g = ScaleFunction::identity();
    for m in [
        TailModel::symmetric_two_point(1.0).unwrap(),
        TailModel::two_point(-1.0, 2.0, 0.3).unwrap(),
    ] {
        for (n, x) in [(100u64, 1.0), (1000, 0.8)] {
            let crude = crude_mc(&m, &g, n, x, 40_000, 5, &Sequential).unwrap();
            assert!(crude.hits >= 100, "{} hits", crude.hits);
            let tilted = tilted_mc_truncated(&m, &g, n, x, 8192, 6, 0.0, &Sequential).unwrap();
            let d = (crude.p_hat - tilted.p_hat).abs();
            assert!(
                d < 4.0 * combined(crude.stderr, tilted.stderr),
                "{} n={n}: {} vs {}",
                m.label(),
                crude.p_hat,
                tilted.p_hat
            );
        }
    }
}

#[test]
fn split_sandwich_brackets_crude_on_catalog() {
    let x = 1.0;
    for entry in catalog() {
        let (m, g) = (&entry.model, &entry.scale);
        for (k, n) in [100u64, 1000, 10_000].into_iter().enumerate() {
            let reps = if n == 10_000 { 2048 } else { 8192 };
            let crude = crude_mc(m, g, n, x, reps, 100 + k as u64, &Sequential).unwrap();
            let s = split_estimate(m, g, n, x, None, 2048, 200 + k as u64, &Sequential).unwrap();
            let up = &s.upper;
            let lo = &s.lower;
            assert!(
                crude.p_hat <= up.p_hat + 4.0 * combined(crude.stderr, up.stderr),
                "{} n={n}: crude {} above upper {} {:?}",
                entry.name,
                crude.p_hat,
                up.p_hat,
                up.flags
            );
            // a censored crude run only says p is below about 3 / reps
            let crude_ceiling = if crude.hits == 0 {
                3.0 / reps as f64
            } else {
                crude.p_hat + 4.0 * combined(crude.stderr, lo.stderr)
            };
            assert!(
                lo.p_hat <= crude_ceiling,
                "{} n={n}: lower {} above crude {} {:?}",
                entry.name,
                lo.p_hat,
                crude.p_hat,
                lo.flags
            );
        }
    }
}

#[test]
fn sign_array_normalized_near_gaussian_rate() {
    let g = ScaleFunction::identity();
    let out = array_tail_mc(
        &TriangularArray::Signs { sigma: 1.0 },
        &g,
        10_000,
        2f64.sqrt(),
        4096,
        3,
        &Sequential,
    )
    .unwrap();
    assert!((out.estimate.normalized + 1.0).abs() < 0.3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn crude_estimate_invariants(seed in any::<u64>(), n in 2u64..40, x in 0.05..2.0f64) {
        let g = ScaleFunction::identity();
        let m = TailModel::two_point(-1.0, 2.0, 0.3).unwrap();
        let e = crude_mc(&m, &g, n, x, 1000, seed, &Sequential).unwrap();
        prop_assert!((0.0..=1.0).contains(&e.p_hat));
        prop_assert!(e.stderr >= 0.0);
        prop_assert_eq!(e.p_hat, e.hits as f64 / 1000.0);
        prop_assert_eq!(e.stderr, (e.p_hat * (1.0 - e.p_hat) / 1000.0).sqrt());
        if e.p_hat > 0.0 {
            let direct = e.log_p / (n as f64).ln();
            prop_assert!((e.normalized - direct).abs() <= 4.0 * f64::EPSILON * direct.abs());
        } else {
            prop_assert!(e.flags.censored && e.normalized == f64::NEG_INFINITY);
        }
    }

    #[test]
    fn tilted_estimates_are_probabilities(seed in any::<u64>(), n in 2u64..60, x in 0.1..3.0f64) {
        let g = ScaleFunction::identity();
        let m = TailModel::standard_gaussian();
        match tilted_mc_truncated(&m, &g, n, x, 1024, seed, 0.0, &Sequential) {
            Ok(e) => {
                prop_assert!((0.0..=1.0).contains(&e.p_hat));
                prop_assert!(e.stderr >= 0.0);
            }
            Err(err) => {
                let unreachable = matches!(err, mdrate_core::Error::TiltUnreachable { .. });
                prop_assert!(unreachable);
            }
        }
    }
}
