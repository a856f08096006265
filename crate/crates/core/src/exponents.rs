//! Tail exponents on the `g(log t)` scale.
//!
//! With `f(t) = -log(t^2 P(X > t)) / g(log t)`, the right-tail exponents are
//! `lam1_bar = liminf f` and `lam1_under = limsup f`. The left tail
//! (`P(X < -t)`) gives `lam2_*` and the two-sided tail (`P(|X| > t)`) gives
//! `lam_*`. Values live in `[0, inf]`.

use alloc::vec::Vec;

use crate::math::{exp, ln, powf};
use crate::scale::ScaleFunction;
use crate::tails::TailModel;
use crate::{Error, Result};

/// Normalized values at or above this are reported as `inf`.
pub const LAMBDA_MAX: f64 = 50.0;

/// The six tail exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailExponents {
    /// Right tail, negated limsup.
    pub lam1_bar: f64,
    /// Right tail, negated liminf.
    pub lam1_under: f64,
    /// Left tail, negated limsup.
    pub lam2_bar: f64,
    /// Left tail, negated liminf.
    pub lam2_under: f64,
    /// Two-sided tail, negated limsup.
    pub lam_bar: f64,
    /// Two-sided tail, negated liminf.
    pub lam_under: f64,
}

impl TailExponents {
    /// Field names in declaration order.
    pub const NAMES: [&'static str; 6] = [
        "lam1_bar",
        "lam1_under",
        "lam2_bar",
        "lam2_under",
        "lam_bar",
        "lam_under",
    ];

    /// All six equal to `value`.
    pub fn uniform(value: f64) -> Self {
        TailExponents {
            lam1_bar: value,
            lam1_under: value,
            lam2_bar: value,
            lam2_under: value,
            lam_bar: value,
            lam_under: value,
        }
    }

    /// Values in [`NAMES`](Self::NAMES) order.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.lam1_bar,
            self.lam1_under,
            self.lam2_bar,
            self.lam2_under,
            self.lam_bar,
            self.lam_under,
        ]
    }

    /// Inverse of [`to_array`](Self::to_array).
    pub fn from_array(v: [f64; 6]) -> Self {
        TailExponents {
            lam1_bar: v[0],
            lam1_under: v[1],
            lam2_bar: v[2],
            lam2_under: v[3],
            lam_bar: v[4],
            lam_under: v[5],
        }
    }

    /// Each `bar <= under` and every value lies in `[0, inf]`.
    pub fn is_ordered(&self) -> bool {
        let v = self.to_array();
        v.iter().all(|x| *x >= 0.0)
            && self.lam1_bar <= self.lam1_under
            && self.lam2_bar <= self.lam2_under
            && self.lam_bar <= self.lam_under
    }
}

/// How grid points are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    /// Geometric in `t` (uniform in `u = log t`).
    Geometric,
    /// Geometric in `u = log t`; needed to see oscillations whose blocks
    /// grow geometrically in `u`.
    LogGeometric,
}

/// Probe points for the tail limits, stored as `u = log t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailGrid {
    spacing: Spacing,
    u: Vec<f64>,
}

const MIN_POINTS: usize = 12;

impl TailGrid {
    /// `points` values of `t` spaced geometrically on `[t_min, t_max]`.
    pub fn geometric(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 1.0 && t_max.is_finite()) {
            return Err(Error::invalid("t_min", "need 1 < t_min and finite t_max"));
        }
        Self::build(Spacing::Geometric, ln(t_min), ln(t_max), points)
    }

    /// `points` values of `u = log t` spaced geometrically on `[u_min, u_max]`.
    pub fn log_geometric(u_min: f64, u_max: f64, points: usize) -> Result<Self> {
        if !(u_min > 0.0 && u_max.is_finite()) {
            return Err(Error::invalid("u_min", "need 0 < u_min and finite u_max"));
        }
        Self::build(Spacing::LogGeometric, u_min, u_max, points)
    }

    /// 90 points across `t` in `[10^4, 10^10]`.
    pub fn standard() -> Self {
        Self::geometric(1e4, 1e10, 90).expect("valid constant grid")
    }

    /// 360 points across `log t` in `[1, 10^7]`.
    pub fn oscillation() -> Self {
        Self::log_geometric(1.0, 1e7, 360).expect("valid constant grid")
    }

    fn build(spacing: Spacing, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < MIN_POINTS {
            return Err(Error::GridTooShort {
                reason: alloc::format!("{points} points, need at least {MIN_POINTS}"),
            });
        }
        if hi - lo < 4.0 * core::f64::consts::LN_10 {
            return Err(Error::GridTooShort {
                reason: "grid spans fewer than 4 decades of t".into(),
            });
        }
        let step = 1.0 / (points - 1) as f64;
        let u = (0..points)
            .map(|k| {
                let f = k as f64 * step;
                match spacing {
                    Spacing::Geometric => lo + (hi - lo) * f,
                    Spacing::LogGeometric => exp(ln(lo) + (ln(hi) - ln(lo)) * f),
                }
            })
            .collect();
        Ok(TailGrid { spacing, u })
    }

    /// Spacing rule.
    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Grid points as `u = log t`.
    pub fn log_points(&self) -> &[f64] {
        &self.u
    }

    /// Index where the trailing window (last third) starts.
    fn window_start(&self) -> usize {
        self.u.len() - self.u.len() / 3
    }
}

/// How the trailing window is reduced to a limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitRule {
    /// Plain minimum / maximum over the window.
    Window,
    /// Extremes over the two halves of the window, extrapolated linearly in
    /// `1 / g(log t)`. Removes the `O(1 / g)` bias from slowly vanishing
    /// factors such as the `2` in `P(|X| > t) = 2 P(X > t)`.
    #[default]
    Extrapolated,
}

#[derive(Clone, Copy)]
enum Tail {
    Right,
    Left,
    Both,
}

fn ln_tail(model: &TailModel, tail: Tail, u: f64) -> f64 {
    match tail {
        Tail::Right => model.ln_right_tail_at_log(u),
        Tail::Left => model.ln_left_tail_at_log(u),
        Tail::Both => model.ln_abs_tail_at_log(u),
    }
}

fn check_scale(g: &ScaleFunction, grid: &TailGrid) -> Result<Vec<f64>> {
    let gs: Vec<f64> = grid.u.iter().map(|&u| g.eval(u)).collect();
    if let Some((k, _)) = gs.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::DegenerateScale { at: grid.u[k] });
    }
    Ok(gs)
}

/// `f = -(2u + ln tail) / g(u)` on the grid; `inf` where the tail is zero.
fn normalized(model: &TailModel, tail: Tail, grid: &TailGrid, gs: &[f64]) -> Vec<f64> {
    grid.u
        .iter()
        .zip(gs)
        .map(|(&u, &gu)| {
            let lt = ln_tail(model, tail, u);
            if lt == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                -(2.0 * u + lt) / gu
            }
        })
        .collect()
}

/// Position and value of the extreme of `f` over `range`.
fn extreme(f: &[f64], range: core::ops::Range<usize>, lower: bool) -> (usize, f64) {
    let mut best = (range.start, f[range.start]);
    for k in range {
        let better = if lower { f[k] < best.1 } else { f[k] > best.1 };
        if better {
            best = (k, f[k]);
        }
    }
    best
}

fn window_limit(f: &[f64], gs: &[f64], start: usize, lower: bool, rule: LimitRule) -> f64 {
    let len = f.len();
    let raw = match rule {
        LimitRule::Window => extreme(f, start..len, lower).1,
        LimitRule::Extrapolated => {
            let mid = start + (len - start) / 2;
            let (k1, m1) = extreme(f, start..mid, lower);
            let (k2, m2) = extreme(f, mid..len, lower);
            if !m1.is_finite() || !m2.is_finite() || m1 >= LAMBDA_MAX || m2 >= LAMBDA_MAX {
                f64::INFINITY
            } else if gs[k2] > gs[k1] {
                (gs[k2] * m2 - gs[k1] * m1) / (gs[k2] - gs[k1])
            } else {
                m2
            }
        }
    };
    if raw >= LAMBDA_MAX || raw.is_nan() {
        f64::INFINITY
    } else {
        raw.max(0.0)
    }
}

/// Trailing-window exponents from the model's analytic tails, using the
/// default [`LimitRule`].
pub fn exponents_from_tail(
    model: &TailModel,
    g: &ScaleFunction,
    grid: &TailGrid,
) -> Result<TailExponents> {
    exponents_from_tail_with(model, g, grid, LimitRule::default())
}

/// Trailing-window exponents with an explicit limit rule.
pub fn exponents_from_tail_with(
    model: &TailModel,
    g: &ScaleFunction,
    grid: &TailGrid,
    rule: LimitRule,
) -> Result<TailExponents> {
    let gs = check_scale(g, grid)?;
    let start = grid.window_start();
    let pair = |tail: Tail| {
        let f = normalized(model, tail, grid, &gs);
        (
            window_limit(&f, &gs, start, true, rule),
            window_limit(&f, &gs, start, false, rule),
        )
    };
    let (lam1_bar, lam1_under) = pair(Tail::Right);
    let (lam2_bar, lam2_under) = pair(Tail::Left);
    let (lam_bar, lam_under) = pair(Tail::Both);
    Ok(TailExponents {
        lam1_bar,
        lam1_under: lam1_under.max(lam1_bar),
        lam2_bar,
        lam2_under: lam2_under.max(lam2_bar),
        lam_bar,
        lam_under: lam_under.max(lam_bar),
    })
}

/// `0, step, 2 step, ...` up to and including `max`.
pub fn r_grid(step: f64, max: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && max > 0.0 && max.is_finite()) {
        return Err(Error::invalid("step", "need step > 0 and finite max > 0"));
    }
    let count = libm::floor(max / step + 1e-9) as usize;
    Ok((0..=count).map(|k| k as f64 * step).collect())
}

/// Exponents from the sup-form definitions: the largest `r` for which
/// `t^2 e^(r g(log t)) P(tail > t)` tends to zero (bar exponents) or has a
/// subsequence tending to zero (under exponents).
///
/// On the trailing window, the full limit is accepted when the log sequence
/// has a smaller maximum over the second half than over the first; the
/// subsequence form compares minima instead. Returns `inf` if the last `r`
/// of an `r_grid` reaching [`LAMBDA_MAX`] qualifies.
pub fn exponents_sup_form(
    model: &TailModel,
    g: &ScaleFunction,
    r_values: &[f64],
    grid: &TailGrid,
) -> Result<TailExponents> {
    if r_values.is_empty() || r_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "r_grid",
            "must be nonempty and strictly increasing",
        ));
    }
    if r_values[r_values.len() - 1] < LAMBDA_MAX {
        return Err(Error::invalid(
            "r_grid",
            "must reach the divergence threshold",
        ));
    }
    let gs = check_scale(g, grid)?;
    let start = grid.window_start();
    let mid = start + (grid.u.len() - start) / 2;
    let pair = |tail: Tail| {
        let lt: Vec<f64> = grid.u.iter().map(|&u| ln_tail(model, tail, u)).collect();
        let qualifies = |r: f64, subsequence: bool| {
            let l: Vec<f64> = (0..lt.len())
                .map(|k| 2.0 * grid.u[k] + r * gs[k] + lt[k])
                .collect();
            let pick = |range: core::ops::Range<usize>| extreme(&l, range, subsequence).1;
            let (first, second) = (pick(start..mid), pick(mid..l.len()));
            second == f64::NEG_INFINITY || second < first
        };
        let largest = |subsequence: bool| {
            let mut best = None;
            for &r in r_values {
                if qualifies(r, subsequence) {
                    best = Some(r);
                }
            }
            match best {
                None => 0.0,
                Some(r) if r >= LAMBDA_MAX => f64::INFINITY,
                Some(r) => r,
            }
        };
        let bar = largest(false);
        (bar, largest(true).max(bar))
    };
    let (lam1_bar, lam1_under) = pair(Tail::Right);
    let (lam2_bar, lam2_under) = pair(Tail::Left);
    let (lam_bar, lam_under) = pair(Tail::Both);
    Ok(TailExponents {
        lam1_bar,
        lam1_under,
        lam2_bar,
        lam2_under,
        lam_bar,
        lam_under,
    })
}

/// Predicted limits of `log(n P(X > threshold_n)) / g(log n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTailLimits {
    /// limsup for `threshold_n = s sqrt(n g(log n))`: `-lam1_bar / 2^rho`.
    pub moderate_limsup: f64,
    /// liminf for `threshold_n = s sqrt(n g(log n))`: `-lam1_under / 2^rho`.
    pub moderate_liminf: f64,
    /// limsup for `threshold_n = s sqrt(n) / g(log n)`: `-lam1_bar / 2^rho`.
    pub cut_limsup: f64,
    /// liminf for `threshold_n = s sqrt(n) / g(log n)`: `-lam1_under / 2^rho`.
    pub cut_liminf: f64,
}

/// Limits of the normalized single-summand exceedance terms, for any `s > 0`.
pub fn scaled_tail_limits(exps: &TailExponents, rho: f64) -> ScaledTailLimits {
    let scale = powf(2.0, rho);
    let upper = -exps.lam1_bar / scale;
    let lower = -exps.lam1_under / scale;
    ScaledTailLimits {
        moderate_limsup: upper,
        moderate_liminf: lower,
        cut_limsup: upper,
        cut_liminf: lower,
    }
}

/// Coarse exponents estimated from a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalExponents {
    /// Estimated exponents (window rule, no bias correction).
    pub exps: TailExponents,
    /// Grid endpoints in `t`.
    pub t_range: (f64, f64),
    /// Fewer than 100 exceedances support the largest grid point on some tail.
    pub low_count: bool,
}

const EMPIRICAL_POINTS: usize = 30;
const MIN_SUPPORT: usize = 100;

/// Plugs the empirical survival function into the exponent definitions on a
/// geometric grid from the 90th percentile of `|X|` to the level exceeded by
/// 100 sample points. Order-of-magnitude only.
pub fn empirical_exponents(sample: &[f64], g: &ScaleFunction) -> Result<EmpiricalExponents> {
    let n = sample.len();
    if n < 100_000 {
        return Err(Error::invalid(
            "sample",
            alloc::format!("need at least 10^5 points, got {n}"),
        ));
    }
    let mut right: Vec<f64> = sample.iter().copied().filter(|&x| x > 0.0).collect();
    let mut left: Vec<f64> = sample.iter().filter(|&&x| x < 0.0).map(|&x| -x).collect();
    let mut abs: Vec<f64> = sample.iter().map(|x| x.abs()).collect();
    right.sort_by(f64::total_cmp);
    left.sort_by(f64::total_cmp);
    abs.sort_by(f64::total_cmp);
    let t_lo = abs[n - n / 10].max(1.0 + 1e-9);
    let t_hi = abs[n - MIN_SUPPORT].max(t_lo * (1.0 + 1e-9));
    let (u_lo, u_hi) = (ln(t_lo), ln(t_hi));
    let u: Vec<f64> = (0..EMPIRICAL_POINTS)
        .map(|k| u_lo + (u_hi - u_lo) * k as f64 / (EMPIRICAL_POINTS - 1) as f64)
        .collect();
    let gs: Vec<f64> = u.iter().map(|&v| g.eval(v)).collect();
    if let Some(k) = gs.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::DegenerateScale { at: u[k] });
    }
    let start = EMPIRICAL_POINTS - EMPIRICAL_POINTS / 3;
    let mut low_count = false;
    let mut pair = |sorted: &[f64]| {
        let exceed = |t: f64| sorted.len() - sorted.partition_point(|&x| x <= t);
        if exceed(t_hi) < MIN_SUPPORT {
            low_count = true;
        }
        let f: Vec<f64> = u
            .iter()
            .zip(&gs)
            .map(|(&v, &gv)| {
                let c = exceed(exp(v));
                if c == 0 {
                    f64::INFINITY
                } else {
                    -(2.0 * v + ln(c as f64 / n as f64)) / gv
                }
            })
            .collect();
        (
            window_limit(&f, &gs, start, true, LimitRule::Window),
            window_limit(&f, &gs, start, false, LimitRule::Window),
        )
    };
    let (lam1_bar, lam1_under) = pair(&right);
    let (lam2_bar, lam2_under) = pair(&left);
    let (lam_bar, lam_under) = pair(&abs);
    Ok(EmpiricalExponents {
        exps: TailExponents {
            lam1_bar,
            lam1_under,
            lam2_bar,
            lam2_under,
            lam_bar,
            lam_under,
        },
        t_range: (t_lo, t_hi),
        low_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: f64 = core::f64::consts::E;

    fn id() -> ScaleFunction {
        ScaleFunction::identity()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        if b.is_infinite() {
            a == b
        } else {
            (a - b).abs() <= rel * b.abs().max(1e-12)
        }
    }

    #[test]
    fn grid_guards() {
        assert!(matches!(
            TailGrid::geometric(10.0, 1e3, 60),
            Err(Error::GridTooShort { .. })
        ));
        assert!(matches!(
            TailGrid::geometric(10.0, 1e8, 5),
            Err(Error::GridTooShort { .. })
        ));
        assert!(TailGrid::geometric(0.5, 1e8, 60).is_err());
        let g = TailGrid::standard();
        assert_eq!(g.log_points().len(), 90);
        assert!((g.log_points()[89] - ln(1e10)).abs() < 1e-12);
    }

    #[test]
    fn pareto_three_identity_scale() {
        let m = TailModel::pareto(3.0, 1.0).unwrap();
        let e = exponents_from_tail(&m, &id(), &TailGrid::standard()).unwrap();
        assert!((e.lam1_bar - 1.0).abs() < 1e-9 && (e.lam1_under - 1.0).abs() < 1e-9);
        assert!(e.lam2_bar.is_infinite() && e.lam2_under.is_infinite());
        assert!((e.lam_bar - 1.0).abs() < 1e-9 && (e.lam_under - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_law_has_infinite_exponents() {
        let m = TailModel::symmetric_two_point(1.0).unwrap();
        for g in [id(), ScaleFunction::log_clamp()] {
            let e = exponents_from_tail(&m, &g, &TailGrid::standard()).unwrap();
            assert_eq!(e, TailExponents::uniform(f64::INFINITY));
        }
    }

    #[test]
    fn designed_asymmetric_recovery() {
        let m = TailModel::designed(0.5, 2.0, id(), E).unwrap();
        let e = exponents_from_tail(&m, &id(), &TailGrid::standard()).unwrap();
        let want = [0.5, 0.5, 2.0, 2.0, 0.5, 0.5];
        for (got, w) in e.to_array().iter().zip(want) {
            assert!(close(*got, w, 0.05), "{e:?}");
        }
    }

    #[test]
    fn symmetric_design_needs_extrapolation() {
        // P(|X| > t) = 2 P(X > t) biases the plain window by log 2 / g(log t)
        let m = TailModel::designed(0.5, 0.5, id(), E).unwrap();
        let grid = TailGrid::standard();
        let plain = exponents_from_tail_with(&m, &id(), &grid, LimitRule::Window).unwrap();
        let fixed = exponents_from_tail(&m, &id(), &grid).unwrap();
        assert!((plain.lam_bar - 0.5).abs() > 0.02);
        assert!((fixed.lam_bar - 0.5).abs() < 1e-6);
        assert!((fixed.lam_bar - fixed.lam1_bar.min(fixed.lam2_bar)).abs() < 0.01);
    }

    #[test]
    fn infinite_design_exponent_reported() {
        let m = TailModel::designed(f64::INFINITY, 1.0, id(), E).unwrap();
        let e = exponents_from_tail(&m, &id(), &TailGrid::standard()).unwrap();
        assert!(e.lam1_bar.is_infinite());
        assert!(close(e.lam2_bar, 1.0, 0.02));
        assert!(close(e.lam_bar, 1.0, 0.02));
    }

    #[test]
    fn oscillating_recovery() {
        let m = TailModel::oscillating(0.5, 2.0, id(), 3.0).unwrap();
        let e = exponents_from_tail(&m, &id(), &TailGrid::oscillation()).unwrap();
        assert!(
            close(e.lam_bar, 0.5, 0.1) && close(e.lam_under, 2.0, 0.1),
            "{e:?}"
        );
        assert!(
            close(e.lam1_bar, 0.5, 0.1) && close(e.lam1_under, 2.0, 0.1),
            "{e:?}"
        );
        let s = exponents_sup_form(
            &m,
            &id(),
            &r_grid(0.05, LAMBDA_MAX).unwrap(),
            &TailGrid::oscillation(),
        )
        .unwrap();
        assert!(
            (s.lam1_bar - 0.5).abs() <= 0.1 && (s.lam1_under - 2.0).abs() <= 0.1,
            "{s:?}"
        );
    }

    #[test]
    fn sup_form_examples() {
        let rs = r_grid(0.05, LAMBDA_MAX).unwrap();
        let grid = TailGrid::standard();
        let p = TailModel::pareto(3.0, 1.0).unwrap();
        let e = exponents_sup_form(&p, &id(), &rs, &grid).unwrap();
        assert!((e.lam1_bar - 1.0).abs() <= 0.05 + 1e-12, "{e:?}");
        assert!(e.lam2_bar.is_infinite());
        let gauss = TailModel::standard_gaussian();
        let e = exponents_sup_form(&gauss, &id(), &rs, &grid).unwrap();
        assert_eq!(e, TailExponents::uniform(f64::INFINITY));
        assert!(exponents_sup_form(&gauss, &id(), &[0.0, 1.0], &grid).is_err());
    }

    #[test]
    fn pareto_index_specialization() {
        for alpha in [2.5, 3.0, 4.0] {
            let m = TailModel::pareto(alpha, 1.0).unwrap();
            let e = exponents_from_tail(&m, &id(), &TailGrid::standard()).unwrap();
            assert!(close(e.lam1_bar, alpha - 2.0, 0.02), "{alpha}: {e:?}");
            assert!(close(e.lam1_under, alpha - 2.0, 0.02), "{alpha}: {e:?}");
        }
    }

    #[test]
    fn scaled_limits() {
        let exps = TailExponents {
            lam1_bar: 1.0,
            lam1_under: 1.0,
            ..TailExponents::uniform(f64::INFINITY)
        };
        let l = scaled_tail_limits(&exps, 1.0);
        assert_eq!(l.moderate_limsup, -0.5);
        assert_eq!(l.cut_limsup, -0.5);
        let l = scaled_tail_limits(&TailExponents::uniform(f64::INFINITY), 1.0);
        assert_eq!(l.moderate_limsup, f64::NEG_INFINITY);
        let exps = TailExponents {
            lam1_bar: 2.0,
            ..TailExponents::uniform(3.0)
        };
        assert_eq!(scaled_tail_limits(&exps, 0.0).moderate_limsup, -2.0);
    }

    #[test]
    fn empirical_pareto_and_bounded() {
        let m = TailModel::pareto(3.0, 1.0).unwrap();
        let xs = m.sample(21, 1_000_000);
        let e = empirical_exponents(&xs, &id()).unwrap();
        assert!((0.6..=1.4).contains(&e.exps.lam1_bar), "{e:?}");
        assert!((0.6..=1.4).contains(&e.exps.lam1_under), "{e:?}");
        assert!(e.low_count, "left tail is empty");

        let b = TailModel::symmetric_two_point(1.0)
            .unwrap()
            .sample(3, 100_000);
        let e = empirical_exponents(&b, &id()).unwrap();
        assert_eq!(e.exps, TailExponents::uniform(f64::INFINITY));
        assert!(empirical_exponents(&b[..1000], &id()).is_err());
    }

    #[test]
    fn empirical_designed() {
        let m = TailModel::designed(0.5, 2.0, id(), E).unwrap();
        let xs = m.sample(8, 1_000_000);
        let e = empirical_exponents(&xs, &id()).unwrap();
        assert!((0.3..=0.8).contains(&e.exps.lam1_bar), "{e:?}");
    }

    proptest! {
        #[test]
        fn designed_min_identity_and_order(
            lp in prop::sample::select(vec![0.5, 1.0, 1.5, 2.0, 3.0]),
            lm in prop::sample::select(vec![0.5, 1.0, 1.5, 2.0, 3.0]),
            k in 0usize..2,
        ) {
            let g = [id(), ScaleFunction::power(2.0).unwrap()][k];
            let m = TailModel::designed(lp, lm, g, E).unwrap();
            let e = exponents_from_tail(&m, &g, &TailGrid::standard()).unwrap();
            prop_assert!(e.is_ordered());
            let lo = e.lam1_bar.min(e.lam2_bar);
            prop_assert!((e.lam_bar - lo).abs() <= 0.02 * lo);
            prop_assert!(e.lam_under <= e.lam1_under.min(e.lam2_under) * 1.02);
        }
    }
}
