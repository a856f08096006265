use alloc::format;

use crate::math::{exp, ln, ln_1p, powf, sqrt};
use crate::rng::splitmix64;
use crate::scale::{scaled_threshold, truncation_level, ScaleFunction};
use crate::tails::TailModel;
use crate::{Error, Result};

use super::cells::{tilted_tail, CellLaw, Outside};
use super::{Estimate, Executor, Method};

/// Truncation of a centered law at `c_n = delta_hat sqrt(n / g(log n))`.
#[derive(Debug, Clone)]
pub struct TruncationScheme {
    /// Number of summands.
    pub n: u64,
    /// `g(log n)`.
    pub g_log_n: f64,
    /// `max(g(log n)^(-1/4), n^(-1/8))`.
    pub delta_n: f64,
    /// `max(delta_n, g(log n)^(-1/2))`.
    pub delta_hat: f64,
    /// Truncation level.
    pub c_n: f64,
    /// `E[X; |X| <= c_n]`.
    pub mu_n: f64,
    /// `P(|X| > c_n)`.
    pub p_n: f64,
    /// `mu_n / (1 - p_n)`, the mean of `X` given `|X| <= c_n`.
    pub mu_tilde: f64,
    /// `sqrt(n g(log n))`.
    pub a_n: f64,
    zeroed: CellLaw,
    conditional: CellLaw,
}

impl TruncationScheme {
    /// Builds the scheme for the centered version of `model`.
    pub fn new(model: &TailModel, g: &ScaleFunction, n: u64) -> Result<Self> {
        let model = model.centered()?;
        let nf = n as f64;
        let a_n = scaled_threshold(g, 1.0, nf)?;
        let g_log_n = g.eval(ln(nf));
        let delta_n = powf(g_log_n, -0.25).max(powf(nf, -0.125));
        let delta_hat = delta_n.max(1.0 / sqrt(g_log_n));
        let c_n = truncation_level(g, nf, delta_hat)?;
        let zeroed = CellLaw::truncated(&model, c_n, Outside::ZeroAtom)?;
        let conditional = CellLaw::truncated(&model, c_n, Outside::Condition)?;
        let p_n = model.survival(c_n) + model.left_tail(c_n);
        Ok(TruncationScheme {
            n,
            g_log_n,
            delta_n,
            delta_hat,
            c_n,
            mu_n: zeroed.mean(),
            p_n,
            mu_tilde: conditional.mean(),
            a_n,
            zeroed,
            conditional,
        })
    }

    /// Law of `X 1{|X| <= c_n}`.
    pub fn zeroed_law(&self) -> &CellLaw {
        &self.zeroed
    }

    /// Law of `X` given `|X| <= c_n`.
    pub fn conditional_law(&self) -> &CellLaw {
        &self.conditional
    }
}

fn check_eps(x: f64, eps: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::invalid("x", format!("must be > 0, got {x}")));
    }
    if !(eps >= 0.0 && eps < x) {
        return Err(Error::invalid(
            "eps",
            format!("must lie in [0, x), got {eps}"),
        ));
    }
    Ok(())
}

fn truncated_term<E: Executor>(
    scheme: &TruncationScheme,
    g: &ScaleFunction,
    x: f64,
    eps: f64,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<Estimate> {
    let n = scheme.n;
    let target = (x - eps) * scheme.a_n + n as f64 * scheme.mu_n;
    let t = tilted_tail(scheme.zeroed_law(), n, target, reps, seed, exec)?;
    Ok(Estimate::from_log(
        g,
        n,
        x,
        t.log_p,
        t.stderr(),
        Method::Tilted,
        t.hits,
        reps,
    ))
}

/// Importance-sampled `P(V_1 + ... + V_n > (x - eps) sqrt(n g(log n)))`
/// where `V = X 1{|X| <= c_n} - mu_n` for the centered `X`.
#[allow(clippy::too_many_arguments)]
pub fn tilted_mc_truncated<E: Executor>(
    model: &TailModel,
    g: &ScaleFunction,
    n: u64,
    x: f64,
    reps: u64,
    seed: u64,
    eps: f64,
    exec: &E,
) -> Result<Estimate> {
    check_eps(x, eps)?;
    let scheme = TruncationScheme::new(model, g, n)?;
    truncated_term(&scheme, g, x, eps, reps, seed, exec)
}

/// Upper and lower truncation bounds on `P(S_n - n mu > x a_n)`.
#[derive(Debug, Clone)]
pub struct SplitEstimate {
    /// Truncated term plus `n P(X > sqrt(n) / g(log n))`, clipped at 1.
    pub upper: Estimate,
    /// Conditional truncated term times `(1 - p_n)^n`.
    pub lower: Estimate,
    /// `n P(X > sqrt(n) / g(log n))`.
    pub max_term: f64,
    /// `eps` used.
    pub eps: f64,
    /// Truncation quantities at this `n`.
    pub scheme: TruncationScheme,
}

/// Sandwich of the deviation probability between two truncated estimates.
///
/// `eps` defaults to `x / 10`. The lower estimate draws from an independent
/// key derived from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn split_estimate<E: Executor>(
    model: &TailModel,
    g: &ScaleFunction,
    n: u64,
    x: f64,
    eps: Option<f64>,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<SplitEstimate> {
    let eps = eps.unwrap_or(x / 10.0);
    check_eps(x, eps)?;
    let centered = model.centered()?;
    let scheme = TruncationScheme::new(&centered, g, n)?;
    let nf = n as f64;
    let slack = eps * scheme.a_n;

    let trunc = truncated_term(&scheme, g, x, eps, reps, seed, exec)?;
    let max_term = nf * centered.survival(sqrt(nf) / scheme.g_log_n);
    let raw = trunc.p_hat + max_term;
    let log_upper = if raw >= 1.0 { 0.0 } else { ln(raw) };
    let mut upper = Estimate::from_log(
        g,
        n,
        x,
        log_upper,
        trunc.stderr,
        Method::Split,
        trunc.hits,
        reps,
    );
    if raw > 0.0 && raw < f64::MIN_POSITIVE * 1e3 {
        // p_hat underflowed; keep the log of the truncated term
        upper.log_p = trunc.log_p;
        upper.normalized = trunc.normalized;
    }
    upper.flags.vacuous_union_bound = raw >= 1.0;
    upper.flags.outside_validity = nf * scheme.mu_n > slack;

    let target = (x + eps) * scheme.a_n + nf * scheme.mu_tilde;
    let cond = tilted_tail(
        scheme.conditional_law(),
        n,
        target,
        reps,
        splitmix64(seed ^ 0x5EED),
        exec,
    )?;
    let log_lower = cond.log_p + nf * ln_1p(-scheme.p_n);
    let stderr = if cond.log_p == f64::NEG_INFINITY {
        0.0
    } else {
        exp(log_lower) * cond.rel_stderr
    };
    let mut lower = Estimate::from_log(
        g,
        n,
        x,
        log_lower,
        stderr,
        Method::ConditionalLower,
        cond.hits,
        reps,
    );
    lower.flags.outside_validity = nf * scheme.mu_tilde < -slack;

    Ok(SplitEstimate {
        upper,
        lower,
        max_term,
        eps,
        scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::normal_sf;
    use crate::rng::StreamRng;
    use crate::simulate::Sequential;

    #[test]
    fn scheme_quantities_for_pareto() {
        let m = TailModel::pareto(3.0, 1.0).unwrap().centered().unwrap();
        let g = ScaleFunction::identity();
        let s = TruncationScheme::new(&m, &g, 10_000).unwrap();
        let gl = 10_000f64.ln();
        assert!((s.delta_n - gl.powf(-0.25)).abs() < 1e-15);
        assert_eq!(s.delta_hat, s.delta_n);
        assert!((s.c_n - s.delta_hat * (10_000.0 / gl).sqrt()).abs() < 1e-12);
        // P(|X| > c) = (c + 1.5)^-3 for the centered Pareto(3, 1)
        assert!((s.p_n - (s.c_n + 1.5).powi(-3)).abs() < 1e-15);
        // E[X; X > c] = int_{c}^inf P(X > t) dt + c P(X > c) for X = Y - 1.5
        let tail_part = 0.5 * (s.c_n + 1.5).powi(-2) + s.c_n * (s.c_n + 1.5).powi(-3);
        assert!(
            (s.mu_n + tail_part).abs() < 1e-7,
            "{} vs {}",
            s.mu_n,
            -tail_part
        );
        assert!((s.mu_tilde - s.mu_n / (1.0 - s.p_n)).abs() < 1e-9);
    }

    #[test]
    fn mu_n_agrees_with_sampling() {
        let m = TailModel::pareto(3.0, 1.0).unwrap().centered().unwrap();
        let g = ScaleFunction::identity();
        let s = TruncationScheme::new(&m, &g, 100).unwrap();
        let mut rng = StreamRng::new(9, 0);
        let k = 400_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..k {
            let v = m.sample_with(&mut rng);
            let v = if v.abs() <= s.c_n { v } else { 0.0 };
            sum += v;
            sq += v * v;
        }
        let mean = sum / k as f64;
        let se = ((sq / k as f64 - mean * mean) / k as f64).sqrt();
        assert!((mean - s.mu_n).abs() < 4.0 * se);
    }

    #[test]
    fn union_bound_is_vacuous_for_pareto_at_ten_thousand() {
        let m = TailModel::pareto(3.0, 1.0).unwrap().centered().unwrap();
        let g = ScaleFunction::identity();
        let s = split_estimate(&m, &g, 10_000, 5.0, None, 1024, 4, &Sequential).unwrap();
        let level = 100.0 / 10_000f64.ln();
        assert!((level - 10.857).abs() < 1e-3);
        assert!((s.max_term - 1e4 * (level + 1.5).powi(-3)).abs() < 1e-9);
        assert!(s.max_term > 1.0);
        assert_eq!(s.upper.p_hat, 1.0);
        assert!(s.upper.flags.vacuous_union_bound);
        assert!(s.lower.p_hat < 1e-3);
    }

    #[test]
    fn inactive_truncation_collapses_the_sandwich() {
        let m = TailModel::symmetric_two_point(1.0).unwrap();
        let g = ScaleFunction::identity();
        let s = split_estimate(&m, &g, 400, 1.0, Some(1e-9), 4096, 8, &Sequential).unwrap();
        assert_eq!(s.scheme.p_n, 0.0);
        assert_eq!(s.max_term, 0.0);
        assert_eq!(s.upper.log_p, s.upper.log_p.min(0.0));
        let d = (s.upper.p_hat - s.lower.p_hat).abs();
        assert!(d < 4.0 * (s.upper.stderr.powi(2) + s.lower.stderr.powi(2)).sqrt());
    }

    #[test]
    fn truncated_gaussian_tilt_matches_crude() {
        let m = TailModel::standard_gaussian();
        let g = ScaleFunction::identity();
        let n = 100u64;
        let x = 0.6;
        let s = TruncationScheme::new(&m, &g, n).unwrap();
        let est = tilted_mc_truncated(&m, &g, n, x, 20_000, 3, 0.0, &Sequential).unwrap();
        // crude sampling of the same truncated sum
        let target = x * s.a_n;
        let mut rng = StreamRng::new(21, 0);
        let reps = 100_000;
        let mut hits = 0;
        for _ in 0..reps {
            let mut sum = 0.0;
            for _ in 0..n {
                let v = m.sample_with(&mut rng);
                sum += if v.abs() <= s.c_n { v } else { 0.0 } - s.mu_n;
            }
            if sum > target {
                hits += 1;
            }
        }
        let p = hits as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        let comb = (se * se + est.stderr * est.stderr).sqrt();
        assert!((p - est.p_hat).abs() < 4.0 * comb, "{p} vs {}", est.p_hat);
        // the truncation barely matters at this level
        assert!((est.p_hat / normal_sf(x * 100f64.ln().sqrt()) - 1.0).abs() < 0.2);
    }

    #[test]
    fn eps_outside_range_is_rejected() {
        let m = TailModel::standard_gaussian();
        let g = ScaleFunction::identity();
        assert!(split_estimate(&m, &g, 100, 1.0, Some(1.0), 1024, 1, &Sequential).is_err());
        assert!(tilted_mc_truncated(&m, &g, 100, 1.0, 1024, 1, -0.1, &Sequential).is_err());
    }
}
