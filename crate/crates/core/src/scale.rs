//! Nondecreasing regularly varying scale functions.
//!
//! A scale function `g` satisfies `g(x t) / g(t) -> x^rho` for every `x > 0`
//! and `g(t) -> inf`. Every catalog preset is total and nonnegative on
//! `[0, inf)`: logarithms are clamped with `t max 1` or `t max e`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{bisect, ln, powf, sqrt};
use crate::{Error, Result};

const E: f64 = core::f64::consts::E;

/// Catalog of scale functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleKind {
    /// `g(t) = t`, index 1.
    Identity,
    /// `g(t) = log(t max 1)`, index 0 (slowly varying).
    LogClamp,
    /// `g(t) = t^rho` with `rho > 0`.
    Power {
        /// Regular-variation index.
        rho: f64,
    },
    /// `g(t) = t * log(t max e)`, index 1.
    LinearLog,
    /// `g(t) = t^rho * (1 + 1 / log(t max e))`, index `rho`.
    PowerLogCorrected {
        /// Regular-variation index.
        rho: f64,
    },
}

/// A nondecreasing regularly varying function `g` with `g(t) -> inf`.
///
/// Values are immutable and cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFunction {
    kind: ScaleKind,
}

impl ScaleFunction {
    /// `g(t) = t`.
    pub const fn identity() -> Self {
        ScaleFunction {
            kind: ScaleKind::Identity,
        }
    }

    /// `g(t) = log(t max 1)`.
    pub const fn log_clamp() -> Self {
        ScaleFunction {
            kind: ScaleKind::LogClamp,
        }
    }

    /// `g(t) = t * log(t max e)`.
    pub const fn linear_log() -> Self {
        ScaleFunction {
            kind: ScaleKind::LinearLog,
        }
    }

    /// `g(t) = t^rho`; `rho` must be positive so that `g` diverges.
    pub fn power(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(ScaleFunction {
            kind: ScaleKind::Power { rho },
        })
    }

    /// `g(t) = t^rho (1 + 1/log(t max e))`.
    pub fn power_log_corrected(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(ScaleFunction {
            kind: ScaleKind::PowerLogCorrected { rho },
        })
    }

    /// The preset this function was built from.
    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    /// Regular-variation index.
    pub fn rho(&self) -> f64 {
        match self.kind {
            ScaleKind::Identity | ScaleKind::LinearLog => 1.0,
            ScaleKind::LogClamp => 0.0,
            ScaleKind::Power { rho } | ScaleKind::PowerLogCorrected { rho } => rho,
        }
    }

    /// Text identifier, e.g. `power(rho=2)`.
    pub fn label(&self) -> String {
        format!("{self}")
    }

    /// `g(t)`; negative arguments are treated as 0.
    pub fn eval(&self, t: f64) -> f64 {
        let t = if t > 0.0 { t } else { 0.0 };
        match self.kind {
            ScaleKind::Identity => t,
            ScaleKind::LogClamp => ln(t.max(1.0)),
            ScaleKind::Power { rho } => powf(t, rho),
            ScaleKind::LinearLog => t * ln(t.max(E)),
            ScaleKind::PowerLogCorrected { rho } => powf(t, rho) * (1.0 + 1.0 / ln(t.max(E))),
        }
    }

    /// Smallest `t >= 0` with `g(t) >= y`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= self.eval(0.0) {
            return 0.0;
        }
        match self.kind {
            ScaleKind::Identity => y,
            ScaleKind::Power { rho } => powf(y, 1.0 / rho),
            _ => {
                let mut hi = 1.0_f64;
                while self.eval(hi) < y {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return f64::INFINITY;
                    }
                }
                bisect(|t| self.eval(t) - y, 0.0, hi, 1e-15)
            }
        }
    }
}

impl fmt::Display for ScaleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ScaleKind::Identity => f.write_str("identity"),
            ScaleKind::LogClamp => f.write_str("log"),
            ScaleKind::Power { rho } => write!(f, "power(rho={rho})"),
            ScaleKind::LinearLog => f.write_str("linear_log"),
            ScaleKind::PowerLogCorrected { rho } => write!(f, "power_log_corrected(rho={rho})"),
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid(
            "rho",
            format!("must be finite and > 0, got {rho}"),
        ));
    }
    Ok(())
}

/// One row of a regular-variation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularVariationEntry {
    /// Multiplier `x`.
    pub x: f64,
    /// `g(x t_max) / g(t_max)`.
    pub ratio: f64,
    /// `|ratio - x^rho|`.
    pub abs_deviation: f64,
    /// `|ratio / x^rho - 1|`; the pass flag is judged on this value.
    pub deviation: f64,
    /// `deviation <= tol`.
    pub pass: bool,
}

/// Per-multiplier deviations of `g(x t)/g(t)` from `x^rho` at `t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularVariationReport {
    /// Evaluation point.
    pub t_max: f64,
    /// Entries in `x_grid` order.
    pub entries: Vec<RegularVariationEntry>,
}

impl RegularVariationReport {
    /// True when every entry passes.
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    /// Largest relative deviation.
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }
}

/// Checks the regular-variation limit on a grid of multipliers at `t_max`.
pub fn check_regular_variation(
    g: &ScaleFunction,
    x_grid: &[f64],
    t_max: f64,
    tol: f64,
) -> Result<RegularVariationReport> {
    if x_grid.is_empty() {
        return Err(Error::invalid("x_grid", "must be nonempty"));
    }
    if let Some(&x) = x_grid.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::invalid(
            "x_grid",
            format!("multipliers must be > 0, got {x}"),
        ));
    }
    let base = g.eval(t_max);
    if !(base > 0.0) {
        return Err(Error::DegenerateScale { at: t_max });
    }
    let rho = g.rho();
    let entries = x_grid
        .iter()
        .map(|&x| {
            let ratio = g.eval(x * t_max) / base;
            let target = powf(x, rho);
            let deviation = (ratio / target - 1.0).abs();
            RegularVariationEntry {
                x,
                ratio,
                abs_deviation: (ratio - target).abs(),
                deviation,
                pass: deviation <= tol,
            }
        })
        .collect();
    Ok(RegularVariationReport { t_max, entries })
}

/// `s * sqrt(n * g(log n))`, the moderate-deviation threshold at sample size
/// `n` (a real argument is accepted so the map can be treated as a function
/// of continuous time).
pub fn scaled_threshold(g: &ScaleFunction, s: f64, n: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::invalid("s", "must be > 0"));
    }
    if !(n >= 2.0) {
        return Err(Error::invalid("n", "must be >= 2"));
    }
    let gl = g.eval(ln(n));
    if !(gl > 0.0) {
        return Err(Error::DegenerateScale { at: ln(n) });
    }
    Ok(s * sqrt(n * gl))
}

/// Truncation level `delta_hat * sqrt(n / g(log n))`.
pub fn truncation_level(g: &ScaleFunction, n: f64, delta_hat: f64) -> Result<f64> {
    if !(delta_hat > 0.0) {
        return Err(Error::invalid("delta_hat", "must be > 0"));
    }
    if !(n >= 2.0) {
        return Err(Error::invalid("n", "must be >= 2"));
    }
    let gl = g.eval(ln(n));
    if !(gl > 0.0) {
        return Err(Error::DegenerateScale { at: ln(n) });
    }
    Ok(delta_hat * sqrt(n / gl))
}

/// Ratio `g(log phi_s(t)) / g(log t)` at `t_max` and its predicted limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfIndexLimit {
    /// Numeric ratio at `t_max`.
    pub ratio: f64,
    /// `2^-rho`.
    pub predicted: f64,
}

impl HalfIndexLimit {
    /// `|ratio - predicted|`.
    pub fn gap(&self) -> f64 {
        (self.ratio - self.predicted).abs()
    }
}

/// Evaluates `g(log phi_s(t)) / g(log t)` with `phi_s(t) = s sqrt(t g(log(t max e)))`.
///
/// The logarithm of `phi_s` is formed directly, so `t_max` may be huge.
pub fn half_index_limit(g: &ScaleFunction, s: f64, t_max: f64) -> Result<HalfIndexLimit> {
    if !(s > 0.0) {
        return Err(Error::invalid("s", "must be > 0"));
    }
    if !(t_max > E) {
        return Err(Error::invalid("t_max", "must exceed e"));
    }
    let log_t = ln(t_max);
    let denom = g.eval(log_t);
    if !(denom > 0.0) {
        return Err(Error::DegenerateScale { at: log_t });
    }
    let inner = g.eval(log_t.max(1.0));
    let log_phi = ln(s) + 0.5 * (log_t + ln(inner));
    Ok(HalfIndexLimit {
        ratio: g.eval(log_phi) / denom,
        predicted: powf(2.0, -g.rho()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn catalog() -> Vec<ScaleFunction> {
        vec![
            ScaleFunction::identity(),
            ScaleFunction::log_clamp(),
            ScaleFunction::power(0.5).unwrap(),
            ScaleFunction::power(2.0).unwrap(),
            ScaleFunction::linear_log(),
            ScaleFunction::power_log_corrected(2.0).unwrap(),
        ]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ScaleFunction::identity().eval(7.0), 7.0);
        assert_eq!(ScaleFunction::log_clamp().eval(1.0), 0.0);
        assert_eq!(ScaleFunction::log_clamp().eval(0.3), 0.0);
        // t = e^4: t^2 (1 + 1/4)
        let t = libm::exp(4.0);
        let v = ScaleFunction::power_log_corrected(2.0).unwrap().eval(t);
        let expected = libm::exp(8.0) * 1.25;
        assert!((v / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_index() {
        assert!(ScaleFunction::power(0.0).is_err());
        assert!(ScaleFunction::power(-1.0).is_err());
        assert!(ScaleFunction::power(f64::NAN).is_err());
    }

    #[test]
    fn regular_variation_examples() {
        let r = check_regular_variation(&ScaleFunction::identity(), &[2.0], 1e6, 1e-12).unwrap();
        assert_eq!(r.entries[0].deviation, 0.0);
        assert!(r.all_pass());

        let r = check_regular_variation(&ScaleFunction::log_clamp(), &[2.0], 1e8, 0.05).unwrap();
        // log(2e8)/log(1e8) - 1
        assert!((r.entries[0].deviation - 0.037_628_749_5).abs() < 1e-9);
        assert!(r.all_pass());

        let r = check_regular_variation(&ScaleFunction::linear_log(), &[3.0], 1e8, 0.1).unwrap();
        // 3 log(3e8) / (3 log 1e8) - 1 = log 3 / log 1e8
        assert!((r.entries[0].deviation - 0.059_640_156_8).abs() < 1e-9);
        assert!((r.entries[0].abs_deviation - 0.178_920_470_5).abs() < 1e-9);
        assert!(r.all_pass());
    }

    #[test]
    fn regular_variation_rejects_zero_scale() {
        let err = check_regular_variation(&ScaleFunction::log_clamp(), &[2.0], 1.0, 0.1);
        assert!(matches!(err, Err(Error::DegenerateScale { .. })));
        assert!(check_regular_variation(&ScaleFunction::identity(), &[], 10.0, 0.1).is_err());
    }

    #[test]
    fn regular_variation_deviation_shrinks() {
        for g in catalog() {
            let xs = [0.5, 2.0, 3.0];
            let a = check_regular_variation(&g, &xs, 1e6, 1.0).unwrap();
            let b = check_regular_variation(&g, &xs, 1e12, 1.0).unwrap();
            for (ea, eb) in a.entries.iter().zip(&b.entries) {
                assert!(eb.deviation <= ea.deviation + 1e-6, "{g}: {ea:?} {eb:?}");
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let g = ScaleFunction::identity();
        let e2 = libm::exp(2.0);
        let v = scaled_threshold(&g, 1.0, e2).unwrap();
        assert!((v - E * core::f64::consts::SQRT_2).abs() < 1e-12);
        let v = scaled_threshold(&g, 2.0, 100.0).unwrap();
        assert!((v - 42.919_320_6).abs() < 1e-6, "{v}");
        // log(log 10) = 0.834 > 0, but log(log 2) < 0 clamps to 0
        assert!(matches!(
            scaled_threshold(&ScaleFunction::log_clamp(), 1.0, 2.0),
            Err(Error::DegenerateScale { .. })
        ));
        assert!(scaled_threshold(&g, 1.0, 1.5).is_err());
        assert!(scaled_threshold(&g, 0.0, 10.0).is_err());
    }

    #[test]
    fn truncation_examples() {
        let g = ScaleFunction::identity();
        let c = truncation_level(&g, E, 0.7).unwrap();
        assert!((c - 0.7 * sqrt(E)).abs() < 1e-14);
        let c = truncation_level(&g, 1e4, 0.5).unwrap();
        assert!((c - 16.475_255_72).abs() < 1e-6, "{c}");
        // clamp boundary: delta_hat = 1/sqrt(g(log n)) gives sqrt(n)/g(log n)
        let n = 1e4_f64;
        let gl = ln(n);
        let c = truncation_level(&g, n, 1.0 / sqrt(gl)).unwrap();
        assert!((c - sqrt(n) / gl).abs() < 1e-12);
    }

    #[test]
    fn half_index_examples() {
        let h = half_index_limit(&ScaleFunction::identity(), 1.0, 1e8).unwrap();
        assert_eq!(h.predicted, 0.5);
        // (log t + log log t) / (2 log t) at t = 1e8
        assert!((h.ratio - 0.579_081_604_7).abs() < 1e-9, "{}", h.ratio);

        let h = half_index_limit(&ScaleFunction::log_clamp(), 1.0, 1e8).unwrap();
        assert_eq!(h.predicted, 1.0);
        assert!((h.ratio - 0.781_457_368_3).abs() < 1e-9, "{}", h.ratio);

        let h = half_index_limit(&ScaleFunction::power(2.0).unwrap(), 1.0, 1e8).unwrap();
        assert_eq!(h.predicted, 0.25);
        assert!(half_index_limit(&ScaleFunction::identity(), 1.0, 2.0).is_err());
    }

    #[test]
    fn half_index_converges() {
        for g in catalog() {
            let near = half_index_limit(&g, 1.5, 1e6).unwrap();
            let far = half_index_limit(&g, 1.5, 1e10).unwrap();
            assert!(far.gap() <= near.gap() + 1e-6, "{g}: {near:?} {far:?}");
        }
        // far out the identity scale is within 0.05 of 1/2
        let h = half_index_limit(&ScaleFunction::identity(), 1.0, 1e20).unwrap();
        assert!(h.gap() < 0.05);
    }

    #[test]
    fn inverse_matches_eval() {
        for g in catalog() {
            for &y in &[0.5, 3.0, 40.0, 1e4] {
                let t = g.inverse(y);
                if t.is_infinite() {
                    continue;
                }
                assert!((g.eval(t) / y - 1.0).abs() < 1e-9, "{g} {y} {t}");
            }
        }
    }

    proptest! {
        #[test]
        fn eval_is_nondecreasing(a in 0.0..1e6f64, b in 0.0..1e6f64, k in 0usize..6) {
            let g = catalog()[k];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(g.eval(lo) <= g.eval(hi));
        }

        #[test]
        fn threshold_truncation_identity(s in 0.1..10.0f64, d in 0.05..5.0f64, n in 20.0..1e9f64, k in 0usize..6) {
            let g = catalog()[k];
            let a = scaled_threshold(&g, s, n).unwrap();
            let c = truncation_level(&g, n, d).unwrap();
            let lhs = a / (n * c);
            let rhs = s / (d * n) * g.eval(ln(n));
            prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn threshold_increasing(s in 0.1..10.0f64, n in 20.0..1e9f64, k in 0usize..6) {
            let g = catalog()[k];
            let a = scaled_threshold(&g, s, n).unwrap();
            prop_assert!(scaled_threshold(&g, s, n * 1.01).unwrap() > a);
            prop_assert!(scaled_threshold(&g, s * 1.01, n).unwrap() > a);
        }
    }
}
