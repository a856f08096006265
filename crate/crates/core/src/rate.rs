//! Limiting rates of `log P(S_n - n mu > x sqrt(n g(log n))) / g(log n)`
//! and the classification of their regimes.
//!
//! Infinite exponents follow extended arithmetic: `min(a, inf) = a`.

use alloc::format;
use alloc::vec::Vec;

use crate::exponents::TailExponents;
use crate::math::powf;
use crate::{Error, Result};

/// Which deviation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `S_n - n mu > x a_n`; governed by the right tail.
    Upper,
    /// `S_n - n mu < -x a_n`; governed by the left tail.
    Lower,
    /// `|S_n - n mu| > x a_n`; governed by `|X|`.
    TwoSided,
}

/// Variance, regular-variation index and tail exponents of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSpec {
    sigma2: f64,
    rho: f64,
    exps: TailExponents,
}

impl RateSpec {
    /// Validates `sigma2 > 0` finite, `rho >= 0`, and exponent ordering.
    pub fn new(sigma2: f64, rho: f64, exps: TailExponents) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::invalid(
                "sigma2",
                format!("must be finite and > 0, got {sigma2}"),
            ));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::invalid(
                "rho",
                format!("must be finite and >= 0, got {rho}"),
            ));
        }
        if !exps.is_ordered() {
            return Err(Error::invalid(
                "exps",
                format!("exponents violate ordering: {exps:?}"),
            ));
        }
        Ok(RateSpec { sigma2, rho, exps })
    }

    /// Variance.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Regular-variation index of the scale.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Tail exponents.
    pub fn exps(&self) -> &TailExponents {
        &self.exps
    }

    fn rate(&self, x: f64, lambda: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::invalid("x", format!("must be > 0, got {x}")));
        }
        let gaussian = x * x / (2.0 * self.sigma2);
        Ok(-gaussian.min(lambda / powf(2.0, self.rho)))
    }

    /// `-min(x^2 / (2 sigma2), lambda_bar / 2^rho)` with the side's `bar` exponent.
    pub fn rate_limsup(&self, x: f64, side: Side) -> Result<f64> {
        let lambda = match side {
            Side::Upper => self.exps.lam1_bar,
            Side::Lower => self.exps.lam2_bar,
            Side::TwoSided => self.exps.lam_bar,
        };
        self.rate(x, lambda)
    }

    /// `-min(x^2 / (2 sigma2), lambda_under / 2^rho)` with the side's `under` exponent.
    pub fn rate_liminf(&self, x: f64, side: Side) -> Result<f64> {
        let lambda = match side {
            Side::Upper => self.exps.lam1_under,
            Side::Lower => self.exps.lam2_under,
            Side::TwoSided => self.exps.lam_under,
        };
        self.rate(x, lambda)
    }

    /// `(x, rate_limsup, rate_liminf)` for each `x`.
    pub fn rate_curve(&self, xs: &[f64], side: Side) -> Result<Vec<(f64, f64, f64)>> {
        xs.iter()
            .map(|&x| Ok((x, self.rate_limsup(x, side)?, self.rate_liminf(x, side)?)))
            .collect()
    }
}

/// Asymptotic regime of `log P(S_n > x sqrt(n g(log n)) + n eta) / g(log n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// The normalized log-probability tends to 0 for every `x > 0`.
    LimitZero,
    /// limsup in `(-inf, 0)` but liminf is not; requires `lambda_bar > 0`
    /// together with `lambda_under = 0`, which the ordering rules out.
    BoundedNonzeroLimsup,
    /// Both limsup and liminf lie in `(-inf, 0)`.
    BoundedNonzeroLiminfToo,
    /// The probability is eventually zero.
    MinusInfinity,
    /// limsup is 0 while liminf lies in `(-inf, 0)` (`lambda_bar = 0 < lambda_under`).
    Mixed,
}

impl Regime {
    /// Snake-case name.
    pub fn name(&self) -> &'static str {
        match self {
            Regime::LimitZero => "limit_zero",
            Regime::BoundedNonzeroLimsup => "bounded_nonzero_limsup",
            Regime::BoundedNonzeroLiminfToo => "bounded_nonzero_liminf_too",
            Regime::MinusInfinity => "minus_infinity",
            Regime::Mixed => "mixed",
        }
    }
}

/// Regime of the centered-at-`eta` deviation probability.
///
/// `sigma2` may be 0 (degenerate law) or `inf`. The two exponents that
/// decide the bounded regimes are the two-sided `lam_bar` (limsup) and
/// `lam_under` (liminf).
pub fn classify(sigma2: f64, mean_matches_eta: bool, exps: &TailExponents) -> Regime {
    if !mean_matches_eta || sigma2.is_infinite() {
        return Regime::LimitZero;
    }
    if sigma2 == 0.0 {
        return Regime::MinusInfinity;
    }
    let limsup_bounded = exps.lam_bar > 0.0;
    let liminf_bounded = exps.lam_under > 0.0;
    match (limsup_bounded, liminf_bounded) {
        (false, false) => Regime::LimitZero,
        (true, true) => Regime::BoundedNonzeroLiminfToo,
        (true, false) => Regime::BoundedNonzeroLimsup,
        (false, true) => Regime::Mixed,
    }
}
