use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::exponents::{exponents_from_tail, TailExponents, TailGrid};
use crate::rate::{classify, RateSpec, Regime, Side};
use crate::rng::splitmix64;
use crate::scale::ScaleFunction;
use crate::tails::{Law, TailModel};
use crate::{Error, Result};

use super::{crude_mc, split_estimate, tilted_mc_truncated, Estimate, Executor, Method};

/// Estimates at one sample size; failures are kept per point.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    /// Number of summands.
    pub n: u64,
    /// One estimate, or upper and lower for the split method.
    pub estimates: Result<Vec<Estimate>>,
}

/// Estimates over a grid of sample sizes with the limiting band.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// One entry per grid point.
    pub points: Vec<TrajectoryPoint>,
    /// Predicted limsup of the normalized log-probability.
    pub rate_limsup: f64,
    /// Predicted liminf of the normalized log-probability.
    pub rate_liminf: f64,
    /// Regime of the model.
    pub regime: Regime,
    /// Tail exponents used for the band.
    pub exponents: TailExponents,
}

/// Grid used to compute the exponents of `model`.
pub fn exponent_grid(model: &TailModel) -> TailGrid {
    match model.law() {
        Law::Oscillating(_) => TailGrid::oscillation(),
        _ => TailGrid::standard(),
    }
}

/// Band `(limsup, liminf)` for the upper deviation at level `x`.
pub fn rate_band(
    model: &TailModel,
    g: &ScaleFunction,
    x: f64,
) -> Result<(f64, f64, Regime, TailExponents)> {
    let moments = model.moments();
    let exps = if moments.variance == 0.0 {
        TailExponents::uniform(f64::INFINITY)
    } else {
        exponents_from_tail(&model.centered()?, g, &exponent_grid(model))?
    };
    let regime = classify(moments.variance, moments.mean.is_finite(), &exps);
    let (hi, lo) = match regime {
        Regime::LimitZero => (0.0, 0.0),
        Regime::MinusInfinity => (f64::NEG_INFINITY, f64::NEG_INFINITY),
        _ => {
            let rates = RateSpec::new(moments.variance, g.rho(), exps)?;
            (
                rates.rate_limsup(x, Side::Upper)?,
                rates.rate_liminf(x, Side::Upper)?,
            )
        }
    };
    Ok((hi, lo, regime, exps))
}

/// Regime of `P(S_n > x sqrt(n g(log n)) + n eta)` for i.i.d. copies of
/// `model`.
pub fn classify_model(model: &TailModel, g: &ScaleFunction, eta: f64) -> Result<Regime> {
    let moments = model.moments();
    let matches = moments.mean.is_finite() && moments.mean == eta;
    let exps = if moments.variance == 0.0 || !moments.variance.is_finite() || !matches {
        TailExponents::uniform(f64::INFINITY)
    } else {
        exponents_from_tail(&model.centered()?, g, &exponent_grid(model))?
    };
    Ok(classify(moments.variance, matches, &exps))
}

/// Runs `method` at every `n` in `n_grid` and attaches the rate band.
///
/// Grid point `n` uses the key `splitmix64(seed ^ n)`.
#[allow(clippy::too_many_arguments)]
pub fn convergence_trajectory<E: Executor>(
    model: &TailModel,
    g: &ScaleFunction,
    x: f64,
    n_grid: &[u64],
    method: Method,
    reps: u64,
    seed: u64,
    eps: Option<f64>,
    exec: &E,
) -> Result<Trajectory> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "n_grid",
            format!("must be non-empty and strictly increasing, got {n_grid:?}"),
        ));
    }
    let (rate_limsup, rate_liminf, regime, exponents) = rate_band(model, g, x)?;
    let points = n_grid
        .iter()
        .map(|&n| {
            let key = splitmix64(seed ^ n);
            let estimates = match method {
                Method::Crude => crude_mc(model, g, n, x, reps, key, exec).map(|e| vec![e]),
                Method::Tilted => {
                    tilted_mc_truncated(model, g, n, x, reps, key, eps.unwrap_or(0.0), exec)
                        .map(|e| vec![e])
                }
                Method::Split | Method::ConditionalLower => {
                    split_estimate(model, g, n, x, eps, reps, key, exec)
                        .map(|s| vec![s.upper, s.lower])
                }
            };
            TrajectoryPoint { n, estimates }
        })
        .collect();
    Ok(Trajectory {
        points,
        rate_limsup,
        rate_liminf,
        regime,
        exponents,
    })
}
