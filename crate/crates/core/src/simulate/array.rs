use alloc::format;

use crate::math::{exp, ln, sqrt};
use crate::scale::{scaled_threshold, ScaleFunction};
use crate::tails::TailModel;
use crate::{Error, Result};

use super::cells::{tilted_tail, CellLaw, Outside};
use super::truncation::TruncationScheme;
use super::{Estimate, Executor, Method};

/// `exp(-(x^2 / 2B)(1 - x M / 2B))`, valid while `x M <= B`.
pub fn kolmogorov_upper(b: f64, m: f64, x: f64) -> Result<f64> {
    if !(b > 0.0) || !(m >= 0.0) || !(x > 0.0) {
        return Err(Error::invalid(
            "kolmogorov_upper",
            format!("need B > 0, M >= 0, x > 0; got {b}, {m}, {x}"),
        ));
    }
    if x * m > b {
        return Err(Error::OutsideValidityWindow {
            reason: format!("x M = {} exceeds B = {b}", x * m),
        });
    }
    Ok(exp(-(x * x / (2.0 * b)) * (1.0 - x * m / (2.0 * b))))
}

/// `exp(-(x^2 / 2B)(1 - eps))`. Holds only for large enough `n`, so it
/// serves as an asymptotic floor.
pub fn kolmogorov_lower(b: f64, x: f64, eps: f64) -> Result<f64> {
    if !(b > 0.0) || !(x > 0.0) || !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid(
            "kolmogorov_lower",
            format!("need B > 0, x > 0, eps in [0, 1); got {b}, {x}, {eps}"),
        ));
    }
    Ok(exp(-(x * x / (2.0 * b)) * (1.0 - eps)))
}

/// Row laws of a triangular array of bounded, centered summands.
#[derive(Debug, Clone)]
pub enum TriangularArray {
    /// `+-sigma` with equal probability in every row.
    Signs {
        /// Magnitude.
        sigma: f64,
    },
    /// `+-tau sqrt(n / g(log n))` in row `n`; the bound never shrinks
    /// relative to the scale, so the array is rejected.
    ScaledSigns {
        /// Fixed ratio to `sqrt(n / g(log n))`.
        tau: f64,
    },
    /// `X 1{|X| <= c_n} - mu_n` for a centered model.
    Truncated(TailModel),
}

/// Envelope inputs and the estimate for one row of an array.
#[derive(Debug, Clone)]
pub struct ArrayEstimate {
    /// Importance-sampled `P(sum_i X_{n,i} > r sqrt(n g(log n)))`.
    pub estimate: Estimate,
    /// `B_n`, variance of the row sum.
    pub b_n: f64,
    /// `M_n`, bound on `|X_{n,i}|`.
    pub m_n: f64,
    /// `x_n = r sqrt(n g(log n))`.
    pub x_n: f64,
    /// `M_n / sqrt(n / g(log n))`.
    pub tau_n: f64,
}

struct Row {
    law: CellLaw,
    shift: f64,
    bound: f64,
    variance: f64,
}

impl TriangularArray {
    fn row(&self, g: &ScaleFunction, n: u64) -> Result<Row> {
        let nf = n as f64;
        let scale = sqrt(nf / g.eval(ln(nf)));
        match self {
            TriangularArray::Signs { sigma } | TriangularArray::ScaledSigns { tau: sigma } => {
                let a = match self {
                    TriangularArray::ScaledSigns { .. } => sigma * scale,
                    _ => *sigma,
                };
                let m = TailModel::symmetric_two_point(a)?;
                let law = CellLaw::truncated(&m, a, Outside::Condition)?;
                Ok(Row {
                    law,
                    shift: 0.0,
                    bound: a,
                    variance: a * a,
                })
            }
            TriangularArray::Truncated(model) => {
                let s = TruncationScheme::new(model, g, n)?;
                let law = s.zeroed_law().clone();
                let variance = law.variance();
                let bound = s.c_n + s.mu_n.abs();
                Ok(Row {
                    law,
                    shift: s.mu_n,
                    bound,
                    variance,
                })
            }
        }
    }

    /// `M_n / sqrt(n / g(log n))`.
    pub fn tau(&self, g: &ScaleFunction, n: u64) -> Result<f64> {
        let nf = n as f64;
        Ok(self.row(g, n)?.bound / sqrt(nf / g.eval(ln(nf))))
    }

    /// Checks `tau_n <= 1` and that `tau` strictly decreases over
    /// `n, 10 n, 100 n`.
    pub fn check(&self, g: &ScaleFunction, n: u64) -> Result<()> {
        let t = [self.tau(g, n)?, self.tau(g, 10 * n)?, self.tau(g, 100 * n)?];
        if t[0] > 1.0 {
            return Err(Error::ArrayHypothesis {
                reason: format!("tau_n = {} exceeds 1 at n = {n}", t[0]),
            });
        }
        if !(t[1] < t[0] && t[2] < t[1]) {
            return Err(Error::ArrayHypothesis {
                reason: format!(
                    "tau_n does not decrease: {} at n, {} at 10n, {} at 100n",
                    t[0], t[1], t[2]
                ),
            });
        }
        Ok(())
    }
}

/// Tilted estimate of `P(sum_i X_{n,i} > r sqrt(n g(log n)))` for one row.
#[allow(clippy::too_many_arguments)]
pub fn array_tail_mc<E: Executor>(
    array: &TriangularArray,
    g: &ScaleFunction,
    n: u64,
    r: f64,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<ArrayEstimate> {
    if !(r > 0.0) {
        return Err(Error::invalid("r", format!("must be > 0, got {r}")));
    }
    array.check(g, n)?;
    let row = array.row(g, n)?;
    let nf = n as f64;
    let x_n = scaled_threshold(g, r, nf)?;
    let t = tilted_tail(&row.law, n, x_n + nf * row.shift, reps, seed, exec)?;
    let estimate = Estimate::from_log(g, n, r, t.log_p, t.stderr(), Method::Tilted, t.hits, reps);
    Ok(ArrayEstimate {
        estimate,
        b_n: nf * row.variance,
        m_n: row.bound,
        x_n,
        tau_n: row.bound / sqrt(nf / g.eval(ln(nf))),
    })
}
