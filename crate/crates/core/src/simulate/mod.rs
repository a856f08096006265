//! Monte Carlo estimators, bound envelopes and exact inequality checks.
//!
//! Replications are split into chunks of [`CHUNK`] reps. Chunk `k` draws
//! from stream `k` of the run seed and partial sums are combined in chunk
//! order, so results do not depend on how an [`Executor`] schedules chunks.

use alloc::vec::Vec;

use crate::math::{ln, sqrt};
use crate::scale::ScaleFunction;

mod array;
mod cells;
mod crude;
mod levy;
mod trajectory;
mod truncation;

pub use array::{
    array_tail_mc, kolmogorov_lower, kolmogorov_upper, ArrayEstimate, TriangularArray,
};
pub use cells::{tilted_tail, CellLaw, Outside, TiltedTail, CELLS};
pub use crude::crude_mc;
pub use levy::{
    levy_maximal_check, levy_sweep, max_lower_bound_check, max_lower_bound_sweep, sweep_laws,
    DiscreteLaw, LevyCheck, LevyEnumeration, LevySweep, MaxBoundCheck, MaxBoundSweep, MAX_OUTCOMES,
};
pub use trajectory::{
    classify_model, convergence_trajectory, exponent_grid, rate_band, Trajectory, TrajectoryPoint,
};
pub use truncation::{split_estimate, tilted_mc_truncated, SplitEstimate, TruncationScheme};

/// Replications per chunk.
pub const CHUNK: u64 = 1024;

/// Runs independent chunk jobs and returns their results in index order.
pub trait Executor: Sync {
    /// Evaluates `f(0), ..., f(count - 1)`; the output is ordered by index.
    fn map_chunks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs chunks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_chunks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}

pub(crate) fn chunk_count(reps: u64) -> usize {
    reps.div_ceil(CHUNK) as usize
}

pub(crate) fn chunk_len(reps: u64, k: usize) -> u64 {
    CHUNK.min(reps - k as u64 * CHUNK)
}

/// Estimator that produced an [`Estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Fraction of replications that hit the event.
    Crude,
    /// Importance sampling of the truncated, recentered sum.
    Tilted,
    /// Truncated term plus the single-summand union bound.
    Split,
    /// Conditional truncated law times `(1 - p_n)^n`.
    ConditionalLower,
}

impl Method {
    /// Snake-case name.
    pub fn name(&self) -> &'static str {
        match self {
            Method::Crude => "crude",
            Method::Tilted => "tilted",
            Method::Split => "split",
            Method::ConditionalLower => "conditional_lower",
        }
    }
}

/// In-band warnings attached to an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    /// Fewer than 100 replications hit the event.
    pub low_count: bool,
    /// `p_hat = 0`; the normalized value is `-inf`.
    pub censored: bool,
    /// The union-bound term reached 1, so the upper bound is trivial.
    pub vacuous_union_bound: bool,
    /// The mean correction exceeds `eps * a_n`, so the bound is not
    /// guaranteed at this `n`.
    pub outside_validity: bool,
}

impl Flags {
    /// Names of the raised flags in a fixed order.
    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.low_count {
            v.push("low_count");
        }
        if self.censored {
            v.push("censored");
        }
        if self.vacuous_union_bound {
            v.push("vacuous_union_bound");
        }
        if self.outside_validity {
            v.push("outside_validity");
        }
        v
    }
}

/// A probability estimate with its normalized log value.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    /// Point estimate in `[0, 1]`.
    pub p_hat: f64,
    /// Standard error of `p_hat`.
    pub stderr: f64,
    /// Number of summands.
    pub n: u64,
    /// Deviation level.
    pub x: f64,
    /// `log p_hat`, kept finite when `p_hat` underflows.
    pub log_p: f64,
    /// `log_p / g(log n)`.
    pub normalized: f64,
    /// Estimator.
    pub method: Method,
    /// Replications that hit the event.
    pub hits: u64,
    /// Replications.
    pub reps: u64,
    /// Warnings.
    pub flags: Flags,
}

impl Estimate {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_log(
        g: &ScaleFunction,
        n: u64,
        x: f64,
        log_p: f64,
        stderr: f64,
        method: Method,
        hits: u64,
        reps: u64,
    ) -> Self {
        let log_p = log_p.min(0.0);
        let p_hat = crate::math::exp(log_p);
        let flags = Flags {
            low_count: hits < 100,
            censored: log_p == f64::NEG_INFINITY,
            ..Flags::default()
        };
        Estimate {
            p_hat,
            stderr,
            n,
            x,
            log_p,
            normalized: log_p / g.eval(ln(n as f64)),
            method,
            hits,
            reps,
            flags,
        }
    }

    /// `stderr / p_hat`, `inf` when `p_hat = 0`.
    pub fn rel_stderr(&self) -> f64 {
        if self.p_hat > 0.0 {
            self.stderr / self.p_hat
        } else {
            f64::INFINITY
        }
    }
}

/// `sqrt(p (1 - p) / reps)`.
pub(crate) fn binomial_stderr(p: f64, reps: u64) -> f64 {
    sqrt(p * (1.0 - p) / reps as f64)
}
