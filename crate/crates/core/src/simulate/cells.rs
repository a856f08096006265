//! Bounded summand laws on a cell partition and exponentially tilted
//! sampling of their sums.
//!
//! The law restricted to `[-c, c]` is split into [`CELLS`] equal cells. The
//! proposal picks a cell with probability proportional to its tilted mass
//! `M_j(theta) = E[e^{theta X}; X in cell j]` and then draws from the
//! untilted law inside the cell, so the likelihood ratio is constant per
//! cell and the estimator is exactly unbiased. Cell integrals are computed
//! by parts, `int e^{theta y} dF = e^{theta a} F(a, b] + theta int e^{theta y} F(y, b] dy`,
//! with an 8-point Gauss-Legendre rule.

use alloc::format;
use alloc::vec::Vec;

use crate::math::{bisect, exp, ln, sqrt, GaussLegendre};
use crate::rng::StreamRng;
use crate::tails::TailModel;
use crate::{Error, Result};

use super::{chunk_count, chunk_len, Executor};

/// Number of equal cells covering the truncation window.
pub const CELLS: usize = 512;

const NODES: usize = 8;

/// What happens to the mass outside `[-c, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outside {
    /// Condition on `|X| <= c` (the law of `X` given `|X| <= c`).
    Condition,
    /// Replace `X` by 0 when `|X| > c` (the law of `X 1{|X| <= c}`).
    ZeroAtom,
}

#[derive(Debug, Clone)]
struct Cell {
    a: f64,
    b: f64,
    /// Normalized mass.
    mass: f64,
    /// `Some(v)` for a point mass at `v`.
    atom: Option<f64>,
    /// Survival window `(S(b), S(a-))` used for inversion inside the cell.
    w_lo: f64,
    w_hi: f64,
    /// `(node, weight * P(node < X <= b))`, normalized.
    nodes: [(f64, f64); NODES],
}

/// A summand law supported on finitely many cells, with exact tilted
/// moments up to quadrature error.
#[derive(Debug, Clone)]
pub struct CellLaw {
    model: TailModel,
    cells: Vec<Cell>,
    top: f64,
    bottom: f64,
    outside_mass: f64,
    mean: f64,
}

impl CellLaw {
    /// Law of `X` restricted to `[-c, c]` according to `outside`.
    pub fn truncated(model: &TailModel, c: f64, outside: Outside) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::invalid("c", format!("must be > 0, got {c}")));
        }
        let (s_lo, s_hi) = model.support();
        let lo = s_lo.max(-c);
        let hi = s_hi.min(c);
        let gl = GaussLegendre::new(NODES);
        let mut cells = Vec::new();
        if hi > lo {
            let width = (hi - lo) / CELLS as f64;
            for j in 0..CELLS {
                let a = lo + width * j as f64;
                let b = if j + 1 == CELLS {
                    hi
                } else {
                    lo + width * (j + 1) as f64
                };
                let mut mass = model.interval_mass(a, b);
                let mut w_hi = model.survival(a);
                if j == 0 && model.has_atoms() {
                    w_hi = model.survival_closed(a);
                    mass += (w_hi - model.survival(a)).max(0.0);
                }
                let mut nodes = [(0.0, 0.0); NODES];
                for (slot, (y, w)) in nodes.iter_mut().zip(gl.mapped(a, b)) {
                    *slot = (y, w * model.interval_mass(y, b));
                }
                cells.push(Cell {
                    a,
                    b,
                    mass,
                    atom: None,
                    w_lo: model.survival(b),
                    w_hi,
                    nodes,
                });
            }
        } else if hi == lo {
            let mass = model.survival_closed(lo) - model.survival(lo);
            cells.push(Cell {
                a: lo,
                b: lo,
                mass,
                atom: Some(lo),
                w_lo: 0.0,
                w_hi: 0.0,
                nodes: [(lo, 0.0); NODES],
            });
        }
        let outside_mass = if hi >= lo {
            let below = if s_lo < lo { model.left_tail(-lo) } else { 0.0 };
            let above = if s_hi > hi { model.survival(hi) } else { 0.0 };
            below + above
        } else {
            1.0
        };
        if outside == Outside::ZeroAtom && outside_mass > 0.0 {
            cells.push(Cell {
                a: 0.0,
                b: 0.0,
                mass: outside_mass,
                atom: Some(0.0),
                w_lo: 0.0,
                w_hi: 0.0,
                nodes: [(0.0, 0.0); NODES],
            });
        }
        let total: f64 = cells.iter().map(|c| c.mass).sum();
        if !(total > 0.0) {
            return Err(Error::invalid("c", "truncation window carries no mass"));
        }
        for cell in &mut cells {
            cell.mass /= total;
            for node in &mut cell.nodes {
                node.1 /= total;
            }
        }
        let top = cells.iter().map(|c| c.b).fold(f64::NEG_INFINITY, f64::max);
        let bottom = cells.iter().map(|c| c.a).fold(f64::INFINITY, f64::min);
        let mut law = CellLaw {
            model: model.clone(),
            cells,
            top,
            bottom,
            outside_mass,
            mean: 0.0,
        };
        law.mean = law.tilted_mean(0.0);
        Ok(law)
    }

    /// Mean of the cell law.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `P(|X| > c)` under the original law.
    pub fn outside_mass(&self) -> f64 {
        self.outside_mass
    }

    /// Largest point of the support.
    pub fn top(&self) -> f64 {
        self.top
    }

    /// Smallest point of the support.
    pub fn bottom(&self) -> f64 {
        self.bottom
    }

    /// Variance of the cell law, from the second derivative of the
    /// tilted mass at 0.
    pub fn variance(&self) -> f64 {
        // E X^2 = sum a^2 m + int 2y F(y, b] dy per cell.
        let second: f64 = self
            .cells
            .iter()
            .map(|c| c.a * c.a * c.mass + c.nodes.iter().map(|&(y, wd)| 2.0 * y * wd).sum::<f64>())
            .sum();
        (second - self.mean * self.mean).max(0.0)
    }

    /// `(M_j(theta), M_j'(theta))` relative to `e^{theta top}`.
    fn cell_moments(&self, cell: &Cell, theta: f64) -> (f64, f64) {
        let r = self.top;
        let ea = exp(theta * (cell.a - r));
        let mut m = ea * cell.mass;
        let mut dm = (cell.a - r) * ea * cell.mass;
        for &(y, wd) in &cell.nodes {
            let e = exp(theta * (y - r)) * wd;
            m += theta * e;
            dm += e * (1.0 + theta * (y - r));
        }
        (m.max(0.0), dm)
    }

    fn totals(&self, theta: f64) -> (f64, f64) {
        self.cells.iter().fold((0.0, 0.0), |(m, d), c| {
            let (mj, dj) = self.cell_moments(c, theta);
            (m + mj, d + dj)
        })
    }

    /// Mean under the tilt `e^{theta x}`.
    pub fn tilted_mean(&self, theta: f64) -> f64 {
        let (m, d) = self.totals(theta);
        if m > 0.0 {
            self.top + d / m
        } else {
            self.top
        }
    }

    /// Tilt whose mean equals `mean`; 0 when `mean` does not exceed the
    /// untilted mean.
    pub fn solve_tilt(&self, mean: f64) -> Result<f64> {
        if mean <= self.mean {
            return Ok(0.0);
        }
        if mean >= self.top {
            return Err(Error::TiltUnreachable {
                required_mean: mean,
                support_max: self.top,
            });
        }
        let spread = (self.top - self.bottom).max(f64::MIN_POSITIVE);
        let mut hi = 1.0 / spread;
        let mut guard = 0;
        while self.tilted_mean(hi) < mean {
            hi *= 2.0;
            guard += 1;
            if guard > 2000 || !hi.is_finite() {
                return Err(Error::TiltUnreachable {
                    required_mean: mean,
                    support_max: self.top,
                });
            }
        }
        Ok(bisect(|t| self.tilted_mean(t) - mean, 0.0, hi, 1e-10))
    }
}

/// Outcome of an importance-sampled tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedTail {
    /// `log` of the estimate; `-inf` when no replication hit.
    pub log_p: f64,
    /// Standard error in `log`-space scale: `stderr / p_hat` (relative).
    pub rel_stderr: f64,
    /// Replications that hit the event.
    pub hits: u64,
    /// Replications.
    pub reps: u64,
    /// Tilt parameter used.
    pub theta: f64,
}

impl TiltedTail {
    /// Absolute standard error.
    pub fn stderr(&self) -> f64 {
        if self.log_p == f64::NEG_INFINITY {
            0.0
        } else {
            exp(self.log_p) * self.rel_stderr
        }
    }
}

struct Proposal {
    cum: Vec<f64>,
    ln_lr: Vec<f64>,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    hits: u64,
    sum: f64,
    sum_sq: f64,
}

/// Estimates `P(Y_1 + ... + Y_n > target)` for i.i.d. `Y` from `law`,
/// tilting so the mean of the sum equals `target`.
pub fn tilted_tail<E: Executor>(
    law: &CellLaw,
    n: u64,
    target: f64,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<TiltedTail> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if reps < 2 {
        return Err(Error::invalid("reps", "must be >= 2"));
    }
    let nf = n as f64;
    let theta = law.solve_tilt(target / nf)?;
    let moments: Vec<f64> = law
        .cells
        .iter()
        .map(|c| law.cell_moments(c, theta).0)
        .collect();
    let total: f64 = moments.iter().sum();
    let mut cum = Vec::with_capacity(moments.len());
    let mut ln_lr = Vec::with_capacity(moments.len());
    let mut acc = 0.0;
    for (cell, &m) in law.cells.iter().zip(&moments) {
        let q = m / total;
        acc += q;
        cum.push(acc);
        ln_lr.push(if q > 0.0 { ln(cell.mass) - ln(q) } else { 0.0 });
    }
    let proposal = Proposal { cum, ln_lr };
    // ln LR of a sum is at most about ln_ref on the event
    let ln_ref = nf * ln(total) + nf * theta * law.top - theta * target;

    let draw = |rng: &mut StreamRng| -> (f64, f64) {
        let u = rng.uniform_open() * acc;
        let j = proposal
            .cum
            .partition_point(|&c| c < u)
            .min(law.cells.len() - 1);
        let cell = &law.cells[j];
        let y = match cell.atom {
            Some(v) => v,
            None => {
                let w = cell.w_lo + rng.uniform_open() * (cell.w_hi - cell.w_lo);
                law.model.inverse_survival(w).clamp(cell.a, cell.b)
            }
        };
        (y, proposal.ln_lr[j])
    };

    let parts = exec.map_chunks(chunk_count(reps), |k| {
        let mut rng = StreamRng::new(seed, k as u64);
        let mut part = Partial::default();
        for _ in 0..chunk_len(reps, k) {
            let mut s = 0.0;
            let mut l = 0.0;
            for _ in 0..n {
                let (y, lr) = draw(&mut rng);
                s += y;
                l += lr;
            }
            if s > target {
                let w = exp(l - ln_ref);
                part.hits += 1;
                part.sum += w;
                part.sum_sq += w * w;
            }
        }
        part
    });
    let mut hits = 0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for p in parts {
        hits += p.hits;
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    let r = reps as f64;
    let mean = sum / r;
    let var = ((sum_sq / r - mean * mean) * r / (r - 1.0)).max(0.0);
    let (log_p, rel_stderr) = if hits == 0 || !(mean > 0.0) {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        ((ln_ref + ln(mean)).min(0.0), sqrt(var / r) / mean)
    };
    Ok(TiltedTail {
        log_p,
        rel_stderr,
        hits,
        reps,
        theta,
    })
}
