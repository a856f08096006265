//! Exact checks of the maximal inequalities for partial sums
//!
//! ```text
//! P(max_k (V_k + m(T_{k-1})) > t)   <= 2 P(max_k T_k > t)
//! P(max_k (T_k + m(T_n - T_k)) > t) <= 2 P(T_n > t)
//! ```
//!
//! for i.i.d. `V` with a finite rational law, by enumerating all outcome
//! tuples in exact rational arithmetic.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::math::{exp, exp_m1, ln, ln_1p};
use crate::{Error, Result};

type Q = Ratio<i128>;

/// Largest number of outcome tuples enumerated.
pub const MAX_OUTCOMES: u128 = 4096;

/// A law on at most four rational points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    points: Vec<(Q, Q)>,
}

impl DiscreteLaw {
    /// `(value, probability)` pairs; probabilities must be positive and sum to 1.
    pub fn new(points: Vec<(Q, Q)>) -> Result<Self> {
        if points.is_empty() || points.len() > 4 {
            return Err(Error::invalid(
                "points",
                format!("need 1 to 4 support points, got {}", points.len()),
            ));
        }
        if points.iter().any(|(_, p)| *p <= Q::zero()) {
            return Err(Error::invalid("points", "probabilities must be positive"));
        }
        let total: Q = points.iter().map(|(_, p)| *p).sum();
        if total != Q::one() {
            return Err(Error::invalid(
                "points",
                format!("probabilities sum to {total}"),
            ));
        }
        let mut merged: BTreeMap<Q, Q> = BTreeMap::new();
        for (v, p) in points {
            *merged.entry(v).or_insert_with(Q::zero) += p;
        }
        Ok(DiscreteLaw {
            points: merged.into_iter().collect(),
        })
    }

    /// `P(high) = p`, `P(low) = 1 - p`.
    pub fn two_point(low: Q, high: Q, p: Q) -> Result<Self> {
        Self::new(vec![(low, Q::one() - p), (high, p)])
    }

    /// Support points with their probabilities, in increasing order.
    pub fn points(&self) -> &[(Q, Q)] {
        &self.points
    }

    fn convolve(&self, dist: &BTreeMap<Q, Q>) -> BTreeMap<Q, Q> {
        let mut out = BTreeMap::new();
        for (v, p) in dist {
            for (w, q) in &self.points {
                *out.entry(*v + *w).or_insert_with(Q::zero) += *p * *q;
            }
        }
        out
    }
}

/// Midpoint of the median interval of a finite law given as sorted
/// `(value, probability)` pairs.
fn median(dist: &BTreeMap<Q, Q>) -> Q {
    let half = Q::new(1, 2);
    let mut below = Q::zero();
    let mut lo = None;
    let mut hi = None;
    for (v, p) in dist {
        let above = Q::one() - below; // P(T >= v)
        below += *p; // P(T <= v)
        if lo.is_none() && below >= half {
            lo = Some(*v);
        }
        if above >= half {
            hi = Some(*v);
        }
    }
    let (lo, hi) = (lo.unwrap_or_else(Q::zero), hi.unwrap_or_else(Q::zero));
    (lo + hi) / Q::from_integer(2)
}

#[derive(Debug, Clone)]
struct Outcome {
    prob: Q,
    shifted_step_max: Q,
    partial_max: Q,
    shifted_sum_max: Q,
    total: Q,
}

/// All outcomes of `n` i.i.d. draws, with the four maxima each inequality
/// compares.
#[derive(Debug, Clone)]
pub struct LevyEnumeration {
    n: usize,
    outcomes: Vec<Outcome>,
}

/// Both sides of both inequalities at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyCheck {
    /// Threshold.
    pub t: Q,
    /// `P(max_k (V_k + m(T_{k-1})) > t)`.
    pub first_lhs: Q,
    /// `2 P(max_k T_k > t)`.
    pub first_rhs: Q,
    /// `P(max_k (T_k + m(T_n - T_k)) > t)`.
    pub second_lhs: Q,
    /// `2 P(T_n > t)`.
    pub second_rhs: Q,
    /// `first_lhs <= first_rhs`.
    pub first_pass: bool,
    /// `second_lhs <= second_rhs`.
    pub second_pass: bool,
}

impl LevyCheck {
    /// Both inequalities hold.
    pub fn passes(&self) -> bool {
        self.first_pass && self.second_pass
    }
}

impl LevyEnumeration {
    /// Enumerates `law^n`; `n` must be in `1..=6` and the tuple count at
    /// most [`MAX_OUTCOMES`].
    pub fn new(law: &DiscreteLaw, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "must be >= 1"));
        }
        let k = law.points.len() as u128;
        let outcomes = k.checked_pow(n as u32).unwrap_or(u128::MAX);
        if n > 6 || outcomes > MAX_OUTCOMES {
            return Err(Error::EnumerationTooLarge {
                outcomes,
                limit: MAX_OUTCOMES,
            });
        }
        // medians of T_0..T_n; T_n - T_k has the law of T_{n-k}
        let mut medians = Vec::with_capacity(n + 1);
        let mut dist = BTreeMap::new();
        dist.insert(Q::zero(), Q::one());
        medians.push(Q::zero());
        for _ in 0..n {
            dist = law.convolve(&dist);
            medians.push(median(&dist));
        }

        let mut out = Vec::with_capacity(outcomes as usize);
        let mut idx = vec![0usize; n];
        loop {
            let mut prob = Q::one();
            let mut t = Q::zero();
            let mut partial = Vec::with_capacity(n);
            let mut shifted_step_max = None::<Q>;
            for (k, &i) in idx.iter().enumerate() {
                let (v, p) = law.points[i];
                prob *= p;
                let s = v + medians[k];
                shifted_step_max = Some(shifted_step_max.map_or(s, |m| m.max(s)));
                t += v;
                partial.push(t);
            }
            let partial_max = *partial.iter().max().expect("n >= 1");
            let shifted_sum_max = partial
                .iter()
                .enumerate()
                .map(|(k, &tk)| tk + medians[n - (k + 1)])
                .max()
                .expect("n >= 1");
            out.push(Outcome {
                prob,
                shifted_step_max: shifted_step_max.expect("n >= 1"),
                partial_max,
                shifted_sum_max,
                total: t,
            });
            // next tuple
            let mut pos = 0;
            loop {
                if pos == n {
                    return Ok(LevyEnumeration { n, outcomes: out });
                }
                idx[pos] += 1;
                if idx[pos] < law.points.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Number of summands.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluates both inequalities at `t`.
    pub fn check(&self, t: Q) -> LevyCheck {
        let mut a = Q::zero();
        let mut b = Q::zero();
        let mut c = Q::zero();
        let mut d = Q::zero();
        for o in &self.outcomes {
            if o.shifted_step_max > t {
                a += o.prob;
            }
            if o.partial_max > t {
                b += o.prob;
            }
            if o.shifted_sum_max > t {
                c += o.prob;
            }
            if o.total > t {
                d += o.prob;
            }
        }
        let two = Q::from_integer(2);
        let (b, d) = (b * two, d * two);
        LevyCheck {
            t,
            first_pass: a <= b,
            second_pass: c <= d,
            first_lhs: a,
            first_rhs: b,
            second_lhs: c,
            second_rhs: d,
        }
    }
}

/// Both inequalities for `n` draws from `law` at threshold `t`.
pub fn levy_maximal_check(law: &DiscreteLaw, n: usize, t: Q) -> Result<LevyCheck> {
    Ok(LevyEnumeration::new(law, n)?.check(t))
}

/// Summary of the deterministic sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LevySweep {
    /// Laws in the sweep.
    pub laws: usize,
    /// `(law, n, t)` cases checked.
    pub checks: usize,
    /// Cases where either inequality failed.
    pub failures: usize,
    /// Description of the first failure.
    pub first_failure: Option<String>,
}

fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

/// The sweep laws: every two-point law on a 9-value grid with five
/// probabilities (180 laws) and ten three-point supports with seven
/// probability vectors (70 laws).
pub fn sweep_laws() -> Vec<DiscreteLaw> {
    let values = [
        q(-3, 1),
        q(-2, 1),
        q(-1, 1),
        q(-1, 2),
        q(0, 1),
        q(1, 2),
        q(1, 1),
        q(2, 1),
        q(5, 1),
    ];
    let ps = [q(1, 10), q(1, 4), q(1, 2), q(7, 10), q(9, 10)];
    let mut laws = Vec::new();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            for &p in &ps {
                laws.push(
                    DiscreteLaw::two_point(values[i], values[j], p).expect("valid two-point law"),
                );
            }
        }
    }
    let triples = [
        (q(-1, 1), q(0, 1), q(1, 1)),
        (q(-2, 1), q(0, 1), q(1, 1)),
        (q(-1, 1), q(0, 1), q(2, 1)),
        (q(-3, 1), q(1, 2), q(5, 1)),
        (q(-1, 2), q(1, 2), q(2, 1)),
        (q(0, 1), q(1, 1), q(5, 1)),
        (q(-3, 1), q(-1, 1), q(0, 1)),
        (q(-2, 1), q(1, 1), q(2, 1)),
        (q(-1, 1), q(1, 2), q(5, 1)),
        (q(-3, 1), q(2, 1), q(5, 1)),
    ];
    let probs = [
        (q(1, 3), q(1, 3), q(1, 3)),
        (q(1, 2), q(1, 4), q(1, 4)),
        (q(1, 4), q(1, 2), q(1, 4)),
        (q(1, 4), q(1, 4), q(1, 2)),
        (q(1, 10), q(1, 10), q(4, 5)),
        (q(7, 10), q(1, 5), q(1, 10)),
        (q(1, 5), q(3, 5), q(1, 5)),
    ];
    for &(a, b, c) in &triples {
        for &(pa, pb, pc) in &probs {
            laws.push(
                DiscreteLaw::new(vec![(a, pa), (b, pb), (c, pc)]).expect("valid three-point law"),
            );
        }
    }
    laws
}

/// Runs both inequalities over [`sweep_laws`], `n = 1..=5`, and 21 equally
/// spaced thresholds on `[n min - 1, n max + 1]`.
pub fn levy_sweep() -> LevySweep {
    let laws = sweep_laws();
    let mut checks = 0;
    let mut failures = 0;
    let mut first_failure = None;
    for law in &laws {
        let lo = law.points.first().expect("non-empty").0;
        let hi = law.points.last().expect("non-empty").0;
        for n in 1..=5usize {
            let en = LevyEnumeration::new(law, n).expect("within enumeration limit");
            let nq = Q::from_integer(n as i128);
            let (a, b) = (nq * lo - Q::one(), nq * hi + Q::one());
            for i in 0..=20 {
                let t = a + (b - a) * q(i, 20);
                let c = en.check(t);
                checks += 1;
                if !c.passes() {
                    failures += 1;
                    if first_failure.is_none() {
                        first_failure =
                            Some(format!("law {:?}, n = {n}, t = {t}: {c:?}", law.points));
                    }
                }
            }
        }
    }
    LevySweep {
        laws: laws.len(),
        checks,
        failures,
        first_failure,
    }
}

/// `(1 min n p) / 2 <= 1 - (1 - p)^n` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxBoundCheck {
    /// Exceedance probability.
    pub p: f64,
    /// Number of draws.
    pub n: u64,
    /// `(1 min n p) / 2`.
    pub lhs: f64,
    /// `1 - (1 - p)^n`.
    pub rhs: f64,
    /// `lhs <= rhs`.
    pub pass: bool,
}

/// Checks the lower bound on the probability that the largest of `n`
/// i.i.d. draws exceeds a level it exceeds with probability `p`.
pub fn max_lower_bound_check(p: f64, n: u64) -> Result<MaxBoundCheck> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    let nf = n as f64;
    let lhs = 0.5 * (nf * p).min(1.0);
    let rhs = if p == 1.0 {
        if n == 0 {
            0.0
        } else {
            1.0
        }
    } else {
        -exp_m1(nf * ln_1p(-p))
    };
    Ok(MaxBoundCheck {
        p,
        n,
        lhs,
        rhs,
        pass: lhs <= rhs,
    })
}

/// Summary of the `(p, n)` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxBoundSweep {
    /// Points checked.
    pub checks: usize,
    /// Points where the bound failed.
    pub failures: usize,
    /// Smallest `rhs / lhs` seen.
    pub min_ratio: f64,
}

/// 1000 log-spaced `p` in `[1e-6, 0.5]` times `n = 1..=1000`.
pub fn max_lower_bound_sweep() -> MaxBoundSweep {
    let (a, b) = (ln(1e-6), ln(0.5));
    let mut checks = 0;
    let mut failures = 0;
    let mut min_ratio = f64::INFINITY;
    for i in 0..1000 {
        let p = exp(a + (b - a) * i as f64 / 999.0);
        for n in 1..=1000u64 {
            let c = max_lower_bound_check(p, n).expect("p in range");
            checks += 1;
            if !c.pass {
                failures += 1;
            }
            min_ratio = min_ratio.min(c.rhs / c.lhs);
        }
    }
    MaxBoundSweep {
        checks,
        failures,
        min_ratio,
    }
}
