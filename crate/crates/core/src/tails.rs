//! Distributions with exactly known tails.
//!
//! Every model is a base law plus a location shift. Tail probabilities are
//! available both directly and in log form at logarithmic arguments
//! (`ln P(X > e^u)`), so exponent computations can reach `t = e^(10^7)` and
//! beyond without overflow.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::exponents::TailExponents;
use crate::math::{
    bisect, exp, ln, ln_1p, ln_add_exp, normal_ln_sf, normal_quantile, normal_sf, sqrt,
    GaussLegendre,
};
use crate::rng::StreamRng;
use crate::scale::ScaleFunction;
use crate::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Mean and variance; either may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `E X` (`inf` when `E|X| = inf` on the right).
    pub mean: f64,
    /// `Var X`, `inf` when `E X^2 = inf`.
    pub variance: f64,
}

/// One tail of a designed law beyond `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum DesignedSide {
    /// `t^-2 exp(-lambda g(log t))`.
    Power { lambda: f64 },
    /// `mass * Phi_bar(t) / Phi_bar(t0)`, with exponent infinity.
    Gaussian { mass: f64 },
}

/// Law with `P(X > t) = t^-2 exp(-lambda_+ g(log t))` beyond `t0` (and the
/// mirror image on the left), completed by a uniform core on `[-t0, t0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignedTail {
    lambda_plus: f64,
    lambda_minus: f64,
    g: ScaleFunction,
    t0: f64,
    right: DesignedSide,
    left: DesignedSide,
    right_at_t0: f64,
    left_at_t0: f64,
    core: f64,
    raw_mean: f64,
    raw_second: f64,
}

/// One block of an oscillating tail, in `u = log t` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    /// Start of the flat phase; `h(a) / g(a) = lambda_hi`.
    pub a: f64,
    /// End of the flat phase; `h(b) / g(b) = lambda_lo`.
    pub b: f64,
    /// End of the rise phase; equals the next block's `a`.
    pub next: f64,
}

/// Symmetric law with `P(X > t) = t^-2 exp(-h(log t))` beyond `t0 = e^u0`,
/// where `h(u) / g(u)` sweeps between `lambda_lo` and `lambda_hi` on every
/// block of a geometrically growing schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatingTail {
    lambda_lo: f64,
    lambda_hi: f64,
    g: ScaleFunction,
    growth: f64,
    u0: f64,
    blocks: Vec<Block>,
    tail_at_t0: f64,
    core: f64,
    second: f64,
}

/// Base distribution of a [`TailModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    /// Normal law.
    Gaussian {
        /// Mean.
        mean: f64,
        /// Standard deviation, positive.
        sd: f64,
    },
    /// `P(X = high) = p_high`, `P(X = low) = 1 - p_high`.
    TwoPoint {
        /// Lower atom.
        low: f64,
        /// Upper atom.
        high: f64,
        /// Mass of the upper atom.
        p_high: f64,
    },
    /// `P(X > t) = (t / scale)^-alpha` for `t >= scale`.
    Pareto {
        /// Tail index.
        alpha: f64,
        /// Left end of the support.
        scale: f64,
    },
    /// Point mass.
    Constant {
        /// Location of the atom.
        value: f64,
    },
    /// Prescribed tail exponents.
    Designed(Arc<DesignedTail>),
    /// Exponents oscillating between two values.
    Oscillating(Arc<OscillatingTail>),
}

/// A law given by its tail functions, shifted by a constant.
///
/// `X = B + shift` where `B` follows [`Law`]. Models are immutable and
/// cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct TailModel {
    law: Law,
    shift: f64,
}

impl TailModel {
    /// Normal law with the given mean and standard deviation.
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite()) || !mean.is_finite() {
            return Err(Error::invalid(
                "sd",
                format!("need finite mean and sd > 0, got ({mean}, {sd})"),
            ));
        }
        Ok(Self::from_law(Law::Gaussian { mean, sd }))
    }

    /// `N(0, 1)`.
    pub fn standard_gaussian() -> Self {
        Self::from_law(Law::Gaussian { mean: 0.0, sd: 1.0 })
    }

    /// Two atoms `low < high` with `P(X = high) = p_high`.
    pub fn two_point(low: f64, high: f64, p_high: f64) -> Result<Self> {
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(Error::invalid("low", "need finite low < high"));
        }
        if !(p_high > 0.0 && p_high < 1.0) {
            return Err(Error::invalid("p_high", "must lie in (0, 1)"));
        }
        Ok(Self::from_law(Law::TwoPoint { low, high, p_high }))
    }

    /// `±a` with equal probability.
    pub fn symmetric_two_point(a: f64) -> Result<Self> {
        Self::two_point(-a, a, 0.5)
    }

    /// `P(X > t) = (t / scale)^-alpha` on `[scale, inf)`.
    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", "must be finite and > 0"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("scale", "must be finite and > 0"));
        }
        Ok(Self::from_law(Law::Pareto { alpha, scale }))
    }

    /// Point mass at `value`.
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("value", "must be finite"));
        }
        Ok(Self::from_law(Law::Constant { value }))
    }

    /// Centered law whose right and left tails beyond `t0` are
    /// `t^-2 exp(-lambda g(log t))` with `lambda = lambda_plus`, `lambda_minus`.
    ///
    /// `lambda = inf` gives a Gaussian-shaped tail. Rejects combinations with
    /// infinite second moment: `lambda = 0` always, and `lambda <= 1` when
    /// `g` is slowly varying.
    pub fn designed(
        lambda_plus: f64,
        lambda_minus: f64,
        g: ScaleFunction,
        t0: f64,
    ) -> Result<Self> {
        let d = DesignedTail::new(lambda_plus, lambda_minus, g, t0)?;
        let mean = d.raw_mean;
        Ok(TailModel {
            law: Law::Designed(Arc::new(d)),
            shift: -mean,
        })
    }

    /// Centered symmetric law whose exponents oscillate: `lambda_bar =
    /// lambda_lo` and `lambda_under = lambda_hi` on every side.
    ///
    /// Each block is a flat stretch of `h` (ratio falls from `lambda_hi` to
    /// `lambda_lo`) followed by a rise over which `h / g` climbs linearly
    /// back; the rise spans a factor `growth` in `u = log t`.
    pub fn oscillating(
        lambda_lo: f64,
        lambda_hi: f64,
        g: ScaleFunction,
        growth: f64,
    ) -> Result<Self> {
        let o = OscillatingTail::new(lambda_lo, lambda_hi, g, growth)?;
        Ok(Self::from_law(Law::Oscillating(Arc::new(o))))
    }

    fn from_law(law: Law) -> Self {
        TailModel { law, shift: 0.0 }
    }

    /// The same law translated by `by`.
    pub fn shifted(&self, by: f64) -> Self {
        TailModel {
            law: self.law.clone(),
            shift: self.shift + by,
        }
    }

    /// The law translated to mean zero. Fails when the mean is infinite.
    pub fn centered(&self) -> Result<Self> {
        let m = self.moments().mean;
        if !m.is_finite() {
            return Err(Error::invalid("model", "mean is infinite; cannot center"));
        }
        Ok(self.shifted(-m))
    }

    /// Base law.
    pub fn law(&self) -> &Law {
        &self.law
    }

    /// Location shift applied to the base law.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Text identifier.
    pub fn label(&self) -> String {
        let base = match &self.law {
            Law::Gaussian { mean, sd } => format!("gaussian(mean={mean},sd={sd})"),
            Law::TwoPoint { low, high, p_high } => {
                format!("two_point(low={low},high={high},p_high={p_high})")
            }
            Law::Pareto { alpha, scale } => format!("pareto(alpha={alpha},scale={scale})"),
            Law::Constant { value } => format!("constant({value})"),
            Law::Designed(d) => format!(
                "designed(lambda_plus={},lambda_minus={},g={},t0={})",
                d.lambda_plus, d.lambda_minus, d.g, d.t0
            ),
            Law::Oscillating(o) => format!(
                "oscillating(lo={},hi={},g={},growth={})",
                o.lambda_lo, o.lambda_hi, o.g, o.growth
            ),
        };
        if self.shift == 0.0 {
            base
        } else {
            format!("{base}{:+}", self.shift)
        }
    }

    /// `P(X > t)` for any real `t`.
    pub fn survival(&self, t: f64) -> f64 {
        self.law.sf(t - self.shift)
    }

    /// Alias of [`survival`](Self::survival).
    pub fn right_tail(&self, t: f64) -> f64 {
        self.survival(t)
    }

    /// `P(X < -t)` for any real `t`.
    pub fn left_tail(&self, t: f64) -> f64 {
        self.law.cdf_strict(-t - self.shift)
    }

    /// `P(|X| > t)` for `t >= 0`.
    pub fn abs_tail(&self, t: f64) -> f64 {
        self.survival(t) + self.left_tail(t)
    }

    /// Whether the law has atoms.
    pub fn has_atoms(&self) -> bool {
        matches!(self.law, Law::TwoPoint { .. } | Law::Constant { .. })
    }

    /// `P(X >= t)`.
    pub fn survival_closed(&self, t: f64) -> f64 {
        1.0 - self.left_tail(-t)
    }

    /// `P(a < X <= b)`, taken from whichever tail avoids cancellation.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let sb = self.survival(b);
        if !self.has_atoms() && sb > 0.5 {
            // atomless: P(X <= y) = P(X < y)
            (self.left_tail(-b) - self.left_tail(-a)).max(0.0)
        } else {
            (self.survival(a) - sb).max(0.0)
        }
    }

    /// `ln P(X > e^u)`.
    pub fn ln_right_tail_at_log(&self, u: f64) -> f64 {
        let s = self.shift;
        if s == 0.0 {
            return self.law.ln_sf_at_log(u);
        }
        let w = s * exp(-u);
        if w < 1.0 {
            self.law.ln_sf_at_log(u + ln_1p(-w))
        } else {
            ln(self.law.sf(exp(u) - s))
        }
    }

    /// `ln P(X < -e^u)`.
    pub fn ln_left_tail_at_log(&self, u: f64) -> f64 {
        let s = self.shift;
        if s == 0.0 {
            return self.law.ln_left_at_log(u);
        }
        let w = s * exp(-u);
        if w > -1.0 {
            self.law.ln_left_at_log(u + ln_1p(w))
        } else {
            ln(self.law.cdf_strict(-exp(u) - s))
        }
    }

    /// `ln P(|X| > e^u)`.
    pub fn ln_abs_tail_at_log(&self, u: f64) -> f64 {
        ln_add_exp(self.ln_right_tail_at_log(u), self.ln_left_tail_at_log(u))
    }

    /// Generalized inverse of the survival function: a point `y` with
    /// `P(X > y) <= w <= P(X >= y)`, for `w` in `(0, 1)`.
    #[inline]
    pub fn inverse_survival(&self, w: f64) -> f64 {
        self.law.inverse_sf(w) + self.shift
    }

    /// One draw by inversion of the survival function.
    #[inline]
    pub fn sample_with(&self, rng: &mut StreamRng) -> f64 {
        self.inverse_survival(rng.uniform_open())
    }

    /// `n` draws from stream 0 of `seed`; deterministic in `(seed, n)`.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = StreamRng::new(seed, 0);
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }

    /// Mean and variance, in closed form where one exists and otherwise by
    /// quadrature of the tail integrals.
    pub fn moments(&self) -> Moments {
        let (mean, variance) = match &self.law {
            Law::Gaussian { mean, sd } => (*mean, sd * sd),
            Law::TwoPoint { low, high, p_high } => {
                let m = low + p_high * (high - low);
                (m, p_high * (1.0 - p_high) * (high - low) * (high - low))
            }
            Law::Pareto { alpha, scale } => {
                let a = *alpha;
                let mean = if a > 1.0 {
                    a * scale / (a - 1.0)
                } else {
                    f64::INFINITY
                };
                let var = if a > 2.0 {
                    scale * scale * a / ((a - 1.0) * (a - 1.0) * (a - 2.0))
                } else {
                    f64::INFINITY
                };
                (mean, var)
            }
            Law::Constant { value } => (*value, 0.0),
            Law::Designed(d) => (d.raw_mean, d.raw_second - d.raw_mean * d.raw_mean),
            Law::Oscillating(o) => (0.0, o.second),
        };
        Moments {
            mean: mean + self.shift,
            variance,
        }
    }

    /// Design exponents for designed and oscillating laws.
    pub fn design(&self) -> Option<TailExponents> {
        match &self.law {
            Law::Designed(d) => {
                let (p, m) = (d.lambda_plus, d.lambda_minus);
                let lo = p.min(m);
                Some(TailExponents {
                    lam1_bar: p,
                    lam1_under: p,
                    lam2_bar: m,
                    lam2_under: m,
                    lam_bar: lo,
                    lam_under: lo,
                })
            }
            Law::Oscillating(o) => {
                let (lo, hi) = (o.lambda_lo, o.lambda_hi);
                Some(TailExponents {
                    lam1_bar: lo,
                    lam1_under: hi,
                    lam2_bar: lo,
                    lam2_under: hi,
                    lam_bar: lo,
                    lam_under: hi,
                })
            }
            _ => None,
        }
    }

    /// Oscillation schedule, if this is an oscillating law.
    pub fn blocks(&self) -> Option<&[Block]> {
        match &self.law {
            Law::Oscillating(o) => Some(&o.blocks),
            _ => None,
        }
    }

    /// Points where a tail function is not smooth (atoms, support ends, core edges).
    pub fn breakpoints(&self) -> Vec<f64> {
        let s = self.shift;
        let raw: Vec<f64> = match &self.law {
            Law::Gaussian { .. } => Vec::new(),
            Law::TwoPoint { low, high, .. } => vec![*low, *high],
            Law::Pareto { scale, .. } => vec![*scale],
            Law::Constant { value } => vec![*value],
            Law::Designed(d) => vec![-d.t0, d.t0],
            Law::Oscillating(o) => {
                let t0 = exp(o.u0);
                vec![-t0, t0]
            }
        };
        raw.into_iter().map(|x| x + s).collect()
    }

    /// Closed support hull `(inf, sup)`; either end may be infinite.
    pub fn support(&self) -> (f64, f64) {
        let s = self.shift;
        let (lo, hi) = match &self.law {
            Law::TwoPoint { low, high, .. } => (*low, *high),
            Law::Pareto { scale, .. } => (*scale, f64::INFINITY),
            Law::Constant { value } => (*value, *value),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        (lo + s, hi + s)
    }
}

/// Mean and second moment by Tonelli's identities over the tail functions,
/// `E X^2 = int_0^inf 2t P(|X| > t) dt`, integrated up to `t = 10^12`.
///
/// The second moment is reported infinite when the partial integral still
/// grows by more than 1% over the last decade.
pub fn tail_moments(model: &TailModel) -> (f64, f64) {
    let gl = GaussLegendre::new(16);
    let mut breaks: Vec<f64> = model
        .breakpoints()
        .iter()
        .map(|b| b.abs())
        .filter(|&b| b > 0.0)
        .collect();
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    // Substitute t = e^v above t = 1 so every decade gets equal effort.
    let lin_second = |t: f64| 2.0 * t * model.abs_tail(t);
    let lin_mean = |t: f64| model.survival(t) - model.left_tail(t);
    let log_breaks: Vec<f64> = breaks
        .iter()
        .filter(|&&b| b > 1.0)
        .map(|&b| ln(b))
        .collect();
    let log_second = |v: f64| {
        let t = exp(v);
        2.0 * t * t * model.abs_tail(t)
    };
    let log_mean = |v: f64| {
        let t = exp(v);
        t * (model.survival(t) - model.left_tail(t))
    };
    let head_breaks: Vec<f64> = breaks.iter().copied().filter(|&b| b < 1.0).collect();
    let head2 = gl.integrate_pieces(&lin_second, 0.0, 1.0, &head_breaks, 64);
    let head1 = gl.integrate_pieces(&lin_mean, 0.0, 1.0, &head_breaks, 64);
    let top = ln(1e12);
    let penultimate = ln(1e11);
    let body2 = gl.integrate_pieces(&log_second, 0.0, penultimate, &log_breaks, 256);
    let last2 = gl.integrate_pieces(&log_second, penultimate, top, &log_breaks, 16);
    let body1 = gl.integrate_pieces(&log_mean, 0.0, top, &log_breaks, 256);
    let before = head2 + body2;
    let second = if last2 > 0.01 * before {
        f64::INFINITY
    } else {
        before + last2
    };
    (head1 + body1, second)
}

impl Law {
    /// `P(B > y)`.
    fn sf(&self, y: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd } => normal_sf((y - mean) / sd),
            Law::TwoPoint { low, high, p_high } => {
                if y >= *high {
                    0.0
                } else if y >= *low {
                    *p_high
                } else {
                    1.0
                }
            }
            Law::Pareto { alpha, scale } => {
                if y <= *scale {
                    1.0
                } else {
                    pareto_tail(y / scale, *alpha)
                }
            }
            Law::Constant { value } => {
                if y < *value {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Designed(d) => d.sf(y),
            Law::Oscillating(o) => o.sf(y),
        }
    }

    /// `P(B < y)`.
    fn cdf_strict(&self, y: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd } => normal_sf((mean - y) / sd),
            Law::TwoPoint { low, high, p_high } => {
                if y <= *low {
                    0.0
                } else if y <= *high {
                    1.0 - p_high
                } else {
                    1.0
                }
            }
            Law::Pareto { .. } | Law::Constant { .. } => 1.0 - self.sf_closed(y),
            Law::Designed(d) => {
                if y <= -d.t0 {
                    d.left_beyond(-y)
                } else {
                    1.0 - d.sf(y)
                }
            }
            Law::Oscillating(o) => {
                if y <= -exp(o.u0) {
                    o.tail_beyond(ln(-y))
                } else {
                    1.0 - o.sf(y)
                }
            }
        }
    }

    /// `P(B >= y)` for the laws whose only atoms are handled here.
    fn sf_closed(&self, y: f64) -> f64 {
        match self {
            Law::Constant { value } => {
                if y <= *value {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.sf(y),
        }
    }

    fn ln_sf_at_log(&self, v: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd } => {
                let y = exp(v);
                if !y.is_finite() {
                    return f64::NEG_INFINITY;
                }
                normal_ln_sf((y - mean) / sd)
            }
            Law::Pareto { alpha, scale } => {
                let d = v - ln(*scale);
                if d <= 0.0 {
                    0.0
                } else {
                    -alpha * d
                }
            }
            Law::Designed(d) => {
                if v >= ln(d.t0) {
                    d.side_ln_tail(d.right, v)
                } else {
                    ln(d.sf(exp(v)))
                }
            }
            Law::Oscillating(o) => {
                if v >= o.u0 {
                    o.ln_tail(v)
                } else {
                    ln(o.sf(exp(v)))
                }
            }
            _ => ln(self.sf(exp(v))),
        }
    }

    fn ln_left_at_log(&self, v: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd } => {
                let y = exp(v);
                if !y.is_finite() {
                    return f64::NEG_INFINITY;
                }
                normal_ln_sf((y + mean) / sd)
            }
            Law::Designed(d) => {
                if v >= ln(d.t0) {
                    d.side_ln_tail(d.left, v)
                } else {
                    ln(self.cdf_strict(-exp(v)))
                }
            }
            Law::Oscillating(o) => {
                if v >= o.u0 {
                    o.ln_tail(v)
                } else {
                    ln(self.cdf_strict(-exp(v)))
                }
            }
            _ => ln(self.cdf_strict(-exp(v))),
        }
    }

    #[inline]
    fn inverse_sf(&self, w: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd } => mean - sd * normal_quantile(w),
            Law::TwoPoint { low, high, p_high } => {
                if w < *p_high {
                    *high
                } else {
                    *low
                }
            }
            Law::Pareto { alpha, scale } => scale * pareto_inverse(w, *alpha),
            Law::Constant { value } => *value,
            Law::Designed(d) => d.inverse_sf(w),
            Law::Oscillating(o) => o.inverse_sf(w),
        }
    }
}

#[inline]
fn pareto_tail(r: f64, alpha: f64) -> f64 {
    if alpha == 3.0 {
        1.0 / (r * r * r)
    } else if alpha == 2.0 {
        1.0 / (r * r)
    } else {
        exp(-alpha * ln(r))
    }
}

#[inline]
fn pareto_inverse(w: f64, alpha: f64) -> f64 {
    if alpha == 3.0 {
        1.0 / crate::math::cbrt_positive(w)
    } else if alpha == 2.0 {
        1.0 / sqrt(w)
    } else {
        exp(-ln(w) / alpha)
    }
}

fn check_exponent(name: &'static str, lambda: f64, g: &ScaleFunction) -> Result<()> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::invalid(
            name,
            format!("exponent {lambda} gives an infinite second moment"),
        ));
    }
    if g.rho() == 0.0 && lambda <= 1.0 {
        return Err(Error::invalid(
            name,
            format!("with a slowly varying scale the exponent must exceed 1, got {lambda}"),
        ));
    }
    Ok(())
}

/// `int_a^inf Phi_bar(t) dt`.
fn gaussian_first_tail(a: f64) -> f64 {
    INV_SQRT_2PI * exp(-0.5 * a * a) - a * normal_sf(a)
}

/// `int_a^inf 2t Phi_bar(t) dt`.
fn gaussian_second_tail(a: f64) -> f64 {
    (1.0 - a * a) * normal_sf(a) + a * INV_SQRT_2PI * exp(-0.5 * a * a)
}

impl DesignedTail {
    fn new(lambda_plus: f64, lambda_minus: f64, g: ScaleFunction, t0: f64) -> Result<Self> {
        check_exponent("lambda_plus", lambda_plus, &g)?;
        check_exponent("lambda_minus", lambda_minus, &g)?;
        if !(t0 >= 1.0 && t0.is_finite()) {
            return Err(Error::invalid("t0", "must be finite and >= 1"));
        }
        let v0 = ln(t0);
        let anchor = exp(-2.0 * v0 - g.eval(v0));
        let side = |lambda: f64| {
            if lambda.is_infinite() {
                DesignedSide::Gaussian { mass: anchor }
            } else {
                DesignedSide::Power { lambda }
            }
        };
        let mut d = DesignedTail {
            lambda_plus,
            lambda_minus,
            g,
            t0,
            right: side(lambda_plus),
            left: side(lambda_minus),
            right_at_t0: 0.0,
            left_at_t0: 0.0,
            core: 0.0,
            raw_mean: 0.0,
            raw_second: 0.0,
        };
        d.right_at_t0 = exp(d.side_ln_tail(d.right, v0));
        d.left_at_t0 = exp(d.side_ln_tail(d.left, v0));
        d.core = 1.0 - d.right_at_t0 - d.left_at_t0;
        if d.core < 0.0 {
            return Err(Error::invalid("t0", "tail mass beyond t0 exceeds 1"));
        }
        let gl = GaussLegendre::new(20);
        let (r1, r2) = d.side_integrals(&gl, d.right);
        let (l1, l2) = d.side_integrals(&gl, d.left);
        d.raw_mean = t0 * (d.right_at_t0 - d.left_at_t0) + r1 - l1;
        d.raw_second = t0 * t0 * (d.right_at_t0 + d.left_at_t0) + d.core * t0 * t0 / 3.0 + r2 + l2;
        Ok(d)
    }

    /// `ln` of one tail at `t = e^v`, for `v >= log t0`.
    fn side_ln_tail(&self, side: DesignedSide, v: f64) -> f64 {
        match side {
            DesignedSide::Power { lambda } => -2.0 * v - lambda * self.g.eval(v),
            DesignedSide::Gaussian { mass } => {
                let t = exp(v);
                if !t.is_finite() {
                    return f64::NEG_INFINITY;
                }
                ln(mass) + normal_ln_sf(t) - normal_ln_sf(self.t0)
            }
        }
    }

    /// `(int_t0^inf R dt, int_t0^inf 2t R dt)` for one side.
    fn side_integrals(&self, gl: &GaussLegendre, side: DesignedSide) -> (f64, f64) {
        match side {
            DesignedSide::Power { lambda } => {
                let v0 = ln(self.t0);
                let g = self.g;
                let first = |v: f64| exp(-v - lambda * g.eval(v));
                let second = |v: f64| 2.0 * exp(-lambda * g.eval(v));
                (
                    gl.integrate_to_infinity(&first, v0, &[], 1e-13),
                    gl.integrate_to_infinity(&second, v0, &[], 1e-13),
                )
            }
            DesignedSide::Gaussian { mass } => {
                let k = mass / normal_sf(self.t0);
                (
                    k * gaussian_first_tail(self.t0),
                    k * gaussian_second_tail(self.t0),
                )
            }
        }
    }

    fn right_beyond(&self, t: f64) -> f64 {
        exp(self.side_ln_tail(self.right, ln(t)))
    }

    fn left_beyond(&self, t: f64) -> f64 {
        exp(self.side_ln_tail(self.left, ln(t)))
    }

    fn sf(&self, y: f64) -> f64 {
        let t0 = self.t0;
        if y >= t0 {
            self.right_beyond(y)
        } else if y >= -t0 {
            self.right_at_t0 + self.core * (t0 - y) / (2.0 * t0)
        } else {
            1.0 - self.left_beyond(-y)
        }
    }

    fn inverse_sf(&self, w: f64) -> f64 {
        let t0 = self.t0;
        if w <= self.right_at_t0 {
            return self.invert_side(self.right, w);
        }
        let q = 1.0 - w;
        if q <= self.left_at_t0 {
            return -self.invert_side(self.left, q);
        }
        t0 - 2.0 * t0 * (w - self.right_at_t0) / self.core
    }

    /// Solves `R(t) = w` for `t >= t0` on one side.
    fn invert_side(&self, side: DesignedSide, w: f64) -> f64 {
        let target = ln(w);
        match side {
            DesignedSide::Gaussian { mass } => {
                let z = ln(w / mass) + normal_ln_sf(self.t0);
                // ln Phi_bar(t) = z
                let lo = self.t0;
                let mut hi = lo.max(1.0) * 2.0;
                while normal_ln_sf(hi) > z {
                    hi *= 2.0;
                }
                bisect(|t| normal_ln_sf(t) - z, lo, hi, 1e-12)
            }
            DesignedSide::Power { .. } => {
                let v0 = ln(self.t0);
                let f = |v: f64| self.side_ln_tail(side, v) - target;
                let mut hi = v0 + 1.0;
                while f(hi) > 0.0 {
                    hi = v0 + 2.0 * (hi - v0);
                }
                exp(bisect(f, v0, hi, 1e-12))
            }
        }
    }
}

impl OscillatingTail {
    fn new(lambda_lo: f64, lambda_hi: f64, g: ScaleFunction, growth: f64) -> Result<Self> {
        if !(lambda_lo < lambda_hi) || !lambda_hi.is_finite() {
            return Err(Error::invalid(
                "lambda_lo",
                format!("need 0 < lambda_lo < lambda_hi < inf, got ({lambda_lo}, {lambda_hi})"),
            ));
        }
        check_exponent("lambda_lo", lambda_lo, &g)?;
        if !(growth > 1.0 && growth.is_finite()) {
            return Err(Error::invalid("block_growth", "must be finite and > 1"));
        }
        let u0 = g.inverse(1.0).max(1.0);
        let mut blocks = Vec::new();
        let mut a = u0;
        while a < 1e15 {
            let b = g.inverse(lambda_hi / lambda_lo * g.eval(a));
            let next = growth * b;
            blocks.push(Block { a, b, next });
            a = next;
        }
        let mut o = OscillatingTail {
            lambda_lo,
            lambda_hi,
            g,
            growth,
            u0,
            blocks,
            tail_at_t0: 0.0,
            core: 0.0,
            second: 0.0,
        };
        o.tail_at_t0 = exp(o.ln_tail(u0));
        o.core = 1.0 - 2.0 * o.tail_at_t0;
        if o.core < 0.0 {
            return Err(Error::invalid("g", "tail mass beyond t0 exceeds 1"));
        }
        // E X^2 = t0^2 (2 R(t0)) + core t0^2 / 3 + 2 * int 2 e^{-h(v)} dv
        let gl = GaussLegendre::new(20);
        let t0 = exp(u0);
        let mut tail = 0.0;
        for blk in &o.blocks {
            let f = |v: f64| 4.0 * exp(-o.h(v));
            let part = gl.integrate_pieces(&f, blk.a, blk.next, &[blk.b], 32);
            tail += part;
            if part < 1e-16 * tail {
                break;
            }
        }
        o.second = t0 * t0 * 2.0 * o.tail_at_t0 + o.core * t0 * t0 / 3.0 + tail;
        Ok(o)
    }

    /// `h(u)` for `u >= u0`.
    fn h(&self, u: f64) -> f64 {
        let i = self.blocks.partition_point(|blk| blk.next <= u);
        let Some(blk) = self.blocks.get(i) else {
            return self.lambda_hi * self.g.eval(u);
        };
        if u <= blk.b {
            self.lambda_hi * self.g.eval(blk.a)
        } else {
            let frac = (u - blk.b) / (blk.next - blk.b);
            let c = self.lambda_lo + (self.lambda_hi - self.lambda_lo) * frac;
            c * self.g.eval(u)
        }
    }

    fn ln_tail(&self, u: f64) -> f64 {
        -2.0 * u - self.h(u)
    }

    fn tail_beyond(&self, u: f64) -> f64 {
        exp(self.ln_tail(u))
    }

    fn sf(&self, y: f64) -> f64 {
        let t0 = exp(self.u0);
        if y >= t0 {
            self.tail_beyond(ln(y))
        } else if y >= -t0 {
            self.tail_at_t0 + self.core * (t0 - y) / (2.0 * t0)
        } else {
            1.0 - self.tail_beyond(ln(-y))
        }
    }

    fn inverse_sf(&self, w: f64) -> f64 {
        let t0 = exp(self.u0);
        let invert = |w: f64| {
            let target = ln(w);
            let f = |v: f64| self.ln_tail(v) - target;
            let mut hi = self.u0 + 1.0;
            while f(hi) > 0.0 {
                hi = self.u0 + 2.0 * (hi - self.u0);
            }
            exp(bisect(f, self.u0, hi, 1e-12))
        };
        if w <= self.tail_at_t0 {
            return invert(w);
        }
        let q = 1.0 - w;
        if q <= self.tail_at_t0 {
            return -invert(q);
        }
        t0 - 2.0 * t0 * (w - self.tail_at_t0) / self.core
    }
}

/// A named reference model with the scale its exponents are read on.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// Preset name.
    pub name: &'static str,
    /// The model.
    pub model: TailModel,
    /// Scale function paired with the model.
    pub scale: ScaleFunction,
}

/// Named reference models used by tests, sweeps and the CLI presets.
pub fn catalog() -> Vec<CatalogEntry> {
    let id = ScaleFunction::identity();
    let square = ScaleFunction::power(2.0).expect("valid index");
    let e = core::f64::consts::E;
    let entry = |name, model: Result<TailModel>, scale: &ScaleFunction| CatalogEntry {
        name,
        model: model.expect("valid catalog parameters"),
        scale: *scale,
    };
    vec![
        entry("gaussian", Ok(TailModel::standard_gaussian()), &id),
        entry("gaussian_shifted", TailModel::gaussian(0.5, 2.0), &id),
        entry("signs", TailModel::symmetric_two_point(1.0), &id),
        entry(
            "two_point_skewed",
            TailModel::two_point(-1.0, 2.0, 0.3),
            &id,
        ),
        entry("pareto3", TailModel::pareto(3.0, 1.0), &id),
        entry(
            "pareto3_centered",
            TailModel::pareto(3.0, 1.0).and_then(|m| m.centered()),
            &id,
        ),
        entry("pareto4", TailModel::pareto(4.0, 1.0), &id),
        entry("designed_1_1", TailModel::designed(1.0, 1.0, id, e), &id),
        entry("designed_0.5_2", TailModel::designed(0.5, 2.0, id, e), &id),
        entry(
            "designed_1_inf",
            TailModel::designed(1.0, f64::INFINITY, id, e),
            &id,
        ),
        entry(
            "designed_sq_1.5_3",
            TailModel::designed(1.5, 3.0, square, 2.0),
            &square,
        ),
        entry(
            "oscillating_0.5_2",
            TailModel::oscillating(0.5, 2.0, id, 3.0),
            &id,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id() -> ScaleFunction {
        ScaleFunction::identity()
    }

    fn catalog() -> Vec<TailModel> {
        super::catalog().into_iter().map(|e| e.model).collect()
    }

    #[test]
    fn survival_examples() {
        assert_eq!(TailModel::standard_gaussian().survival(0.0), 0.5);
        let p = TailModel::pareto(3.0, 1.0).unwrap();
        assert!((p.survival(10.0) - 1e-3).abs() < 1e-18);
        let tp = TailModel::symmetric_two_point(1.0).unwrap();
        assert_eq!(tp.survival(1.0), 0.0);
        assert_eq!(tp.survival(0.999), 0.5);
        assert_eq!(tp.left_tail(1.0), 0.0);
        assert_eq!(tp.left_tail(0.999), 0.5);
    }

    #[test]
    fn designed_identity_is_pareto_three_beyond_t0() {
        let m = TailModel::designed(1.0, 1.0, id(), core::f64::consts::E).unwrap();
        assert_eq!(m.shift(), 0.0);
        for &t in &[3.0, 10.0, 1e3, 1e6] {
            let expected = 1.0 / (t * t * t);
            assert!((m.survival(t) / expected - 1.0).abs() < 1e-12, "{t}");
            assert!((m.left_tail(t) / expected - 1.0).abs() < 1e-12, "{t}");
        }
        let u = ln(1e300) * 10.0;
        assert!((m.ln_right_tail_at_log(u) + 3.0 * u).abs() < 1e-9 * u);
    }

    #[test]
    fn designed_is_centered_and_matches_closed_moments() {
        // g = t, lambda = 1 both sides: t0 = e, R(t0) = e^-3
        // E X^2 = 2 e^2 e^-3 + (1 - 2 e^-3) e^2 / 3 + 2 * 2 int_1^inf e^-v dv
        let e = core::f64::consts::E;
        let m = TailModel::designed(1.0, 1.0, id(), e).unwrap();
        let r = exp(-3.0);
        let expected = e * e * 2.0 * r + (1.0 - 2.0 * r) * e * e / 3.0 + 4.0 * exp(-1.0);
        let mo = m.moments();
        assert!(mo.mean.abs() < 1e-14);
        assert!(
            (mo.variance / expected - 1.0).abs() < 1e-10,
            "{mo:?} {expected}"
        );

        let asym = TailModel::designed(0.5, 2.0, id(), e).unwrap();
        assert!(asym.moments().mean.abs() < 1e-14);
        assert!(asym.shift() < 0.0);
    }

    #[test]
    fn designed_rejects_infinite_variance() {
        assert!(TailModel::designed(0.0, 1.0, id(), 2.0).is_err());
        assert!(TailModel::designed(1.0, 1.0, ScaleFunction::log_clamp(), 2.0).is_err());
        assert!(TailModel::designed(1.5, 2.0, ScaleFunction::log_clamp(), 2.0).is_ok());
        assert!(TailModel::designed(1.0, 1.0, id(), 0.5).is_err());
    }

    #[test]
    fn designed_infinite_exponent_is_gaussian_shaped() {
        let m = TailModel::designed(f64::INFINITY, 1.0, id(), core::f64::consts::E).unwrap();
        // continuity at t0 and super-polynomial decay
        let below = m.survival(core::f64::consts::E - 1e-9);
        let above = m.survival(core::f64::consts::E + 1e-9);
        assert!((below - above).abs() < 1e-9);
        let r = m.ln_right_tail_at_log(ln(40.0));
        assert!(r < -700.0);
        assert!(m.ln_right_tail_at_log(800.0).is_infinite());
    }

    #[test]
    fn designed_exponent_converges_monotonically() {
        for (lp, g) in [
            (0.5, id()),
            (2.0, id()),
            (1.0, ScaleFunction::power(2.0).unwrap()),
            (1.5, ScaleFunction::log_clamp()),
        ] {
            let m = TailModel::designed(lp, 2.0, g, core::f64::consts::E).unwrap();
            let dev = |t: f64| {
                let u = ln(t);
                let ratio = -(2.0 * u + m.ln_right_tail_at_log(u)) / g.eval(u);
                (ratio - lp).abs()
            };
            let (d6, d8, d10) = (dev(1e6), dev(1e8), dev(1e10));
            assert!(
                d8 <= d6 + 1e-3 && d10 <= d8 + 1e-3,
                "{lp} {g}: {d6} {d8} {d10}"
            );
        }
    }

    #[test]
    fn oscillating_hits_both_targets_at_block_ends() {
        let m = TailModel::oscillating(0.5, 2.0, id(), 3.0).unwrap();
        let blocks = m.blocks().unwrap();
        assert!(blocks.len() > 5);
        for blk in blocks.iter().take(8) {
            let ratio = |u: f64| -(2.0 * u + m.ln_right_tail_at_log(u)) / u;
            assert!((ratio(blk.a) / 2.0 - 1.0).abs() < 0.05, "{blk:?}");
            assert!((ratio(blk.b) / 0.5 - 1.0).abs() < 0.05, "{blk:?}");
        }
        assert_eq!(m.moments().mean, 0.0);
    }

    #[test]
    fn oscillating_rejects_bad_order() {
        assert!(TailModel::oscillating(2.0, 2.0, id(), 3.0).is_err());
        assert!(TailModel::oscillating(2.0, 0.5, id(), 3.0).is_err());
        assert!(TailModel::oscillating(0.5, 2.0, id(), 1.0).is_err());
    }

    #[test]
    fn oscillating_tail_is_monotone() {
        let m = TailModel::oscillating(0.5, 2.0, id(), 3.0).unwrap();
        let mut prev = 0.0;
        for k in 0..4000 {
            let u = 1.0 + k as f64 * 0.25;
            let v = m.ln_right_tail_at_log(u);
            assert!(v <= prev + 1e-12, "{u}");
            prev = v;
        }
    }

    #[test]
    fn oscillating_near_degenerate_matches_designed() {
        let lo = 1.0 - 1e-9;
        let o = TailModel::oscillating(lo, 1.0, id(), 3.0).unwrap();
        let d = TailModel::designed(1.0, 1.0, id(), core::f64::consts::E).unwrap();
        for &u in &[2.0, 10.0, 100.0, 1e4] {
            let a = o.ln_right_tail_at_log(u);
            let b = d.ln_right_tail_at_log(u);
            assert!((a - b).abs() < 1e-5 * u, "{u}: {a} {b}");
        }
    }

    #[test]
    fn closed_form_moments() {
        let p = TailModel::pareto(3.0, 1.0).unwrap().moments();
        assert_eq!(p.mean, 1.5);
        assert!((p.variance - 0.75).abs() < 1e-15);
        assert!(TailModel::pareto(1.5, 1.0)
            .unwrap()
            .moments()
            .variance
            .is_infinite());
        let tp = TailModel::symmetric_two_point(1.0).unwrap().moments();
        assert_eq!((tp.mean, tp.variance), (0.0, 1.0));
        assert!(TailModel::pareto(0.8, 1.0).unwrap().centered().is_err());
    }

    #[test]
    fn tonelli_second_moment_matches() {
        for m in catalog() {
            let mo = m.moments();
            let (mean, second) = tail_moments(&m);
            let expected = mo.variance + mo.mean * mo.mean;
            assert!(
                (second / expected - 1.0).abs() < 5e-3,
                "{}: {second} {expected}",
                m.label()
            );
            assert!(
                (mean - mo.mean).abs() < 5e-3 * (1.0 + mo.mean.abs()),
                "{}",
                m.label()
            );
        }
        let heavy = TailModel::pareto(1.5, 1.0).unwrap();
        assert!(tail_moments(&heavy).1.is_infinite());
        let boundary = TailModel::pareto(2.0, 1.0).unwrap();
        assert!(tail_moments(&boundary).1.is_infinite());
    }

    #[test]
    fn tails_are_monotone_and_vanish() {
        for m in catalog() {
            let mut prev_r = 1.0;
            let mut prev_l = 1.0;
            for k in 0..400 {
                let t = k as f64 * 0.05;
                let r = m.survival(t);
                let l = m.left_tail(t);
                assert!((0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&l));
                assert!(
                    r <= prev_r + 1e-15 && l <= prev_l + 1e-15,
                    "{} at {t}",
                    m.label()
                );
                prev_r = r;
                prev_l = l;
            }
            assert!(m.abs_tail(1e8) < 1e-15, "{}", m.label());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = TailModel::designed(0.5, 2.0, id(), 2.0).unwrap();
        assert_eq!(m.sample(11, 100), m.sample(11, 100));
        assert_ne!(m.sample(11, 100), m.sample(12, 100));
    }

    #[test]
    fn inverse_survival_round_trip() {
        for m in catalog() {
            if matches!(m.law(), Law::TwoPoint { .. }) {
                continue;
            }
            for &w in &[1e-9, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-6] {
                let y = m.inverse_survival(w);
                let s = m.survival(y);
                assert!(
                    (s - w).abs() < 1e-8 * w.max(1e-3),
                    "{} w={w} y={y} s={s}",
                    m.label()
                );
            }
        }
    }

    #[test]
    fn sampler_matches_tail_on_symmetric_two_point() {
        let m = TailModel::symmetric_two_point(1.0).unwrap();
        let xs = m.sample(5, 1_000_000);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 4.0 / 1000.0);
    }

    #[test]
    fn sampler_matches_tail_on_pareto() {
        let m = TailModel::pareto(3.0, 1.0).unwrap();
        let xs = m.sample(9, 1_000_000);
        let hits = xs.iter().filter(|&&x| x > 10.0).count() as f64 / 1e6;
        assert!((hits - 1e-3).abs() < 4.0 * sqrt(1e-3 / 1e6));
    }

    #[test]
    fn sampler_matches_tail_across_catalog() {
        for (k, m) in catalog().into_iter().enumerate() {
            let xs = m.sample(100 + k as u64, 200_000);
            for &t in &[-2.0, -0.5, 0.0, 0.7, 1.5, 3.0] {
                let p = m.survival(t);
                let emp = xs.iter().filter(|&&x| x > t).count() as f64 / xs.len() as f64;
                let se = sqrt(p * (1.0 - p) / xs.len() as f64).max(1e-12);
                assert!(
                    (emp - p).abs() <= 4.0 * se + 1e-12,
                    "{} at {t}: {emp} vs {p}",
                    m.label()
                );
            }
        }
    }

    #[test]
    fn shifted_log_tail_consistent() {
        let m = TailModel::pareto(3.0, 1.0).unwrap().centered().unwrap();
        for &t in &[2.0, 10.0, 1e3] {
            let direct = ln(m.survival(t));
            let via_log = m.ln_right_tail_at_log(ln(t));
            assert!((direct - via_log).abs() < 1e-12, "{t}");
        }
        assert!(m.ln_left_tail_at_log(ln(2.0)).is_infinite());
        // X = P - 3/2 with P >= 1
        assert_eq!(m.left_tail(0.5), 0.0);
        assert!((m.left_tail(0.4) - (1.0 - 1.1f64.powi(-3))).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn survival_nonincreasing(a in -50.0..50.0f64, b in -50.0..50.0f64, k in 0usize..12) {
            let m = &catalog()[k];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(m.survival(hi) <= m.survival(lo));
            prop_assert!(m.left_tail(hi) <= m.left_tail(lo));
        }

        #[test]
        fn right_plus_left_at_most_one(t in 0.0..20.0f64, k in 0usize..12) {
            let m = &catalog()[k];
            prop_assert!(m.survival(t) + m.left_tail(t) <= 1.0 + 1e-12);
        }

        #[test]
        fn exponent_ordering_on_designed(lp in 0.2..5.0f64, lm in 0.2..5.0f64) {
            let m = TailModel::designed(lp, lm, id(), 2.0).unwrap();
            let d = m.design().unwrap();
            prop_assert!(d.lam1_bar <= d.lam1_under);
            prop_assert!(d.lam_bar == lp.min(lm));
        }
    }
}
