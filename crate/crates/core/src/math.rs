//! Numerical kernels: libm shims, normal distribution, quadrature, root finding.

use alloc::vec::Vec;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub(crate) fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}
/// Cube root of a positive normal `x`, within a few ulps.
///
/// Exponent-division initial guess refined by two Halley steps; several
/// times cheaper than the correctly rounded `libm::cbrt` in sampling loops.
#[inline]
pub(crate) fn cbrt_positive(x: f64) -> f64 {
    let mut c = f64::from_bits(x.to_bits() / 3 + 0x2A9F_7893_782D_A1CE);
    for _ in 0..2 {
        let c3 = c * c * c;
        c *= (c3 + 2.0 * x) / (2.0 * c3 + x);
    }
    c
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

/// `ln(e^a + e^b)` without overflow; `-inf` absorbs.
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + ln_1p(exp(lo - hi))
}

/// Upper tail `P(Z > z)` of the standard normal law.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// `ln P(Z > z)`, accurate far into the upper tail.
pub fn normal_ln_sf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 30.0 {
        return ln(normal_sf(z));
    }
    if !z.is_finite() {
        return f64::NEG_INFINITY;
    }
    // Asymptotic Mills-ratio series; four terms are exact to double
    // precision for z >= 30.
    let zz = z * z;
    if !zz.is_finite() {
        return f64::NEG_INFINITY;
    }
    let inv = 1.0 / zz;
    let series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv));
    -0.5 * zz - ln(z) - LN_SQRT_2PI + ln(series)
}

/// Standard normal quantile (Wichura's AS 241, PPND16).
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = sqrt(-ln(tail));
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub(crate) fn new(order: usize) -> Self {
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        let n = order as f64;
        for i in 0..order {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub(crate) fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub(crate) fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule on `[a, b]` split at `breaks` and into `panels` equal
    /// panels per piece.
    pub(crate) fn integrate_pieces<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        breaks: &[f64],
        panels: usize,
    ) -> f64 {
        let mut edges = Vec::with_capacity(breaks.len() + 2);
        edges.push(a);
        edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        edges.push(b);
        edges.sort_by(|x, y| x.total_cmp(y));
        let mut total = 0.0;
        for w in edges.windows(2) {
            let step = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let lo = w[0] + step * k as f64;
                total += self.integrate(f, lo, lo + step);
            }
        }
        total
    }

    /// Integral over `[a, inf)` using panels that double in width; stops once
    /// a panel contributes less than `rel_tol` of the running total.
    pub(crate) fn integrate_to_infinity<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        breaks: &[f64],
        rel_tol: f64,
    ) -> f64 {
        let mut lo = a;
        let mut width = 1.0_f64.max(a.abs() * 0.25);
        let mut total = 0.0;
        for _ in 0..400 {
            let hi = lo + width;
            let part = self.integrate_pieces(f, lo, hi, breaks, 4);
            total += part;
            if part.abs() <= rel_tol * total.abs() && lo > a {
                break;
            }
            lo = hi;
            width *= 2.0;
            if !lo.is_finite() {
                break;
            }
        }
        total
    }
}

/// Root of a monotone function by bisection. `f(lo)` and `f(hi)` must have
/// opposite signs; returns the midpoint once the bracket is below `tol`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_cube_root_is_accurate() {
        let mut x = 1e-300;
        while x < 1e300 {
            let r = cbrt_positive(x) / libm::cbrt(x) - 1.0;
            assert!(r.abs() < 1e-14, "{x}");
            x *= 1.37;
        }
        // within an ulp or two, not correctly rounded
        assert!((cbrt_positive(8.0) - 2.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn quantile_reference_values() {
        // scipy.stats.norm.ppf
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-12);
        assert!((normal_quantile(0.5)).abs() < 1e-16);
        assert!((normal_quantile(0.3) + 0.524_400_512_708_041).abs() < 1e-14);
    }

    #[test]
    fn quantile_inverts_sf() {
        for &z in &[-5.0, -3.5, -1.0, -0.1, 0.4, 2.0, 5.0, 7.5] {
            let back = -normal_quantile(normal_sf(z));
            assert!((back - z).abs() < 1e-9 * (1.0 + z.abs()), "{z} -> {back}");
        }
    }

    #[test]
    fn ln_sf_continuous_at_switch() {
        let a = normal_ln_sf(30.0 - 1e-9);
        let b = normal_ln_sf(30.0);
        assert!((a - b).abs() < 1e-6);
        assert_eq!(normal_ln_sf(f64::INFINITY), f64::NEG_INFINITY);
        assert_eq!(normal_ln_sf(1e200), f64::NEG_INFINITY);
    }

    #[test]
    fn gauss_legendre_polynomials() {
        let gl = GaussLegendre::new(8);
        // exact for degree <= 15
        let v = gl.integrate(|x| x.powi(14), 0.0, 1.0);
        assert!((v - 1.0 / 15.0).abs() < 1e-14);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integral_to_infinity() {
        let gl = GaussLegendre::new(16);
        let v = gl.integrate_to_infinity(&|u: f64| exp(-0.5 * u), 1.0, &[], 1e-15);
        assert!((v - 2.0 * exp(-0.5)).abs() < 1e-12);
        let slow = gl.integrate_to_infinity(&|u: f64| powf(u, -1.5), 1.0, &[], 1e-15);
        assert!((slow - 2.0).abs() < 1e-6, "{slow}");
    }

    #[test]
    fn ln_add_exp_edges() {
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 1.0), 1.0);
        assert!((ln_add_exp(0.0, 0.0) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!((ln_add_exp(-1000.0, -1000.0) - (-1000.0 + core::f64::consts::LN_2)).abs() < 1e-12);
    }
}
