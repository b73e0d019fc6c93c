//! Special functions used throughout the crate: log-gamma, the regularized
//! incomplete beta function, the standard normal CDF and quantile, and the
//! binomial mass, distribution and quantile functions.
//!
//! Mass functions are evaluated in log space so that `n` in the tens of
//! thousands does not overflow.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{domain, Error, Result};

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            domain(format!("probability must lie in [0, 1], got {value}"))
        }
    }

    /// Clamps round-off excursions (e.g. `1 + 1e-17`) back into `[0, 1]`.
    pub(crate) fn clamped(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub const fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Checks `0 < value < 1`.
pub(crate) fn open_unit(value: f64, what: &str) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        domain(format!("{what} must lie in (0, 1), got {value}"))
    }
}

/// Number of trials and success probability of a binomial distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialParams {
    n: u64,
    theta: f64,
}

impl BinomialParams {
    pub fn new(n: u64, theta: f64) -> Result<Self> {
        if n == 0 {
            return domain("binomial n must be at least 1");
        }
        open_unit(theta, "binomial theta")?;
        Ok(BinomialParams { n, theta })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn mean(&self) -> f64 {
        self.n as f64 * self.theta
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Stirling-series coefficients B_{2k} / (2k (2k - 1)).
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite x > 0, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Shift up into the Lanczos range.
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    if x >= 10.0 {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut series = 0.0;
        let mut power = inv;
        for c in STIRLING {
            series += c * power;
            power *= inv2;
        }
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + series;
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta function `I_x(a, b)`, the Beta(a, b) CDF at `x`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<Probability> {
    Ok(beta_cdf_pair(a, b, x)?.0)
}

/// `1 - I_x(a, b)`, computed without cancellation when it is small.
pub fn reg_inc_beta_complement(a: f64, b: f64, x: f64) -> Result<Probability> {
    Ok(beta_cdf_pair(a, b, x)?.1)
}

/// Returns `(I_x(a, b), 1 - I_x(a, b))`, each to full relative accuracy on the
/// side where it is evaluated directly by the continued fraction.
pub(crate) fn beta_cdf_pair(a: f64, b: f64, x: f64) -> Result<(Probability, Probability)> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!("incomplete beta requires a, b > 0, got a={a}, b={b}"));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("incomplete beta requires x in [0, 1], got {x}"));
    }
    if x == 0.0 {
        return Ok((Probability::ZERO, Probability::ONE));
    }
    if x == 1.0 {
        return Ok((Probability::ONE, Probability::ZERO));
    }
    let ln_front =
        ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b) + a * x.ln() + b * (-x).ln_1p();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = front * beta_continued_fraction(a, b, x)? / a;
        Ok((Probability::clamped(lower), Probability::clamped(1.0 - lower)))
    } else {
        let upper = front * beta_continued_fraction(b, a, 1.0 - x)? / b;
        Ok((Probability::clamped(1.0 - upper), Probability::clamped(upper)))
    }
}

const CF_MAX_ITER: usize = 20_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete beta continued fraction",
        iterations: CF_MAX_ITER,
    })
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> Probability {
    Probability::clamped(phi(z))
}

#[inline]
pub(crate) fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

// Rational approximation to the normal quantile (relative error ~1e-9),
// polished below by Halley steps against `phi`.
const QA: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_690e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const QB: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const QC: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const QD: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const Q_LOW: f64 = 0.024_25;

/// Standard normal quantile for `0 < u < 1`.
pub fn normal_quantile(u: f64) -> Result<f64> {
    open_unit(u, "normal quantile argument")?;
    let mut x = if u < Q_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else if u <= 1.0 - Q_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-u).ln_1p()).sqrt();
        -(((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    };
    for _ in 0..2 {
        // Work in the smaller tail so the residual keeps its relative precision.
        let e = if x <= 0.0 { phi(x) - u } else { (1.0 - u) - phi(-x) };
        let step = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= step / (1.0 + 0.5 * x * step);
    }
    Ok(x)
}

fn ln_binomial_coefficient(n: u64, s: u64) -> f64 {
    ln_gamma_unchecked(n as f64 + 1.0) - ln_gamma_unchecked(s as f64 + 1.0) - ln_gamma_unchecked((n - s) as f64 + 1.0)
}

fn pmf_unchecked(params: &BinomialParams, s: u64) -> f64 {
    let (n, theta) = (params.n, params.theta);
    let ln = ln_binomial_coefficient(n, s) + s as f64 * theta.ln() + (n - s) as f64 * (-theta).ln_1p();
    ln.exp()
}

fn check_support(params: &BinomialParams, s: u64) -> Result<()> {
    if s > params.n {
        return domain(format!("binomial support is 0..={}, got {s}", params.n));
    }
    Ok(())
}

pub fn binomial_pmf(params: &BinomialParams, s: u64) -> Result<Probability> {
    check_support(params, s)?;
    Ok(Probability::clamped(pmf_unchecked(params, s)))
}

/// Full mass vector `P(T = s)` for `s = 0..=n`.
pub fn binomial_pmf_vec(params: &BinomialParams) -> Vec<f64> {
    (0..=params.n).map(|s| pmf_unchecked(params, s)).collect()
}

/// `P(T <= s)`, summed over the shorter tail.
pub fn binomial_cdf(params: &BinomialParams, s: u64) -> Result<Probability> {
    check_support(params, s)?;
    Ok(Probability::clamped(cdf_unchecked(params, s)))
}

fn cdf_unchecked(params: &BinomialParams, s: u64) -> f64 {
    if s >= params.n {
        return 1.0;
    }
    if (s as f64) < params.mean() {
        (0..=s).map(|k| pmf_unchecked(params, k)).sum()
    } else {
        1.0 - ((s + 1)..=params.n).map(|k| pmf_unchecked(params, k)).sum::<f64>()
    }
}

/// `P(T >= s)`, summed over the shorter tail.
pub fn binomial_sf(params: &BinomialParams, s: u64) -> Result<Probability> {
    check_support(params, s)?;
    if s == 0 {
        return Ok(Probability::ONE);
    }
    let value = if (s as f64) > params.mean() {
        (s..=params.n).map(|k| pmf_unchecked(params, k)).sum()
    } else {
        1.0 - (0..s).map(|k| pmf_unchecked(params, k)).sum::<f64>()
    };
    Ok(Probability::clamped(value))
}

/// Left-continuous generalized inverse: the smallest `s` with `F(s) >= u`.
pub fn binomial_quantile(params: &BinomialParams, u: f64) -> Result<u64> {
    open_unit(u, "binomial quantile argument")?;
    let (mut lo, mut hi) = (0u64, params.n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cdf_unchecked(params, mid) >= u {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}
