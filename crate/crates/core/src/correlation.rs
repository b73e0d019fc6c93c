//! Correlation between evidence measures in the normal model.
//!
//! Closed forms rest on the Gaussian identity
//! `E[Phi(aZ) Phi(bZ)] = 1/4 + asin(ab / sqrt((1 + a^2)(1 + b^2))) / (2 pi)`.
//! Where no closed form exists the correlation is estimated by Monte Carlo with
//! a delete-one-batch jackknife standard error.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::equivalence::EquivalenceMargin;
use crate::error::{domain, Result};
use crate::normal::{NormalPrior, NormalSampling};
use crate::rng::{map_blocks, BLOCK_SIZE};
use crate::special::phi;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    pub method: CorrelationMethod,
    /// Present exactly for Monte Carlo estimates.
    pub std_error: Option<f64>,
}

impl CorrelationResult {
    fn closed(rho: f64) -> Self {
        CorrelationResult {
            rho: rho.clamp(-1.0, 1.0),
            method: CorrelationMethod::ClosedForm,
            std_error: None,
        }
    }

    /// Whether `value` lies within `k` standard errors (exact match for closed forms).
    pub fn within(&self, value: f64, k: f64) -> bool {
        match self.std_error {
            Some(se) => (self.rho - value).abs() <= k * se,
            None => self.rho == value,
        }
    }
}

pub fn expected_phi_product(a: f64, b: f64) -> f64 {
    0.25 + (a * b / ((1.0 + a * a) * (1.0 + b * b)).sqrt()).asin() / (2.0 * PI)
}

/// `Cov(Phi(aZ), Phi(bZ))`.
fn phi_covariance(a: f64, b: f64) -> f64 {
    expected_phi_product(a, b) - 0.25
}

/// The four bracketed covariances of `Cov(P_b, P_f)` and their signed sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceTerms {
    /// `(t1*, t1)`, `(t1*, t2)`, `(t1, t2*)`, `(t2*, t2)`, each before its sign.
    pub terms: [f64; 4],
    pub total: f64,
}

/// Correlation of the combined posterior probability with the combined p-value.
///
/// Every statistic is written as a multiple of one standard normal: `t_i*` as
/// `aZ` with `a = sqrt(sigma^2 + n tau^2) / sigma` and `t_i` as `bZ` with
/// `b = sqrt(n) tau / sigma`. Each bracket is then evaluated with
/// [`expected_phi_product`] and the terms are combined with signs `+ - + -`.
/// The margin drops out of this standardization.
pub fn corr_equivalence_closed(
    samp: &NormalSampling,
    prior: &NormalPrior,
    _margin: &EquivalenceMargin,
) -> (CorrelationResult, CovarianceTerms) {
    let (sigma, tau, n) = (samp.sigma(), prior.tau(), samp.n() as f64);
    let a = (sigma * sigma + n * tau * tau).sqrt() / sigma;
    let b = n.sqrt() * tau / sigma;
    let terms = [
        phi_covariance(a, b),
        phi_covariance(a, b),
        phi_covariance(b, a),
        phi_covariance(a, b),
    ];
    let total = terms[0] - terms[1] + terms[2] - terms[3];
    // Zero covariance means zero correlation whatever the variances are.
    (CorrelationResult::closed(0.0), CovarianceTerms { terms, total })
}

/// `rho(P_b, P_f)` for the two-sided problem as a function of
/// `w = n tau^2 / (sigma^2 + n tau^2)`.
pub fn corr_two_sided(w: f64) -> Result<CorrelationResult> {
    if !(w > 0.0 && w <= 1.0) {
        return domain(format!("w must lie in (0, 1], got {w}"));
    }
    let num = (w / (2.0 - w)).sqrt().asin();
    let den = (w.asin() * (1.0 / (2.0 - w)).asin()).sqrt();
    Ok(CorrelationResult::closed(num / den))
}

/// The `w` of [`corr_two_sided`] for a sampling model and prior.
pub fn two_sided_weight(samp: &NormalSampling, prior: &NormalPrior) -> f64 {
    prior.weight(samp)
}

/// Streaming co-moments for one batch, merged with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mx: f64,
    my: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Moments {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        let dx = x - self.mx;
        self.mx += dx / self.n;
        let dy = y - self.my;
        self.my += dy / self.n;
        self.sxx += dx * (x - self.mx);
        self.syy += dy * (y - self.my);
        self.sxy += dx * (y - self.my);
    }

    fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0.0 {
            return *other;
        }
        if other.n == 0.0 {
            return *self;
        }
        let n = self.n + other.n;
        let dx = other.mx - self.mx;
        let dy = other.my - self.my;
        let w = self.n * other.n / n;
        Moments {
            n,
            mx: self.mx + dx * other.n / n,
            my: self.my + dy * other.n / n,
            sxx: self.sxx + other.sxx + dx * dx * w,
            syy: self.syy + other.syy + dy * dy * w,
            sxy: self.sxy + other.sxy + dx * dy * w,
        }
    }

    fn corr(&self) -> f64 {
        let den = (self.sxx * self.syy).sqrt();
        if den > 0.0 {
            (self.sxy / den).clamp(-1.0, 1.0)
        } else {
            f64::NAN
        }
    }
}

/// Draws per jackknife batch.
const BATCH: usize = 1024;

/// Pearson correlation of `draws` seeded pairs produced by `pair`, with a
/// delete-one-batch jackknife standard error over batches of 1024 draws.
pub fn mc_correlation<F>(seed: u64, point: u32, draws: usize, pair: F) -> Result<CorrelationResult>
where
    F: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
{
    if draws < 2 * BATCH {
        return domain(format!("need at least {} draws, got {draws}", 2 * BATCH));
    }
    debug_assert_eq!(BLOCK_SIZE % BATCH, 0);
    let batches: Vec<Moments> = map_blocks(seed, point, draws, |rng, len| {
        let mut out = Vec::with_capacity(len.div_ceil(BATCH));
        let mut left = len;
        while left > 0 {
            let take = left.min(BATCH);
            let mut m = Moments::default();
            for _ in 0..take {
                let (x, y) = pair(rng);
                m.push(x, y);
            }
            out.push(m);
            left -= take;
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();

    let b = batches.len();
    let mut prefix = vec![Moments::default(); b + 1];
    for i in 0..b {
        prefix[i + 1] = prefix[i].merge(&batches[i]);
    }
    let mut suffix = vec![Moments::default(); b + 1];
    for i in (0..b).rev() {
        suffix[i] = batches[i].merge(&suffix[i + 1]);
    }
    let rho = prefix[b].corr();
    if !rho.is_finite() {
        return domain("correlation undefined: a margin has zero sample variance");
    }
    let leave_out: Vec<f64> = (0..b).map(|i| prefix[i].merge(&suffix[i + 1]).corr()).collect();
    let mean = leave_out.iter().sum::<f64>() / b as f64;
    let var = leave_out.iter().map(|r| (r - mean).powi(2)).sum::<f64>() * (b as f64 - 1.0) / b as f64;
    Ok(CorrelationResult {
        rho,
        method: CorrelationMethod::MonteCarlo,
        std_error: Some(var.sqrt()),
    })
}

/// Monte Carlo `rho(P_b, P_f)` with `xbar ~ N(theta, sigma^2 / n)`. `P_f` is the
/// tail-sum form `1 - Phi(t1*) - Phi(t2*)` whose covariance the closed form
/// decomposes; `theta = None` means the margin center.
pub fn corr_equivalence_mc(
    samp: &NormalSampling,
    prior: &NormalPrior,
    margin: &EquivalenceMargin,
    theta: Option<f64>,
    draws: usize,
    seed: u64,
) -> Result<CorrelationResult> {
    let theta = theta.unwrap_or(margin.center());
    let k = prior.z_scale(samp);
    let (th1, th2) = (margin.theta1(), margin.theta2());
    mc_correlation(seed, 0, draws, |rng| {
        let z: f64 = rng.sample(StandardNormal);
        let xbar = theta + samp.mean_sd() * z;
        let (z1, z2) = (samp.z(xbar, th1), samp.z(xbar, th2));
        let p_b = phi(-k * z1) + phi(k * z2);
        let p_f = phi(-z1) - phi(z2);
        (p_b, p_f)
    })
}

/// `rho(P_r, P_l)` for the one-sided p-values at margin `(theta0 - eps, theta0 + eps)`
/// with `xbar ~ N(theta0, sigma^2 / n)`. After standardizing only `eps sqrt(n) / sigma`
/// matters, so `theta0` is not an argument. Exactly `-1` at `eps = 0`; Monte Carlo otherwise.
pub fn corr_partial_pvalues(samp: &NormalSampling, epsilon: f64, draws: usize, seed: u64) -> Result<CorrelationResult> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return domain(format!("epsilon must be a nonnegative number, got {epsilon}"));
    }
    if epsilon == 0.0 {
        return Ok(CorrelationResult::closed(-1.0));
    }
    let shift = epsilon / samp.mean_sd();
    mc_correlation(seed, 0, draws, |rng| {
        let z: f64 = rng.sample(StandardNormal);
        (phi(-(z + shift)), phi(z - shift))
    })
}

/// Monte Carlo check of [`corr_two_sided`]: `xbar` is drawn from the prior
/// predictive `N(theta0, sigma^2 / n + tau^2)` and the pair is
/// `(2[1 - Phi(sqrt(w) t)], 2[1 - Phi(t)])` with `t = sqrt(n)(xbar - theta0) / sigma`.
pub fn corr_two_sided_mc(
    samp: &NormalSampling,
    prior: &NormalPrior,
    draws: usize,
    seed: u64,
) -> Result<CorrelationResult> {
    let w = two_sided_weight(samp, prior);
    let spread = (1.0 / (1.0 - w)).sqrt();
    if !spread.is_finite() {
        return domain("prior predictive spread overflows; use the closed form");
    }
    let k = w.sqrt();
    mc_correlation(seed, 0, draws, |rng| {
        let z: f64 = rng.sample(StandardNormal);
        let t = spread * z;
        (2.0 * phi(-k * t), 2.0 * phi(-t))
    })
}
