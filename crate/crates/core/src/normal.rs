//! Equivalence evidence for the mean of a normal sample with known variance.
//!
//! The sufficient statistic is the sample total `T = n * xbar ~ N(n theta, n sigma^2)`.
//! One-sided p-values are evaluated at the margin endpoints; posterior
//! probabilities use a `N(theta_i, tau^2)` prior centered at the endpoint of the
//! tail being tested.

use crate::equivalence::{EquivalenceMargin, EvidenceMeasure, Method, Tail};
use crate::error::{domain, Error, Result};
use crate::special::{normal_quantile, open_unit, phi, Probability};

/// Known data standard deviation and sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalSampling {
    sigma: f64,
    n: u64,
}

impl NormalSampling {
    pub fn new(sigma: f64, n: u64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return domain(format!("sigma must be positive, got {sigma}"));
        }
        if n == 0 {
            return domain("sample size must be at least 1");
        }
        Ok(NormalSampling { sigma, n })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Standard deviation of the total `T`, `sigma * sqrt(n)`.
    pub fn total_sd(&self) -> f64 {
        self.sigma * (self.n as f64).sqrt()
    }

    /// Standard deviation of the mean, `sigma / sqrt(n)`.
    pub fn mean_sd(&self) -> f64 {
        self.sigma / (self.n as f64).sqrt()
    }

    /// `sqrt(n) (xbar - theta) / sigma`.
    pub fn z(&self, xbar: f64, theta: f64) -> f64 {
        (xbar - theta) / self.mean_sd()
    }
}

/// Prior standard deviation. The prior mean is the margin endpoint of the
/// tail under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPrior {
    tau: f64,
}

impl NormalPrior {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return domain(format!("prior tau must be positive, got {tau}"));
        }
        Ok(NormalPrior { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Shrinkage weight `n tau^2 / (sigma^2 + n tau^2)`.
    pub fn weight(&self, samp: &NormalSampling) -> f64 {
        let nt2 = samp.n as f64 * self.tau * self.tau;
        nt2 / (samp.sigma * samp.sigma + nt2)
    }

    /// Factor `k` such that the posterior tail argument is `k * z`:
    /// `sqrt(n) tau / sqrt(sigma^2 + n tau^2)`.
    pub fn z_scale(&self, samp: &NormalSampling) -> f64 {
        self.weight(samp).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantsMode {
    /// `C = n theta1 + sigma sqrt(n) z_{1-t}`, `D = n theta2 + sigma sqrt(n) z_t`.
    Approximate,
    /// `C + D = n (theta1 + theta2)` with the size at `theta1` solved exactly.
    ExactSymmetric,
}

/// Critical constants on the scale of the total `T`. Rejection when `C <= T <= D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalConstants {
    pub lower: f64,
    pub upper: f64,
}

impl NormalConstants {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }
}

const BISECTION_MAX_ITER: usize = 400;

pub fn normal_critical_constants(
    samp: &NormalSampling,
    margin: &EquivalenceMargin,
    level: Probability,
    mode: ConstantsMode,
) -> Result<NormalConstants> {
    let t = open_unit(level.value(), "level")?;
    let n = samp.n as f64;
    let sd = samp.total_sd();
    match mode {
        ConstantsMode::Approximate => Ok(NormalConstants {
            lower: n * margin.theta1() + sd * normal_quantile(1.0 - t)?,
            upper: n * margin.theta2() + sd * normal_quantile(t)?,
        }),
        ConstantsMode::ExactSymmetric => {
            let (lo_mean, hi_mean) = (n * margin.theta1(), n * margin.theta2());
            let size = |c0: f64| phi((hi_mean - c0) / sd) - phi((c0 - lo_mean) / sd) - t;
            // size is decreasing in c0 and equals -t at the midpoint.
            let mut hi = 0.5 * (lo_mean + hi_mean);
            let mut lo = lo_mean - 40.0 * sd;
            if size(lo) < 0.0 {
                return Err(Error::NoRoot("exact symmetric critical constant"));
            }
            for _ in 0..BISECTION_MAX_ITER {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if size(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let c0 = 0.5 * (lo + hi);
            if size(c0).abs() > 1e-10 {
                return Err(Error::NoRoot("exact symmetric critical constant"));
            }
            Ok(NormalConstants {
                lower: c0,
                upper: lo_mean + hi_mean - c0,
            })
        }
    }
}

/// One-sided p-values `(1 - Phi(z1), Phi(z2))` with `z_i = sqrt(n)(xbar - theta_i)/sigma`.
pub fn normal_tail_pvalues(
    samp: &NormalSampling,
    xbar: f64,
    margin: &EquivalenceMargin,
) -> (EvidenceMeasure, EvidenceMeasure) {
    (
        upper_tail_pvalue(samp, xbar, margin.theta1()),
        lower_tail_pvalue(samp, xbar, margin.theta2()),
    )
}

pub fn upper_tail_pvalue(samp: &NormalSampling, xbar: f64, theta1: f64) -> EvidenceMeasure {
    EvidenceMeasure::new(
        Probability::clamped(phi(-samp.z(xbar, theta1))),
        Tail::Upper,
        Method::Frequentist,
    )
}

pub fn lower_tail_pvalue(samp: &NormalSampling, xbar: f64, theta2: f64) -> EvidenceMeasure {
    EvidenceMeasure::new(
        Probability::clamped(phi(samp.z(xbar, theta2))),
        Tail::Lower,
        Method::Frequentist,
    )
}

/// Equivalence p-value `P(|T| <= |t|)` at the margin boundary:
/// `Phi(|t| + eps sqrt(n)/sigma) + Phi(|t| - eps sqrt(n)/sigma) - 1`
/// with `t = sqrt(n)(xbar - theta0)/sigma`.
pub fn normal_tost_pvalue(samp: &NormalSampling, xbar: f64, margin: &EquivalenceMargin) -> EvidenceMeasure {
    let t = samp.z(xbar, margin.center()).abs();
    let c = margin.half_width() / samp.mean_sd();
    // Phi(t + c) - Phi(c - t), rearranged to avoid cancellation near 1.
    let value = phi(t + c) - phi(c - t);
    EvidenceMeasure::new(Probability::clamped(value), Tail::Combined, Method::Frequentist)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPosteriorProbs {
    pub upper: EvidenceMeasure,
    pub lower: EvidenceMeasure,
    pub combined: EvidenceMeasure,
}

pub fn upper_tail_posterior(samp: &NormalSampling, prior: &NormalPrior, xbar: f64, theta1: f64) -> EvidenceMeasure {
    let k = prior.z_scale(samp);
    EvidenceMeasure::new(
        Probability::clamped(phi(-k * samp.z(xbar, theta1))),
        Tail::Upper,
        Method::Bayesian,
    )
}

pub fn lower_tail_posterior(samp: &NormalSampling, prior: &NormalPrior, xbar: f64, theta2: f64) -> EvidenceMeasure {
    let k = prior.z_scale(samp);
    EvidenceMeasure::new(
        Probability::clamped(phi(k * samp.z(xbar, theta2))),
        Tail::Lower,
        Method::Bayesian,
    )
}

/// Posterior probabilities `P(theta <= theta1 | xbar)` under `N(theta1, tau^2)`,
/// `P(theta >= theta2 | xbar)` under `N(theta2, tau^2)`, and their sum.
pub fn normal_posterior_probs(
    samp: &NormalSampling,
    prior: &NormalPrior,
    xbar: f64,
    margin: &EquivalenceMargin,
) -> NormalPosteriorProbs {
    let upper = upper_tail_posterior(samp, prior, xbar, margin.theta1());
    let lower = lower_tail_posterior(samp, prior, xbar, margin.theta2());
    NormalPosteriorProbs {
        upper,
        lower,
        combined: EvidenceMeasure::bayesian_combined(&upper, &lower),
    }
}

/// `P_theta(C_n(t) <= T <= D_n(t))` with approximate constants at level `t`,
/// i.e. the CDF at `t` of the larger one-sided p-value.
pub fn normal_pvalue_cdf(
    samp: &NormalSampling,
    theta: f64,
    margin: &EquivalenceMargin,
    t: Probability,
) -> Result<Probability> {
    let cc = normal_critical_constants(samp, margin, t, ConstantsMode::Approximate)?;
    if cc.is_empty() {
        return Ok(Probability::ZERO);
    }
    let mean = samp.n as f64 * theta;
    let sd = samp.total_sd();
    Ok(Probability::clamped(
        phi((cc.upper - mean) / sd) - phi((cc.lower - mean) / sd),
    ))
}

/// `P_theta(upper one-sided p-value <= t) = P_theta(T >= C_n(t))`.
pub fn normal_upper_pvalue_cdf(samp: &NormalSampling, theta: f64, theta1: f64, t: Probability) -> Result<Probability> {
    let t = open_unit(t.value(), "level")?;
    let n = samp.n as f64;
    let sd = samp.total_sd();
    let c = n * theta1 + sd * normal_quantile(1.0 - t)?;
    Ok(Probability::clamped(phi((n * theta - c) / sd)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samp(sigma: f64, n: u64) -> NormalSampling {
        NormalSampling::new(sigma, n).unwrap()
    }

    fn margin(a: f64, b: f64) -> EquivalenceMargin {
        EquivalenceMargin::new(a, b).unwrap()
    }

    fn prob(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(NormalSampling::new(0.0, 5).is_err());
        assert!(NormalSampling::new(1.0, 0).is_err());
        assert!(NormalPrior::new(-1.0).is_err());
        assert!(NormalPrior::new(f64::INFINITY).is_err());
    }

    #[test]
    fn approximate_constants_match_quantile_bisection() {
        let s = samp(2.0, 30);
        let m = margin(1.0, 4.0);
        let cc = normal_critical_constants(&s, &m, prob(0.05), ConstantsMode::Approximate).unwrap();
        // Independent route: bisect the N(n theta_i, n sigma^2) CDF directly.
        let invert = |mean: f64, target: f64| {
            let sd = s.total_sd();
            let (mut lo, mut hi) = (mean - 20.0 * sd, mean + 20.0 * sd);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if phi((mid - mean) / sd) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        assert!((cc.lower - invert(30.0, 0.95)).abs() < 1e-8);
        assert!((cc.upper - invert(120.0, 0.05)).abs() < 1e-8);
    }

    #[test]
    fn symmetric_margin_gives_antisymmetric_constants() {
        let s = samp(1.5, 12);
        let m = margin(-0.8, 0.8);
        for mode in [ConstantsMode::Approximate, ConstantsMode::ExactSymmetric] {
            let cc = normal_critical_constants(&s, &m, prob(0.05), mode).unwrap();
            assert!((cc.lower + cc.upper).abs() < 1e-9, "{mode:?}: {cc:?}");
        }
    }

    #[test]
    fn exact_constants_have_exact_size() {
        let s = samp(2.0, 30);
        let m = margin(1.0, 4.0);
        let cc = normal_critical_constants(&s, &m, prob(0.05), ConstantsMode::ExactSymmetric).unwrap();
        let sd = s.total_sd();
        let size = |theta: f64| phi((cc.upper - 30.0 * theta) / sd) - phi((cc.lower - 30.0 * theta) / sd);
        assert!((size(1.0) - 0.05).abs() < 1e-10);
        assert!((size(4.0) - 0.05).abs() < 1e-10);
    }

    #[test]
    fn exact_and_approximate_agree_when_tails_decouple() {
        let s = samp(1.0, 100);
        let m = margin(0.0, 5.0);
        let a = normal_critical_constants(&s, &m, prob(0.5), ConstantsMode::Approximate).unwrap();
        let e = normal_critical_constants(&s, &m, prob(0.5), ConstantsMode::ExactSymmetric).unwrap();
        assert!((a.upper - e.upper).abs() <= 1e-6 * a.upper.abs());
        // lower constant is n theta1 = 0 here; compare on the total's scale.
        assert!((a.lower - e.lower).abs() <= 1e-6 * s.total_sd());
    }

    #[test]
    fn tost_pvalue_at_center_and_degenerate_margin() {
        let s = samp(2.0, 30);
        let m = margin(1.0, 4.0);
        assert!(normal_tost_pvalue(&s, 2.5, &m).value().abs() < 1e-15);
        // Zero half-width collapses to 2 Phi(|t|) - 1.
        let point = margin(0.0, 1e-300);
        let xbar = 0.7;
        let t = s.z(xbar, point.center()).abs();
        let p = normal_tost_pvalue(&s, xbar, &point).value();
        assert!((p - (2.0 * phi(t) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn tost_pvalue_far_from_margin_tends_to_one() {
        let s = samp(1.0, 10);
        let m = margin(-1.0, 1.0);
        assert!((normal_tost_pvalue(&s, 50.0, &m).value() - 1.0).abs() < 1e-15);
        assert!((normal_tost_pvalue(&s, -50.0, &m).value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tost_pvalue_matches_tail_difference_form() {
        // For xbar >= theta0: Phi(z1) + Phi(z2) - 1 with z_i = sqrt(n)(xbar - theta_i)/sigma.
        let s = samp(2.0, 30);
        let m = margin(1.0, 4.0);
        for i in 0..=200 {
            let xbar = 2.5 + 0.025 * i as f64;
            let direct = phi(s.z(xbar, 1.0)) + phi(s.z(xbar, 4.0)) - 1.0;
            assert!((normal_tost_pvalue(&s, xbar, &m).value() - direct).abs() < 1e-12);
            // Reflection through the center.
            let mirrored = 5.0 - xbar;
            let direct = 1.0 - phi(s.z(mirrored, 1.0)) - phi(s.z(mirrored, 4.0));
            assert!((normal_tost_pvalue(&s, mirrored, &m).value() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn tost_pvalue_strictly_increasing_in_distance() {
        let s = samp(2.0, 30);
        let m = margin(1.0, 4.0);
        let values: Vec<f64> = (0..300)
            .map(|i| normal_tost_pvalue(&s, 2.5 + 0.01 * i as f64, &m).value())
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn posterior_at_lower_margin_is_half() {
        let s = samp(1.0, 20);
        let pr = NormalPrior::new(0.25).unwrap();
        let m = margin(0.0, 2.0);
        let probs = normal_posterior_probs(&s, &pr, 0.0, &m);
        assert!((probs.upper.value() - 0.5).abs() < 1e-15);
        assert!((probs.combined.value() - probs.upper.value() - probs.lower.value()).abs() < 1e-15);
    }

    #[test]
    fn flat_prior_limit_recovers_pvalue() {
        let s = samp(2.0, 30);
        let pr = NormalPrior::new(1e8).unwrap();
        for &xbar in &[0.2, 1.0, 1.7, 3.0] {
            let post = upper_tail_posterior(&s, &pr, xbar, 1.0).value();
            let pval = upper_tail_pvalue(&s, xbar, 1.0).value();
            assert!((post - pval).abs() < 1e-6);
        }
    }

    #[test]
    fn pvalue_cdf_empty_region_and_full_mass() {
        let s = samp(2.0, 30);
        let m = margin(1.0, 4.0);
        // 2 sd z_{1-t} > n (theta2 - theta1) needs z_{1-t} > 4.1.
        let cc = normal_critical_constants(&s, &m, prob(1e-6), ConstantsMode::Approximate).unwrap();
        assert!(cc.is_empty());
        assert_eq!(normal_pvalue_cdf(&s, 2.5, &m, prob(1e-6)).unwrap(), Probability::ZERO);
        let cc = normal_critical_constants(&s, &m, prob(0.001), ConstantsMode::Approximate).unwrap();
        assert!(!cc.is_empty());
        let near_one = normal_pvalue_cdf(&s, 2.5, &m, prob(1.0 - 1e-12)).unwrap().value();
        assert!(near_one > 1.0 - 1e-9);
    }

    #[test]
    fn more_noise_pulls_cdf_towards_diagonal() {
        let m = margin(1.0, 4.0);
        for theta in [0.5, 1.5] {
            for i in 1..=9 {
                let t = i as f64 / 10.0;
                let d2 = (normal_pvalue_cdf(&samp(2.0, 30), theta, &m, prob(t)).unwrap().value() - t).abs();
                let d4 = (normal_pvalue_cdf(&samp(4.0, 30), theta, &m, prob(t)).unwrap().value() - t).abs();
                assert!(d4 < d2, "theta={theta} t={t}: {d4} vs {d2}");
            }
        }
    }

    #[test]
    fn one_sided_cdf_is_uniform_at_boundary() {
        let s = samp(3.0, 17);
        for i in 1..20 {
            let t = i as f64 / 20.0;
            let got = normal_upper_pvalue_cdf(&s, 0.4, 0.4, prob(t)).unwrap().value();
            assert!((got - t).abs() < 1e-12);
        }
    }
}
