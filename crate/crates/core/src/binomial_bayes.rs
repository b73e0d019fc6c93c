//! Posterior probabilities of the equivalence null for binomial data under a
//! conjugate Beta prior.
//!
//! With `s` successes in `n` trials a `Beta(p, q)` prior updates to
//! `Beta(p + s, q + n - s)`. The two null tails are the posterior mass below
//! `theta1` and above `theta2`; they are evaluated with the regularized
//! incomplete beta function so non-integer priors such as `Beta(0.5, 0.5)` are
//! handled the same way as integer ones.

use crate::equivalence::{EquivalenceMargin, EvidenceMeasure, Method, Tail};
use crate::error::{domain, Result};
use crate::special::{beta_cdf_pair, open_unit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPrior {
    p: f64,
    q: f64,
}

impl BetaPrior {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
            return domain(format!("Beta prior needs p, q > 0, got ({p}, {q})"));
        }
        Ok(BetaPrior { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn prior_variance(&self) -> f64 {
        let sum = self.p + self.q;
        self.p * self.q / (sum * sum * (sum + 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPosterior {
    a: f64,
    b: f64,
}

impl BetaPosterior {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `p + s`, the success index of the equivalent binomial tail.
    pub fn x_m(&self) -> f64 {
        self.a
    }

    /// `n + p + q - 1`, the trial count of the equivalent binomial tail.
    pub fn n_m(&self) -> f64 {
        self.a + self.b - 1.0
    }
}

pub fn posterior_update(prior: &BetaPrior, n: u64, s: u64) -> Result<BetaPosterior> {
    if s > n {
        return domain(format!("success count {s} exceeds n = {n}"));
    }
    Ok(BetaPosterior {
        a: prior.p + s as f64,
        b: prior.q + (n - s) as f64,
    })
}

/// `P(theta <= theta1 | x)`.
pub fn posterior_prob_upper(post: &BetaPosterior, theta1: f64) -> Result<EvidenceMeasure> {
    open_unit(theta1, "lower margin")?;
    let (below, _) = beta_cdf_pair(post.a, post.b, theta1)?;
    Ok(EvidenceMeasure::new(below, Tail::Upper, Method::Bayesian))
}

/// `P(theta >= theta2 | x)`.
pub fn posterior_prob_lower(post: &BetaPosterior, theta2: f64) -> Result<EvidenceMeasure> {
    open_unit(theta2, "upper margin")?;
    let (_, above) = beta_cdf_pair(post.a, post.b, theta2)?;
    Ok(EvidenceMeasure::new(above, Tail::Lower, Method::Bayesian))
}

/// Posterior probability of the equivalence null: the mass outside the margin.
pub fn posterior_prob_equiv(post: &BetaPosterior, margin: &EquivalenceMargin) -> Result<EvidenceMeasure> {
    margin.check_unit_interval()?;
    let upper = posterior_prob_upper(post, margin.theta1())?;
    let lower = posterior_prob_lower(post, margin.theta2())?;
    Ok(EvidenceMeasure::bayesian_combined(&upper, &lower))
}

/// Combined posterior probability for every count `s = 0..=n`.
pub fn posterior_equiv_by_count(prior: &BetaPrior, n: u64, margin: &EquivalenceMargin) -> Result<Vec<f64>> {
    (0..=n)
        .map(|s| {
            let post = posterior_update(prior, n, s)?;
            Ok(posterior_prob_equiv(&post, margin)?.value())
        })
        .collect()
}
