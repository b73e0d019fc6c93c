//! Benjamini-Hochberg step-up procedures and the FDR power simulation.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::equivalence::EquivalenceMargin;
use crate::error::{domain, Error, Result};
use crate::rng::stream;
use crate::special::{phi, Probability};

/// Outcome of a step-up procedure: the deciding point `d` and the rejected
/// indices in ascending index order.
#[derive(Debug, Clone, PartialEq)]
pub struct StepUp {
    pub d: usize,
    pub rejected: Vec<usize>,
}

impl StepUp {
    /// Rejection indicator per hypothesis.
    pub fn mask(&self, k: usize) -> Vec<bool> {
        let mut mask = vec![false; k];
        for &i in &self.rejected {
            mask[i] = true;
        }
        mask
    }
}

fn step_up(pvals: &[Probability], alpha: f64, denominator: f64) -> StepUp {
    let mut order: Vec<usize> = (0..pvals.len()).collect();
    // Stable sort keeps ties in index order.
    order.sort_by(|&a, &b| pvals[a].value().total_cmp(&pvals[b].value()));
    let d = order
        .iter()
        .enumerate()
        .rev()
        .find(|(j, &i)| pvals[i].value() <= (*j + 1) as f64 * alpha / denominator)
        .map_or(0, |(j, _)| j + 1);
    let mut rejected = order[..d].to_vec();
    rejected.sort_unstable();
    StepUp { d, rejected }
}

/// Reject the `D` smallest p-values, `D = max{j : p_(j) <= j alpha / k}`.
pub fn bh_procedure(pvals: &[Probability], alpha: Probability) -> StepUp {
    step_up(pvals, alpha.value(), pvals.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveStepUp {
    pub step_up: StepUp,
    pub k0_hat: f64,
}

/// BH with `k` replaced by `min(k, (1 + #{p > lambda}) / (1 - lambda))`.
pub fn adaptive_bh(pvals: &[Probability], alpha: Probability, lambda: Probability) -> Result<AdaptiveStepUp> {
    let lambda = lambda.value();
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("lambda must lie in (0, 1), got {lambda}"));
    }
    let k = pvals.len() as f64;
    let above = pvals.iter().filter(|p| p.value() > lambda).count() as f64;
    let k0_hat = ((1.0 + above) / (1.0 - lambda)).min(k);
    Ok(AdaptiveStepUp {
        step_up: step_up(pvals, alpha.value(), k0_hat),
        k0_hat,
    })
}

/// Counts of the k x 2 classification: rows are true nulls (`u`, `v`) and false
/// nulls (`t`, `s`); `w` accepts and `r` rejections in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionTable {
    pub k: usize,
    pub k0: usize,
    pub u: usize,
    pub v: usize,
    pub t: usize,
    pub s: usize,
    pub r: usize,
    pub w: usize,
}

impl DecisionTable {
    pub fn k1(&self) -> usize {
        self.k - self.k0
    }

    /// `V / (R v 1)`.
    pub fn fdp(&self) -> f64 {
        self.v as f64 / self.r.max(1) as f64
    }

    /// `S / (k1 v 1)`.
    pub fn power(&self) -> f64 {
        self.s as f64 / self.k1().max(1) as f64
    }
}

/// `truth[i]` is true when hypothesis `i` is a false null (an alternative).
pub fn score_decisions(rejected: &[bool], truth: &[bool]) -> Result<DecisionTable> {
    if rejected.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: rejected.len(),
        });
    }
    let k = truth.len();
    let (mut v, mut s, mut k1) = (0, 0, 0);
    for (&rej, &alt) in rejected.iter().zip(truth) {
        k1 += alt as usize;
        match (rej, alt) {
            (true, false) => v += 1,
            (true, true) => s += 1,
            _ => {}
        }
    }
    let k0 = k - k1;
    Ok(DecisionTable {
        k,
        k0,
        u: k0 - v,
        v,
        t: k1 - s,
        s,
        r: v + s,
        w: k - v - s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    Frequentist,
    Bayesian,
}

/// Spread of the simulated per-tail sample mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// `xbar ~ N(theta, sigma^2 / n)`, statistic `sqrt(n)(xbar - theta*) / sigma`.
    MeanScaled,
    /// `xbar ~ N(theta, sigma^2)`, statistic `(xbar - theta*) / sigma`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequentistCombination {
    /// `max(p_r, p_l)`.
    Max,
    /// `min(1, p_r + p_l)`.
    TailSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Procedure {
    Bh,
    Adaptive { lambda: Probability },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdrExperiment {
    pub k: usize,
    pub k1_grid: Vec<usize>,
    pub n: u64,
    pub margin: EquivalenceMargin,
    pub sigma: f64,
    pub tau: f64,
    pub epsilon_star: f64,
    pub alpha: Probability,
    pub reps: usize,
    pub seed: u64,
    pub evidence: Evidence,
    pub sampling: SamplingMode,
    pub combination: FrequentistCombination,
    pub procedure: Procedure,
}

/// `10, 60, 110, ...` below `k`.
pub fn default_k1_grid(k: usize) -> Vec<usize> {
    (10..k).step_by(50).collect()
}

pub const DEFAULT_EPSILON_STAR: f64 = 0.5;

impl FdrExperiment {
    pub fn validate(&self) -> Result<()> {
        let config = |msg: String| Err(Error::Config(msg));
        if self.k == 0 {
            return config("k must be positive".into());
        }
        if let Some(bad) = self.k1_grid.iter().find(|&&k1| k1 > self.k) {
            return config(format!("k1 = {bad} exceeds k = {}", self.k));
        }
        if self.n == 0 || self.reps == 0 {
            return config("n and reps must be positive".into());
        }
        if !(self.sigma > 0.0 && self.tau > 0.0) || !self.sigma.is_finite() || !self.tau.is_finite() {
            return config(format!(
                "sigma and tau must be positive, got {} and {}",
                self.sigma, self.tau
            ));
        }
        let eps = self.epsilon_star;
        if !(eps > 0.0) || !eps.is_finite() {
            return config(format!("epsilon_star must be positive, got {eps}"));
        }
        if !(self.margin.theta1() + eps < self.margin.theta2() - eps) {
            return config(format!(
                "alternative means {} and {} cross; widen the margin or shrink epsilon_star",
                self.margin.theta1() + eps,
                self.margin.theta2() - eps
            ));
        }
        if let Procedure::Adaptive { lambda } = self.procedure {
            if !(lambda.value() > 0.0 && lambda.value() < 1.0) {
                return config(format!("lambda must lie in (0, 1), got {}", lambda.value()));
            }
        }
        Ok(())
    }

    fn statistic_sd(&self) -> f64 {
        match self.sampling {
            SamplingMode::MeanScaled => self.sigma / (self.n as f64).sqrt(),
            SamplingMode::Literal => self.sigma,
        }
    }

    /// Posterior z multiplier `sqrt(n tau^2 / (sigma^2 + n tau^2))`.
    fn posterior_scale(&self) -> f64 {
        let nt2 = self.n as f64 * self.tau * self.tau;
        (nt2 / (self.sigma * self.sigma + nt2)).sqrt()
    }

    /// Combined evidence from the standardized right- and left-tail statistics.
    fn evidence_value(&self, z_r: f64, z_l: f64) -> f64 {
        match self.evidence {
            Evidence::Frequentist => {
                let (p_r, p_l) = (phi(-z_r), phi(z_l));
                match self.combination {
                    FrequentistCombination::Max => p_r.max(p_l),
                    FrequentistCombination::TailSum => (p_r + p_l).min(1.0),
                }
            }
            Evidence::Bayesian => {
                let k = self.posterior_scale();
                (phi(-k * z_r) + phi(k * z_l)).min(1.0)
            }
        }
    }

    fn replicate(&self, k1: usize, point: u32, rep: u32) -> Result<DecisionTable> {
        let mut rng = stream(self.seed, point, rep);
        let shift = self.epsilon_star / self.statistic_sd();
        let mut truth = Vec::with_capacity(self.k);
        let mut pvals = Vec::with_capacity(self.k);
        for j in 0..self.k {
            let alt = j < k1;
            let offset = if alt { shift } else { 0.0 };
            // Right tail centered at theta1 (+ eps*), left tail mirrored at theta2.
            let z_r: f64 = offset + rng.sample::<f64, _>(StandardNormal);
            let z_l: f64 = -offset + rng.sample::<f64, _>(StandardNormal);
            truth.push(alt);
            pvals.push(Probability::clamped(self.evidence_value(z_r, z_l)));
        }
        let decision = match self.procedure {
            Procedure::Bh => bh_procedure(&pvals, self.alpha),
            Procedure::Adaptive { lambda } => adaptive_bh(&pvals, self.alpha, lambda)?.step_up,
        };
        score_decisions(&decision.mask(self.k), &truth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrPoint {
    pub k1: usize,
    pub mean_power: f64,
    pub mean_fdr: f64,
    pub se_power: f64,
    pub se_fdr: f64,
    pub mean_rejections: f64,
}

fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Average FDR-power and false discovery proportion over `reps` replications
/// at each `k1` of the grid.
pub fn fdr_power_simulation(exp: &FdrExperiment) -> Result<Vec<FdrPoint>> {
    exp.validate()?;
    exp.k1_grid
        .iter()
        .enumerate()
        .map(|(point, &k1)| {
            let tables = (0..exp.reps)
                .into_par_iter()
                .map(|rep| exp.replicate(k1, point as u32, rep as u32))
                .collect::<Result<Vec<_>>>()?;
            let (mean_power, se_power) = mean_se(tables.iter().map(DecisionTable::power));
            let (mean_fdr, se_fdr) = mean_se(tables.iter().map(DecisionTable::fdp));
            let mean_rejections = tables.iter().map(|t| t.r as f64).sum::<f64>() / tables.len() as f64;
            Ok(FdrPoint {
                k1,
                mean_power,
                mean_fdr,
                se_power,
                se_fdr,
                mean_rejections,
            })
        })
        .collect()
}
