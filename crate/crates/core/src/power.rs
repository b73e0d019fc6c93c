//! Conservativity and power curves for both evidence measures.
//!
//! Binomial quantities are exact: the measure is evaluated at every count
//! `s = 0..=n` once, and any probability of the form `P_theta(measure <= t)` is
//! a sum of binomial masses over the qualifying counts. Monte Carlo appears only
//! where no closed form is used (the normal-model posterior CDF) or to mirror a
//! simulation protocol (`table_simulation`), and it is always checked against
//! the exact value.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::binomial_bayes::{posterior_equiv_by_count, BetaPrior};
use crate::equivalence::{binom_tail_pvalues, EquivalenceMargin, SignificanceLevels};
use crate::error::{domain, Result};
use crate::normal::{normal_posterior_probs, normal_pvalue_cdf, NormalPrior, NormalSampling};
use crate::rng::map_blocks;
use crate::special::{binomial_pmf_vec, open_unit, BinomialParams, Probability};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Binomial,
    Normal { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prior {
    Beta(BetaPrior),
    Normal(NormalPrior),
}

/// One curve configuration: model, data size, margin, optional prior, tail
/// levels, the x-grid (levels `t` or parameters `theta`) and the parameter at
/// which level-indexed curves are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub model: Model,
    pub n: u64,
    pub margin: EquivalenceMargin,
    pub prior: Option<Prior>,
    pub levels: SignificanceLevels,
    pub grid: Vec<f64>,
    pub theta_true: f64,
}

impl CurveSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("sample size must be at least 1");
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("grid must be strictly increasing");
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return domain("grid values must be finite");
        }
        match (self.model, self.prior) {
            (Model::Binomial, Some(Prior::Normal(_))) => return domain("binomial model takes a Beta prior"),
            (Model::Normal { .. }, Some(Prior::Beta(_))) => return domain("normal model takes a normal prior"),
            (Model::Normal { sigma }, _) if !(sigma > 0.0) => {
                return domain(format!("sigma must be positive, got {sigma}"))
            }
            _ => {}
        }
        if self.model == Model::Binomial {
            self.margin.check_unit_interval()?;
            if self.grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return domain("binomial grid values must lie in [0, 1]");
            }
        }
        Ok(())
    }

    fn beta_prior(&self) -> Option<BetaPrior> {
        match self.prior {
            Some(Prior::Beta(p)) => Some(p),
            _ => None,
        }
    }

    fn normal_prior(&self) -> Option<NormalPrior> {
        match self.prior {
            Some(Prior::Normal(p)) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub y_frequentist: Probability,
    pub y_bayes: Option<Probability>,
}

/// Both evidence measures evaluated at every count `s = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialMeasures {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub frequentist: Vec<f64>,
    pub bayes: Option<Vec<f64>>,
}

impl BinomialMeasures {
    pub fn new(n: u64, margin: &EquivalenceMargin, prior: Option<&BetaPrior>) -> Result<Self> {
        let mut upper = Vec::with_capacity(n as usize + 1);
        let mut lower = Vec::with_capacity(n as usize + 1);
        for s in 0..=n {
            let (u, l) = binom_tail_pvalues(n, s, margin)?;
            upper.push(u.value());
            lower.push(l.value());
        }
        let frequentist = upper.iter().zip(&lower).map(|(u, l)| u.max(*l)).collect();
        let bayes = prior.map(|p| posterior_equiv_by_count(p, n, margin)).transpose()?;
        Ok(BinomialMeasures {
            upper,
            lower,
            frequentist,
            bayes,
        })
    }

    fn for_spec(spec: &CurveSpec) -> Result<Self> {
        if spec.model != Model::Binomial {
            return domain("binomial curve requested for a non-binomial spec");
        }
        spec.validate()?;
        BinomialMeasures::new(spec.n, &spec.margin, spec.beta_prior().as_ref())
    }

    /// Counts at which the p-value test rejects at the given tail levels.
    pub fn frequentist_rejects(&self, levels: &SignificanceLevels) -> Vec<bool> {
        let (au, al) = (levels.alpha_upper().value(), levels.alpha_lower().value());
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| *u <= au && *l <= al)
            .collect()
    }

    /// Counts at which the posterior test rejects: `P_b <= level`, with the
    /// single level taken from [`SignificanceLevels::combined`].
    pub fn bayes_rejects(&self, levels: &SignificanceLevels) -> Option<Vec<bool>> {
        let level = levels.combined().value();
        self.bayes.as_ref().map(|b| b.iter().map(|v| *v <= level).collect())
    }
}

fn mass_where(pmf: &[f64], keep: impl Fn(usize) -> bool) -> Probability {
    Probability::clamped(pmf.iter().enumerate().filter(|(s, _)| keep(*s)).map(|(_, w)| w).sum())
}

fn cdf_point(measures: &BinomialMeasures, pmf: &[f64], t: f64) -> CurvePoint {
    CurvePoint {
        x: t,
        y_frequentist: mass_where(pmf, |s| measures.frequentist[s] <= t),
        y_bayes: measures.bayes.as_ref().map(|b| mass_where(pmf, |s| b[s] <= t)),
    }
}

/// Exact `P_theta_true(measure <= t)` for both measures.
pub fn binom_measure_cdf(spec: &CurveSpec, t: f64) -> Result<CurvePoint> {
    let measures = BinomialMeasures::for_spec(spec)?;
    let pmf = binomial_pmf_vec(&BinomialParams::new(spec.n, open_unit(spec.theta_true, "theta")?)?);
    Ok(cdf_point(&measures, &pmf, t))
}

/// [`binom_measure_cdf`] over every level in `spec.grid`.
pub fn binom_cdf_curve(spec: &CurveSpec) -> Result<Vec<CurvePoint>> {
    let measures = BinomialMeasures::for_spec(spec)?;
    let pmf = binomial_pmf_vec(&BinomialParams::new(spec.n, open_unit(spec.theta_true, "theta")?)?);
    Ok(spec.grid.iter().map(|&t| cdf_point(&measures, &pmf, t)).collect())
}

struct RejectionSets {
    frequentist: Vec<bool>,
    bayes: Option<Vec<bool>>,
}

impl RejectionSets {
    fn for_spec(spec: &CurveSpec) -> Result<Self> {
        let measures = BinomialMeasures::for_spec(spec)?;
        Ok(RejectionSets {
            frequentist: measures.frequentist_rejects(&spec.levels),
            bayes: measures.bayes_rejects(&spec.levels),
        })
    }

    fn power_at(&self, n: u64, theta: f64) -> Result<CurvePoint> {
        let pmf = binomial_pmf_vec(&BinomialParams::new(n, open_unit(theta, "theta")?)?);
        Ok(CurvePoint {
            x: theta,
            y_frequentist: mass_where(&pmf, |s| self.frequentist[s]),
            y_bayes: self.bayes.as_ref().map(|b| mass_where(&pmf, |s| b[s])),
        })
    }
}

/// Exact rejection probability at `theta` for both measures at the spec's levels.
pub fn binom_power(spec: &CurveSpec, theta: f64) -> Result<CurvePoint> {
    RejectionSets::for_spec(spec)?.power_at(spec.n, theta)
}

/// [`binom_power`] over every `theta` in `spec.grid`.
pub fn binom_power_curve(spec: &CurveSpec) -> Result<Vec<CurvePoint>> {
    let sets = RejectionSets::for_spec(spec)?;
    spec.grid.iter().map(|&theta| sets.power_at(spec.n, theta)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaMax {
    pub theta_f: f64,
    pub power_f: f64,
    pub theta_b: Option<f64>,
    pub power_b: Option<f64>,
}

// Powers within this distance are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

fn argmax_power(points: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut best: Option<(f64, f64)> = None;
    for (theta, power) in points {
        best = Some(match best {
            None => (theta, power),
            Some((bt, bp)) => {
                if power > bp + TIE_TOLERANCE {
                    (theta, power)
                } else if (power - bp).abs() <= TIE_TOLERANCE {
                    let (d_new, d_old) = ((theta - 0.5).abs(), (bt - 0.5).abs());
                    if d_new < d_old || (d_new == d_old && theta < bt) {
                        (theta, power.max(bp))
                    } else {
                        (bt, bp.max(power))
                    }
                } else {
                    (bt, bp)
                }
            }
        });
    }
    best.expect("theta grid is never empty")
}

/// Grid search over `theta = k * resolution in (0, 1)` for the power maximizer
/// of each measure. Ties go to the value nearest 0.5, then to the smaller one.
pub fn theta_max(spec: &CurveSpec, resolution: f64) -> Result<ThetaMax> {
    if !(resolution > 0.0 && resolution <= 1e-3) {
        return domain(format!("resolution must lie in (0, 1e-3], got {resolution}"));
    }
    let sets = RejectionSets::for_spec(spec)?;
    let steps = ((1.0 / resolution) - 1e-9).floor() as u64;
    let thetas: Vec<f64> = (1..=steps)
        .map(|k| k as f64 * resolution)
        .filter(|&t| t < 1.0)
        .collect();
    let points = thetas
        .iter()
        .map(|&t| sets.power_at(spec.n, t))
        .collect::<Result<Vec<_>>>()?;
    let (theta_f, power_f) = argmax_power(points.iter().map(|p| (p.x, p.y_frequentist.value())));
    let bayes = sets.bayes.as_ref().map(|_| {
        argmax_power(
            points
                .iter()
                .map(|p| (p.x, p.y_bayes.expect("bayes set present").value())),
        )
    });
    Ok(ThetaMax {
        theta_f,
        power_f,
        theta_b: bayes.map(|b| b.0),
        power_b: bayes.map(|b| b.1),
    })
}

/// Default replication count for the Monte Carlo posterior curve.
pub const NORMAL_CURVE_REPS: usize = 100_000;

/// Normal-model CDF curves over the level grid at `spec.theta_true`. The
/// frequentist curve is exact; the Bayesian one is the empirical CDF of the
/// combined posterior probability over `reps` seeded draws of `xbar`.
pub fn normal_curves(spec: &CurveSpec, reps: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let Model::Normal { sigma } = spec.model else {
        return domain("normal curves requested for a non-normal spec");
    };
    let samp = NormalSampling::new(sigma, spec.n)?;
    let bayes_values = match spec.normal_prior() {
        Some(prior) if reps > 0 => {
            let mut values: Vec<f64> = map_blocks(seed, 0, reps, |rng, len| {
                (0..len)
                    .map(|_| {
                        let z: f64 = rng.sample(StandardNormal);
                        let xbar = spec.theta_true + samp.mean_sd() * z;
                        normal_posterior_probs(&samp, &prior, xbar, &spec.margin)
                            .combined
                            .value()
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect();
            values.sort_by(f64::total_cmp);
            Some(values)
        }
        Some(_) => return domain("Monte Carlo replication count must be positive"),
        None => None,
    };
    spec.grid
        .iter()
        .map(|&t| {
            let y_frequentist = if t <= 0.0 {
                Probability::ZERO
            } else if t >= 1.0 {
                Probability::ONE
            } else {
                normal_pvalue_cdf(&samp, spec.theta_true, &spec.margin, Probability::new(t)?)?
            };
            let y_bayes = bayes_values.as_ref().map(|v| {
                let below = v.partition_point(|x| *x <= t);
                Probability::clamped(below as f64 / v.len() as f64)
            });
            Ok(CurvePoint {
                x: t,
                y_frequentist,
                y_bayes,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub frequentist: f64,
    pub bayes: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSimulation {
    /// Simulated rejection rate at `theta1`.
    pub type1: Rate,
    /// Simulated rejection rate at `theta_true`.
    pub power: Rate,
    pub exact_type1: Rate,
    pub exact_power: Rate,
    pub reps: usize,
}

impl TableSimulation {
    /// Binomial Monte Carlo standard error of a simulated rate.
    pub fn standard_error(&self, rate: f64) -> f64 {
        (rate * (1.0 - rate) / self.reps as f64).sqrt()
    }
}

/// Type I error (at `theta1`) and power (at `spec.theta_true`) of the
/// level-`alpha` tests, by simulation with `reps` seeded draws of the count and
/// by exact enumeration.
pub fn table_simulation(spec: &CurveSpec, reps: usize, seed: u64) -> Result<TableSimulation> {
    if reps == 0 {
        return domain("replication count must be positive");
    }
    let sets = RejectionSets::for_spec(spec)?;
    let simulate = |theta: f64, point: u32| -> Result<Rate> {
        let pmf = binomial_pmf_vec(&BinomialParams::new(spec.n, theta)?);
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for w in &pmf {
            acc += w;
            cdf.push(acc);
        }
        let last = cdf.len() - 1;
        let counts = map_blocks(seed, point, reps, |rng, len| {
            let mut hits = (0usize, 0usize);
            for _ in 0..len {
                let u: f64 = rng.random();
                let s = cdf.partition_point(|f| *f < u).min(last);
                hits.0 += sets.frequentist[s] as usize;
                if let Some(b) = &sets.bayes {
                    hits.1 += b[s] as usize;
                }
            }
            hits
        });
        let (f, b) = counts.iter().fold((0, 0), |acc, h| (acc.0 + h.0, acc.1 + h.1));
        Ok(Rate {
            frequentist: f as f64 / reps as f64,
            bayes: sets.bayes.as_ref().map(|_| b as f64 / reps as f64),
        })
    };
    let exact = |theta: f64| -> Result<Rate> {
        let p = sets.power_at(spec.n, theta)?;
        Ok(Rate {
            frequentist: p.y_frequentist.value(),
            bayes: p.y_bayes.map(Probability::value),
        })
    };
    let null = spec.margin.theta1();
    let alt = open_unit(spec.theta_true, "alternative theta")?;
    Ok(TableSimulation {
        type1: simulate(null, 0)?,
        power: simulate(alt, 1)?,
        exact_type1: exact(null)?,
        exact_power: exact(alt)?,
        reps,
    })
}
