//! The equivalence hypothesis and the frequentist TOST procedure for the
//! binomial model.
//!
//! The null `theta <= theta1 or theta >= theta2` is the union of two one-sided
//! nulls. Each is tested at its least favorable boundary value and the overall
//! p-value is the larger of the two, so the combined test rejects exactly when
//! both one-sided tests do.

use crate::error::{domain, Result};
use crate::special::{binomial_cdf, binomial_quantile, binomial_sf, open_unit, BinomialParams, Probability};

/// The interval `(theta1, theta2)` that defines equivalence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceMargin {
    theta1: f64,
    theta2: f64,
}

impl EquivalenceMargin {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !theta1.is_finite() || !theta2.is_finite() {
            return domain(format!("margin bounds must be finite, got ({theta1}, {theta2})"));
        }
        if theta1 >= theta2 {
            return domain(format!("margin requires theta1 < theta2, got ({theta1}, {theta2})"));
        }
        Ok(EquivalenceMargin { theta1, theta2 })
    }

    /// A margin `(center - half_width, center + half_width)`.
    pub fn symmetric(center: f64, half_width: f64) -> Result<Self> {
        EquivalenceMargin::new(center - half_width, center + half_width)
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.theta1 + self.theta2)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.theta2 - self.theta1)
    }

    pub fn width(&self) -> f64 {
        self.theta2 - self.theta1
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.theta1 < theta && theta < self.theta2
    }

    /// Errors unless `0 < theta1 < theta2 < 1`, as the binomial model needs.
    pub fn check_unit_interval(&self) -> Result<()> {
        open_unit(self.theta1, "lower margin")?;
        open_unit(self.theta2, "upper margin")?;
        Ok(())
    }
}

/// Levels for the upper-tailed test (null `theta <= theta1`) and the
/// lower-tailed test (null `theta >= theta2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceLevels {
    alpha_upper: Probability,
    alpha_lower: Probability,
}

impl SignificanceLevels {
    pub fn new(alpha_upper: f64, alpha_lower: f64) -> Result<Self> {
        open_unit(alpha_upper, "upper-tail level")?;
        open_unit(alpha_lower, "lower-tail level")?;
        Ok(SignificanceLevels {
            alpha_upper: Probability::new(alpha_upper)?,
            alpha_lower: Probability::new(alpha_lower)?,
        })
    }

    pub fn equal(alpha: f64) -> Result<Self> {
        SignificanceLevels::new(alpha, alpha)
    }

    pub fn alpha_upper(&self) -> Probability {
        self.alpha_upper
    }

    pub fn alpha_lower(&self) -> Probability {
        self.alpha_lower
    }

    pub fn is_equal(&self) -> bool {
        self.alpha_upper == self.alpha_lower
    }

    /// Single level used for a combined measure that has no per-tail split.
    pub fn combined(&self) -> Probability {
        if self.alpha_upper >= self.alpha_lower {
            self.alpha_upper
        } else {
            self.alpha_lower
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    /// Evidence against `theta <= theta1`.
    Upper,
    /// Evidence against `theta >= theta2`.
    Lower,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Frequentist,
    Bayesian,
}

/// A p-value or posterior probability together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceMeasure {
    pub value: Probability,
    pub tail: Tail,
    pub method: Method,
}

impl EvidenceMeasure {
    pub fn new(value: Probability, tail: Tail, method: Method) -> Self {
        EvidenceMeasure { value, tail, method }
    }

    pub fn value(&self) -> f64 {
        self.value.value()
    }

    /// Overall p-value of the intersection-union test: the larger tail.
    pub fn frequentist_combined(upper: &EvidenceMeasure, lower: &EvidenceMeasure) -> Self {
        let value = if upper.value >= lower.value {
            upper.value
        } else {
            lower.value
        };
        EvidenceMeasure::new(value, Tail::Combined, Method::Frequentist)
    }

    /// Overall posterior probability of the null: the two disjoint tail masses
    /// added together.
    pub fn bayesian_combined(upper: &EvidenceMeasure, lower: &EvidenceMeasure) -> Self {
        EvidenceMeasure::new(
            Probability::clamped(upper.value() + lower.value()),
            Tail::Combined,
            Method::Bayesian,
        )
    }
}

/// Rejects non-equivalence (declares equivalence) iff `value <= level`.
pub fn decide(evidence: &EvidenceMeasure, level: Probability) -> bool {
    evidence.value <= level
}

fn check_count(n: u64, s: u64) -> Result<()> {
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    if s > n {
        return domain(format!("success count {s} exceeds n = {n}"));
    }
    Ok(())
}

/// One-sided p-values `(P_theta1(T >= s), P_theta2(T <= s))` at the observed count.
pub fn binom_tail_pvalues(n: u64, s: u64, margin: &EquivalenceMargin) -> Result<(EvidenceMeasure, EvidenceMeasure)> {
    check_count(n, s)?;
    margin.check_unit_interval()?;
    let upper = binomial_sf(&BinomialParams::new(n, margin.theta1())?, s)?;
    let lower = binomial_cdf(&BinomialParams::new(n, margin.theta2())?, s)?;
    Ok((
        EvidenceMeasure::new(upper, Tail::Upper, Method::Frequentist),
        EvidenceMeasure::new(lower, Tail::Lower, Method::Frequentist),
    ))
}

/// TOST p-value for `s` successes in `n` trials: the larger one-sided p-value.
pub fn binom_tost_pvalue(n: u64, s: u64, margin: &EquivalenceMargin) -> Result<EvidenceMeasure> {
    let (upper, lower) = binom_tail_pvalues(n, s, margin)?;
    Ok(EvidenceMeasure::frequentist_combined(&upper, &lower))
}

/// Critical constants `C = F^-1_{theta1}(1 - alpha_upper)` and
/// `D = F^-1_{theta2}(alpha_lower)` with the left-continuous quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalConstants {
    pub lower: u64,
    pub upper: u64,
}

impl CriticalConstants {
    /// True when `C > D`, i.e. the region `{C <= s <= D}` never rejects.
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }

    pub fn contains(&self, s: u64) -> bool {
        self.lower <= s && s <= self.upper
    }
}

pub fn binom_critical_constants(
    n: u64,
    margin: &EquivalenceMargin,
    levels: &SignificanceLevels,
) -> Result<CriticalConstants> {
    check_count(n, 0)?;
    margin.check_unit_interval()?;
    let lower = binomial_quantile(
        &BinomialParams::new(n, margin.theta1())?,
        1.0 - levels.alpha_upper().value(),
    )?;
    let upper = binomial_quantile(&BinomialParams::new(n, margin.theta2())?, levels.alpha_lower().value())?;
    Ok(CriticalConstants { lower, upper })
}

/// Counts rejected by the p-value rule at per-tail levels: `s` with
/// `P_theta1(T >= s) <= alpha_upper` and `P_theta2(T <= s) <= alpha_lower`.
/// Returned as an inclusive range, `None` if empty.
pub fn binom_rejection_range(
    n: u64,
    margin: &EquivalenceMargin,
    levels: &SignificanceLevels,
) -> Result<Option<(u64, u64)>> {
    let mut first = None;
    let mut last = None;
    for s in 0..=n {
        let (upper, lower) = binom_tail_pvalues(n, s, margin)?;
        if decide(&upper, levels.alpha_upper()) && decide(&lower, levels.alpha_lower()) {
            first.get_or_insert(s);
            last = Some(s);
        }
    }
    Ok(first.zip(last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::binomial_pmf_vec;

    fn margin(a: f64, b: f64) -> EquivalenceMargin {
        EquivalenceMargin::new(a, b).unwrap()
    }

    fn prob(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn margin_validation_and_derived_values() {
        assert!(EquivalenceMargin::new(0.5, 0.5).is_err());
        assert!(EquivalenceMargin::new(0.6, 0.5).is_err());
        assert!(EquivalenceMargin::new(f64::NAN, 0.5).is_err());
        let m = margin(1.0, 4.0);
        assert_eq!(m.center(), 2.5);
        assert_eq!(m.half_width(), 1.5);
        assert!(m.check_unit_interval().is_err());
        assert!(margin(0.25, 0.75).check_unit_interval().is_ok());
    }

    #[test]
    fn decide_is_boundary_inclusive() {
        let ev = |v| EvidenceMeasure::new(prob(v), Tail::Combined, Method::Frequentist);
        assert!(decide(&ev(0.049), prob(0.05)));
        assert!(decide(&ev(0.05), prob(0.05)));
        assert!(!decide(&ev(0.051), prob(0.05)));
    }

    #[test]
    fn extreme_counts_give_no_evidence() {
        let m = margin(0.2, 0.8);
        let (upper, _) = binom_tail_pvalues(10, 0, &m).unwrap();
        assert_eq!(upper.value(), 1.0);
        assert_eq!(binom_tost_pvalue(10, 0, &m).unwrap().value(), 1.0);
        let (_, lower) = binom_tail_pvalues(10, 10, &m).unwrap();
        assert_eq!(lower.value(), 1.0);
        assert_eq!(binom_tost_pvalue(10, 10, &m).unwrap().value(), 1.0);
    }

    #[test]
    fn symmetric_observation_by_enumeration() {
        // Oracle: direct sums of the mass vectors.
        let m = margin(0.25, 0.75);
        let pmf1 = binomial_pmf_vec(&BinomialParams::new(50, 0.25).unwrap());
        let pmf2 = binomial_pmf_vec(&BinomialParams::new(50, 0.75).unwrap());
        let upper: f64 = pmf1[25..].iter().sum();
        let lower: f64 = pmf2[..=25].iter().sum();
        assert!((upper - lower).abs() < 1e-14);
        let (pu, pl) = binom_tail_pvalues(50, 25, &m).unwrap();
        assert!((pu.value() - upper).abs() < 1e-13);
        assert!((pl.value() - lower).abs() < 1e-13);
        let combined = binom_tost_pvalue(50, 25, &m).unwrap();
        assert_eq!(combined.tail, Tail::Combined);
        assert!((combined.value() - upper.max(lower)).abs() < 1e-13);
    }

    #[test]
    fn tost_pvalue_rejects_margin_outside_unit_interval() {
        assert!(binom_tost_pvalue(10, 5, &margin(-0.1, 0.5)).is_err());
        assert!(binom_tost_pvalue(10, 11, &margin(0.2, 0.8)).is_err());
    }

    #[test]
    fn critical_constants_by_enumeration() {
        let m = margin(0.25, 0.75);
        let levels = SignificanceLevels::equal(0.05).unwrap();
        let cc = binom_critical_constants(50, &m, &levels).unwrap();
        // Oracle: walk the cumulative sums.
        let cum = |theta: f64| {
            let mut acc = 0.0;
            binomial_pmf_vec(&BinomialParams::new(50, theta).unwrap())
                .into_iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect::<Vec<_>>()
        };
        let c = cum(0.25).iter().position(|&f| f >= 0.95).unwrap() as u64;
        let d = cum(0.75).iter().position(|&f| f >= 0.05).unwrap() as u64;
        assert_eq!(cc, CriticalConstants { lower: c, upper: d });
        assert_eq!((c, d), (18, 32));
        assert!(!cc.is_empty());
    }

    #[test]
    fn narrow_margin_small_n_is_empty() {
        let cc = binom_critical_constants(5, &margin(0.45, 0.55), &SignificanceLevels::equal(0.05).unwrap()).unwrap();
        assert!(cc.is_empty());
        assert!(!cc.contains(2) && !cc.contains(3));
        let range = binom_rejection_range(5, &margin(0.45, 0.55), &SignificanceLevels::equal(0.05).unwrap());
        assert_eq!(range.unwrap(), None);
    }

    #[test]
    fn wide_levels_give_nonempty_region() {
        let cc = binom_critical_constants(50, &margin(0.25, 0.75), &SignificanceLevels::equal(0.5).unwrap()).unwrap();
        assert!(cc.lower <= cc.upper);
    }

    #[test]
    fn pvalue_region_sits_inside_quantile_region() {
        for n in [10u64, 20, 35, 50, 80] {
            for (a, b) in [(0.2, 0.8), (0.25, 0.75), (0.3, 0.7)] {
                let m = margin(a, b);
                let levels = SignificanceLevels::equal(0.05).unwrap();
                let cc = binom_critical_constants(n, &m, &levels).unwrap();
                if let Some((lo, hi)) = binom_rejection_range(n, &m, &levels).unwrap() {
                    assert_eq!(lo, cc.lower + 1, "n={n} margin=({a},{b})");
                    assert!(hi <= cc.upper);
                }
            }
        }
    }

    #[test]
    fn intersection_union_exhaustive() {
        for n in 1..=60u64 {
            for (a, b) in [(0.1, 0.9), (0.2, 0.8), (0.25, 0.75), (0.3, 0.5), (0.45, 0.55)] {
                let m = margin(a, b);
                for s in 0..=n {
                    let (pu, pl) = binom_tail_pvalues(n, s, &m).unwrap();
                    let combined = EvidenceMeasure::frequentist_combined(&pu, &pl);
                    for alpha in [0.01, 0.05, 0.1, 0.2] {
                        let level = prob(alpha);
                        assert_eq!(decide(&combined, level), decide(&pu, level) && decide(&pl, level));
                    }
                }
            }
        }
    }

    #[test]
    fn tail_pvalues_are_monotone_in_s() {
        for n in [5u64, 17, 60] {
            let m = margin(0.3, 0.6);
            let tails: Vec<_> = (0..=n).map(|s| binom_tail_pvalues(n, s, &m).unwrap()).collect();
            for w in tails.windows(2) {
                assert!(w[1].0.value() <= w[0].0.value());
                assert!(w[1].1.value() >= w[0].1.value());
            }
        }
    }

    #[test]
    fn reflected_observation_invariance() {
        for n in 1..=60u64 {
            for (a, b) in [(0.2, 0.8), (0.25, 0.75), (0.4, 0.6)] {
                let m = margin(a, b);
                for s in 0..=n {
                    let p = binom_tost_pvalue(n, s, &m).unwrap().value();
                    let q = binom_tost_pvalue(n, n - s, &m).unwrap().value();
                    assert!((p - q).abs() < 1e-12, "n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn exact_size_at_least_favorable_points() {
        // P_theta(p <= alpha) <= alpha at theta1 and theta2, exact sums.
        for n in [10u64, 25, 50, 60] {
            let m = margin(0.25, 0.75);
            let pvals: Vec<f64> = (0..=n).map(|s| binom_tost_pvalue(n, s, &m).unwrap().value()).collect();
            for theta in [m.theta1(), m.theta2()] {
                let pmf = binomial_pmf_vec(&BinomialParams::new(n, theta).unwrap());
                for alpha in [0.01, 0.02, 0.05, 0.1, 0.15, 0.2] {
                    let size: f64 = pvals
                        .iter()
                        .zip(&pmf)
                        .filter(|(p, _)| **p <= alpha)
                        .map(|(_, w)| w)
                        .sum();
                    assert!(size <= alpha + 1e-12, "n={n} theta={theta} alpha={alpha}: {size}");
                }
            }
        }
    }

    #[test]
    fn combined_level_uses_larger_tail_level() {
        let levels = SignificanceLevels::new(0.025, 0.1).unwrap();
        assert_eq!(levels.combined().value(), 0.1);
        assert!(!levels.is_equal());
        assert!(SignificanceLevels::new(0.0, 0.1).is_err());
    }
}
