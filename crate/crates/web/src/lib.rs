//! wasm-bindgen wrappers for the browser demo. Every export returns a flat
//! `Vec<f64>` (a `Float64Array` in JS) of `[x, y_pvalue, y_posterior]` triples,
//! or an empty vector when the inputs are invalid.
//!
//! Only exact enumeration and closed forms are exposed; the Monte Carlo paths
//! use rayon, which has no threads on `wasm32-unknown-unknown`.

use equivtest::binomial_bayes::BetaPrior;
use equivtest::correlation::corr_two_sided;
use equivtest::equivalence::{EquivalenceMargin, SignificanceLevels};
use equivtest::power::{binom_cdf_curve, binom_power_curve, CurvePoint, CurveSpec, Model, Prior};
use wasm_bindgen::prelude::*;

#[allow(clippy::too_many_arguments)]
fn spec(
    n: u32,
    theta1: f64,
    theta2: f64,
    prior_p: f64,
    prior_q: f64,
    alpha: f64,
    theta_true: f64,
    grid: Vec<f64>,
) -> Option<CurveSpec> {
    let margin = EquivalenceMargin::new(theta1, theta2).ok()?;
    let spec = CurveSpec {
        model: Model::Binomial,
        n: n as u64,
        margin,
        prior: Some(Prior::Beta(BetaPrior::new(prior_p, prior_q).ok()?)),
        levels: SignificanceLevels::equal(alpha).ok()?,
        grid,
        theta_true,
    };
    spec.validate().ok()?;
    Some(spec)
}

fn grid(lo: f64, hi: f64, points: u32) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn flatten(points: &[CurvePoint]) -> Vec<f64> {
    points
        .iter()
        .flat_map(|p| [p.x, p.y_frequentist.value(), p.y_bayes.map_or(f64::NAN, |b| b.value())])
        .collect()
}

/// CDFs of the p-value and the posterior probability of non-equivalence at the
/// lower margin, for levels `t` on an even grid over [0, 1].
#[wasm_bindgen]
pub fn conservativity_curve(n: u32, theta1: f64, theta2: f64, prior_p: f64, prior_q: f64, points: u32) -> Vec<f64> {
    spec(
        n,
        theta1,
        theta2,
        prior_p,
        prior_q,
        0.05,
        theta1,
        grid(0.0, 1.0, points),
    )
    .and_then(|s| binom_cdf_curve(&s).ok())
    .map_or_else(Vec::new, |c| flatten(&c))
}

/// Rejection probability of both procedures over theta in (0, 1).
#[wasm_bindgen]
pub fn power_curve(n: u32, theta1: f64, theta2: f64, prior_p: f64, prior_q: f64, alpha: f64, points: u32) -> Vec<f64> {
    let g = grid(0.005, 0.995, points);
    spec(n, theta1, theta2, prior_p, prior_q, alpha, 0.5, g)
        .and_then(|s| binom_power_curve(&s).ok())
        .map_or_else(Vec::new, |c| flatten(&c))
}

/// Correlation of the two-sided posterior probability and p-value as a function
/// of the data weight `w`, as `[w, rho]` pairs on (0, 1].
#[wasm_bindgen]
pub fn two_sided_correlation(points: u32) -> Vec<f64> {
    let points = points.max(2);
    (1..=points)
        .map(|i| i as f64 / points as f64)
        .flat_map(|w| [w, corr_two_sided(w).map_or(f64::NAN, |r| r.rho)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservativity_triples_are_cdfs() {
        let v = conservativity_curve(50, 0.25, 0.75, 0.5, 0.5, 21);
        assert_eq!(v.len(), 63);
        let last = &v[60..];
        assert_eq!(last[0], 1.0);
        assert!((last[1] - 1.0).abs() < 1e-12 && (last[2] - 1.0).abs() < 1e-12);
        for w in v.chunks(3).collect::<Vec<_>>().windows(2) {
            assert!(w[1][1] >= w[0][1] - 1e-15 && w[1][2] >= w[0][2] - 1e-15);
        }
    }

    #[test]
    fn power_peaks_inside_the_margin() {
        let v = power_curve(30, 0.2, 0.8, 1.0, 1.0, 0.05, 99);
        let mid = &v[49 * 3..49 * 3 + 3];
        assert!((mid[0] - 0.5).abs() < 1e-12);
        assert!(mid[1] > v[1] && mid[1] > v[v.len() - 2]);
    }

    #[test]
    fn invalid_input_gives_empty() {
        assert!(conservativity_curve(50, 0.75, 0.25, 0.5, 0.5, 10).is_empty());
        assert!(power_curve(0, 0.2, 0.8, 1.0, 1.0, 0.05, 10).is_empty());
        assert!(power_curve(10, 0.2, 0.8, -1.0, 1.0, 0.05, 10).is_empty());
    }

    #[test]
    fn two_sided_correlation_ends_at_one() {
        let v = two_sided_correlation(10);
        assert_eq!(v.len(), 20);
        assert_eq!(v[18], 1.0);
        assert_eq!(v[19], 1.0);
    }
}
