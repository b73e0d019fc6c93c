//! Independent oracles: adaptive quadrature, bisection and Monte Carlo written
//! here without using the library's own special functions where avoidable.

use equivtest::binomial_bayes::{posterior_prob_equiv, posterior_update, BetaPrior};
use equivtest::equivalence::EquivalenceMargin;
use equivtest::fdr::{
    adaptive_bh, fdr_power_simulation, Evidence, FdrExperiment, FrequentistCombination, Procedure, SamplingMode,
};
use equivtest::normal::{
    normal_critical_constants, normal_posterior_probs, normal_tost_pvalue, upper_tail_posterior, upper_tail_pvalue,
    ConstantsMode, NormalPrior, NormalSampling,
};
use equivtest::rng::stream;
use equivtest::special::{normal_cdf, normal_quantile, reg_inc_beta};
use equivtest::Probability;
use rand::Rng;
use rand_distr::StandardNormal;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, 1e-15, 50)
}

fn beta_cdf_by_quadrature(a: f64, b: f64, x: f64) -> f64 {
    let log_kernel = |t: f64| (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln();
    // Scale by the kernel at the mode so the absolute tolerance is meaningful.
    let mode = ((a - 1.0) / (a + b - 2.0)).clamp(1e-3, 1.0 - 1e-3);
    let peak = log_kernel(mode);
    let density = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            (log_kernel(t) - peak).exp()
        }
    };
    integrate(density, 0.0, x) / integrate(density, 0.0, 1.0)
}

fn normal_mass_below(mean: f64, sd: f64, x: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * ((t - mean) / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
    integrate(pdf, mean - 40.0 * sd, x)
}

#[test]
fn incomplete_beta_against_quadrature() {
    for (a, b, x) in [(3.5, 47.5, 0.25), (2.0, 3.0, 0.4), (25.5, 25.5, 0.25), (10.0, 1.5, 0.9)] {
        let got = reg_inc_beta(a, b, x).unwrap().value();
        let want = beta_cdf_by_quadrature(a, b, x);
        assert!((got - want).abs() < 1e-10, "I_{x}({a},{b}) = {got}, quadrature {want}");
    }
}

#[test]
fn jeffreys_posterior_at_half_against_quadrature() {
    let post = posterior_update(&BetaPrior::new(0.5, 0.5).unwrap(), 50, 25).unwrap();
    let margin = EquivalenceMargin::new(0.25, 0.75).unwrap();
    let got = posterior_prob_equiv(&post, &margin).unwrap().value();
    let want = 2.0 * beta_cdf_by_quadrature(25.5, 25.5, 0.25);
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn normal_posterior_against_quadrature() {
    let (n, sigma, tau, xbar) = (20u64, 1.0, 0.25, 1.0);
    let samp = NormalSampling::new(sigma, n).unwrap();
    let prior = NormalPrior::new(tau).unwrap();
    let margin = EquivalenceMargin::new(0.0, 2.0).unwrap();
    let probs = normal_posterior_probs(&samp, &prior, xbar, &margin);
    let nt2 = n as f64 * tau * tau;
    let post_sd = (tau * tau * sigma * sigma / (sigma * sigma + nt2)).sqrt();
    let post_mean = |center: f64| (center * sigma * sigma + nt2 * xbar) / (sigma * sigma + nt2);
    let upper = normal_mass_below(post_mean(0.0), post_sd, 0.0);
    let lower = 1.0 - normal_mass_below(post_mean(2.0), post_sd, 2.0);
    assert!((probs.upper.value() - upper).abs() < 1e-10);
    assert!((probs.lower.value() - lower).abs() < 1e-10);
    assert!((probs.combined.value() - (upper + lower)).abs() < 1e-10);
}

#[test]
fn flat_prior_limit_matches_pvalue() {
    let samp = NormalSampling::new(1.5, 12).unwrap();
    let prior = NormalPrior::new(1e8).unwrap();
    for i in -20..=20 {
        let xbar = 0.3 + i as f64 * 0.05;
        let b = upper_tail_posterior(&samp, &prior, xbar, 0.3).value();
        let f = upper_tail_pvalue(&samp, xbar, 0.3).value();
        assert!((b - f).abs() < 1e-6);
    }
}

fn bisect_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid).value() < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn approximate_constants_against_bisection_quantiles() {
    let samp = NormalSampling::new(2.0, 30).unwrap();
    let margin = EquivalenceMargin::new(1.0, 4.0).unwrap();
    let cc = normal_critical_constants(
        &samp,
        &margin,
        Probability::new(0.05).unwrap(),
        ConstantsMode::Approximate,
    )
    .unwrap();
    let sd = 2.0 * 30f64.sqrt();
    assert!((cc.lower - (30.0 + sd * bisect_quantile(0.95))).abs() < 1e-8);
    assert!((cc.upper - (120.0 + sd * bisect_quantile(0.05))).abs() < 1e-8);
}

#[test]
fn quantile_round_trip_in_the_upper_tail() {
    // Between 3 and 6 the input phi(z) carries an absolute rounding error of
    // half an ulp near 1, which moves the exact quantile by ulp / pdf(z).
    let mut z: f64 = 3.0;
    while z <= 6.0 {
        let u = normal_cdf(z).value();
        let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let conditioning = f64::EPSILON / pdf;
        let back = normal_quantile(u).unwrap();
        assert!((back - z).abs() < 1e-9 + conditioning, "z={z}: {back}");
        z += 0.01;
    }
}

#[test]
fn exact_and_approximate_constants_agree_for_wide_margins() {
    let samp = NormalSampling::new(1.0, 100).unwrap();
    let margin = EquivalenceMargin::new(-3.0, 3.0).unwrap();
    let t = Probability::new(0.5).unwrap();
    let a = normal_critical_constants(&samp, &margin, t, ConstantsMode::Approximate).unwrap();
    let e = normal_critical_constants(&samp, &margin, t, ConstantsMode::ExactSymmetric).unwrap();
    assert!(((a.lower - e.lower) / a.lower).abs() < 1e-6);
    assert!(((a.upper - e.upper) / a.upper).abs() < 1e-6);
}

#[test]
fn tost_pvalue_against_monte_carlo() {
    let samp = NormalSampling::new(2.0, 30).unwrap();
    let margin = EquivalenceMargin::new(1.0, 4.0).unwrap();
    let xbar = 1.0;
    let p = normal_tost_pvalue(&samp, xbar, &margin).value();
    let sd = 2.0 / 30f64.sqrt();
    let t_obs = ((xbar - 2.5) / sd).abs();
    let draws = 1_000_000;
    let mut rng = stream(2024, 0, 0);
    let hits = (0..draws)
        .filter(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (((1.0 + sd * z) - 2.5) / sd).abs() <= t_obs
        })
        .count();
    let est = hits as f64 / draws as f64;
    let se = (est * (1.0 - est) / draws as f64).sqrt();
    assert!((est - p).abs() <= 3.0 * se, "formula {p}, MC {est} +/- {se}");
}

#[test]
fn tost_pvalue_matches_abs_t_form_above_center() {
    let samp = NormalSampling::new(1.3, 25).unwrap();
    let margin = EquivalenceMargin::new(-0.4, 0.9).unwrap();
    let z = |x: f64, th: f64| 5.0 * (x - th) / 1.3;
    for i in 0..200 {
        let xbar = margin.center() + i as f64 * 0.01;
        let want = normal_cdf(z(xbar, -0.4)).value() + normal_cdf(z(xbar, 0.9)).value() - 1.0;
        let got = normal_tost_pvalue(&samp, xbar, &margin).value();
        assert!((got - want).abs() < 1e-12, "xbar={xbar}");
    }
}

#[test]
fn expected_phi_squared_is_one_third() {
    use equivtest::correlation::expected_phi_product;
    use equivtest::rng::map_blocks;
    let draws = 10_000_000;
    let sums = map_blocks(77, 0, draws, |rng, len| {
        let mut s = (0.0, 0.0);
        for _ in 0..len {
            let z: f64 = rng.sample(StandardNormal);
            let v = normal_cdf(z).value().powi(2);
            s.0 += v;
            s.1 += v * v;
        }
        s
    });
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = s1 / draws as f64;
    let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
    let closed = expected_phi_product(1.0, 1.0);
    assert!((closed - 1.0 / 3.0).abs() < 1e-15);
    assert!((mean - closed).abs() <= 3.0 * se, "{mean} vs {closed} (se {se})");
}

#[test]
fn adaptive_k0_on_uniform_pvalues() {
    let k = 1000;
    let mut rng = stream(5, 0, 0);
    let p: Vec<Probability> = (0..k).map(|_| Probability::new(rng.random::<f64>()).unwrap()).collect();
    let half = Probability::new(0.5).unwrap();
    let out = adaptive_bh(&p, Probability::new(0.05).unwrap(), half).unwrap();
    // #{p > 1/2} ~ Bin(k, 1/2), so k0_hat = 2(1 + count) has sd sqrt(k).
    assert!(
        (out.k0_hat - k as f64).abs() <= 3.0 * (k as f64).sqrt() + 2.0,
        "{}",
        out.k0_hat
    );
}

#[test]
fn adaptive_fdr_under_global_null() {
    let exp = FdrExperiment {
        k: 200,
        k1_grid: vec![0],
        n: 20,
        margin: EquivalenceMargin::new(0.0, 2.0).unwrap(),
        sigma: 1.0,
        tau: 0.5,
        epsilon_star: 0.5,
        alpha: Probability::new(0.05).unwrap(),
        reps: 1000,
        seed: 8,
        evidence: Evidence::Frequentist,
        sampling: SamplingMode::MeanScaled,
        combination: FrequentistCombination::Max,
        procedure: Procedure::Adaptive {
            lambda: Probability::new(0.5).unwrap(),
        },
    };
    let out = fdr_power_simulation(&exp).unwrap();
    assert!(out[0].mean_fdr <= 0.05 + 3.0 * out[0].se_fdr, "{:?}", out[0]);
}
