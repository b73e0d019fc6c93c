use std::collections::BTreeMap;

use equivtest::binomial_bayes::BetaPrior;
use equivtest::correlation::{
    corr_equivalence_closed, corr_equivalence_mc, corr_partial_pvalues, corr_two_sided, corr_two_sided_mc,
    two_sided_weight, CorrelationMethod, CorrelationResult,
};
use equivtest::equivalence::{EquivalenceMargin, SignificanceLevels};
use equivtest::fdr::{
    default_k1_grid, fdr_power_simulation, Evidence, FdrExperiment, FrequentistCombination, Procedure, SamplingMode,
    DEFAULT_EPSILON_STAR,
};
use equivtest::normal::{NormalPrior, NormalSampling};
use equivtest::power::{
    binom_cdf_curve, binom_power_curve, normal_curves, table_simulation, theta_max, CurveSpec, Model, Prior,
    NORMAL_CURVE_REPS,
};
use equivtest::Probability;

use crate::args::*;
use crate::table::{format_float, Cell, Table};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

/// Resolved settings; hashed into the manifest digest.
pub type Resolved = BTreeMap<&'static str, String>;

pub struct CommandOutput {
    pub table: Table,
    pub resolved: Resolved,
    pub seed: u64,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_f64(what: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| config_err(format!("{what}: `{s}` is not a number")))
}

pub fn parse_pair(what: &str, s: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((parse_f64(what, a)?, parse_f64(what, b)?)),
        _ => Err(config_err(format!(
            "{what}: expected two comma-separated numbers, got `{s}`"
        ))),
    }
}

pub fn parse_list(what: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|p| parse_f64(what, p)).collect()
}

/// `start:stop:step` (inclusive, values rounded to 12 significant digits) or a comma list.
pub fn parse_grid(what: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(what, start)?, parse_f64(what, stop)?, parse_f64(what, step)?);
            if !(step > 0.0) || stop < start {
                return Err(config_err(format!("{what}: need start <= stop and step > 0 in `{s}`")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(config_err(format!("{what}: grid `{s}` is too large")));
            }
            Ok((0..count)
                .map(|i| {
                    let x = start + i as f64 * step;
                    format_float(x).parse().unwrap_or(x)
                })
                .collect())
        }
        [_] => parse_list(what, s),
        _ => Err(config_err(format!(
            "{what}: expected start:stop:step or a list, got `{s}`"
        ))),
    }
}

fn margin_from(s: &str) -> Result<EquivalenceMargin, CliError> {
    let (a, b) = parse_pair("--margin", s)?;
    EquivalenceMargin::new(a, b).map_err(CliError::from)
}

fn beta_from(s: &str) -> Result<BetaPrior, CliError> {
    let (p, q) = parse_pair("--prior-beta", s)?;
    BetaPrior::new(p, q).map_err(CliError::from)
}

fn probability(what: &str, v: f64) -> Result<Probability, CliError> {
    Probability::new(v).map_err(|_| config_err(format!("{what} must lie in [0, 1], got {v}")))
}

fn levels_from(args: &LevelArgs, resolved: &mut Resolved) -> Result<SignificanceLevels, CliError> {
    let alpha = args.alpha.unwrap_or(0.05);
    let upper = args.alpha_upper.unwrap_or(alpha);
    let lower = args.alpha_lower.unwrap_or(alpha);
    resolved.insert("alpha_upper", format_float(upper));
    resolved.insert("alpha_lower", format_float(lower));
    SignificanceLevels::new(upper, lower).map_err(CliError::from)
}

struct ModelDefaults {
    n: u64,
    margin: &'static str,
    prior_beta: &'static str,
}

fn binomial_spec(
    m: &ModelArgs,
    defaults: ModelDefaults,
    resolved: &mut Resolved,
) -> Result<(u64, EquivalenceMargin, BetaPrior), CliError> {
    if m.model == Some(ModelArg::Normal) {
        return Err(config_err("this subcommand supports only --model binomial"));
    }
    if m.prior_tau.is_some() || m.sigma.is_some() {
        return Err(config_err("--prior-tau and --sigma apply to the normal model only"));
    }
    let n = m.n.unwrap_or(defaults.n);
    let margin_s = m.margin.as_deref().unwrap_or(defaults.margin);
    let prior_s = m.prior_beta.as_deref().unwrap_or(defaults.prior_beta);
    let margin = margin_from(margin_s)?;
    margin.check_unit_interval()?;
    let prior = beta_from(prior_s)?;
    resolved.insert("model", "binomial".into());
    resolved.insert("n", n.to_string());
    resolved.insert(
        "margin",
        format!("{},{}", format_float(margin.theta1()), format_float(margin.theta2())),
    );
    resolved.insert(
        "prior_beta",
        format!("{},{}", format_float(prior.p()), format_float(prior.q())),
    );
    Ok((n, margin, prior))
}

fn grid_from(arg: Option<&str>, default: &str, resolved: &mut Resolved) -> Result<Vec<f64>, CliError> {
    let s = arg.unwrap_or(default);
    resolved.insert("grid", s.to_string());
    parse_grid("--grid", s)
}

fn prob_value(p: Probability) -> Cell {
    Cell::float(p.value())
}

pub fn conservativity(a: &ConservativityArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let model = a.model.model.unwrap_or(ModelArg::Binomial);
    let mut table = Table::new(&["t", "cdf_pvalue", "cdf_posterior"]);
    match model {
        ModelArg::Binomial => {
            let (n, margin, prior) = binomial_spec(
                &a.model,
                ModelDefaults {
                    n: 50,
                    margin: "0.25,0.75",
                    prior_beta: "0.5,0.5",
                },
                &mut resolved,
            )?;
            let theta = a.theta.unwrap_or(margin.theta1());
            resolved.insert("theta", format_float(theta));
            let grid = grid_from(a.grid.as_deref(), "0.01:0.99:0.01", &mut resolved)?;
            let spec = CurveSpec {
                model: Model::Binomial,
                n,
                margin,
                prior: Some(Prior::Beta(prior)),
                levels: SignificanceLevels::equal(0.05)?,
                grid,
                theta_true: theta,
            };
            for p in binom_cdf_curve(&spec)? {
                table.push(vec![
                    p.x.into(),
                    prob_value(p.y_frequentist),
                    Cell::opt(p.y_bayes.map(|v| v.value())),
                ]);
            }
        }
        ModelArg::Normal => {
            if a.model.prior_beta.is_some() {
                return Err(config_err("--prior-beta applies to the binomial model only"));
            }
            let n = a.model.n.unwrap_or(30);
            let margin = margin_from(a.model.margin.as_deref().unwrap_or("1,4"))?;
            let sigma = a.model.sigma.unwrap_or(2.0);
            let tau = a.model.prior_tau.unwrap_or(1.0);
            let theta = a.theta.unwrap_or(margin.theta1());
            let reps = g.reps.unwrap_or(NORMAL_CURVE_REPS);
            resolved.insert("model", "normal".into());
            resolved.insert("n", n.to_string());
            resolved.insert(
                "margin",
                format!("{},{}", format_float(margin.theta1()), format_float(margin.theta2())),
            );
            resolved.insert("sigma", format_float(sigma));
            resolved.insert("prior_tau", format_float(tau));
            resolved.insert("theta", format_float(theta));
            resolved.insert("reps", reps.to_string());
            resolved.insert("seed", seed.to_string());
            let grid = grid_from(a.grid.as_deref(), "0.01:0.99:0.01", &mut resolved)?;
            let spec = CurveSpec {
                model: Model::Normal { sigma },
                n,
                margin,
                prior: Some(Prior::Normal(NormalPrior::new(tau)?)),
                levels: SignificanceLevels::equal(0.05)?,
                grid,
                theta_true: theta,
            };
            for p in normal_curves(&spec, reps, seed)? {
                table.push(vec![
                    p.x.into(),
                    prob_value(p.y_frequentist),
                    Cell::opt(p.y_bayes.map(|v| v.value())),
                ]);
            }
        }
    }
    Ok(CommandOutput { table, resolved, seed })
}

pub fn power_curve(a: &PowerCurveArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let (n, margin, prior) = binomial_spec(
        &a.model,
        ModelDefaults {
            n: 10,
            margin: "0.2,0.8",
            prior_beta: "0.5,0.5",
        },
        &mut resolved,
    )?;
    let levels = levels_from(&a.levels, &mut resolved)?;
    let grid = grid_from(a.grid.as_deref(), "0.01:0.99:0.01", &mut resolved)?;
    let spec = CurveSpec {
        model: Model::Binomial,
        n,
        margin,
        prior: Some(Prior::Beta(prior)),
        levels,
        grid,
        theta_true: 0.5,
    };
    let mut table = Table::new(&["theta", "power_pvalue", "power_posterior"]);
    for p in binom_power_curve(&spec)? {
        table.push(vec![
            p.x.into(),
            prob_value(p.y_frequentist),
            Cell::opt(p.y_bayes.map(|v| v.value())),
        ]);
    }
    Ok(CommandOutput {
        table,
        resolved,
        seed: g.seed.unwrap_or(DEFAULT_SEED),
    })
}

pub fn theta_max_cmd(a: &ThetaMaxArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let (n, margin, prior) = binomial_spec(
        &a.model,
        ModelDefaults {
            n: 10,
            margin: "0.2,0.8",
            prior_beta: "0.5,0.5",
        },
        &mut resolved,
    )?;
    let levels = levels_from(&a.levels, &mut resolved)?;
    let resolution = a.resolution.unwrap_or(1e-3);
    resolved.insert("resolution", format_float(resolution));
    let spec = CurveSpec {
        model: Model::Binomial,
        n,
        margin,
        prior: Some(Prior::Beta(prior)),
        levels,
        grid: Vec::new(),
        theta_true: 0.5,
    };
    let tm = theta_max(&spec, resolution)?;
    let mut table = Table::new(&["theta_f", "power_f", "theta_b", "power_b"]);
    table.push(vec![
        tm.theta_f.into(),
        tm.power_f.into(),
        Cell::opt(tm.theta_b),
        Cell::opt(tm.power_b),
    ]);
    Ok(CommandOutput {
        table,
        resolved,
        seed: g.seed.unwrap_or(DEFAULT_SEED),
    })
}

pub fn noise_cdf(a: &NoiseCdfArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let n = a.n.unwrap_or(30);
    let margin = margin_from(a.margin.as_deref().unwrap_or("1,4"))?;
    let sigmas_s = a.sigmas.as_deref().unwrap_or("2,4");
    let thetas_s = a.thetas.as_deref().unwrap_or("0.5,1.5");
    let sigmas = parse_list("--sigmas", sigmas_s)?;
    let thetas = parse_list("--thetas", thetas_s)?;
    resolved.insert("n", n.to_string());
    resolved.insert(
        "margin",
        format!("{},{}", format_float(margin.theta1()), format_float(margin.theta2())),
    );
    resolved.insert("sigmas", sigmas_s.into());
    resolved.insert("thetas", thetas_s.into());
    let prior = a.prior_tau.map(NormalPrior::new).transpose()?;
    let reps = g.reps.unwrap_or(NORMAL_CURVE_REPS);
    if let Some(tau) = a.prior_tau {
        resolved.insert("prior_tau", format_float(tau));
        resolved.insert("reps", reps.to_string());
        resolved.insert("seed", seed.to_string());
    }
    let grid = grid_from(a.grid.as_deref(), "0.01:0.99:0.01", &mut resolved)?;
    let mut table = Table::new(&["sigma", "theta", "t", "cdf_pvalue", "cdf_posterior"]);
    for &sigma in &sigmas {
        for &theta in &thetas {
            let spec = CurveSpec {
                model: Model::Normal { sigma },
                n,
                margin,
                prior: prior.map(Prior::Normal),
                levels: SignificanceLevels::equal(0.05)?,
                grid: grid.clone(),
                theta_true: theta,
            };
            for p in normal_curves(&spec, reps, seed)? {
                table.push(vec![
                    sigma.into(),
                    theta.into(),
                    p.x.into(),
                    prob_value(p.y_frequentist),
                    Cell::opt(p.y_bayes.map(|v| v.value())),
                ]);
            }
        }
    }
    Ok(CommandOutput { table, resolved, seed })
}

fn method_name(m: CorrelationMethod) -> &'static str {
    match m {
        CorrelationMethod::ClosedForm => "closed_form",
        CorrelationMethod::MonteCarlo => "monte_carlo",
    }
}

fn corr_row(table: &mut Table, quantity: &str, r: &CorrelationResult) {
    table.push(vec![
        quantity.into(),
        r.rho.into(),
        method_name(r.method).into(),
        Cell::opt(r.std_error),
    ]);
}

pub fn correlation(a: &CorrelationArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let draws = g.reps.unwrap_or(1_000_000);
    let mut table = Table::new(&["quantity", "value", "method", "std_error"]);
    let samp =
        || -> Result<NormalSampling, CliError> { Ok(NormalSampling::new(a.sigma.unwrap_or(1.0), a.n.unwrap_or(20))?) };
    let record_model = |resolved: &mut Resolved| {
        resolved.insert("n", a.n.unwrap_or(20).to_string());
        resolved.insert("sigma", format_float(a.sigma.unwrap_or(1.0)));
    };
    if a.two_sided {
        resolved.insert("mode", "two_sided".into());
        if let Some(w) = a.w {
            resolved.insert("w", format_float(w));
            corr_row(&mut table, "rho_two_sided", &corr_two_sided(w)?);
        } else {
            record_model(&mut resolved);
            let tau = a.tau.unwrap_or(0.5);
            resolved.insert("tau", format_float(tau));
            resolved.insert("reps", draws.to_string());
            resolved.insert("seed", seed.to_string());
            let samp = samp()?;
            let prior = NormalPrior::new(tau)?;
            let w = two_sided_weight(&samp, &prior);
            table.push(vec!["w".into(), w.into(), "closed_form".into(), Cell::Empty]);
            corr_row(&mut table, "rho_two_sided", &corr_two_sided(w)?);
            corr_row(
                &mut table,
                "rho_two_sided",
                &corr_two_sided_mc(&samp, &prior, draws, seed)?,
            );
        }
    } else if a.partial {
        resolved.insert("mode", "partial".into());
        record_model(&mut resolved);
        let epsilon = match (a.epsilon, a.margin.as_deref()) {
            (Some(e), _) => e,
            (None, Some(m)) => margin_from(m)?.half_width(),
            (None, None) => 1.0,
        };
        resolved.insert("epsilon", format_float(epsilon));
        resolved.insert("reps", draws.to_string());
        resolved.insert("seed", seed.to_string());
        let r = corr_partial_pvalues(&samp()?, epsilon, draws, seed)?;
        corr_row(&mut table, "rho_partial_pvalues", &r);
    } else {
        resolved.insert("mode", "equivalence".into());
        record_model(&mut resolved);
        let tau = a.tau.unwrap_or(0.5);
        let margin = margin_from(a.margin.as_deref().unwrap_or("0,2"))?;
        resolved.insert("tau", format_float(tau));
        resolved.insert(
            "margin",
            format!("{},{}", format_float(margin.theta1()), format_float(margin.theta2())),
        );
        resolved.insert("reps", draws.to_string());
        resolved.insert("seed", seed.to_string());
        let samp = samp()?;
        let prior = NormalPrior::new(tau)?;
        let (closed, cov) = corr_equivalence_closed(&samp, &prior, &margin);
        for (i, term) in cov.terms.iter().enumerate() {
            let name = format!("covariance_term_{}", i + 1);
            table.push(vec![name.into(), (*term).into(), "closed_form".into(), Cell::Empty]);
        }
        table.push(vec![
            "covariance_total".into(),
            cov.total.into(),
            "closed_form".into(),
            Cell::Empty,
        ]);
        corr_row(&mut table, "rho_equivalence", &closed);
        corr_row(
            &mut table,
            "rho_equivalence",
            &corr_equivalence_mc(&samp, &prior, &margin, None, draws, seed)?,
        );
    }
    Ok(CommandOutput { table, resolved, seed })
}

pub fn fdr_power(a: &FdrPowerArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let k = a.k.unwrap_or(1000);
    let k1_grid: Vec<usize> = match a.k1_grid.as_deref() {
        Some(s) => parse_grid("--k1-grid", s)?
            .into_iter()
            .map(|x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    Err(config_err(format!("--k1-grid: {x} is not a count")))
                }
            })
            .collect::<Result<_, _>>()?,
        None => default_k1_grid(k),
    };
    let margin = margin_from(a.margin.as_deref().unwrap_or("0,1.5"))?;
    let lambda = a.lambda.unwrap_or(0.5);
    let procedure = match a.procedure.unwrap_or(ProcedureArg::Bh) {
        ProcedureArg::Bh => Procedure::Bh,
        ProcedureArg::Adaptive => Procedure::Adaptive {
            lambda: probability("--lambda", lambda)?,
        },
    };
    let sampling = match a.sampling.unwrap_or(SamplingArg::MeanScaled) {
        SamplingArg::MeanScaled => SamplingMode::MeanScaled,
        SamplingArg::Literal => SamplingMode::Literal,
    };
    let combination = match a.combination.unwrap_or(CombinationArg::Max) {
        CombinationArg::Max => FrequentistCombination::Max,
        CombinationArg::TailSum => FrequentistCombination::TailSum,
    };
    let evidence_arg = a.evidence.unwrap_or(EvidenceArg::Both);
    let mut exp = FdrExperiment {
        k,
        k1_grid: k1_grid.clone(),
        n: a.n.unwrap_or(100),
        margin,
        sigma: a.sigma.unwrap_or(1.0),
        tau: a.tau.unwrap_or(0.25),
        epsilon_star: a.epsilon_star.unwrap_or(DEFAULT_EPSILON_STAR),
        alpha: probability("--alpha", a.alpha.unwrap_or(0.05))?,
        reps: g.reps.unwrap_or(100),
        seed,
        evidence: Evidence::Frequentist,
        sampling,
        combination,
        procedure,
    };
    resolved.insert("k", k.to_string());
    resolved.insert(
        "k1_grid",
        k1_grid.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
    );
    resolved.insert("n", exp.n.to_string());
    resolved.insert(
        "margin",
        format!("{},{}", format_float(margin.theta1()), format_float(margin.theta2())),
    );
    resolved.insert("sigma", format_float(exp.sigma));
    resolved.insert("tau", format_float(exp.tau));
    resolved.insert("epsilon_star", format_float(exp.epsilon_star));
    resolved.insert("alpha", format_float(exp.alpha.value()));
    resolved.insert("reps", exp.reps.to_string());
    resolved.insert("seed", seed.to_string());
    resolved.insert("evidence", format!("{evidence_arg:?}").to_lowercase());
    resolved.insert("sampling", format!("{sampling:?}"));
    resolved.insert("combination", format!("{combination:?}"));
    resolved.insert("procedure", format!("{:?}", a.procedure.unwrap_or(ProcedureArg::Bh)));
    if matches!(procedure, Procedure::Adaptive { .. }) {
        resolved.insert("lambda", format_float(lambda));
    }

    let kinds: &[(Evidence, &str)] = match evidence_arg {
        EvidenceArg::Frequentist => &[(Evidence::Frequentist, "frequentist")],
        EvidenceArg::Bayesian => &[(Evidence::Bayesian, "bayesian")],
        EvidenceArg::Both => &[(Evidence::Frequentist, "frequentist"), (Evidence::Bayesian, "bayesian")],
    };
    let mut table = Table::new(&[
        "evidence",
        "k1",
        "mean_power",
        "mean_fdr",
        "se_power",
        "se_fdr",
        "mean_rejections",
    ]);
    for &(evidence, name) in kinds {
        exp.evidence = evidence;
        for p in fdr_power_simulation(&exp)? {
            table.push(vec![
                name.into(),
                p.k1.into(),
                p.mean_power.into(),
                p.mean_fdr.into(),
                p.se_power.into(),
                p.se_fdr.into(),
                p.mean_rejections.into(),
            ]);
        }
    }
    Ok(CommandOutput { table, resolved, seed })
}

fn parse_row(s: &str) -> Result<u64, CliError> {
    let v = s.strip_prefix("n=").unwrap_or(s);
    v.trim()
        .parse()
        .map_err(|_| config_err(format!("--row: expected `n=<size>`, got `{s}`")))
}

pub fn tables(a: &TablesArgs, g: &GlobalArgs) -> Result<CommandOutput, CliError> {
    let mut resolved = Resolved::new();
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let reps = g.reps.unwrap_or(10_000);
    let rows: Vec<u64> = if a.row.is_empty() {
        (20..=80).step_by(10).collect()
    } else {
        a.row.iter().map(|r| parse_row(r)).collect::<Result<_, _>>()?
    };
    let margins: Vec<EquivalenceMargin> = if a.margin.is_empty() {
        vec![EquivalenceMargin::new(0.25, 0.75)?]
    } else {
        a.margin.iter().map(|m| margin_from(m)).collect::<Result<_, _>>()?
    };
    let priors: Vec<BetaPrior> = if a.prior_beta.is_empty() {
        vec![
            BetaPrior::new(0.5, 0.5)?,
            BetaPrior::new(1.0, 1.0)?,
            BetaPrior::new(3.0, 3.0)?,
        ]
    } else {
        a.prior_beta.iter().map(|p| beta_from(p)).collect::<Result<_, _>>()?
    };
    let alpha = a.alpha.unwrap_or(0.05);
    let theta_alt = a.theta_alt.unwrap_or(0.4);
    resolved.insert("rows", rows.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
    resolved.insert(
        "margins",
        margins
            .iter()
            .map(|m| format!("{},{}", format_float(m.theta1()), format_float(m.theta2())))
            .collect::<Vec<_>>()
            .join(";"),
    );
    resolved.insert(
        "priors",
        priors
            .iter()
            .map(|p| format!("{},{}", format_float(p.p()), format_float(p.q())))
            .collect::<Vec<_>>()
            .join(";"),
    );
    resolved.insert("alpha", format_float(alpha));
    resolved.insert("theta_alt", format_float(theta_alt));
    resolved.insert("reps", reps.to_string());
    resolved.insert("seed", seed.to_string());

    let levels = SignificanceLevels::equal(alpha)?;
    let mut table = Table::new(&[
        "n",
        "theta1",
        "theta2",
        "measure",
        "type1_sim",
        "power_sim",
        "type1_exact",
        "power_exact",
        "type1_se",
        "power_se",
    ]);
    for &margin in &margins {
        for &n in &rows {
            let mut pvalue_done = false;
            for prior in &priors {
                let spec = CurveSpec {
                    model: Model::Binomial,
                    n,
                    margin,
                    prior: Some(Prior::Beta(*prior)),
                    levels,
                    grid: Vec::new(),
                    theta_true: theta_alt,
                };
                // Every measure sees the same seeded counts within a row.
                let sim = table_simulation(&spec, reps, seed)?;
                let mut push = |measure: String, t1: f64, pw: f64, e1: f64, ep: f64| {
                    table.push(vec![
                        n.into(),
                        margin.theta1().into(),
                        margin.theta2().into(),
                        measure.into(),
                        t1.into(),
                        pw.into(),
                        e1.into(),
                        ep.into(),
                        sim.standard_error(t1).into(),
                        sim.standard_error(pw).into(),
                    ]);
                };
                if !pvalue_done {
                    push(
                        "pvalue".into(),
                        sim.type1.frequentist,
                        sim.power.frequentist,
                        sim.exact_type1.frequentist,
                        sim.exact_power.frequentist,
                    );
                    pvalue_done = true;
                }
                let bayes = |r: equivtest::power::Rate| r.bayes.expect("prior supplied");
                push(
                    format!("beta_{}_{}", format_float(prior.p()), format_float(prior.q())),
                    bayes(sim.type1),
                    bayes(sim.power),
                    bayes(sim.exact_type1),
                    bayes(sim.exact_power),
                );
            }
        }
    }
    Ok(CommandOutput { table, resolved, seed })
}
