use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "equivtest",
    version,
    about = "Evidence measures for equivalence tests: curves, tables and simulations",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[command(next_help_heading = "Global options")]
pub struct GlobalArgs {
    /// Seed for every Monte Carlo stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo replications (meaning depends on the subcommand).
    #[arg(long, global = true)]
    pub reps: Option<usize>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Output file; a `<out>.manifest.json` sidecar is written next to it.
    /// Without it the records go to stdout and no manifest is written.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file with default flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Binomial,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvidenceArg {
    Frequentist,
    Bayesian,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    MeanScaled,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombinationArg {
    Max,
    TailSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcedureArg {
    Bh,
    Adaptive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Null CDF of the p-value and the posterior probability over levels t.
    Conservativity(ConservativityArgs),
    /// Rejection probability over a grid of true parameters.
    PowerCurve(PowerCurveArgs),
    /// Parameter value maximizing power for each measure.
    ThetaMax(ThetaMaxArgs),
    /// Normal-model p-value CDF for several noise levels.
    NoiseCdf(NoiseCdfArgs),
    /// Correlation between evidence measures in the normal model.
    Correlation(CorrelationArgs),
    /// FDR-controlled power over the number of false nulls.
    FdrPower(FdrPowerArgs),
    /// Simulated and exact type I error and power for binomial designs.
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,

    /// Sample size.
    #[arg(long)]
    pub n: Option<u64>,

    /// Equivalence margin as `theta1,theta2`.
    #[arg(long)]
    pub margin: Option<String>,

    /// Beta prior `p,q` (binomial model).
    #[arg(long)]
    pub prior_beta: Option<String>,

    /// Prior standard deviation (normal model).
    #[arg(long)]
    pub prior_tau: Option<f64>,

    /// Known data standard deviation (normal model).
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    /// Level for both one-sided tests.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Level for the upper-tailed test; overrides --alpha for that tail.
    #[arg(long)]
    pub alpha_upper: Option<f64>,

    /// Level for the lower-tailed test; overrides --alpha for that tail.
    #[arg(long)]
    pub alpha_lower: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConservativityArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// True parameter; defaults to the lower margin.
    #[arg(long)]
    pub theta: Option<f64>,

    /// Level grid as `start:stop:step` or a comma list.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct PowerCurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub levels: LevelArgs,

    /// Parameter grid as `start:stop:step` or a comma list.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct ThetaMaxArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub levels: LevelArgs,

    #[arg(long)]
    pub resolution: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NoiseCdfArgs {
    #[arg(long)]
    pub n: Option<u64>,

    #[arg(long)]
    pub margin: Option<String>,

    /// Noise levels, comma separated.
    #[arg(long)]
    pub sigmas: Option<String>,

    /// True parameters, comma separated.
    #[arg(long)]
    pub thetas: Option<String>,

    /// Adds the Monte Carlo posterior CDF under this prior.
    #[arg(long)]
    pub prior_tau: Option<f64>,

    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorrelationArgs {
    /// Two-sided problem, closed form in `w`.
    #[arg(long, conflicts_with = "partial")]
    pub two_sided: bool,

    /// Correlation between the two one-sided p-values.
    #[arg(long)]
    pub partial: bool,

    /// `n tau^2 / (sigma^2 + n tau^2)` for --two-sided.
    #[arg(long)]
    pub w: Option<f64>,

    #[arg(long)]
    pub n: Option<u64>,

    #[arg(long)]
    pub sigma: Option<f64>,

    #[arg(long)]
    pub tau: Option<f64>,

    #[arg(long)]
    pub margin: Option<String>,

    /// Half-width of the margin for --partial.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FdrPowerArgs {
    /// Number of hypotheses.
    #[arg(long)]
    pub k: Option<usize>,

    /// Numbers of false nulls, `start:stop:step` or a comma list.
    #[arg(long)]
    pub k1_grid: Option<String>,

    #[arg(long)]
    pub n: Option<u64>,

    #[arg(long)]
    pub margin: Option<String>,

    #[arg(long)]
    pub sigma: Option<f64>,

    #[arg(long)]
    pub tau: Option<f64>,

    #[arg(long)]
    pub epsilon_star: Option<f64>,

    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long, value_enum)]
    pub evidence: Option<EvidenceArg>,

    #[arg(long, value_enum)]
    pub sampling: Option<SamplingArg>,

    #[arg(long, value_enum)]
    pub combination: Option<CombinationArg>,

    #[arg(long, value_enum)]
    pub procedure: Option<ProcedureArg>,

    /// Threshold of the adaptive null-count estimate.
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Row selector `n=<size>`; repeatable.
    #[arg(long)]
    pub row: Vec<String>,

    /// Margin `theta1,theta2`; repeatable.
    #[arg(long)]
    pub margin: Vec<String>,

    /// Beta prior `p,q`; repeatable.
    #[arg(long)]
    pub prior_beta: Vec<String>,

    #[arg(long)]
    pub alpha: Option<f64>,

    /// True parameter for the power column.
    #[arg(long)]
    pub theta_alt: Option<f64>,
}
