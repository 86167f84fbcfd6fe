use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mitest_core::sim::{Coupling, Marginal};
use mitest_core::{BinRule, PValueMethod, Statistic, Strategy};

#[derive(Parser, Debug)]
#[command(name = "mitest", version, about = "Mutual-information tests of independence for contingency tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test independence of the two variables in a counts table or pairs file.
    Test(TestArgs),
    /// Print the weights of the limiting null law for a table.
    Weights(WeightsArgs),
    /// Simulate statistic replicates under independent marginals.
    Simulate(SimulateArgs),
    /// Estimate the rejection rate of a test by simulation.
    Power(PowerArgs),
    /// Discretize a pairs file into a counts table.
    Bin(BinArgs),
    /// Check T2 against Pearson's chi-square on random tables.
    VerifyConjecture(VerifyArgs),
    /// Evaluate MI along the one-parameter 2x2 family and the 2x2 simplex.
    Curve(CurveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random step (required by Monte Carlo methods and simulations).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report (default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// CSV report.
    #[arg(long)]
    pub csv: bool,
    /// Fill `timing_ms` with the wall-clock time (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Counts,
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    T1,
    T2,
    Pearson,
    G2,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::T1 => Statistic::T1,
            StatArg::T2 => Statistic::T2,
            StatArg::Pearson => Statistic::Pearson,
            StatArg::G2 => Statistic::G2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Mc,
    Classical,
}

impl MethodArg {
    pub fn resolve(self, draws: usize) -> PValueMethod {
        match self {
            MethodArg::Series => PValueMethod::Series,
            MethodArg::Mc => PValueMethod::MonteCarlo { draws },
            MethodArg::Classical => PValueMethod::ClassicalDof,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Width,
    Freq,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Width => Strategy::EqualWidth,
            StrategyArg::Freq => Strategy::EqualFrequency,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Counts CSV (one table row per line) or pairs CSV (x,y per line).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "counts")]
    pub format: InputFormat,
    /// Pairs file starts with a header line (auto-detected otherwise).
    #[arg(long)]
    pub header: bool,
    /// Bin-count rule for pairs input: sqrt, rice or fixed:KX:KY.
    #[arg(long, default_value = "rice", value_parser = parse_rule)]
    pub rule: BinRule,
    #[arg(long, value_enum, default_value = "freq")]
    pub strategy: StrategyArg,
}

#[derive(Args, Debug, Clone)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "t1")]
    pub stat: StatArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long = "pvalue", value_enum, default_value = "series")]
    pub pvalue: MethodArg,
    #[arg(long, default_value_t = 200_000)]
    pub mc_draws: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightsAt {
    /// Product of the sample marginals.
    Product,
    /// The empirical table itself (every cell must be positive).
    Empirical,
}

#[derive(Args, Debug, Clone)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "product")]
    pub at: WeightsAt,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    /// Marginal of X: uniform:K or binom:M:Q.
    #[arg(long, value_parser = parse_marginal)]
    pub dist_x: Marginal,
    #[arg(long, value_parser = parse_marginal)]
    pub dist_y: Marginal,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "t1")]
    pub stat: StatArg,
    /// independent or checkerboard:S with S in [0, 1].
    #[arg(long, default_value = "independent", value_parser = parse_coupling)]
    pub coupling: Coupling,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Histogram bins in the report.
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct PowerArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long = "pvalue", value_enum, default_value = "series")]
    pub pvalue: MethodArg,
    #[arg(long, default_value_t = 200_000)]
    pub mc_draws: usize,
    /// Evaluate null weights at the true marginals instead of the plug-in ones.
    #[arg(long)]
    pub true_weights: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct BinArgs {
    /// Pairs CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value = "rice", value_parser = parse_rule)]
    pub rule: BinRule,
    #[arg(long, value_enum, default_value = "freq")]
    pub strategy: StrategyArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Table shape IxJ; every shape from 2x2 to 6x6 when omitted.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<(usize, usize)>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Grid points on p11 in [0, 0.5].
    #[arg(long, default_value_t = 51)]
    pub points: usize,
    /// Also sample the 2x2 simplex with this grid resolution.
    #[arg(long)]
    pub surface: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

fn parse_rule(s: &str) -> Result<BinRule, String> {
    match s {
        "sqrt" => Ok(BinRule::Sqrt),
        "rice" => Ok(BinRule::Rice),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            match parts.as_slice() {
                ["fixed", kx, ky] => {
                    let kx = kx.parse().map_err(|_| format!("bad KX in '{s}'"))?;
                    let ky = ky.parse().map_err(|_| format!("bad KY in '{s}'"))?;
                    Ok(BinRule::Fixed(kx, ky))
                }
                _ => Err(format!("expected sqrt, rice or fixed:KX:KY, got '{s}'")),
            }
        }
    }
}

fn parse_marginal(s: &str) -> Result<Marginal, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let m = match parts.as_slice() {
        ["uniform", k] => Marginal::Uniform(k.parse().map_err(|_| format!("bad K in '{s}'"))?),
        ["binom", m, q] => Marginal::Binomial(
            m.parse().map_err(|_| format!("bad M in '{s}'"))?,
            q.parse().map_err(|_| format!("bad Q in '{s}'"))?,
        ),
        _ => return Err(format!("expected uniform:K or binom:M:Q, got '{s}'")),
    };
    m.pmf().map_err(|e| e.to_string())?;
    Ok(m)
}

fn parse_coupling(s: &str) -> Result<Coupling, String> {
    if s == "independent" {
        return Ok(Coupling::Independent);
    }
    match s.split_once(':') {
        Some(("checkerboard", v)) => {
            let v: f64 = v.parse().map_err(|_| format!("bad strength in '{s}'"))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("checkerboard strength must lie in [0, 1], got {v}"));
            }
            Ok(Coupling::Checkerboard(v))
        }
        _ => Err(format!("expected independent or checkerboard:S, got '{s}'")),
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected IxJ, got '{s}'"))?;
    let i: usize = a.parse().map_err(|_| format!("bad I in '{s}'"))?;
    let j: usize = b.parse().map_err(|_| format!("bad J in '{s}'"))?;
    if i < 2 || j < 2 {
        return Err(format!("dimensions must be at least 2x2, got '{s}'"));
    }
    Ok((i, j))
}
