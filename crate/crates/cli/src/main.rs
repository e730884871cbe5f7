use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sosfit::estimation::{ModelId, TrendDomain};
use sosfit::hypothesis::{NullHypothesis, PValueRule, ShapeTestWithin, TestBaseline};
use sosfit::likelihood::InformationFormula;
use sosfit_cli::commands::{self, CiArgs, CliError, CliResult, FitArgs, Outcome, TestArgs, EXIT_INPUT};
use sosfit_cli::report::{render, TestParams};

/// Fit lifetime models to sequential order statistics.
///
/// Datasets are plain text with one failure time per line, `#` comments and an
/// optional `# n=<int>` header giving the number of units on test. Without the
/// header the sample is taken as complete. Set SOSFIT_THREADS to fix the number
/// of worker threads used by Monte Carlo runs.
#[derive(Parser)]
#[command(name = "sosfit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit and compare models by log-likelihood and AIC.
    Fit {
        data: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        model: ModelArg,
        /// Known multipliers alpha_1,..,alpha_r used instead of alpha_j = 1 in
        /// the iid models.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        /// Domain of the trend parameter in the power-trend fits.
        #[arg(long, value_enum, default_value = "free")]
        a_domain: DomainArg,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Observed-information confidence intervals.
    Ci {
        data: PathBuf,
        #[arg(long, value_enum, default_value = "weibull-ptcphm")]
        model: SingleModelArg,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Add the Bonferroni simultaneous region.
        #[arg(long)]
        simultaneous: bool,
        /// Delta-method interval for the survival function at this time.
        #[arg(long)]
        survival_at: Option<f64>,
        #[arg(long, value_enum, default_value = "exact")]
        information: InformationArg,
        /// Evaluate at these parameter values (the model's free parameters in
        /// beta,sigma,a order) instead of the fitted estimate.
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Likelihood-ratio test of a=1 or beta=1.
    Test {
        data: PathBuf,
        #[arg(long, value_enum)]
        null: NullArg,
        #[arg(long, value_enum)]
        baseline: Option<BaselineArg>,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Alternative for a=1: ge1 tests against a > 1.
        #[arg(long, value_enum, default_value = "ge1")]
        a_domain: DomainArg,
        /// Use the 0.5 chi2_0 + 0.5 chi2_1 limit for the one-sided test.
        #[arg(long)]
        boundary_mixture: bool,
        /// Trend assumed in both models of the beta=1 test.
        #[arg(long, value_enum, default_value = "iid")]
        within: WithinArg,
        /// Monte Carlo replicates under the fitted null model.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo study described by a TOML config and write CSV.
    Simulate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    ExpIid,
    ExpPtcphm,
    WeibullIid,
    WeibullPtcphm,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SingleModelArg {
    ExpIid,
    ExpPtcphm,
    WeibullIid,
    WeibullPtcphm,
}

impl SingleModelArg {
    fn id(self) -> ModelId {
        match self {
            SingleModelArg::ExpIid => ModelId::ExpIid,
            SingleModelArg::ExpPtcphm => ModelId::ExpPtcphm,
            SingleModelArg::WeibullIid => ModelId::WeibullIid,
            SingleModelArg::WeibullPtcphm => ModelId::WeibullPtcphm,
        }
    }
}

impl ModelArg {
    fn ids(self) -> Vec<ModelId> {
        match self {
            ModelArg::ExpIid => vec![ModelId::ExpIid],
            ModelArg::ExpPtcphm => vec![ModelId::ExpPtcphm],
            ModelArg::WeibullIid => vec![ModelId::WeibullIid],
            ModelArg::WeibullPtcphm => vec![ModelId::WeibullPtcphm],
            ModelArg::All => vec![ModelId::ExpIid, ModelId::ExpPtcphm, ModelId::WeibullIid, ModelId::WeibullPtcphm],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Free,
    Ge1,
}

impl From<DomainArg> for TrendDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Free => TrendDomain::Free,
            DomainArg::Ge1 => TrendDomain::AtLeastOne,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InformationArg {
    Exact,
    /// Alternative closed forms with an extra ln x factor in the sigma-a cross term.
    Printed,
}

#[derive(Clone, Copy, ValueEnum)]
enum NullArg {
    #[value(name = "a=1")]
    TrendOne,
    #[value(name = "beta=1")]
    ShapeOne,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Weibull,
    Exponential,
}

#[derive(Clone, Copy, ValueEnum)]
enum WithinArg {
    Iid,
    Free,
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("SOSFIT_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::input(format!("SOSFIT_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::input(format!("cannot set up {threads} threads: {e}")))
}

fn emit(outcome: Outcome, out: Option<PathBuf>) -> CliResult<i32> {
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&outcome.report).expect("report serialises");
        std::fs::write(&path, json + "\n")
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{}", render(&outcome.report));
    Ok(outcome.code)
}

fn run(cli: Cli) -> CliResult<i32> {
    configure_threads()?;
    match cli.command {
        Command::Fit {
            data,
            model,
            alpha,
            a_domain,
            out,
        } => {
            let args = FitArgs {
                data,
                models: model.ids(),
                alpha,
                a_domain: a_domain.into(),
            };
            emit(commands::fit(&args)?, out)
        }
        Command::Ci {
            data,
            model,
            gamma,
            simultaneous,
            survival_at,
            information,
            at,
            out,
        } => {
            let args = CiArgs {
                data,
                model: model.id(),
                gamma,
                simultaneous,
                survival_at,
                information: match information {
                    InformationArg::Exact => InformationFormula::Exact,
                    InformationArg::Printed => InformationFormula::AsPrinted,
                },
                at,
            };
            emit(commands::ci(&args)?, out)
        }
        Command::Test {
            data,
            null,
            baseline,
            gamma,
            a_domain,
            boundary_mixture,
            within,
            mc,
            seed,
            out,
        } => {
            let params = TestParams {
                null: match null {
                    NullArg::TrendOne => NullHypothesis::TrendOne,
                    NullArg::ShapeOne => NullHypothesis::ShapeOne,
                },
                baseline: match baseline {
                    Some(BaselineArg::Exponential) => TestBaseline::Exponential,
                    Some(BaselineArg::Weibull) | None => TestBaseline::Weibull,
                },
                gamma,
                a_domain: a_domain.into(),
                rule: if boundary_mixture {
                    PValueRule::BoundaryMixture
                } else {
                    PValueRule::ChiSquare
                },
                within: match within {
                    WithinArg::Iid => ShapeTestWithin::IidTrend,
                    WithinArg::Free => ShapeTestWithin::FreeTrend,
                },
                mc,
                seed,
            };
            if params.null == NullHypothesis::ShapeOne && baseline.is_some() {
                return Err(CliError::input("--baseline applies only to the test of a=1"));
            }
            emit(commands::test(&TestArgs { data, params })?, out)
        }
        Command::Simulate { config } => {
            let (csv, out, summary) = commands::simulate(&config)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, csv)
                        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
                    print!("{summary}");
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(if e.code == 0 { EXIT_INPUT } else { e.code } as u8)
        }
    }
}
