//! Subcommand implementations. Each returns a [`RunReport`] and an exit code,
//! or a [`CliError`] when no report can be produced.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use sosfit::estimation::{
    fit_exponential_known_alpha, fit_exponential_ptcphm, fit_weibull_known_alpha, fit_weibull_ptcphm, FitResult,
    ModelId, TrendDomain,
};
use sosfit::hypothesis::{mc_calibrate, GlrOptions, NullHypothesis, PValueRule, TestBaseline, TestSpec};
use sosfit::inference::{
    bonferroni_region, equi_tailed_intervals, observed_information_with, survival_interval, ParamPoint,
};
use sosfit::likelihood::InformationFormula;
use sosfit::sample::{parse_dataset, Dataset};
use sosfit::simulate::{run_study, StudyConfig};
use sosfit::{MultiplierScheme, Param, SosError, SosSample};

use crate::report::{Body, CiParams, FitParams, FitRow, InputDigest, RunReport, TestParams, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<SosError> for CliError {
    fn from(e: SosError) -> Self {
        let code = if is_input_like(&e) { EXIT_INPUT } else { EXIT_NUMERICAL };
        let mut message = e.to_string();
        if matches!(e, SosError::NotPositiveDefinite { .. } | SosError::Singular { .. }) {
            message.push_str(
                "; the estimate may sit on the edge of the parameter space or the sample may be too small \
                 for this model, try a model with fewer parameters",
            );
        }
        CliError { code, message }
    }
}

/// Input errors, plus models that the data cannot identify.
fn is_input_like(e: &SosError) -> bool {
    e.is_input_error() || matches!(e, SosError::Unidentifiable { .. })
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub report: RunReport,
    pub code: i32,
}

struct Input {
    dataset: Dataset,
    digest: InputDigest,
    warnings: Vec<String>,
}

fn load(path: &Path) -> CliResult<Input> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::input(format!("{} is not valid UTF-8 text", path.display())))?;
    let dataset = parse_dataset(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let s = &dataset.sample;
    let mut warnings = Vec::new();
    if !s.input_sorted() {
        warnings.push("failure times were not in increasing order and have been sorted".into());
    }
    if s.has_ties() {
        warnings.push("tied failure times are treated as distinct ordered values".into());
    }
    let digest = InputDigest {
        path: path.display().to_string(),
        n: s.n(),
        r: s.r(),
        sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
        n_from_header: dataset.n_from_header,
    };
    Ok(Input {
        dataset,
        digest,
        warnings,
    })
}

fn report(input: Input, body: Body) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        input: input.digest,
        warnings: input.warnings,
        body,
    }
}

fn fit_model(sample: &SosSample, model: ModelId, alpha: Option<&MultiplierScheme>, domain: TrendDomain) -> sosfit::Result<FitResult> {
    let iid = MultiplierScheme::iid();
    match model {
        ModelId::ExpIid | ModelId::ExpKnownAlpha => fit_exponential_known_alpha(sample, alpha.unwrap_or(&iid)),
        ModelId::WeibullIid | ModelId::WeibullKnownAlpha => fit_weibull_known_alpha(sample, alpha.unwrap_or(&iid)),
        ModelId::ExpPtcphm => fit_exponential_ptcphm(sample, domain),
        ModelId::WeibullPtcphm => fit_weibull_ptcphm(sample, domain),
    }
}

pub struct FitArgs {
    pub data: PathBuf,
    pub models: Vec<ModelId>,
    /// Known multipliers replacing `alpha_j = 1` in the iid models.
    pub alpha: Option<Vec<f64>>,
    pub a_domain: TrendDomain,
}

pub fn fit(args: &FitArgs) -> CliResult<Outcome> {
    let input = load(&args.data)?;
    let scheme = match &args.alpha {
        Some(a) => {
            let r = input.dataset.sample.r();
            if a.len() < r {
                return Err(CliError::input(format!("--alpha needs at least r={r} values, got {}", a.len())));
            }
            Some(MultiplierScheme::explicit(a.clone())?)
        }
        None => None,
    };
    let sample = &input.dataset.sample;
    let mut first_error = None;
    let rows: Vec<FitRow> = args
        .models
        .iter()
        .map(|&m| {
            let model = match (m, scheme.is_some()) {
                (ModelId::ExpIid, true) => ModelId::ExpKnownAlpha,
                (ModelId::WeibullIid, true) => ModelId::WeibullKnownAlpha,
                _ => m,
            };
            match fit_model(sample, model, scheme.as_ref(), args.a_domain) {
                Ok(f) => FitRow {
                    model,
                    fit: Some(f),
                    error: None,
                },
                Err(e) => {
                    let msg = e.to_string();
                    first_error.get_or_insert(e);
                    FitRow {
                        model,
                        fit: None,
                        error: Some(msg),
                    }
                }
            }
        })
        .collect();
    let failed = rows.iter().filter(|r| r.fit.is_none()).count();
    let code = match first_error {
        None => EXIT_OK,
        Some(e) if failed == rows.len() => CliError::from(e).code,
        Some(_) => EXIT_NUMERICAL,
    };
    let params = FitParams {
        models: rows.iter().map(|r| r.model).collect(),
        alpha: args.alpha.clone(),
        a_domain: args.a_domain,
    };
    Ok(Outcome {
        report: report(input, Body::Fit { params, rows }),
        code,
    })
}

pub struct CiArgs {
    pub data: PathBuf,
    pub model: ModelId,
    pub gamma: f64,
    pub simultaneous: bool,
    pub survival_at: Option<f64>,
    pub information: InformationFormula,
    pub at: Option<Vec<f64>>,
}

pub fn ci(args: &CiArgs) -> CliResult<Outcome> {
    check_gamma(args.gamma)?;
    if matches!(args.model, ModelId::ExpKnownAlpha | ModelId::WeibullKnownAlpha) {
        return Err(CliError::input("intervals are available for the iid and power-trend models"));
    }
    let input = load(&args.data)?;
    let sample = &input.dataset.sample;
    let mut fit = fit_model(sample, args.model, None, TrendDomain::Free)?;
    let free = args.model.free_params();
    if let Some(at) = &args.at {
        if at.len() != free.len() {
            let names: Vec<&str> = free.iter().map(|p| p.name()).collect();
            return Err(CliError::input(format!(
                "--at needs {} values ({}) for model {}",
                free.len(),
                names.join(","),
                crate::report::model_name(args.model)
            )));
        }
        for (p, v) in free.iter().zip(at) {
            if !(v.is_finite() && *v > 0.0) {
                return Err(CliError::input(format!("--at value for {p} must be positive, got {v}")));
            }
            match p {
                Param::Beta => fit.beta = *v,
                Param::Sigma => fit.sigma = *v,
                Param::A => fit.a = *v,
            }
        }
    }
    let point = ParamPoint {
        beta: fit.beta,
        sigma: fit.sigma,
        a: fit.a,
    };
    let information = observed_information_with(sample, point, free, args.information)?;
    let estimates = fit.estimates();
    let marginal = equi_tailed_intervals(&information, &estimates, args.gamma)?;
    let simultaneous = if args.simultaneous {
        Some(bonferroni_region(&information, &estimates, args.gamma)?)
    } else {
        None
    };
    let survival = match args.survival_at {
        Some(t0) => Some(survival_interval(&information, fit.beta, fit.sigma, t0, args.gamma)?),
        None => None,
    };
    let params = CiParams {
        model: args.model,
        gamma: args.gamma,
        simultaneous: args.simultaneous,
        survival_at: args.survival_at,
        information: args.information,
        at: args.at.clone(),
    };
    let body = Body::Ci {
        params,
        fit,
        information,
        marginal,
        simultaneous,
        survival,
    };
    Ok(Outcome {
        report: report(input, body),
        code: EXIT_OK,
    })
}

pub struct TestArgs {
    pub data: PathBuf,
    pub params: TestParams,
}

pub fn test(args: &TestArgs) -> CliResult<Outcome> {
    let p = &args.params;
    check_gamma(p.gamma)?;
    if p.rule == PValueRule::BoundaryMixture && (p.null != NullHypothesis::TrendOne || p.a_domain != TrendDomain::AtLeastOne) {
        return Err(CliError::input("--boundary-mixture applies only to the test of a=1 with --a-domain ge1"));
    }
    if p.null == NullHypothesis::ShapeOne && p.baseline == TestBaseline::Exponential {
        return Err(CliError::input("the test of beta=1 compares Weibull with exponential; drop --baseline"));
    }
    let input = load(&args.data)?;
    let sample = &input.dataset.sample;
    let spec = match p.null {
        NullHypothesis::TrendOne => TestSpec::Trend {
            baseline: p.baseline,
            opts: GlrOptions {
                gamma: p.gamma,
                domain: p.a_domain,
                rule: p.rule,
            },
        },
        NullHypothesis::ShapeOne => TestSpec::Shape {
            gamma: p.gamma,
            within: p.within,
        },
    };
    let result = spec.run(sample)?;
    let mc = match p.mc {
        Some(reps) => Some(mc_calibrate(sample, &spec, &result, reps, p.seed)?),
        None => None,
    };
    let body = Body::Test {
        params: p.clone(),
        result,
        mc,
    };
    Ok(Outcome {
        report: report(input, body),
        code: EXIT_OK,
    })
}

/// Run a study; returns the CSV and the path it should go to, if any.
/// A relative output path is taken relative to the config file.
pub fn simulate(config: &Path) -> CliResult<(String, Option<PathBuf>, String)> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", config.display())))?;
    let cfg = StudyConfig::from_toml(&text).map_err(|e| CliError::input(format!("{}: {e}", config.display())))?;
    let study = run_study(&cfg)?;
    let csv = study.to_csv()?;
    let out = cfg.output.as_ref().map(|o| {
        if o.is_relative() {
            config.parent().unwrap_or(Path::new(".")).join(o)
        } else {
            o.clone()
        }
    });
    Ok((csv, out, sosfit::simulate::render_study(&study)))
}

fn check_gamma(gamma: f64) -> CliResult<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(CliError::input(format!("--gamma must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}
