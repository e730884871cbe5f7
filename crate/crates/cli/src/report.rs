//! The structured run report and its text rendering.
//!
//! The text shown on stdout is produced by [`render`] from the report alone,
//! so a report parsed back from JSON renders to the same text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sosfit::estimation::{FitResult, ModelId, TrendDomain};
use sosfit::hypothesis::{GlrResult, McCalibration, NullHypothesis, PValueRule, ShapeTestWithin, TestBaseline};
use sosfit::inference::{ConfidenceReport, ObservedInformation, SurvivalInterval};
use sosfit::likelihood::InformationFormula;
use sosfit::Param;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub input: InputDigest,
    pub warnings: Vec<String>,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub n: usize,
    pub r: usize,
    /// Hex SHA-256 of the dataset file bytes.
    pub sha256: String,
    pub n_from_header: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Body {
    Fit {
        params: FitParams,
        rows: Vec<FitRow>,
    },
    Ci {
        params: CiParams,
        fit: FitResult,
        information: ObservedInformation,
        marginal: ConfidenceReport,
        simultaneous: Option<ConfidenceReport>,
        survival: Option<SurvivalInterval>,
    },
    Test {
        params: TestParams,
        result: GlrResult,
        mc: Option<McCalibration>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    pub models: Vec<ModelId>,
    pub alpha: Option<Vec<f64>>,
    pub a_domain: TrendDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub model: ModelId,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiParams {
    pub model: ModelId,
    pub gamma: f64,
    pub simultaneous: bool,
    pub survival_at: Option<f64>,
    pub information: InformationFormula,
    /// Point supplied with `--at`, in the model's free-parameter order.
    pub at: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    pub null: NullHypothesis,
    pub baseline: TestBaseline,
    pub gamma: f64,
    pub a_domain: TrendDomain,
    pub rule: PValueRule,
    pub within: ShapeTestWithin,
    pub mc: Option<usize>,
    pub seed: u64,
}

/// `x` with 6 significant digits.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may add a digit, e.g. 9.999999 -> 10.00000
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    if digits.trim_start_matches('0').len() > 6 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

/// [`sig`] without trailing zeros, for values the user typed in.
fn short(x: f64) -> String {
    let s = sig(x);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn param_label(p: Param) -> &'static str {
    p.name()
}

fn estimate_cell(fit: &FitResult, p: Param) -> String {
    if fit.free_params().contains(&p) {
        sig(fit.estimate(p))
    } else {
        "-".into()
    }
}

pub fn render(report: &RunReport) -> String {
    let mut out = String::new();
    let i = &report.input;
    let _ = writeln!(out, "sosfit {}  {}  (n={}, r={}, sha256 {})", report.tool_version, i.path, i.n, i.r, &i.sha256[..12.min(i.sha256.len())]);
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    match &report.body {
        Body::Fit { params, rows } => render_fit(&mut out, params, rows),
        Body::Ci {
            params,
            fit,
            information,
            marginal,
            simultaneous,
            survival,
        } => render_ci(&mut out, params, fit, information, marginal, simultaneous.as_ref(), survival.as_ref()),
        Body::Test { params, result, mc } => render_test(&mut out, params, result, mc.as_ref()),
    }
    out
}

fn render_fit(out: &mut String, params: &FitParams, rows: &[FitRow]) {
    let trend = rows.iter().any(|r| matches!(r.model, ModelId::ExpPtcphm | ModelId::WeibullPtcphm));
    if trend && params.a_domain == TrendDomain::AtLeastOne {
        let _ = writeln!(out, "trend restricted to a >= 1");
    }
    let _ = writeln!(
        out,
        "{:<16} {:<24} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "model", "restriction", "beta", "sigma", "a", "loglik", "AIC"
    );
    for row in rows {
        match (&row.fit, &row.error) {
            (Some(f), _) => {
                let mut line = format!(
                    "{:<16} {:<24} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    model_name(row.model),
                    row.model.label(),
                    estimate_cell(f, Param::Beta),
                    estimate_cell(f, Param::Sigma),
                    estimate_cell(f, Param::A),
                    sig(f.loglik),
                    sig(f.aic)
                );
                if f.boundary {
                    line.push_str("  (boundary a=1)");
                }
                let _ = writeln!(out, "{line}");
            }
            (None, err) => {
                let _ = writeln!(
                    out,
                    "{:<16} {:<24} FAILED: {}",
                    model_name(row.model),
                    row.model.label(),
                    err.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }
    let best = rows
        .iter()
        .filter_map(|r| r.fit.as_ref())
        .min_by(|a, b| a.aic.total_cmp(&b.aic));
    if let Some(b) = best {
        let _ = writeln!(out, "lowest AIC: {}", model_name(b.model));
    }
}

fn render_ci(
    out: &mut String,
    params: &CiParams,
    fit: &FitResult,
    info: &ObservedInformation,
    marginal: &ConfidenceReport,
    simultaneous: Option<&ConfidenceReport>,
    survival: Option<&SurvivalInterval>,
) {
    let source = if params.at.is_some() { "supplied point" } else { "maximum likelihood estimate" };
    let formula = match params.information {
        InformationFormula::Exact => "exact",
        InformationFormula::AsPrinted => "printed closed forms",
    };
    let _ = writeln!(out, "model {} at the {source}, information: {formula}", model_name(params.model));
    if params.at.is_none() {
        let _ = writeln!(out, "loglik {}", sig(fit.loglik));
    }
    let _ = writeln!(out, "inverse observed information:");
    let header: Vec<String> = info.params.iter().map(|p| format!("{:>12}", param_label(*p))).collect();
    let _ = writeln!(out, "{:<8}{}", "", header.join(" "));
    for (p, row) in info.params.iter().zip(&info.inverse) {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>12}", sig(*v))).collect();
        let _ = writeln!(out, "{:<8}{}", param_label(*p), cells.join(" "));
    }
    render_intervals(out, marginal, "marginal");
    if let Some(s) = simultaneous {
        render_intervals(out, s, "Bonferroni");
    }
    if let Some(s) = survival {
        let _ = writeln!(
            out,
            "S({}) = {}  se {}  {}% interval [{}, {}]{}",
            short(s.t0),
            sig(s.point),
            sig(s.std_error),
            short(100.0 * (1.0 - params.gamma)),
            sig(s.lo),
            sig(s.hi),
            if s.clamped { "  (clamped to [0, 1])" } else { "" }
        );
    }
}

fn render_intervals(out: &mut String, c: &ConfidenceReport, what: &str) {
    let _ = writeln!(out, "{what} {}% intervals (z = {}):", short(100.0 * c.level), sig(c.z));
    for iv in &c.intervals {
        let _ = writeln!(
            out,
            "  {:<6} {:>12}  se {:>12}  [{}, {}]",
            param_label(iv.param),
            sig(iv.estimate),
            sig(iv.std_error),
            sig(iv.lo),
            sig(iv.hi)
        );
    }
}

fn render_test(out: &mut String, params: &TestParams, t: &GlrResult, mc: Option<&McCalibration>) {
    let what = match (params.null, params.baseline) {
        (NullHypothesis::TrendOne, TestBaseline::Weibull) => "H: a = 1, Weibull baseline",
        (NullHypothesis::TrendOne, TestBaseline::Exponential) => "H: a = 1, exponential baseline",
        (NullHypothesis::ShapeOne, _) => "H: beta = 1",
    };
    let alt = match (params.null, params.a_domain, params.within) {
        (NullHypothesis::TrendOne, TrendDomain::AtLeastOne, _) => "K: a > 1",
        (NullHypothesis::TrendOne, TrendDomain::Free, _) => "K: a != 1",
        (NullHypothesis::ShapeOne, _, ShapeTestWithin::IidTrend) => "K: beta != 1, a = 1",
        (NullHypothesis::ShapeOne, _, ShapeTestWithin::FreeTrend) => "K: beta != 1, power trend",
    };
    let _ = writeln!(out, "{what} against {alt}, gamma = {}", short(params.gamma));
    let _ = writeln!(out, "loglik under H {}  under K {}", sig(t.fit_null.loglik), sig(t.fit_alt.loglik));
    let _ = writeln!(out, "Lambda = {}", sig(t.lambda));
    let _ = writeln!(out, "-2 ln Lambda = {}", sig(t.stat));
    let rule = match t.rule {
        PValueRule::ChiSquare => "chi2_1",
        PValueRule::BoundaryMixture => "0.5 chi2_0 + 0.5 chi2_1",
    };
    let _ = writeln!(out, "threshold {} ({rule}), p-value {}", sig(t.threshold), sig(t.p_value));
    if t.boundary {
        let _ = writeln!(out, "alternative fit on the boundary a = 1");
    }
    let _ = writeln!(out, "decision: {}", if t.reject { "reject H" } else { "do not reject H" });
    if let Some(m) = mc {
        let _ = writeln!(
            out,
            "Monte Carlo ({} replicates, seed {}, {} failed): level {} (se {}), p-value {}, critical value {}",
            m.replicates,
            m.seed,
            m.failures,
            sig(m.level),
            sig(m.level_std_error),
            sig(m.p_value),
            sig(m.critical_value)
        );
    }
}

pub fn model_name(m: ModelId) -> &'static str {
    match m {
        ModelId::ExpIid => "exp-iid",
        ModelId::ExpKnownAlpha => "exp-known",
        ModelId::ExpPtcphm => "exp-ptcphm",
        ModelId::WeibullKnownAlpha => "weibull-known",
        ModelId::WeibullIid => "weibull-iid",
        ModelId::WeibullPtcphm => "weibull-ptcphm",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig(2.30500417), "2.30500");
        assert_eq!(sig(-18.35083), "-18.3508");
        assert_eq!(sig(0.2272154), "0.227215");
        assert_eq!(sig(1.049362), "1.04936");
        assert_eq!(sig(9.9999999), "10.0000");
        assert_eq!(sig(123456.7), "123457");
        assert_eq!(sig(1234567.0), "1.23457e6");
        assert_eq!(sig(0.00001234), "1.23400e-5");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(f64::INFINITY), "inf");
        assert_eq!(short(95.0), "95");
        assert_eq!(short(0.05), "0.05");
        assert_eq!(short(1234567.0), "1.23457e6");
    }
}
