//! Generalized likelihood ratio tests of `a = 1` (no load-sharing effect)
//! and of `beta = 1` (exponential baseline), with Monte Carlo estimates of
//! the actual level.
//!
//! Both fits profile the scale, `sigma^beta = S / r` with
//! `S = sum_j (m_j+1) x_j^beta` over the first `r - 1` terms plus
//! `alpha_r (n-r+1) x_r^beta`, so the ratio has the closed form
//!
//! ```text
//! Lambda = (beta_H / beta_K)^r (S_K / S_H)^r prod_j (alpha_Hj / alpha_Kj) eta^(beta_H - beta_K)
//! ```
//!
//! with `eta = prod x_j`. For the power trend `prod alpha_j = a^(r(r+1)/2)`.
//! [`log_lambda_closed_form`] evaluates this directly; the test result also
//! carries `exp(l_H - l_K)` from the two fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::WeibullParams;
use crate::error::{Result, SosError};
use crate::estimation::{
    fit_exponential_known_alpha, fit_exponential_ptcphm, fit_weibull_known_alpha, fit_weibull_ptcphm, FitResult,
    TrendDomain,
};
use crate::inference::{chisq1_quantile, chisq1_sf};
use crate::likelihood::SufficientStats;
use crate::sample::SosSample;
use crate::scheme::MultiplierScheme;
use crate::simulate::{failures_tolerable, sample_sos, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullHypothesis {
    /// `a = 1`.
    TrendOne,
    /// `beta = 1`.
    ShapeOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestBaseline {
    Weibull,
    Exponential,
}

/// How the p-value and threshold are derived from the statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueRule {
    /// Plain `chi2_1`.
    #[default]
    ChiSquare,
    /// `0.5 chi2_0 + 0.5 chi2_1`, the limit for the one-sided alternative `a > 1`.
    BoundaryMixture,
}

/// Family in which `beta = 1` is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeTestWithin {
    /// Both models have `a = 1`.
    #[default]
    IidTrend,
    /// Both models have a free power trend.
    FreeTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlrOptions {
    /// Nominal level in `[0, 1)`; `0` never rejects.
    pub gamma: f64,
    /// Alternative for the trend: `AtLeastOne` gives `K: a > 1`.
    pub domain: TrendDomain,
    pub rule: PValueRule,
}

impl Default for GlrOptions {
    fn default() -> Self {
        Self {
            gamma: 0.05,
            domain: TrendDomain::AtLeastOne,
            rule: PValueRule::ChiSquare,
        }
    }
}

impl GlrOptions {
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlrResult {
    pub null: NullHypothesis,
    pub baseline: TestBaseline,
    pub gamma: f64,
    pub rule: PValueRule,
    /// `exp(l_H - l_K)`.
    pub lambda: f64,
    /// `ln Lambda` from the closed form.
    pub log_lambda_closed_form: f64,
    /// `-2 ln Lambda`, clipped at zero.
    pub stat: f64,
    pub threshold: f64,
    pub p_value: f64,
    pub reject: bool,
    /// The alternative fit sits on `a = 1`.
    pub boundary: bool,
    pub fit_null: FitResult,
    pub fit_alt: FitResult,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(SosError::Domain(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    Ok(())
}

/// Rejection threshold for `-2 ln Lambda` at level `gamma`.
pub fn threshold(gamma: f64, rule: PValueRule) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(f64::INFINITY);
    }
    match rule {
        PValueRule::ChiSquare => chisq1_quantile(1.0 - gamma),
        PValueRule::BoundaryMixture if gamma >= 0.5 => Ok(0.0),
        PValueRule::BoundaryMixture => chisq1_quantile(1.0 - 2.0 * gamma),
    }
}

pub fn p_value(stat: f64, rule: PValueRule) -> f64 {
    match rule {
        PValueRule::ChiSquare => chisq1_sf(stat),
        PValueRule::BoundaryMixture if stat <= 0.0 => 1.0,
        PValueRule::BoundaryMixture => 0.5 * chisq1_sf(stat),
    }
}

/// `ln Lambda` for two scale-profiled fits, from the closed form in the module
/// documentation.
pub fn log_lambda_closed_form(sample: &SosSample, null: &FitResult, alt: &FitResult) -> Result<f64> {
    let (n, r) = (sample.n(), sample.r());
    let stats = SufficientStats::new(sample);
    let parts = |fit: &FitResult| -> Result<(f64, f64)> {
        let hw = fit.scheme.weights(n, r)?;
        Ok((stats.weighted_power_sum(&hw.w, fit.beta), hw.log_alpha_sum))
    };
    let (s_h, la_h) = parts(null)?;
    let (s_k, la_k) = parts(alt)?;
    let rf = r as f64;
    Ok(rf * (null.beta / alt.beta).ln() + rf * (s_k / s_h).ln() + la_h - la_k
        + (null.beta - alt.beta) * stats.log_eta())
}

/// Exponential special case: `Lambda = (S_K / S_H)^r a^(-r(r+1)/2)` for
/// `H: a = 1` against a power-trend fit `(sigma_K, a)`.
pub fn exponential_lambda(sample: &SosSample, a: f64) -> Result<f64> {
    let (n, r) = (sample.n(), sample.r());
    let stats = SufficientStats::new(sample);
    let s_h = stats.weighted_power_sum(&MultiplierScheme::iid().weights(n, r)?.w, 1.0);
    let s_k = stats.weighted_power_sum(&MultiplierScheme::power_trend(a)?.weights(n, r)?.w, 1.0);
    let rf = r as f64;
    Ok(((s_k / s_h).ln() * rf - rf * (rf + 1.0) / 2.0 * a.ln()).exp())
}

/// Weibull special case of [`log_lambda_closed_form`] for `H: a = 1` with
/// shape `beta_h` against `(beta_k, a)`.
pub fn weibull_lambda(sample: &SosSample, beta_h: f64, beta_k: f64, a: f64) -> Result<f64> {
    let (n, r) = (sample.n(), sample.r());
    let stats = SufficientStats::new(sample);
    let s_h = stats.weighted_power_sum(&MultiplierScheme::iid().weights(n, r)?.w, beta_h);
    let s_k = stats.weighted_power_sum(&MultiplierScheme::power_trend(a)?.weights(n, r)?.w, beta_k);
    let rf = r as f64;
    Ok((rf * (beta_h / beta_k).ln() + rf * (s_k / s_h).ln() - rf * (rf + 1.0) / 2.0 * a.ln()
        + (beta_h - beta_k) * stats.log_eta())
    .exp())
}

/// Assemble a test from already computed null and alternative fits.
pub fn glr_from_fits(
    sample: &SosSample,
    null_hypothesis: NullHypothesis,
    baseline: TestBaseline,
    fit_null: FitResult,
    fit_alt: FitResult,
    opts: &GlrOptions,
) -> Result<GlrResult> {
    check_gamma(opts.gamma)?;
    // The one-sided alternative: a free fit with a < 1 is replaced by the null.
    let fit_alt = if null_hypothesis == NullHypothesis::TrendOne && opts.domain == TrendDomain::AtLeastOne && fit_alt.a < 1.0 {
        FitResult {
            model: fit_alt.model,
            a: 1.0,
            scheme: MultiplierScheme::iid(),
            aic: crate::estimation::aic(fit_null.loglik, fit_alt.n_params),
            n_params: fit_alt.n_params,
            boundary: true,
            ..fit_null.clone()
        }
    } else {
        fit_alt
    };
    let diff = fit_null.loglik - fit_alt.loglik;
    let stat = (-2.0 * diff).max(0.0);
    let threshold = threshold(opts.gamma, opts.rule)?;
    let boundary = fit_alt.boundary;
    Ok(GlrResult {
        null: null_hypothesis,
        baseline,
        gamma: opts.gamma,
        rule: opts.rule,
        lambda: diff.exp().min(1.0),
        log_lambda_closed_form: log_lambda_closed_form(sample, &fit_null, &fit_alt)?,
        stat,
        threshold,
        p_value: p_value(stat, opts.rule),
        reject: !boundary && stat > threshold,
        boundary,
        fit_null,
        fit_alt,
    })
}

fn check_rule(opts: &GlrOptions) -> Result<()> {
    if opts.rule == PValueRule::BoundaryMixture && opts.domain == TrendDomain::Free {
        return Err(SosError::Domain(
            "the boundary mixture applies only to the one-sided alternative a > 1".into(),
        ));
    }
    Ok(())
}

/// `H: a = 1` against the power trend, Weibull baseline.
pub fn glr_test_a_weibull(sample: &SosSample, opts: &GlrOptions) -> Result<GlrResult> {
    check_gamma(opts.gamma)?;
    check_rule(opts)?;
    let null = fit_weibull_known_alpha(sample, &MultiplierScheme::iid())?;
    let alt = fit_weibull_ptcphm(sample, TrendDomain::Free)?;
    glr_from_fits(sample, NullHypothesis::TrendOne, TestBaseline::Weibull, null, alt, opts)
}

/// `H: a = 1` against the power trend, exponential baseline.
pub fn glr_test_a_exponential(sample: &SosSample, opts: &GlrOptions) -> Result<GlrResult> {
    check_gamma(opts.gamma)?;
    check_rule(opts)?;
    let null = fit_exponential_known_alpha(sample, &MultiplierScheme::iid())?;
    let alt = fit_exponential_ptcphm(sample, TrendDomain::Free)?;
    glr_from_fits(sample, NullHypothesis::TrendOne, TestBaseline::Exponential, null, alt, opts)
}

/// `H: beta = 1` against `beta != 1`, a two-sided nested test.
pub fn glr_test_exponentiality(sample: &SosSample, gamma: f64, within: ShapeTestWithin) -> Result<GlrResult> {
    check_gamma(gamma)?;
    let (null, alt) = match within {
        ShapeTestWithin::IidTrend => {
            let iid = MultiplierScheme::iid();
            (fit_exponential_known_alpha(sample, &iid)?, fit_weibull_known_alpha(sample, &iid)?)
        }
        ShapeTestWithin::FreeTrend => (
            fit_exponential_ptcphm(sample, TrendDomain::Free)?,
            fit_weibull_ptcphm(sample, TrendDomain::Free)?,
        ),
    };
    let opts = GlrOptions {
        gamma,
        domain: TrendDomain::Free,
        rule: PValueRule::ChiSquare,
    };
    glr_from_fits(sample, NullHypothesis::ShapeOne, TestBaseline::Weibull, null, alt, &opts)
}

/// Monte Carlo level study of the Weibull test of `a = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelStudy {
    pub n: usize,
    pub r: usize,
    pub beta: f64,
    pub sigma: f64,
    /// Trend used to simulate; `1` for the level.
    pub a0: f64,
    pub gamma: f64,
    pub replicates: usize,
    pub seed: u64,
    pub rule: PValueRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    /// Fraction of usable replicates that rejected.
    pub level: f64,
    /// Binomial standard error of `level`.
    pub std_error: f64,
    pub rejections: usize,
    pub used: usize,
    pub failures: usize,
}

/// Simulate data at `a = a0`, run [`glr_test_a_weibull`] against `a > 1`, and
/// report the rejection fraction. Replicate `i` uses stream `i` of `seed`.
pub fn mc_actual_level(study: &LevelStudy) -> Result<LevelEstimate> {
    if study.replicates < 100 {
        return Err(SosError::Domain(format!(
            "at least 100 replicates are needed, got {}",
            study.replicates
        )));
    }
    if study.replicates > u32::MAX as usize {
        return Err(SosError::Domain("too many replicates".into()));
    }
    check_gamma(study.gamma)?;
    let baseline = WeibullParams::new(study.beta, study.sigma)?;
    let scheme = MultiplierScheme::power_trend(study.a0)?;
    let opts = GlrOptions {
        gamma: study.gamma,
        domain: TrendDomain::AtLeastOne,
        rule: study.rule,
    };
    let outcomes: Vec<Result<bool>> = (0..study.replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::for_replicate(study.seed, 0, i as u32).rng();
            let sample = sample_sos(study.n, study.r, &scheme, &baseline, &mut rng)?;
            Ok(glr_test_a_weibull(&sample, &opts)?.reject)
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_err()).count();
    if !failures_tolerable(failures, study.replicates) {
        return Err(SosError::TooManyFailures {
            failed: failures,
            total: study.replicates,
        });
    }
    let used = study.replicates - failures;
    let rejections = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    let level = rejections as f64 / used as f64;
    Ok(LevelEstimate {
        level,
        std_error: (level * (1.0 - level) / used as f64).sqrt(),
        rejections,
        used,
        failures,
    })
}

/// A test that can be rerun on simulated data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "null", rename_all = "kebab-case")]
pub enum TestSpec {
    /// `a = 1`.
    Trend { baseline: TestBaseline, opts: GlrOptions },
    /// `beta = 1`.
    Shape { gamma: f64, within: ShapeTestWithin },
}

impl TestSpec {
    pub fn run(&self, sample: &SosSample) -> Result<GlrResult> {
        match *self {
            TestSpec::Trend { baseline: TestBaseline::Weibull, opts } => glr_test_a_weibull(sample, &opts),
            TestSpec::Trend { baseline: TestBaseline::Exponential, opts } => glr_test_a_exponential(sample, &opts),
            TestSpec::Shape { gamma, within } => glr_test_exponentiality(sample, gamma, within),
        }
    }
}

/// Parametric bootstrap of a test under its fitted null model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCalibration {
    pub replicates: usize,
    pub seed: u64,
    pub used: usize,
    pub failures: usize,
    /// Fraction of simulated statistics above the asymptotic threshold.
    pub level: f64,
    pub level_std_error: f64,
    /// `(1 + #{stat_b >= stat}) / (used + 1)`.
    pub p_value: f64,
    /// Empirical `1 - gamma` quantile of the simulated statistics.
    pub critical_value: f64,
}

/// Simulate `replicates` samples of the observed design from `observed.fit_null`,
/// rerun `spec` on each and compare with the observed statistic.
pub fn mc_calibrate(
    sample: &SosSample,
    spec: &TestSpec,
    observed: &GlrResult,
    replicates: usize,
    seed: u64,
) -> Result<McCalibration> {
    if replicates < 100 {
        return Err(SosError::Domain(format!("at least 100 replicates are needed, got {replicates}")));
    }
    if replicates > u32::MAX as usize {
        return Err(SosError::Domain("too many replicates".into()));
    }
    let null = &observed.fit_null;
    let baseline = WeibullParams::new(null.beta, null.sigma)?;
    let (n, r) = (sample.n(), sample.r());
    let stats: Vec<Result<f64>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::for_replicate(seed, 0, i as u32).rng();
            let sim = sample_sos(n, r, &null.scheme, &baseline, &mut rng)?;
            Ok(spec.run(&sim)?.stat)
        })
        .collect();
    let failures = stats.iter().filter(|s| s.is_err()).count();
    if !failures_tolerable(failures, replicates) {
        return Err(SosError::TooManyFailures {
            failed: failures,
            total: replicates,
        });
    }
    let mut ok: Vec<f64> = stats.into_iter().filter_map(|s| s.ok()).collect();
    ok.sort_by(f64::total_cmp);
    let used = ok.len();
    let exceed = ok.iter().filter(|&&s| s > observed.threshold).count();
    let level = exceed as f64 / used as f64;
    let at_least = ok.iter().filter(|&&s| s >= observed.stat).count();
    let gamma = observed.gamma;
    let critical_value = if gamma == 0.0 {
        f64::INFINITY
    } else {
        let k = ((1.0 - gamma) * used as f64).ceil() as usize;
        ok[k.clamp(1, used) - 1]
    };
    Ok(McCalibration {
        replicates,
        seed,
        used,
        failures,
        level,
        level_std_error: (level * (1.0 - level) / used as f64).sqrt(),
        p_value: (1 + at_least) as f64 / (used + 1) as f64,
        critical_value,
    })
}
