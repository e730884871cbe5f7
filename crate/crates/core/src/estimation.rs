//! Maximum-likelihood fits for exponential and Weibull baselines with known
//! multipliers or a power trend `alpha_j = a^j`.
//!
//! With known multipliers the Weibull shape solves `h(beta) = 1/beta` (see
//! [`SufficientStats::shape_h`]) and the scale follows in closed form. When
//! every `m_j + 1 > 0`, `h` is increasing and the root is unique.
//!
//! Under the power trend the scale is profiled out,
//! `sigma(beta, a)^beta = S(beta, a) / r`, and the remaining two-dimensional
//! profile is maximised over `(ln beta, ln a)` by a multi-start simplex
//! followed by Newton steps on the full score. `S` is evaluated in its
//! telescoped form `sum_j (n-j+1) a^j (x_j^beta - x_{j-1}^beta)`, whose terms
//! are all nonnegative whatever the sign of the individual `m_j + 1`.

use serde::{Deserialize, Serialize};

use crate::baseline::WeibullParams;
use crate::error::{BestPoint, Result, SosError};
use crate::likelihood::{
    loglik_with_weights, neg_hessian_with_weights, require_identifiable, score_with_weights, InformationFormula,
    SufficientStats,
};
use crate::numeric::CompensatedSum;
use crate::sample::SosSample;
use crate::scheme::MultiplierScheme;
use crate::solver::{brent_root, nelder_mead, SimplexOptions};

/// Shape cap used when the shape equation has no finite root.
pub const BETA_CAP: f64 = 1e3;

/// Which row of the model comparison a fit belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    /// Exponential, `a = 1`.
    ExpIid,
    /// Exponential with user-supplied multipliers.
    ExpKnownAlpha,
    /// Exponential with power-trend multipliers.
    ExpPtcphm,
    /// Weibull with user-supplied multipliers.
    WeibullKnownAlpha,
    /// Weibull, `a = 1`.
    WeibullIid,
    /// Weibull with power-trend multipliers.
    WeibullPtcphm,
}

impl ModelId {
    pub fn label(&self) -> &'static str {
        match self {
            ModelId::ExpIid => "a=1, beta=1",
            ModelId::ExpKnownAlpha => "known alpha, beta=1",
            ModelId::ExpPtcphm => "beta=1",
            ModelId::WeibullKnownAlpha => "known alpha",
            ModelId::WeibullIid => "a=1",
            ModelId::WeibullPtcphm => "a free, beta>0, sigma>0",
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            ModelId::ExpIid | ModelId::ExpKnownAlpha => 1,
            ModelId::ExpPtcphm | ModelId::WeibullKnownAlpha | ModelId::WeibullIid => 2,
            ModelId::WeibullPtcphm => 3,
        }
    }

    pub fn free_params(&self) -> &'static [Param] {
        match self {
            ModelId::ExpIid | ModelId::ExpKnownAlpha => &[Param::Sigma],
            ModelId::ExpPtcphm => &[Param::Sigma, Param::A],
            ModelId::WeibullKnownAlpha | ModelId::WeibullIid => &[Param::Beta, Param::Sigma],
            ModelId::WeibullPtcphm => &[Param::Beta, Param::Sigma, Param::A],
        }
    }

    pub fn is_weibull(&self) -> bool {
        matches!(self, ModelId::WeibullKnownAlpha | ModelId::WeibullIid | ModelId::WeibullPtcphm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Beta,
    Sigma,
    A,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::Beta => "beta",
            Param::Sigma => "sigma",
            Param::A => "a",
        }
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Admissible values of the trend parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendDomain {
    /// `a > 0`.
    #[default]
    Free,
    /// `a >= 1`: hazards do not decrease after failures.
    AtLeastOne,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Final bracket of the shape root, when one was used.
    pub bracket: Option<(f64, f64)>,
    /// Largest absolute score component over the free parameters.
    pub score_max_abs: f64,
    /// `g' H^-1 g` at the returned point, for Newton-refined fits.
    pub newton_decrement: Option<f64>,
    /// `a_fixed_point - a` for the trend equation `a = (r+1) S / (2 S')`.
    pub trend_fixed_point_residual: Option<f64>,
    /// All `m_j + 1 > 0`, so the shape root is provably unique.
    pub uniqueness_guaranteed: bool,
    /// Number of simplex starts that reached the best value.
    pub starts_agreeing: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelId,
    /// Shape; 1 for exponential models.
    pub beta: f64,
    pub sigma: f64,
    /// Trend; 1 unless fitted.
    pub a: f64,
    /// Multipliers at the estimate.
    pub scheme: MultiplierScheme,
    /// Log-likelihood without `ln(n!/(n-r)!)`.
    pub loglik: f64,
    pub aic: f64,
    pub n_params: usize,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Constrained fit landed on `a = 1`.
    pub boundary: bool,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    pub fn weibull(&self) -> WeibullParams {
        WeibullParams {
            beta: self.beta,
            sigma: self.sigma,
        }
    }

    pub fn free_params(&self) -> &'static [Param] {
        self.model.free_params()
    }

    pub fn estimate(&self, p: Param) -> f64 {
        match p {
            Param::Beta => self.beta,
            Param::Sigma => self.sigma,
            Param::A => self.a,
        }
    }

    /// Estimates of the free parameters, in [`FitResult::free_params`] order.
    pub fn estimates(&self) -> Vec<f64> {
        self.free_params().iter().map(|p| self.estimate(*p)).collect()
    }
}

pub fn aic(loglik: f64, n_params: usize) -> f64 {
    2.0 * n_params as f64 - 2.0 * loglik
}

fn is_iid(scheme: &MultiplierScheme, r: usize) -> bool {
    (1..=r).all(|j| scheme.alpha(j) == 1.0)
}

/// Weibull fit for known multipliers (the power trend with a fixed `a` included).
pub fn fit_weibull_known_alpha(sample: &SosSample, scheme: &MultiplierScheme) -> Result<FitResult> {
    require_identifiable(sample)?;
    let (n, r) = (sample.n(), sample.r());
    let hw = scheme.weights(n, r)?;
    let stats = SufficientStats::new(sample);
    let g = |beta: f64| stats.shape_h(&hw.w, beta) - 1.0 / beta;

    let mut iterations = 0usize;
    let (mut lo, mut hi) = (1.0, 1.0);
    if g(1.0) < 0.0 {
        while g(hi) < 0.0 {
            iterations += 1;
            hi *= 2.0;
            if hi > BETA_CAP {
                return Err(degenerate(sample, scheme, iterations));
            }
        }
        lo = hi / 2.0;
    } else {
        while g(lo) >= 0.0 {
            iterations += 1;
            lo /= 2.0;
            if lo < 1e-12 {
                return Err(SosError::NonConvergent {
                    iterations,
                    reason: "shape equation has no root above 1e-12".into(),
                    best: None,
                });
            }
        }
        hi = if lo == 1.0 { 1.0 } else { lo * 2.0 };
    }
    let root = brent_root(g, lo, hi, 0.0, 1e-12, 200).ok_or_else(|| SosError::NonConvergent {
        iterations,
        reason: format!("no sign change of the shape equation on [{lo}, {hi}]"),
        best: None,
    })?;
    iterations += root.iterations;

    let beta = root.x;
    let x_max = sample.last();
    let scaled: f64 = stats.weighted_power_sum(&hw.w, beta) / x_max.powf(beta);
    let sigma = x_max * (scaled / r as f64).powf(1.0 / beta);
    let p = WeibullParams { beta, sigma };
    let loglik = loglik_with_weights(&stats, &hw, &p);
    let score = score_with_weights(&stats, &hw, scheme.trend().unwrap_or(1.0), &p);
    let model = if is_iid(scheme, r) {
        ModelId::WeibullIid
    } else {
        ModelId::WeibullKnownAlpha
    };
    Ok(FitResult {
        model,
        beta,
        sigma,
        a: scheme.trend().unwrap_or(1.0),
        scheme: scheme.clone(),
        loglik,
        aic: aic(loglik, 2),
        n_params: 2,
        converged: root.converged,
        iterations,
        evaluations: iterations,
        boundary: false,
        diagnostics: FitDiagnostics {
            bracket: Some((lo, hi)),
            score_max_abs: score.beta.abs().max(score.sigma.abs()),
            uniqueness_guaranteed: scheme.is_regular(n, r),
            ..Default::default()
        },
    })
}

fn degenerate(sample: &SosSample, scheme: &MultiplierScheme, iterations: usize) -> SosError {
    let best = scheme.weights(sample.n(), sample.r()).ok().map(|hw| {
        let stats = SufficientStats::new(sample);
        let x_max = sample.last();
        let scaled = stats.weighted_power_sum(&hw.w, BETA_CAP) / x_max.powf(BETA_CAP);
        let sigma = x_max * (scaled / sample.r() as f64).powf(1.0 / BETA_CAP);
        let p = WeibullParams { beta: BETA_CAP, sigma };
        BestPoint {
            beta: BETA_CAP,
            sigma,
            a: scheme.trend().unwrap_or(1.0),
            loglik: loglik_with_weights(&stats, &hw, &p),
        }
    });
    SosError::NonConvergent {
        iterations,
        reason: format!("shape estimate diverges (capped at {BETA_CAP}); observed times are all equal"),
        best,
    }
}

/// Telescoped form of the weighted power sum in log space.
struct TrendProfile<'a> {
    n: usize,
    log_times: &'a [f64],
    log_eta: f64,
}

impl TrendProfile<'_> {
    /// `(ln S, a dS/da / S)`: both via a log-sum-exp over positive terms.
    fn log_sum_and_tilt(&self, beta: f64, log_a: f64) -> (f64, f64) {
        let r = self.log_times.len();
        let mut terms = Vec::with_capacity(r);
        let mut prev = f64::NEG_INFINITY;
        for (idx, &lx) in self.log_times.iter().enumerate() {
            let j = idx + 1;
            // ln(x_j^b - x_{j-1}^b)
            let inc = beta * lx + (-(beta * (prev - lx)).exp_m1()).ln();
            prev = lx;
            if inc.is_finite() {
                terms.push((j as f64, ((self.n - j + 1) as f64).ln() + j as f64 * log_a + inc));
            }
        }
        let m = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        let (mut tot, mut tilt) = (CompensatedSum::new(), CompensatedSum::new());
        for (j, t) in &terms {
            let e = (t - m).exp();
            tot.add(e);
            tilt.add(j * e);
        }
        (m + tot.value().ln(), tilt.value() / tot.value())
    }

    /// Profile log-likelihood with `sigma` maximised out.
    fn loglik(&self, beta: f64, log_a: f64) -> f64 {
        let r = self.log_times.len() as f64;
        let (log_s, _) = self.log_sum_and_tilt(beta, log_a);
        r * beta.ln() - r * (log_s - r.ln()) + (beta - 1.0) * self.log_eta + r * (r + 1.0) / 2.0 * log_a - r
    }

    fn sigma(&self, beta: f64, log_a: f64) -> f64 {
        let r = self.log_times.len() as f64;
        let (log_s, _) = self.log_sum_and_tilt(beta, log_a);
        ((log_s - r.ln()) / beta).exp()
    }
}

fn trend_fixed_point_residual(stats: &SufficientStats<'_>, a: f64, p: &WeibullParams) -> Option<f64> {
    let hw = MultiplierScheme::PowerTrend { a }.weights(stats.sample().n(), stats.r()).ok()?;
    let r = stats.r() as f64;
    let s = stats.weighted_power_sum(&hw.w, p.beta);
    let ds = stats.weighted_power_sum(hw.dw.as_ref()?, p.beta);
    Some((r + 1.0) * s / (2.0 * ds) - a)
}

fn solve3(m: &[[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = *m;
    let mut x = b;
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..3).rev() {
        let mut v = x[col];
        for k in (col + 1)..3 {
            v -= a[col][k] * x[k];
        }
        x[col] = v / a[col][col];
    }
    Some(x)
}

/// Power-trend Weibull fit over `(beta, sigma, a)`.
pub fn fit_weibull_ptcphm(sample: &SosSample, domain: TrendDomain) -> Result<FitResult> {
    require_identifiable(sample)?;
    let iid = fit_weibull_known_alpha(sample, &MultiplierScheme::iid())?;
    let (n, r) = (sample.n(), sample.r());
    let stats = SufficientStats::new(sample);
    let profile = TrendProfile {
        n,
        log_times: stats.log_times(),
        log_eta: stats.log_eta(),
    };
    let objective = |v: &[f64]| -profile.loglik(v[0].exp(), v[1]);

    let opts = SimplexOptions {
        step: 0.2,
        ftol: 1e-10,
        xtol: 1e-7,
        max_evaluations: 10_000,
    };
    let mut evaluations = 0;
    let mut iterations = 0;
    let mut results = Vec::new();
    for a0 in [0.8f64, 1.0, 1.25] {
        let m = nelder_mead(objective, &[iid.beta.ln(), a0.ln()], opts);
        evaluations += m.evaluations;
        results.push(m);
    }
    let best_f = results.iter().map(|m| m.fx).fold(f64::INFINITY, f64::min);
    let best = results
        .iter()
        .find(|m| m.fx == best_f)
        .cloned()
        .ok_or_else(|| SosError::NonConvergent {
            iterations: 0,
            reason: "profile likelihood is undefined at every start".into(),
            best: None,
        })?;
    let starts_agreeing = results.iter().filter(|m| (m.fx - best_f).abs() < 1e-6).count();

    // Newton refinement on the full score.
    let mut beta = best.x[0].exp();
    let mut a = best.x[1].exp();
    let mut sigma = profile.sigma(beta, best.x[1]);
    let eval = |beta: f64, sigma: f64, a: f64| -> Option<(f64, [f64; 3], [[f64; 3]; 3])> {
        let hw = MultiplierScheme::PowerTrend { a }.weights(n, r).ok()?;
        let p = WeibullParams { beta, sigma };
        let l = loglik_with_weights(&stats, &hw, &p);
        let s = score_with_weights(&stats, &hw, a, &p);
        let h = neg_hessian_with_weights(&stats, &hw, a, &p, InformationFormula::Exact);
        l.is_finite().then_some((l, [s.beta, s.sigma, s.a], h))
    };
    let (mut l, mut g, mut h) = eval(beta, sigma, a).ok_or_else(|| SosError::NonConvergent {
        iterations: 0,
        reason: "log-likelihood undefined at the simplex optimum".into(),
        best: None,
    })?;
    // Stop on the Newton decrement g' H^-1 g, which does not depend on the time scale.
    let mut decrement = f64::INFINITY;
    for _ in 0..100 {
        let Some(step) = solve3(&h, g) else { break };
        decrement = step.iter().zip(&g).map(|(s, g)| s * g).sum::<f64>();
        if !(decrement > 1e-20) {
            break;
        }
        iterations += 1;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (nb, ns, na) = (beta + t * step[0], sigma + t * step[1], a + t * step[2]);
            if nb > 0.0 && ns > 0.0 && na > 0.0 {
                if let Some((nl, ng, nh)) = eval(nb, ns, na) {
                    if nl >= l - 1e-12 * l.abs().max(1.0) {
                        (beta, sigma, a, l, g, h) = (nb, ns, na, nl, ng, nh);
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if let Some(step) = solve3(&h, g) {
        decrement = step.iter().zip(&g).map(|(s, g)| s * g).sum::<f64>();
    }
    let score_max_abs = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = WeibullParams { beta, sigma };
    if !(decrement.abs() <= 1e-12) {
        return Err(SosError::NonConvergent {
            iterations,
            reason: format!("Newton decrement {decrement:e} after refinement (score max {score_max_abs:e})"),
            best: Some(BestPoint { beta, sigma, a, loglik: l }),
        });
    }

    if beta > BETA_CAP || !(1e-8..=1e8).contains(&a) {
        return Err(SosError::NonConvergent {
            iterations,
            reason: "likelihood increases without bound (too few failures for three parameters?)".into(),
            best: Some(BestPoint { beta, sigma, a, loglik: l }),
        });
    }
    if domain == TrendDomain::AtLeastOne && a < 1.0 {
        return Ok(boundary_fit(iid, ModelId::WeibullPtcphm));
    }
    Ok(FitResult {
        model: ModelId::WeibullPtcphm,
        beta,
        sigma,
        a,
        scheme: MultiplierScheme::PowerTrend { a },
        loglik: l,
        aic: aic(l, 3),
        n_params: 3,
        converged: true,
        iterations,
        evaluations,
        boundary: false,
        diagnostics: FitDiagnostics {
            bracket: None,
            score_max_abs,
            newton_decrement: Some(decrement),
            trend_fixed_point_residual: trend_fixed_point_residual(&stats, a, &p),
            uniqueness_guaranteed: MultiplierScheme::PowerTrend { a }.is_regular(n, r),
            starts_agreeing: Some(starts_agreeing),
        },
    })
}

fn boundary_fit(at_one: FitResult, model: ModelId) -> FitResult {
    let n_params = model.n_params();
    FitResult {
        model,
        a: 1.0,
        scheme: MultiplierScheme::iid(),
        aic: aic(at_one.loglik, n_params),
        n_params,
        boundary: true,
        ..at_one
    }
}

/// Exponential fit with known multipliers; closed form.
pub fn fit_exponential_known_alpha(sample: &SosSample, scheme: &MultiplierScheme) -> Result<FitResult> {
    let (n, r) = (sample.n(), sample.r());
    let hw = scheme.weights(n, r)?;
    let stats = SufficientStats::new(sample);
    let total = stats.weighted_power_sum(&hw.w, 1.0);
    let sigma = total / r as f64;
    let p = WeibullParams { beta: 1.0, sigma };
    let loglik = loglik_with_weights(&stats, &hw, &p);
    let score = score_with_weights(&stats, &hw, scheme.trend().unwrap_or(1.0), &p);
    let model = if is_iid(scheme, r) {
        ModelId::ExpIid
    } else {
        ModelId::ExpKnownAlpha
    };
    Ok(FitResult {
        model,
        beta: 1.0,
        sigma,
        a: scheme.trend().unwrap_or(1.0),
        scheme: scheme.clone(),
        loglik,
        aic: aic(loglik, 1),
        n_params: 1,
        converged: true,
        iterations: 0,
        evaluations: 1,
        boundary: false,
        diagnostics: FitDiagnostics {
            score_max_abs: score.sigma.abs(),
            uniqueness_guaranteed: true,
            ..Default::default()
        },
    })
}

/// Power-trend exponential fit over `(sigma, a)`.
///
/// With `sigma` profiled out the score in `v = ln a` is
/// `r ((r+1)/2 - E_v[j])`, where `E_v[j]` is the mean failure index under
/// weights `(n-j+1) a^j (x_j - x_{j-1})`. It decreases strictly in `v`, so
/// the maximiser is unique when it exists.
pub fn fit_exponential_ptcphm(sample: &SosSample, domain: TrendDomain) -> Result<FitResult> {
    require_identifiable(sample)?;
    let (n, r) = (sample.n(), sample.r());
    let stats = SufficientStats::new(sample);
    let profile = TrendProfile {
        n,
        log_times: stats.log_times(),
        log_eta: stats.log_eta(),
    };
    let rf = r as f64;
    let score = |v: f64| rf * ((rf + 1.0) / 2.0 - profile.log_sum_and_tilt(1.0, v).1);

    let mut iterations = 0;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let s0 = score(0.0);
    if s0 > 0.0 {
        while score(hi) > 0.0 {
            iterations += 1;
            hi += 1.0;
            if hi > 50.0 {
                return Err(SosError::NonConvergent {
                    iterations,
                    reason: "trend estimate diverges to infinity".into(),
                    best: None,
                });
            }
        }
        lo = hi - 1.0;
    } else if s0 < 0.0 {
        while score(lo) < 0.0 {
            iterations += 1;
            lo -= 1.0;
            if lo < -50.0 {
                return Err(SosError::NonConvergent {
                    iterations,
                    reason: "trend estimate collapses to zero".into(),
                    best: None,
                });
            }
        }
        hi = lo + 1.0;
    }
    let root = if lo == hi {
        crate::solver::Root { x: 0.0, fx: 0.0, iterations: 0, converged: true }
    } else {
        brent_root(score, lo, hi, 1e-15, 1e-13 * rf, 200).ok_or_else(|| SosError::NonConvergent {
            iterations,
            reason: "trend score has no sign change".into(),
            best: None,
        })?
    };
    iterations += root.iterations;
    let a = root.x.exp();
    let scheme = MultiplierScheme::PowerTrend { a };
    let mut fit = fit_exponential_known_alpha(sample, &scheme)?;
    if domain == TrendDomain::AtLeastOne && a < 1.0 {
        let iid = fit_exponential_known_alpha(sample, &MultiplierScheme::iid())?;
        return Ok(boundary_fit(iid, ModelId::ExpPtcphm));
    }
    let hw = scheme.weights(n, r)?;
    let sc = score_with_weights(&stats, &hw, a, &fit.weibull());
    fit.model = ModelId::ExpPtcphm;
    fit.n_params = 2;
    fit.aic = aic(fit.loglik, 2);
    fit.converged = root.converged;
    fit.iterations = iterations;
    fit.evaluations = iterations + 1;
    fit.diagnostics = FitDiagnostics {
        bracket: Some((lo.exp(), hi.exp())),
        score_max_abs: sc.sigma.abs().max(sc.a.abs()),
        uniqueness_guaranteed: true,
        ..Default::default()
    };
    Ok(fit)
}

/// One row of the model comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub model: ModelId,
    pub fit: Result<FitResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub rows: Vec<ModelRow>,
}

impl ModelComparison {
    /// Successful fits ordered by increasing AIC.
    pub fn ranked(&self) -> Vec<&FitResult> {
        let mut fits: Vec<&FitResult> = self.rows.iter().filter_map(|r| r.fit.as_ref().ok()).collect();
        fits.sort_by(|a, b| a.aic.total_cmp(&b.aic));
        fits
    }

    pub fn best(&self) -> Option<&FitResult> {
        self.ranked().into_iter().next()
    }

    pub fn get(&self, model: ModelId) -> Option<&FitResult> {
        self.rows
            .iter()
            .find(|r| r.model == model)
            .and_then(|r| r.fit.as_ref().ok())
    }
}

/// Fit the four nested models: exponential and Weibull, each iid and power trend.
pub fn fit_all(sample: &SosSample) -> ModelComparison {
    let iid = MultiplierScheme::iid();
    let rows = vec![
        ModelRow {
            model: ModelId::ExpIid,
            fit: fit_exponential_known_alpha(sample, &iid),
        },
        ModelRow {
            model: ModelId::ExpPtcphm,
            fit: fit_exponential_ptcphm(sample, TrendDomain::Free),
        },
        ModelRow {
            model: ModelId::WeibullIid,
            fit: fit_weibull_known_alpha(sample, &iid),
        },
        ModelRow {
            model: ModelId::WeibullPtcphm,
            fit: fit_weibull_ptcphm(sample, TrendDomain::Free),
        },
    ];
    ModelComparison { rows }
}
