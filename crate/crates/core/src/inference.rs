//! Observed Fisher information, Wald-type intervals and the delta-method
//! interval for the baseline survival function.
//!
//! Intervals use the inverse observed information of the sample as is; no
//! further `1/n` scaling is applied.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::baseline::WeibullParams;
use crate::error::{check_positive, Result, SosError};
use crate::estimation::{FitResult, Param};
use crate::likelihood::{neg_hessian_with_weights, SufficientStats};
use crate::sample::SosSample;
use crate::scheme::MultiplierScheme;

pub use crate::likelihood::InformationFormula;

/// Observed information for a subset of `(beta, sigma, a)`, with its
/// cofactors and inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedInformation {
    pub params: Vec<Param>,
    pub formula: InformationFormula,
    pub matrix: Vec<Vec<f64>>,
    pub determinant: f64,
    /// `b_ij`, the signed cofactors; `inverse = b / det`.
    pub cofactors: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    /// All leading principal minors are positive.
    pub positive_definite: bool,
}

fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

impl ObservedInformation {
    /// Build from a symmetric matrix of dimension 1 to 3.
    pub fn from_matrix(params: Vec<Param>, matrix: Vec<Vec<f64>>, formula: InformationFormula) -> Result<Self> {
        let d = params.len();
        if d == 0 || d > 3 || matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(SosError::Domain(format!("information matrix must be 1x1 to 3x3, got {d} params")));
        }
        let w = |i: usize, j: usize| matrix[i][j];
        let cofactors: Vec<Vec<f64>> = match d {
            1 => vec![vec![1.0]],
            2 => vec![vec![w(1, 1), -w(0, 1)], vec![-w(1, 0), w(0, 0)]],
            _ => {
                let b11 = w(1, 1) * w(2, 2) - w(1, 2) * w(2, 1);
                let b12 = -(w(0, 1) * w(2, 2) - w(2, 1) * w(0, 2));
                let b13 = w(0, 1) * w(1, 2) - w(1, 1) * w(0, 2);
                let b22 = w(0, 0) * w(2, 2) - w(0, 2) * w(2, 0);
                let b23 = -(w(0, 0) * w(1, 2) - w(0, 2) * w(1, 0));
                let b33 = w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0);
                vec![vec![b11, b12, b13], vec![b12, b22, b23], vec![b13, b23, b33]]
            }
        };
        let determinant: f64 = (0..d).map(|j| w(0, j) * cofactors[0][j]).sum();
        let hadamard: f64 = matrix
            .iter()
            .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        if !determinant.is_finite() || determinant.abs() <= 1e-14 * hadamard {
            return Err(SosError::Singular { determinant, matrix });
        }
        let inverse = cofactors
            .iter()
            .map(|row| row.iter().map(|b| b / determinant).collect())
            .collect();
        let minors = [
            w(0, 0),
            if d >= 2 { det2(w(0, 0), w(0, 1), w(1, 0), w(1, 1)) } else { 1.0 },
            if d == 3 { determinant } else { 1.0 },
        ];
        let positive_definite = minors.iter().all(|m| *m > 0.0);
        Ok(Self {
            params,
            formula,
            matrix,
            determinant,
            cofactors,
            inverse,
            positive_definite,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn index_of(&self, p: Param) -> Option<usize> {
        self.params.iter().position(|q| *q == p)
    }

    /// Inverse entry for a pair of parameters; zero if either is not free.
    pub fn covariance(&self, p: Param, q: Param) -> f64 {
        match (self.index_of(p), self.index_of(q)) {
            (Some(i), Some(j)) => self.inverse[i][j],
            _ => 0.0,
        }
    }

    fn variance(&self, i: usize) -> Result<f64> {
        let v = self.cofactors[i][i] / self.determinant;
        if !(v > 0.0) {
            return Err(SosError::NotPositiveDefinite {
                param: self.params[i].to_string(),
                value: v,
            });
        }
        Ok(v)
    }
}

/// A point in `(beta, sigma, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub beta: f64,
    pub sigma: f64,
    pub a: f64,
}

impl ParamPoint {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Beta => self.beta,
            Param::Sigma => self.sigma,
            Param::A => self.a,
        }
    }
}

/// Full `(beta, sigma, a)` observed information of the power-trend Weibull model.
pub fn observed_information(sample: &SosSample, beta: f64, sigma: f64, a: f64) -> Result<ObservedInformation> {
    observed_information_with(
        sample,
        ParamPoint { beta, sigma, a },
        &[Param::Beta, Param::Sigma, Param::A],
        InformationFormula::Exact,
    )
}

/// Observed information of the power-trend Weibull model restricted to `params`
/// (the remaining parameters held fixed at `point`).
pub fn observed_information_with(
    sample: &SosSample,
    point: ParamPoint,
    params: &[Param],
    formula: InformationFormula,
) -> Result<ObservedInformation> {
    check_positive("a", point.a)?;
    information_for_scheme(sample, &MultiplierScheme::PowerTrend { a: point.a }, point, params, formula)
}

fn information_for_scheme(
    sample: &SosSample,
    scheme: &MultiplierScheme,
    point: ParamPoint,
    params: &[Param],
    formula: InformationFormula,
) -> Result<ObservedInformation> {
    check_positive("beta", point.beta)?;
    check_positive("sigma", point.sigma)?;
    if params.contains(&Param::A) && !scheme.is_power_trend() {
        return Err(SosError::Domain("trend parameter is not free under explicit multipliers".into()));
    }
    let hw = scheme.weights(sample.n(), sample.r())?;
    let stats = SufficientStats::new(sample);
    let p = WeibullParams {
        beta: point.beta,
        sigma: point.sigma,
    };
    let full = neg_hessian_with_weights(&stats, &hw, point.a, &p, formula);
    let idx = |q: &Param| match q {
        Param::Beta => 0,
        Param::Sigma => 1,
        Param::A => 2,
    };
    let matrix = params
        .iter()
        .map(|pi| params.iter().map(|pj| full[idx(pi)][idx(pj)]).collect())
        .collect();
    ObservedInformation::from_matrix(params.to_vec(), matrix, formula)
}

/// Observed information at a fit, over that model's free parameters.
pub fn information_for_fit(sample: &SosSample, fit: &FitResult, formula: InformationFormula) -> Result<ObservedInformation> {
    let point = ParamPoint {
        beta: fit.beta,
        sigma: fit.sigma,
        a: fit.a,
    };
    let scheme = if fit.free_params().contains(&Param::A) {
        MultiplierScheme::PowerTrend { a: fit.a }
    } else {
        fit.scheme.clone()
    };
    information_for_scheme(sample, &scheme, point, fit.free_params(), formula)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub param: Param,
    pub estimate: f64,
    pub std_error: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceReport {
    /// `1 - gamma`.
    pub level: f64,
    pub gamma: f64,
    /// Normal quantile used for the half-widths.
    pub z: f64,
    /// Bonferroni-adjusted product region.
    pub simultaneous: bool,
    pub intervals: Vec<ParamInterval>,
}

impl ConfidenceReport {
    pub fn get(&self, p: Param) -> Option<&ParamInterval> {
        self.intervals.iter().find(|i| i.param == p)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SosError::Domain(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

fn intervals_with_z(info: &ObservedInformation, estimates: &[f64], gamma: f64, z: f64, simultaneous: bool) -> Result<ConfidenceReport> {
    if estimates.len() != info.dim() {
        return Err(SosError::Domain(format!(
            "{} estimates for a {}-parameter information matrix",
            estimates.len(),
            info.dim()
        )));
    }
    let intervals = info
        .params
        .iter()
        .enumerate()
        .map(|(i, &param)| {
            let std_error = info.variance(i)?.sqrt();
            let estimate = estimates[i];
            Ok(ParamInterval {
                param,
                estimate,
                std_error,
                lo: estimate - z * std_error,
                hi: estimate + z * std_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfidenceReport {
        level: 1.0 - gamma,
        gamma,
        z,
        simultaneous,
        intervals,
    })
}

/// Marginal `100(1-gamma)%` intervals `estimate +- z_{1-gamma/2} sqrt(b_ii / |I|)`.
pub fn equi_tailed_intervals(info: &ObservedInformation, estimates: &[f64], gamma: f64) -> Result<ConfidenceReport> {
    check_gamma(gamma)?;
    intervals_with_z(info, estimates, gamma, normal_quantile(1.0 - gamma / 2.0)?, false)
}

/// Bonferroni product region: `z_{1-gamma/(2k)}` for `k` free parameters.
pub fn bonferroni_region(info: &ObservedInformation, estimates: &[f64], gamma: f64) -> Result<ConfidenceReport> {
    check_gamma(gamma)?;
    let k = info.dim() as f64;
    intervals_with_z(info, estimates, gamma, normal_quantile(1.0 - gamma / (2.0 * k))?, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalInterval {
    pub t0: f64,
    pub point: f64,
    pub std_error: f64,
    pub lo: f64,
    pub hi: f64,
    /// An endpoint was clamped into `[0, 1]`.
    pub clamped: bool,
}

/// Delta-method interval for `S(t0) = exp(-(t0/sigma)^beta)`.
///
/// The gradient is `(-S k ln(t0/sigma), S k beta/sigma)` in `(beta, sigma)`
/// with `k = (t0/sigma)^beta`; parameters that are not free contribute nothing.
pub fn survival_interval(
    info: &ObservedInformation,
    beta: f64,
    sigma: f64,
    t0: f64,
    gamma: f64,
) -> Result<SurvivalInterval> {
    check_positive("t0", t0)?;
    check_positive("beta", beta)?;
    check_positive("sigma", sigma)?;
    check_gamma(gamma)?;
    if info.index_of(Param::Sigma).is_none() {
        return Err(SosError::Domain("survival interval needs sigma among the free parameters".into()));
    }
    let ratio = t0 / sigma;
    let k = ratio.powf(beta);
    let point = (-k).exp();
    let log_ratio = ratio.ln();
    let v = point * point
        * k
        * k
        * (info.covariance(Param::Beta, Param::Beta) * log_ratio * log_ratio
            - 2.0 * info.covariance(Param::Sigma, Param::Beta) * (beta / sigma) * log_ratio
            + info.covariance(Param::Sigma, Param::Sigma) * (beta / sigma).powi(2));
    if !(v >= 0.0) {
        return Err(SosError::NotPositiveDefinite {
            param: "S(t0)".into(),
            value: v,
        });
    }
    let std_error = v.sqrt();
    let z = normal_quantile(1.0 - gamma / 2.0)?;
    let (lo, hi) = (point - z * std_error, point + z * std_error);
    let clamped = lo < 0.0 || hi > 1.0;
    Ok(SurvivalInterval {
        t0,
        point,
        std_error,
        lo: lo.max(0.0),
        hi: hi.min(1.0),
        clamped,
    })
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SosError::Domain(format!("quantile probability must lie in (0, 1), got {p}")));
    }
    Ok(standard_normal().inverse_cdf(p))
}

/// Chi-square (1 df) quantile via `z_{(1+p)/2}^2`.
pub fn chisq1_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SosError::Domain(format!("quantile probability must lie in (0, 1), got {p}")));
    }
    Ok(normal_quantile((1.0 + p) / 2.0)?.powi(2))
}

/// Upper tail `P(chi2_1 > x)`.
pub fn chisq1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(1.0).expect("1 df").sf(x)
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}
