//! Log-likelihoods, scores and second derivatives for Weibull and exponential
//! baselines under explicit or power-trend hazard multipliers.
//!
//! Log-likelihood values exclude the additive constant `ln(n!/(n-r)!)`; see
//! [`log_constant`] for it. All weighted sums use compensated summation.
//!
//! Sums are written in terms of `u_j = (x_j/sigma)^beta` and
//! `l_j = ln(x_j/sigma)`, which keeps the closed forms well scaled:
//!
//! ```text
//! l        = r ln b - r b ln s + (b-1) ln eta + sum ln alpha_j - sum w_j u_j
//! dl/db    = r/b + sum l_j - sum w_j u_j l_j
//! dl/ds    = (b/s) (sum w_j u_j - r)
//! dl/da    = r(r+1)/(2a) - sum w'_j u_j
//! ```

use serde::{Deserialize, Serialize};

use crate::baseline::{ExpParams, WeibullParams};
use crate::error::{check_positive, Result, SosError};
use crate::numeric::{compensated_sum, log_falling_factorial, CompensatedSum};
use crate::sample::SosSample;
use crate::scheme::{HazardWeights, MultiplierScheme};

/// Data summaries reused across likelihood evaluations.
#[derive(Debug, Clone)]
pub struct SufficientStats<'a> {
    sample: &'a SosSample,
    log_times: Vec<f64>,
    log_eta: f64,
}

impl<'a> SufficientStats<'a> {
    pub fn new(sample: &'a SosSample) -> Self {
        let log_times: Vec<f64> = sample.times().iter().map(|x| x.ln()).collect();
        let log_eta = compensated_sum(log_times.iter().copied());
        Self {
            sample,
            log_times,
            log_eta,
        }
    }

    pub fn sample(&self) -> &SosSample {
        self.sample
    }

    pub fn r(&self) -> usize {
        self.sample.r()
    }

    pub fn log_times(&self) -> &[f64] {
        &self.log_times
    }

    /// `ln prod x_j`.
    pub fn log_eta(&self) -> f64 {
        self.log_eta
    }

    /// `sum_{j<r} (m_j+1) x_j^beta + alpha_r (n-r+1) x_r^beta`.
    pub fn weighted_power_sum(&self, weights: &[f64], beta: f64) -> f64 {
        compensated_sum(
            weights
                .iter()
                .zip(&self.log_times)
                .map(|(w, lx)| w * (beta * lx).exp()),
        )
    }

    /// `sum w_j u_j l_j^k` for `k = 0, 1, 2`, with `u_j = (x_j/sigma)^beta`
    /// and `l_j = ln(x_j / sigma)`.
    pub fn power_sums(&self, weights: &[f64], beta: f64, sigma: f64) -> PowerSums {
        let ls = sigma.ln();
        let (mut s0, mut s1, mut s2) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
        for (w, lx) in weights.iter().zip(&self.log_times) {
            let l = lx - ls;
            let wu = w * (beta * l).exp();
            s0.add(wu);
            s1.add(wu * l);
            s2.add(wu * l * l);
        }
        PowerSums {
            s0: s0.value(),
            s1: s1.value(),
            s2: s2.value(),
        }
    }

    /// The shape equation's left side,
    /// `h(beta) = sum w x^b ln x / sum w x^b - mean(ln x)`.
    ///
    /// The MLE of `beta` for known multipliers solves `h(beta) = 1/beta`.
    /// Powers are taken relative to `x_r` so large `beta` does not overflow.
    pub fn shape_h(&self, weights: &[f64], beta: f64) -> f64 {
        let lmax = self.sample.last().ln();
        lmax - self.log_eta / self.r() as f64 + self.shape_h_gap(weights, beta)
    }

    /// `h(beta) - (ln x_r - mean(ln x))`, i.e. `h` less its limit as
    /// `beta -> inf`. Keeps full relative precision where `h` itself has
    /// converged to that limit in floating point.
    pub fn shape_h_gap(&self, weights: &[f64], beta: f64) -> f64 {
        let lmax = self.sample.last().ln();
        let (mut num, mut den) = (CompensatedSum::new(), CompensatedSum::new());
        for (w, lx) in weights.iter().zip(&self.log_times) {
            let v = w * (beta * (lx - lmax)).exp();
            den.add(v);
            num.add(v * (lx - lmax));
        }
        num.value() / den.value()
    }

    /// `h'(beta)`: the weighted variance of `ln x` under weights `w x^beta`.
    pub fn shape_h_derivative(&self, weights: &[f64], beta: f64) -> f64 {
        let (m1, den) = self.shape_ratio_parts(weights, beta, 1);
        let (m2, _) = self.shape_ratio_parts(weights, beta, 2);
        let mean = m1 / den;
        m2 / den - mean * mean
    }

    fn shape_ratio_parts(&self, weights: &[f64], beta: f64, power: i32) -> (f64, f64) {
        let lmax = self.sample.last().ln();
        let (mut num, mut den) = (CompensatedSum::new(), CompensatedSum::new());
        for (w, lx) in weights.iter().zip(&self.log_times) {
            let v = w * (beta * (lx - lmax)).exp();
            den.add(v);
            num.add(v * lx.powi(power));
        }
        (num.value(), den.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSums {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
}

/// `ln(n!/(n-r)!)`, omitted from every log-likelihood returned by this module.
pub fn log_constant(sample: &SosSample) -> f64 {
    log_falling_factorial(sample.n(), sample.r())
}

fn check_weibull(p: &WeibullParams) -> Result<()> {
    check_positive("beta", p.beta)?;
    check_positive("sigma", p.sigma)
}

/// Weibull log-likelihood from precomputed weights.
pub fn loglik_with_weights(stats: &SufficientStats<'_>, hw: &HazardWeights, p: &WeibullParams) -> f64 {
    let r = stats.r() as f64;
    let ps = stats.power_sums(&hw.w, p.beta, p.sigma);
    r * p.beta.ln() - r * p.beta * p.sigma.ln() + (p.beta - 1.0) * stats.log_eta() + hw.log_alpha_sum - ps.s0
}

/// Weibull log-likelihood of a SOS sample (without `ln(n!/(n-r)!)`).
pub fn loglik_weibull(sample: &SosSample, scheme: &MultiplierScheme, p: &WeibullParams) -> Result<f64> {
    check_weibull(p)?;
    let hw = scheme.weights(sample.n(), sample.r())?;
    Ok(loglik_with_weights(&SufficientStats::new(sample), &hw, p))
}

/// Exponential log-likelihood; the Weibull case `beta = 1`.
pub fn loglik_exponential(sample: &SosSample, scheme: &MultiplierScheme, p: &ExpParams) -> Result<f64> {
    check_positive("sigma", p.sigma)?;
    loglik_weibull(sample, scheme, &p.as_weibull())
}

/// Score of the power-trend Weibull model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub beta: f64,
    pub sigma: f64,
    pub a: f64,
}

impl Score {
    pub fn max_abs(&self) -> f64 {
        self.beta.abs().max(self.sigma.abs()).max(self.a.abs())
    }
}

/// `(dl/dbeta, dl/dsigma, dl/da)` for `alpha_j = a^j`.
pub fn score_ptcphm(sample: &SosSample, a: f64, p: &WeibullParams) -> Result<Score> {
    check_weibull(p)?;
    check_positive("a", a)?;
    let hw = MultiplierScheme::PowerTrend { a }.weights(sample.n(), sample.r())?;
    Ok(score_with_weights(&SufficientStats::new(sample), &hw, a, p))
}

pub(crate) fn score_with_weights(stats: &SufficientStats<'_>, hw: &HazardWeights, a: f64, p: &WeibullParams) -> Score {
    let r = stats.r() as f64;
    let (beta, sigma) = (p.beta, p.sigma);
    let ps = stats.power_sums(&hw.w, beta, sigma);
    let sum_l = stats.log_eta() - r * sigma.ln();
    let d_beta = r / beta + sum_l - ps.s1;
    let d_sigma = beta / sigma * (ps.s0 - r);
    let d_a = match &hw.dw {
        Some(dw) => {
            let pd = stats.power_sums(dw, beta, sigma);
            (r * (r + 1.0)) / (2.0 * a) - pd.s0
        }
        None => 0.0,
    };
    Score {
        beta: d_beta,
        sigma: d_sigma,
        a: d_a,
    }
}

/// Which closed forms to use for the observed information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InformationFormula {
    /// The exact negative Hessian of the log-likelihood.
    #[default]
    Exact,
    /// Closed forms whose `sigma`-`a` cross term carries an extra `ln x_j`
    /// factor inside its sum. Not a derivative of the log-likelihood; kept to
    /// reproduce information matrices computed that way.
    AsPrinted,
}

/// Negative second derivatives in the order `(beta, sigma, a)`.
///
/// For explicit multipliers the `a` row and column are zero.
pub(crate) fn neg_hessian_with_weights(
    stats: &SufficientStats<'_>,
    hw: &HazardWeights,
    a: f64,
    p: &WeibullParams,
    formula: InformationFormula,
) -> [[f64; 3]; 3] {
    let r = stats.r() as f64;
    let (beta, sigma) = (p.beta, p.sigma);
    let ps = stats.power_sums(&hw.w, beta, sigma);
    let w11 = r / (beta * beta) + ps.s2;
    let w12 = r / sigma - ps.s0 / sigma - beta / sigma * ps.s1;
    let w22 = beta / (sigma * sigma) * ((beta + 1.0) * ps.s0 - r);
    let (mut w13, mut w23, mut w33) = (0.0, 0.0, 0.0);
    if let (Some(dw), Some(d2w)) = (&hw.dw, &hw.d2w) {
        let pd = stats.power_sums(dw, beta, sigma);
        let pdd = stats.power_sums(d2w, beta, sigma);
        w13 = pd.s1;
        w23 = match formula {
            InformationFormula::Exact => -beta / sigma * pd.s0,
            // sum w'_j u_j ln x_j = s1 + ln(sigma) s0
            InformationFormula::AsPrinted => -beta / sigma * (pd.s1 + sigma.ln() * pd.s0),
        };
        w33 = r * (r + 1.0) / (2.0 * a * a) + pdd.s0;
    }
    [[w11, w12, w13], [w12, w22, w23], [w13, w23, w33]]
}

/// Negative Hessian of the power-trend Weibull log-likelihood at `(beta, sigma, a)`.
pub fn neg_hessian_ptcphm(
    sample: &SosSample,
    a: f64,
    p: &WeibullParams,
    formula: InformationFormula,
) -> Result<[[f64; 3]; 3]> {
    check_weibull(p)?;
    check_positive("a", a)?;
    let hw = MultiplierScheme::PowerTrend { a }.weights(sample.n(), sample.r())?;
    Ok(neg_hessian_with_weights(&SufficientStats::new(sample), &hw, a, p, formula))
}

/// Negative Hessian in `(beta, sigma)` for a fixed multiplier scheme.
pub fn neg_hessian_known(sample: &SosSample, scheme: &MultiplierScheme, p: &WeibullParams) -> Result<[[f64; 2]; 2]> {
    check_weibull(p)?;
    let hw = scheme.weights(sample.n(), sample.r())?;
    let m = neg_hessian_with_weights(
        &SufficientStats::new(sample),
        &hw,
        scheme.trend().unwrap_or(1.0),
        p,
        InformationFormula::Exact,
    );
    Ok([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])
}

/// Guard used by the fitters: rejects samples that cannot identify a shape.
pub(crate) fn require_identifiable(sample: &SosSample) -> Result<()> {
    if sample.r() < 2 {
        return Err(SosError::Unidentifiable { r: sample.r() });
    }
    Ok(())
}
