//! Baseline lifetime distributions of the form `F(x) = 1 - exp(-k(x))`.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Result, SosError};

/// A baseline distribution described by its cumulative hazard `k(x)`.
///
/// `k` must be strictly increasing with `k(0+) = 0` and `k(x) -> inf`.
pub trait BaselineFamily: Send + Sync {
    fn cum_hazard(&self, x: f64) -> f64;

    /// `k'(x)`, the hazard rate.
    fn hazard(&self, x: f64) -> f64;

    fn inverse_cum_hazard(&self, u: f64) -> f64;

    fn params(&self) -> Vec<f64>;

    fn survival(&self, x: f64) -> f64 {
        (-self.cum_hazard(x)).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        -(-self.cum_hazard(x)).exp_m1()
    }

    fn pdf(&self, x: f64) -> f64 {
        self.hazard(x) * self.survival(x)
    }
}

/// Weibull with `k(x) = (x / sigma)^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    pub beta: f64,
    pub sigma: f64,
}

impl WeibullParams {
    pub fn new(beta: f64, sigma: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        check_positive("sigma", sigma)?;
        Ok(Self { beta, sigma })
    }
}

impl BaselineFamily for WeibullParams {
    fn cum_hazard(&self, x: f64) -> f64 {
        (x / self.sigma).powf(self.beta)
    }

    fn hazard(&self, x: f64) -> f64 {
        self.beta / self.sigma * (x / self.sigma).powf(self.beta - 1.0)
    }

    fn inverse_cum_hazard(&self, u: f64) -> f64 {
        self.sigma * u.powf(1.0 / self.beta)
    }

    fn params(&self) -> Vec<f64> {
        vec![self.beta, self.sigma]
    }
}

/// Exponential with mean `sigma`; the Weibull with `beta = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpParams {
    pub sigma: f64,
}

impl ExpParams {
    pub fn new(sigma: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        Ok(Self { sigma })
    }

    pub fn as_weibull(&self) -> WeibullParams {
        WeibullParams {
            beta: 1.0,
            sigma: self.sigma,
        }
    }
}

impl BaselineFamily for ExpParams {
    fn cum_hazard(&self, x: f64) -> f64 {
        x / self.sigma
    }

    fn hazard(&self, _x: f64) -> f64 {
        1.0 / self.sigma
    }

    fn inverse_cum_hazard(&self, u: f64) -> f64 {
        self.sigma * u
    }

    fn params(&self) -> Vec<f64> {
        vec![self.sigma]
    }
}

/// `(x/sigma)^beta`, rejecting `x <= 0`.
pub fn weibull_cum_hazard(x: f64, p: &WeibullParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(SosError::Domain(format!("cumulative hazard needs x > 0, got {x}")));
    }
    Ok(p.cum_hazard(x))
}
