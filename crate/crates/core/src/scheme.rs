//! Hazard multipliers of the conditionally proportional hazard rate model.
//!
//! After the `j`-th failure the survivors run with hazard `alpha_{j+1} h0(t)`.
//! The density of the first `r` failures among `n` units weights the baseline
//! cumulative hazard at `x_j` by `m_j + 1 = (n-j+1) alpha_j - (n-j) alpha_{j+1}`
//! for `j < r` and by `alpha_r (n-r+1)` at `x_r`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SosError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierScheme {
    /// Known multipliers `alpha_1..alpha_r` (more may be given; extras are ignored).
    Explicit { alpha: Vec<f64> },
    /// `alpha_j = a^j`.
    PowerTrend { a: f64 },
}

/// Per-observation weights on the cumulative hazard, with their derivatives in
/// `a` when the scheme is a power trend.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardWeights {
    /// `m_1+1, .., m_{r-1}+1, alpha_r (n-r+1)`.
    pub w: Vec<f64>,
    /// `d w_j / da`.
    pub dw: Option<Vec<f64>>,
    /// `d^2 w_j / da^2`.
    pub d2w: Option<Vec<f64>>,
    /// `sum_j log alpha_j`.
    pub log_alpha_sum: f64,
}

/// `m_j + 1` for `j = 1..r-1` together with the positions where it is not positive.
#[derive(Debug, Clone, PartialEq)]
pub struct MWeights {
    pub values: Vec<f64>,
    /// 1-based `j` of every nonpositive entry.
    pub nonpositive: Vec<usize>,
}

impl MWeights {
    pub fn all_positive(&self) -> bool {
        self.nonpositive.is_empty()
    }
}

impl MultiplierScheme {
    /// The iid order-statistics case.
    pub fn iid() -> Self {
        MultiplierScheme::PowerTrend { a: 1.0 }
    }

    pub fn explicit(alpha: Vec<f64>) -> Result<Self> {
        let s = MultiplierScheme::Explicit { alpha };
        s.check_positive()?;
        Ok(s)
    }

    pub fn power_trend(a: f64) -> Result<Self> {
        let s = MultiplierScheme::PowerTrend { a };
        s.check_positive()?;
        Ok(s)
    }

    fn check_positive(&self) -> Result<()> {
        match self {
            MultiplierScheme::Explicit { alpha } => {
                if alpha.is_empty() {
                    return Err(SosError::InvalidScheme("no multipliers given".into()));
                }
                if let Some((j, v)) = alpha
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v > 0.0))
                {
                    return Err(SosError::InvalidScheme(format!(
                        "alpha_{} = {v} is not positive",
                        j + 1
                    )));
                }
            }
            MultiplierScheme::PowerTrend { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(SosError::InvalidScheme(format!("a = {a} is not positive")));
                }
            }
        }
        Ok(())
    }

    /// Check the scheme supplies positive multipliers for `r` failures.
    pub fn check(&self, r: usize) -> Result<()> {
        self.check_positive()?;
        if let MultiplierScheme::Explicit { alpha } = self {
            if alpha.len() < r {
                return Err(SosError::InvalidScheme(format!(
                    "{} multipliers given for {r} failures",
                    alpha.len()
                )));
            }
        }
        Ok(())
    }

    /// `alpha_j`, 1-based. For explicit schemes the caller must have checked the length.
    pub fn alpha(&self, j: usize) -> f64 {
        match self {
            MultiplierScheme::Explicit { alpha } => alpha[j - 1],
            MultiplierScheme::PowerTrend { a } => a.powi(j as i32),
        }
    }

    pub fn is_power_trend(&self) -> bool {
        matches!(self, MultiplierScheme::PowerTrend { .. })
    }

    /// `a` for a power trend, `None` for explicit multipliers.
    pub fn trend(&self) -> Option<f64> {
        match self {
            MultiplierScheme::PowerTrend { a } => Some(*a),
            MultiplierScheme::Explicit { .. } => None,
        }
    }

    /// `m_j + 1` for `j = 1..r-1`; nonpositive entries are flagged, not rejected.
    pub fn m_plus_one(&self, n: usize, r: usize) -> MWeights {
        let values: Vec<f64> = (1..r)
            .map(|j| (n - j + 1) as f64 * self.alpha(j) - (n - j) as f64 * self.alpha(j + 1))
            .collect();
        let nonpositive = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v <= 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        MWeights { values, nonpositive }
    }

    /// Whether every `m_j + 1` is positive, the regime in which the Weibull
    /// shape equation has a unique root.
    pub fn is_regular(&self, n: usize, r: usize) -> bool {
        self.m_plus_one(n, r).all_positive()
    }

    /// Weights entering the log-likelihood for a design with `n` units and `r` failures.
    pub fn weights(&self, n: usize, r: usize) -> Result<HazardWeights> {
        self.check(r)?;
        if r > n {
            return Err(SosError::CountExceedsSize { r, n });
        }
        let mut w = self.m_plus_one(n, r).values;
        w.push(self.alpha(r) * (n - r + 1) as f64);
        let (dw, d2w, log_alpha_sum) = match self {
            MultiplierScheme::PowerTrend { a } => {
                let (dw, d2w) = power_trend_derivatives(*a, n, r);
                let tri = (r * (r + 1)) as f64 / 2.0;
                (Some(dw), Some(d2w), tri * a.ln())
            }
            MultiplierScheme::Explicit { alpha } => {
                (None, None, alpha[..r].iter().map(|v| v.ln()).sum())
            }
        };
        Ok(HazardWeights {
            w,
            dw,
            d2w,
            log_alpha_sum,
        })
    }
}

fn power_trend_derivatives(a: f64, n: usize, r: usize) -> (Vec<f64>, Vec<f64>) {
    // a^k with a^{-1}, a^{-2} handled through powi so a = 1 stays exact.
    let p = |k: i32| a.powi(k);
    let mut dw = Vec::with_capacity(r);
    let mut d2w = Vec::with_capacity(r);
    for j in 1..r {
        let up = (n - j + 1) as f64;
        let down = (n - j) as f64;
        let jf = j as f64;
        let ji = j as i32;
        dw.push(up * jf * p(ji - 1) - down * (jf + 1.0) * p(ji));
        d2w.push(up * jf * (jf - 1.0) * p(ji - 2) - down * (jf + 1.0) * jf * p(ji - 1));
    }
    let last = (n - r + 1) as f64;
    let rf = r as f64;
    let ri = r as i32;
    dw.push(last * rf * p(ri - 1));
    d2w.push(last * rf * (rf - 1.0) * p(ri - 2));
    (dw, d2w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_multipliers_give_unit_weights() {
        let m = MultiplierScheme::explicit(vec![1.0; 10]).unwrap().m_plus_one(13, 10);
        assert_eq!(m.values, vec![1.0; 9]);
        assert!(m.all_positive());
        let m = MultiplierScheme::iid().m_plus_one(13, 10);
        assert_eq!(m.values, vec![1.0; 9]);
    }

    #[test]
    fn power_trend_first_weight() {
        let a = 1.04936;
        let m = MultiplierScheme::power_trend(a).unwrap().m_plus_one(13, 10);
        let expected = 13.0 * a - 12.0 * a * a;
        assert!((m.values[0] - expected).abs() < 1e-14);
        assert!((m.values[0] - 0.427803).abs() < 1e-6);
    }

    #[test]
    fn iid_reduces_last_weight() {
        let w = MultiplierScheme::iid().weights(13, 10).unwrap();
        assert_eq!(w.w.last().copied(), Some(4.0));
        assert_eq!(w.log_alpha_sum, 0.0);
    }

    #[test]
    fn trend_above_limit_is_flagged() {
        // n/(n-1) = 1.0833 for n = 13
        let s = MultiplierScheme::power_trend(1.2).unwrap();
        let m = s.m_plus_one(13, 10);
        assert!(!m.all_positive());
        assert_eq!(m.nonpositive[0], 1);
        assert!(s.weights(13, 10).is_ok());
    }

    #[test]
    fn rejects_bad_schemes() {
        assert!(MultiplierScheme::power_trend(0.0).is_err());
        assert!(MultiplierScheme::explicit(vec![1.0, -1.0]).is_err());
        let short = MultiplierScheme::explicit(vec![1.0, 2.0]).unwrap();
        assert!(matches!(short.weights(5, 3), Err(SosError::InvalidScheme(_))));
    }

    #[test]
    fn derivative_weights_match_finite_differences() {
        let (n, r, a, h) = (9, 6, 1.07, 1e-5);
        let w = |a: f64| MultiplierScheme::PowerTrend { a }.weights(n, r).unwrap().w;
        let exact = MultiplierScheme::PowerTrend { a }.weights(n, r).unwrap();
        let (hi, lo, mid) = (w(a + h), w(a - h), w(a));
        for j in 0..r {
            let d1 = (hi[j] - lo[j]) / (2.0 * h);
            let d2 = (hi[j] - 2.0 * mid[j] + lo[j]) / (h * h);
            assert!((d1 - exact.dw.as_ref().unwrap()[j]).abs() < 1e-6 * (1.0 + d1.abs()));
            assert!((d2 - exact.d2w.as_ref().unwrap()[j]).abs() < 1e-3 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn regular_below_limit_on_grid() {
        for n in 2..=30 {
            let limit = n as f64 / (n as f64 - 1.0);
            for r in 2..=n {
                for k in 0..50 {
                    let a = 1.0 + (limit - 1.0) * k as f64 / 50.0;
                    let s = MultiplierScheme::PowerTrend { a };
                    assert!(s.is_regular(n, r), "n={n} r={r} a={a}");
                }
            }
        }
    }
}
