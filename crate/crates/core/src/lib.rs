//! Lifetime models for Type-II censored sequential order statistics.
//!
//! A system of `n` components is observed until its `r`-th failure. After
//! each failure the survivors carry a higher load, modelled by hazard
//! multipliers `alpha_j` on a baseline hazard: either known values or the
//! power trend `alpha_j = a^j`, where `a = 1` is the usual iid order
//! statistics. This crate fits exponential and Weibull baselines by maximum
//! likelihood, builds observed-information intervals, runs likelihood-ratio
//! tests for `a = 1` and `beta = 1`, and simulates SOS data for Monte Carlo
//! calibration.
//!
//! ```
//! use sosfit::{estimation, sample};
//!
//! let times = [0.22, 0.50, 0.88, 1.00, 1.32, 1.33, 1.54, 1.76, 2.50, 3.00];
//! let s = sample::validate_sample(&times, 13).unwrap();
//! let cmp = estimation::fit_all(&s);
//! let best = cmp.best().unwrap();
//! assert!(best.aic.is_finite());
//! ```

// NaN must fail these checks, hence `!(x > 0.0)` rather than `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod error;
pub mod estimation;
pub mod hypothesis;
pub mod inference;
pub mod likelihood;
pub mod numeric;
pub mod sample;
pub mod scheme;
pub mod simulate;
pub mod solver;

pub use baseline::{BaselineFamily, ExpParams, WeibullParams};
pub use error::{Result, SosError};
pub use estimation::{FitResult, ModelId, Param, TrendDomain};
pub use sample::SosSample;
pub use scheme::MultiplierScheme;
