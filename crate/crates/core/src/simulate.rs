//! Sampling sequential order statistics and Monte Carlo studies.
//!
//! Given `x_{j-1}`, the `n-j+1` survivors fail at rate `alpha_j h(t)` each,
//! so the increments `(n-j+1) alpha_j (k(x_j) - k(x_{j-1}))` are independent
//! standard exponentials. [`sample_sos`] draws them and maps the cumulated
//! values back through `k^-1`.
//!
//! Replicate `i` of grid cell `c` always reads ChaCha8 stream
//! `(c << 32) | i` of the study seed, so results do not depend on how
//! replicates are spread over threads.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{BaselineFamily, WeibullParams};
use crate::error::{Result, SosError};
use crate::estimation::{fit_weibull_known_alpha, fit_weibull_ptcphm, TrendDomain};
use crate::hypothesis::{glr_from_fits, GlrOptions, NullHypothesis, PValueRule, TestBaseline};
use crate::sample::{validate_sample, SosSample};
use crate::scheme::MultiplierScheme;

/// A reproducible substream: `(seed, index)` fixes every draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    /// Stream for replicate `replicate` of grid cell `cell`.
    pub fn for_replicate(seed: u64, cell: u32, replicate: u32) -> Self {
        Self::new(seed, (u64::from(cell) << 32) | u64::from(replicate))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}

/// Draw the first `r` of `n` sequential order statistics.
pub fn sample_sos<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    scheme: &MultiplierScheme,
    baseline: &dyn BaselineFamily,
    rng: &mut R,
) -> Result<SosSample> {
    if r == 0 {
        return Err(SosError::EmptySample);
    }
    if r > n {
        return Err(SosError::CountExceedsSize { r, n });
    }
    scheme.check(r)?;
    let mut h = 0.0;
    let mut times = Vec::with_capacity(r);
    for j in 1..=r {
        let e: f64 = rng.sample(Exp1);
        h += e / ((n - j + 1) as f64 * scheme.alpha(j));
        times.push(baseline.inverse_cum_hazard(h));
    }
    validate_sample(&times, n)
}

/// Study configuration, read from TOML:
///
/// ```toml
/// seed = 2024
/// replicates = 1000
/// gamma = 0.05
/// output = "level.csv"        # optional
/// boundary_mixture = false    # optional
///
/// [grid]
/// n = [13]
/// r = [10]
/// beta = [1.5]
/// sigma = [2.0]
/// a = [1.0, 1.1]
/// ```
///
/// Every combination of the grid values is a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub seed: u64,
    pub replicates: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub boundary_mixture: bool,
    pub grid: StudyGrid,
}

fn default_gamma() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyGrid {
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub r: Vec<usize>,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub sigma: Vec<f64>,
    #[serde(default)]
    pub a: Vec<f64>,
}

/// One simulation setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyCell {
    pub n: usize,
    pub r: usize,
    pub beta: f64,
    pub sigma: f64,
    pub a: f64,
}

impl StudyGrid {
    pub fn cells(&self) -> Vec<StudyCell> {
        let mut cells = Vec::new();
        for &n in &self.n {
            for &r in &self.r {
                for &beta in &self.beta {
                    for &sigma in &self.sigma {
                        for &a in &self.a {
                            cells.push(StudyCell { n, r, beta, sigma, a });
                        }
                    }
                }
            }
        }
        cells
    }
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl StudyConfig {
    /// Parse and validate. All schema violations are reported together, each
    /// with the line it refers to.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: StudyConfig = toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| format!("line {}: ", text[..s.start].matches('\n').count() + 1))
                .unwrap_or_default();
            SosError::Config(format!("{at}{}", e.message()))
        })?;
        let mut problems = Vec::new();
        let mut flag = |key: &str, msg: String| {
            let at = line_of(text, key).map(|l| format!("line {l}: ")).unwrap_or_default();
            problems.push(format!("{at}{msg}"));
        };
        if !(cfg.gamma >= 0.0 && cfg.gamma < 1.0) {
            flag("gamma", format!("gamma must lie in [0, 1), got {}", cfg.gamma));
        }
        if cfg.grid.n.contains(&0) {
            flag("n", "system sizes must be positive".into());
        }
        if cfg.grid.r.iter().any(|&r| r < 2) {
            flag("r", "failure counts must be at least 2".into());
        }
        if let (Some(&rmax), Some(&nmin)) = (cfg.grid.r.iter().max(), cfg.grid.n.iter().min()) {
            if rmax > nmin {
                flag("r", format!("failure count {rmax} exceeds system size {nmin}"));
            }
        }
        for (key, values) in [("beta", &cfg.grid.beta), ("sigma", &cfg.grid.sigma), ("a", &cfg.grid.a)] {
            if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                flag(key, format!("{key} values must be positive and finite, got {v}"));
            }
        }
        if cfg.replicates > u32::MAX as usize {
            flag("replicates", "too many replicates".into());
        }
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(SosError::Config(problems.join("; ")))
        }
    }
}

/// Summary statistic of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub cell: usize,
    pub setting: StudyCell,
    pub metric: String,
    /// `None` when too many replicates of the cell failed.
    pub value: Option<f64>,
    pub replicates_used: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
}

const CSV_HEADER: [&str; 10] = ["cell", "n", "r", "beta", "sigma", "a", "metric", "value", "replicates_used", "failures"];

impl StudyReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| SosError::Config(format!("writing CSV: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for row in &self.rows {
            let s = &row.setting;
            let value = row.value.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                row.cell.to_string(),
                s.n.to_string(),
                s.r.to_string(),
                s.beta.to_string(),
                s.sigma.to_string(),
                s.a.to_string(),
                row.metric.clone(),
                value,
                row.replicates_used.to_string(),
                row.failures.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| SosError::Config(format!("writing CSV: {e}")))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn get(&self, cell: usize, metric: &str) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.cell == cell && r.metric == metric)
    }
}

struct Replicate {
    beta: f64,
    sigma: f64,
    a: f64,
    iid_beta: f64,
    iid_sigma: f64,
    reject: bool,
}

fn run_replicate(cell: &StudyCell, stream: RngStream, opts: &GlrOptions) -> Result<Replicate> {
    let baseline = WeibullParams::new(cell.beta, cell.sigma)?;
    let scheme = MultiplierScheme::power_trend(cell.a)?;
    let sample = sample_sos(cell.n, cell.r, &scheme, &baseline, &mut stream.rng())?;
    let free = fit_weibull_ptcphm(&sample, TrendDomain::Free)?;
    let null = fit_weibull_known_alpha(&sample, &MultiplierScheme::iid())?;
    let (iid_beta, iid_sigma) = (null.beta, null.sigma);
    let test = glr_from_fits(&sample, NullHypothesis::TrendOne, TestBaseline::Weibull, null, free.clone(), opts)?;
    Ok(Replicate {
        beta: free.beta,
        sigma: free.sigma,
        a: free.a,
        iid_beta,
        iid_sigma,
        reject: test.reject,
    })
}

/// Failures are tolerated (and dropped) only while below 1% of the replicates.
pub(crate) fn failures_tolerable(failed: usize, total: usize) -> bool {
    failed * 100 < total
}

/// Run every grid cell: mean, bias and RMSE of the power-trend Weibull
/// estimates (`beta_*`, `sigma_*`, `a_*`) and of the `a = 1` Weibull
/// estimates (`iid_beta_*`, `iid_sigma_*`, whose bias is measured against the
/// generating `beta` and `sigma` whatever `a` is), and the rejection rate of
/// the GLR test of `a = 1` against `a > 1`.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    let mut report = StudyReport::default();
    if config.replicates == 0 {
        return Ok(report);
    }
    let rule = if config.boundary_mixture {
        PValueRule::BoundaryMixture
    } else {
        PValueRule::ChiSquare
    };
    let opts = GlrOptions {
        gamma: config.gamma,
        domain: TrendDomain::AtLeastOne,
        rule,
    };
    for (c, cell) in config.grid.cells().iter().enumerate() {
        let outcomes: Vec<Result<Replicate>> = (0..config.replicates)
            .into_par_iter()
            .map(|i| run_replicate(cell, RngStream::for_replicate(config.seed, c as u32, i as u32), &opts))
            .collect();
        let ok: Vec<&Replicate> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
        let failures = outcomes.len() - ok.len();
        let used = ok.len();
        let usable = failures_tolerable(failures, config.replicates) && used > 0;
        let mut push = |metric: &str, value: f64| {
            report.rows.push(StudyRow {
                cell: c,
                setting: *cell,
                metric: metric.to_string(),
                value: usable.then_some(value),
                replicates_used: used,
                failures,
            });
        };
        let m = used.max(1) as f64;
        for (name, truth, get) in [
            ("beta", cell.beta, (|r: &Replicate| r.beta) as fn(&Replicate) -> f64),
            ("sigma", cell.sigma, |r: &Replicate| r.sigma),
            ("a", cell.a, |r: &Replicate| r.a),
            ("iid_beta", cell.beta, |r: &Replicate| r.iid_beta),
            ("iid_sigma", cell.sigma, |r: &Replicate| r.iid_sigma),
        ] {
            let mean = ok.iter().map(|r| get(r)).sum::<f64>() / m;
            let mse = ok.iter().map(|r| (get(r) - truth).powi(2)).sum::<f64>() / m;
            push(&format!("{name}_mean"), mean);
            push(&format!("{name}_bias"), mean - truth);
            push(&format!("{name}_rmse"), mse.sqrt());
        }
        let rate = ok.iter().filter(|r| r.reject).count() as f64 / m;
        push("rejection_rate", rate);
        push("rejection_rate_se", (rate * (1.0 - rate) / m).sqrt());
    }
    Ok(report)
}

/// Human-oriented summary of a report.
pub fn render_study(report: &StudyReport) -> String {
    let mut out = String::new();
    for row in &report.rows {
        let s = &row.setting;
        let value = row.value.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            out,
            "cell {} (n={}, r={}, beta={}, sigma={}, a={}) {:<18} {value}",
            row.cell, s.n, s.r, s.beta, s.sigma, s.a, row.metric
        );
    }
    out
}
