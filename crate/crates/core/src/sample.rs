//! Type-II censored samples of sequential order statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SosError};

/// The first `r` failure times observed in a system of `n` components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosSample {
    n: usize,
    times: Vec<f64>,
    input_sorted: bool,
    has_ties: bool,
}

impl SosSample {
    /// System size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of observed failures.
    pub fn r(&self) -> usize {
        self.times.len()
    }

    /// Failure times in nondecreasing order.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Whether the raw input was already in nondecreasing order.
    pub fn input_sorted(&self) -> bool {
        self.input_sorted
    }

    /// Whether two or more observed times coincide.
    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    pub fn is_complete(&self) -> bool {
        self.r() == self.n
    }

    /// All observed times are equal (the Weibull shape is then unbounded).
    pub fn is_degenerate(&self) -> bool {
        self.first() == self.last()
    }

    /// Same design with every time multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<SosSample> {
        let raw: Vec<f64> = self.times.iter().map(|t| t * c).collect();
        validate_sample(&raw, self.n)
    }
}

/// Check raw failure times against a system of size `n` and sort them.
pub fn validate_sample(raw: &[f64], n: usize) -> Result<SosSample> {
    if raw.is_empty() {
        return Err(SosError::EmptySample);
    }
    if raw.len() > n {
        return Err(SosError::CountExceedsSize { r: raw.len(), n });
    }
    for (i, &t) in raw.iter().enumerate() {
        if !t.is_finite() {
            return Err(SosError::NonFiniteTime { index: i + 1 });
        }
        if t <= 0.0 {
            return Err(SosError::NonPositiveTime { index: i + 1, value: t });
        }
    }
    let input_sorted = raw.windows(2).all(|w| w[0] <= w[1]);
    let mut times = raw.to_vec();
    if !input_sorted {
        times.sort_by(|a, b| a.total_cmp(b));
    }
    let has_ties = times.windows(2).any(|w| w[0] == w[1]);
    Ok(SosSample {
        n,
        times,
        input_sorted,
        has_ties,
    })
}

/// A dataset read from the plain-text format: one time per line, `#` comments,
/// and an optional `# n=<int>` header giving the system size.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub sample: SosSample,
    /// `true` when `n` came from a header rather than the line count.
    pub n_from_header: bool,
}

/// Parse the dataset text format. Errors carry 1-based line numbers.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut header_n = None;
    let mut times = Vec::new();
    let mut lines = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("n=").or_else(|| comment.strip_prefix("n =")) {
                let n = value.trim().parse::<usize>().map_err(|_| {
                    SosError::Domain(format!("line {}: bad system size header '{line}'", lineno + 1))
                })?;
                if header_n.replace(n).is_some() {
                    return Err(SosError::Domain(format!(
                        "line {}: duplicate system size header",
                        lineno + 1
                    )));
                }
            }
            continue;
        }
        let t = line.parse::<f64>().map_err(|_| {
            SosError::Domain(format!("line {}: cannot parse '{line}' as a failure time", lineno + 1))
        })?;
        times.push(t);
        lines.push(lineno + 1);
    }
    let n = header_n.unwrap_or(times.len());
    let sample = validate_sample(&times, n).map_err(|e| match e {
        SosError::NonPositiveTime { index, value } => SosError::Domain(format!(
            "line {}: failure time {value} is not positive",
            lines[index - 1]
        )),
        SosError::NonFiniteTime { index } => {
            SosError::Domain(format!("line {}: failure time is not finite", lines[index - 1]))
        }
        other => other,
    })?;
    Ok(Dataset {
        sample,
        n_from_header: header_n.is_some(),
    })
}
