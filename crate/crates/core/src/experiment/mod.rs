//! Monte Carlo experiments: DAG-size band checks, occurrence-count
//! concentration, and central-limit diagnostics.
//!
//! Trial `i` always samples from `seed.stream(i)`. Trials run in parallel
//! and are collected in trial order before any reduction, so every record
//! is bit-identical regardless of the number of worker threads.

pub mod clt;
pub mod concentration;
pub mod counts;
pub mod export;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::reference;
use crate::error::{Error, Result};
use crate::random::{ModelKind, Seed};

pub use clt::{clt_sample, CltReport, CltStatistic};
pub use concentration::{concentration_check, ConcentrationReport};
pub use counts::{run_count_experiment, trend_check, ExperimentRecord, TrendReport};
pub use export::{export, write_export, ExportFormat, Exportable};

/// Default cap on `n * trials` for a single experiment.
pub const DEFAULT_BUDGET: u64 = 1 << 32;

/// How the lower end `a ln n` of the admissible size range is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutPointRule {
    /// `a = 1/ln 4`, i.e. `k >= log_4 n`.
    Log4,
    /// `a = 1/ln b`, i.e. `k >= log_b n`.
    LogB,
    Custom(f64),
}

impl CutPointRule {
    pub fn coefficient(self) -> f64 {
        match self {
            CutPointRule::Log4 => 1.0 / 4f64.ln(),
            CutPointRule::LogB => 1.0 / reference::B.ln(),
            CutPointRule::Custom(a) => a,
        }
    }
}

impl fmt::Display for CutPointRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutPointRule::Log4 => f.write_str("log4"),
            CutPointRule::LogB => f.write_str("logb"),
            CutPointRule::Custom(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for CutPointRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log4" => Ok(CutPointRule::Log4),
            "logb" => Ok(CutPointRule::LogB),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|a| a.is_finite() && *a > 0.0)
                .map(CutPointRule::Custom)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "cut-point rule must be log4, logb or a positive number, got {other:?}"
                    ))
                }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub n: u64,
    pub trials: u64,
    pub seed: Seed,
    /// Exponent of the upper size limit `n^epsilon`, in `(0, 1/3)`.
    pub epsilon: f64,
    /// In `(0, 2/3)`; widens the lower cut-point of the band arguments.
    pub delta: f64,
    pub cut_point_rule: CutPointRule,
    /// Multiplicative widening of the asymptotic bands.
    pub slack: f64,
    /// Upper limit on `n * trials`.
    pub budget: u64,
}

impl ExperimentConfig {
    pub fn new(model: ModelKind, n: u64, trials: u64, seed: Seed) -> Self {
        ExperimentConfig {
            model,
            n,
            trials,
            seed,
            epsilon: 1.0 / 6.0,
            delta: 0.5,
            cut_point_rule: CutPointRule::Log4,
            slack: 1.10,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 1 << 31 {
            return Err(Error::out_of_range("n", self.n, "1..=2^31"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 3.0) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1/3), got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 2.0 / 3.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 2/3), got {}",
                self.delta
            )));
        }
        let a = self.cut_point_rule.coefficient();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid(format!(
                "cut-point coefficient must be positive, got {a}"
            )));
        }
        if !(self.slack.is_finite() && self.slack >= 1.0) {
            return Err(Error::invalid(format!(
                "slack must be at least 1, got {}",
                self.slack
            )));
        }
        match self.n.checked_mul(self.trials) {
            Some(work) if work <= self.budget => Ok(()),
            _ => Err(Error::Budget(format!(
                "n * trials = {} * {} exceeds the budget of {}",
                self.n, self.trials, self.budget
            ))),
        }
    }
}
