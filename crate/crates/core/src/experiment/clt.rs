//! Normality diagnostics for the log-automorphism and log-probability
//! statistics of random trees.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{shape, Moments};
use crate::constants::reference;
use crate::error::{Error, Result};
use crate::random::{pbst_neg_log2, sample, ModelKind, Seed};
use crate::tree::{sym_count, Tree};

pub const MIN_TRIALS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CltStatistic {
    /// `log2 |Aut(t)|` of a uniform tree; slope `gamma`.
    Log2AutUniform,
    /// `log2(1/P_bst(t))` of a BST; slope `mu`.
    Log2BstWeight,
    /// `log2 |Aut(t)|` of a BST; slope `nu`.
    SymBst,
}

impl CltStatistic {
    pub const ALL: [CltStatistic; 3] = [
        CltStatistic::Log2AutUniform,
        CltStatistic::Log2BstWeight,
        CltStatistic::SymBst,
    ];

    pub fn model(self) -> ModelKind {
        match self {
            CltStatistic::Log2AutUniform => ModelKind::Uniform,
            CltStatistic::Log2BstWeight | CltStatistic::SymBst => ModelKind::Bst,
        }
    }

    pub fn target_slope(self) -> f64 {
        match self {
            CltStatistic::Log2AutUniform => reference::GAMMA,
            CltStatistic::Log2BstWeight => reference::MU,
            CltStatistic::SymBst => reference::NU,
        }
    }

    pub fn evaluate(self, t: &Tree) -> f64 {
        match self {
            CltStatistic::Log2AutUniform | CltStatistic::SymBst => sym_count(t) as f64,
            CltStatistic::Log2BstWeight => pbst_neg_log2(t),
        }
    }
}

impl fmt::Display for CltStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CltStatistic::Log2AutUniform => "log2_aut_uniform",
            CltStatistic::Log2BstWeight => "log2_bst_weight",
            CltStatistic::SymBst => "sym_bst",
        })
    }
}

impl FromStr for CltStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CltStatistic::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown statistic {s:?}; expected log2_aut_uniform, log2_bst_weight or sym_bst"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub statistic: CltStatistic,
    pub k: u64,
    pub trials: u64,
    pub seed: Seed,
    pub values: Vec<f64>,
    /// `(x - mean) / stddev`; empty when degenerate.
    pub standardized: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// `variance / k`.
    pub variance_per_k: f64,
    /// `mean / k`.
    pub slope: f64,
    pub target_slope: f64,
    pub slope_relative_error: f64,
    /// Zero sample variance: no shape statistics.
    pub degenerate: bool,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub jarque_bera: Option<f64>,
    pub normality_p: Option<f64>,
}

pub fn clt_sample(statistic: CltStatistic, k: u64, trials: u64, seed: Seed) -> Result<CltReport> {
    if k == 0 {
        return Err(Error::out_of_range("k", k, "k >= 1"));
    }
    if trials < MIN_TRIALS {
        return Err(Error::out_of_range(
            "trials",
            trials,
            format!("trials >= {MIN_TRIALS}"),
        ));
    }
    let model = statistic.model();
    let values = (0..trials)
        .into_par_iter()
        .map(|i| Ok(statistic.evaluate(&sample(model, k, &mut seed.stream(i))?)))
        .collect::<Result<Vec<f64>>>()?;
    let m = Moments::of(&values);
    let shape = shape(&values);
    let standardized = match shape {
        Some(_) => {
            let sd = m.stddev();
            values.iter().map(|x| (x - m.mean) / sd).collect()
        }
        None => Vec::new(),
    };
    let slope = m.mean / k as f64;
    let target = statistic.target_slope();
    Ok(CltReport {
        statistic,
        k,
        trials,
        seed,
        mean: m.mean,
        variance: m.variance,
        variance_per_k: m.variance / k as f64,
        slope,
        target_slope: target,
        slope_relative_error: (slope - target).abs() / target,
        degenerate: shape.is_none(),
        skewness: shape.map(|s| s.skewness),
        excess_kurtosis: shape.map(|s| s.excess_kurtosis),
        jarque_bera: shape.map(|s| s.jarque_bera),
        normality_p: shape.map(|s| s.p_value),
        values,
        standardized,
    })
}
