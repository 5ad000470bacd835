//! DAG-size experiments: normalized minimal-DAG sizes of random trees
//! against the asymptotic bands.

use rayon::prelude::*;
use serde::Serialize;

use super::stats::Moments;
use super::ExperimentConfig;
use crate::constants::{derived_constants, reference, DerivedConstants};
use crate::dag::dag_sizes;
use crate::error::{Error, Result};
use crate::random::{sample, ModelKind, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n: u64,
    pub ordered_count: u64,
    pub unordered_count: u64,
    pub ordered_ratio: f64,
    pub unordered_ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let m = Moments::of(values);
        Summary {
            mean: m.mean,
            stddev: m.stddev(),
            min: m.min,
            max: m.max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Distance from `x` to the band, 0 inside.
    pub fn distance(&self, x: f64) -> f64 {
        (self.lower - x).max(x - self.upper).max(0.0)
    }

    pub fn widen(&self, slack: f64) -> Band {
        Band {
            lower: self.lower / slack,
            upper: self.upper * slack,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandVerdict {
    /// The asymptotic band for the normalized ratio.
    pub band: Band,
    pub slack: f64,
    pub widened: Band,
    pub mean: f64,
    pub within: bool,
}

impl BandVerdict {
    fn new(band: Band, slack: f64, mean: f64) -> Self {
        let widened = band.widen(slack);
        BandVerdict {
            band,
            slack,
            widened,
            mean,
            within: widened.contains(mean),
        }
    }
}

/// Asymptotic bands `(ordered, unordered)` for the normalized ratios.
///
/// Uniform trees: ordered `c`, unordered `[c1, c2]`, both against
/// `n / sqrt(ln n)`. BST trees: ordered `[c5, c6]`, unordered `[c3, c4]`,
/// both against `n / ln n`.
pub fn asymptotic_bands(model: ModelKind, d: &DerivedConstants) -> (Band, Band) {
    let band = |lower, upper| Band { lower, upper };
    match model {
        ModelKind::Uniform => (band(d.c, d.c), band(d.c1, d.c2)),
        ModelKind::Bst => (band(d.c5, d.c6), band(d.c3, d.c4)),
    }
}

/// `count * sqrt(ln n) / n` (uniform) or `count * ln n / n` (BST). For
/// `n = 1` the log factor is taken as 1.
pub fn normalized_ratio(model: ModelKind, n: u64, count: u64) -> f64 {
    let scale = if n <= 1 {
        1.0
    } else {
        let ln = (n as f64).ln();
        match model {
            ModelKind::Uniform => ln.sqrt(),
            ModelKind::Bst => ln,
        }
    };
    count as f64 * scale / n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub model: ModelKind,
    pub n: u64,
    pub trials: u64,
    pub seed: Seed,
    pub per_trial: Vec<TrialRecord>,
    pub ordered: Summary,
    pub unordered: Summary,
    pub ordered_band: BandVerdict,
    pub unordered_band: BandVerdict,
    /// `unordered_count <= ordered_count` in every trial.
    pub unordered_le_ordered: bool,
}

/// Band verdicts use the derived constants at the reference values of
/// `gamma`, `mu`, `nu`, `b`.
pub fn run_count_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    let constants =
        derived_constants(reference::GAMMA, reference::MU, reference::NU, reference::B)?;
    run_count_experiment_with(cfg, &constants)
}

pub fn run_count_experiment_with(
    cfg: &ExperimentConfig,
    constants: &DerivedConstants,
) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let (model, n) = (cfg.model, cfg.n);
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let t = sample(model, n, &mut cfg.seed.stream(trial))?;
            let sizes = dag_sizes(&t);
            Ok(TrialRecord {
                trial,
                n,
                ordered_count: sizes.ordered,
                unordered_count: sizes.unordered,
                ordered_ratio: normalized_ratio(model, n, sizes.ordered),
                unordered_ratio: normalized_ratio(model, n, sizes.unordered),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg, per_trial, constants))
}

fn summarize(
    cfg: &ExperimentConfig,
    per_trial: Vec<TrialRecord>,
    constants: &DerivedConstants,
) -> ExperimentRecord {
    let ordered: Vec<f64> = per_trial.iter().map(|r| r.ordered_ratio).collect();
    let unordered: Vec<f64> = per_trial.iter().map(|r| r.unordered_ratio).collect();
    let ordered = Summary::of(&ordered);
    let unordered = Summary::of(&unordered);
    let (ordered_band, unordered_band) = asymptotic_bands(cfg.model, constants);
    ExperimentRecord {
        model: cfg.model,
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        unordered_le_ordered: per_trial
            .iter()
            .all(|r| r.unordered_count <= r.ordered_count),
        ordered_band: BandVerdict::new(ordered_band, cfg.slack, ordered.mean),
        unordered_band: BandVerdict::new(unordered_band, cfg.slack, unordered.mean),
        ordered,
        unordered,
        per_trial,
    }
}

/// Sizes for the trend check.
pub const TREND_SIZES: [u64; 4] = [1 << 14, 1 << 16, 1 << 18, 1 << 20];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendPoint {
    pub n: u64,
    pub ordered_mean: f64,
    pub unordered_mean: f64,
    pub ordered_distance: f64,
    pub unordered_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendReport {
    pub model: ModelKind,
    pub points: Vec<TrendPoint>,
    /// Distance of the mean ordered ratio to its asymptotic band never
    /// increases with `n`.
    pub ordered_monotone: bool,
    pub unordered_monotone: bool,
}

/// Runs the count experiment at each size (stream offsets keep sizes
/// independent) and checks that the mean ratios approach their bands.
/// A step counts as monotone when the distance shrinks or stays within
/// two standard errors of the mean.
pub fn trend_check(
    model: ModelKind,
    sizes: &[u64],
    trials: u64,
    seed: Seed,
) -> Result<TrendReport> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "trend sizes must be at least two increasing values",
        ));
    }
    let constants =
        derived_constants(reference::GAMMA, reference::MU, reference::NU, reference::B)?;
    let (ordered_band, unordered_band) = asymptotic_bands(model, &constants);
    let mut points = Vec::with_capacity(sizes.len());
    let mut ordered_monotone = true;
    let mut unordered_monotone = true;
    let mut previous: Option<(f64, f64)> = None;
    for (i, &n) in sizes.iter().enumerate() {
        let mut cfg = ExperimentConfig::new(model, n, trials, Seed(seed.0.wrapping_add(i as u64)));
        cfg.budget = u64::MAX;
        let record = run_count_experiment_with(&cfg, &constants)?;
        let point = TrendPoint {
            n,
            ordered_mean: record.ordered.mean,
            unordered_mean: record.unordered.mean,
            ordered_distance: ordered_band.distance(record.ordered.mean),
            unordered_distance: unordered_band.distance(record.unordered.mean),
        };
        let noise = |s: &Summary| 2.0 * s.stddev / (trials as f64).sqrt();
        if let Some((prev_o, prev_u)) = previous {
            ordered_monotone &= point.ordered_distance <= prev_o + noise(&record.ordered);
            unordered_monotone &= point.unordered_distance <= prev_u + noise(&record.unordered);
        }
        previous = Some((point.ordered_distance, point.unordered_distance));
        points.push(point);
    }
    Ok(TrendReport {
        model,
        points,
        ordered_monotone,
        unordered_monotone,
    })
}
