//! Concentration of fringe-subtree occurrence counts around their exact
//! means, and the tail count of large fringe subtrees.

use std::ops::RangeInclusive;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentConfig;
use crate::dag::{fringe_profile, ClassFilter};
use crate::error::{Error, Result};
use crate::exact::{expected_occurrences_uniform, expected_z_bst, to_f64, ExactRational};
use crate::random::{sample, ModelKind};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub k: u64,
    pub filter: ClassFilter,
    /// Exact `E(X_{n,k})` as `p/q`.
    pub expected_exact: String,
    pub expected: f64,
    /// Allowed deviation `|X - E(X)|`.
    pub bound: f64,
    pub violations: u64,
    pub trials: u64,
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    /// Fringe subtrees with more than `threshold` leaves are counted.
    pub threshold: u64,
    /// `n^(1 - epsilon/3)` (uniform) or `n^(1 - epsilon/2)` (BST).
    pub limit: f64,
    pub mean: f64,
    pub max: u64,
    /// Trials with tail count at most `limit`.
    pub within: u64,
    pub trials: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub model: ModelKind,
    pub n: u64,
    pub epsilon: f64,
    /// Cut-point coefficient `a`; admissible sizes are `a ln n <= k <= n^epsilon`.
    pub a: f64,
    pub admissible: Option<(u64, u64)>,
    pub rows: Vec<ConcentrationRow>,
    pub tail: TailCheck,
}

impl ConcentrationReport {
    pub fn max_violation_rate(&self) -> f64 {
        self.rows.iter().map(|r| r.rate).fold(0.0, f64::max)
    }
}

/// Integer sizes `k` with `a ln n <= k <= n^epsilon`, or `None` if empty.
pub fn admissible_range(cfg: &ExperimentConfig) -> Option<(u64, u64)> {
    let n = cfg.n as f64;
    let lo = (cfg.cut_point_rule.coefficient() * n.ln()).ceil().max(1.0) as u64;
    let hi = upper_size(cfg);
    (lo <= hi).then_some((lo, hi))
}

fn upper_size(cfg: &ExperimentConfig) -> u64 {
    // Guard against n^eps landing a hair below an integer.
    let x = (cfg.n as f64).powf(cfg.epsilon);
    let r = x.round();
    if (x - r).abs() < 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

/// Exact mean and deviation bound for one filter.
fn expectation_and_bound(
    cfg: &ExperimentConfig,
    filter: &ClassFilter,
) -> Result<(ExactRational, f64)> {
    let (n, k) = (cfg.n, filter.size);
    let weight = filter.weight()?;
    let spread = (n as f64).powf(0.5 + cfg.epsilon);
    match cfg.model {
        ModelKind::Uniform => {
            let s = weight.count.to_f64().unwrap_or(f64::INFINITY);
            let e = expected_occurrences_uniform(n, k, &weight.count)?;
            Ok((e, s.sqrt() * (-(k as f64)).exp2() * spread))
        }
        ModelKind::Bst => {
            let p = to_f64(&weight.bst_probability);
            let e = expected_z_bst(n, k)? * &weight.bst_probability;
            Ok((e, p.sqrt() / k as f64 * spread))
        }
    }
}

/// Per-trial counts of fringe subtrees accepted by `filter`, for trees of
/// size `cfg.n` drawn from `cfg.model`.
pub fn occurrence_counts(cfg: &ExperimentConfig, filter: &ClassFilter) -> Result<Vec<u64>> {
    cfg.validate()?;
    let filters = std::slice::from_ref(filter);
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let t = sample(cfg.model, cfg.n, &mut cfg.seed.stream(trial))?;
            Ok(fringe_profile(&t, cfg.n, filters).filtered[0])
        })
        .collect()
}

/// Violation rate of `|X_{n,k} - E(X_{n,k})| <= bound` for each size in
/// `k_range`, where `X_{n,k}` counts fringe subtrees accepted by
/// `filter(k)`, plus the tail check on fringe subtrees larger than
/// `n^epsilon`.
pub fn concentration_check<F>(
    cfg: &ExperimentConfig,
    k_range: RangeInclusive<u64>,
    filter: F,
) -> Result<ConcentrationReport>
where
    F: Fn(u64) -> ClassFilter,
{
    cfg.validate()?;
    let admissible = admissible_range(cfg);
    let (lo, hi) = admissible.ok_or_else(|| {
        Error::invalid(format!(
            "no admissible size: a ln n = {:.3} exceeds n^epsilon = {:.3}",
            cfg.cut_point_rule.coefficient() * (cfg.n as f64).ln(),
            (cfg.n as f64).powf(cfg.epsilon)
        ))
    })?;
    let (k_lo, k_hi) = (*k_range.start(), *k_range.end());
    if k_lo > k_hi {
        return Err(Error::invalid(format!("empty size range {k_lo}..={k_hi}")));
    }
    for k in [k_lo, k_hi] {
        if k < lo || k > hi {
            return Err(Error::out_of_range(
                "k",
                k,
                format!("admissible sizes {lo}..={hi}"),
            ));
        }
    }
    let filters: Vec<ClassFilter> = k_range
        .map(|k| {
            let f = filter(k);
            if f.size != k {
                return Err(Error::invalid(format!(
                    "filter for k = {k} has size {}",
                    f.size
                )));
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;
    let targets = filters
        .iter()
        .map(|f| expectation_and_bound(cfg, f))
        .collect::<Result<Vec<_>>>()?;

    let threshold = upper_size(cfg);
    let samples = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let t = sample(cfg.model, cfg.n, &mut cfg.seed.stream(trial))?;
            let profile = fringe_profile(&t, threshold, &filters);
            Ok((profile.filtered, profile.tail))
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = filters
        .iter()
        .zip(&targets)
        .enumerate()
        .map(|(i, (f, (e, bound)))| {
            let expected = to_f64(e);
            let violations = samples
                .iter()
                .filter(|(counts, _)| (counts[i] as f64 - expected).abs() > *bound)
                .count() as u64;
            ConcentrationRow {
                k: f.size,
                filter: f.clone(),
                expected_exact: e.to_string(),
                expected,
                bound: *bound,
                violations,
                trials: cfg.trials,
                rate: violations as f64 / cfg.trials as f64,
            }
        })
        .collect();

    let n = cfg.n as f64;
    let limit = match cfg.model {
        ModelKind::Uniform => n.powf(1.0 - cfg.epsilon / 3.0),
        ModelKind::Bst => n.powf(1.0 - cfg.epsilon / 2.0),
    };
    let tails: Vec<u64> = samples.iter().map(|(_, y)| *y).collect();
    let within = tails.iter().filter(|&&y| y as f64 <= limit).count() as u64;
    let tail = TailCheck {
        threshold,
        limit,
        mean: tails.iter().sum::<u64>() as f64 / cfg.trials as f64,
        max: tails.iter().copied().max().unwrap_or(0),
        within,
        trials: cfg.trials,
        rate: within as f64 / cfg.trials as f64,
    };

    Ok(ConcentrationReport {
        model: cfg.model,
        n: cfg.n,
        epsilon: cfg.epsilon,
        a: cfg.cut_point_rule.coefficient(),
        admissible,
        rows,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::CutPointRule;
    use crate::random::Seed;

    fn config(model: ModelKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(model, 4096, 40, Seed(3));
        cfg.epsilon = 0.3;
        cfg.cut_point_rule = CutPointRule::Custom(0.25);
        cfg
    }

    #[test]
    fn range_of_sizes() {
        let cfg = config(ModelKind::Uniform);
        // 0.25 ln 4096 = 2.08, 4096^0.3 = 12.1
        assert_eq!(admissible_range(&cfg), Some((3, 12)));
        let mut cfg = ExperimentConfig::new(ModelKind::Uniform, 100_000, 1, Seed(0));
        cfg.epsilon = 1.0 / 6.0;
        assert_eq!(admissible_range(&cfg), None);
        cfg.cut_point_rule = CutPointRule::Custom(0.25);
        assert_eq!(admissible_range(&cfg), Some((3, 6)));
    }

    #[test]
    fn empty_filter_never_violates() {
        let cfg = config(ModelKind::Bst);
        let r = concentration_check(&cfg, 3..=6, ClassFilter::empty).unwrap();
        for row in &r.rows {
            assert_eq!(row.expected_exact, "0");
            assert_eq!(row.violations, 0);
        }
    }

    #[test]
    fn exact_means_in_rows() {
        let cfg = config(ModelKind::Uniform);
        let r = concentration_check(&cfg, 3..=5, ClassFilter::all).unwrap();
        for row in &r.rows {
            let s = crate::exact::catalan(row.k - 1);
            let e = expected_occurrences_uniform(4096, row.k, &s).unwrap();
            assert_eq!(row.expected_exact, e.to_string());
        }
    }

    #[test]
    fn sizes_outside_range_rejected() {
        let cfg = config(ModelKind::Uniform);
        assert!(concentration_check(&cfg, 2..=5, ClassFilter::all).is_err());
        assert!(concentration_check(&cfg, 3..=13, ClassFilter::all).is_err());
    }
}
