//! Acceptance criteria, each run at its pinned tolerance. Prints one
//! PASS/FAIL line per criterion and exits non-zero on any failure that is
//! not listed in `KNOWN_FAILURES`.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use fringe_core::constants::{self, estimate_b, mu, nu, p_iso, reference, MU_TERMS, NU_TERMS};
use fringe_core::dag::{compress, ClassFilter};
use fringe_core::exact::{
    bst_probability, catalan, enumerate_trees, exact_distribution,
    expected_identical_pairs_uniform, expected_occurrences_uniform, expected_z_bst, to_f64,
    variance_occurrences_uniform, variance_z_bst_asymptotic, wedderburn_etherington,
};
use fringe_core::experiment::concentration::{admissible_range, occurrence_counts};
use fringe_core::experiment::counts::{trend_check, TREND_SIZES};
use fringe_core::experiment::stats::Moments;
use fringe_core::experiment::{
    clt_sample, concentration_check, export, run_count_experiment, CltStatistic, CutPointRule,
    ExperimentConfig, ExportFormat, Exportable,
};
use fringe_core::format::fmt_real;
use fringe_core::text::format_tree;
use fringe_core::tree::{canonical_code, left_comb, CanonTable, Tree};
use fringe_core::{ModelKind, Seed};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Criteria that fail for reasons documented with the project, with the
/// reason printed next to the FAIL line.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    6,
    "at k = 12 the exact variance is 0.678 of s_k 4^(1-k) n; the O(k^-1/2) term is not small",
)];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = Result<Verdict, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rational(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn fringe_subtrees(t: &Tree) -> Vec<Tree> {
    (0..t.node_count() as u32)
        .map(|id| t.fringe_subtree(id))
        .collect()
}

// 1. Exact identities against brute force over T_n, n <= 10.
fn exact_identities() -> Check {
    let mut checked = 0;
    for n in 1..=10u64 {
        for model in [ModelKind::Uniform, ModelKind::Bst] {
            // Per k: E(all size-k), E(left combs of size k), E(identical pairs).
            let mut all = vec![BigRational::zero(); n as usize + 1];
            let mut combs = vec![BigRational::zero(); n as usize + 1];
            let mut pairs = vec![BigRational::zero(); n as usize + 1];
            let comb_text: Vec<String> =
                (0..=n).map(|k| format_tree(&left_comb(k.max(1)))).collect();
            for (t, p) in exact_distribution(n, model).map_err(err)? {
                let mut by_shape: HashMap<String, u64> = HashMap::new();
                for s in fringe_subtrees(&t) {
                    *by_shape.entry(format_tree(&s)).or_default() += 1;
                }
                let mut all_k = vec![0u64; n as usize + 1];
                let mut comb_k = vec![0u64; n as usize + 1];
                let mut pair_k = vec![0u64; n as usize + 1];
                for (text, count) in &by_shape {
                    let k = text.matches('L').count();
                    all_k[k] += count;
                    pair_k[k] += count * (count - 1) / 2;
                    if *text == comb_text[k] {
                        comb_k[k] += count;
                    }
                }
                for k in 1..=n as usize {
                    all[k] += &p * BigRational::from_integer(all_k[k].into());
                    combs[k] += &p * BigRational::from_integer(comb_k[k].into());
                    pairs[k] += &p * BigRational::from_integer(pair_k[k].into());
                }
            }
            for k in 1..=n {
                let i = k as usize;
                match model {
                    ModelKind::Uniform => {
                        let s_all = catalan(k - 1);
                        let f_all = expected_occurrences_uniform(n, k, &s_all).map_err(err)?;
                        let f_comb =
                            expected_occurrences_uniform(n, k, &BigUint::one()).map_err(err)?;
                        let f_pairs = expected_identical_pairs_uniform(n, k).map_err(err)?;
                        if f_all != all[i] || f_comb != combs[i] || f_pairs != pairs[i] {
                            return Ok(Verdict::new(
                                false,
                                format!("uniform mismatch at n={n}, k={k}"),
                            ));
                        }
                    }
                    ModelKind::Bst => {
                        let z = expected_z_bst(n, k).map_err(err)?;
                        let p_comb = bst_probability(&left_comb(k));
                        if z != all[i] || &z * &p_comb != combs[i] {
                            return Ok(Verdict::new(
                                false,
                                format!("bst mismatch at n={n}, k={k}"),
                            ));
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(Verdict::new(
        true,
        format!("{checked} (model, n, k) cases equal as exact rationals"),
    ))
}

// 2. DAG sizes against distinct serializations and canonical codes, n <= 8.
fn dag_oracle() -> Check {
    let mut trees = 0;
    for n in 1..=8 {
        for t in enumerate_trees(n).map_err(err)? {
            let subtrees = fringe_subtrees(&t);
            let texts: HashSet<String> = subtrees.iter().map(format_tree).collect();
            let mut table = CanonTable::new();
            let codes: HashSet<_> = subtrees
                .iter()
                .map(|s| canonical_code(s, &mut table))
                .collect();
            let c = compress(&t);
            if c.ordered.len() != texts.len() || c.unordered.len() != codes.len() {
                return Ok(Verdict::new(false, format!("mismatch at {t}")));
            }
            trees += 1;
        }
    }
    Ok(Verdict::new(true, format!("{trees} trees")))
}

// 3. Counting sequences and the growth-rate estimate.
fn enumeration_sequences() -> Check {
    for n in 1..=12 {
        let count = enumerate_trees(n).map_err(err)?.count() as u64;
        if BigUint::from(count) != catalan(n - 1) {
            return Ok(Verdict::new(false, format!("catalan mismatch at n={n}")));
        }
    }
    for n in 1..=10 {
        let mut table = CanonTable::new();
        let classes: HashSet<_> = enumerate_trees(n)
            .map_err(err)?
            .map(|t| canonical_code(&t, &mut table))
            .collect();
        if BigUint::from(classes.len()) != wedderburn_etherington(n) {
            return Ok(Verdict::new(
                false,
                format!("class count mismatch at n={n}"),
            ));
        }
    }
    let b = estimate_b(500).map_err(err)?;
    let gap = (b - reference::B).abs();
    Ok(Verdict::new(
        gap <= 1e-3,
        format!(
            "C and W match for n<=12 / n<=10; b(500) = {} (|diff| {})",
            fmt_real(b),
            fmt_real(gap)
        ),
    ))
}

/// Exact `P_k^1` from the BST class distribution.
fn class_collision(k: u64) -> Result<BigRational, String> {
    let mut table = CanonTable::new();
    let mut classes: HashMap<_, BigRational> = HashMap::new();
    for t in enumerate_trees(k).map_err(err)? {
        let code = canonical_code(&t, &mut table);
        *classes.entry(code).or_insert_with(BigRational::zero) += bst_probability(&t);
    }
    Ok(classes.values().map(|q| q * q).sum())
}

// 4. Constants.
fn constants_check() -> Check {
    let m = mu(MU_TERMS).map_err(err)?;
    let certified = m.tail_bound <= 1e-5
        && m.partial_sum <= reference::MU + 5e-11
        && reference::MU <= m.partial_sum + m.tail_bound + 5e-11;
    let mu_gap = (m.value - reference::MU).abs();
    let v = nu(NU_TERMS).map_err(err)?;
    let nu_gap = (v.value - reference::NU).abs();

    let p4 = class_collision(4)?;
    let p5 = class_collision(5)?;
    let iso_ok = p4 == rational(5, 9)
        && p5 == rational(7, 18)
        && (p_iso(4, 1) - to_f64(&p4)).abs() <= 1e-15
        && (p_iso(5, 1) - to_f64(&p5)).abs() <= 1e-15;

    let report = constants::constants_report(reference::GAMMA).map_err(err)?;
    let d = report.derived;
    let derived = [
        (d.c, reference::C),
        (d.c1, reference::C1),
        (d.c2, reference::C2),
        (d.c3, reference::C3),
        (d.c4, reference::C4),
        (d.c5, reference::C5),
        (d.c6, reference::C6),
    ];
    let derived_gap = derived
        .iter()
        .map(|(x, r)| (x - r).abs())
        .fold(0.0, f64::max);
    let pass = certified && mu_gap <= 1e-8 && nu_gap <= 1e-8 && iso_ok && derived_gap <= 1e-9;
    Ok(Verdict::new(
        pass,
        format!(
            "mu tail bound {} certified={certified}, |mu-ref| {}; |nu-ref| {}; p_iso exact={iso_ok}; max derived gap {}",
            fmt_real(m.tail_bound),
            fmt_real(mu_gap),
            fmt_real(nu_gap),
            fmt_real(derived_gap)
        ),
    ))
}

// 5. Bands at n = 10^6 and the trend over n = 2^14 .. 2^20.
fn band_smoke() -> Check {
    let uniform = run_count_experiment(&ExperimentConfig::new(
        ModelKind::Uniform,
        1_000_000,
        20,
        Seed(5001),
    ))
    .map_err(err)?;
    let bst = run_count_experiment(&ExperimentConfig::new(
        ModelKind::Bst,
        1_000_000,
        20,
        Seed(5002),
    ))
    .map_err(err)?;
    let h = uniform.ordered.mean;
    let j = bst.ordered.mean;
    let g = bst.unordered.mean;
    let bands = (1.00..=1.45).contains(&h)
        && uniform.unordered_le_ordered
        && (2.0..=3.1).contains(&j)
        && (1.3..=2.1).contains(&g);
    let trend_u = trend_check(ModelKind::Uniform, &TREND_SIZES, 20, Seed(5003)).map_err(err)?;
    let trend_b = trend_check(ModelKind::Bst, &TREND_SIZES, 20, Seed(5004)).map_err(err)?;
    let trend = [&trend_u, &trend_b]
        .iter()
        .all(|t| t.ordered_monotone && t.unordered_monotone);
    Ok(Verdict::new(
        bands && trend,
        format!(
            "H {} in [1.00,1.45], F<=H {}; J {} in [2.0,3.1]; G {} in [1.3,2.1]; trend monotone {}",
            fmt_real(h),
            uniform.unordered_le_ordered,
            fmt_real(j),
            fmt_real(g),
            trend
        ),
    ))
}

// 6. Mean and variance of the size-12 occurrence count at n = 10^5.
fn lemma_moments() -> Check {
    let (n, k) = (100_000u64, 12u64);
    let all = ClassFilter::all(k);
    let uniform_cfg = ExperimentConfig::new(ModelKind::Uniform, n, 2000, Seed(6001));
    let counts = occurrence_counts(&uniform_cfg, &all).map_err(err)?;
    let x: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let m = Moments::of(&x);
    let s_k = catalan(k - 1);
    let exact_mean = to_f64(&expected_occurrences_uniform(n, k, &s_k).map_err(err)?);
    let exact_var = to_f64(&variance_occurrences_uniform(n, k, &s_k).map_err(err)?);
    let leading =
        to_f64(&BigRational::from_integer(s_k.into())) * 4f64.powi(1 - k as i32) * n as f64;
    let mean_err = (m.mean - exact_mean).abs() / exact_mean;
    let var_err = (m.variance - leading).abs() / leading;
    let var_exact_err = (m.variance - exact_var).abs() / exact_var;

    let bst_cfg = ExperimentConfig::new(ModelKind::Bst, n, 2000, Seed(6002));
    let bst_counts = occurrence_counts(&bst_cfg, &all).map_err(err)?;
    let y: Vec<f64> = bst_counts.iter().map(|&c| c as f64).collect();
    let bst_var = Moments::of(&y).variance;
    let bst_ref = variance_z_bst_asymptotic(n, k).map_err(err)?;
    let bst_err = (bst_var - bst_ref).abs() / bst_ref;

    let pass = mean_err <= 0.02 && var_err <= 0.10 && bst_err <= 0.10;
    Ok(Verdict::new(
        pass,
        format!(
            "uniform mean rel err {} (<=0.02); uniform var {} vs s_k 4^(1-k) n = {}: rel err {} (<=0.10); \
             vs exact variance {}: rel err {}; bst var {} vs {}: rel err {} (<=0.10)",
            fmt_real(mean_err),
            fmt_real(m.variance),
            fmt_real(leading),
            fmt_real(var_err),
            fmt_real(exact_var),
            fmt_real(var_exact_err),
            fmt_real(bst_var),
            fmt_real(bst_ref),
            fmt_real(bst_err)
        ),
    ))
}

fn concentration_config(model: ModelKind, trials: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(model, 100_000, trials, Seed(seed));
    cfg.epsilon = 1.0 / 6.0;
    cfg.cut_point_rule = CutPointRule::Custom(0.25);
    cfg
}

// 7. Concentration at n = 10^5, epsilon = 1/6.
fn concentration() -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (model, seed) in [(ModelKind::Uniform, 7001), (ModelKind::Bst, 7002)] {
        let cfg = concentration_config(model, 1000, seed);
        let (lo, hi) = admissible_range(&cfg).ok_or("empty admissible range")?;
        let r = concentration_check(&cfg, lo..=hi, ClassFilter::all).map_err(err)?;
        let worst = r.max_violation_rate();
        pass &= worst <= 0.05 && r.tail.rate >= 0.95;
        parts.push(format!(
            "{model} k={lo}..{hi}: max violation rate {}, tail within {} of trials",
            fmt_real(worst),
            fmt_real(r.tail.rate)
        ));
    }
    Ok(Verdict::new(pass, parts.join("; ")))
}

// 8. CLT diagnostics at k = 2^12.
fn clt_diagnostics() -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (i, statistic) in CltStatistic::ALL.into_iter().enumerate() {
        let r = clt_sample(statistic, 4096, 2000, Seed(8001 + i as u64)).map_err(err)?;
        let skew = r.skewness.unwrap_or(f64::NAN);
        let p = r.normality_p.unwrap_or(f64::NAN);
        pass &= r.slope_relative_error <= 0.05 && skew.abs() < 0.15 && p > 1e-3;
        let mut part = format!(
            "{statistic}: slope {} (rel err {}), skew {}, p {}",
            fmt_real(r.slope),
            fmt_real(r.slope_relative_error),
            fmt_real(skew),
            fmt_real(p)
        );
        if statistic == CltStatistic::SymBst {
            let gap = (r.variance_per_k - reference::SYM_BST_VARIANCE).abs()
                / reference::SYM_BST_VARIANCE;
            pass &= gap <= 0.25;
            part += &format!(
                ", var/k {} (rel err {})",
                fmt_real(r.variance_per_k),
                fmt_real(gap)
            );
        }
        parts.push(part);
    }
    Ok(Verdict::new(pass, parts.join("; ")))
}

fn same_bytes<T: Exportable>(
    dir: &Path,
    name: &str,
    run: impl Fn() -> Result<T, String>,
) -> Result<bool, String> {
    let mut all_equal = true;
    for format in [ExportFormat::Csv, ExportFormat::Json] {
        let a = dir.join(format!("{name}-a.{format}"));
        let b = dir.join(format!("{name}-b.{format}"));
        export(&run()?, &a, format).map_err(err)?;
        export(&run()?, &b, format).map_err(err)?;
        all_equal &= std::fs::read(&a).map_err(err)? == std::fs::read(&b).map_err(err)?;
    }
    Ok(all_equal)
}

// 9. Repeated runs give byte-identical files.
fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let dir = dir.path();
    let mut results = Vec::new();
    results.push((
        "counts",
        same_bytes(dir, "counts", || {
            run_count_experiment(&ExperimentConfig::new(
                ModelKind::Bst,
                1_000_000,
                20,
                Seed(5002),
            ))
            .map_err(err)
        })?,
    ));
    results.push((
        "clt",
        same_bytes(dir, "clt", || {
            clt_sample(CltStatistic::SymBst, 4096, 2000, Seed(8003)).map_err(err)
        })?,
    ));
    results.push((
        "concentration",
        same_bytes(dir, "concentration", || {
            let cfg = concentration_config(ModelKind::Uniform, 100, 7001);
            concentration_check(&cfg, 3..=6, ClassFilter::all).map_err(err)
        })?,
    ));
    results.push((
        "trend",
        same_bytes(dir, "trend", || {
            trend_check(ModelKind::Uniform, &[1 << 10, 1 << 12], 10, Seed(5003)).map_err(err)
        })?,
    ));
    let constants_a =
        serde_json::to_vec(&constants::constants_report(reference::GAMMA).map_err(err)?)
            .map_err(err)?;
    let constants_b =
        serde_json::to_vec(&constants::constants_report(reference::GAMMA).map_err(err)?)
            .map_err(err)?;
    results.push(("constants", constants_a == constants_b));
    let pass = results.iter().all(|(_, same)| *same);
    let detail = results
        .iter()
        .map(|(name, same)| format!("{name} {}", if *same { "identical" } else { "DIFFERS" }))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Verdict::new(pass, detail))
}

type Criterion = (u32, &'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "exact identities", exact_identities),
        (2, "DAG oracle equivalence", dag_oracle),
        (3, "enumeration sequences", enumeration_sequences),
        (4, "constants", constants_check),
        (5, "band smoke test", band_smoke),
        (6, "mean and variance at scale", lemma_moments),
        (7, "concentration", concentration),
        (8, "CLT diagnostics", clt_diagnostics),
        (9, "determinism", determinism),
    ];
    let (mut passed, mut known, mut unexpected) = (0, 0, 0);
    for (id, name, check) in criteria {
        let start = Instant::now();
        let verdict = check().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let seconds = start.elapsed().as_secs_f64();
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!("{status} [{id}] {name} ({seconds:.1}s): {}", verdict.detail);
        let listed = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (verdict.pass, listed) {
            (true, _) => passed += 1,
            (false, Some((_, reason))) => {
                known += 1;
                println!("     known failure: {reason}");
            }
            (false, None) => unexpected += 1,
        }
    }
    println!(
        "acceptance: {passed} passed, {} failed ({known} known, {unexpected} unexpected)",
        known + unexpected
    );
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
