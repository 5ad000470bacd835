//! Numerical constants behind the fringe-subtree bounds.
//!
//! `mu` and `nu` are evaluated as partial sums with explicit tail bounds,
//! `b` (the growth rate of the Wedderburn–Etherington numbers) from exact
//! ratios of consecutive terms, and `gamma` only by Monte Carlo, since no
//! series for it is available here.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, wedderburn_etherington_table};
use crate::random::{sample_uniform_with, Seed};
use crate::tree::sym_count;

/// Reference decimals the computed constants are compared against.
pub mod reference {
    /// Mean growth of `log2 |Aut|` per leaf for uniform trees (input only).
    pub const GAMMA: f64 = 0.2710416936;
    pub const MU: f64 = 1.7363771368;
    pub const NU: f64 = 0.3795493473;
    pub const B: f64 = 2.4832535362;
    pub const C: f64 = 1.3285649405;
    pub const C1: f64 = 1.0591261434;
    pub const C2: f64 = 1.0761505454;
    pub const C3: f64 = 1.5470025923;
    pub const C4: f64 = 1.8191392203;
    pub const C5: f64 = 2.4071298335;
    pub const C6: f64 = 2.7725887222;
    /// Limiting variance of `sym(T_k) / sqrt(k)` for random BSTs, given
    /// only to about three digits.
    pub const SYM_BST_VARIANCE: f64 = 0.115;
}

/// Terms used by [`constants_report`].
pub const MU_TERMS: u64 = 10_000_000;
pub const NU_TERMS: u64 = 10_000;
pub const B_TERMS: u64 = 1_000;

/// A partial sum of a positive series with a rigorous bound on the
/// remainder. `value = partial_sum + tail_estimate`; both the true
/// remainder and `tail_estimate` lie in `[0, tail_bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesEstimate {
    pub terms: u64,
    pub partial_sum: f64,
    pub tail_estimate: f64,
    pub tail_bound: f64,
    pub value: f64,
}

/// Compensated (Neumaier) summation.
#[derive(Default)]
struct Sum {
    sum: f64,
    carry: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn mu_term(k: u64) -> f64 {
    let k = k as f64;
    2.0 * k.log2() / ((k + 1.0) * (k + 2.0))
}

/// `mu = sum_{k>=1} 2 log2(k) / ((k+1)(k+2))`.
pub fn mu(terms: u64) -> Result<SeriesEstimate> {
    if terms == 0 {
        return Err(Error::invalid("mu needs at least one term"));
    }
    let mut sum = Sum::default();
    for k in 1..=terms {
        sum.add(mu_term(k));
    }
    // 2 log2(x)/((x+1)(x+2)) <= 2 log2(x)/x^2, decreasing for x >= 2, and
    // int_K^inf 2 log2(x)/x^2 dx = 2(log2 K + 1/ln 2)/K. The extra 1/ln 2
    // absorbs the first remainder term when K is small.
    let k = terms as f64;
    let tail_bound = 2.0 * (k.log2() + 2.0 / std::f64::consts::LN_2) / k;
    let tail_estimate = mu_tail_estimate(terms).min(tail_bound);
    let partial_sum = sum.value();
    Ok(SeriesEstimate {
        terms,
        partial_sum,
        tail_estimate,
        tail_bound,
        value: partial_sum + tail_estimate,
    })
}

/// Estimate of `sum_{k>K} mu_term(k)` by the midpoint rule with its first
/// Euler–Maclaurin correction, `int_{X}^inf f + f'(X)/24` at `X = K + 1/2`,
/// using the expansion
/// `1/((x+1)(x+2)) = sum_m (-1)^m (2^{m+1} - 1) x^{-(m+2)}` and
/// `int_X^inf ln(x) x^{-(m+2)} dx = X^{-(m+1)} (ln X/(m+1) + 1/(m+1)^2)`.
fn mu_tail_estimate(terms: u64) -> f64 {
    // The expansion needs X well above 2 and the next correction term,
    // 7 f'''(X)/5760, is below 1e-13 from here on.
    const START: u64 = 256;
    let mut direct = Sum::default();
    for k in terms + 1..=START.max(terms) {
        direct.add(mu_term(k));
    }
    let x = START.max(terms) as f64 + 0.5;
    let ln_x = x.ln();
    let mut series = 0.0;
    let mut x_pow = 1.0;
    for m in 0..12 {
        x_pow /= x;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let coefficient = sign * (2f64.powi(m + 1) - 1.0);
        let j = f64::from(m + 1);
        series += coefficient * x_pow * (ln_x / j + 1.0 / (j * j));
    }
    let slope = {
        let q = (x + 1.0) * (x + 2.0);
        (1.0 / (x * q) - ln_x * (2.0 * x + 3.0) / (q * q)) * 2.0 / std::f64::consts::LN_2
    };
    direct.value() + series * 2.0 / std::f64::consts::LN_2 + slope / 24.0
}

/// `x^(2^r)` by repeated squaring; underflows cleanly to zero.
fn pow_two_pow(x: f64, r: u32) -> f64 {
    (0..r).fold(x, |acc, _| acc * acc)
}

/// Memo of `P_k^r`, the probability that `2^r` independent random BSTs with
/// `k` leaves are all isomorphic.
///
/// Row `r` is filled bottom-up in `k`. Even sizes consult row `r + 1` at
/// `k / 2`, so rows deepen only logarithmically in `k`.
#[derive(Clone, Debug, Default)]
pub struct PIsoTable {
    rows: Vec<Vec<f64>>,
}

impl PIsoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, k: u64, r: u32) -> f64 {
        assert!(k >= 1 && r >= 1, "p_iso needs k >= 1 and r >= 1");
        self.ensure(r, k as usize);
        self.rows[r as usize - 1][k as usize]
    }

    fn ensure(&mut self, r: u32, k: usize) {
        let row = r as usize - 1;
        while self.rows.len() <= row {
            // Index 0 is unused; sizes 1..=3 have a single shape.
            self.rows.push(vec![f64::NAN, 1.0, 1.0, 1.0]);
        }
        if self.rows[row].len() > k {
            return;
        }
        self.ensure(r + 1, k / 2);
        let (current, deeper) = self.rows.split_at_mut(row + 1);
        let cur = &mut current[row];
        let next = &deeper[0];
        for size in cur.len()..=k {
            let inv = 1.0 / (size - 1) as f64;
            let split = pow_two_pow(2.0 * inv, r);
            let mut p = 0.0;
            if split > 0.0 {
                let mut acc = Sum::default();
                for i in 1..=(size - 1) / 2 {
                    acc.add(cur[i] * cur[size - i]);
                }
                p = acc.value() * split;
            }
            if size % 2 == 0 {
                let half = size / 2;
                // (1/(k-1))^{2^r} 2^{2^r - 1} = split / 2, kept in that form
                // so that neither factor overflows on its own.
                let both = split / 2.0;
                let single = pow_two_pow(inv, r);
                p += both * cur[half] * cur[half] - (both - single) * next[half];
            }
            cur.push(p);
        }
    }
}

pub fn p_iso(k: u64, r: u32) -> f64 {
    PIsoTable::new().get(k, r)
}

/// `nu = sum_{k>=1} P_k^1 / (k(2k+1)(2k-1))`.
pub fn nu(terms: u64) -> Result<SeriesEstimate> {
    nu_with(terms, &mut PIsoTable::new())
}

pub fn nu_with(terms: u64, table: &mut PIsoTable) -> Result<SeriesEstimate> {
    if terms == 0 {
        return Err(Error::invalid("nu needs at least one term"));
    }
    table.get(terms, 1);
    let mut sum = Sum::default();
    for k in 1..=terms {
        let kf = k as f64;
        sum.add(table.get(k, 1) / (kf * (2.0 * kf + 1.0) * (2.0 * kf - 1.0)));
    }
    // With P <= 1, each remaining term is at most 1/(4k^3 - k), and
    // sum_{k>K} 1/(k(4k^2-1)) <= int_K^inf dx/(4x^3) = 1/(8K^2).
    let k = terms as f64;
    let partial_sum = sum.value();
    Ok(SeriesEstimate {
        terms,
        partial_sum,
        tail_estimate: 0.0,
        tail_bound: 1.0 / (8.0 * k * k),
        value: partial_sum,
    })
}

/// `(W_{K+1} / W_K) ((K+1)/K)^{3/2}`, an estimate of the exponential
/// growth rate `b` of the Wedderburn–Etherington numbers.
pub fn estimate_b(terms: u64) -> Result<f64> {
    if terms < 10 {
        return Err(Error::out_of_range("K", terms, "K >= 10"));
    }
    let w = wedderburn_etherington_table(terms + 1);
    Ok(b_ratio(&w, terms))
}

fn b_ratio(w: &[exact::BigCount], k: u64) -> f64 {
    let q = BigRational::new(
        BigInt::from(w[k as usize + 1].clone()),
        BigInt::from(w[k as usize].clone()),
    );
    let k = k as f64;
    exact::to_f64(&q) * ((k + 1.0) / k).powf(1.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub terms: u64,
    /// Plain ratio estimate at `terms`.
    pub ratio: f64,
    /// Richardson extrapolation over `terms / 4`, `terms / 2`, `terms`.
    pub value: f64,
    pub error_estimate: f64,
}

/// Extrapolated `b`. The ratio estimate has error `a/K^2 + a'/K^3 + ...`
/// (no `1/K` term), so two Richardson steps remove the first two orders.
pub fn extrapolate_b(terms: u64) -> Result<GrowthEstimate> {
    if terms < 40 {
        return Err(Error::out_of_range("K", terms, "K >= 40"));
    }
    let w = wedderburn_etherington_table(terms + 1);
    let e1 = b_ratio(&w, terms / 4);
    let e2 = b_ratio(&w, terms / 2);
    let e3 = b_ratio(&w, terms);
    let r12 = (4.0 * e2 - e1) / 3.0;
    let r23 = (4.0 * e3 - e2) / 3.0;
    let value = (8.0 * r23 - r12) / 7.0;
    Ok(GrowthEstimate {
        terms,
        ratio: e3,
        value,
        error_estimate: (value - r23).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Monte Carlo estimate of `E[sym(T_k)] / k` for uniform trees `T_k`.
pub fn estimate_gamma(k: u64, trials: u64, seed: Seed) -> Result<MonteCarloEstimate> {
    if k < 2 {
        return Err(Error::out_of_range("k", k, "k >= 2"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let values = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = sample_uniform_with(k, &mut seed.stream(i))?;
            Ok(sym_count(&t) as f64 / k as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let summary = crate::experiment::stats::Moments::of(&values);
    Ok(MonteCarloEstimate {
        mean: summary.mean,
        stderr: if trials > 1 {
            (summary.variance / trials as f64).sqrt()
        } else {
            f64::NAN
        },
        trials,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

pub fn derived_constants(gamma: f64, mu: f64, nu: f64, b: f64) -> Result<DerivedConstants> {
    if ![gamma, mu, nu, b].iter().all(|x| x.is_finite()) {
        return Err(Error::invalid("constants must be finite"));
    }
    if b <= 1.0 {
        return Err(Error::invalid(format!("b must exceed 1, got {b}")));
    }
    use std::f64::consts::{LN_2, PI};
    let ln4 = 4f64.ln();
    Ok(DerivedConstants {
        c: 2.0 * (ln4 / PI).sqrt(),
        c1: 2.0 * ((1.0 + gamma) * LN_2 / PI).sqrt(),
        c2: 2.0 * (b.ln() / PI).sqrt(),
        c3: 2.0 * (mu + nu - 1.0) * LN_2,
        c4: 2.0 * b.ln(),
        c5: 2.0 * mu * LN_2,
        c6: 2.0 * ln4,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub gamma: f64,
    pub mu: SeriesEstimate,
    pub nu: SeriesEstimate,
    pub b: GrowthEstimate,
    pub derived: DerivedConstants,
}

/// Evaluates every constant with the default term counts. `gamma` is taken
/// as an input.
pub fn constants_report(gamma: f64) -> Result<ConstantsReport> {
    let (mu, (nu, b)) = rayon::join(
        || mu(MU_TERMS),
        || rayon::join(|| nu(NU_TERMS), || extrapolate_b(B_TERMS)),
    );
    let (mu, nu, b) = (mu?, nu?, b?);
    let derived = derived_constants(gamma, mu.value, nu.value, b.value)?;
    Ok(ConstantsReport {
        gamma,
        mu,
        nu,
        b,
        derived,
    })
}
