//! Exact enumeration and counting: Catalan and Wedderburn–Etherington
//! numbers, exhaustive enumeration of small tree sets, and closed-form
//! expectations of fringe-subtree counts as exact rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::random::ModelKind;
use crate::tree::Tree;

pub type BigCount = BigUint;
pub type ExactRational = BigRational;

/// Largest size [`enumerate_trees`] accepts.
pub const ENUMERATION_MAX: u64 = 14;
/// Largest size [`brute_force_expectation`] accepts.
pub const BRUTE_FORCE_MAX: u64 = 12;

pub fn catalan(k: u64) -> BigCount {
    catalan_table(k).pop().expect("table has k + 1 entries")
}

/// `C_0, ..., C_max`.
pub fn catalan_table(max: u64) -> Vec<BigCount> {
    let mut table = Vec::with_capacity(max as usize + 1);
    table.push(BigUint::one());
    for i in 1..=max {
        let next = &table[i as usize - 1] * (2 * (2 * i - 1)) / (i + 1);
        table.push(next);
    }
    table
}

/// Number of unordered binary trees with `k` leaves (`W_0 = 0`).
pub fn wedderburn_etherington(k: u64) -> BigCount {
    wedderburn_etherington_table(k)
        .pop()
        .expect("table has k + 1 entries")
}

/// `W_0, ..., W_max`, by splitting on the smaller root subtree:
/// `W_{2m+1} = sum_{i=1}^{m} W_i W_{2m+1-i}` and
/// `W_{2m} = sum_{i=1}^{m-1} W_i W_{2m-i} + W_m (W_m + 1) / 2`.
pub fn wedderburn_etherington_table(max: u64) -> Vec<BigCount> {
    let max = max as usize;
    let mut w = vec![BigUint::zero(); max + 1];
    if max >= 1 {
        w[1] = BigUint::one();
    }
    for k in 2..=max {
        let mut sum = BigUint::zero();
        for i in 1..=(k - 1) / 2 {
            sum += &w[i] * &w[k - i];
        }
        if k % 2 == 0 {
            let half = &w[k / 2];
            sum += half * (half + 1u32) / 2u32;
        }
        w[k] = sum;
    }
    w
}

pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Every ordered tree with `n` leaves, each exactly once, ordered by left
/// subtree size `1..n-1` and recursively within each size.
pub fn enumerate_trees(n: u64) -> Result<TreeEnumeration> {
    if n == 0 || n > ENUMERATION_MAX {
        return Err(Error::out_of_range(
            "n",
            n,
            format!("1..={ENUMERATION_MAX}"),
        ));
    }
    let mut smaller: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::leaf()]];
    for m in 2..n as usize {
        let mut all = Vec::new();
        for l in 1..m {
            for a in &smaller[l] {
                for b in &smaller[m - l] {
                    all.push(Tree::join(a, b));
                }
            }
        }
        smaller.push(all);
    }
    Ok(TreeEnumeration {
        n: n as usize,
        smaller,
        left_size: 1,
        a: 0,
        b: 0,
        single_done: false,
    })
}

pub struct TreeEnumeration {
    n: usize,
    smaller: Vec<Vec<Tree>>,
    left_size: usize,
    a: usize,
    b: usize,
    single_done: bool,
}

impl Iterator for TreeEnumeration {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if self.n == 1 {
            if self.single_done {
                return None;
            }
            self.single_done = true;
            return Some(Tree::leaf());
        }
        while self.left_size < self.n {
            let lefts = &self.smaller[self.left_size];
            let rights = &self.smaller[self.n - self.left_size];
            if self.a < lefts.len() {
                let tree = Tree::join(&lefts[self.a], &rights[self.b]);
                self.b += 1;
                if self.b == rights.len() {
                    self.b = 0;
                    self.a += 1;
                }
                return Some(tree);
            }
            self.left_size += 1;
            self.a = 0;
            self.b = 0;
        }
        None
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `C_a / C_b` as a telescoping product of `C_j / C_{j-1} = 2(2j-1)/(j+1)`,
/// which avoids the huge binomials for large arguments.
fn catalan_ratio(a: u64, b: u64) -> BigRational {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let (lo, hi, invert) = if a <= b { (a, b, true) } else { (b, a, false) };
    for j in lo + 1..=hi {
        num *= 2 * (2 * j - 1);
        den *= j + 1;
    }
    if invert {
        ratio(den, num)
    } else {
        ratio(num, den)
    }
}

/// Exact expected number of fringe subtrees with `k` leaves drawn from a
/// set of `s_k` shapes, in a uniformly random tree with `n` leaves:
/// `s_k * binom(2n-2k, n-k) * n / binom(2n-2, n-1)`.
pub fn expected_occurrences_uniform(n: u64, k: u64, s_k: &BigCount) -> Result<ExactRational> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    if *s_k > catalan(k - 1) {
        return Err(Error::invalid(format!(
            "s_k = {s_k} exceeds the number of trees with {k} leaves"
        )));
    }
    // binom(2m, m) = (m + 1) C_m, so the ratio is
    // (n - k + 1) C_{n-k} n / (n C_{n-1}) = (n - k + 1) C_{n-k} / C_{n-1}.
    let scale = BigRational::from_integer(BigInt::from(s_k.clone()) * BigInt::from(n - k + 1));
    Ok(scale * catalan_ratio(n - k, n - 1))
}

/// Exact `E(binom(X, 2))` for the count `X` of size-`k` fringe subtrees in
/// a set of `s_k` shapes: an unordered pair of occurrences is a tree
/// with `n - 2k + 2` leaves with two of its leaves replaced.
pub fn expected_pairs_uniform(n: u64, k: u64, s_k: &BigCount) -> Result<ExactRational> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    if 2 * k > n {
        return Ok(BigRational::zero());
    }
    let m = n - 2 * k + 2;
    let leaf_pairs = BigInt::from(m * (m - 1) / 2);
    let s2 = BigInt::from(s_k * s_k);
    Ok(BigRational::from_integer(leaf_pairs * s2) * catalan_ratio(m - 1, n - 1))
}

/// Exact variance of the size-`k` occurrence count under the uniform model.
pub fn variance_occurrences_uniform(n: u64, k: u64, s_k: &BigCount) -> Result<ExactRational> {
    let mean = expected_occurrences_uniform(n, k, s_k)?;
    let pairs = expected_pairs_uniform(n, k, s_k)?;
    Ok(pairs * BigInt::from(2) + &mean - &mean * &mean)
}

/// Exact expected number of pairs of identical fringe subtrees with `k`
/// leaves in a uniformly random tree with `n` leaves:
/// `C_{n-2k+1} * binom(n-2k+2, 2) * C_{k-1} / C_{n-1}`, zero when `2k > n`.
pub fn expected_identical_pairs_uniform(n: u64, k: u64) -> Result<ExactRational> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if 2 * k > n {
        return Ok(BigRational::zero());
    }
    let m = n - 2 * k + 2;
    let leaf_pairs = BigInt::from(m * (m - 1) / 2);
    let shapes = BigInt::from(catalan(k - 1));
    Ok(BigRational::from_integer(leaf_pairs * shapes) * catalan_ratio(m - 1, n - 1))
}

/// Exact expected number of fringe subtrees with `k` leaves in a random
/// BST with `n` leaves: `2n / (k(k+1))` for `k < n` and 1 for `k = n`.
pub fn expected_z_bst(n: u64, k: u64) -> Result<ExactRational> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    if k == n {
        return Ok(BigRational::one());
    }
    Ok(BigRational::new(
        BigInt::from(2 * n),
        BigInt::from(k) * BigInt::from(k + 1),
    ))
}

/// Large-`n` variance of the size-`k` fringe count in a random BST:
/// `2(k-1)(4k^2-3k-4) n / ((k+1)^2 k (2k-1)(2k+1))`.
///
/// Only a reference value for `n` large relative to `k`; it is not the exact
/// variance for small `n` (at `n = 4, k = 2` the exact value is 2/9).
pub fn variance_z_bst_asymptotic(n: u64, k: u64) -> Result<f64> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "need 2 <= k <= n, got n={n}, k={k}"
        )));
    }
    let (n, k) = (n as f64, k as f64);
    Ok(2.0 * (k - 1.0) * (4.0 * k * k - 3.0 * k - 4.0) * n
        / ((k + 1.0).powi(2) * k * (2.0 * k - 1.0) * (2.0 * k + 1.0)))
}

/// `P_bst(t) = prod over internal v of 1 / (|t(v)| - 1)`.
pub fn bst_probability(t: &Tree) -> ExactRational {
    let sizes = t.subtree_sizes();
    let mut den = BigUint::one();
    for (node, size) in t.nodes().iter().zip(sizes) {
        if matches!(node, crate::tree::Node::Internal { .. }) {
            den *= size - 1;
        }
    }
    ratio(BigUint::one(), den)
}

/// Every tree in `T_n` with its exact probability under `model`.
pub fn exact_distribution(n: u64, model: ModelKind) -> Result<Vec<(Tree, ExactRational)>> {
    if n == 0 || n > BRUTE_FORCE_MAX {
        return Err(Error::out_of_range(
            "n",
            n,
            format!("1..={BRUTE_FORCE_MAX}"),
        ));
    }
    let uniform = ratio(BigUint::one(), catalan(n - 1));
    Ok(enumerate_trees(n)?
        .map(|t| {
            let w = match model {
                ModelKind::Uniform => uniform.clone(),
                ModelKind::Bst => bst_probability(&t),
            };
            (t, w)
        })
        .collect())
}

/// `sum over t in T_n of P(t) * functional(t)`, exactly.
pub fn brute_force_expectation<F>(n: u64, model: ModelKind, functional: F) -> Result<ExactRational>
where
    F: Fn(&Tree) -> i64,
{
    let mut acc = BigRational::zero();
    for (t, w) in exact_distribution(n, model)? {
        acc += w * BigInt::from(functional(&t));
    }
    Ok(acc)
}

/// Real-valued counterpart of [`brute_force_expectation`].
pub fn brute_force_expectation_real<F>(n: u64, model: ModelKind, functional: F) -> Result<f64>
where
    F: Fn(&Tree) -> f64,
{
    Ok(exact_distribution(n, model)?
        .into_iter()
        .map(|(t, w)| to_f64(&w) * functional(&t))
        .sum())
}

/// Nearest `f64` to an exact rational, robust to huge numerators.
pub fn to_f64(q: &ExactRational) -> f64 {
    if let (Some(a), Some(b)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if a.is_finite() && b.is_finite() && b != 0.0 {
            return a / b;
        }
    }
    let num_shift = q.numer().bits().saturating_sub(64);
    let den_shift = q.denom().bits().saturating_sub(64);
    let a = (q.numer() >> num_shift as usize)
        .to_f64()
        .unwrap_or(f64::NAN);
    let b = (q.denom() >> den_shift as usize)
        .to_f64()
        .unwrap_or(f64::NAN);
    a / b * 2f64.powi(num_shift as i32 - den_shift as i32)
}
