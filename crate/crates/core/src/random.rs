//! Samplers for the uniform and binary-search-tree models on trees with
//! `n` leaves.
//!
//! All randomness comes from ChaCha8 streams keyed by a [`Seed`]; trial `i`
//! of an experiment draws from `seed.stream(i)`, so results do not depend on
//! how trials are scheduled across threads.
//!
//! The BST sampler splits sizes directly: a subtree with `m > 1` leaves puts
//! a uniform number of leaves in `{1, ..., m-1}` on its left. This is the
//! same distribution as inserting a uniformly random permutation of
//! `n - 1` keys into an empty binary search tree and counting leaves as
//! external nodes.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Node, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent generator for stream `index` under this seed.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Uniform,
    Bst,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Uniform => "uniform",
            ModelKind::Bst => "bst",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(ModelKind::Uniform),
            "bst" => Ok(ModelKind::Bst),
            other => Err(Error::invalid(format!(
                "unknown model {other:?}, expected uniform or bst"
            ))),
        }
    }
}

fn check_size(n: u64) -> Result<()> {
    if n == 0 || n > 1 << 31 {
        return Err(Error::out_of_range("n", n, "1..=2^31"));
    }
    Ok(())
}

pub fn sample_uniform(n: u64, seed: Seed) -> Result<Tree> {
    sample_uniform_with(n, &mut seed.stream(0))
}

pub fn sample_bst(n: u64, seed: Seed) -> Result<Tree> {
    sample_bst_with(n, &mut seed.stream(0))
}

pub fn sample<R: Rng + ?Sized>(model: ModelKind, n: u64, rng: &mut R) -> Result<Tree> {
    match model {
        ModelKind::Uniform => sample_uniform_with(n, rng),
        ModelKind::Bst => sample_bst_with(n, rng),
    }
}

const NONE: u32 = u32::MAX;

/// Rémy's growth process: starting from a single leaf, repeatedly pick a
/// uniform node and a uniform side, and graft a new leaf there. After
/// `n - 1` steps the shape is uniform over all trees with `n` leaves.
pub fn sample_uniform_with<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<Tree> {
    check_size(n)?;
    let total = (2 * n - 1) as usize;
    let mut parent = vec![NONE; total];
    let mut left = vec![NONE; total];
    let mut right = vec![NONE; total];
    let mut root = 0u32;
    let mut len = 1u32;

    for _ in 1..n {
        let x = rng.gen_range(0..len);
        let leaf_on_right: bool = rng.gen();
        let leaf = len;
        let joint = len + 1;
        len += 2;

        let up = parent[x as usize];
        parent[joint as usize] = up;
        if up == NONE {
            root = joint;
        } else if left[up as usize] == x {
            left[up as usize] = joint;
        } else {
            right[up as usize] = joint;
        }
        let (l, r) = if leaf_on_right { (x, leaf) } else { (leaf, x) };
        left[joint as usize] = l;
        right[joint as usize] = r;
        parent[x as usize] = joint;
        parent[leaf as usize] = joint;
    }

    let mut stack = vec![root];
    let flags = std::iter::from_fn(|| {
        let id = stack.pop()? as usize;
        if left[id] == NONE {
            Some(false)
        } else {
            stack.push(right[id]);
            stack.push(left[id]);
            Some(true)
        }
    });
    Tree::from_preorder(flags)
}

pub fn sample_bst_with<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<Tree> {
    check_size(n)?;
    let mut stack = vec![n];
    let flags = std::iter::from_fn(|| {
        let m = stack.pop()?;
        if m == 1 {
            return Some(false);
        }
        let l = rng.gen_range(1..m);
        stack.push(m - l);
        stack.push(l);
        Some(true)
    });
    Tree::from_preorder(flags)
}

/// Largest size accepted by [`sample_uniform_catalan_split`]; `C_{n-1}` for
/// larger `n` does not fit the 64-bit tables it uses.
pub const CATALAN_SPLIT_MAX: u64 = 30;

/// Uniform sampler by recursive Catalan splitting: a subtree with `m`
/// leaves puts `l` leaves on the left with probability
/// `C_{l-1} C_{m-l-1} / C_{m-1}`. Only meant as an independent check on
/// [`sample_uniform_with`] for small sizes.
pub fn sample_uniform_catalan_split<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<Tree> {
    if n == 0 || n > CATALAN_SPLIT_MAX {
        return Err(Error::out_of_range(
            "n",
            n,
            format!("1..={CATALAN_SPLIT_MAX}"),
        ));
    }
    let mut catalan = vec![1u64; n as usize];
    for i in 1..n as usize {
        catalan[i] = catalan[i - 1] * 2 * (2 * i as u64 - 1) / (i as u64 + 1);
    }
    let mut stack = vec![n];
    let flags = std::iter::from_fn(|| {
        let m = stack.pop()?;
        if m == 1 {
            return Some(false);
        }
        let mut pick = rng.gen_range(0..catalan[m as usize - 1]);
        let mut l = 1;
        loop {
            let weight = catalan[l as usize - 1] * catalan[(m - l) as usize - 1];
            if pick < weight {
                break;
            }
            pick -= weight;
            l += 1;
        }
        stack.push(m - l);
        stack.push(l);
        Some(true)
    });
    Tree::from_preorder(flags)
}

/// `log2(1 / P_bst(t))`: the sum of `log2(|t(v)| - 1)` over internal nodes.
pub fn pbst_neg_log2(t: &Tree) -> f64 {
    *subtree_bst_bits(t).last().expect("trees are non-empty")
}

/// [`pbst_neg_log2`] of every fringe subtree, indexed by node id.
pub fn subtree_bst_bits(t: &Tree) -> Vec<f64> {
    let sizes = t.subtree_sizes();
    let mut bits: Vec<f64> = Vec::with_capacity(t.node_count());
    for (node, &size) in t.nodes().iter().zip(&sizes) {
        let b = match *node {
            Node::Leaf => 0.0,
            Node::Internal { left, right } => {
                bits[left as usize] + bits[right as usize] + f64::from(size - 1).log2()
            }
        };
        bits.push(b);
    }
    bits
}
