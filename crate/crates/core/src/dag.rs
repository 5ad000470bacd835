//! Minimal DAG compression of binary trees.
//!
//! The ordered minimal DAG merges identical fringe subtrees; the unordered
//! one merges fringe subtrees that are isomorphic once child order is
//! ignored. Both come from a single post-order pass with two interning
//! tables. DAG ids are assigned in first-seen post-order, so the leaf is
//! always id 0 and the root is the last id.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, BRUTE_FORCE_MAX};
use crate::random::{pbst_neg_log2, subtree_bst_bits};
use crate::tree::{sym_count, Node, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DagMode {
    Ordered,
    Unordered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DagNode {
    Leaf,
    Internal { left: u32, right: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalDag {
    nodes: Vec<DagNode>,
    mode: DagMode,
}

impl MinimalDag {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> u32 {
        self.nodes.len() as u32 - 1
    }

    pub fn mode(&self) -> DagMode {
        self.mode
    }

    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    /// Unfolds the DAG back into a tree. For an unordered DAG the result is
    /// the representative whose children appear in DAG-id order, which is
    /// isomorphic to the compressed tree.
    pub fn expand(&self) -> Tree {
        let mut stack = vec![self.root()];
        let flags = std::iter::from_fn(|| match self.nodes[stack.pop()? as usize] {
            DagNode::Leaf => Some(false),
            DagNode::Internal { left, right } => {
                stack.push(right);
                stack.push(left);
                Some(true)
            }
        });
        Tree::from_preorder(flags).expect("DAG expansion is a well-formed tree")
    }

    pub fn to_json(&self) -> DagJson {
        DagJson {
            mode: self.mode,
            root: self.root(),
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, node)| match *node {
                    DagNode::Leaf => DagNodeJson {
                        id: id as u32,
                        kind: "leaf",
                        left: None,
                        right: None,
                    },
                    DagNode::Internal { left, right } => DagNodeJson {
                        id: id as u32,
                        kind: "internal",
                        left: Some(left),
                        right: Some(right),
                    },
                })
                .collect(),
        }
    }
}

/// `dag-json` output schema.
#[derive(Clone, Debug, Serialize)]
pub struct DagJson {
    pub mode: DagMode,
    pub root: u32,
    pub nodes: Vec<DagNodeJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DagNodeJson {
    pub id: u32,
    pub kind: &'static str,
    pub left: Option<u32>,
    pub right: Option<u32>,
}

#[derive(Default)]
struct Interner {
    ids: FxHashMap<(u32, u32), u32>,
    nodes: Vec<DagNode>,
}

impl Interner {
    fn new() -> Self {
        Interner {
            ids: FxHashMap::default(),
            nodes: vec![DagNode::Leaf],
        }
    }

    /// Returns the id of `(left, right)` and whether it was new.
    fn intern(&mut self, left: u32, right: u32) -> (u32, bool) {
        let next = self.nodes.len() as u32;
        let id = *self.ids.entry((left, right)).or_insert(next);
        let fresh = id == next;
        if fresh {
            self.nodes.push(DagNode::Internal { left, right });
        }
        (id, fresh)
    }

    fn into_dag(self, mode: DagMode) -> MinimalDag {
        MinimalDag {
            nodes: self.nodes,
            mode,
        }
    }
}

fn sorted(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Per-node DAG ids for both modes, plus the interning tables.
struct Pass {
    ordered: Interner,
    unordered: Interner,
    ordered_ids: Vec<u32>,
    unordered_ids: Vec<u32>,
}

impl Pass {
    fn run(t: &Tree, mut on_node: impl FnMut(usize, bool, bool)) -> Pass {
        let mut pass = Pass {
            ordered: Interner::new(),
            unordered: Interner::new(),
            ordered_ids: Vec::with_capacity(t.node_count()),
            unordered_ids: Vec::with_capacity(t.node_count()),
        };
        let mut seen_leaf = false;
        for (i, node) in t.nodes().iter().enumerate() {
            let (o, u, new_o, new_u) = match *node {
                Node::Leaf => {
                    let first = !seen_leaf;
                    seen_leaf = true;
                    (0, 0, first, first)
                }
                Node::Internal { left, right } => {
                    let (l, r) = (left as usize, right as usize);
                    let (o, new_o) = pass
                        .ordered
                        .intern(pass.ordered_ids[l], pass.ordered_ids[r]);
                    let (a, b) = sorted(pass.unordered_ids[l], pass.unordered_ids[r]);
                    let (u, new_u) = pass.unordered.intern(a, b);
                    (o, u, new_o, new_u)
                }
            };
            pass.ordered_ids.push(o);
            pass.unordered_ids.push(u);
            on_node(i, new_o, new_u);
        }
        pass
    }
}

pub fn minimal_dag(t: &Tree) -> MinimalDag {
    compress(t).ordered
}

pub fn unordered_minimal_dag(t: &Tree) -> MinimalDag {
    compress(t).unordered
}

#[derive(Clone, Debug)]
pub struct Compression {
    pub ordered: MinimalDag,
    pub unordered: MinimalDag,
}

pub fn compress(t: &Tree) -> Compression {
    let pass = Pass::run(t, |_, _, _| {});
    Compression {
        ordered: pass.ordered.into_dag(DagMode::Ordered),
        unordered: pass.unordered.into_dag(DagMode::Unordered),
    }
}

/// Node counts of the ordered and unordered minimal DAGs, i.e. the numbers
/// of distinct and of non-isomorphic fringe subtrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagSizes {
    pub ordered: u64,
    pub unordered: u64,
}

pub fn dag_sizes(t: &Tree) -> DagSizes {
    let pass = Pass::run(t, |_, _, _| {});
    DagSizes {
        ordered: pass.ordered.nodes.len() as u64,
        unordered: pass.unordered.nodes.len() as u64,
    }
}

/// Membership test for a set `S_k` of trees with a fixed number of leaves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassPredicate {
    All,
    Empty,
    /// `sym(t) >= min_sym`, i.e. `|Aut(t)| >= 2^min_sym`.
    MinSym {
        min_sym: f64,
    },
    /// `log2(1/P_bst(t)) >= min_bits`.
    MinBstBits {
        min_bits: f64,
    },
    MinSymAndBstBits {
        min_sym: f64,
        min_bits: f64,
    },
}

impl ClassPredicate {
    fn needs_sym(&self) -> bool {
        matches!(
            self,
            ClassPredicate::MinSym { .. } | ClassPredicate::MinSymAndBstBits { .. }
        )
    }

    fn needs_bits(&self) -> bool {
        matches!(
            self,
            ClassPredicate::MinBstBits { .. } | ClassPredicate::MinSymAndBstBits { .. }
        )
    }

    fn accepts(&self, sym: u64, bits: f64) -> bool {
        match *self {
            ClassPredicate::All => true,
            ClassPredicate::Empty => false,
            ClassPredicate::MinSym { min_sym } => sym as f64 >= min_sym,
            ClassPredicate::MinBstBits { min_bits } => bits >= min_bits,
            ClassPredicate::MinSymAndBstBits { min_sym, min_bits } => {
                sym as f64 >= min_sym && bits >= min_bits
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFilter {
    pub size: u64,
    pub predicate: ClassPredicate,
}

/// Realized size of a filter's class: `s_k = |S_k|` and
/// `p_k = P_bst(S_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassWeight {
    pub count: BigUint,
    pub bst_probability: BigRational,
}

impl ClassFilter {
    pub fn all(size: u64) -> Self {
        ClassFilter {
            size,
            predicate: ClassPredicate::All,
        }
    }

    pub fn empty(size: u64) -> Self {
        ClassFilter {
            size,
            predicate: ClassPredicate::Empty,
        }
    }

    /// Trees with `|Aut(t)| >= 2^(gamma k - k^(3/4))`.
    pub fn high_automorphism(size: u64, gamma: f64) -> Self {
        ClassFilter {
            size,
            predicate: ClassPredicate::MinSym {
                min_sym: gamma * size as f64 - (size as f64).powf(0.75),
            },
        }
    }

    /// Trees with `P_bst(t) <= 2^(-mu k + k^(3/4))`.
    pub fn low_bst_probability(size: u64, mu: f64) -> Self {
        ClassFilter {
            size,
            predicate: ClassPredicate::MinBstBits {
                min_bits: mu * size as f64 - (size as f64).powf(0.75),
            },
        }
    }

    /// Both of the above, with `nu` in place of `gamma` for the
    /// automorphism bound.
    pub fn bst_isomorphism_class(size: u64, mu: f64, nu: f64) -> Self {
        let slack = (size as f64).powf(0.75);
        ClassFilter {
            size,
            predicate: ClassPredicate::MinSymAndBstBits {
                min_sym: nu * size as f64 - slack,
                min_bits: mu * size as f64 - slack,
            },
        }
    }

    pub fn matches(&self, t: &Tree) -> bool {
        if t.leaf_count() != self.size {
            return false;
        }
        let sym = if self.predicate.needs_sym() {
            sym_count(t)
        } else {
            0
        };
        let bits = if self.predicate.needs_bits() {
            pbst_neg_log2(t)
        } else {
            0.0
        };
        self.predicate.accepts(sym, bits)
    }

    /// Exact `s_k` and `p_k`: closed form for `All` and `Empty`, exhaustive
    /// enumeration otherwise (sizes up to 12).
    pub fn weight(&self) -> Result<ClassWeight> {
        match self.predicate {
            ClassPredicate::All => Ok(ClassWeight {
                count: exact::catalan(self.size.saturating_sub(1)),
                bst_probability: BigRational::one(),
            }),
            ClassPredicate::Empty => Ok(ClassWeight {
                count: BigUint::zero(),
                bst_probability: BigRational::zero(),
            }),
            _ => {
                if self.size == 0 || self.size > BRUTE_FORCE_MAX {
                    return Err(Error::out_of_range(
                        "filter size",
                        self.size,
                        format!("1..={BRUTE_FORCE_MAX} for enumerated class weights"),
                    ));
                }
                let mut count = BigUint::zero();
                let mut p = BigRational::zero();
                for t in exact::enumerate_trees(self.size)? {
                    if self.matches(&t) {
                        count += 1u32;
                        p += exact::bst_probability(&t);
                    }
                }
                Ok(ClassWeight {
                    count,
                    bst_probability: p,
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCounts {
    pub size: u64,
    pub total: u64,
    pub distinct_ordered: u64,
    pub distinct_unordered: u64,
}

/// Per-size fringe subtree counts of one tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeProfile {
    pub leaves: u64,
    /// Sizes that occur, in increasing order.
    pub sizes: Vec<SizeCounts>,
    pub tail_threshold: u64,
    /// Number of fringe subtrees with more than `tail_threshold` leaves.
    pub tail: u64,
    /// Matching fringe subtrees per filter, in filter order.
    pub filtered: Vec<u64>,
    pub dag: DagSizes,
}

impl FringeProfile {
    pub fn get(&self, size: u64) -> Option<&SizeCounts> {
        self.sizes
            .binary_search_by_key(&size, |c| c.size)
            .ok()
            .map(|i| &self.sizes[i])
    }

    pub fn total(&self, size: u64) -> u64 {
        self.get(size).map_or(0, |c| c.total)
    }
}

pub fn fringe_profile(t: &Tree, tail_threshold: u64, filters: &[ClassFilter]) -> FringeProfile {
    let sizes = t.subtree_sizes();
    let n = t.leaf_count() as usize;
    let mut total = vec![0u64; n + 1];
    let mut distinct_ordered = vec![0u64; n + 1];
    let mut distinct_unordered = vec![0u64; n + 1];

    let pass = Pass::run(t, |i, new_o, new_u| {
        let s = sizes[i] as usize;
        total[s] += 1;
        distinct_ordered[s] += u64::from(new_o);
        distinct_unordered[s] += u64::from(new_u);
    });

    let filtered = if filters.is_empty() {
        Vec::new()
    } else {
        count_filtered(t, &sizes, &pass.unordered_ids, filters)
    };

    let tail = total
        .iter()
        .enumerate()
        .filter(|&(s, _)| s as u64 > tail_threshold)
        .map(|(_, &c)| c)
        .sum();

    let counts = (1..=n)
        .filter(|&s| total[s] > 0)
        .map(|s| SizeCounts {
            size: s as u64,
            total: total[s],
            distinct_ordered: distinct_ordered[s],
            distinct_unordered: distinct_unordered[s],
        })
        .collect();

    FringeProfile {
        leaves: n as u64,
        sizes: counts,
        tail_threshold,
        tail,
        filtered,
        dag: DagSizes {
            ordered: pass.ordered.nodes.len() as u64,
            unordered: pass.unordered.nodes.len() as u64,
        },
    }
}

fn count_filtered(t: &Tree, sizes: &[u32], classes: &[u32], filters: &[ClassFilter]) -> Vec<u64> {
    let need_sym = filters.iter().any(|f| f.predicate.needs_sym());
    let need_bits = filters.iter().any(|f| f.predicate.needs_bits());

    let sym = if need_sym {
        let mut sym: Vec<u64> = Vec::with_capacity(t.node_count());
        for node in t.nodes() {
            let s = match *node {
                Node::Leaf => 0,
                Node::Internal { left, right } => {
                    let (l, r) = (left as usize, right as usize);
                    sym[l] + sym[r] + u64::from(classes[l] == classes[r])
                }
            };
            sym.push(s);
        }
        sym
    } else {
        Vec::new()
    };
    let bits = if need_bits {
        subtree_bst_bits(t)
    } else {
        Vec::new()
    };

    let mut counts = vec![0u64; filters.len()];
    for (i, &size) in sizes.iter().enumerate() {
        for (f, filter) in filters.iter().enumerate() {
            if filter.size != u64::from(size) {
                continue;
            }
            let s = sym.get(i).copied().unwrap_or(0);
            let b = bits.get(i).copied().unwrap_or(0.0);
            if filter.predicate.accepts(s, b) {
                counts[f] += 1;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_tree;
    use crate::tree::{complete, left_comb};

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn comb_dags() {
        for n in [1, 2, 5, 40] {
            let comb = left_comb(n);
            assert_eq!(minimal_dag(&comb).len() as u64, n);
            assert_eq!(unordered_minimal_dag(&comb).len() as u64, n);
        }
    }

    #[test]
    fn complete_tree_dags() {
        for h in 0..8 {
            let c = complete(h);
            assert_eq!(minimal_dag(&c).len(), h as usize + 1);
            assert_eq!(unordered_minimal_dag(&c).len(), h as usize + 1);
        }
    }

    #[test]
    fn mirrored_halves_merge_only_when_unordered() {
        let x = t("(((LL)L)(L(LL)))");
        assert_eq!(minimal_dag(&x).len(), 5);
        assert_eq!(unordered_minimal_dag(&x).len(), 4);
        assert_eq!(
            dag_sizes(&x),
            DagSizes {
                ordered: 5,
                unordered: 4
            }
        );
        assert_eq!(
            dag_sizes(&Tree::leaf()),
            DagSizes {
                ordered: 1,
                unordered: 1
            }
        );
    }

    #[test]
    fn ordered_dag_expands_to_source() {
        let x = t("(((LL)L)((LL)(L(LL))))");
        let dag = minimal_dag(&x);
        assert_eq!(dag.expand(), x);
        assert_eq!(minimal_dag(&dag.expand()).len(), dag.len());
        let udag = unordered_minimal_dag(&x);
        assert_eq!(unordered_minimal_dag(&udag.expand()).len(), udag.len());
    }

    #[test]
    fn dag_ids_follow_first_seen_post_order() {
        let dag = minimal_dag(&t("((LL)(L(LL)))"));
        assert_eq!(dag.nodes()[0], DagNode::Leaf);
        assert_eq!(dag.nodes()[1], DagNode::Internal { left: 0, right: 0 });
        assert_eq!(dag.nodes()[2], DagNode::Internal { left: 0, right: 1 });
        assert_eq!(dag.root(), 3);
        let json = serde_json::to_string(&dag.to_json()).unwrap();
        assert!(json.starts_with(
            r#"{"mode":"ordered","root":3,"nodes":[{"id":0,"kind":"leaf","left":null,"right":null}"#
        ));
    }

    #[test]
    fn profile_of_comb() {
        let p = fringe_profile(&left_comb(4), 0, &[]);
        let totals: Vec<(u64, u64)> = p.sizes.iter().map(|c| (c.size, c.total)).collect();
        assert_eq!(totals, [(1, 4), (2, 1), (3, 1), (4, 1)]);
        let p6 = fringe_profile(&left_comb(6), 3, &[]);
        assert_eq!(p6.tail, 3);
    }

    #[test]
    fn profile_of_complete_tree() {
        let p = fringe_profile(&complete(2), 4, &[]);
        let rows: Vec<(u64, u64, u64)> = p
            .sizes
            .iter()
            .map(|c| (c.size, c.total, c.distinct_ordered))
            .collect();
        assert_eq!(rows, [(1, 4, 1), (2, 2, 1), (4, 1, 1)]);
        assert_eq!(p.tail, 0);
    }

    #[test]
    fn filters_count_matching_subtrees() {
        let x = t("(((LL)(LL))((LL)L))");
        let filters = [
            ClassFilter::all(2),
            ClassFilter::empty(2),
            ClassFilter {
                size: 4,
                predicate: ClassPredicate::MinSym { min_sym: 3.0 },
            },
            ClassFilter {
                size: 3,
                predicate: ClassPredicate::MinBstBits { min_bits: 1.0 },
            },
        ];
        let p = fringe_profile(&x, 10, &filters);
        assert_eq!(p.filtered, [3, 0, 1, 1]);
        for (f, &count) in filters.iter().zip(&p.filtered) {
            let direct = x
                .subtree_sizes()
                .iter()
                .enumerate()
                .filter(|&(i, _)| f.matches(&x.fringe_subtree(i as u32)))
                .count() as u64;
            assert_eq!(direct, count);
        }
    }

    #[test]
    fn class_weights() {
        let all = ClassFilter::all(5).weight().unwrap();
        assert_eq!(all.count, 14u32.into());
        let none = ClassFilter::empty(5).weight().unwrap();
        assert_eq!(none.count, BigUint::zero());
        // Size 4: the balanced tree (sym 3, P = 1/3) and four combs
        // (sym 1, P = 1/6 each).
        let sym = ClassFilter {
            size: 4,
            predicate: ClassPredicate::MinSym { min_sym: 2.0 },
        };
        let w = sym.weight().unwrap();
        assert_eq!(w.count, 1u32.into());
        assert_eq!(w.bst_probability, BigRational::new(1.into(), 3.into()));
        let bits = ClassFilter {
            size: 4,
            predicate: ClassPredicate::MinBstBits { min_bits: 2.0 },
        };
        let w = bits.weight().unwrap();
        assert_eq!(w.count, 4u32.into());
        assert_eq!(w.bst_probability, BigRational::new(2.into(), 3.into()));
        assert!(ClassFilter::high_automorphism(13, 0.27).weight().is_err());
    }
}
