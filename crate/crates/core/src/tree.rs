//! Ordered binary trees stored as a post-order arena.
//!
//! Every node is either a leaf or an internal node with exactly two
//! children. Nodes are kept in post-order, so children always have smaller
//! ids than their parent and the root is the last node. Bottom-up passes are
//! plain forward loops over the arena, which keeps them iterative even for
//! degenerate trees with millions of leaves.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf,
    Internal { left: NodeId, right: NodeId },
}

/// An ordered binary tree. Structural equality is derived: the post-order
/// layout of a shape is unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf() -> Self {
        Tree {
            nodes: vec![Node::Leaf],
        }
    }

    /// Builds the tree whose root has `left` and `right` as children.
    pub fn join(left: &Tree, right: &Tree) -> Self {
        let offset = left.nodes.len() as NodeId;
        let mut nodes = Vec::with_capacity(left.nodes.len() + right.nodes.len() + 1);
        nodes.extend_from_slice(&left.nodes);
        nodes.extend(right.nodes.iter().map(|node| match *node {
            Node::Leaf => Node::Leaf,
            Node::Internal { left, right } => Node::Internal {
                left: left + offset,
                right: right + offset,
            },
        }));
        nodes.push(Node::Internal {
            left: offset - 1,
            right: nodes.len() as NodeId - 1,
        });
        Tree { nodes }
    }

    /// Builds a tree from its pre-order sequence of node kinds (`true` for
    /// an internal node, `false` for a leaf).
    pub fn from_preorder<I>(flags: I) -> Result<Self>
    where
        I: IntoIterator<Item = bool>,
    {
        let flags = flags.into_iter();
        let mut nodes = Vec::with_capacity(flags.size_hint().0);
        // Internal nodes whose right subtree is still open, with the id of
        // the finished left subtree once it is known.
        let mut open: Vec<Option<NodeId>> = Vec::new();
        let mut root = None;
        for (pos, internal) in flags.enumerate() {
            if root.is_some() {
                return Err(Error::MalformedTree(format!(
                    "trailing node at pre-order position {pos}"
                )));
            }
            if internal {
                open.push(None);
                continue;
            }
            if nodes.len() >= NodeId::MAX as usize {
                return Err(Error::MalformedTree("tree exceeds 2^32 - 1 nodes".into()));
            }
            nodes.push(Node::Leaf);
            let mut done = nodes.len() as NodeId - 1;
            loop {
                match open.last_mut() {
                    None => {
                        root = Some(done);
                        break;
                    }
                    Some(slot @ None) => {
                        *slot = Some(done);
                        break;
                    }
                    Some(Some(left)) => {
                        let left = *left;
                        open.pop();
                        nodes.push(Node::Internal { left, right: done });
                        done = nodes.len() as NodeId - 1;
                    }
                }
            }
        }
        match root {
            Some(_) => Ok(Tree { nodes }),
            None => Err(Error::MalformedTree(
                "pre-order sequence ends before the tree is complete".into(),
            )),
        }
    }

    /// Pre-order node kinds, the inverse of [`Tree::from_preorder`].
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder {
            tree: self,
            stack: vec![self.root()],
        }
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() as NodeId - 1
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Total number of nodes, `2 * leaf_count() - 1`.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> u64 {
        (self.nodes.len() as u64).div_ceil(2)
    }

    pub fn is_leaf(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Leaf count of every fringe subtree, indexed by node id.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let mut sizes = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let size = match *node {
                Node::Leaf => 1,
                Node::Internal { left, right } => sizes[left as usize] + sizes[right as usize],
            };
            sizes.push(size);
        }
        sizes
    }

    /// The tree with the children of every internal node swapped.
    pub fn mirror(&self) -> Tree {
        Tree::from_preorder(MirrorPreorder {
            tree: self,
            stack: vec![self.root()],
        })
        .expect("mirror of a well-formed tree is well-formed")
    }

    /// The fringe subtree rooted at `id`, copied into its own arena.
    pub fn fringe_subtree(&self, id: NodeId) -> Tree {
        Tree::from_preorder(Preorder {
            tree: self,
            stack: vec![id],
        })
        .expect("fringe subtree of a well-formed tree is well-formed")
    }

    pub fn stats(&self) -> TreeStats {
        let leaves = self.leaf_count();
        let sym = sym_count(self);
        TreeStats {
            leaves,
            sym,
            aut_log2: sym,
            class_size_log2: leaves - 1 - sym,
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({})", crate::text::format_tree(self))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::text::write_tree(self, f)
    }
}

pub struct Preorder<'a> {
    tree: &'a Tree,
    stack: Vec<NodeId>,
}

impl Iterator for Preorder<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        let id = self.stack.pop()?;
        match self.tree.node(id) {
            Node::Leaf => Some(false),
            Node::Internal { left, right } => {
                self.stack.push(right);
                self.stack.push(left);
                Some(true)
            }
        }
    }
}

struct MirrorPreorder<'a> {
    tree: &'a Tree,
    stack: Vec<NodeId>,
}

impl Iterator for MirrorPreorder<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        let id = self.stack.pop()?;
        match self.tree.node(id) {
            Node::Leaf => Some(false),
            Node::Internal { left, right } => {
                self.stack.push(left);
                self.stack.push(right);
                Some(true)
            }
        }
    }
}

/// Structural statistics of a tree. `|Aut(t)| = 2^aut_log2` and the
/// isomorphism class of `t` has `2^class_size_log2` ordered members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub leaves: u64,
    pub sym: u64,
    pub aut_log2: u64,
    pub class_size_log2: u64,
}

/// Identifier of an unordered-isomorphism class, issued by a [`CanonTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonCode(pub u32);

impl CanonCode {
    pub const LEAF: CanonCode = CanonCode(0);
}

/// Interning table mapping unordered child-code pairs to dense class ids.
///
/// Codes are only comparable between trees interned into the same table.
/// The leaf is always code 0; internal classes are numbered in first-seen
/// order starting from 1.
#[derive(Clone, Debug, Default)]
pub struct CanonTable {
    ids: FxHashMap<(u32, u32), u32>,
}

impl CanonTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of classes issued so far, counting the leaf.
    pub fn len(&self) -> usize {
        self.ids.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intern(&mut self, a: CanonCode, b: CanonCode) -> CanonCode {
        let key = if a <= b { (a.0, b.0) } else { (b.0, a.0) };
        let next = self.ids.len() as u32 + 1;
        CanonCode(*self.ids.entry(key).or_insert(next))
    }

    /// Canonical code of every fringe subtree of `t`, indexed by node id.
    pub fn codes(&mut self, t: &Tree) -> Vec<CanonCode> {
        let mut codes: Vec<CanonCode> = Vec::with_capacity(t.node_count());
        for node in t.nodes() {
            let code = match *node {
                Node::Leaf => CanonCode::LEAF,
                Node::Internal { left, right } => {
                    self.intern(codes[left as usize], codes[right as usize])
                }
            };
            codes.push(code);
        }
        codes
    }

    pub fn code(&mut self, t: &Tree) -> CanonCode {
        *self.codes(t).last().expect("trees are non-empty")
    }
}

pub fn leaf_count(t: &Tree) -> u64 {
    t.leaf_count()
}

/// Number of internal nodes whose two child subtrees are isomorphic as
/// unordered trees.
pub fn sym_count(t: &Tree) -> u64 {
    let codes = CanonTable::new().codes(t);
    sym_count_with_codes(t, &codes)
}

pub(crate) fn sym_count_with_codes(t: &Tree, codes: &[CanonCode]) -> u64 {
    t.nodes()
        .iter()
        .filter(|node| match **node {
            Node::Leaf => false,
            Node::Internal { left, right } => codes[left as usize] == codes[right as usize],
        })
        .count() as u64
}

/// `log2` of the number of ordered trees isomorphic to `t`.
pub fn iso_class_size_log2(t: &Tree) -> u64 {
    t.leaf_count() - 1 - sym_count(t)
}

pub fn canonical_code(t: &Tree, table: &mut CanonTable) -> CanonCode {
    table.code(t)
}

/// Left comb: every internal node has a leaf as its right child.
pub fn left_comb(n: u64) -> Tree {
    assert!(n >= 1);
    let mut nodes = Vec::with_capacity(2 * n as usize - 1);
    nodes.push(Node::Leaf);
    let mut acc = 0;
    for _ in 1..n {
        nodes.push(Node::Leaf);
        let leaf = nodes.len() as NodeId - 1;
        nodes.push(Node::Internal {
            left: acc,
            right: leaf,
        });
        acc = nodes.len() as NodeId - 1;
    }
    Tree { nodes }
}

/// Complete tree with `2^height` leaves.
pub fn complete(height: u32) -> Tree {
    let mut t = Tree::leaf();
    for _ in 0..height {
        t = Tree::join(&t, &t);
    }
    t
}
