//! Random binary trees, their minimal DAGs, and fringe-subtree statistics.
//!
//! Trees are full binary trees stored in a post-order arena. Two random
//! models are provided: the uniform model (every tree with `n` leaves is
//! equally likely) and the binary search tree model. Exact counting and
//! expectation formulas live in [`exact`], the constants governing the
//! asymptotic DAG sizes in [`constants`], and Monte Carlo checks in
//! [`experiment`].

pub mod constants;
pub mod dag;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod format;
pub mod random;
pub mod text;
pub mod tree;

pub use dag::{
    compress, dag_sizes, fringe_profile, minimal_dag, unordered_minimal_dag, ClassFilter, DagMode,
    DagSizes, FringeProfile, MinimalDag,
};
pub use error::{Error, Result};
pub use random::{sample_bst, sample_uniform, ModelKind, Seed};
pub use text::{format_tree, parse_tree, ParseError};
pub use tree::{sym_count, Tree, TreeStats};
