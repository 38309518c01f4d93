//! Feature-based structural role discovery.
//!
//! The pipeline has two stages. [`features::learn_features`] turns a graph
//! into a compact, non-redundant node-by-feature matrix by recursively
//! aggregating structural primitives over neighborhoods. [`roles`] then
//! factorizes that matrix into node memberships over a small number of
//! roles, choosing the number of roles by description length.
//!
//! [`equivalence`] provides exact brute-force equivalence classes for small
//! graphs, and [`dynamic`] carries a learned role model to new graphs and
//! graph snapshots.

pub mod dynamic;
pub mod equivalence;
pub mod error;
pub mod features;
pub mod graph;
pub mod nnls;
pub mod roles;
pub mod synth;

pub use error::{Error, Result};
pub use features::{
    learn_features, recompute, FeatureDescriptor, FeatureMatrix, LearnConfig, LearnedFeatures,
};
pub use graph::{apply_permutation, load_edge_list, write_edge_list, Graph, NodePartition};
pub use roles::{
    fit_roles, hard_assignment, select_rank, soft_memberships, Criterion, RoleModel, SelectConfig,
};
