//! Structural feature construction.

mod binning;
mod descriptor;
mod learn;
mod matrix;
mod operators;
mod primitives;
mod selection;

pub use binning::{vertical_log_bin, BinnedColumn};
pub use descriptor::{validate_descriptors, FeatureDescriptor, Operator, PrimitiveKind, Recipe};
pub use learn::{
    learn_features, recompute, recompute_with_attributes, LearnConfig, LearnedFeatures,
};
pub(crate) use matrix::write_matrix_csv;
pub use matrix::{read_descriptors_json, read_matrix_csv, FeatureMatrix};
pub use operators::aggregate_neighbors;
pub use primitives::{compute_primitive, core_numbers};
pub use selection::{
    create_feature_graph, feature_similarity, pearson_similarity, prune_feature_set,
    surviving_features, FeatureGraph, PruneRule, SimilarityMeasure,
};

use crate::graph::Graph;

/// Evaluates `op` over neighbors of feature column `base` of `x`.
pub fn apply_operator(
    g: &Graph,
    x: &FeatureMatrix,
    base: usize,
    op: Operator,
) -> crate::Result<Vec<f64>> {
    if base >= x.feature_count() {
        return Err(crate::Error::FeatureOutOfRange {
            id: base,
            count: x.feature_count(),
        });
    }
    if x.node_count() != g.node_count() {
        return Err(crate::Error::Shape(format!(
            "matrix has {} rows, graph has {} nodes",
            x.node_count(),
            g.node_count()
        )));
    }
    Ok(aggregate_neighbors(g, &x.column(base).to_vec(), op))
}
