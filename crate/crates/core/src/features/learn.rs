//! Iterative feature learning: primitives, then rounds of neighborhood
//! aggregation, each followed by redundancy pruning, until a round adds
//! nothing new.

use std::collections::HashMap;

use ndarray::{concatenate, Array2, Axis};

use super::descriptor::{validate_descriptors, FeatureDescriptor, Operator, PrimitiveKind, Recipe};
use super::matrix::FeatureMatrix;
use super::operators::aggregate_neighbors;
use super::primitives::compute_primitive;
use super::selection::{create_feature_graph, surviving_features, PruneRule, SimilarityMeasure};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    /// `None` selects [`PrimitiveKind::standard`] for the graph at hand.
    pub primitives: Option<Vec<PrimitiveKind>>,
    pub operators: Vec<Operator>,
    /// Fraction of remaining nodes per log bin.
    pub bin_fraction: f64,
    /// Similarity at or above which two features are redundant.
    pub lambda: f64,
    /// Upper bound on rounds, counting the primitive round.
    pub max_iterations: usize,
    pub similarity: SimilarityMeasure,
    pub prune_rule: PruneRule,
    /// Extra non-negative node attributes, each of length `n`, entered
    /// alongside the primitives.
    pub attributes: Vec<Vec<f64>>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            primitives: None,
            operators: Operator::standard(),
            bin_fraction: 0.5,
            lambda: 1.0,
            max_iterations: 10,
            similarity: SimilarityMeasure::BinAgreement,
            prune_rule: PruneRule::Earliest,
            attributes: Vec::new(),
        }
    }
}

/// Output of [`learn_features`].
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedFeatures {
    /// Surviving features; descriptor ids are renumbered to `0..f`.
    pub features: FeatureMatrix,
    /// Surviving feature count after each round, starting with the
    /// primitive round.
    pub surviving_counts: Vec<usize>,
    /// True when the last round produced no surviving new feature (as
    /// opposed to stopping at `max_iterations`).
    pub converged: bool,
}

impl LearnedFeatures {
    pub fn rounds(&self) -> usize {
        self.surviving_counts.len()
    }
}

pub fn learn_features(g: &Graph, config: &LearnConfig) -> Result<LearnedFeatures> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidGraph("graph has no nodes".into()));
    }
    if config.max_iterations == 0 {
        return Err(Error::InvalidParameter(
            "max_iterations must be at least 1".into(),
        ));
    }
    let primitives = config
        .primitives
        .clone()
        .unwrap_or_else(|| PrimitiveKind::standard(g.is_directed()));
    if primitives.is_empty() {
        return Err(Error::InvalidParameter("primitive set is empty".into()));
    }
    check_attributes(&config.attributes, n)?;

    let mut next_id = 0;
    let mut columns = Vec::new();
    let mut descriptors = Vec::new();
    for &kind in &primitives {
        columns.push(compute_primitive(g, kind));
        descriptors.push(FeatureDescriptor::primitive(next_id, kind));
        next_id += 1;
    }
    for (i, attr) in config.attributes.iter().enumerate() {
        columns.push(attr.clone());
        descriptors.push(FeatureDescriptor {
            id: next_id,
            recipe: Recipe::Attribute(i),
            iteration: 0,
        });
        next_id += 1;
    }

    let initial = FeatureMatrix::from_columns(g.labels().to_vec(), &columns, descriptors)?;
    let fg = create_feature_graph(
        &initial,
        config.bin_fraction,
        config.lambda,
        config.similarity,
    )?;
    let mut current = initial.select_columns(&surviving_features(&fg, config.prune_rule, &[]))?;
    let mut surviving_counts = vec![current.feature_count()];
    let mut frontier: Vec<usize> = (0..current.feature_count()).collect();
    let mut converged = false;

    for iteration in 1..config.max_iterations {
        if frontier.is_empty() || config.operators.is_empty() {
            converged = true;
            break;
        }
        let mut new_columns = Vec::new();
        let mut new_descriptors = Vec::new();
        for &pos in &frontier {
            let base = current.column(pos).to_vec();
            let base_id = current.descriptors()[pos].id;
            for &op in &config.operators {
                new_columns.push(aggregate_neighbors(g, &base, op));
                new_descriptors.push(FeatureDescriptor::composite(
                    next_id, op, base_id, iteration,
                ));
                next_id += 1;
            }
        }

        let prior = current.feature_count();
        let merged = merge(&current, &new_columns, new_descriptors)?;
        let fg = create_feature_graph(
            &merged,
            config.bin_fraction,
            config.lambda,
            config.similarity,
        )?;
        let mut protected = vec![false; merged.feature_count()];
        protected[..prior].iter_mut().for_each(|p| *p = true);
        let keep = surviving_features(&fg, config.prune_rule, &protected);

        current = merged.select_columns(&keep)?;
        surviving_counts.push(current.feature_count());
        frontier = (prior..current.feature_count()).collect();
        if frontier.is_empty() {
            converged = true;
            break;
        }
    }

    current.compact_ids();
    Ok(LearnedFeatures {
        features: current,
        surviving_counts,
        converged,
    })
}

fn merge(
    current: &FeatureMatrix,
    new_columns: &[Vec<f64>],
    new_descriptors: Vec<FeatureDescriptor>,
) -> Result<FeatureMatrix> {
    let n = current.node_count();
    let added = Array2::from_shape_fn((n, new_columns.len()), |(i, j)| new_columns[j][i]);
    let values = concatenate(Axis(1), &[current.values().view(), added.view()])
        .map_err(|e| Error::Shape(e.to_string()))?;
    let mut descriptors = current.descriptors().to_vec();
    descriptors.extend(new_descriptors);
    FeatureMatrix::new(current.nodes().to_vec(), values, descriptors)
}

fn check_attributes(attributes: &[Vec<f64>], n: usize) -> Result<()> {
    for (i, attr) in attributes.iter().enumerate() {
        if attr.len() != n {
            return Err(Error::Shape(format!(
                "attribute {i} has {} values for {n} nodes",
                attr.len()
            )));
        }
        if let Some(v) = attr.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "attribute {i} holds {v}; attributes must be finite and non-negative"
            )));
        }
    }
    Ok(())
}

/// Evaluates a learned descriptor list on `g` without searching or pruning.
pub fn recompute(g: &Graph, descriptors: &[FeatureDescriptor]) -> Result<FeatureMatrix> {
    recompute_with_attributes(g, descriptors, &[])
}

/// As [`recompute`], supplying the attribute columns that attribute
/// descriptors refer to.
pub fn recompute_with_attributes(
    g: &Graph,
    descriptors: &[FeatureDescriptor],
    attributes: &[Vec<f64>],
) -> Result<FeatureMatrix> {
    validate_descriptors(descriptors)?;
    check_attributes(attributes, g.node_count())?;
    let mut by_id: HashMap<usize, usize> = HashMap::new();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(descriptors.len());
    for d in descriptors {
        let col = match d.recipe {
            Recipe::Primitive(kind) => compute_primitive(g, kind),
            Recipe::Attribute(i) => attributes.get(i).cloned().ok_or_else(|| {
                Error::MalformedDescriptors(format!("attribute {i} not supplied"))
            })?,
            Recipe::Composite { op, base } => aggregate_neighbors(g, &columns[by_id[&base]], op),
        };
        by_id.insert(d.id, columns.len());
        columns.push(col);
    }
    FeatureMatrix::from_columns(g.labels().to_vec(), &columns, descriptors.to_vec())
}
