//! Feature scoring and redundancy pruning.
//!
//! Features are compared pairwise, pairs scoring at least `lambda` become
//! edges of a feature graph, and each connected component of that graph is
//! reduced to a single representative.

use rayon::prelude::*;

use super::binning::{vertical_log_bin, BinnedColumn};
use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

/// Pairwise feature similarity used to build the feature graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimilarityMeasure {
    /// Fraction of nodes placed in the same vertical log bin by both features.
    #[default]
    BinAgreement,
    /// Absolute Pearson correlation of the raw columns. Two constant columns
    /// score 1, a constant against a non-constant column scores 0.
    Pearson,
}

/// Which member of a redundant component survives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneRule {
    /// Smallest descriptor id.
    #[default]
    Earliest,
    /// Smallest mean similarity to the rest of its component; ties go to the
    /// earlier feature.
    LeastCorrelated,
}

/// Agreement rate of two binned columns.
pub fn feature_similarity(a: &BinnedColumn, b: &BinnedColumn) -> Result<f64> {
    if a.bins.len() != b.bins.len() {
        return Err(Error::Shape(format!(
            "binned columns over {} and {} nodes",
            a.bins.len(),
            b.bins.len()
        )));
    }
    if a.bins.is_empty() {
        return Ok(1.0);
    }
    let agree = a.bins.iter().zip(&b.bins).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.bins.len() as f64)
}

pub fn pearson_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "columns of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as f64;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / n;
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    Ok(match (saa > 0.0, sbb > 0.0) {
        (false, false) => 1.0,
        (true, true) => (sab / (saa * sbb).sqrt()).abs().min(1.0),
        _ => 0.0,
    })
}

/// Undirected graph over feature positions; every edge carries its
/// similarity, which is at least the threshold used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl FeatureGraph {
    /// Component id of every vertex; components are numbered by their
    /// smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j, _) in &self.edges {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                // keep the smaller id as root
                let (lo, hi) = (ri.min(rj), ri.max(rj));
                parent[hi] = lo;
            }
        }
        let roots: Vec<usize> = (0..self.vertex_count)
            .map(|x| find(&mut parent, x))
            .collect();
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        roots
            .iter()
            .map(|&r| {
                if label[r] == usize::MAX {
                    label[r] = next;
                    next += 1;
                }
                label[r]
            })
            .collect()
    }

    fn similarity(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (i.min(j), i.max(j));
        self.edges
            .iter()
            .find(|&&(x, y, _)| x == a && y == b)
            .map_or(0.0, |e| e.2)
    }
}

/// Links every pair of columns of `x` whose similarity is at least `lambda`.
pub fn create_feature_graph(
    x: &FeatureMatrix,
    p: f64,
    lambda: f64,
    measure: SimilarityMeasure,
) -> Result<FeatureGraph> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "similarity threshold must lie in (0, 1], got {lambda}"
        )));
    }
    let f = x.feature_count();
    let columns: Vec<Vec<f64>> = (0..f).map(|j| x.column(j).to_vec()).collect();
    let binned: Vec<BinnedColumn> = match measure {
        SimilarityMeasure::BinAgreement => columns
            .par_iter()
            .map(|c| vertical_log_bin(c, p))
            .collect::<Result<_>>()?,
        SimilarityMeasure::Pearson => Vec::new(),
    };
    let score = |i: usize, j: usize| -> Result<f64> {
        match measure {
            SimilarityMeasure::BinAgreement => feature_similarity(&binned[i], &binned[j]),
            SimilarityMeasure::Pearson => pearson_similarity(&columns[i], &columns[j]),
        }
    };
    let per_row: Vec<Vec<(usize, usize, f64)>> = (0..f)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in i + 1..f {
                let s = score(i, j)?;
                if s >= lambda {
                    row.push((i, j, s));
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(FeatureGraph {
        vertex_count: f,
        edges: per_row.into_iter().flatten().collect(),
    })
}

/// Positions that survive pruning, ascending.
///
/// One feature is kept per connected component. Positions flagged in
/// `protected` are always kept; a component holding protected features keeps
/// only those. Protected features must be pairwise non-adjacent, which holds
/// when they are the survivors of an earlier round.
pub fn surviving_features(fg: &FeatureGraph, rule: PruneRule, protected: &[bool]) -> Vec<usize> {
    let comp = fg.components();
    let count = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let is_protected = |v: usize| protected.get(v).copied().unwrap_or(false);

    let mut keep = Vec::new();
    for group in &members {
        let guarded: Vec<usize> = group.iter().copied().filter(|&v| is_protected(v)).collect();
        if !guarded.is_empty() {
            keep.extend(guarded);
            continue;
        }
        let chosen = match rule {
            PruneRule::Earliest => group[0],
            PruneRule::LeastCorrelated => {
                let mean_sim = |v: usize| -> f64 {
                    if group.len() == 1 {
                        return 0.0;
                    }
                    let total: f64 = group
                        .iter()
                        .filter(|&&w| w != v)
                        .map(|&w| fg.similarity(v, w))
                        .sum();
                    total / (group.len() - 1) as f64
                };
                let mut best = group[0];
                let mut best_score = mean_sim(best);
                for &v in &group[1..] {
                    let s = mean_sim(v);
                    if s < best_score {
                        best = v;
                        best_score = s;
                    }
                }
                best
            }
        };
        keep.push(chosen);
    }
    keep.sort_unstable();
    keep
}

/// Keeps the earliest feature of every connected component of `fg`.
pub fn prune_feature_set(fg: &FeatureGraph, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    if fg.vertex_count != x.feature_count() {
        return Err(Error::Shape(format!(
            "feature graph over {} features, matrix has {}",
            fg.vertex_count,
            x.feature_count()
        )));
    }
    x.select_columns(&surviving_features(fg, PruneRule::Earliest, &[]))
}
