use rayon::prelude::*;

use super::descriptor::Operator;
use crate::graph::Graph;

/// Aggregates `column` over each node's neighbors (undirected view).
/// Isolated nodes get 0.
///
/// Neighbor values are sorted before aggregation, so the result depends only
/// on the multiset of values and is bit-identical under relabeling.
pub fn aggregate_neighbors(g: &Graph, column: &[f64], op: Operator) -> Vec<f64> {
    (0..g.node_count())
        .into_par_iter()
        .map(|u| {
            let mut vals: Vec<f64> = g.neighbors(u).iter().map(|&v| column[v]).collect();
            if vals.is_empty() {
                return 0.0;
            }
            if op == Operator::Mode {
                vals.iter_mut().for_each(|x| *x = x.floor());
            }
            vals.sort_by(f64::total_cmp);
            match op {
                Operator::Sum => vals.iter().sum(),
                Operator::Mean => vals.iter().sum::<f64>() / vals.len() as f64,
                Operator::Max => vals[vals.len() - 1],
                Operator::Min => vals[0],
                Operator::Mode => mode_of_sorted(&vals),
            }
        })
        .collect()
}

// smallest value among the most frequent ones
fn mode_of_sorted(vals: &[f64]) -> f64 {
    let mut best = vals[0];
    let mut best_run = 0;
    let mut i = 0;
    while i < vals.len() {
        let mut j = i;
        while j < vals.len() && vals[j] == vals[i] {
            j += 1;
        }
        if j - i > best_run {
            best_run = j - i;
            best = vals[i];
        }
        i = j;
    }
    best
}
