//! Benchmark inputs shared by the criterion suites.

use netroles::synth::{erdos_renyi, planted_roles};
use netroles::Graph;

/// Sparse random graph with mean degree about 4.
pub fn sparse_graph(n: usize, seed: u64) -> Graph {
    erdos_renyi(n, 4.0 / (n.max(2) - 1) as f64, seed).expect("valid probability")
}

/// The planted star/clique/bridge graph.
pub fn planted(seed: u64) -> Graph {
    planted_roles(seed).graph
}
