//! Seeded random graphs for tests, benchmarks and demos.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// `G(n, p)`: each unordered pair is an edge independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::undirected(n, &edges)
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng);
    p
}

/// A graph with planted roles and the ground-truth node groups.
#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub graph: Graph,
    pub star_centers: Vec<usize>,
    pub star_leaves: Vec<usize>,
    /// Clique members with no bridge attached.
    pub clique_core: Vec<usize>,
    /// Clique members a bridge attaches to.
    pub clique_ports: Vec<usize>,
    pub bridges: Vec<usize>,
}

const CLIQUES: usize = 3;
const CLIQUE_SIZE: usize = 6;
const STARS: usize = 3;
const STAR_LEAVES: usize = 6;

/// Three 6-cliques and three 7-node stars arranged in a ring in random
/// order, with one bridge node between each pair of ring neighbors. A
/// bridge attaches to a star through its center and to a clique through a
/// random member.
pub fn planted_roles(seed: u64) -> PlantedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut next = 0;
    // attachment candidates per structure
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut star_centers = Vec::new();
    let mut star_leaves = Vec::new();
    let mut clique_members = Vec::new();

    for _ in 0..CLIQUES {
        let members: Vec<usize> = (next..next + CLIQUE_SIZE).collect();
        next += CLIQUE_SIZE;
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
        clique_members.extend(&members);
        blocks.push(members);
    }
    for _ in 0..STARS {
        let center = next;
        next += 1;
        for leaf in next..next + STAR_LEAVES {
            edges.push((center, leaf));
            star_leaves.push(leaf);
        }
        next += STAR_LEAVES;
        star_centers.push(center);
        blocks.push(vec![center]);
    }

    blocks.shuffle(&mut rng);
    let mut bridges = Vec::new();
    let mut ports = Vec::new();
    for i in 0..blocks.len() {
        let bridge = next;
        next += 1;
        bridges.push(bridge);
        for block in [&blocks[i], &blocks[(i + 1) % blocks.len()]] {
            let port = block[rng.random_range(0..block.len())];
            edges.push((port.min(bridge), port.max(bridge)));
            if block.len() > 1 {
                ports.push(port);
            }
        }
    }
    ports.sort_unstable();
    ports.dedup();
    let clique_core = clique_members
        .into_iter()
        .filter(|u| ports.binary_search(u).is_err())
        .collect();

    PlantedGraph {
        graph: Graph::undirected(next, &edges).expect("planted construction is a simple graph"),
        star_centers,
        star_leaves,
        clique_core,
        clique_ports: ports,
        bridges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        assert_eq!(erdos_renyi(6, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(6, 1.0, 1).unwrap().edge_count(), 15);
        assert!(erdos_renyi(6, 1.5, 1).is_err());
        assert_eq!(
            erdos_renyi(8, 0.4, 3).unwrap(),
            erdos_renyi(8, 0.4, 3).unwrap()
        );
    }

    #[test]
    fn permutation_is_bijection() {
        let mut p = random_permutation(20, 5);
        p.sort_unstable();
        assert_eq!(p, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn planted_shape() {
        for seed in 0..10 {
            let pg = planted_roles(seed);
            let g = &pg.graph;
            assert_eq!(g.node_count(), 3 * 6 + 3 * 7 + 6);
            assert_eq!(g.edge_count(), 3 * 15 + 3 * 6 + 12);
            for &c in &pg.star_centers {
                assert_eq!(g.degree(c), 8);
            }
            for &b in &pg.bridges {
                assert_eq!(g.degree(b), 2);
            }
            for &u in &pg.clique_core {
                assert_eq!(g.degree(u), 5);
            }
            assert!(pg.clique_core.len() >= 3 * 4);
            assert_eq!(pg.clique_core.len() + pg.clique_ports.len(), 18);
        }
    }
}
