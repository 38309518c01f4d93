//! Exact graph equivalences for small graphs: structural, automorphic and
//! regular. These are brute-force oracles, not scalable algorithms.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodePartition};

/// Largest graph accepted by [`automorphic_orbits`].
pub const MAX_ORACLE_NODES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StructuralVariant {
    /// `N(u) = N(v)`.
    #[default]
    Strict,
    /// `N(u) \ {v} = N(v) \ {u}`, so adjacent twins also match.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefinementMode {
    /// Nodes stay together when they see the same set of neighbor classes.
    #[default]
    Set,
    /// Nodes stay together when they see the same multiset of neighbor
    /// classes (color refinement).
    Multiset,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum TwinKey {
    Open(Vec<usize>, Vec<usize>),
    Closed(Vec<usize>, Vec<usize>),
}

fn closed(list: &[usize], u: usize) -> Vec<usize> {
    let mut v = list.to_vec();
    let pos = v.binary_search(&u).unwrap_err();
    v.insert(pos, u);
    v
}

/// Partition into structural-equivalence classes. Directed graphs compare
/// out- and in-neighborhoods separately.
///
/// For the weak variant, two nodes are equivalent exactly when they are
/// false twins (same open neighborhood) or true twins (same closed
/// neighborhood). A node with an open twin cannot also have a distinct
/// closed twin, so each node is keyed by its open neighborhood when that is
/// shared and by its closed neighborhood otherwise.
pub fn structural_classes(g: &Graph, variant: StructuralVariant) -> NodePartition {
    let n = g.node_count();
    let open: Vec<(Vec<usize>, Vec<usize>)> = (0..n)
        .map(|u| {
            if g.is_directed() {
                (g.out_neighbors(u).to_vec(), g.in_neighbors(u).to_vec())
            } else {
                (g.neighbors(u).to_vec(), Vec::new())
            }
        })
        .collect();
    match variant {
        StructuralVariant::Strict => NodePartition::from_keys(open),
        StructuralVariant::Weak => {
            let mut counts = std::collections::HashMap::new();
            for key in &open {
                *counts.entry(key).or_insert(0usize) += 1;
            }
            let keys: Vec<TwinKey> = (0..n)
                .map(|u| {
                    let (out, inn) = &open[u];
                    if counts[&open[u]] > 1 {
                        TwinKey::Open(out.clone(), inn.clone())
                    } else if g.is_directed() {
                        TwinKey::Closed(closed(out, u), closed(inn, u))
                    } else {
                        TwinKey::Closed(closed(out, u), Vec::new())
                    }
                })
                .collect();
            NodePartition::from_keys(keys)
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

struct AutSearch<'a> {
    g: &'a Graph,
    sig: Vec<(usize, usize, usize)>,
    map: Vec<usize>,
    used: Vec<bool>,
    order: Vec<usize>,
}

impl AutSearch<'_> {
    fn consistent(&self, x: usize, y: usize, placed: &[usize]) -> bool {
        placed.iter().all(|&a| {
            let b = self.map[a];
            self.g.has_edge(x, a) == self.g.has_edge(y, b)
                && self.g.has_edge(a, x) == self.g.has_edge(b, y)
        })
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        for y in 0..self.g.node_count() {
            if self.used[y]
                || self.sig[x] != self.sig[y]
                || !self.consistent(x, y, &self.order[..depth])
            {
                continue;
            }
            self.map[x] = y;
            self.used[y] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[y] = false;
        }
        false
    }
}

/// Orbits of the automorphism group, found by backtracking search for an
/// automorphism mapping each candidate pair. Rejects graphs with more than
/// [`MAX_ORACLE_NODES`] nodes.
pub fn automorphic_orbits(g: &Graph) -> Result<NodePartition> {
    let n = g.node_count();
    if n > MAX_ORACLE_NODES {
        return Err(Error::OracleTooLarge {
            n,
            max: MAX_ORACLE_NODES,
        });
    }
    let sig: Vec<(usize, usize, usize)> = (0..n)
        .map(|u| {
            (
                g.degree(u),
                g.out_neighbors(u).len(),
                g.in_neighbors(u).len(),
            )
        })
        .collect();
    let mut uf = UnionFind((0..n).collect());
    for u in 0..n {
        for v in u + 1..n {
            if sig[u] != sig[v] || uf.find(u) == uf.find(v) {
                continue;
            }
            let mut order = vec![u];
            order.extend((0..n).filter(|&x| x != u));
            let mut search = AutSearch {
                g,
                sig: sig.clone(),
                map: vec![usize::MAX; n],
                used: vec![false; n],
                order,
            };
            search.map[u] = v;
            search.used[v] = true;
            if search.consistent(u, v, &[]) && search.extend(1) {
                for x in 0..n {
                    uf.union(x, search.map[x]);
                }
            }
        }
    }
    Ok(NodePartition::from_keys((0..n).map(|u| uf.find(u))))
}

/// Splits the classes of `p0` until every node in a class sees the same
/// neighbor classes. The fixed point is the coarsest such refinement of
/// `p0`. Directed graphs compare out- and in-neighbor classes separately.
pub fn regular_refinement(
    g: &Graph,
    p0: &NodePartition,
    mode: RefinementMode,
) -> Result<NodePartition> {
    let n = g.node_count();
    if p0.len() != n {
        return Err(Error::Shape(format!(
            "partition over {} nodes for a graph with {n}",
            p0.len()
        )));
    }
    let mut current = NodePartition::from_keys(p0.assignment().iter().copied());
    loop {
        let view = |list: &[usize], cls: &NodePartition| -> Vec<usize> {
            let mut labels: Vec<usize> = list.iter().map(|&v| cls.class_of(v)).collect();
            labels.sort_unstable();
            if mode == RefinementMode::Set {
                labels.dedup();
            }
            labels
        };
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|u| {
                if g.is_directed() {
                    (
                        current.class_of(u),
                        view(g.out_neighbors(u), &current),
                        view(g.in_neighbors(u), &current),
                    )
                } else {
                    (
                        current.class_of(u),
                        view(g.neighbors(u), &current),
                        Vec::new(),
                    )
                }
            })
            .collect();
        let next = NodePartition::from_keys(keys);
        if next.class_count() == current.class_count() {
            return Ok(next);
        }
        current = next;
    }
}

#[derive(Serialize)]
struct PartitionRecord {
    classes: Vec<Vec<u64>>,
}

/// Writes `{"classes": [[...], ...]}` with members replaced by `labels`.
/// Classes are ordered by smallest member and members are sorted.
pub fn write_partition_json<W: Write>(p: &NodePartition, labels: &[u64], mut out: W) -> Result<()> {
    if labels.len() != p.len() {
        return Err(Error::Shape(format!(
            "{} labels for {} nodes",
            labels.len(),
            p.len()
        )));
    }
    let mut classes: Vec<Vec<u64>> = p
        .classes()
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|u| labels[u])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    classes.sort();
    serde_json::to_writer(&mut out, &PartitionRecord { classes })?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::undirected(n, edges).unwrap()
    }

    fn classes(p: &NodePartition) -> Vec<Vec<usize>> {
        p.classes()
    }

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        g(n, &e)
    }

    #[test]
    fn structural_examples() {
        let star = g(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(
            classes(&structural_classes(&star, StructuralVariant::Strict)),
            vec![vec![0], vec![1, 2, 3]]
        );
        let k3 = g(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(
            structural_classes(&k3, StructuralVariant::Strict).class_count(),
            3
        );
        assert_eq!(
            structural_classes(&k3, StructuralVariant::Weak).class_count(),
            1
        );
        for variant in [StructuralVariant::Strict, StructuralVariant::Weak] {
            assert_eq!(
                classes(&structural_classes(&path(3), variant)),
                vec![vec![0, 2], vec![1]]
            );
        }
    }

    // weak equivalence checked pairwise against its definition
    #[test]
    fn weak_matches_definition() {
        let graphs = [
            g(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]),
            g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            g(6, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (4, 5)]),
        ];
        for graph in &graphs {
            let p = structural_classes(graph, StructuralVariant::Weak);
            let n = graph.node_count();
            for u in 0..n {
                for v in 0..n {
                    let a: Vec<_> = graph.neighbors(u).iter().filter(|&&x| x != v).collect();
                    let b: Vec<_> = graph.neighbors(v).iter().filter(|&&x| x != u).collect();
                    assert_eq!(a == b, p.class_of(u) == p.class_of(v), "{u} {v}");
                }
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let c4 = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(automorphic_orbits(&c4).unwrap().class_count(), 1);
        assert_eq!(
            classes(&automorphic_orbits(&path(4)).unwrap()),
            vec![vec![0, 3], vec![1, 2]]
        );
        let empty = g(0, &[]);
        assert!(automorphic_orbits(&empty).unwrap().is_empty());
        assert!(automorphic_orbits(&path(11)).is_err());
    }

    #[test]
    fn directed_orbits_respect_orientation() {
        // 0 -> 1 -> 2: every node distinct
        let d = Graph::new(3, &[(0, 1), (1, 2)], true).unwrap();
        assert_eq!(automorphic_orbits(&d).unwrap().class_count(), 3);
        // directed 3-cycle: one orbit
        let c = Graph::new(3, &[(0, 1), (1, 2), (2, 0)], true).unwrap();
        assert_eq!(automorphic_orbits(&c).unwrap().class_count(), 1);
    }

    // asymmetric graphs exist from n = 6; this one has a trivial group
    #[test]
    fn asymmetric_graph() {
        let a = g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (1, 5), (4, 5)]);
        let brute = brute_orbits(&a);
        assert_eq!(automorphic_orbits(&a).unwrap(), brute);
    }

    fn brute_orbits(graph: &Graph) -> NodePartition {
        fn perms(cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, n: usize) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for v in 0..n {
                if !cur.contains(&v) {
                    cur.push(v);
                    perms(cur, out, n);
                    cur.pop();
                }
            }
        }
        let n = graph.node_count();
        let mut all = Vec::new();
        perms(&mut Vec::new(), &mut all, n);
        let mut uf = UnionFind((0..n).collect());
        for p in all {
            let ok = graph
                .edges()
                .iter()
                .all(|&(u, v)| graph.has_edge(p[u], p[v]));
            if ok {
                for x in 0..n {
                    uf.union(x, p[x]);
                }
            }
        }
        NodePartition::from_keys((0..n).map(|u| uf.find(u)))
    }

    #[test]
    fn orbits_match_full_enumeration() {
        let mut seed = 7u64;
        for _ in 0..40 {
            let n = 6;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    seed = seed
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    if (seed >> 33).is_multiple_of(2) {
                        edges.push((u, v));
                    }
                }
            }
            let graph = g(n, &edges);
            assert_eq!(
                automorphic_orbits(&graph).unwrap(),
                brute_orbits(&graph),
                "{edges:?}"
            );
        }
    }

    #[test]
    fn regular_examples() {
        let p5 = path(5);
        let p0 = NodePartition::from_keys((0..5).map(|u| p5.degree(u)));
        let fixed = regular_refinement(&p5, &p0, RefinementMode::Set).unwrap();
        assert_eq!(classes(&fixed), vec![vec![0, 4], vec![1, 3], vec![2]]);

        let single =
            regular_refinement(&p5, &NodePartition::single_class(5), RefinementMode::Set).unwrap();
        assert_eq!(single.class_count(), 1);

        let s = NodePartition::singletons(5);
        assert_eq!(regular_refinement(&p5, &s, RefinementMode::Set).unwrap(), s);
        assert!(
            regular_refinement(&p5, &NodePartition::singletons(4), RefinementMode::Set).is_err()
        );
    }

    #[test]
    fn multiset_mode_separates_by_counts() {
        // star centers with 2 and 3 leaves: sets agree, multisets do not
        let graph = g(7, &[(0, 1), (0, 2), (3, 4), (3, 5), (3, 6)]);
        let p0 = NodePartition::from_keys((0..7).map(|u| u == 0 || u == 3));
        let set = regular_refinement(&graph, &p0, RefinementMode::Set).unwrap();
        assert_eq!(set.class_count(), 2);
        let multi = regular_refinement(&graph, &p0, RefinementMode::Multiset).unwrap();
        assert_ne!(multi.class_of(0), multi.class_of(3));
    }

    #[test]
    fn partition_json() {
        let p = automorphic_orbits(&path(4)).unwrap();
        let mut buf = Vec::new();
        write_partition_json(&p, &[0, 1, 2, 3], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"classes\":[[0,3],[1,2]]}\n"
        );
    }
}
