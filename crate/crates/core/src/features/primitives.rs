//! Per-node structural primitives.
//!
//! Every primitive is a function of the graph up to relabeling, so nodes in
//! the same automorphism orbit always receive identical values.

use rayon::prelude::*;

use super::descriptor::PrimitiveKind;
use crate::graph::Graph;

/// Evaluates `kind` at every node. Directed graphs use the undirected view
/// for everything except in- and out-degree; on undirected graphs those two
/// equal the plain degree.
pub fn compute_primitive(g: &Graph, kind: PrimitiveKind) -> Vec<f64> {
    match kind {
        PrimitiveKind::Degree => per_node(g, |u| g.degree(u) as f64),
        PrimitiveKind::InDegree => per_node(g, |u| g.in_neighbors(u).len() as f64),
        PrimitiveKind::OutDegree => per_node(g, |u| g.out_neighbors(u).len() as f64),
        PrimitiveKind::WeightedDegree => per_node(g, |u| g.strength(u)),
        PrimitiveKind::Wedges => per_node(g, |u| {
            let d = g.degree(u) as f64;
            d * (d - 1.0) / 2.0
        }),
        PrimitiveKind::Triangles => per_node(g, |u| triangles_at(g, u) as f64),
        PrimitiveKind::EgonetInternalEdges => {
            per_node(g, |u| (g.degree(u) + triangles_at(g, u)) as f64)
        }
        PrimitiveKind::EgonetExternalEdges => per_node(g, |u| egonet_external(g, u) as f64),
        PrimitiveKind::CoreNumber => core_numbers(g).into_iter().map(|c| c as f64).collect(),
    }
}

fn per_node<F>(g: &Graph, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..g.node_count()).into_par_iter().map(f).collect()
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Number of triangles through `u` (undirected view).
pub(crate) fn triangles_at(g: &Graph, u: usize) -> usize {
    let nu = g.neighbors(u);
    let twice: usize = nu
        .iter()
        .map(|&v| sorted_intersection_len(nu, g.neighbors(v)))
        .sum();
    twice / 2
}

/// Edges with exactly one endpoint in the egonet of `u`.
fn egonet_external(g: &Graph, u: usize) -> usize {
    let internal = g.degree(u) + triangles_at(g, u);
    let degree_sum: usize =
        g.degree(u) + g.neighbors(u).iter().map(|&v| g.degree(v)).sum::<usize>();
    degree_sum - 2 * internal
}

/// k-core index of every node by repeated minimum-degree peeling
/// (bucket queue, linear time).
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut degree: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // nodes sorted by degree, with bucket start offsets
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for u in 0..n {
        pos[u] = bin[degree[u]];
        order[pos[u]] = u;
        bin[degree[u]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let u = order[i];
        for &v in g.neighbors(u) {
            if degree[v] > degree[u] {
                let dv = degree[v];
                let pv = pos[v];
                let pw = bin[dv];
                let w = order[pw];
                if v != w {
                    order.swap(pv, pw);
                    pos[v] = pw;
                    pos[w] = pv;
                }
                bin[dv] += 1;
                degree[v] -= 1;
            }
        }
    }
    degree
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Graph {
        Graph::undirected(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn k3() -> Graph {
        Graph::undirected(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    // Egonet counts by direct enumeration over the edge list.
    fn egonet_brute(g: &Graph, u: usize) -> (usize, usize) {
        let mut ego = vec![false; g.node_count()];
        ego[u] = true;
        for &v in g.neighbors(u) {
            ego[v] = true;
        }
        let mut internal = 0;
        let mut external = 0;
        for &(a, b) in g.edges() {
            match (ego[a], ego[b]) {
                (true, true) => internal += 1,
                (true, false) | (false, true) => external += 1,
                _ => {}
            }
        }
        (internal, external)
    }

    #[test]
    fn star_degrees() {
        assert_eq!(
            compute_primitive(&star(), PrimitiveKind::Degree),
            vec![3.0, 1.0, 1.0, 1.0]
        );
        assert_eq!(
            compute_primitive(&star(), PrimitiveKind::Wedges),
            vec![3.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn k3_triangles() {
        assert_eq!(
            compute_primitive(&k3(), PrimitiveKind::Triangles),
            vec![1.0; 3]
        );
        assert_eq!(
            compute_primitive(&k3(), PrimitiveKind::CoreNumber),
            vec![2.0; 3]
        );
    }

    #[test]
    fn star_leaf_egonet() {
        let g = star();
        assert_eq!(egonet_brute(&g, 1), (1, 2));
        let ext = compute_primitive(&g, PrimitiveKind::EgonetExternalEdges);
        let int = compute_primitive(&g, PrimitiveKind::EgonetInternalEdges);
        assert_eq!(ext[1], 2.0);
        assert_eq!(int[1], 1.0);
        assert_eq!((int[0], ext[0]), (3.0, 0.0));
    }

    #[test]
    fn egonet_matches_enumeration_on_mixed_graph() {
        let g = Graph::undirected(
            7,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (3, 5),
                (5, 6),
            ],
        )
        .unwrap();
        let int = compute_primitive(&g, PrimitiveKind::EgonetInternalEdges);
        let ext = compute_primitive(&g, PrimitiveKind::EgonetExternalEdges);
        for u in 0..7 {
            let (i, e) = egonet_brute(&g, u);
            assert_eq!((int[u], ext[u]), (i as f64, e as f64), "node {u}");
        }
    }

    #[test]
    fn core_numbers_of_clique_with_tail() {
        // K4 on 0..4 plus path 3-4-5
        let g = Graph::undirected(
            6,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (4, 5),
            ],
        )
        .unwrap();
        assert_eq!(core_numbers(&g), vec![3, 3, 3, 3, 1, 1]);
        let isolated = Graph::undirected(2, &[]).unwrap();
        assert_eq!(core_numbers(&isolated), vec![0, 0]);
    }

    #[test]
    fn directed_degrees_split() {
        let g = Graph::new(3, &[(0, 1), (0, 2), (2, 0)], true).unwrap();
        assert_eq!(
            compute_primitive(&g, PrimitiveKind::OutDegree),
            vec![2.0, 0.0, 1.0]
        );
        assert_eq!(
            compute_primitive(&g, PrimitiveKind::InDegree),
            vec![1.0, 1.0, 1.0]
        );
        assert_eq!(
            compute_primitive(&g, PrimitiveKind::Degree),
            vec![2.0, 1.0, 1.0]
        );
        assert_eq!(
            compute_primitive(&g, PrimitiveKind::WeightedDegree),
            vec![3.0, 1.0, 2.0]
        );
    }

    #[test]
    fn weighted_degree_sums_weights() {
        let g = Graph::with_weights(3, &[(0, 1), (1, 2)], &[0.5, 2.0], false).unwrap();
        assert_eq!(
            compute_primitive(&g, PrimitiveKind::WeightedDegree),
            vec![0.5, 2.5, 2.0]
        );
    }
}
