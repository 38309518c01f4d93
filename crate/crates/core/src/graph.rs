//! Immutable simple graphs with dense node ids, edge-list ingestion and
//! relabeling.
//!
//! Node ids are always `0..n`. The identifiers found in an input file are
//! kept as `labels` so that outputs can be reported against the caller's
//! original ids.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A simple graph (no self-loops, no parallel edges), optionally weighted and
/// optionally directed.
///
/// Undirected edges are stored as `(u, v)` with `u < v`; directed edges keep
/// their orientation. Edges are kept sorted, and adjacency lists are derived
/// from them, so two graphs with the same edge set compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    labels: Vec<u64>,
    // undirected view: sorted, deduplicated
    adj: Vec<Vec<usize>>,
    // per-node sum of incident edge weights (undirected view)
    strength: Vec<f64>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds an unweighted graph. Rejects self-loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)], directed: bool) -> Result<Self> {
        Self::build(n, edges, None, directed, None)
    }

    /// Builds a weighted graph; `weights[i]` belongs to `edges[i]`.
    pub fn with_weights(
        n: usize,
        edges: &[(usize, usize)],
        weights: &[f64],
        directed: bool,
    ) -> Result<Self> {
        if weights.len() != edges.len() {
            return Err(Error::Shape(format!(
                "{} edges but {} weights",
                edges.len(),
                weights.len()
            )));
        }
        Self::build(n, edges, Some(weights), directed, None)
    }

    /// Convenience constructor for an undirected unweighted graph.
    pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges, false)
    }

    /// Replaces the external labels reported for each node.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Shape(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    fn build(
        n: usize,
        edges: &[(usize, usize)],
        weights: Option<&[f64]>,
        directed: bool,
        labels: Option<Vec<u64>>,
    ) -> Result<Self> {
        let mut keyed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            let w = weights.map_or(1.0, |ws| ws[i]);
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            let key = if directed {
                (u, v)
            } else {
                (u.min(v), u.max(v))
            };
            if keyed.insert(key, w).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }

        let sorted: Vec<(usize, usize)> = keyed.keys().copied().collect();
        let weights = weights.map(|_| keyed.values().copied().collect::<Vec<_>>());

        let mut adj = vec![Vec::new(); n];
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut incident: Vec<Vec<f64>> = vec![Vec::new(); n];
        for (i, &(u, v)) in sorted.iter().enumerate() {
            adj[u].push(v);
            adj[v].push(u);
            out_adj[u].push(v);
            in_adj[v].push(u);
            let w = weights.as_ref().map_or(1.0, |ws| ws[i]);
            incident[u].push(w);
            incident[v].push(w);
        }
        // summed in sorted order so relabeling cannot change the rounding
        let strength = incident
            .into_iter()
            .map(|mut ws| {
                ws.sort_by(f64::total_cmp);
                ws.iter().sum()
            })
            .collect();
        for list in adj
            .iter_mut()
            .chain(out_adj.iter_mut())
            .chain(in_adj.iter_mut())
        {
            list.sort_unstable();
            list.dedup();
        }
        if !directed {
            out_adj = adj.clone();
            in_adj = adj.clone();
        }

        Ok(Graph {
            n,
            directed,
            edges: sorted,
            weights,
            labels: labels.unwrap_or_else(|| (0..n as u64).collect()),
            adj,
            strength,
            out_adj,
            in_adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Edges in sorted order (`u < v` when undirected).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// External identifier of every node, indexed by dense id.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Neighbors in the undirected view, sorted ascending.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    /// Degree in the undirected view.
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Sum of incident edge weights (degree when unweighted). In a directed
    /// graph both orientations count.
    pub fn strength(&self, u: usize) -> f64 {
        self.strength[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if self.directed {
            self.out_adj[u].binary_search(&v).is_ok()
        } else {
            self.adj[u].binary_search(&v).is_ok()
        }
    }
}

/// Reads a whitespace-separated edge list.
///
/// Each line is `u v` or `u v w`; lines starting with `#` or `%` and blank
/// lines are skipped. A line holding a single id declares a node without
/// edges (the writer emits these to preserve isolated nodes and id order).
/// Ids are compacted to `0..n` in order of first appearance. Duplicate
/// edges collapse into one, summing their weights.
pub fn load_edge_list<R: BufRead>(source: R, directed: bool) -> Result<Graph> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut intern = |raw: u64| -> usize {
        *index.entry(raw).or_insert_with(|| {
            labels.push(raw);
            labels.len() - 1
        })
    };

    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut weighted = false;

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let parse_id = |tok: &str| -> Result<u64> {
            tok.parse::<u64>().map_err(|_| Error::Malformed {
                line: lineno,
                token: tok.to_string(),
            })
        };
        match tokens.len() {
            1 => {
                intern(parse_id(tokens[0])?);
            }
            2 | 3 => {
                let a = parse_id(tokens[0])?;
                let b = parse_id(tokens[1])?;
                if a == b {
                    return Err(Error::SelfLoop {
                        line: lineno,
                        node: a,
                    });
                }
                let w = match tokens.get(2) {
                    Some(tok) => {
                        let w: f64 = tok.parse().map_err(|_| Error::Malformed {
                            line: lineno,
                            token: tok.to_string(),
                        })?;
                        if !(w > 0.0 && w.is_finite()) {
                            return Err(Error::NonPositiveWeight {
                                line: lineno,
                                weight: w,
                            });
                        }
                        weighted = true;
                        w
                    }
                    None => 1.0,
                };
                let u = intern(a);
                let v = intern(b);
                let key = if directed {
                    (u, v)
                } else {
                    (u.min(v), u.max(v))
                };
                *merged.entry(key).or_insert(0.0) += w;
            }
            found => {
                return Err(Error::ColumnCount {
                    line: lineno,
                    found,
                })
            }
        }
    }

    let edges: Vec<(usize, usize)> = merged.keys().copied().collect();
    let weights: Vec<f64> = merged.values().copied().collect();
    let n = labels.len();
    Graph::build(
        n,
        &edges,
        if weighted { Some(&weights) } else { None },
        directed,
        Some(labels),
    )
}

/// Writes `g` as an edge list: one edge per line in sorted order, endpoints
/// ascending for undirected graphs, weight as a third column when weighted,
/// LF line endings. Node declaration lines are prepended only when the edge
/// lines alone would not reproduce the node set and id order on reload.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let mut seen = vec![false; g.n];
    let mut order = Vec::with_capacity(g.n);
    for &(u, v) in &g.edges {
        for x in [u, v] {
            if !seen[x] {
                seen[x] = true;
                order.push(x);
            }
        }
    }
    let needs_decl = order.len() != g.n || order.iter().enumerate().any(|(i, &x)| i != x);
    if needs_decl {
        for label in &g.labels {
            writeln!(out, "{label}")?;
        }
    }
    for (i, &(u, v)) in g.edges.iter().enumerate() {
        let (a, b) = (g.labels[u], g.labels[v]);
        match &g.weights {
            Some(ws) => writeln!(out, "{a} {b} {}", ws[i])?,
            None => writeln!(out, "{a} {b}")?,
        }
    }
    Ok(())
}

/// Relabels `g` so that node `u` becomes `perm[u]`. Weights and external
/// labels travel with their edges and nodes.
pub fn apply_permutation(g: &Graph, perm: &[usize]) -> Result<Graph> {
    check_bijection(perm, g.n)?;
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    let mut labels = vec![0; g.n];
    for (u, &p) in perm.iter().enumerate() {
        labels[p] = g.labels[u];
    }
    Graph::build(g.n, &edges, g.weights.as_deref(), g.directed, Some(labels))
}

pub(crate) fn check_bijection(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::NotBijection { n });
    }
    let mut hit = vec![false; n];
    for &p in perm {
        if p >= n || hit[p] {
            return Err(Error::NotBijection { n });
        }
        hit[p] = true;
    }
    Ok(())
}

/// A partition of the nodes into classes labelled `0..class_count` with no
/// gaps. Labels are canonical: classes are numbered in order of their
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodePartition {
    assignment: Vec<usize>,
    class_count: usize,
}

impl NodePartition {
    /// Canonicalizes arbitrary per-node keys into a partition: nodes with
    /// equal keys share a class.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut seen: HashMap<K, usize> = HashMap::new();
        let assignment: Vec<usize> = keys
            .into_iter()
            .map(|k| {
                let next = seen.len();
                *seen.entry(k).or_insert(next)
            })
            .collect();
        NodePartition {
            class_count: seen.len(),
            assignment,
        }
    }

    pub fn single_class(n: usize) -> Self {
        Self::from_keys(std::iter::repeat_n(0u8, n))
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_keys(0..n)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_of(&self, u: usize) -> usize {
        self.assignment[u]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Member lists, ordered by smallest member; members ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (u, &c) in self.assignment.iter().enumerate() {
            out[c].push(u);
        }
        out
    }

    /// True when every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &NodePartition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut image: Vec<Option<usize>> = vec![None; self.class_count];
        for (u, &c) in self.assignment.iter().enumerate() {
            let target = coarser.assignment[u];
            match image[c] {
                None => image[c] = Some(target),
                Some(t) if t != target => return false,
                _ => {}
            }
        }
        true
    }
}
