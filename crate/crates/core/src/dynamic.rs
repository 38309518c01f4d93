//! Applying a learned role model to other graphs and to snapshot sequences.

use std::collections::HashMap;
use std::io::Write;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::recompute;
use crate::graph::Graph;
use crate::nnls::{solve_columns, NnlsMethod};
use crate::roles::{frobenius_objective, RoleModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferConfig {
    /// Upper bound on normalized feature values. Targets can have larger
    /// hubs than the training graph.
    pub clamp: f64,
    pub method: NnlsMethod,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            clamp: 10.0,
            method: NnlsMethod::default(),
        }
    }
}

/// Memberships of a graph's nodes under a fixed role model.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub nodes: Vec<u64>,
    /// Normalized, clamped feature matrix the memberships were fitted to.
    pub features: Array2<f64>,
    pub w: Array2<f64>,
}

impl Transfer {
    /// `½‖X − W H‖²` against the model's role definitions.
    pub fn objective(&self, model: &RoleModel) -> f64 {
        frobenius_objective(&self.features, &self.w, &model.h)
    }
}

/// Evaluates the model's descriptors on `g`, then divides by the stored
/// column scales and clamps.
pub fn transfer_features(
    g: &Graph,
    model: &RoleModel,
    config: &TransferConfig,
) -> Result<Array2<f64>> {
    model.validate()?;
    if model.descriptors.is_empty() {
        return Err(Error::MalformedDescriptors(
            "model carries no feature descriptors".into(),
        ));
    }
    if config.clamp.is_nan() || config.clamp <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "clamp must be positive, got {}",
            config.clamp
        )));
    }
    let x = recompute(g, &model.descriptors)?;
    Ok(model.normalize(x.values())?.mapv(|v| v.min(config.clamp)))
}

/// Memberships `W2 = argmin_{W ≥ 0} ‖X2 − W H‖` with `H` from the model,
/// solved independently per node.
pub fn transfer_memberships(
    g: &Graph,
    model: &RoleModel,
    config: &TransferConfig,
) -> Result<Transfer> {
    let features = transfer_features(g, model, config)?;
    let w = fit_memberships(&features, &model.h, config.method);
    Ok(Transfer {
        nodes: g.labels().to_vec(),
        features,
        w,
    })
}

/// Non-negative least squares for `W` in `X ≈ W H` with `H` fixed.
pub fn fit_memberships(x: &Array2<f64>, h: &Array2<f64>, method: NnlsMethod) -> Array2<f64> {
    solve_columns(&h.t().to_owned(), &x.t().to_owned(), method).reversed_axes()
}

/// Memberships per snapshot against one shared model.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipSeries {
    pub timestamps: Vec<String>,
    /// External node labels present at each timestamp.
    pub nodes: Vec<Vec<u64>>,
    pub memberships: Vec<Array2<f64>>,
}

impl MembershipSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// CSV `timestamp,node,role_0,...,role_{r-1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let r = self.memberships.first().map_or(0, |w| w.ncols());
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = vec!["timestamp".to_string(), "node".to_string()];
        header.extend((0..r).map(|k| format!("role_{k}")));
        w.write_record(&header)?;
        for ((t, nodes), m) in self
            .timestamps
            .iter()
            .zip(&self.nodes)
            .zip(&self.memberships)
        {
            for (node, row) in nodes.iter().zip(m.rows()) {
                let mut rec = vec![t.clone(), node.to_string()];
                rec.extend(row.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Transfers the model to each `(timestamp, graph)` snapshot.
pub fn role_time_series(
    snapshots: &[(String, Graph)],
    model: &RoleModel,
    config: &TransferConfig,
) -> Result<MembershipSeries> {
    if snapshots.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one snapshot is required".into(),
        ));
    }
    let fits: Vec<Transfer> = snapshots
        .par_iter()
        .map(|(_, g)| transfer_memberships(g, model, config))
        .collect::<Result<_>>()?;
    let mut series = MembershipSeries {
        timestamps: Vec::with_capacity(fits.len()),
        nodes: Vec::with_capacity(fits.len()),
        memberships: Vec::with_capacity(fits.len()),
    };
    for ((t, _), fit) in snapshots.iter().zip(fits) {
        series.timestamps.push(t.clone());
        series.nodes.push(fit.nodes);
        series.memberships.push(fit.w);
    }
    Ok(series)
}

/// Global role transitions: `W_b ≈ W_a T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub t: Array2<f64>,
}

impl TransitionMatrix {
    /// JSON `r × r` nested array.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let rows: Vec<Vec<f64>> = self.t.rows().into_iter().map(|r| r.to_vec()).collect();
        serde_json::to_writer_pretty(&mut out, &rows)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

/// `T = argmin_{T ≥ 0} ‖W_b − W_a T‖`. Rows of both inputs must refer to
/// the same nodes.
pub fn estimate_transition_model(
    wa: &Array2<f64>,
    wb: &Array2<f64>,
    method: NnlsMethod,
) -> Result<TransitionMatrix> {
    if wa.dim() != wb.dim() {
        return Err(Error::Shape(format!(
            "membership shapes differ: {:?} and {:?}",
            wa.dim(),
            wb.dim()
        )));
    }
    if wa.ncols() == 0 {
        return Err(Error::RankOutOfRange { rank: 0, max: 0 });
    }
    Ok(TransitionMatrix {
        t: solve_columns(wa, wb, method),
    })
}

/// Fits one transition matrix to every consecutive pair of snapshots,
/// matching rows by node label. Nodes missing from either side of a pair
/// are skipped.
pub fn series_transition(
    series: &MembershipSeries,
    method: NnlsMethod,
) -> Result<TransitionMatrix> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(
            "a transition needs at least two snapshots".into(),
        ));
    }
    let r = series.memberships[0].ncols();
    let mut before = Vec::new();
    let mut after = Vec::new();
    for t in 1..series.len() {
        let index: HashMap<u64, usize> = series.nodes[t]
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        for (i, node) in series.nodes[t - 1].iter().enumerate() {
            if let Some(&j) = index.get(node) {
                before.extend(series.memberships[t - 1].row(i).iter().copied());
                after.extend(series.memberships[t].row(j).iter().copied());
            }
        }
    }
    let rows = before.len() / r.max(1);
    if rows == 0 {
        return Err(Error::InvalidParameter(
            "consecutive snapshots share no nodes".into(),
        ));
    }
    let shape = (rows, r);
    let wa = Array2::from_shape_vec(shape, before).map_err(|e| Error::Shape(e.to_string()))?;
    let wb = Array2::from_shape_vec(shape, after).map_err(|e| Error::Shape(e.to_string()))?;
    estimate_transition_model(&wa, &wb, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{learn_features, LearnConfig};
    use crate::graph::apply_permutation;
    use crate::roles::{fit_roles, SelectConfig};
    use ndarray::array;

    fn sample_graph() -> Graph {
        Graph::undirected(
            9,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (3, 4),
                (4, 5),
                (4, 6),
                (5, 6),
                (6, 7),
                (7, 8),
            ],
        )
        .unwrap()
    }

    fn sample_model(g: &Graph) -> RoleModel {
        let learned = learn_features(g, &LearnConfig::default()).unwrap();
        let cfg = SelectConfig {
            nmf: crate::roles::NmfConfig {
                max_iter: 5000,
                tol: 0.0,
            },
            ..SelectConfig::default()
        };
        fit_roles(&learned.features, Some(2), &cfg).unwrap()
    }

    #[test]
    fn same_graph_is_no_worse_than_training_fit() {
        let g = sample_graph();
        let model = sample_model(&g);
        let t = transfer_memberships(&g, &model, &TransferConfig::default()).unwrap();
        let original = frobenius_objective(&t.features, &model.w, &model.h);
        assert!(t.objective(&model) <= original + 1e-9);
        assert!((t.objective(&model) - original).abs() <= 1e-6 * original.max(1.0));
    }

    #[test]
    fn beats_all_ones_start() {
        let g = sample_graph();
        let model = sample_model(&g);
        let exact = transfer_memberships(&g, &model, &TransferConfig::default()).unwrap();
        let mu = TransferConfig {
            method: NnlsMethod::multiplicative(),
            ..TransferConfig::default()
        };
        let mu = transfer_memberships(&g, &model, &mu).unwrap();
        let ones = Array2::ones(model.w.dim());
        let base = frobenius_objective(&exact.features, &ones, &model.h);
        assert!(mu.objective(&model) <= base);
        assert!(exact.objective(&model) <= mu.objective(&model) + 1e-12);
    }

    #[test]
    fn permutation_equivariant() {
        let g = sample_graph();
        let model = sample_model(&g);
        let perm = [4, 2, 8, 0, 1, 7, 3, 6, 5];
        let gp = apply_permutation(&g, &perm).unwrap();
        let a = transfer_memberships(&g, &model, &TransferConfig::default()).unwrap();
        let b = transfer_memberships(&gp, &model, &TransferConfig::default()).unwrap();
        for u in 0..9 {
            for k in 0..2 {
                assert!((a.w[[u, k]] - b.w[[perm[u], k]]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn isolated_node_gets_zero_row() {
        let g = sample_graph();
        let model = sample_model(&g);
        let single = Graph::undirected(1, &[]).unwrap();
        let t = transfer_memberships(&single, &model, &TransferConfig::default()).unwrap();
        assert!(t.w.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn series_of_identical_snapshots() {
        let g = sample_graph();
        let model = sample_model(&g);
        let snaps: Vec<(String, Graph)> = (0..3).map(|t| (format!("t{t}"), g.clone())).collect();
        let s = role_time_series(&snaps, &model, &TransferConfig::default()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.memberships[0], s.memberships[1]);
        assert_eq!(s.memberships[1], s.memberships[2]);
        assert!(role_time_series(&[], &model, &TransferConfig::default()).is_err());
        let one = role_time_series(&snaps[..1], &model, &TransferConfig::default()).unwrap();
        let direct = transfer_memberships(&g, &model, &TransferConfig::default()).unwrap();
        assert_eq!(one.memberships[0], direct.w);

        let t = series_transition(&s, NnlsMethod::default()).unwrap();
        let proj = s.memberships[0].dot(&t.t);
        assert!((&proj - &s.memberships[0]).iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn transition_examples() {
        let wa = array![[1.0, 0.0], [0.0, 2.0], [1.0, 1.0], [0.5, 3.0]];
        let t = estimate_transition_model(&wa, &wa, NnlsMethod::default()).unwrap();
        assert!((&t.t - &Array2::<f64>::eye(2))
            .iter()
            .all(|v| v.abs() < 1e-4));

        let mut swapped = wa.clone();
        swapped.column_mut(0).assign(&wa.column(1));
        swapped.column_mut(1).assign(&wa.column(0));
        let t = estimate_transition_model(&wa, &swapped, NnlsMethod::default()).unwrap();
        assert!((&t.t - &array![[0.0, 1.0], [1.0, 0.0]])
            .iter()
            .all(|v| v.abs() < 1e-4));

        let dup = array![[1.0, 1.0], [2.0, 2.0], [0.5, 0.5]];
        let wb = array![[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]];
        let t = estimate_transition_model(&dup, &wb, NnlsMethod::default()).unwrap();
        let res = |m: &Array2<f64>| (&wb - &dup.dot(m)).mapv(|v| v * v).sum();
        assert!(res(&t.t) <= res(&Array2::eye(2)) + 1e-12);

        assert!(estimate_transition_model(&wa, &dup, NnlsMethod::default()).is_err());
    }

    #[test]
    fn transition_aligns_by_label() {
        let w1 = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        // same nodes in a different order plus one newcomer
        let w2 = array![[1.0, 1.0], [5.0, 5.0], [0.0, 1.0], [1.0, 0.0]];
        let series = MembershipSeries {
            timestamps: vec!["a".into(), "b".into()],
            nodes: vec![vec![10, 11, 12], vec![12, 99, 11, 10]],
            memberships: vec![w1, w2],
        };
        let t = series_transition(&series, NnlsMethod::default()).unwrap();
        assert!((&t.t - &Array2::<f64>::eye(2))
            .iter()
            .all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn output_formats() {
        let series = MembershipSeries {
            timestamps: vec!["t0".into()],
            nodes: vec![vec![5, 6]],
            memberships: vec![array![[0.5, 0.0], [1.0, 2.0]]],
        };
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "timestamp,node,role_0,role_1\nt0,5,0.5,0\nt0,6,1,2\n"
        );
        let mut buf = Vec::new();
        TransitionMatrix {
            t: array![[1.0, 0.0], [0.25, 0.5]],
        }
        .write_json(&mut buf)
        .unwrap();
        let back: Vec<Vec<f64>> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, vec![vec![1.0, 0.0], vec![0.25, 0.5]]);
    }
}
