use std::io::Write;

use ndarray::Array2;

use crate::error::Result;
use crate::features::write_matrix_csv;

/// Per-node distribution over roles; rows sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAssignment {
    pub memberships: Array2<f64>,
}

/// One role per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardAssignment {
    pub labels: Vec<usize>,
    pub role_count: usize,
}

/// Normalizes each row of `w` to sum to 1; all-zero rows become uniform.
pub fn soft_memberships(w: &Array2<f64>) -> SoftAssignment {
    let r = w.ncols();
    let mut out = w.clone();
    for mut row in out.rows_mut() {
        let total: f64 = row.sum();
        if total > 0.0 {
            row /= total;
        } else {
            row.fill(1.0 / r as f64);
        }
    }
    SoftAssignment { memberships: out }
}

/// Row-wise argmax of `w`; ties go to the lowest role id.
pub fn hard_assignment(w: &Array2<f64>) -> HardAssignment {
    let labels = w
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (k, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    HardAssignment {
        labels,
        role_count: w.ncols(),
    }
}

impl SoftAssignment {
    /// CSV `node,role_0,...,role_{r-1}`.
    pub fn write_csv<W: Write>(&self, nodes: &[u64], out: W) -> Result<()> {
        write_matrix_csv(out, "role", nodes, &self.memberships)
    }
}

impl HardAssignment {
    /// CSV `node,role`.
    pub fn write_csv<W: Write>(&self, nodes: &[u64], out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["node", "role"])?;
        for (node, role) in nodes.iter().zip(&self.labels) {
            w.write_record([node.to_string(), role.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
