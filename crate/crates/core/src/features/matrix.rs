use std::io::{Read, Write};

use ndarray::{Array2, ArrayView1, Axis};

use super::descriptor::{validate_descriptors, FeatureDescriptor};
use crate::error::{Error, Result};

/// Node-by-feature values with the recipe of every column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    nodes: Vec<u64>,
    values: Array2<f64>,
    descriptors: Vec<FeatureDescriptor>,
}

impl FeatureMatrix {
    /// `nodes` are the external node labels, one per row.
    pub fn new(
        nodes: Vec<u64>,
        values: Array2<f64>,
        descriptors: Vec<FeatureDescriptor>,
    ) -> Result<Self> {
        if nodes.len() != values.nrows() {
            return Err(Error::Shape(format!(
                "{} node labels for {} rows",
                nodes.len(),
                values.nrows()
            )));
        }
        if descriptors.len() != values.ncols() {
            return Err(Error::Shape(format!(
                "{} descriptors for {} columns",
                descriptors.len(),
                values.ncols()
            )));
        }
        validate_descriptors(&descriptors)?;
        Ok(FeatureMatrix {
            nodes,
            values,
            descriptors,
        })
    }

    /// Builds a matrix from columns of length `nodes.len()`.
    pub fn from_columns(
        nodes: Vec<u64>,
        columns: &[Vec<f64>],
        descriptors: Vec<FeatureDescriptor>,
    ) -> Result<Self> {
        let n = nodes.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::Shape(format!(
                "column of length {} for {n} nodes",
                bad.len()
            )));
        }
        let values = Array2::from_shape_fn((n, columns.len()), |(i, j)| columns[j][i]);
        Self::new(nodes, values, descriptors)
    }

    pub fn node_count(&self) -> usize {
        self.values.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.values.ncols()
    }

    pub fn nodes(&self) -> &[u64] {
        &self.nodes
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.descriptors
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    pub fn into_parts(self) -> (Vec<u64>, Array2<f64>, Vec<FeatureDescriptor>) {
        (self.nodes, self.values, self.descriptors)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Result<FeatureMatrix> {
        if let Some(&bad) = keep.iter().find(|&&j| j >= self.feature_count()) {
            return Err(Error::FeatureOutOfRange {
                id: bad,
                count: self.feature_count(),
            });
        }
        Ok(FeatureMatrix {
            nodes: self.nodes.clone(),
            values: self.values.select(Axis(1), keep),
            descriptors: keep.iter().map(|&j| self.descriptors[j].clone()).collect(),
        })
    }

    /// Renumbers descriptor ids to `0..f` keeping their order, rewriting
    /// composite bases to match.
    pub(crate) fn compact_ids(&mut self) {
        use super::descriptor::Recipe;
        let old: Vec<usize> = self.descriptors.iter().map(|d| d.id).collect();
        for (pos, d) in self.descriptors.iter_mut().enumerate() {
            d.id = pos;
            if let Recipe::Composite { base, .. } = &mut d.recipe {
                *base = old
                    .binary_search(base)
                    .expect("base present in validated list");
            }
        }
    }

    /// CSV with header `node,feat_0,...,feat_{f-1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(out, "feat", &self.nodes, &self.values)
    }

    pub fn write_descriptors_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.descriptors)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

pub fn read_descriptors_json<R: Read>(input: R) -> Result<Vec<FeatureDescriptor>> {
    let list: Vec<FeatureDescriptor> = serde_json::from_reader(input)?;
    validate_descriptors(&list)?;
    Ok(list)
}

/// Writes `node,<prefix>_0,...` rows; values use the shortest decimal form
/// that parses back to the same `f64`.
pub(crate) fn write_matrix_csv<W: Write>(
    out: W,
    prefix: &str,
    nodes: &[u64],
    values: &Array2<f64>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend((0..values.ncols()).map(|j| format!("{prefix}_{j}")));
    w.write_record(&header)?;
    for (label, row) in nodes.iter().zip(values.rows()) {
        let mut rec = vec![label.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `node,...` CSV written by [`write_matrix_csv`] (or any CSV whose
/// first column is an integer node id and the rest are numbers).
pub fn read_matrix_csv<R: Read>(input: R) -> Result<(Vec<u64>, Array2<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let width = rdr.headers()?.len();
    if width == 0 {
        return Err(Error::Shape("CSV has no columns".into()));
    }
    let mut nodes = Vec::new();
    let mut flat = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != width {
            return Err(Error::Shape(format!(
                "line {line}: {} fields, expected {width}",
                rec.len()
            )));
        }
        let node = rec[0].parse::<u64>().map_err(|_| Error::Malformed {
            line,
            token: rec[0].to_string(),
        })?;
        nodes.push(node);
        for tok in rec.iter().skip(1) {
            let v: f64 = tok.parse().map_err(|_| Error::Malformed {
                line,
                token: tok.to_string(),
            })?;
            flat.push(v);
        }
    }
    let values = Array2::from_shape_vec((nodes.len(), width - 1), flat)
        .map_err(|e| Error::Shape(e.to_string()))?;
    Ok((nodes, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::descriptor::{Operator, PrimitiveKind};

    fn sample() -> FeatureMatrix {
        FeatureMatrix::from_columns(
            vec![4, 9, 2],
            &[vec![1.0, 2.0, 1.0], vec![2.0, 0.1 + 0.2, 2.0]],
            vec![
                FeatureDescriptor::primitive(0, PrimitiveKind::Degree),
                FeatureDescriptor::composite(5, Operator::Sum, 0, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node,feat_0,feat_1\n4,1,2\n9,2,0.30000000000000004\n"));
        let (nodes, values) = read_matrix_csv(buf.as_slice()).unwrap();
        assert_eq!(nodes, m.nodes());
        assert_eq!(&values, m.values());
    }

    #[test]
    fn compaction_rewrites_bases() {
        let mut m = sample();
        m.compact_ids();
        assert_eq!(
            m.descriptors()[1],
            FeatureDescriptor::composite(1, Operator::Sum, 0, 1)
        );
    }

    #[test]
    fn select_and_shape_errors() {
        let m = sample();
        let s = m.select_columns(&[1]).unwrap();
        assert_eq!(s.feature_count(), 1);
        assert!(m.select_columns(&[2]).is_err());
        assert!(FeatureMatrix::from_columns(
            vec![0],
            &[vec![1.0, 2.0]],
            vec![FeatureDescriptor::primitive(0, PrimitiveKind::Degree)]
        )
        .is_err());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_matrix_csv("node,a\n0,x\n".as_bytes()).is_err());
        assert!(read_matrix_csv("node,a\nq,1\n".as_bytes()).is_err());
    }
}
