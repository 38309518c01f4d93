use std::io::{Read, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::cost::Criterion;
use crate::error::{Error, Result};
use crate::features::{validate_descriptors, FeatureDescriptor};

/// A fitted role model: `X / column_scales ≈ W H`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleModel {
    pub rank: usize,
    /// `n × r` node memberships.
    pub w: Array2<f64>,
    /// `r × f` role definitions over features.
    pub h: Array2<f64>,
    /// Per-feature divisor applied before factorizing (column max, or 1 for
    /// all-zero columns).
    pub column_scales: Vec<f64>,
    pub descriptors: Vec<FeatureDescriptor>,
    /// External labels of the rows of `w`.
    pub nodes: Vec<u64>,
    pub cost: f64,
    pub criterion: Criterion,
    pub bits: u32,
    pub seed: u64,
}

impl RoleModel {
    pub fn node_count(&self) -> usize {
        self.w.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.h.ncols()
    }

    /// Checks shapes, non-negativity and a finite cost.
    pub fn validate(&self) -> Result<()> {
        let (n, r) = self.w.dim();
        let f = self.h.ncols();
        if r != self.rank || self.h.nrows() != r {
            return Err(Error::Shape(format!(
                "rank {} with W {:?} and H {:?}",
                self.rank,
                self.w.dim(),
                self.h.dim()
            )));
        }
        if r == 0 || r > n.min(f) {
            return Err(Error::RankOutOfRange {
                rank: r,
                max: n.min(f),
            });
        }
        if self.column_scales.len() != f
            || self
                .column_scales
                .iter()
                .any(|&s| !(s > 0.0 && s.is_finite()))
        {
            return Err(Error::Shape(
                "column scales must be positive, one per feature".into(),
            ));
        }
        if !self.descriptors.is_empty() && self.descriptors.len() != f {
            return Err(Error::Shape(format!(
                "{} descriptors for {f} features",
                self.descriptors.len()
            )));
        }
        validate_descriptors(&self.descriptors)?;
        if self.nodes.len() != n {
            return Err(Error::Shape(format!(
                "{} node labels for {n} rows",
                self.nodes.len()
            )));
        }
        for m in [&self.w, &self.h] {
            super::nmf::check_nonnegative(m)?;
        }
        if !self.cost.is_finite() {
            return Err(Error::InvalidParameter("model cost is not finite".into()));
        }
        Ok(())
    }

    /// Divides each column of `x` by its stored scale.
    pub fn normalize(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.column_scales.len() {
            return Err(Error::Shape(format!(
                "{} feature columns, model has {}",
                x.ncols(),
                self.column_scales.len()
            )));
        }
        let mut out = x.clone();
        for (mut col, &s) in out.columns_mut().into_iter().zip(&self.column_scales) {
            col /= s;
        }
        Ok(out)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &ModelRecord::from(self))?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let rec: ModelRecord = serde_json::from_reader(input)?;
        let model = rec.into_model()?;
        model.validate()?;
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    r: usize,
    criterion: Criterion,
    b: u32,
    seed: u64,
    column_scales: Vec<f64>,
    descriptors: Vec<FeatureDescriptor>,
    nodes: Vec<u64>,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
    cost: f64,
}

fn to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<Array2<f64>> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape(format!("ragged rows in {what}")));
    }
    Array2::from_shape_vec((rows.len(), cols), rows.concat())
        .map_err(|e| Error::Shape(e.to_string()))
}

impl From<&RoleModel> for ModelRecord {
    fn from(m: &RoleModel) -> Self {
        ModelRecord {
            r: m.rank,
            criterion: m.criterion,
            b: m.bits,
            seed: m.seed,
            column_scales: m.column_scales.clone(),
            descriptors: m.descriptors.clone(),
            nodes: m.nodes.clone(),
            w: to_rows(&m.w),
            h: to_rows(&m.h),
            cost: m.cost,
        }
    }
}

impl ModelRecord {
    fn into_model(self) -> Result<RoleModel> {
        let f = self.column_scales.len();
        Ok(RoleModel {
            rank: self.r,
            w: from_rows(&self.w, self.r, "W")?,
            h: from_rows(&self.h, f, "H")?,
            column_scales: self.column_scales,
            descriptors: self.descriptors,
            nodes: self.nodes,
            cost: self.cost,
            criterion: self.criterion,
            bits: self.b,
            seed: self.seed,
        })
    }
}
