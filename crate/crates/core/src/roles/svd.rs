use nalgebra::DMatrix;
use ndarray::Array2;

use super::nmf::check_rank;
use crate::error::Result;

/// Rank-`r` truncated singular value decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// `n × r`, orthonormal columns.
    pub u: Array2<f64>,
    /// Descending, non-negative.
    pub singular_values: Vec<f64>,
    /// `f × r`, orthonormal columns.
    pub v: Array2<f64>,
}

impl TruncatedSvd {
    /// `U S Vᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut us = self.u.clone();
        for (mut col, &s) in us.columns_mut().into_iter().zip(&self.singular_values) {
            col *= s;
        }
        us.dot(&self.v.t())
    }
}

/// Best rank-`r` least-squares approximation of `x` via a full SVD, keeping
/// the `r` largest singular triplets.
pub fn svd_factorize(x: &Array2<f64>, r: usize) -> Result<TruncatedSvd> {
    check_rank(x, r)?;
    let (n, f) = x.dim();
    let m = DMatrix::from_fn(n, f, |i, j| x[[i, j]]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });
    order.truncate(r);
    Ok(TruncatedSvd {
        u: Array2::from_shape_fn((n, r), |(i, k)| u[(i, order[k])]),
        singular_values: order.iter().map(|&k| svd.singular_values[k]).collect(),
        v: Array2::from_shape_fn((f, r), |(j, k)| vt[(order[k], j)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn frob(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        (a - b).mapv(|v| v * v).sum().sqrt()
    }

    fn orthonormal(m: &Array2<f64>) -> bool {
        let g = m.t().dot(m);
        g.indexed_iter()
            .all(|((i, j), &v)| (v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8)
    }

    #[test]
    fn diagonal_matrix() {
        let x = array![[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]];
        let s = svd_factorize(&x, 2).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-12);
        assert!((frob(&x, &s.reconstruct()) - 1.0).abs() < 1e-12);
        assert!(orthonormal(&s.u) && orthonormal(&s.v));
    }

    #[test]
    fn exact_rank_one() {
        let x = array![[1.0, 1.0], [2.0, 2.0]];
        let s = svd_factorize(&x, 1).unwrap();
        assert!(frob(&x, &s.reconstruct()) < 1e-9);
    }

    #[test]
    fn full_rank_reconstructs() {
        let x = array![[1.0, 4.0, 2.0], [0.5, -1.0, 3.0]];
        let s = svd_factorize(&x, 2).unwrap();
        assert!(frob(&x, &s.reconstruct()) < 1e-9);
        assert!(s.singular_values[0] >= s.singular_values[1]);
        assert!(svd_factorize(&x, 3).is_err());
    }
}
