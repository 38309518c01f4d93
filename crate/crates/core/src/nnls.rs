//! Non-negative least squares: `min ||A x - b||` subject to `x >= 0`.
//!
//! Both solvers work on the normal equations (`AᵀA`, `Aᵀb`), which is what
//! the factorization code has at hand when one factor is held fixed.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Solver used when one factor of a factorization is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NnlsMethod {
    /// Lawson–Hanson active set; exact up to rounding.
    #[default]
    ActiveSet,
    /// Fixed-factor multiplicative updates starting from all ones.
    Multiplicative { max_iter: usize, tol: f64 },
}

impl NnlsMethod {
    pub fn multiplicative() -> Self {
        NnlsMethod::Multiplicative {
            max_iter: 2000,
            tol: 1e-8,
        }
    }

    pub fn solve(self, gram: ArrayView2<'_, f64>, rhs: ArrayView1<'_, f64>) -> Array1<f64> {
        match self {
            NnlsMethod::ActiveSet => active_set(gram, rhs),
            NnlsMethod::Multiplicative { max_iter, tol } => {
                multiplicative(gram, rhs, Array1::ones(rhs.len()), max_iter, tol)
            }
        }
    }
}

/// Lawson–Hanson active-set NNLS on the normal equations
/// `gram = AᵀA`, `rhs = Aᵀb`.
pub fn active_set(gram: ArrayView2<'_, f64>, rhs: ArrayView1<'_, f64>) -> Array1<f64> {
    let k = rhs.len();
    let mut x = Array1::<f64>::zeros(k);
    if k == 0 {
        return x;
    }
    let scale = gram.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 10.0 * f64::EPSILON * scale * k as f64;
    let mut passive = vec![false; k];

    let gradient = |x: &Array1<f64>| -> Array1<f64> { &rhs - &gram.dot(x) };

    let mut w = gradient(&x);
    let mut outer = 0;
    while outer < 3 * k + 10 {
        outer += 1;
        let candidate = (0..k)
            .filter(|&j| !passive[j])
            .max_by(|&a, &b| w[a].total_cmp(&w[b]).then(b.cmp(&a)));
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;

        let mut s = solve_passive(gram, rhs, &passive);
        let mut inner = 0;
        while (0..k).any(|i| passive[i] && s[i] <= 0.0) && inner < 3 * k + 10 {
            inner += 1;
            let alpha = (0..k)
                .filter(|&i| passive[i] && s[i] <= 0.0)
                .map(|i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            for i in 0..k {
                x[i] += alpha * (s[i] - x[i]);
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            s = solve_passive(gram, rhs, &passive);
        }
        x = s;
        w = gradient(&x);
    }
    x.mapv_inplace(|v| v.max(0.0));
    x
}

// Unconstrained least squares restricted to the passive set; other entries 0.
fn solve_passive(
    gram: ArrayView2<'_, f64>,
    rhs: ArrayView1<'_, f64>,
    passive: &[bool],
) -> Array1<f64> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let mut out = Array1::zeros(passive.len());
    if idx.is_empty() {
        return out;
    }
    let m = idx.len();
    let a = DMatrix::from_fn(m, m, |i, j| gram[[idx[i], idx[j]]]);
    let b = DVector::from_fn(m, |i, _| rhs[idx[i]]);
    let sol = match a.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => a
            .svd(true, true)
            .solve(&b, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(m)),
    };
    for (slot, &i) in idx.iter().enumerate() {
        out[i] = sol[slot];
    }
    out
}

/// Multiplicative updates `x <- x * rhs / (gram x)`; valid when `gram` and
/// `rhs` are non-negative, which holds when both factors are. Each step
/// never increases the objective.
pub fn multiplicative(
    gram: ArrayView2<'_, f64>,
    rhs: ArrayView1<'_, f64>,
    mut x: Array1<f64>,
    max_iter: usize,
    tol: f64,
) -> Array1<f64> {
    let objective = |x: &Array1<f64>| 0.5 * x.dot(&gram.dot(x)) - x.dot(&rhs);
    let mut prev = objective(&x);
    for _ in 0..max_iter {
        let denom = gram.dot(&x);
        for i in 0..x.len() {
            if denom[i] > 0.0 {
                x[i] *= rhs[i].max(0.0) / denom[i];
            }
        }
        let obj = objective(&x);
        if (prev - obj).abs() <= tol * prev.abs().max(1.0) {
            break;
        }
        prev = obj;
    }
    x
}

/// Solves `min ||A X - B||_F` over `X >= 0` column by column.
pub fn solve_columns(a: &Array2<f64>, b: &Array2<f64>, method: NnlsMethod) -> Array2<f64> {
    let gram = a.t().dot(a);
    let atb = a.t().dot(b);
    let mut x = Array2::zeros((a.ncols(), b.ncols()));
    for j in 0..b.ncols() {
        let col = method.solve(gram.view(), atb.column(j));
        x.column_mut(j).assign(&col);
    }
    x
}
