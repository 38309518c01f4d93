//! Non-negative matrix factorization `X ≈ W H` by multiplicative updates on
//! the Frobenius objective `½‖X − WH‖²`.

use ndarray::{Array2, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmfConfig {
    pub max_iter: usize,
    /// Stop once an iteration lowers the objective by less than this
    /// fraction of its previous value.
    pub tol: f64,
}

impl Default for NmfConfig {
    fn default() -> Self {
        NmfConfig {
            max_iter: 2000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    /// Objective at the starting point followed by its value after every
    /// iteration.
    pub objective_history: Vec<f64>,
}

impl Factorization {
    pub fn objective(&self) -> f64 {
        *self
            .objective_history
            .last()
            .expect("history is never empty")
    }
}

/// `½‖X − WH‖²`.
pub fn frobenius_objective(x: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    0.5 * sum_squared_error(x, w, h)
}

pub fn sum_squared_error(x: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let approx = w.dot(h);
    Zip::from(x)
        .and(&approx)
        .fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b))
}

pub(crate) fn check_nonnegative(x: &Array2<f64>) -> Result<()> {
    for ((row, col), &v) in x.indexed_iter() {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::NegativeEntry { row, col });
        }
    }
    Ok(())
}

pub(crate) fn check_rank(x: &Array2<f64>, r: usize) -> Result<()> {
    let max = x.nrows().min(x.ncols());
    if r == 0 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    Ok(())
}

/// Matrix of absolute standard-normal draws.
pub(crate) fn abs_normal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || {
        let z: f64 = StandardNormal.sample(rng);
        z.abs()
    })
}

/// Factorizes `x` at rank `r` from a seeded random start, scaled by the
/// largest entry of `x`.
pub fn nmf_factorize(
    x: &Array2<f64>,
    r: usize,
    seed: u64,
    config: &NmfConfig,
) -> Result<Factorization> {
    check_nonnegative(x)?;
    check_rank(x, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = init_scale(x);
    let w0 = abs_normal(&mut rng, x.nrows(), r) * scale;
    let h0 = abs_normal(&mut rng, r, x.ncols()) * scale;
    nmf_from(x, w0, h0, config)
}

pub(crate) fn init_scale(x: &Array2<f64>) -> f64 {
    let m = x.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// Runs multiplicative updates from the given starting factors.
pub fn nmf_from(
    x: &Array2<f64>,
    mut w: Array2<f64>,
    mut h: Array2<f64>,
    config: &NmfConfig,
) -> Result<Factorization> {
    check_nonnegative(x)?;
    let r = w.ncols();
    check_rank(x, r)?;
    if w.nrows() != x.nrows() || h.nrows() != r || h.ncols() != x.ncols() {
        return Err(Error::Shape(format!(
            "X is {:?}, W is {:?}, H is {:?}",
            x.dim(),
            w.dim(),
            h.dim()
        )));
    }
    if config.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    check_nonnegative(&w)?;
    check_nonnegative(&h)?;

    let mut history = vec![frobenius_objective(x, &w, &h)];
    for _ in 0..config.max_iter {
        let numer = w.t().dot(x);
        let denom = w.t().dot(&w).dot(&h);
        multiplicative_step(&mut h, &numer, &denom);

        let numer = x.dot(&h.t());
        let denom = w.dot(&h.dot(&h.t()));
        multiplicative_step(&mut w, &numer, &denom);

        let prev = *history.last().unwrap();
        let obj = frobenius_objective(x, &w, &h);
        history.push(obj);
        if obj == 0.0 || (prev - obj) < config.tol * prev {
            break;
        }
    }
    Ok(Factorization {
        w,
        h,
        objective_history: history,
    })
}

// factor <- factor * numer / denom, leaving entries alone where denom is 0
fn multiplicative_step(factor: &mut Array2<f64>, numer: &Array2<f64>, denom: &Array2<f64>) {
    Zip::from(factor)
        .and(numer)
        .and(denom)
        .for_each(|f, &n, &d| {
            if d > 0.0 {
                *f *= n / d;
            }
        });
}
