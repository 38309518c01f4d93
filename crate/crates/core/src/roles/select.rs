//! Greedy rank search.
//!
//! One random pair of starting factors is drawn at full rank `min(n, f)` and
//! scaled by the largest entry of the data. Rank `r` is fitted from the first
//! `r` columns of the starting `W` and the first `r` rows of the starting
//! `H`. Ranks are tried in increasing order; the search stops after `trials`
//! consecutive ranks that fail to lower the best cost so far.

use ndarray::{s, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cost::{model_cost, Criterion};
use super::model::RoleModel;
use super::nmf::{
    abs_normal, check_nonnegative, check_rank, init_scale, nmf_from, Factorization, NmfConfig,
};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectConfig {
    pub criterion: Criterion,
    /// Bits per stored value for the description-length criterion.
    pub bits: u32,
    /// Consecutive non-improving ranks tolerated before stopping.
    pub trials: usize,
    pub seed: u64,
    pub nmf: NmfConfig,
    /// Fits per rank. The first always uses the shared starting factors;
    /// extra ones use fresh random starts and the lowest objective wins.
    pub restarts: usize,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            criterion: Criterion::Mdl,
            bits: 16,
            trials: 5,
            seed: 1,
            nmf: NmfConfig::default(),
            restarts: 1,
        }
    }
}

/// Every rank evaluated by [`rank_search`] and the best model among them.
#[derive(Debug, Clone)]
pub struct RankSearch {
    pub best: RoleModel,
    /// `(rank, cost)` in evaluation order.
    pub costs: Vec<(usize, f64)>,
}

/// Per-column maxima, with 1 for all-zero columns.
pub fn column_scales(x: &Array2<f64>) -> Vec<f64> {
    x.columns()
        .into_iter()
        .map(|c| {
            let m = c.iter().copied().fold(0.0, f64::max);
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect()
}

fn scaled(x: &Array2<f64>, scales: &[f64]) -> Array2<f64> {
    let mut out = x.clone();
    for (mut col, &s) in out.columns_mut().into_iter().zip(scales) {
        col /= s;
    }
    out
}

struct Search<'a> {
    x: Array2<f64>,
    scales: Vec<f64>,
    w0: Array2<f64>,
    h0: Array2<f64>,
    rng: ChaCha8Rng,
    config: &'a SelectConfig,
}

impl<'a> Search<'a> {
    fn new(raw: &Array2<f64>, config: &'a SelectConfig) -> Result<Self> {
        check_nonnegative(raw)?;
        if raw.is_empty() {
            return Err(Error::Shape(format!(
                "cannot factorize a {:?} matrix",
                raw.dim()
            )));
        }
        if config.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if config.restarts == 0 {
            return Err(Error::InvalidParameter(
                "restarts must be at least 1".into(),
            ));
        }
        let scales = column_scales(raw);
        let x = scaled(raw, &scales);
        let full = x.nrows().min(x.ncols());
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let scale = init_scale(&x);
        let w0 = abs_normal(&mut rng, x.nrows(), full) * scale;
        let h0 = abs_normal(&mut rng, full, x.ncols()) * scale;
        Ok(Search {
            x,
            scales,
            w0,
            h0,
            rng,
            config,
        })
    }

    fn max_rank(&self) -> usize {
        self.w0.ncols()
    }

    fn fit(&mut self, r: usize) -> Result<(Factorization, f64)> {
        check_rank(&self.x, r)?;
        let w = self.w0.slice(s![.., ..r]).to_owned();
        let h = self.h0.slice(s![..r, ..]).to_owned();
        let mut best = nmf_from(&self.x, w, h, &self.config.nmf)?;
        for _ in 1..self.config.restarts {
            let scale = init_scale(&self.x);
            let w = abs_normal(&mut self.rng, self.x.nrows(), r) * scale;
            let h = abs_normal(&mut self.rng, r, self.x.ncols()) * scale;
            let fac = nmf_from(&self.x, w, h, &self.config.nmf)?;
            if fac.objective() < best.objective() {
                best = fac;
            }
        }
        let cost = model_cost(
            &self.x,
            &best.w,
            &best.h,
            self.config.criterion,
            self.config.bits,
        )?;
        Ok((best, cost))
    }

    fn model(&self, r: usize, fac: Factorization, cost: f64) -> RoleModel {
        RoleModel {
            rank: r,
            w: fac.w,
            h: fac.h,
            column_scales: self.scales.clone(),
            descriptors: Vec::new(),
            nodes: (0..self.x.nrows() as u64).collect(),
            cost,
            criterion: self.config.criterion,
            bits: self.config.bits,
            seed: self.config.seed,
        }
    }
}

/// Runs the greedy search over ranks `1..=min(n, f)`.
pub fn rank_search(x: &Array2<f64>, config: &SelectConfig) -> Result<RankSearch> {
    let mut search = Search::new(x, config)?;
    let mut costs = Vec::new();
    let mut best: Option<(usize, Factorization, f64)> = None;
    let mut failed = 0;
    for r in 1..=search.max_rank() {
        let (fac, cost) = search.fit(r)?;
        costs.push((r, cost));
        if best.as_ref().is_none_or(|b| cost < b.2) {
            best = Some((r, fac, cost));
            failed = 0;
        } else {
            failed += 1;
        }
        if failed >= config.trials {
            break;
        }
    }
    let (r, fac, cost) = best.expect("at least rank 1 is evaluated");
    Ok(RankSearch {
        best: search.model(r, fac, cost),
        costs,
    })
}

/// The lowest-cost model found by [`rank_search`].
pub fn select_rank(x: &Array2<f64>, config: &SelectConfig) -> Result<RoleModel> {
    Ok(rank_search(x, config)?.best)
}

/// Fits a single rank with the same starting factors the search would use.
pub fn fit_rank(x: &Array2<f64>, r: usize, config: &SelectConfig) -> Result<RoleModel> {
    let mut search = Search::new(x, config)?;
    let (fac, cost) = search.fit(r)?;
    Ok(search.model(r, fac, cost))
}

/// Selects a model for a learned feature matrix, carrying over its
/// descriptors and node labels. `rank` fixes the rank instead of searching.
pub fn fit_roles(
    features: &FeatureMatrix,
    rank: Option<usize>,
    config: &SelectConfig,
) -> Result<RoleModel> {
    let mut model = match rank {
        Some(r) => fit_rank(features.values(), r, config)?,
        None => select_rank(features.values(), config)?,
    };
    model.descriptors = features.descriptors().to_vec();
    model.nodes = features.nodes().to_vec();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn two_patterns() -> Array2<f64> {
        let mut x = Array2::zeros((20, 2));
        for i in 0..10 {
            x[[i, 0]] = 1.0;
            x[[i + 10, 1]] = 1.0;
        }
        x
    }

    #[test]
    fn two_patterns_select_rank_two() {
        let search = rank_search(&two_patterns(), &SelectConfig::default()).unwrap();
        assert_eq!(search.best.rank, 2, "{:?}", search.costs);
        let aic = SelectConfig {
            criterion: Criterion::Aic,
            ..SelectConfig::default()
        };
        assert_eq!(select_rank(&two_patterns(), &aic).unwrap().rank, 2);
    }

    #[test]
    fn identical_rows_select_rank_one() {
        let x = Array2::from_shape_fn((12, 4), |(_, j)| [3.0, 1.0, 0.0, 2.0][j]);
        let search = rank_search(&x, &SelectConfig::default()).unwrap();
        assert_eq!(search.best.rank, 1, "{:?}", search.costs);
        // exhaustive sweep agrees
        let cfg = SelectConfig::default();
        let sweep: Vec<f64> = (1..=4)
            .map(|r| fit_rank(&x, r, &cfg).unwrap().cost)
            .collect();
        let argmin = (0..4)
            .min_by(|&a, &b| sweep[a].total_cmp(&sweep[b]))
            .unwrap();
        assert_eq!(argmin + 1, 1, "{sweep:?}");
    }

    #[test]
    fn best_is_minimum_of_evaluated() {
        let x = Array2::from_shape_fn((15, 6), |(i, j)| ((i * 7 + j * 3) % 5) as f64);
        let search = rank_search(&x, &SelectConfig::default()).unwrap();
        let min = search
            .costs
            .iter()
            .map(|c| c.1)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(search.best.cost, min);
        search.best.validate().unwrap();
    }

    #[test]
    fn scales_and_normalization() {
        let x = array![[2.0, 0.0, 10.0], [1.0, 0.0, 5.0]];
        assert_eq!(column_scales(&x), vec![2.0, 1.0, 10.0]);
        let model = fit_rank(&x, 1, &SelectConfig::default()).unwrap();
        let xs = model.normalize(&x).unwrap();
        assert_eq!(xs, array![[1.0, 0.0, 1.0], [0.5, 0.0, 0.5]]);
    }

    #[test]
    fn rejects_invalid_config() {
        let x = two_patterns();
        let bad = SelectConfig {
            trials: 0,
            ..SelectConfig::default()
        };
        assert!(select_rank(&x, &bad).is_err());
        assert!(fit_rank(&x, 3, &SelectConfig::default()).is_err());
        assert!(select_rank(&array![[-1.0]], &SelectConfig::default()).is_err());
    }

    #[test]
    fn restarts_never_worse_than_single() {
        let x = Array2::from_shape_fn((12, 5), |(i, j)| ((i * 5 + j * 7) % 6) as f64);
        let one = fit_rank(&x, 3, &SelectConfig::default()).unwrap();
        let many = fit_rank(
            &x,
            3,
            &SelectConfig {
                restarts: 4,
                ..SelectConfig::default()
            },
        )
        .unwrap();
        assert!(many.cost <= one.cost);
    }
}
