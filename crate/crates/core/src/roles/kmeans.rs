use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assign::HardAssignment;
use super::select::column_scales;
use crate::error::{Error, Result};

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means on the rows of `x` after scaling each column to max 1.
///
/// Centers start from a seeded random row followed by repeated
/// farthest-point picks. A cluster that empties is re-seeded with the point
/// farthest from its own center.
pub fn kmeans_assign(
    x: &Array2<f64>,
    r: usize,
    seed: u64,
    max_iter: usize,
) -> Result<HardAssignment> {
    let n = x.nrows();
    if r == 0 || r > n {
        return Err(Error::RankOutOfRange { rank: r, max: n });
    }
    let mut data = x.clone();
    for (mut col, s) in data.columns_mut().into_iter().zip(column_scales(x)) {
        col /= s;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| sq_dist(data.row(i), data.row(chosen[0])))
        .collect();
    while chosen.len() < r {
        let next = argmax(&nearest);
        chosen.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(data.row(i), data.row(next)));
        }
    }
    let mut centers = data.select(ndarray::Axis(0), &chosen);
    let mut labels = vec![usize::MAX; n];

    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for k in 0..r {
                let d = sq_dist(data.row(i), centers.row(k));
                if d < best_d {
                    best = k;
                    best_d = d;
                }
            }
            if *label != best {
                *label = best;
                changed = true;
            }
        }

        // refill empty clusters
        loop {
            let counts = cluster_sizes(&labels, r);
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let dist: Vec<f64> = (0..n)
                .map(|i| {
                    if counts[labels[i]] > 1 {
                        sq_dist(data.row(i), centers.row(labels[i]))
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let far = argmax(&dist);
            labels[far] = empty;
            centers.row_mut(empty).assign(&data.row(far));
            changed = true;
        }

        let counts = cluster_sizes(&labels, r);
        centers.fill(0.0);
        for (i, &l) in labels.iter().enumerate() {
            let mut c = centers.row_mut(l);
            c += &data.row(i);
        }
        for (mut c, &m) in centers.rows_mut().into_iter().zip(&counts) {
            c /= m as f64;
        }
        if !changed {
            break;
        }
    }
    Ok(HardAssignment {
        labels,
        role_count: r,
    })
}

fn cluster_sizes(labels: &[usize], r: usize) -> Vec<usize> {
    let mut counts = vec![0; r];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

// first index of the largest value
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Sum of squared distances from rows to their cluster means, on the
/// column-scaled data.
pub fn within_cluster_sse(x: &Array2<f64>, assignment: &HardAssignment) -> f64 {
    let mut data = x.clone();
    for (mut col, s) in data.columns_mut().into_iter().zip(column_scales(x)) {
        col /= s;
    }
    let r = assignment.role_count;
    let counts = cluster_sizes(&assignment.labels, r);
    let mut means = Array2::<f64>::zeros((r, x.ncols()));
    for (i, &l) in assignment.labels.iter().enumerate() {
        let mut m = means.row_mut(l);
        m += &data.row(i);
    }
    for (mut m, &c) in means.rows_mut().into_iter().zip(&counts) {
        if c > 0 {
            m /= c as f64;
        }
    }
    assignment
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(data.row(i), means.row(l)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn same_partition(a: &[usize], b: &[usize]) -> bool {
        (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
    }

    #[test]
    fn separates_repeated_patterns() {
        let mut x = Array2::zeros((10, 3));
        for i in 0..10 {
            x.row_mut(i).assign(&if i % 2 == 0 {
                array![1.0, 0.0, 2.0]
            } else {
                array![0.0, 5.0, 1.0]
            });
        }
        for seed in 0..5 {
            let a = kmeans_assign(&x, 2, seed, 100).unwrap();
            let truth: Vec<usize> = (0..10).map(|i| i % 2).collect();
            assert!(same_partition(&a.labels, &truth));
        }
    }

    #[test]
    fn one_cluster() {
        let x = array![[1.0, 2.0], [3.0, 0.0], [0.5, 0.5]];
        assert_eq!(kmeans_assign(&x, 1, 3, 10).unwrap().labels, vec![0, 0, 0]);
    }

    #[test]
    fn one_cluster_per_node() {
        let x = array![[1.0, 2.0], [3.0, 0.0], [0.5, 0.5], [0.0, 0.0]];
        let a = kmeans_assign(&x, 4, 9, 10).unwrap();
        assert_eq!(within_cluster_sse(&x, &a), 0.0);
        let mut labels = a.labels.clone();
        labels.sort_unstable();
        assert_eq!(labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn duplicate_rows_still_fill_every_cluster() {
        let x = array![[1.0], [1.0], [1.0], [2.0]];
        let a = kmeans_assign(&x, 3, 0, 10).unwrap();
        assert_eq!(
            cluster_sizes(&a.labels, 3)
                .iter()
                .filter(|&&c| c > 0)
                .count(),
            3
        );
        assert_eq!(within_cluster_sse(&x, &a), 0.0);
    }

    #[test]
    fn too_many_clusters() {
        let x = array![[1.0], [2.0]];
        assert!(kmeans_assign(&x, 3, 0, 10).is_err());
        assert!(kmeans_assign(&x, 0, 0, 10).is_err());
    }
}
