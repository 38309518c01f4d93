use crate::error::{Error, Result};

/// A feature column mapped to logarithmic bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinnedColumn {
    pub bins: Vec<usize>,
    pub bin_count: usize,
}

/// Vertical logarithmic binning.
///
/// The `ceil(p * remaining)` smallest values go into the current bin, the
/// rest are binned recursively with the next index. Every value tied with the
/// last value taken joins the same bin, so equal values never split and the
/// result does not depend on node order.
pub fn vertical_log_bin(column: &[f64], p: f64) -> Result<BinnedColumn> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bin fraction must lie in (0, 1), got {p}"
        )));
    }
    if column.is_empty() {
        return Err(Error::InvalidParameter("cannot bin an empty column".into()));
    }
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));

    let mut bins = vec![0; column.len()];
    let mut start = 0;
    let mut bin = 0;
    while start < order.len() {
        let remaining = order.len() - start;
        let take = ((p * remaining as f64).ceil() as usize).clamp(1, remaining);
        let boundary = column[order[start + take - 1]];
        let mut end = start + take;
        while end < order.len() && column[order[end]] <= boundary {
            end += 1;
        }
        for &u in &order[start..end] {
            bins[u] = bin;
        }
        start = end;
        bin += 1;
    }
    Ok(BinnedColumn {
        bins,
        bin_count: bin,
    })
}
