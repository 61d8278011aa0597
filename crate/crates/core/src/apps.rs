//! Estimators over sketch counters: CountMin point query and the k = 2
//! second-moment estimate.

use serde::{Deserialize, Serialize};

use crate::deamortize::BufferedSketch;
use crate::error::{Error, Result};
use crate::sketch::SketchState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub value: i64,
    pub rows_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct L2Estimate {
    /// Estimate of the squared norm.
    pub value: u128,
}

/// How the per-row estimates of [`l2_estimate_with`] are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    /// Lower median of all rows.
    Median,
    /// Rows split into `groups` contiguous groups; lower median of the
    /// group means. Falls back to [`Combiner::Median`] when `groups >= T`.
    MedianOfMeans { groups: usize },
    /// `MedianOfMeans` with 16 groups.
    #[default]
    Default,
}

pub const DEFAULT_GROUPS: usize = 16;

/// Min over rows of the counter `u` hashes to.
pub fn point_query(state: &SketchState, u: u64) -> PointEstimate {
    let rows = state.config().t;
    let value = (0..rows)
        .map(|j| state.counter(j, state.bucket_of(u, j)))
        .min()
        .unwrap_or(0);
    PointEstimate {
        value,
        rows_used: rows,
    }
}

/// Per-row estimates `(C[j][0] - C[j][1])^2`, in row order.
pub fn row_estimates(state: &SketchState) -> Result<Vec<u128>> {
    let k = state.config().k;
    if k != 2 {
        return Err(Error::InvalidConfig(format!(
            "l2 estimate needs k = 2, got {k}"
        )));
    }
    Ok((0..state.config().t)
        .map(|j| {
            let d = state.counter(j, 0) as i128 - state.counter(j, 1) as i128;
            (d * d) as u128
        })
        .collect())
}

pub fn l2_estimate(state: &SketchState) -> Result<L2Estimate> {
    l2_estimate_with(state, Combiner::Default)
}

pub fn l2_estimate_with(state: &SketchState, combiner: Combiner) -> Result<L2Estimate> {
    let mut e = row_estimates(state)?;
    let groups = match combiner {
        Combiner::Median => e.len(),
        Combiner::MedianOfMeans { groups } => groups,
        Combiner::Default => DEFAULT_GROUPS,
    };
    if groups == 0 {
        return Err(Error::InvalidConfig(
            "median-of-means needs at least one group".into(),
        ));
    }
    if groups < e.len() {
        let n = e.len();
        e = (0..groups)
            .map(|g| {
                let (lo, hi) = (g * n / groups, (g + 1) * n / groups);
                e[lo..hi].iter().sum::<u128>() / (hi - lo) as u128
            })
            .collect();
    }
    Ok(L2Estimate {
        value: lower_median(&mut e),
    })
}

/// Lower median by selection; 0 for an empty slice.
pub fn lower_median(v: &mut [u128]) -> u128 {
    if v.is_empty() {
        return 0;
    }
    let mid = (v.len() - 1) / 2;
    *v.select_nth_unstable(mid).1
}

impl BufferedSketch {
    pub fn point_query(&mut self, u: u64) -> PointEstimate {
        self.buffered_query(|s| point_query(s, u))
    }

    pub fn l2_estimate(&mut self) -> Result<L2Estimate> {
        self.buffered_query(l2_estimate)
    }
}
