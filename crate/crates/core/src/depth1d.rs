//! One-dimensional depths of a point with respect to an empirical
//! distribution, the median set, and the median-condition check.
//!
//! Both depths only depend on the counts `#{y < u}` and `#{y <= u}`, so once
//! the sample is sorted a single evaluation costs two binary searches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base one-dimensional depth used by the functional depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnivariateDepth {
    /// `min{Q((-inf, u]), Q([u, inf))}`
    Halfspace,
    /// `1 - Q((-inf, u))^2 - Q((u, inf))^2`
    Simplicial,
}

impl UnivariateDepth {
    pub fn name(self) -> &'static str {
        match self {
            Self::Halfspace => "halfspace",
            Self::Simplicial => "simplicial",
        }
    }

    /// Depth from the counts `lt = #{y < u}` and `le = #{y <= u}` in a
    /// sample of size `n`.
    ///
    /// The simplicial depth is computed in integers as
    /// `(n^2 - lt^2 - gt^2) / n^2`, i.e. the share of ordered pairs
    /// `(i, j)` whose closed interval covers `u`.
    #[inline]
    pub fn from_counts(self, n: usize, lt: usize, le: usize) -> f64 {
        let ge = n - lt;
        match self {
            Self::Halfspace => le.min(ge) as f64 / n as f64,
            Self::Simplicial => {
                let gt = n - le;
                let n2 = (n * n) as u64;
                let inside = n2 - (lt * lt) as u64 - (gt * gt) as u64;
                inside as f64 / n2 as f64
            }
        }
    }
}

/// Empirical distribution giving mass `1/n` to each stored value.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSample {
    sorted: Vec<f64>,
}

impl UnivariateSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("univariate sample is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(
                "univariate sample has non-finite values".into(),
            ));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `(#{y < u}, #{y <= u})`
    #[inline]
    pub fn counts(&self, u: f64) -> (usize, usize) {
        count_sorted(&self.sorted, u)
    }

    pub fn depth(&self, kind: UnivariateDepth, u: f64) -> f64 {
        let (lt, le) = self.counts(u);
        kind.from_counts(self.sorted.len(), lt, le)
    }

    /// Points at which the piecewise constant depths are worth probing:
    /// every distinct value, midpoints between neighbours and one point
    /// beyond each end of the range.
    pub fn probes(&self) -> Vec<f64> {
        let mut distinct = self.sorted.clone();
        distinct.dedup();
        let mut probes = Vec::with_capacity(2 * distinct.len() + 1);
        probes.push(distinct[0] - 1.0);
        for (k, &v) in distinct.iter().enumerate() {
            if k > 0 {
                probes.push(0.5 * (distinct[k - 1] + v));
            }
            probes.push(v);
        }
        probes.push(distinct[distinct.len() - 1] + 1.0);
        probes
    }
}

#[inline]
pub(crate) fn count_sorted(sorted: &[f64], u: f64) -> (usize, usize) {
    let lt = sorted.partition_point(|&y| y < u);
    let le = lt + sorted[lt..].partition_point(|&y| y <= u);
    (lt, le)
}

pub fn halfspace_depth(u: f64, q: &UnivariateSample) -> f64 {
    q.depth(UnivariateDepth::Halfspace, u)
}

pub fn simplicial_depth(u: f64, q: &UnivariateSample) -> f64 {
    q.depth(UnivariateDepth::Simplicial, u)
}

/// Closed interval `[lo, hi]` of medians in the broad sense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianSet {
    pub lo: f64,
    pub hi: f64,
}

impl MedianSet {
    pub fn contains(&self, u: f64) -> bool {
        self.lo <= u && u <= self.hi
    }
}

/// All `u` with `F(u-) <= 1/2 <= F(u)` for the empirical distribution
/// function `F`: the order statistics `ceil(n/2)` to `floor(n/2) + 1`.
pub fn median_set(q: &UnivariateSample) -> MedianSet {
    let n = q.len();
    let lo = q.sorted[n.div_ceil(2) - 1];
    let hi = q.sorted[n / 2];
    MedianSet { lo, hi }
}

/// Checks the median condition on the probe set: the depth is at least `c`
/// exactly at the probes that are medians.
pub fn check_md(kind: UnivariateDepth, q: &UnivariateSample, c: f64) -> bool {
    let med = median_set(q);
    q.probes()
        .into_iter()
        .all(|u| (q.depth(kind, u) >= c) == med.contains(u))
}

/// Whether some threshold `c` in `(0, 1]` satisfies the median condition for
/// `q`: the smallest depth over median probes must exceed the largest depth
/// over the other probes.
pub fn md_threshold_exists(kind: UnivariateDepth, q: &UnivariateSample) -> bool {
    let med = median_set(q);
    let mut min_in = f64::INFINITY;
    let mut max_out = 0.0f64;
    for u in q.probes() {
        let d = q.depth(kind, u);
        if med.contains(u) {
            min_in = min_in.min(d);
        } else {
            max_out = max_out.max(d);
        }
    }
    min_in > max_out
}
