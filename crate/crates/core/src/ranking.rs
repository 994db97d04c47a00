//! Ordering of sample functions by depth, tie-breaking refinements for
//! infimal depths, and the outlyingness index.
//!
//! # Pointwise ranks
//!
//! The two-sided pointwise rank of function `i` at grid point `t` is
//! `R_i(t) = min(#{j : X_j(t) <= X_i(t)}, #{j : X_j(t) >= X_i(t)})`, so tied
//! values all receive the tie group's outermost count. `R_i(t) / n` is the
//! halfspace depth of `X_i(t)`.
//!
//! **erl** sorts each rank vector `R_i` ascending and compares the sorted
//! vectors lexicographically (smaller means more extreme). The score of `i`
//! is the share of functions whose sorted vector is lexicographically less
//! than or equal to that of `i`.
//!
//! **area** uses continuous pointwise ranks. Within a column, with
//! `a = #{X_j <= x}` and `b = #{X_j < x}`, the lower continuous rank of `x`
//! is `a - 1 + r`, where
//!
//! * `r = (x - prev) / (next - prev)` when `x` has a strictly smaller
//!   neighbour `prev` and a strictly larger neighbour `next`;
//! * `r = exp(-(next - x) / (next2 - next))` when `x` is the column minimum,
//!   with `next2` the next distinct value after `next` (if there is none the
//!   scale `next - x` is used instead, giving `exp(-1)`);
//! * `r = 1` when `x` is the column maximum.
//!
//! The upper continuous rank is the same construction applied to `-x`, and
//! the continuous rank `c_i(t)` is the smaller of the two, which places it in
//! `(R_i(t) - 1, R_i(t)]`. With `k_i = min_t R_i(t)` the area score is
//! `sum_t w_t min(c_i(t), k_i) = k_i - sum_t w_t max(0, k_i - c_i(t))`.
//! Tied values get identical continuous ranks.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdepth::DepthVector;
use crate::grid::{Band, FunctionalSample};

/// Tie-breaking refinement used on top of a depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Refinement {
    Erl,
    Area,
}

impl Refinement {
    pub fn name(self) -> &'static str {
        match self {
            Self::Erl => "erl",
            Self::Area => "area",
        }
    }

    pub fn scores(self, sample: &FunctionalSample) -> Result<Vec<f64>> {
        match self {
            Self::Erl => erl_scores(sample),
            Self::Area => area_scores(sample),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementScores {
    pub kind: Refinement,
    pub scores: Vec<f64>,
}

/// Sample functions ordered from deepest to shallowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRanking {
    pub depth: DepthVector,
    /// Indices from deepest to shallowest.
    pub order: Vec<usize>,
    /// 1-based average ranks; functions tied on depth (and refinement score,
    /// when present) share the mean of their positions.
    pub ranks: Vec<f64>,
    pub refinement: Option<RefinementScores>,
}

impl DepthRanking {
    /// Index of the deepest function.
    pub fn median(&self) -> usize {
        self.order[0]
    }
}

pub fn rank_by_depth(depth: DepthVector) -> DepthRanking {
    build_ranking(depth, None)
}

pub fn rank_with_refinement(
    depth: DepthVector,
    refinement: RefinementScores,
) -> Result<DepthRanking> {
    if refinement.scores.len() != depth.len() {
        return Err(Error::LengthMismatch {
            expected: depth.len(),
            got: refinement.scores.len(),
        });
    }
    Ok(build_ranking(depth, Some(refinement)))
}

fn build_ranking(depth: DepthVector, refinement: Option<RefinementScores>) -> DepthRanking {
    let n = depth.len();
    let d = &depth.values;
    let r = refinement.as_ref().map(|r| r.scores.as_slice());
    let key_cmp = |a: usize, b: usize| {
        d[b].total_cmp(&d[a]).then_with(|| match r {
            Some(s) => s[b].total_cmp(&s[a]),
            None => Ordering::Equal,
        })
    };
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the lower index first among exact ties
    order.sort_by(|&a, &b| key_cmp(a, b));

    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && key_cmp(order[start], order[end]) == Ordering::Equal {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    DepthRanking {
        depth,
        order,
        ranks,
        refinement,
    }
}

/// Two-sided integer pointwise ranks, row-major `n x m`.
pub fn pointwise_extreme_ranks(sample: &FunctionalSample) -> Vec<usize> {
    let (n, m) = (sample.n(), sample.m());
    let mut ranks = vec![0usize; n * m];
    let mut col = Vec::with_capacity(n);
    for t in 0..m {
        col.clear();
        col.extend(sample.rows().map(|r| r[t]));
        col.sort_unstable_by(f64::total_cmp);
        for i in 0..n {
            let x = sample.value(i, t);
            let lt = col.partition_point(|&y| y < x);
            let le = lt + col[lt..].partition_point(|&y| y <= x);
            ranks[i * m + t] = le.min(n - lt);
        }
    }
    ranks
}

fn require_two(sample: &FunctionalSample) -> Result<()> {
    if sample.n() < 2 {
        return Err(Error::InvalidSample(format!(
            "rank refinements need at least 2 functions, got {}",
            sample.n()
        )));
    }
    Ok(())
}

/// Extreme rank length scores in `(0, 1]`; larger is deeper.
pub fn erl_scores(sample: &FunctionalSample) -> Result<Vec<f64>> {
    require_two(sample)?;
    let (n, m) = (sample.n(), sample.m());
    let mut vectors = pointwise_extreme_ranks(sample);
    for v in vectors.chunks_exact_mut(m) {
        v.sort_unstable();
    }
    let vec_of = |i: usize| &vectors[i * m..(i + 1) * m];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vec_of(a).cmp(vec_of(b)));

    let mut scores = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vec_of(order[start]) == vec_of(order[end]) {
            end += 1;
        }
        let score = end as f64 / n as f64;
        for &i in &order[start..end] {
            scores[i] = score;
        }
        start = end;
    }
    Ok(scores)
}

/// Lower continuous ranks of `values` (returned in input order).
fn lower_continuous_ranks(values: &[f64], sorted: &mut Vec<f64>) -> Vec<f64> {
    sorted.clear();
    sorted.extend_from_slice(values);
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    values
        .iter()
        .map(|&x| {
            let b = sorted.partition_point(|&y| y < x);
            let a = b + sorted[b..].partition_point(|&y| y <= x);
            let frac = if a == n {
                1.0
            } else if b > 0 {
                let (prev, next) = (sorted[b - 1], sorted[a]);
                (x - prev) / (next - prev)
            } else {
                let next = sorted[a];
                let after = a + sorted[a..].partition_point(|&y| y <= next);
                let scale = if after < n {
                    sorted[after] - next
                } else {
                    next - x
                };
                (-(next - x) / scale).exp()
            };
            (a - 1) as f64 + frac
        })
        .collect()
}

/// Continuous two-sided pointwise ranks, row-major `n x m`.
pub fn pointwise_continuous_ranks(sample: &FunctionalSample) -> Vec<f64> {
    let (n, m) = (sample.n(), sample.m());
    let mut out = vec![0.0; n * m];
    let mut scratch = Vec::with_capacity(n);
    let mut col = Vec::with_capacity(n);
    for t in 0..m {
        col.clear();
        col.extend(sample.rows().map(|r| r[t]));
        let low = lower_continuous_ranks(&col, &mut scratch);
        for x in col.iter_mut() {
            *x = -*x;
        }
        let up = lower_continuous_ranks(&col, &mut scratch);
        for i in 0..n {
            out[i * m + t] = low[i].min(up[i]);
        }
    }
    out
}

/// Area scores; larger is deeper. Each lies in `(k_i - 1, k_i]` for the
/// integer extreme rank `k_i`, so they refine the infimal ordering.
pub fn area_scores(sample: &FunctionalSample) -> Result<Vec<f64>> {
    require_two(sample)?;
    let m = sample.m();
    let ranks = pointwise_extreme_ranks(sample);
    let cont = pointwise_continuous_ranks(sample);
    let weights = sample.grid().weights();
    Ok(ranks
        .chunks_exact(m)
        .zip(cont.chunks_exact(m))
        .map(|(r, c)| {
            let k = *r.iter().min().expect("grid has points") as f64;
            c.iter().zip(weights).map(|(&ci, &w)| w * ci.min(k)).sum()
        })
        .collect())
}

fn check_query(band: &Band, median: &[f64], f: &[f64]) -> Result<()> {
    let m = band.grid().len();
    for v in [median, f] {
        if v.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: v.len(),
            });
        }
    }
    if let Some(t) =
        (0..m).find(|&t| !(band.lower()[t] <= median[t] && median[t] <= band.upper()[t]))
    {
        return Err(Error::MedianOutsideBand(t));
    }
    Ok(())
}

/// Ratio of the deviation of `f(t)` from the median to the band's half-width
/// on the same side; infinite when that half-width is zero.
#[inline]
fn anchored_ratio(lo: f64, med: f64, hi: f64, x: f64) -> f64 {
    let (dev, half) = if x > med {
        (x - med, hi - med)
    } else if x < med {
        (med - x, med - lo)
    } else {
        return 0.0;
    };
    if half > 0.0 {
        dev / half
    } else {
        f64::INFINITY
    }
}

/// Smallest factor `c` for which `f` lies inside the band inflated by `c`
/// around `median`. `f` is an outlier for whisker factor `c` iff the index
/// exceeds `c`.
pub fn outlyingness_index(band: &Band, median: &[f64], f: &[f64]) -> Result<f64> {
    check_query(band, median, f)?;
    Ok(band
        .lower()
        .iter()
        .zip(median)
        .zip(band.upper())
        .zip(f)
        .map(|(((&lo, &med), &hi), &x)| anchored_ratio(lo, med, hi, x))
        .fold(0.0, f64::max))
}

/// Outlyingness for the fence rule: points outside the band need factor
/// `1 + 2 d / w` (`d` the distance to the band, `w` its width); points inside
/// keep the median-anchored ratio, which is at most one.
pub fn fence_outlyingness_index(band: &Band, median: &[f64], f: &[f64]) -> Result<f64> {
    check_query(band, median, f)?;
    Ok(band
        .lower()
        .iter()
        .zip(median)
        .zip(band.upper())
        .zip(f)
        .map(|(((&lo, &med), &hi), &x)| {
            let w = hi - lo;
            let dist = if x > hi {
                x - hi
            } else if x < lo {
                lo - x
            } else {
                return anchored_ratio(lo, med, hi, x);
            };
            if w > 0.0 {
                1.0 + 2.0 * dist / w
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max))
}
