//! Functional depths built from one-dimensional marginal depths.
//!
//! Integrated depths average the marginal depth over the grid, infimal depths
//! take its minimum. The modified band depth is the integrated simplicial
//! depth. The band depth counts ordered pairs of sample functions (drawn with
//! replacement) whose band contains the query on the whole grid.
//!
//! Query functions that are not part of the sample are evaluated against the
//! sample's marginals without being added to it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::depth1d::{count_sorted, UnivariateDepth};
use crate::error::{Error, Result};
use crate::grid::{FunctionalSample, Grid};

/// Which functional depth to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "base")]
pub enum FunctionalDepth {
    Integrated(UnivariateDepth),
    Infimal(UnivariateDepth),
    Band,
}

impl FunctionalDepth {
    pub const MBD: Self = Self::Integrated(UnivariateDepth::Simplicial);

    pub fn is_infimal(self) -> bool {
        matches!(self, Self::Infimal(_))
    }
}

impl fmt::Display for FunctionalDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Integrated(UnivariateDepth::Simplicial) => f.write_str("mbd"),
            Self::Integrated(b) => write!(f, "integrated-{}", b.name()),
            Self::Infimal(b) => write!(f, "infimal-{}", b.name()),
            Self::Band => f.write_str("band"),
        }
    }
}

impl FromStr for FunctionalDepth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use UnivariateDepth::*;
        Ok(match s {
            "mbd" | "integrated-simplicial" => Self::MBD,
            "integrated" | "integrated-halfspace" => Self::Integrated(Halfspace),
            "infimal" | "infimal-halfspace" => Self::Infimal(Halfspace),
            "infimal-simplicial" => Self::Infimal(Simplicial),
            "band" => Self::Band,
            other => return Err(Error::InvalidParameter(format!("unknown depth '{other}'"))),
        })
    }
}

/// Per-grid-point sorted copies of the sample values. Built once in
/// `O(m n log n)`, after which each marginal depth costs `O(log n)`.
#[derive(Debug, Clone)]
pub struct Marginals {
    grid: Grid,
    n: usize,
    // column-major, each column sorted ascending
    sorted: Vec<f64>,
}

impl Marginals {
    pub fn new(sample: &FunctionalSample) -> Self {
        let (n, m) = (sample.n(), sample.m());
        let mut sorted = Vec::with_capacity(n * m);
        for t in 0..m {
            let start = sorted.len();
            sorted.extend(sample.rows().map(|r| r[t]));
            sorted[start..].sort_unstable_by(f64::total_cmp);
        }
        Self {
            grid: sample.grid().clone(),
            n,
            sorted,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Sorted values of the marginal at grid index `t`.
    pub fn column(&self, t: usize) -> &[f64] {
        &self.sorted[t * self.n..(t + 1) * self.n]
    }

    #[inline]
    pub fn counts(&self, t: usize, u: f64) -> (usize, usize) {
        count_sorted(self.column(t), u)
    }

    /// Marginal depths of `f` at every grid point.
    pub fn profile(&self, base: UnivariateDepth, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok(self.profile_unchecked(base, f))
    }

    fn profile_unchecked(&self, base: UnivariateDepth, f: &[f64]) -> Vec<f64> {
        f.iter()
            .enumerate()
            .map(|(t, &u)| {
                let (lt, le) = self.counts(t, u);
                base.from_counts(self.n, lt, le)
            })
            .collect()
    }

    pub fn integrated(&self, base: UnivariateDepth, f: &[f64]) -> Result<f64> {
        let p = self.profile(base, f)?;
        Ok(self.grid.integrate(&p))
    }

    pub fn infimal(&self, base: UnivariateDepth, f: &[f64]) -> Result<f64> {
        let p = self.profile(base, f)?;
        Ok(p.into_iter().fold(f64::INFINITY, f64::min))
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.grid.len() {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Entry `(i, t)` is the marginal depth of `X_i(t)` among the values at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseDepthMatrix {
    grid: Grid,
    n: usize,
    values: Vec<f64>,
}

impl PointwiseDepthMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.len();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.grid.len())
    }
}

/// Depths of all sample functions for one depth kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthVector {
    pub kind: FunctionalDepth,
    pub values: Vec<f64>,
}

impl DepthVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn pointwise_depths(sample: &FunctionalSample, base: UnivariateDepth) -> PointwiseDepthMatrix {
    let marginals = Marginals::new(sample);
    let mut values = Vec::with_capacity(sample.n() * sample.m());
    for row in sample.rows() {
        values.extend(marginals.profile_unchecked(base, row));
    }
    PointwiseDepthMatrix {
        grid: sample.grid().clone(),
        n: sample.n(),
        values,
    }
}

pub fn integrated_depth(
    sample: &FunctionalSample,
    f: &[f64],
    base: UnivariateDepth,
) -> Result<f64> {
    Marginals::new(sample).integrated(base, f)
}

pub fn infimal_depth(sample: &FunctionalSample, f: &[f64], base: UnivariateDepth) -> Result<f64> {
    Marginals::new(sample).infimal(base, f)
}

/// Modified band depth, i.e. the integrated simplicial depth.
pub fn mbd(sample: &FunctionalSample, f: &[f64]) -> Result<f64> {
    integrated_depth(sample, f, UnivariateDepth::Simplicial)
}

/// Share of ordered pairs `(i, j)` with `f` inside `band{X_i, X_j}` everywhere.
pub fn band_depth(sample: &FunctionalSample, f: &[f64]) -> Result<f64> {
    if f.len() != sample.m() {
        return Err(Error::LengthMismatch {
            expected: sample.m(),
            got: f.len(),
        });
    }
    Ok(PairMasks::new(sample).band_depth(sample, f))
}

/// Bit masks over the grid: `below[i]` marks `X_i(t) <= f(t)`, `above[i]`
/// marks `X_i(t) >= f(t)`. A pair covers `f` iff, word by word,
/// `(below_i & above_j) | (above_i & below_j)` is full.
struct PairMasks {
    words: usize,
    below: Vec<u64>,
    above: Vec<u64>,
    full: Vec<u64>,
}

impl PairMasks {
    fn new(sample: &FunctionalSample) -> Self {
        let (n, m) = (sample.n(), sample.m());
        let words = m.div_ceil(64);
        let mut full = vec![u64::MAX; words];
        if m % 64 != 0 {
            full[words - 1] = (1u64 << (m % 64)) - 1;
        }
        Self {
            words,
            below: vec![0; n * words],
            above: vec![0; n * words],
            full,
        }
    }

    fn band_depth(&mut self, sample: &FunctionalSample, f: &[f64]) -> f64 {
        let (n, w) = (sample.n(), self.words);
        self.below.fill(0);
        self.above.fill(0);
        for (i, row) in sample.rows().enumerate() {
            for (t, (&x, &y)) in row.iter().zip(f).enumerate() {
                let bit = 1u64 << (t % 64);
                if x <= y {
                    self.below[i * w + t / 64] |= bit;
                }
                if x >= y {
                    self.above[i * w + t / 64] |= bit;
                }
            }
        }
        let covers = |i: usize, j: usize| {
            (0..w).all(|k| {
                let (bi, ai) = (self.below[i * w + k], self.above[i * w + k]);
                let (bj, aj) = (self.below[j * w + k], self.above[j * w + k]);
                (bi & aj) | (ai & bj) == self.full[k]
            })
        };
        let mut hits = 0u64;
        for i in 0..n {
            if covers(i, i) {
                hits += 1;
            }
            for j in i + 1..n {
                if covers(i, j) {
                    hits += 2;
                }
            }
        }
        hits as f64 / (n as f64 * n as f64)
    }
}

/// Depth of every sample function with respect to the sample itself.
pub fn depth_vector(sample: &FunctionalSample, kind: FunctionalDepth) -> DepthVector {
    let values = match kind {
        FunctionalDepth::Integrated(base) => {
            let pw = pointwise_depths(sample, base);
            pw.rows().map(|r| sample.grid().integrate(r)).collect()
        }
        FunctionalDepth::Infimal(base) => {
            let pw = pointwise_depths(sample, base);
            pw.rows()
                .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
                .collect()
        }
        FunctionalDepth::Band => {
            let mut masks = PairMasks::new(sample);
            sample.rows().map(|r| masks.band_depth(sample, r)).collect()
        }
    };
    DepthVector { kind, values }
}

/// Depth of an arbitrary query function with respect to `sample`.
pub fn depth_of(sample: &FunctionalSample, f: &[f64], kind: FunctionalDepth) -> Result<f64> {
    match kind {
        FunctionalDepth::Integrated(base) => integrated_depth(sample, f, base),
        FunctionalDepth::Infimal(base) => infimal_depth(sample, f, base),
        FunctionalDepth::Band => band_depth(sample, f),
    }
}
