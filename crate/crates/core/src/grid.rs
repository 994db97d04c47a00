//! Evaluation grids, discretized functional samples and bands of functions.
//!
//! All functions in a [`FunctionalSample`] share one [`Grid`] on `[0, 1]`.
//! Integrals over the domain become weighted sums over the grid and infima
//! become minima over grid points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of grid points used when none is given.
pub const DEFAULT_GRID_SIZE: usize = 101;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Strictly increasing evaluation points in `[0, 1]` with quadrature weights
/// summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// `m` equispaced points including both endpoints, uniform weights.
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {m}"
            )));
        }
        let step = (m - 1) as f64;
        let points = (0..m).map(|i| i as f64 / step).collect();
        Self::new(points)
    }

    /// Grid with the given points and uniform weights `1/m`.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        let m = points.len();
        let weights = vec![1.0 / m as f64; m];
        Self::with_weights(points, weights)
    }

    pub fn with_weights(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = points.len();
        if m < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {m}"
            )));
        }
        if weights.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: weights.len(),
            });
        }
        for (i, &p) in points.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidGrid(format!(
                    "point {i} = {p} outside [0, 1]"
                )));
            }
            if i > 0 && p <= points[i - 1] {
                return Err(Error::InvalidGrid(format!(
                    "points not strictly increasing at index {i}"
                )));
            }
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidGrid(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidGrid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Weighted average of `values` over the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// `n` functions evaluated on a shared grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    grid: Grid,
    values: Vec<f64>,
    n: usize,
}

impl FunctionalSample {
    /// Builds a sample from a row-major `n x m` buffer.
    pub fn new(grid: Grid, values: Vec<f64>, n: usize) -> Result<Self> {
        let m = grid.len();
        if n == 0 {
            return Err(Error::InvalidSample(
                "sample must contain at least one function".into(),
            ));
        }
        if values.len() != n * m {
            return Err(Error::LengthMismatch {
                expected: n * m,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "non-finite value in row {} at grid index {}",
                pos / m,
                pos % m
            )));
        }
        Ok(Self { grid, values, n })
    }

    pub fn from_rows(grid: Grid, rows: &[Vec<f64>]) -> Result<Self> {
        let m = grid.len();
        let mut values = Vec::with_capacity(rows.len() * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(grid, values, rows.len())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of functions.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points.
    pub fn m(&self) -> usize {
        self.grid.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.m())
    }

    pub fn value(&self, i: usize, t: usize) -> f64 {
        self.values[i * self.m() + t]
    }

    pub fn column(&self, t: usize) -> Vec<f64> {
        self.rows().map(|r| r[t]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Applies `x -> f(t, x)` to every entry, keeping the grid.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let m = self.m();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &x)| f(k % m, x))
            .collect();
        Self::new(self.grid.clone(), values, self.n)
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.m());
        for &i in indices {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.n,
                });
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(self.grid.clone(), values, indices.len())
    }
}

/// Region between a lower and an upper envelope. Envelopes may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    grid: Grid,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Band {
    pub fn new(grid: Grid, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = grid.len();
        for env in [&lower, &upper] {
            if env.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: env.len(),
                });
            }
        }
        for t in 0..m {
            // also rejects NaN
            if !(lower[t] <= upper[t]) {
                return Err(Error::InvalidParameter(format!(
                    "lower envelope exceeds upper envelope at grid index {t}"
                )));
            }
        }
        Ok(Self { grid, lower, upper })
    }

    /// Band spanned by the selected rows of `sample`: pointwise min and max.
    pub fn of(sample: &FunctionalSample, indices: &[usize]) -> Result<Self> {
        let (&first, rest) = indices.split_first().ok_or(Error::EmptyBand)?;
        let n = sample.n();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let mut lower = sample.row(first).to_vec();
        let mut upper = lower.clone();
        for &i in rest {
            for ((lo, hi), &x) in lower.iter_mut().zip(upper.iter_mut()).zip(sample.row(i)) {
                if x < *lo {
                    *lo = x;
                }
                if x > *hi {
                    *hi = x;
                }
            }
        }
        Ok(Self {
            grid: sample.grid().clone(),
            lower,
            upper,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Closed containment: touching an envelope counts as inside.
    pub fn contains(&self, f: &[f64]) -> Result<bool> {
        self.check_len(f)?;
        Ok(self.contains_unchecked(f))
    }

    pub(crate) fn contains_unchecked(&self, f: &[f64]) -> bool {
        f.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    /// True when `self` lies pointwise inside `other`.
    pub fn is_within(&self, other: &Band) -> bool {
        self.grid == other.grid
            && self
                .lower
                .iter()
                .zip(&self.upper)
                .zip(other.lower.iter().zip(&other.upper))
                .all(|((&lo, &hi), (&olo, &ohi))| olo <= lo && hi <= ohi)
    }

    /// Weighted mean of `upper - lower` over the grid.
    pub fn width(&self) -> Result<f64> {
        if self.lower.iter().chain(&self.upper).any(|v| !v.is_finite()) {
            return Err(Error::UnboundedBand);
        }
        let widths: Vec<f64> = self
            .upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| u - l)
            .collect();
        Ok(self.grid.integrate(&widths))
    }

    /// Inflates the band around `median` by `factor`:
    /// `m - c (m - lower)` and `m + c (upper - m)`.
    pub fn inflate(&self, median: &[f64], factor: f64) -> Result<Self> {
        self.check_len(median)?;
        check_factor(factor)?;
        if let Some(t) =
            (0..median.len()).find(|&t| !(self.lower[t] <= median[t] && median[t] <= self.upper[t]))
        {
            return Err(Error::MedianOutsideBand(t));
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let lower = median
            .iter()
            .zip(&self.lower)
            .map(|(&m, &lo)| m - factor * (m - lo))
            .collect();
        let upper = median
            .iter()
            .zip(&self.upper)
            .map(|(&m, &hi)| m + factor * (hi - m))
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            lower,
            upper,
        })
    }

    /// Fence rule: widens each side by `(factor - 1) / 2` times the pointwise
    /// width, so `factor = 4` adds 1.5 widths on both sides.
    pub fn fence(&self, factor: f64) -> Result<Self> {
        check_factor(factor)?;
        let k = (factor - 1.0) / 2.0;
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                let w = hi - lo;
                (lo - k * w, hi + k * w)
            })
            .unzip();
        Ok(Self {
            grid: self.grid.clone(),
            lower,
            upper,
        })
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

fn check_factor(factor: f64) -> Result<()> {
    if !(factor >= 1.0) || !factor.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "inflation factor must be >= 1, got {factor}"
        )));
    }
    Ok(())
}
