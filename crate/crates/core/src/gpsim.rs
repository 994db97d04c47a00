//! Centered Gaussian processes with squared-exponential covariance
//! `exp(-(s - t)^2 / h)` sampled on a grid.
//!
//! Randomness comes from `ChaCha8Rng` (seeded through `seed_from_u64`, with
//! independent streams selected by `set_stream`), and standard normals are
//! drawn with the Marsaglia polar method, so a seed reproduces the same
//! sample on every platform.

use nalgebra::{linalg::Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{FunctionalSample, Grid};

pub const DEFAULT_JITTER: f64 = 1e-10;
pub const MAX_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GpModel {
    h: f64,
    grid: Grid,
    jitter: f64,
}

impl GpModel {
    pub fn new(h: f64, grid: Grid) -> Result<Self> {
        Self::with_jitter(h, grid, DEFAULT_JITTER)
    }

    /// Model with bandwidth `exp(log_h)`.
    pub fn from_log_h(log_h: f64, grid: Grid) -> Result<Self> {
        Self::new(log_h.exp(), grid)
    }

    pub fn with_jitter(h: f64, grid: Grid, jitter: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        if !(jitter >= 0.0) || !jitter.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "jitter must be nonnegative, got {jitter}"
            )));
        }
        Ok(Self { h, grid, jitter })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn kernel(&self, s: f64, t: f64) -> f64 {
        let d = s - t;
        (-(d * d) / self.h).exp()
    }

    /// Covariance on the grid with the model's jitter on the diagonal.
    pub fn covariance(&self) -> DMatrix<f64> {
        self.covariance_with(self.jitter)
    }

    fn covariance_with(&self, jitter: f64) -> DMatrix<f64> {
        let p = self.grid.points();
        let m = p.len();
        DMatrix::from_fn(m, m, |i, j| {
            self.kernel(p[i], p[j]) + if i == j { jitter } else { 0.0 }
        })
    }

    /// Factorizes the covariance, raising the jitter tenfold per failed
    /// attempt up to [`MAX_JITTER`].
    pub fn sampler(&self) -> Result<GpSampler> {
        let mut jitter = self.jitter;
        loop {
            if let Some(chol) = Cholesky::new(self.covariance_with(jitter)) {
                let l = chol.l();
                let m = l.nrows();
                let mut factor = Vec::with_capacity(m * (m + 1) / 2);
                for i in 0..m {
                    for j in 0..=i {
                        factor.push(l[(i, j)]);
                    }
                }
                return Ok(GpSampler {
                    grid: self.grid.clone(),
                    factor,
                    jitter,
                });
            }
            if jitter >= MAX_JITTER {
                return Err(Error::CovarianceNotPd);
            }
            jitter = if jitter == 0.0 {
                DEFAULT_JITTER
            } else {
                (jitter * 10.0).min(MAX_JITTER)
            };
        }
    }

    /// `n` independent draws; deterministic for a fixed seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<FunctionalSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sampler()?.sample(n, &mut rng)
    }
}

/// Lower-triangular covariance factor, ready to map normals to paths.
#[derive(Debug, Clone)]
pub struct GpSampler {
    grid: Grid,
    // packed lower triangle, row-major
    factor: Vec<f64>,
    jitter: f64,
}

impl GpSampler {
    /// Jitter that made the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<FunctionalSample> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "sample size must be positive".into(),
            ));
        }
        let m = self.grid.len();
        let mut normals = PolarNormal::default();
        let mut z = vec![0.0; m];
        let mut values = Vec::with_capacity(n * m);
        for _ in 0..n {
            for zi in z.iter_mut() {
                *zi = normals.sample(rng);
            }
            let mut offset = 0;
            for i in 0..m {
                let row = &self.factor[offset..offset + i + 1];
                values.push(row.iter().zip(&z).map(|(l, z)| l * z).sum());
                offset += i + 1;
            }
        }
        FunctionalSample::new(self.grid.clone(), values, n)
    }
}

/// Marsaglia polar method; caches the second variate of each pair.
#[derive(Debug, Default, Clone)]
pub struct PolarNormal {
    spare: Option<f64>,
}

impl PolarNormal {
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * rng.gen::<f64>() - 1.0;
            let v = 2.0 * rng.gen::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let k = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * k);
                return u * k;
            }
        }
    }
}

/// Generator for stream `stream` of `seed`. Distinct streams are
/// independent, which lets parallel tasks draw without shared state.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
