#![allow(dead_code)]

use fbox_core::{FunctionalSample, GpModel, Grid};

pub fn gp_sample(n: usize, log_h: f64, m: usize, seed: u64) -> FunctionalSample {
    GpModel::from_log_h(log_h, Grid::uniform(m).unwrap())
        .unwrap()
        .sample(n, seed)
        .unwrap()
}

pub fn from_rows(rows: &[Vec<f64>]) -> FunctionalSample {
    FunctionalSample::from_rows(Grid::uniform(rows[0].len()).unwrap(), rows).unwrap()
}

/// Share of ordered pairs `(i, j)`, diagonal included, with `lo <= u <= hi`.
pub fn simplicial_pair_oracle(xs: &[f64], u: f64) -> f64 {
    let n = xs.len();
    let mut hits = 0usize;
    for &a in xs {
        for &b in xs {
            if a.min(b) <= u && u <= a.max(b) {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * n) as f64
}
