mod common;

use common::{from_rows, simplicial_pair_oracle};
use fbox_core::{
    band_depth, depth_vector, halfspace_depth, integrated_depth, mbd, simplicial_depth,
    FunctionalDepth, UnivariateDepth, UnivariateSample,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn value<R: Rng>(rng: &mut R, discrete: bool) -> f64 {
    if discrete {
        rng.gen_range(0..5) as f64
    } else {
        rng.gen_range(-10.0..10.0)
    }
}

fn probes(xs: &[f64]) -> Vec<f64> {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut p = sorted.clone();
    p.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    p.push(sorted[0] - 1.0);
    p.push(sorted[sorted.len() - 1] + 1.0);
    p
}

#[test]
fn simplicial_matches_pair_oracle_on_fuzz_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let discrete = case % 2 == 0;
        let xs: Vec<f64> = (0..n).map(|_| value(&mut rng, discrete)).collect();
        let q = UnivariateSample::new(xs.clone()).unwrap();
        for u in probes(&xs) {
            assert_eq!(
                simplicial_depth(u, &q),
                simplicial_pair_oracle(&xs, u),
                "case {case}, xs {xs:?}, u {u}"
            );
        }
    }
}

#[test]
fn halfspace_matches_count_oracle_on_fuzz_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xabc);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let xs: Vec<f64> = (0..n).map(|_| value(&mut rng, true)).collect();
        let q = UnivariateSample::new(xs.clone()).unwrap();
        for u in probes(&xs) {
            let le = xs.iter().filter(|&&x| x <= u).count();
            let ge = xs.iter().filter(|&&x| x >= u).count();
            assert_eq!(halfspace_depth(u, &q), le.min(ge) as f64 / n as f64);
        }
    }
}

fn band_pair_oracle(rows: &[Vec<f64>], f: &[f64]) -> f64 {
    let n = rows.len();
    let mut hits = 0usize;
    for a in rows {
        for b in rows {
            if f.iter()
                .enumerate()
                .all(|(t, &y)| a[t].min(b[t]) <= y && y <= a[t].max(b[t]))
            {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * n) as f64
}

fn random_rows<R: Rng>(rng: &mut R, n: usize, m: usize, discrete: bool) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| value(rng, discrete)).collect())
        .collect()
}

#[test]
fn band_depth_matches_pair_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        // widths on both sides of the 64-bit word boundary
        let m = [2, 3, 5, 9, 63, 64, 65, 130][case % 8];
        let discrete = rng.gen_bool(0.7);
        let rows = random_rows(&mut rng, n, m, discrete);
        let sample = from_rows(&rows);
        let dv = depth_vector(&sample, FunctionalDepth::Band);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(
                dv.values[i],
                band_pair_oracle(&rows, row),
                "case {case}, row {i}"
            );
        }
        let f: Vec<f64> = (0..m).map(|_| value(&mut rng, discrete)).collect();
        assert_eq!(
            band_depth(&sample, &f).unwrap(),
            band_pair_oracle(&rows, &f),
            "case {case}, query"
        );
    }
}

/// Ordered-pair band share at each grid point, averaged with the grid weights.
fn mbd_oracle(rows: &[Vec<f64>], weights: &[f64], f: &[f64]) -> f64 {
    let n = rows.len();
    let mut total = 0.0;
    for (t, &y) in f.iter().enumerate() {
        let mut hits = 0usize;
        for a in rows {
            for b in rows {
                if a[t].min(b[t]) <= y && y <= a[t].max(b[t]) {
                    hits += 1;
                }
            }
        }
        total += weights[t] * hits as f64 / (n * n) as f64;
    }
    total
}

#[test]
fn mbd_equals_integrated_simplicial_and_pair_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(2..=12);
        let discrete = rng.gen_bool(0.5);
        let rows = random_rows(&mut rng, n, m, discrete);
        let sample = from_rows(&rows);
        let weights = sample.grid().weights().to_vec();
        let dv = depth_vector(&sample, FunctionalDepth::MBD);
        for (i, row) in rows.iter().enumerate() {
            let a = mbd(&sample, row).unwrap();
            let b = integrated_depth(&sample, row, UnivariateDepth::Simplicial).unwrap();
            assert!((a - b).abs() <= 1e-15, "case {case}");
            assert!((dv.values[i] - b).abs() <= 1e-15, "case {case}");
            let o = mbd_oracle(&rows, &weights, row);
            assert!((a - o).abs() <= 1e-15, "case {case}: {a} vs {o}");
        }
    }
}
