//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see
//! the report; the test fails if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fbox_core::{
    band_depth, build_boxplot, check_band_convexity, depth_vector, generate_motivating_example,
    integrated_depth, mbd, run_table_study, simplicial_depth, BoxplotOptions, ExperimentConfig,
    ExperimentReport, FunctionalDepth, FunctionalSample, GpModel, Grid, OutlierLabel, Refinement,
    Statistic, UnivariateDepth, UnivariateSample, MOTIVATING_EXAMPLE_SEED,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const INFIMAL: FunctionalDepth = FunctionalDepth::Infimal(UnivariateDepth::Halfspace);

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn mean(report: &ExperimentReport, variant: &str, n: usize, log_h: f64, stat: Statistic) -> f64 {
    report
        .cell(variant, n, log_h)
        .and_then(|c| c.statistic(stat))
        .expect("cell")
        .mean
}

fn exact_rows(report: &ExperimentReport, elapsed: Duration) -> Outcome {
    let mut bad = Vec::new();
    let mut cells = 0;
    for variant in ["erl", "area"] {
        for n in [50, 500] {
            for log_h in [-4.0, -2.0, 0.0, 2.0] {
                let s = report.cell(variant, n, log_h).unwrap().central_coverage;
                cells += 1;
                if s.mean != 50.0 || s.sd != 0.0 {
                    bad.push(format!(
                        "{variant} n={n} log h={log_h}: {:.3} ({:.3})",
                        s.mean, s.sd
                    ));
                }
            }
        }
    }
    Outcome {
        id: 1,
        name: "erl/area central coverage exactly 50.000 (0.000)",
        pass: bad.is_empty() && elapsed < Duration::from_secs(120),
        detail: format!(
            "{cells} cells, {} off; study {:.1} s {:?}",
            bad.len(),
            elapsed.as_secs_f64(),
            bad
        ),
    }
}

fn integrated_cell(report: &ExperimentReport) -> Outcome {
    let m = mean(report, "integrated", 500, -4.0, Statistic::CentralCoverage);
    Outcome {
        id: 2,
        name: "integrated central coverage n=500 log h=-4 in [72, 78]",
        pass: (72.0..=78.0).contains(&m),
        detail: format!("mean {m:.3}"),
    }
}

fn width_trend(report: &ExperimentReport) -> Outcome {
    let ratio = |v| {
        mean(report, v, 500, -4.0, Statistic::MeanWidth)
            / mean(report, v, 50, -4.0, Statistic::MeanWidth)
    };
    let (int, inf) = (ratio("integrated"), ratio("infimal"));
    Outcome {
        id: 3,
        name: "width ratio n=500/n=50: integrated >= 1.3, infimal <= 1.2",
        pass: int >= 1.3 && inf <= 1.2,
        detail: format!("integrated {int:.3}, infimal {inf:.3}"),
    }
}

fn test_coverage(report: &ExperimentReport) -> Outcome {
    let m = mean(report, "infimal", 500, -4.0, Statistic::TestCoverage);
    Outcome {
        id: 4,
        name: "infimal test coverage n=500 log h=-4 in [38, 43.5] and < 50",
        pass: (38.0..=43.5).contains(&m) && m < 50.0,
        detail: format!("mean {m:.3}"),
    }
}

fn whisker_coverage(report: &ExperimentReport) -> Outcome {
    let m = mean(report, "infimal", 50, -2.0, Statistic::WhiskerCoverage);
    Outcome {
        id: 5,
        name: "infimal whisker coverage n=50 log h=-2 >= 99.9",
        pass: m >= 99.9,
        detail: format!("mean {m:.3}"),
    }
}

fn gp(n: usize, log_h: f64, m: usize, seed: u64) -> FunctionalSample {
    GpModel::from_log_h(log_h, Grid::uniform(m).unwrap())
        .unwrap()
        .sample(n, seed)
        .unwrap()
}

fn band_convexity() -> Outcome {
    let variants = [
        BoxplotOptions::new(INFIMAL, None),
        BoxplotOptions::new(FunctionalDepth::Infimal(UnivariateDepth::Simplicial), None),
        BoxplotOptions::new(INFIMAL, Some(Refinement::Erl)),
        BoxplotOptions::new(INFIMAL, Some(Refinement::Area)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut violations = 0;
    for case in 0..200 {
        let n = rng.gen_range(10..=60);
        let log_h = rng.gen_range(-4.0..2.0);
        let s = gp(n, log_h, 101, 1000 + case);
        for opts in &variants {
            violations += check_band_convexity(&s, opts).unwrap().len();
        }
    }
    let ex = generate_motivating_example(MOTIVATING_EXAMPLE_SEED).unwrap();
    let mbd_v =
        check_band_convexity(&ex.sample, &BoxplotOptions::new(FunctionalDepth::MBD, None)).unwrap();
    let globals = mbd_v
        .iter()
        .filter(|&&i| ex.labels[i] == OutlierLabel::Global)
        .count();
    Outcome {
        id: 6,
        name: "band convexity: infimal variants hold, MBD fails on the motivating example",
        pass: violations == 0 && !mbd_v.is_empty(),
        detail: format!(
            "{violations} violations over 200 samples x 4 variants; MBD violations {} ({globals} global outliers)",
            mbd_v.len()
        ),
    }
}

fn pairs_covering(lo: &[f64], hi: &[f64], f: &[f64]) -> bool {
    f.iter()
        .enumerate()
        .all(|(t, &y)| lo[t].min(hi[t]) <= y && y <= lo[t].max(hi[t]))
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    let mut max_mbd_gap = 0.0f64;
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0..4) as f64).collect();
        let q = UnivariateSample::new(xs.clone()).unwrap();
        for u in [-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let hits = xs
                .iter()
                .flat_map(|a| xs.iter().map(move |b| (a, b)))
                .filter(|(a, b)| a.min(**b) <= u && u <= a.max(**b))
                .count();
            if simplicial_depth(u, &q) != hits as f64 / (n * n) as f64 {
                mismatches += 1;
            }
        }

        let m = [2, 5, 64, 70][case % 4];
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(0..3) as f64).collect())
            .collect();
        let s = FunctionalSample::from_rows(Grid::uniform(m).unwrap(), &rows).unwrap();
        for f in &rows {
            let hits = rows
                .iter()
                .flat_map(|a| rows.iter().map(move |b| (a, b)))
                .filter(|(a, b)| pairs_covering(a, b, f))
                .count();
            if band_depth(&s, f).unwrap() != hits as f64 / (n * n) as f64 {
                mismatches += 1;
            }
        }

        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let s = FunctionalSample::from_rows(Grid::uniform(7).unwrap(), &rows).unwrap();
        for f in &rows {
            let gap = (mbd(&s, f).unwrap()
                - integrated_depth(&s, f, UnivariateDepth::Simplicial).unwrap())
            .abs();
            max_mbd_gap = max_mbd_gap.max(gap);
        }
    }
    Outcome {
        id: 7,
        name: "oracle equivalences: simplicial, band depth, MBD",
        pass: mismatches == 0 && max_mbd_gap <= 1e-15,
        detail: format!(
            "{mismatches} exact mismatches over 1000 cases; max MBD gap {max_mbd_gap:e}"
        ),
    }
}

fn invariance() -> Outcome {
    let kinds = [
        FunctionalDepth::Integrated(UnivariateDepth::Halfspace),
        FunctionalDepth::MBD,
        INFIMAL,
        FunctionalDepth::Infimal(UnivariateDepth::Simplicial),
        FunctionalDepth::Band,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut max_gap, mut boxplot_changes, mut permutation_changes) = (0.0f64, 0, 0);
    for case in 0..30 {
        let n = rng.gen_range(10..=60);
        let s = gp(n, rng.gen_range(-4.0..2.0), 101, 5000 + case);
        let m = s.m();
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let t = s.map_values(|k, x| a[k % m] * x + b[k % m]).unwrap();
        for kind in kinds {
            let (x, y) = (depth_vector(&s, kind).values, depth_vector(&t, kind).values);
            max_gap = x
                .iter()
                .zip(&y)
                .map(|(p, q)| (p - q).abs())
                .fold(max_gap, f64::max);
        }
        for opts in [
            BoxplotOptions::default(),
            BoxplotOptions::new(FunctionalDepth::MBD, None),
        ] {
            let (p, q) = (
                build_boxplot(&s, &opts).unwrap(),
                build_boxplot(&t, &opts).unwrap(),
            );
            if p.median_index != q.median_index || p.outlier_indices != q.outlier_indices {
                boxplot_changes += 1;
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let rows: Vec<Vec<f64>> = s
            .rows()
            .map(|r| perm.iter().map(|&p| r[p]).collect())
            .collect();
        let p = FunctionalSample::from_rows(s.grid().clone(), &rows).unwrap();
        for base in [UnivariateDepth::Halfspace, UnivariateDepth::Simplicial] {
            let kind = FunctionalDepth::Infimal(base);
            if depth_vector(&s, kind).values != depth_vector(&p, kind).values {
                permutation_changes += 1;
            }
        }
    }
    Outcome {
        id: 8,
        name: "affine and grid-permutation invariance",
        pass: max_gap <= 1e-12 && boxplot_changes == 0 && permutation_changes == 0,
        detail: format!(
            "max depth gap {max_gap:e}; {boxplot_changes} boxplot changes; {permutation_changes} permutation changes"
        ),
    }
}

fn run_fbox(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_fbox"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn same_files(a: &Path, b: &Path, names: &[&str]) -> bool {
    names
        .iter()
        .all(|f| matches!((fs::read(a.join(f)), fs::read(b.join(f))), (Ok(x), Ok(y)) if x == y))
}

fn determinism() -> Outcome {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let sim = |name: &str, threads: &str| {
        let out = d.join(name);
        run_fbox(&[
            "simulate",
            "--n",
            "30,60",
            "--logh",
            "-4,0",
            "--runs",
            "4",
            "--ntest",
            "100",
            "--grid",
            "51",
            "--seed",
            "17",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ])
    };
    let ran = sim("t1", "1") && sim("t4", "4") && sim("t4b", "4");
    let reports =
        ran && same_files(
            &d.join("t1"),
            &d.join("t4"),
            &["report.csv", "report.json", "tables.txt"],
        ) && same_files(
            &d.join("t4"),
            &d.join("t4b"),
            &["report.csv", "report.json", "tables.txt"],
        );

    let input = d.join("ex.csv");
    let svg = |name: &str| {
        run_fbox(&[
            "boxplot",
            input.to_str().unwrap(),
            "--out-svg",
            d.join(name).to_str().unwrap(),
        ])
    };
    let svgs = run_fbox(&["example", "--out", input.to_str().unwrap()])
        && svg("a.svg")
        && svg("b.svg")
        && fs::read(d.join("a.svg")).unwrap() == fs::read(d.join("b.svg")).unwrap();
    Outcome {
        id: 9,
        name: "determinism of reports and SVG across runs and thread counts",
        pass: reports && svgs,
        detail: format!("reports identical: {reports}; svg identical: {svgs}"),
    }
}

#[test]
fn acceptance() {
    let config = ExperimentConfig::desk();
    let started = Instant::now();
    let report = run_table_study(&config).unwrap();
    let elapsed = started.elapsed();

    let outcomes = [
        exact_rows(&report, elapsed),
        integrated_cell(&report),
        width_trend(&report),
        test_coverage(&report),
        whisker_coverage(&report),
        band_convexity(),
        oracles(),
        invariance(),
        determinism(),
    ];
    for o in &outcomes {
        println!(
            "{} criterion {}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
