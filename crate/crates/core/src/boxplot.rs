//! Depth-based functional boxplots: median function, central region,
//! whiskers band, outlier flags, plus an empirical band-convexity check.

use serde::{Deserialize, Serialize};

use crate::depth1d::UnivariateDepth;
use crate::error::{Error, Result};
use crate::fdepth::{depth_vector, FunctionalDepth};
use crate::grid::{Band, FunctionalSample};
use crate::ranking::{
    fence_outlyingness_index, outlyingness_index, rank_by_depth, rank_with_refinement,
    DepthRanking, Refinement, RefinementScores,
};

pub const DEFAULT_TAU: f64 = 0.5;
pub const DEFAULT_FACTOR: f64 = 4.0;

/// How the central region is widened into the whiskers band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhiskerRule {
    /// `m - c (m - lower)`, `m + c (upper - m)` around the median function.
    #[default]
    MedianAnchored,
    /// `lower - (c - 1)/2 w`, `upper + (c - 1)/2 w` with `w` the pointwise width.
    Fence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxplotOptions {
    pub depth: FunctionalDepth,
    pub refinement: Option<Refinement>,
    pub tau: f64,
    pub factor: f64,
    pub whisker_rule: WhiskerRule,
}

impl Default for BoxplotOptions {
    fn default() -> Self {
        Self {
            depth: FunctionalDepth::Infimal(UnivariateDepth::Halfspace),
            refinement: Some(Refinement::Erl),
            tau: DEFAULT_TAU,
            factor: DEFAULT_FACTOR,
            whisker_rule: WhiskerRule::MedianAnchored,
        }
    }
}

impl BoxplotOptions {
    pub fn new(depth: FunctionalDepth, refinement: Option<Refinement>) -> Self {
        Self {
            depth,
            refinement,
            ..Self::default()
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n < 4 {
            return Err(Error::InvalidSample(format!(
                "a boxplot needs at least 4 functions, got {n}"
            )));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if !(self.factor >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "inflation factor must be >= 1, got {}",
                self.factor
            )));
        }
        if self.refinement.is_some() && self.depth == FunctionalDepth::Band {
            return Err(Error::InvalidParameter(
                "band depth cannot be combined with a refinement".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boxplot {
    pub options: BoxplotOptions,
    pub ranking: DepthRanking,
    pub median_index: usize,
    /// Rows spanning the central region, deepest first.
    pub central_indices: Vec<usize>,
    pub central: Band,
    pub whiskers: Band,
    pub outlyingness: Vec<f64>,
    pub outlier_indices: Vec<usize>,
}

/// `ceil(tau n)`, guarded against `tau n` landing a rounding error above an
/// integer.
pub fn central_size(tau: f64, n: usize) -> usize {
    let k = (tau * n as f64 - 1e-9).ceil() as usize;
    k.clamp(1, n)
}

fn rank_sample(sample: &FunctionalSample, opts: &BoxplotOptions) -> Result<DepthRanking> {
    let depth = depth_vector(sample, opts.depth);
    match opts.refinement {
        None => Ok(rank_by_depth(depth)),
        Some(kind) => {
            let scores = kind.scores(sample)?;
            rank_with_refinement(depth, RefinementScores { kind, scores })
        }
    }
}

/// Rows forming the central region. Without a refinement every function
/// tied with the cut depth enters; with one, exactly `ceil(tau n)` do.
fn select_central(ranking: &DepthRanking, tau: f64) -> Vec<usize> {
    let k = central_size(tau, ranking.order.len());
    if ranking.refinement.is_some() {
        return ranking.order[..k].to_vec();
    }
    let d = &ranking.depth.values;
    let cut = d[ranking.order[k - 1]];
    ranking
        .order
        .iter()
        .copied()
        .take_while(|&i| d[i] >= cut)
        .collect()
}

pub fn build_boxplot(sample: &FunctionalSample, opts: &BoxplotOptions) -> Result<Boxplot> {
    opts.validate(sample.n())?;
    let ranking = rank_sample(sample, opts)?;
    boxplot_from_ranking(sample, ranking, opts)
}

/// Assembles a boxplot from a precomputed ranking of `sample`.
pub fn boxplot_from_ranking(
    sample: &FunctionalSample,
    ranking: DepthRanking,
    opts: &BoxplotOptions,
) -> Result<Boxplot> {
    opts.validate(sample.n())?;
    if ranking.order.len() != sample.n() {
        return Err(Error::LengthMismatch {
            expected: sample.n(),
            got: ranking.order.len(),
        });
    }
    let central_indices = select_central(&ranking, opts.tau);
    let central = Band::of(sample, &central_indices)?;
    let median_index = ranking.median();
    let median = sample.row(median_index);
    let (whiskers, outlyingness) = match opts.whisker_rule {
        WhiskerRule::MedianAnchored => {
            let w = central.inflate(median, opts.factor)?;
            let o = sample
                .rows()
                .map(|r| outlyingness_index(&central, median, r))
                .collect::<Result<Vec<_>>>()?;
            (w, o)
        }
        WhiskerRule::Fence => {
            let w = central.fence(opts.factor)?;
            let o = sample
                .rows()
                .map(|r| fence_outlyingness_index(&central, median, r))
                .collect::<Result<Vec<_>>>()?;
            (w, o)
        }
    };
    let outlier_indices = outlyingness
        .iter()
        .enumerate()
        .filter(|(_, &o)| o > opts.factor)
        .map(|(i, _)| i)
        .collect();
    Ok(Boxplot {
        options: *opts,
        ranking,
        median_index,
        central_indices,
        central,
        whiskers,
        outlyingness,
        outlier_indices,
    })
}

fn coverage(band: &Band, sample: &FunctionalSample) -> Result<f64> {
    if band.grid() != sample.grid() {
        return Err(Error::GridMismatch);
    }
    let inside = sample.rows().filter(|r| band.contains_unchecked(r)).count();
    Ok(100.0 * inside as f64 / sample.n() as f64)
}

/// Percentage of rows of `sample` lying entirely inside the central region.
pub fn central_coverage(boxplot: &Boxplot, sample: &FunctionalSample) -> Result<f64> {
    coverage(&boxplot.central, sample)
}

/// Percentage of rows of `sample` lying entirely inside the whiskers band.
pub fn whisker_coverage(boxplot: &Boxplot, sample: &FunctionalSample) -> Result<f64> {
    coverage(&boxplot.whiskers, sample)
}

/// Rows ranked strictly below every row used to build the central region but
/// which still lie inside it. Ranks follow the refinement when one is set.
/// Empty iff band convexity holds on this sample.
pub fn check_band_convexity(
    sample: &FunctionalSample,
    opts: &BoxplotOptions,
) -> Result<Vec<usize>> {
    opts.validate(sample.n())?;
    let ranking = rank_sample(sample, opts)?;
    let selected = select_central(&ranking, opts.tau);
    let central = Band::of(sample, &selected)?;
    let r = &ranking.ranks;
    let worst = selected
        .iter()
        .map(|&i| r[i])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((0..sample.n())
        .filter(|&i| r[i] > worst && central.contains_unchecked(sample.row(i)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn sample(rows: &[Vec<f64>]) -> FunctionalSample {
        FunctionalSample::from_rows(Grid::uniform(rows[0].len()).unwrap(), rows).unwrap()
    }

    fn ladder(n: usize) -> FunctionalSample {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![i as f64, (i * 7 % n) as f64, -(i as f64)])
            .collect();
        sample(&rows)
    }

    #[test]
    fn central_size_rounds_up() {
        assert_eq!(central_size(0.5, 120), 60);
        assert_eq!(central_size(0.5, 5), 3);
        assert_eq!(central_size(0.1, 30), 3);
        assert_eq!(central_size(0.01, 10), 1);
    }

    #[test]
    fn rejects_bad_options() {
        let s = ladder(3);
        assert!(build_boxplot(&s, &BoxplotOptions::default()).is_err());
        let s = ladder(6);
        let mut o = BoxplotOptions {
            tau: 1.0,
            ..BoxplotOptions::default()
        };
        assert!(build_boxplot(&s, &o).is_err());
        o.tau = 0.5;
        o.factor = 0.9;
        assert!(build_boxplot(&s, &o).is_err());
        let o = BoxplotOptions::new(FunctionalDepth::Band, Some(Refinement::Erl));
        assert!(build_boxplot(&s, &o).is_err());
    }

    #[test]
    fn identical_rows_give_degenerate_boxplot() {
        let s = sample(&vec![vec![1.0, 2.0, 0.5]; 4]);
        for opts in [
            BoxplotOptions::default(),
            BoxplotOptions::new(FunctionalDepth::MBD, None),
            BoxplotOptions::new(FunctionalDepth::Infimal(UnivariateDepth::Halfspace), None),
        ] {
            let b = build_boxplot(&s, &opts).unwrap();
            assert_eq!(b.central, b.whiskers);
            assert_eq!(b.central.lower(), b.central.upper());
            assert!(b.outlier_indices.is_empty());
            assert_eq!(b.median_index, 0);
            assert!(check_band_convexity(&s, &opts).unwrap().is_empty());
        }
    }

    #[test]
    fn refinement_selects_exactly_half() {
        let s = ladder(10);
        let b = build_boxplot(&s, &BoxplotOptions::default()).unwrap();
        assert_eq!(b.central_indices.len(), 5);
        assert_eq!(central_coverage(&b, &s).unwrap(), 50.0);
        assert!(b.central.is_within(&b.whiskers));
        assert!(b.central.contains(s.row(b.median_index)).unwrap());
    }

    #[test]
    fn ties_at_cut_all_enter_without_refinement() {
        // five parallel lines: infimal halfspace depths 1/5, 2/5, 3/5, 2/5, 1/5
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64; 3]).collect();
        let s = sample(&rows);
        let mut opts =
            BoxplotOptions::new(FunctionalDepth::Infimal(UnivariateDepth::Halfspace), None);
        opts.tau = 0.4;
        let b = build_boxplot(&s, &opts).unwrap();
        assert_eq!(b.central_indices, vec![2, 1, 3]);
        opts.refinement = Some(Refinement::Erl);
        let b = build_boxplot(&s, &opts).unwrap();
        assert_eq!(b.central_indices, vec![2, 1]);
    }

    #[test]
    fn outliers_follow_index_threshold() {
        let mut rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * 0.1; 4]).collect();
        rows.push(vec![0.3, 0.3, 50.0, 0.3]);
        let s = sample(&rows);
        let b = build_boxplot(&s, &BoxplotOptions::default()).unwrap();
        assert_eq!(b.outlier_indices, vec![8]);
        for (i, &o) in b.outlyingness.iter().enumerate() {
            assert_eq!(o > b.options.factor, b.outlier_indices.contains(&i));
            if o <= b.options.factor {
                assert!(b.whiskers.contains(s.row(i)).unwrap());
            }
        }
        assert!((whisker_coverage(&b, &s).unwrap() - 100.0 * 8.0 / 9.0).abs() < 1e-12);

        let opts = BoxplotOptions {
            factor: 1e9,
            ..BoxplotOptions::default()
        };
        let b = build_boxplot(&s, &opts).unwrap();
        assert_eq!(whisker_coverage(&b, &s).unwrap(), 100.0);
    }

    #[test]
    fn factor_one_whiskers_equal_central() {
        let s = ladder(9);
        let opts = BoxplotOptions {
            factor: 1.0,
            ..BoxplotOptions::default()
        };
        let b = build_boxplot(&s, &opts).unwrap();
        assert_eq!(b.central, b.whiskers);
    }

    #[test]
    fn coverage_needs_matching_grid() {
        let s = ladder(8);
        let b = build_boxplot(&s, &BoxplotOptions::default()).unwrap();
        let other =
            FunctionalSample::from_rows(Grid::uniform(4).unwrap(), &[vec![0.0; 4]]).unwrap();
        assert_eq!(central_coverage(&b, &other), Err(Error::GridMismatch));
        let shifted = s.map_values(|_, x| x + 1000.0).unwrap();
        assert_eq!(central_coverage(&b, &shifted).unwrap(), 0.0);
    }

    #[test]
    fn fence_rule_flags_by_fence_band() {
        let mut rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * 0.1; 4]).collect();
        rows.push(vec![0.3, 0.3, 50.0, 0.3]);
        let s = sample(&rows);
        let opts = BoxplotOptions {
            whisker_rule: WhiskerRule::Fence,
            ..BoxplotOptions::default()
        };
        let b = build_boxplot(&s, &opts).unwrap();
        assert_eq!(b.outlier_indices, vec![8]);
        for i in 0..s.n() {
            assert_eq!(
                b.whiskers.contains(s.row(i)).unwrap(),
                !b.outlier_indices.contains(&i)
            );
        }
    }
}
