//! Depth-based functional boxplots on a common grid.
//!
//! Univariate halfspace and simplicial depths are lifted to functions by
//! integration or by taking the infimum over the grid. Because infimal depths
//! tie heavily, two refinements break ties: the extreme rank length (`erl`)
//! and the area under the continuous pointwise rank (`area`). A boxplot keeps
//! the band of the deepest `ceil(tau n)` curves as its central region and
//! inflates it about the median for the whiskers.
//!
//! The [`gpsim`] and [`experiments`] modules simulate Gaussian-process samples
//! and reproduce the coverage study.

// Negated comparisons double as NaN rejection in parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boxplot;
pub mod depth1d;
pub mod error;
pub mod experiments;
pub mod fdepth;
pub mod gpsim;
pub mod grid;
pub mod ranking;

pub use boxplot::{
    boxplot_from_ranking, build_boxplot, central_coverage, central_size, check_band_convexity,
    whisker_coverage, Boxplot, BoxplotOptions, WhiskerRule, DEFAULT_FACTOR, DEFAULT_TAU,
};
pub use depth1d::{
    check_md, halfspace_depth, md_threshold_exists, median_set, simplicial_depth, MedianSet,
    UnivariateDepth, UnivariateSample,
};
pub use error::{Error, Result};
pub use experiments::{
    find_simplicial_md_witness, generate_motivating_example, generate_motivating_example_with,
    run_table_study, CellReport, DiscreteDistribution, ExperimentConfig, ExperimentReport,
    MotivatingExample, MotivatingExampleConfig, OutlierLabel, Statistic, StudyVariant, Summary,
    MOTIVATING_EXAMPLE_SEED,
};
pub use fdepth::{
    band_depth, depth_of, depth_vector, infimal_depth, integrated_depth, mbd, pointwise_depths,
    DepthVector, FunctionalDepth, Marginals, PointwiseDepthMatrix,
};
pub use gpsim::{stream_rng, GpModel, GpSampler, PolarNormal};
pub use grid::{Band, FunctionalSample, Grid, DEFAULT_GRID_SIZE};
pub use ranking::{
    area_scores, erl_scores, fence_outlyingness_index, outlyingness_index,
    pointwise_continuous_ranks, pointwise_extreme_ranks, rank_by_depth, rank_with_refinement,
    DepthRanking, Refinement, RefinementScores,
};
