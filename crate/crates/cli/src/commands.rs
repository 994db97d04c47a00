//! Command-line definitions and the handlers behind each subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbox_core::{
    build_boxplot, depth_vector, generate_motivating_example_with, rank_by_depth,
    rank_with_refinement, run_table_study, BoxplotOptions, ExperimentConfig, FunctionalDepth,
    MotivatingExampleConfig, Refinement, RefinementScores, StudyVariant, UnivariateDepth,
    WhiskerRule, MOTIVATING_EXAMPLE_SEED,
};
use serde_json::json;

use crate::error::{io_error, CliError, CliResult};
use crate::format::{fmt_num, round_json};
use crate::io::{default_names, read_dataset, write_dataset};
use crate::report::{report_csv, report_json, report_tables};
use crate::svg::{render_boxplot, Style, WhiskerDisplay};

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "FBOX_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fbox",
    version,
    about = "Depth-based functional boxplots and their simulation study"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Depth, rank and refinement score of every function in a dataset.
    Depth(DepthArgs),
    /// Functional boxplot of a dataset as SVG and/or JSON.
    Boxplot(BoxplotArgs),
    /// Monte-Carlo coverage and width study on Gaussian-process samples.
    Simulate(SimulateArgs),
    /// Writes the local/global outlier example dataset.
    Example(ExampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DepthArg {
    Integrated,
    Infimal,
    Band,
    Mbd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Halfspace,
    Simplicial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RefineArg {
    None,
    Erl,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhiskerRuleArg {
    MedianAnchored,
    Fence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhiskerStyleArg {
    Inflated,
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Desk,
    Full,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV with header `t,f1,...,fn`.
    pub input: PathBuf,
    /// JSON grid weights: an array or `{"weights": [...]}`; normalized to sum 1.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "infimal")]
    pub depth: DepthArg,
    /// One-dimensional depth for integrated and infimal depths.
    #[arg(long, value_enum, default_value = "halfspace")]
    pub base: BaseArg,
    #[arg(long, value_enum, default_value = "none")]
    pub refine: RefineArg,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoxplotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "infimal")]
    pub depth: DepthArg,
    #[arg(long, value_enum, default_value = "halfspace")]
    pub base: BaseArg,
    #[arg(long, value_enum, default_value = "erl")]
    pub refine: RefineArg,
    /// Fraction of deepest functions spanning the central region.
    #[arg(long, default_value_t = fbox_core::DEFAULT_TAU)]
    pub tau: f64,
    /// Inflation factor of the whiskers band.
    #[arg(long, default_value_t = fbox_core::DEFAULT_FACTOR)]
    pub factor: f64,
    #[arg(long, value_enum, default_value = "median-anchored")]
    pub whisker_rule: WhiskerRuleArg,
    /// Whether the figure draws the inflated band or the non-outlier envelope.
    #[arg(long, value_enum, default_value = "inflated")]
    pub whisker_style: WhiskerStyleArg,
    /// `key = value` styling file for the figure.
    #[arg(long)]
    pub style: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    /// JSON report; printed to standard output when neither output is given.
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "desk")]
    pub profile: ProfileArg,
    /// Sample sizes, comma separated; overrides the profile.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Log bandwidths, comma separated; overrides the profile.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub logh: Option<Vec<f64>>,
    /// Variants such as integrated, infimal, erl, area, mbd; comma separated.
    #[arg(long, value_delimiter = ',')]
    pub variants: Option<Vec<String>>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Size of the independent test sample; 0 skips test coverage.
    #[arg(long)]
    pub ntest: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub factor: Option<f64>,
    /// Whisker construction; the study default is the fence rule.
    #[arg(long, value_enum, default_value = "fence")]
    pub whisker_rule: WhiskerRuleArg,
    /// Worker threads; falls back to FBOX_THREADS, then to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory receiving report.csv, report.json and tables.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long, default_value_t = MOTIVATING_EXAMPLE_SEED)]
    pub seed: u64,
    /// Dataset CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// CSV with `index,name,label` for every function.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub log_h: Option<f64>,
    #[arg(long)]
    pub local_amplitude: Option<f64>,
    #[arg(long)]
    pub bump_scale: Option<f64>,
    #[arg(long)]
    pub global_amplitude: Option<f64>,
    #[arg(long)]
    pub global_shrink: Option<f64>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Depth(args) => cmd_depth(&args),
        Command::Boxplot(args) => cmd_boxplot(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Example(args) => cmd_example(&args),
    }
}

fn functional_depth(depth: DepthArg, base: BaseArg) -> FunctionalDepth {
    let base = match base {
        BaseArg::Halfspace => UnivariateDepth::Halfspace,
        BaseArg::Simplicial => UnivariateDepth::Simplicial,
    };
    match depth {
        DepthArg::Integrated => FunctionalDepth::Integrated(base),
        DepthArg::Infimal => FunctionalDepth::Infimal(base),
        DepthArg::Band => FunctionalDepth::Band,
        DepthArg::Mbd => FunctionalDepth::MBD,
    }
}

fn whisker_rule(arg: WhiskerRuleArg) -> WhiskerRule {
    match arg {
        WhiskerRuleArg::MedianAnchored => WhiskerRule::MedianAnchored,
        WhiskerRuleArg::Fence => WhiskerRule::Fence,
    }
}

fn refinement(depth: FunctionalDepth, refine: RefineArg) -> CliResult<Option<Refinement>> {
    let r = match refine {
        RefineArg::None => None,
        RefineArg::Erl => Some(Refinement::Erl),
        RefineArg::Area => Some(Refinement::Area),
    };
    if r.is_some() && depth == FunctionalDepth::Band {
        return Err(CliError::usage(
            "--refine cannot be combined with --depth band",
        ));
    }
    Ok(r)
}

fn write_output(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| io_error(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(CliError::runtime)
        }
    }
}

pub fn cmd_depth(args: &DepthArgs) -> CliResult<()> {
    let kind = functional_depth(args.depth, args.base);
    let refine = refinement(kind, args.refine)?;
    let data = read_dataset(&args.input.input, args.input.weights.as_deref())?;
    let sample = &data.sample;
    let depth = depth_vector(sample, kind);
    let ranking = match refine {
        None => rank_by_depth(depth),
        Some(r) => rank_with_refinement(
            depth,
            RefinementScores {
                kind: r,
                scores: r.scores(sample)?,
            },
        )?,
    };

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["index", "depth", "rank", "refinement_score"])
        .map_err(CliError::runtime)?;
    for i in 0..sample.n() {
        let score = ranking
            .refinement
            .as_ref()
            .map_or(String::new(), |r| fmt_num(r.scores[i]));
        wtr.write_record([
            i.to_string(),
            fmt_num(ranking.depth.values[i]),
            fmt_num(ranking.ranks[i]),
            score,
        ])
        .map_err(CliError::runtime)?;
    }
    let bytes = wtr.into_inner().map_err(CliError::runtime)?;
    write_output(
        args.out.as_deref(),
        &String::from_utf8(bytes).map_err(CliError::runtime)?,
    )
}

pub fn cmd_boxplot(args: &BoxplotArgs) -> CliResult<()> {
    let depth = functional_depth(args.depth, args.base);
    let opts = BoxplotOptions {
        depth,
        refinement: refinement(depth, args.refine)?,
        tau: args.tau,
        factor: args.factor,
        whisker_rule: whisker_rule(args.whisker_rule),
    };
    let style = match &args.style {
        Some(p) => Style::parse(&std::fs::read_to_string(p).map_err(|e| io_error(p, e))?)?,
        None => Style::default(),
    };
    let data = read_dataset(&args.input.input, args.input.weights.as_deref())?;
    let bp = build_boxplot(&data.sample, &opts)?;

    if let Some(path) = &args.out_svg {
        let display = match args.whisker_style {
            WhiskerStyleArg::Inflated => WhiskerDisplay::Inflated,
            WhiskerStyleArg::Envelope => WhiskerDisplay::Envelope,
        };
        let svg = render_boxplot(&data.t, &data.sample, &bp, &style, display);
        write_output(Some(path), &svg)?;
    }
    if args.out_json.is_some() || args.out_svg.is_none() {
        let report = json!({
            "n": data.sample.n(),
            "m": data.sample.m(),
            "depth": depth.to_string(),
            "refinement": opts.refinement.map(Refinement::name),
            "tau": opts.tau,
            "factor": opts.factor,
            "whisker_rule": opts.whisker_rule,
            "median_index": bp.median_index,
            "median_name": data.names[bp.median_index],
            "central_size": bp.central_indices.len(),
            "central_indices": bp.central_indices,
            "outlier_indices": bp.outlier_indices,
            "outlier_names": bp.outlier_indices.iter().map(|&i| &data.names[i]).collect::<Vec<_>>(),
            "depth_values": bp.ranking.depth.values,
            "refinement_scores": bp.ranking.refinement.as_ref().map(|r| &r.scores),
            "outlyingness": bp.outlyingness,
            "t": data.t,
            "central": {"lower": bp.central.lower(), "upper": bp.central.upper()},
            "whiskers": {"lower": bp.whiskers.lower(), "upper": bp.whiskers.upper()},
        });
        let mut text =
            serde_json::to_string_pretty(&round_json(report)).map_err(CliError::runtime)?;
        text.push('\n');
        write_output(args.out_json.as_deref(), &text)?;
    }
    Ok(())
}

/// Thread count from the flag, else from the environment.
fn resolve_threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(v.trim().parse::<usize>().map_err(|_| {
                CliError::usage(format!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            })?),
            _ => None,
        },
    };
    if threads == Some(0) {
        return Err(CliError::usage("thread count must be at least 1"));
    }
    Ok(threads)
}

pub fn simulate_config(args: &SimulateArgs) -> CliResult<ExperimentConfig> {
    let mut config = match args.profile {
        ProfileArg::Desk => ExperimentConfig::desk(),
        ProfileArg::Full => ExperimentConfig::full(),
    };
    if let Some(n) = &args.n {
        config.n_values = n.clone();
    }
    if let Some(lh) = &args.logh {
        config.log_h_values = lh.clone();
    }
    if let Some(v) = &args.variants {
        config.variants = v
            .iter()
            .map(|s| s.parse::<StudyVariant>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(r) = args.runs {
        config.runs = r;
    }
    if let Some(t) = args.ntest {
        config.n_test = t;
    }
    if let Some(g) = args.grid {
        config.grid_size = g;
    }
    if let Some(t) = args.tau {
        config.tau = t;
    }
    if let Some(f) = args.factor {
        config.factor = f;
    }
    config.seed = args.seed;
    config.whisker_rule = whisker_rule(args.whisker_rule);
    config.validate()?;
    Ok(config)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let config = simulate_config(args)?;
    let threads = resolve_threads(args.threads)?;
    let started = Instant::now();
    let report = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(CliError::runtime)?
            .install(|| run_table_study(&config))?,
        None => run_table_study(&config)?,
    };
    std::fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let tables = report_tables(&report);
    write_output(Some(&args.out.join("report.csv")), &report_csv(&report)?)?;
    write_output(Some(&args.out.join("report.json")), &report_json(&report)?)?;
    write_output(Some(&args.out.join("tables.txt")), &tables)?;
    write_output(None, &tables)?;
    eprintln!(
        "fbox: {} cells x {} runs in {:.1} s, written to {}",
        report.cells.len(),
        config.runs,
        started.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_example(args: &ExampleArgs) -> CliResult<()> {
    let mut config = MotivatingExampleConfig::default();
    if let Some(v) = args.log_h {
        config.log_h = v;
    }
    if let Some(v) = args.local_amplitude {
        config.local_amplitude = v;
    }
    if let Some(v) = args.bump_scale {
        if !(v > 0.0) {
            return Err(CliError::usage("--bump-scale must be positive"));
        }
        config.bump_scale = v;
    }
    if let Some(v) = args.global_amplitude {
        config.global_amplitude = v;
    }
    if let Some(v) = args.global_shrink {
        config.global_shrink = v;
    }
    let ex = generate_motivating_example_with(args.seed, &config)?;
    let names = default_names(ex.sample.n());
    let mut buf = Vec::new();
    write_dataset(&mut buf, ex.sample.grid().points(), &names, &ex.sample)?;
    std::fs::write(&args.out, buf).map_err(|e| io_error(&args.out, e))?;
    if let Some(path) = &args.labels {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["index", "name", "label"])
            .map_err(CliError::runtime)?;
        for (i, label) in ex.labels.iter().enumerate() {
            let label = serde_json::to_value(label).map_err(CliError::runtime)?;
            wtr.write_record([
                i.to_string(),
                names[i].clone(),
                label.as_str().unwrap_or_default().to_string(),
            ])
            .map_err(CliError::runtime)?;
        }
        let bytes = wtr.into_inner().map_err(CliError::runtime)?;
        std::fs::write(path, bytes).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}
