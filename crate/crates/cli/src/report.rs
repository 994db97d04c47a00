//! Simulation outputs: a long-format CSV, a JSON dump and plain-text tables
//! with `mean (sd)` cells.

use std::fmt::Write as _;

use fbox_core::{ExperimentReport, Statistic};

use crate::error::{CliError, CliResult};
use crate::format::{fmt_fixed3, fmt_num, round_json};

/// One row per cell and statistic:
/// `variant,n,log_h,statistic,mean,sd`.
pub fn report_csv(report: &ExperimentReport) -> CliResult<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["variant", "n", "log_h", "statistic", "mean", "sd"])
        .map_err(CliError::runtime)?;
    for cell in &report.cells {
        for stat in Statistic::ALL {
            if let Some(s) = cell.statistic(stat) {
                wtr.write_record([
                    cell.variant.clone(),
                    cell.n.to_string(),
                    fmt_num(cell.log_h),
                    stat.name().to_string(),
                    fmt_num(s.mean),
                    fmt_num(s.sd),
                ])
                .map_err(CliError::runtime)?;
            }
        }
    }
    let bytes = wtr.into_inner().map_err(CliError::runtime)?;
    String::from_utf8(bytes).map_err(CliError::runtime)
}

/// The full report, floats rounded to six significant digits.
pub fn report_json(report: &ExperimentReport) -> CliResult<String> {
    let value = serde_json::to_value(report).map_err(CliError::runtime)?;
    let mut text = serde_json::to_string_pretty(&round_json(value)).map_err(CliError::runtime)?;
    text.push('\n');
    Ok(text)
}

/// One table per statistic. Rows are `(n, variant)`, columns are the log h
/// values, cells read `mean (sd)` with three decimals.
pub fn report_tables(report: &ExperimentReport) -> String {
    let cfg = &report.config;
    let variants: Vec<String> = cfg.variants.iter().map(ToString::to_string).collect();
    let name_width = variants.iter().map(String::len).max().unwrap_or(7).max(7);
    let mut out = String::new();
    for stat in Statistic::ALL {
        if stat == Statistic::TestCoverage && cfg.n_test == 0 {
            continue;
        }
        let _ = writeln!(out, "{}", stat.title());
        if stat == Statistic::TestCoverage {
            let _ = writeln!(out, "(test sample of {} functions)", cfg.n_test);
        }
        let cells: Vec<Vec<String>> = cfg
            .n_values
            .iter()
            .flat_map(|&n| {
                variants.iter().map(move |v| {
                    cfg.log_h_values
                        .iter()
                        .map(|&lh| {
                            report
                                .cell(v, n, lh)
                                .and_then(|c| c.statistic(stat))
                                .map_or_else(
                                    || "-".into(),
                                    |s| format!("{} ({})", fmt_fixed3(s.mean), fmt_fixed3(s.sd)),
                                )
                        })
                        .collect()
                })
            })
            .collect();
        let headers: Vec<String> = cfg
            .log_h_values
            .iter()
            .map(|lh| format!("log h = {}", fmt_num(*lh)))
            .collect();
        let col_width = cells
            .iter()
            .flatten()
            .chain(&headers)
            .map(String::len)
            .max()
            .unwrap_or(0);
        let _ = write!(out, "{:>6}  {:<name_width$}", "n", "variant");
        for h in &headers {
            let _ = write!(out, "  {h:>col_width$}");
        }
        out.push('\n');
        let mut rows = cells.iter();
        for &n in &cfg.n_values {
            for v in &variants {
                let _ = write!(out, "{n:>6}  {v:<name_width$}");
                for cell in rows.next().expect("one row per n and variant") {
                    let _ = write!(out, "  {cell:>col_width$}");
                }
                out.push('\n');
            }
        }
        out.push('\n');
    }
    out
}
