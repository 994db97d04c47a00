//! Deterministic SVG rendering of a functional boxplot.
//!
//! Output depends only on the inputs: no timestamps, fixed element order and
//! coordinates printed with two decimals.

use std::fmt::Write as _;

use fbox_core::{Boxplot, FunctionalSample};

use crate::error::{CliError, CliResult};
use crate::format::fmt_num;

/// Figure styling. Every field can be set from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub font_size: f64,
    pub background: String,
    pub title: String,
    pub curve_color: String,
    pub curve_width: f64,
    pub central_fill: String,
    pub central_opacity: f64,
    pub median_color: String,
    pub median_width: f64,
    pub whisker_color: String,
    pub whisker_width: f64,
    pub outlier_color: String,
    pub outlier_width: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 500.0,
            font_size: 12.0,
            background: "#ffffff".into(),
            title: String::new(),
            curve_color: "#a0a0a0".into(),
            curve_width: 0.8,
            central_fill: "#f5deb3".into(),
            central_opacity: 0.85,
            median_color: "#ff8c00".into(),
            median_width: 3.0,
            whisker_color: "#ff8c00".into(),
            whisker_width: 2.0,
            outlier_color: "#1f4fd8".into(),
            outlier_width: 2.0,
        }
    }
}

impl Style {
    /// Parses `key = value` lines on top of the defaults. Blank lines and
    /// lines starting with `#` or `;` are skipped.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut style = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let bad = |why: String| CliError::usage(format!("style line {}: {why}", k + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| {
                        bad(format!("'{key}' needs a nonnegative number, got '{value}'"))
                    })
            };
            match key {
                "width" => style.width = num()?,
                "height" => style.height = num()?,
                "font_size" => style.font_size = num()?,
                "background" => style.background = value.into(),
                "title" => style.title = value.into(),
                "curve_color" => style.curve_color = value.into(),
                "curve_width" => style.curve_width = num()?,
                "central_fill" => style.central_fill = value.into(),
                "central_opacity" => style.central_opacity = num()?.min(1.0),
                "median_color" => style.median_color = value.into(),
                "median_width" => style.median_width = num()?,
                "whisker_color" => style.whisker_color = value.into(),
                "whisker_width" => style.whisker_width = num()?,
                "outlier_color" => style.outlier_color = value.into(),
                "outlier_width" => style.outlier_width = num()?,
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        if style.width < 200.0 || style.height < 150.0 {
            return Err(CliError::usage("style: figure must be at least 200 x 150"));
        }
        Ok(style)
    }
}

/// Which band the whisker lines trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WhiskerDisplay {
    /// The inflated central region used for outlier detection.
    #[default]
    Inflated,
    /// The envelope of all functions not flagged as outliers.
    Envelope,
}

const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 44.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)
    }

    fn py(&self, y: f64) -> f64 {
        self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)
    }

    fn points(&self, t: &[f64], ys: &[f64]) -> String {
        let mut s = String::with_capacity(t.len() * 16);
        for (i, (&x, &y)) in t.iter().zip(ys).enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", self.px(x), self.py(y));
        }
        s
    }
}

/// Renders the boxplot of `sample` drawn against the time axis `t`.
pub fn render_boxplot(
    t: &[f64],
    sample: &FunctionalSample,
    boxplot: &Boxplot,
    style: &Style,
    whiskers: WhiskerDisplay,
) -> String {
    let is_outlier = {
        let mut flags = vec![false; sample.n()];
        for &i in &boxplot.outlier_indices {
            flags[i] = true;
        }
        flags
    };
    let (wl, wu) = match whiskers {
        WhiskerDisplay::Inflated => (
            boxplot.whiskers.lower().to_vec(),
            boxplot.whiskers.upper().to_vec(),
        ),
        WhiskerDisplay::Envelope => envelope(sample, &is_outlier),
    };

    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in sample.values().iter().chain(&wl).chain(&wu) {
        if v.is_finite() {
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
    }
    if y1 - y0 < 1e-12 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.04 * (y1 - y0);
    let frame = Frame {
        x0: t[0],
        x1: t[t.len() - 1],
        y0: y0 - pad,
        y1: y1 + pad,
        left: MARGIN_LEFT,
        right: style.width - MARGIN_RIGHT,
        top: MARGIN_TOP,
        bottom: style.height - MARGIN_BOTTOM,
    };

    let mut svg = String::new();
    let fs = style.font_size;
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">
<rect x="0" y="0" width="{w}" height="{h}" fill="{bg}"/>"#,
        w = fmt_num(style.width),
        h = fmt_num(style.height),
        fs = fmt_num(fs),
        bg = escape(&style.background),
    );
    if !style.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="{}">{}</text>"#,
            style.width / 2.0,
            MARGIN_TOP - 10.0,
            fmt_num(fs * 1.25),
            escape(&style.title)
        );
    }
    draw_axes(&mut svg, &frame, fs);

    let _ = writeln!(
        svg,
        r#"<g id="curves" fill="none" stroke="{}" stroke-width="{}">"#,
        escape(&style.curve_color),
        fmt_num(style.curve_width)
    );
    for (i, row) in sample.rows().enumerate() {
        if !is_outlier[i] {
            let _ = writeln!(svg, r#"<polyline points="{}"/>"#, frame.points(t, row));
        }
    }
    svg.push_str("</g>\n");

    let upper = frame.points(t, boxplot.central.upper());
    let lower_rev: Vec<f64> = boxplot.central.lower().iter().rev().copied().collect();
    let t_rev: Vec<f64> = t.iter().rev().copied().collect();
    let _ = writeln!(
        svg,
        r#"<polygon id="central" points="{} {}" fill="{}" fill-opacity="{}" stroke="{}" stroke-width="1"/>"#,
        upper,
        frame.points(&t_rev, &lower_rev),
        escape(&style.central_fill),
        fmt_num(style.central_opacity),
        escape(&style.central_fill),
    );

    let _ = writeln!(
        svg,
        r#"<g id="whiskers" fill="none" stroke="{}" stroke-width="{}" stroke-dasharray="6 3">"#,
        escape(&style.whisker_color),
        fmt_num(style.whisker_width)
    );
    let _ = writeln!(svg, r#"<polyline points="{}"/>"#, frame.points(t, &wl));
    let _ = writeln!(svg, r#"<polyline points="{}"/>"#, frame.points(t, &wu));
    svg.push_str("</g>\n");

    let _ = writeln!(
        svg,
        r#"<g id="outliers" fill="none" stroke="{}" stroke-width="{}">"#,
        escape(&style.outlier_color),
        fmt_num(style.outlier_width)
    );
    for &i in &boxplot.outlier_indices {
        let _ = writeln!(
            svg,
            r#"<polyline points="{}"/>"#,
            frame.points(t, sample.row(i))
        );
    }
    svg.push_str("</g>\n");

    let _ = writeln!(
        svg,
        r#"<polyline id="median" points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
        frame.points(t, sample.row(boxplot.median_index)),
        escape(&style.median_color),
        fmt_num(style.median_width)
    );

    draw_legend(&mut svg, &frame, style);
    svg.push_str("</svg>\n");
    svg
}

fn envelope(sample: &FunctionalSample, is_outlier: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let m = sample.m();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for (i, row) in sample.rows().enumerate() {
        if !is_outlier[i] {
            for (k, &v) in row.iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
    }
    (lo, hi)
}

fn draw_axes(svg: &mut String, f: &Frame, fs: f64) {
    let _ = writeln!(
        svg,
        r##"<g id="axes" stroke="#333333" stroke-width="1" fill="none">"##
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
        f.left,
        f.top,
        f.right - f.left,
        f.bottom - f.top
    );
    let xt = nice_ticks(f.x0, f.x1);
    let yt = nice_ticks(f.y0, f.y1);
    for &x in &xt {
        let px = f.px(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}"/>"#,
            f.bottom,
            f.bottom + 5.0
        );
    }
    for &y in &yt {
        let py = f.py(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}"/>"#,
            f.left - 5.0,
            f.left
        );
    }
    svg.push_str("</g>\n");
    let _ = writeln!(svg, r##"<g id="tick-labels" fill="#333333">"##);
    for &x in &xt {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            f.px(x),
            f.bottom + 7.0 + fs,
            fmt_num(x)
        );
    }
    for &y in &yt {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            f.left - 8.0,
            f.py(y) + fs / 3.0,
            fmt_num(y)
        );
    }
    svg.push_str("</g>\n");
}

fn draw_legend(svg: &mut String, f: &Frame, style: &Style) {
    let fs = style.font_size;
    let entries = [
        (
            "sample",
            style.curve_color.as_str(),
            style.curve_width,
            false,
        ),
        ("central region", style.central_fill.as_str(), 8.0, false),
        (
            "median",
            style.median_color.as_str(),
            style.median_width,
            false,
        ),
        (
            "whiskers",
            style.whisker_color.as_str(),
            style.whisker_width,
            true,
        ),
        (
            "outliers",
            style.outlier_color.as_str(),
            style.outlier_width,
            false,
        ),
    ];
    let row = fs * 1.5;
    let width = 28.0 + fs * 8.0;
    let x = f.right - width - 8.0;
    let y = f.top + 8.0;
    let _ = writeln!(
        svg,
        r##"<g id="legend"><rect x="{x:.2}" y="{y:.2}" width="{width:.2}" height="{:.2}" fill="#ffffff" fill-opacity="0.85" stroke="#999999"/>"##,
        row * entries.len() as f64 + 6.0
    );
    for (k, (label, color, w, dashed)) in entries.iter().enumerate() {
        let cy = y + 3.0 + row * (k as f64 + 0.5);
        let dash = if *dashed {
            r#" stroke-dasharray="6 3""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="{}" stroke-width="{}"{dash}/>"#,
            x + 6.0,
            x + 24.0,
            escape(color),
            fmt_num(*w)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
            x + 30.0,
            cy + fs / 3.0
        );
    }
    svg.push_str("</g>\n");
}

/// Round tick positions (1, 2 or 5 times a power of ten apart) inside `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|k| k * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| {
            let v = k as f64 * step;
            // snap -0 and rounding noise such as 0.30000000000000004
            if v == 0.0 {
                0.0
            } else {
                crate::format::round6(v)
            }
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use fbox_core::{build_boxplot, BoxplotOptions, Grid};

    #[test]
    fn ticks_are_round() {
        assert_eq!(nice_ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
        assert_eq!(nice_ticks(-3.2, 4.9), vec![-2.0, 0.0, 2.0, 4.0]);
        assert_eq!(nice_ticks(1.0, 1.0), vec![1.0]);
    }

    #[test]
    fn style_parsing() {
        let s = Style::parse("# comment\nmedian_color = #00ff00\nwidth=640\n\ntitle = A & B\n")
            .unwrap();
        assert_eq!(s.median_color, "#00ff00");
        assert_eq!(s.width, 640.0);
        assert_eq!(s.title, "A & B");
        assert!(Style::parse("colour = red").is_err());
        assert!(Style::parse("width = -3").is_err());
        assert!(Style::parse("no equals sign").is_err());
        assert!(Style::parse("width = 10").is_err());
    }

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let grid = Grid::uniform(5).unwrap();
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| (0..5).map(|k| (i * k) as f64 * 0.1 - i as f64).collect())
            .collect();
        let sample = FunctionalSample::from_rows(grid, &rows).unwrap();
        let bp = build_boxplot(&sample, &BoxplotOptions::default()).unwrap();
        let t = [0.0, 1.0, 2.0, 3.0, 4.0];
        let style = Style {
            title: "x < y".into(),
            ..Style::default()
        };
        let a = render_boxplot(&t, &sample, &bp, &style, WhiskerDisplay::Inflated);
        let b = render_boxplot(&t, &sample, &bp, &style, WhiskerDisplay::Inflated);
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("x &lt; y"));
        assert_eq!(a.matches("<svg").count(), 1);
        let env = render_boxplot(&t, &sample, &bp, &style, WhiskerDisplay::Envelope);
        assert_ne!(a, env);
    }
}
