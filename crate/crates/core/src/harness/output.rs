//! CSV, JSON and SVG renderings of experiment results.
//!
//! Every file embeds the experiment's resolved configuration so it can be
//! reproduced from the file alone.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{GeoError, Result};

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub experiment: String,
    pub n: usize,
    pub alpha_or_ksigma: f64,
    pub shrink_point: String,
    pub estimator: String,
    pub mean_loss: f64,
    pub std_error: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Everything an experiment run produces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub experiment: String,
    pub config: serde_json::Value,
    pub rows: Vec<CsvRow>,
    #[serde(skip)]
    pub report: String,
    /// False when a property the experiment asserts did not hold.
    pub passed: bool,
}

/// CSV text with the configuration as leading `# ` comment lines.
pub fn render_csv(output: &ExperimentOutput) -> Result<String> {
    let mut text = String::new();
    let config =
        serde_json::to_string(&output.config).map_err(|e| GeoError::domain(e.to_string()))?;
    let _ = writeln!(text, "# experiment: {}", output.experiment);
    let _ = writeln!(text, "# config: {config}");
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &output.rows {
        writer
            .serialize(row)
            .map_err(|e| GeoError::domain(e.to_string()))?;
    }
    if output.rows.is_empty() {
        writer
            .write_record([
                "experiment",
                "n",
                "alpha_or_ksigma",
                "shrink_point",
                "estimator",
                "mean_loss",
                "std_error",
                "replicates",
                "seed",
            ])
            .map_err(|e| GeoError::domain(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| GeoError::domain(e.to_string()))?;
    text.push_str(&String::from_utf8(bytes).map_err(|e| GeoError::domain(e.to_string()))?);
    Ok(text)
}

pub fn render_json(output: &ExperimentOutput) -> Result<String> {
    serde_json::to_string_pretty(output).map_err(|e| GeoError::domain(e.to_string()))
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Line plot of `mean_loss` against `n`, one series per
/// `(alpha_or_ksigma, shrink_point, estimator)`. Returns `None` when there is
/// nothing to plot against `n`.
pub fn render_svg(output: &ExperimentOutput) -> Option<String> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &output.rows {
        let key = format!("{} {} {}", r.alpha_or_ksigma, r.shrink_point, r.estimator);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((r.n as f64, r.mean_loss)),
            None => series.push((key, vec![(r.n as f64, r.mean_loss)])),
        }
    }
    series.retain(|(_, pts)| pts.len() > 1);
    if series.is_empty() {
        return None;
    }
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (w, h, left, top, plot_w, plot_h) = (820.0, 480.0, 60.0, 30.0, 520.0, 400.0);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{left}" y="18">{} (mean_loss against n)</text>"#,
        output.experiment
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * f64::from(i) / 4.0;
        let _ = writeln!(svg, r#"<text x="4" y="{:.1}">{:.3}</text>"#, sy(y) + 4.0, y);
        let x = x0 + (x1 - x0) * f64::from(i) / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{:.0}</text>"#,
            sx(x) - 6.0,
            top + plot_h + 16.0,
            x
        );
    }
    for (i, (key, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let dash = if i >= PALETTE.len() {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}"{dash} points="{}"/>"#,
            path.join(" ")
        );
        let ly = top + 12.0 * i as f64 + 8.0;
        let _ = writeln!(
            svg,
            r#"<line x1="600" y1="{ly:.1}" x2="620" y2="{ly:.1}" stroke="{colour}"{dash}/>"#
        );
        let _ = writeln!(svg, r#"<text x="625" y="{:.1}">{}</text>"#, ly + 4.0, key);
    }
    svg.push_str("</svg>\n");
    Some(svg)
}
