//! Accuracy-vs-noise line charts as standalone SVG.
//!
//! Output depends only on the input CSV bytes: coordinates are printed with
//! fixed precision and series keep their order of first appearance.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::results::{read_results, ResultRow};
use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// One plotted line: mean accuracy over seeds at each alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(alpha, mean accuracy)` sorted by alpha.
    pub points: Vec<(f64, f64)>,
}

fn series_label(row: &ResultRow) -> String {
    if row.mitigation == "none" {
        row.estimator.clone()
    } else {
        format!("{} + {}", row.estimator, row.mitigation)
    }
}

/// Groups rows by estimator and mitigation and averages `1 - risk` per alpha.
/// Failed rows are skipped. Returns the shared class count and the series.
pub fn accuracy_series(rows: &[ResultRow]) -> Result<(usize, Vec<Series>)> {
    let usable: Vec<&ResultRow> = rows.iter().filter(|r| r.risk.is_some()).collect();
    let first = usable.first().ok_or_else(|| Error::Domain("results contain no completed rows to plot".into()))?;
    let k = first.k;
    if let Some(other) = usable.iter().find(|r| r.k != k) {
        return Err(Error::Domain(format!("rows mix class counts K = {k} and K = {}", other.k)));
    }
    // label -> list of (alpha, sum, count), in first-appearance order.
    type Sums = Vec<(f64, f64, usize)>;
    let mut acc: Vec<(String, Sums)> = Vec::new();
    for r in usable {
        let label = series_label(r);
        let idx = match acc.iter().position(|(l, _)| *l == label) {
            Some(i) => i,
            None => {
                acc.push((label, Vec::new()));
                acc.len() - 1
            }
        };
        let pts = &mut acc[idx].1;
        let a = 1.0 - r.risk.expect("filtered");
        match pts.iter_mut().find(|p| p.0 == r.alpha) {
            Some(p) => {
                p.1 += a;
                p.2 += 1;
            }
            None => pts.push((r.alpha, a, 1)),
        }
    }
    let series = acc
        .into_iter()
        .map(|(label, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label, points: pts.into_iter().map(|(x, s, n)| (x, s / n as f64)).collect() }
        })
        .collect();
    Ok((k, series))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn px(alpha: f64) -> f64 {
    LEFT + alpha * (WIDTH - LEFT - RIGHT)
}

fn py(acc: f64) -> f64 {
    HEIGHT - BOTTOM - acc * (HEIGHT - TOP - BOTTOM)
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Renders results CSV text to SVG.
pub fn render_plot(csv_text: &str) -> Result<String> {
    if csv_text.trim().is_empty() {
        return Err(Error::Domain("results file is empty".into()));
    }
    let rows = read_results(csv_text)?;
    let (k, series) = accuracy_series(&rows)?;
    Ok(render_series(k, &series, &sha256_hex(csv_text.as_bytes())))
}

/// Draws the series with dotted reference lines at `(K-1)/K` and `1/(4(K-1))`.
pub fn render_series(k: usize, series: &[Series], source_sha256: &str) -> String {
    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(
        &mut s,
        format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        ),
    );
    w(&mut s, format!("<metadata>source-csv-sha256:{source_sha256}</metadata>"));
    w(&mut s, format!(r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#));
    w(
        &mut s,
        format!(
            r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">Test accuracy vs. label noise (K = {k})</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0
        ),
    );

    // Grid and ticks.
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let (x, y) = (px(t), py(t));
        w(
            &mut s,
            format!(r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e6e6e6"/>"##, py(0.0), py(1.0)),
        );
        w(
            &mut s,
            format!(r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e6e6e6"/>"##, px(0.0), px(1.0)),
        );
        w(&mut s, format!(r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#, py(0.0) + 18.0));
        w(&mut s, format!(r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.1}</text>"#, px(0.0) - 6.0, y + 4.0));
    }
    w(
        &mut s,
        format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            px(0.0),
            py(1.0),
            px(1.0) - px(0.0),
            py(0.0) - py(1.0)
        ),
    );
    w(
        &mut s,
        format!(
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">noise level alpha</text>"#,
            (px(0.0) + px(1.0)) / 2.0,
            HEIGHT - 16.0
        ),
    );
    w(
        &mut s,
        format!(
            r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">accuracy</text>"#,
            (py(0.0) + py(1.0)) / 2.0
        ),
    );

    // Reference lines.
    let km1 = (k - 1) as f64;
    for (value, label) in [(km1 / k as f64, "(K-1)/K"), (1.0 / (4.0 * km1), "1/(4(K-1))")] {
        let x = px(value);
        w(
            &mut s,
            format!(
                r##"<line class="reference" data-alpha="{value:.6}" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#555555" stroke-dasharray="2,3"/>"##,
                py(0.0),
                py(1.0)
            ),
        );
        w(
            &mut s,
            format!(
                r##"<text x="{:.2}" y="{:.2}" fill="#555555" font-size="10">{label}</text>"##,
                x + 3.0,
                py(1.0) + 12.0
            ),
        );
    }

    // Series and legend.
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(a, acc)| format!("{:.2},{:.2}", px(a), py(acc))).collect();
        w(&mut s, format!(r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" ")));
        for &(a, acc) in &ser.points {
            w(&mut s, format!(r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(a), py(acc)));
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 16.0;
        w(
            &mut s,
            format!(
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                lx + 20.0
            ),
        );
        w(&mut s, format!(r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&ser.label)));
    }
    w(&mut s, "</svg>".to_string());
    s
}
