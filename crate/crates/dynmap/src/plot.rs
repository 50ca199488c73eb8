//! Line charts of trajectory CSV columns against `t`, as SVG.
//!
//! The output depends only on the input bytes and the column list.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 6;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Series {
    name: String,
    values: Vec<f64>,
}

fn parse_columns(csv_bytes: &[u8], cols: &[String]) -> CliResult<(Vec<f64>, Vec<Series>)> {
    let mut reader = csv::Reader::from_reader(csv_bytes);
    let header = reader.headers().map_err(|e| CliError::config(format!("bad CSV header: {e}")))?.clone();
    let index = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| CliError::config(format!("missing column: {name}")))
    };
    let t_index = index("t")?;
    let indices = cols.iter().map(|c| index(c)).collect::<CliResult<Vec<_>>>()?;
    let mut t = Vec::new();
    let mut series: Vec<Series> = cols.iter().map(|c| Series { name: c.clone(), values: Vec::new() }).collect();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CliError::config(format!("bad CSV row {}: {e}", line + 2)))?;
        let field = |i: usize| -> CliResult<f64> {
            let s = row.get(i).unwrap_or("").trim();
            s.parse().map_err(|_| CliError::config(format!("non-numeric value {s:?} in row {}", line + 2)))
        };
        t.push(field(t_index)?);
        for (s, &i) in series.iter_mut().zip(&indices) {
            s.values.push(field(i)?);
        }
    }
    if t.is_empty() {
        return Err(CliError::config("CSV has no data rows"));
    }
    Ok((t, series))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        if s == "-0.000" { "0.000".to_string() } else { s }
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the selected columns of a trajectory CSV.
pub fn render_svg(csv_bytes: &[u8], cols: &[String]) -> CliResult<String> {
    if cols.is_empty() {
        return Err(CliError::config("no columns selected"));
    }
    let (t, series) = parse_columns(csv_bytes, cols)?;
    let (t0, t1) = range(t.iter().copied());
    let (y0, y1) = range(series.iter().flat_map(|s| s.values.iter().copied()));
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - t0) / (t1 - t0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..TICKS {
        let frac = i as f64 / (TICKS - 1) as f64;
        let xv = t0 + frac * (t1 - t0);
        let yv = y0 + frac * (y1 - y0);
        let (x, y) = (sx(xv), sy(yv));
        let bottom = TOP + ph;
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"##, bottom + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, bottom + 20.0, label(xv));
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, label(yv));
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0);

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, svg: &mut String| {
            if !segment.is_empty() {
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    segment.join(" ")
                );
                segment.clear();
            }
        };
        for (&x, &y) in t.iter().zip(&s.values) {
            if x.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else {
                flush(&mut segment, &mut svg);
            }
        }
        flush(&mut segment, &mut svg);
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(svg, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads `csv_path`, renders `cols` and writes the SVG to `out`.
pub fn plot(csv_path: &Path, cols: &[String], out: &Path) -> CliResult<()> {
    let bytes = std::fs::read(csv_path).map_err(|source| CliError::Read { path: csv_path.to_path_buf(), source })?;
    let svg = render_svg(&bytes, cols)?;
    write_atomic(out, svg.as_bytes())
}
