//! Static SVG line charts of coverage against time.
//!
//! The output depends only on the input numbers, so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use etstir_core::driver::SeriesPoint;

use crate::error::{AppError, AppResult};
use crate::output::write_file;
use crate::sweep::SweepTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn from_series(label: impl Into<String>, series: &[SeriesPoint]) -> Self {
        Self {
            label: label.into(),
            points: series.iter().map(|p| (p.t, p.mean_coverage)).collect(),
        }
    }
}

/// One curve per successful row, in row order, labelled by the swept value.
pub fn sweep_curves(table: &SweepTable) -> Vec<Curve> {
    table
        .rows
        .iter()
        .filter_map(|row| {
            let r = row.outcome.as_ref().ok()?;
            Some(Curve::from_series(axis_label(table.axis, row.value), &r.series))
        })
        .collect()
}

fn axis_label(axis: etstir_core::SweepAxis, value: f64) -> String {
    use etstir_core::SweepAxis::*;
    match axis {
        ElectrodeWidth => format!("w = {} um", trim(value * 1e6)),
        Gap => format!("gap = {} um", trim(value * 1e6)),
        Frequency => format!("f = {value:e} Hz"),
        Voltage => format!("V = {} V", trim(value)),
    }
}

fn trim(v: f64) -> String {
    let s = format!("{:.3}", v);
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the curves as an SVG document.
pub fn render_svg(curves: &[Curve], title: &str) -> AppResult<String> {
    let pts = || curves.iter().flat_map(|c| c.points.iter());
    if curves.is_empty() || pts().next().is_none() {
        return Err(AppError::Plot("nothing to plot".into()));
    }
    if pts().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(AppError::Plot("non-finite value in plot data".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for &(x, y) in pts() {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = if y0 == 0.0 { 1.0 } else { y0 + y0.abs() };
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, trim(t));
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{t:.2e}</text>"#, LEFT - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">time (s)</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">mean bound complex (mol/m^2)</text>"#,
        TOP + ph / 2.0
    );
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&c.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(curves: &[Curve], title: &str, path: &Path) -> AppResult<()> {
    let svg = render_svg(curves, title)?;
    write_file(path, &svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(label: &str, pts: &[(f64, f64)]) -> Curve {
        Curve { label: label.into(), points: pts.to_vec() }
    }

    #[test]
    fn constant_series_is_one_flat_polyline() {
        let svg = render_svg(&[curve("c", &[(0.0, 2e-8), (10.0, 2e-8), (20.0, 2e-8)])], "flat").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_svg(&[], "x").is_err());
        assert!(render_svg(&[curve("a", &[])], "x").is_err());
    }

    #[test]
    fn legend_follows_input_order() {
        let cs: Vec<Curve> = (0..6).map(|k| curve(&format!("V = {} V", 5 * k), &[(0.0, 0.0), (1.0, k as f64)])).collect();
        let svg = render_svg(&cs, "sweep").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 6);
        let pos: Vec<usize> = (0..6).map(|k| svg.find(&format!(">V = {} V<", 5 * k)).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 100.0), vec![0.0, 20.0, 40.0, 60.0, 80.0, 100.0]);
    }
}
