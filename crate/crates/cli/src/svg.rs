//! Static log-scale line charts rendered straight to SVG text.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ttortho::metrics::UNIT_ROUNDOFF;

use crate::error::{CliError, Result};
use crate::table::{format_f64, Row, HOUSEHOLDER_A, HOUSEHOLDER_U};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 610.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 540.0;

#[derive(Clone, Copy, PartialEq)]
enum Stroke {
    Solid,
    Dashed,
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub label: String,
    /// `(k, value)` pairs in increasing `k`.
    pub points: Vec<(f64, f64)>,
    /// Draw the parts above 1 dashed and faded.
    pub fade_above_one: bool,
    pub reference: bool,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub title: String,
    pub y_label: String,
    pub curves: Vec<Curve>,
}

fn color(label: &str) -> &'static str {
    match label {
        "cgs" => "#1f77b4",
        "mgs" => "#ff7f0e",
        "cgs2" => "#2ca02c",
        "mgs2" => "#d62728",
        "gram" => "#9467bd",
        "householder" => "#8c564b",
        HOUSEHOLDER_U => "#e377c2",
        HOUSEHOLDER_A => "#7f7f7f",
        "u*kappa" => "#17becf",
        "u*kappa^2" => "#bcbd22",
        _ => "#000000",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    fn ranges(&self) -> Option<((f64, f64), (i32, i32))> {
        let pts = || self.curves.iter().flat_map(|c| c.points.iter()).filter(|p| p.1 > 0.0 && p.1.is_finite());
        let x_max = pts().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let x_min = pts().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let lo = pts().map(|p| p.1.log10()).fold(f64::INFINITY, f64::min);
        let hi = pts().map(|p| p.1.log10()).fold(f64::NEG_INFINITY, f64::max);
        if !x_max.is_finite() {
            return None;
        }
        let (lo, mut hi) = (lo.floor() as i32, hi.ceil() as i32);
        if hi <= lo {
            hi = lo + 1;
        }
        let x_max = if x_max > x_min { x_max } else { x_min + 1.0 };
        Some(((x_min, x_max), (lo, hi)))
    }

    /// Renders the chart; an empty chart (no positive values) is an error.
    pub fn render(&self) -> Result<String> {
        let ((x0, x1), (y0, y1)) =
            self.ranges().ok_or_else(|| CliError::Schema(format!("nothing to plot for '{}'", self.title)))?;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
        let sy = |v: f64| BOTTOM - (v.log10() - y0 as f64) / (y1 - y0) as f64 * (BOTTOM - TOP);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="30" font-size="16" text-anchor="middle">{}</text>"#, (LEFT + RIGHT) / 2.0, escape(&self.title));

        // axes and grid
        let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##, RIGHT - LEFT, BOTTOM - TOP);
        let decades = (y1 - y0) as usize;
        let step = decades.div_ceil(12).max(1);
        for e in (y0..=y1).step_by(step) {
            let y = sy(10f64.powi(e));
            let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#ddd"/>"##);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#, LEFT - 6.0, y + 4.0);
        }
        let span = (x1 - x0).round() as usize;
        let x_step = if span <= 20 { 1 } else { 5 };
        let mut k = x0.ceil() as usize;
        while (k as f64) <= x1 {
            let x = sx(k as f64);
            let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##, BOTTOM + 5.0);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#, BOTTOM + 20.0);
            k += x_step;
            if x_step > 1 {
                k -= k % x_step;
            }
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">k</text>"#, (LEFT + RIGHT) / 2.0, BOTTOM + 45.0);
        let _ = writeln!(
            s,
            r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
            (TOP + BOTTOM) / 2.0,
            (TOP + BOTTOM) / 2.0,
            escape(&self.y_label)
        );

        for curve in &self.curves {
            let c = color(&curve.label);
            for (stroke, run) in segments(curve) {
                let pts: Vec<String> = run.iter().map(|&(x, v)| format!("{:.2},{:.2}", sx(x), sy(v))).collect();
                let style = match (stroke, curve.reference) {
                    (Stroke::Dashed, _) => r#" stroke-dasharray="6 4" stroke-opacity="0.45""#,
                    (Stroke::Solid, true) => r#" stroke-dasharray="2 3""#,
                    (Stroke::Solid, false) => "",
                };
                if pts.len() == 1 {
                    let (x, v) = run[0];
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, sx(x), sy(v));
                } else {
                    let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="2"{style} points="{}"/>"#, pts.join(" "));
                }
            }
        }

        for (i, curve) in self.curves.iter().enumerate() {
            let y = TOP + 10.0 + 20.0 * i as f64;
            let dash = if curve.reference { r#" stroke-dasharray="2 3""# } else { "" };
            let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"{dash}/>"#, RIGHT + 15.0, RIGHT + 45.0, color(&curve.label));
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, RIGHT + 52.0, y + 4.0, escape(&curve.label));
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

/// Splits a curve into runs of equal stroke, dropping non-positive values.
fn segments(curve: &Curve) -> Vec<(Stroke, Vec<(f64, f64)>)> {
    let mut out: Vec<(Stroke, Vec<(f64, f64)>)> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &p in &curve.points {
        if !(p.1 > 0.0 && p.1.is_finite()) {
            prev = None;
            continue;
        }
        match prev {
            None => out.push((Stroke::Solid, vec![p])),
            Some(q) => {
                let stroke = if curve.fade_above_one && (p.1 > 1.0 || q.1 > 1.0) { Stroke::Dashed } else { Stroke::Solid };
                match out.last_mut() {
                    Some((st, run)) if *st == stroke || run.len() == 1 => {
                        *st = stroke;
                        run.push(p);
                    }
                    _ => out.push((stroke, vec![q, p])),
                }
            }
        }
        prev = Some(p);
    }
    out
}

fn series_names(rows: &[Row]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        if !names.contains(&r.kernel) {
            names.push(r.kernel.clone());
        }
    }
    names
}

fn curve(rows: &[Row], name: &str, value: impl Fn(&Row) -> Option<f64>) -> Curve {
    let mut points: Vec<(f64, f64)> = rows.iter().filter(|r| r.kernel == name).filter_map(|r| value(r).map(|v| (r.k as f64, v))).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Curve { label: name.to_string(), points, fade_above_one: false, reference: false }
}

/// LOO figure for one accuracy: a curve per kernel, the accuracy itself and,
/// when present, the condition numbers scaled by the unit round-off.
pub fn loo_chart(rows: &[Row], delta: f64) -> Chart {
    let owned: Vec<Row> = rows.iter().filter(|r| r.delta == delta).cloned().collect();
    let mut curves = Vec::new();
    for name in series_names(&owned) {
        if name == HOUSEHOLDER_U || name == HOUSEHOLDER_A {
            continue;
        }
        let mut c = curve(&owned, &name, |r| r.loo);
        if c.points.is_empty() {
            continue;
        }
        c.fade_above_one = true;
        curves.push(c);
    }
    let ks: Vec<f64> = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).collect();
    if let (Some(lo), Some(hi)) = (ks.iter().copied().reduce(f64::min), ks.iter().copied().reduce(f64::max)) {
        curves.push(Curve { label: "delta".into(), points: vec![(lo, delta), (hi, delta)], fade_above_one: false, reference: true });
    }
    let mut kappa: Vec<(f64, f64, f64)> = Vec::new();
    for r in &owned {
        if let (Some(k1), Some(k2)) = (r.kappa, r.kappa_sq) {
            if !kappa.iter().any(|p| p.0 == r.k as f64) {
                kappa.push((r.k as f64, k1, k2));
            }
        }
    }
    kappa.sort_by(|a, b| a.0.total_cmp(&b.0));
    if !kappa.is_empty() {
        for (label, pick) in [("u*kappa", 1), ("u*kappa^2", 2)] {
            let points = kappa.iter().map(|p| (p.0, UNIT_ROUNDOFF * if pick == 1 { p.1 } else { p.2 })).collect();
            curves.push(Curve { label: label.into(), points, fade_above_one: false, reference: true });
        }
    }
    Chart { title: format!("Loss of orthogonality, delta = {}", format_f64(delta)), y_label: "|I - Q^T Q|_2".into(), curves }
}

/// Memory figure for one accuracy and one column.
pub fn memory_chart(rows: &[Row], delta: f64, column: MemoryColumn) -> Chart {
    let owned: Vec<Row> = rows.iter().filter(|r| r.delta == delta).cloned().collect();
    let curves = series_names(&owned)
        .iter()
        .map(|name| curve(&owned, name, |r| column.value(r)))
        .filter(|c| !c.points.is_empty())
        .collect();
    Chart { title: format!("{}, delta = {}", column.title(), format_f64(delta)), y_label: column.title().into(), curves }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryColumn {
    MaxRank,
    CompressionRatio,
    CompressionGain,
}

impl MemoryColumn {
    pub const ALL: [MemoryColumn; 3] = [MemoryColumn::MaxRank, MemoryColumn::CompressionRatio, MemoryColumn::CompressionGain];

    fn value(self, r: &Row) -> Option<f64> {
        match self {
            MemoryColumn::MaxRank => r.max_rank.map(|v| v as f64),
            MemoryColumn::CompressionRatio => r.compression_ratio,
            MemoryColumn::CompressionGain => r.compression_gain,
        }
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            MemoryColumn::MaxRank => "max_rank",
            MemoryColumn::CompressionRatio => "compression_ratio",
            MemoryColumn::CompressionGain => "compression_gain",
        }
    }

    fn title(self) -> &'static str {
        match self {
            MemoryColumn::MaxRank => "Maximum TT-rank",
            MemoryColumn::CompressionRatio => "Compression ratio",
            MemoryColumn::CompressionGain => "Compression gain",
        }
    }
}

/// Writes every figure for every accuracy found in `rows` into `dir` and
/// returns the paths in writing order.
pub fn write_figures(rows: &[Row], dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(CliError::Schema("no data rows".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut deltas: Vec<f64> = Vec::new();
    for r in rows {
        if !deltas.contains(&r.delta) {
            deltas.push(r.delta);
        }
    }
    let mut written = Vec::new();
    for delta in deltas {
        let tag = format_f64(delta);
        let mut charts = vec![("loo".to_string(), loo_chart(rows, delta))];
        for col in MemoryColumn::ALL {
            charts.push((col.file_stem().to_string(), memory_chart(rows, delta, col)));
        }
        for (stem, chart) in charts {
            if chart.curves.iter().all(|c| c.reference) {
                continue;
            }
            let path = dir.join(format!("{stem}_delta_{tag}.svg"));
            std::fs::write(&path, chart.render()?).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
    }
    if written.is_empty() {
        return Err(CliError::Schema("no plottable series".into()));
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(kernel: &str, k: usize, loo: f64) -> Row {
        Row { kernel: kernel.into(), delta: 1e-8, k, loo: Some(loo), max_rank: Some(k), ..Row::default() }
    }

    #[test]
    fn dashed_above_one() {
        let rows = vec![row("cgs", 1, 1e-15), row("cgs", 2, 1e-3), row("cgs", 3, 5.0), row("cgs", 4, 8.0)];
        let svg = loo_chart(&rows, 1e-8).render().unwrap();
        assert_eq!(svg.matches("stroke-dasharray=\"6 4\"").count(), 1);
        assert!(svg.contains(">cgs<"));
        assert!(svg.contains(">delta<"));
        assert!(!svg.contains("u*kappa"));
    }

    #[test]
    fn single_series_has_increasing_x() {
        let rows = vec![row("mgs", 3, 1e-12), row("mgs", 1, 1e-15), row("mgs", 2, 1e-14)];
        let chart = loo_chart(&rows, 1e-8);
        let xs: Vec<f64> = chart.curves[0].points.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![1.0, 2.0, 3.0]);
        let svg = chart.render().unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn kappa_curves_are_scaled() {
        let mut r = row("cgs", 1, 1e-15);
        r.kappa = Some(1e8);
        r.kappa_sq = Some(1e16);
        let chart = loo_chart(&[r], 1e-8);
        let uk = chart.curves.iter().find(|c| c.label == "u*kappa").unwrap();
        assert_eq!(uk.points[0].1, UNIT_ROUNDOFF * 1e8);
    }
}
