//! Static SVG figures from report CSVs.
//!
//! * a `solve` CSV gives the error curve on a logarithmic axis,
//! * a `convergence` CSV gives log-log points per method with the fitted
//!   line and its slope,
//! * anything else plots every column against the first one.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::report::loglog_slope;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    ErrorCurve,
    Convergence,
    Columns,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| HarnessError::Plot(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(
            record
                .iter()
                .map(|cell| cell.trim().parse().unwrap_or(f64::NAN))
                .collect(),
        );
    }
    if rows.is_empty() {
        return Err(HarnessError::Plot(format!("{} has no data rows", path.display())));
    }
    Ok(Table { headers, rows })
}

#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Self> {
        let (lo, hi) = values
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return None;
        }
        let (lo, hi) = if log {
            (lo.floor(), hi.ceil().max(lo.floor() + 1.0))
        } else if hi > lo {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        } else {
            (lo - 0.5, hi + 0.5)
        };
        Some(Self { lo, hi, log })
    }

    fn fraction(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
            let mut e = self.lo;
            let mut out = Vec::new();
            while e <= self.hi + 1e-9 {
                out.push((10f64.powf(e), format!("1e{}", e as i64)));
                e += step;
            }
            out
        } else {
            (0..=5)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                    (v, format!("{v:.3}"))
                })
                .collect()
        }
    }
}

struct Canvas {
    svg: String,
    x: Axis,
    y: Axis,
}

impl Canvas {
    fn new(x: Axis, y: Axis, x_label: &str, y_label: &str) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let mut canvas = Self { svg, x, y };
        canvas.frame(x_label, y_label);
        canvas
    }

    fn px(&self, v: f64) -> Option<f64> {
        self.x
            .fraction(v)
            .map(|f| MARGIN_LEFT + f * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT))
    }

    fn py(&self, v: f64) -> Option<f64> {
        self.y
            .fraction(v)
            .map(|f| HEIGHT - MARGIN_BOTTOM - f * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM))
    }

    fn frame(&mut self, x_label: &str, y_label: &str) {
        let (left, right) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (top, bottom) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
        let _ = writeln!(
            self.svg,
            r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            right - left,
            bottom - top
        );
        for (v, label) in self.x.ticks() {
            if let Some(x) = self.px(v) {
                let _ = writeln!(
                    self.svg,
                    r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                    bottom + 5.0,
                    bottom + 18.0
                );
            }
        }
        for (v, label) in self.y.ticks() {
            if let Some(y) = self.py(v) {
                let _ = writeln!(
                    self.svg,
                    r#"<line x1="{:.2}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                    left - 5.0,
                    left - 8.0,
                    y + 4.0
                );
            }
        }
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            0.5 * (left + right),
            HEIGHT - 10.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
            0.5 * (top + bottom),
            0.5 * (top + bottom),
            escape(y_label)
        );
    }

    fn polyline(&mut self, xs: &[f64], ys: &[f64], colour: &str) {
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter_map(|(&x, &y)| Some(format!("{:.2},{:.2}", self.px(x)?, self.py(y)?)))
            .collect();
        let _ = writeln!(
            self.svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1" points="{}"/>"#,
            points.join(" ")
        );
    }

    fn markers(&mut self, xs: &[f64], ys: &[f64], colour: &str) {
        for (&x, &y) in xs.iter().zip(ys) {
            if let (Some(cx), Some(cy)) = (self.px(x), self.py(y)) {
                let _ = writeln!(self.svg, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{colour}"/>"#);
            }
        }
    }

    fn legend(&mut self, row: usize, colour: &str, text: &str) {
        let x = WIDTH - MARGIN_RIGHT + 12.0;
        let y = MARGIN_TOP + 16.0 + 18.0 * row as f64;
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
            y - 4.0,
            x + 18.0,
            y - 4.0,
            x + 24.0,
            escape(text)
        );
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn error_curve(table: &Table) -> Result<String> {
    let t = table
        .column("t")
        .ok_or_else(|| HarnessError::Plot("missing column t".into()))?;
    let err = table
        .column("abs_error")
        .ok_or_else(|| HarnessError::Plot("missing column abs_error".into()))?;
    let x = Axis::fit(t.iter().copied(), false).ok_or_else(|| HarnessError::Plot("no finite t values".into()))?;
    let y =
        Axis::fit(err.iter().copied(), true).ok_or_else(|| HarnessError::Plot("no positive errors to plot".into()))?;
    let mut canvas = Canvas::new(x, y, "t", "absolute error");
    canvas.polyline(&t, &err, COLOURS[0]);
    canvas.legend(0, COLOURS[0], "abs_error");
    Ok(canvas.finish())
}

fn convergence(table: &Table) -> Result<String> {
    let n = table
        .column("N")
        .ok_or_else(|| HarnessError::Plot("missing column N".into()))?;
    let series: Vec<(String, Vec<f64>)> = table
        .headers
        .iter()
        .filter(|h| h.starts_with("max_err_"))
        .filter_map(|h| Some((h.trim_start_matches("max_err_").to_string(), table.column(h)?)))
        .collect();
    let x = Axis::fit(n.iter().copied(), true).ok_or_else(|| HarnessError::Plot("no positive N".into()))?;
    let y = Axis::fit(series.iter().flat_map(|(_, v)| v.iter().copied()), true)
        .ok_or_else(|| HarnessError::Plot("no positive errors to plot".into()))?;
    let mut canvas = Canvas::new(x, y, "N", "max error");
    for (i, (name, ys)) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        canvas.markers(&n, ys, colour);
        let label = match loglog_slope(&n, ys) {
            Some(slope) => {
                // Least-squares line through the log points.
                let logs: Vec<(f64, f64)> = n
                    .iter()
                    .zip(ys)
                    .filter(|(x, y)| **x > 0.0 && **y > 0.0)
                    .map(|(x, y)| (x.ln(), y.ln()))
                    .collect();
                let mx = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
                let my = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
                let (lo, hi) = (10f64.powf(x.lo), 10f64.powf(x.hi));
                let line = |v: f64| (my + slope * (v.ln() - mx)).exp();
                canvas.polyline(&[lo, hi], &[line(lo), line(hi)], colour);
                format!("{name} (slope {slope:.2})")
            }
            None => name.clone(),
        };
        canvas.legend(i, colour, &label);
    }
    Ok(canvas.finish())
}

fn columns(table: &Table) -> Result<String> {
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let x =
        Axis::fit(xs.iter().copied(), false).ok_or_else(|| HarnessError::Plot("first column has no numbers".into()))?;
    let y = Axis::fit(table.rows.iter().flat_map(|r| r[1..].iter().copied()), false)
        .ok_or_else(|| HarnessError::Plot("no numeric data columns".into()))?;
    let mut canvas = Canvas::new(x, y, &table.headers[0], "value");
    for (i, name) in table.headers.iter().enumerate().skip(1) {
        let ys: Vec<f64> = table.rows.iter().map(|r| r[i]).collect();
        if ys.iter().all(|v| !v.is_finite()) {
            continue;
        }
        let colour = COLOURS[(i - 1) % COLOURS.len()];
        canvas.polyline(&xs, &ys, colour);
        canvas.legend(i - 1, colour, name);
    }
    Ok(canvas.finish())
}

/// Renders `input` to SVG text, choosing the layout from its columns.
pub fn render(input: &Path) -> Result<(PlotKind, String)> {
    let table = read_table(input)?;
    let has = |name: &str| table.headers.iter().any(|h| h == name);
    if has("t") && has("abs_error") {
        Ok((PlotKind::ErrorCurve, error_curve(&table)?))
    } else if has("N") && table.headers.iter().any(|h| h.starts_with("max_err_")) {
        Ok((PlotKind::Convergence, convergence(&table)?))
    } else {
        Ok((PlotKind::Columns, columns(&table)?))
    }
}

pub fn plot_csv(input: &Path, output: &Path) -> Result<PlotKind> {
    let (kind, svg) = render(input)?;
    std::fs::write(output, svg).map_err(|source| HarnessError::Io {
        path: output.display().to_string(),
        source,
    })?;
    Ok(kind)
}
