//! Self-contained SVG line charts from sweep CSVs.
//!
//! Output depends only on the input bytes and the [`PlotSpec`]: no clocks, no
//! randomness, fixed number formatting.

use crate::error::{invalid, Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 530.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Columns computed from others when absent from the file.
pub const DERIVED_COLUMNS: [&str; 4] = ["accuracy", "empirical_accuracy", "oversample", "kept"];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    /// One curve per distinct value of this column.
    pub series: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
    pub title: Option<String>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            x: "n".into(),
            y: "theory_error".into(),
            series: Some("strategy".into()),
            log_x: false,
            log_y: false,
            title: None,
        }
    }
}

/// A CSV held as strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { headers, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn has(&self, name: &str) -> bool {
        self.col(name).is_some() || self.derivable(name)
    }

    fn derivable(&self, name: &str) -> bool {
        match name {
            "accuracy" => self.col("theory_error").is_some(),
            "empirical_accuracy" => self.col("empirical_mean").is_some(),
            "oversample" => self.col("p").is_some(),
            "kept" => self.col("n").is_some() && self.col("p").is_some(),
            _ => false,
        }
    }

    fn raw<'a>(&'a self, row: &'a [String], name: &str) -> Option<&'a str> {
        self.col(name).and_then(|i| row.get(i)).map(String::as_str)
    }

    fn number(&self, row: &[String], name: &str) -> Option<f64> {
        if let Some(s) = self.raw(row, name) {
            return s.trim().parse().ok();
        }
        let get = |c: &str| self.raw(row, c).and_then(|s| s.trim().parse::<f64>().ok());
        match name {
            "accuracy" => get("theory_error").map(|e| 1.0 - e),
            "empirical_accuracy" => get("empirical_mean").map(|e| 1.0 - e),
            "oversample" => get("p").map(|p| 1.0 / p),
            "kept" => Some(get("n")? * get("p")?),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            let pad = if log {
                0.5
            } else if lo == 0.0 {
                1.0
            } else {
                0.1 * lo.abs()
            };
            lo -= pad;
            hi += pad;
        } else {
            let pad = 0.04 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let mut t: Vec<f64> = (a..=b).map(|e| 10f64.powi(e)).collect();
            if t.len() < 2 {
                t = (self.lo.floor() as i32..=self.hi.ceil() as i32)
                    .flat_map(|e| [1.0, 2.0, 5.0].map(|m| m * 10f64.powi(e)))
                    .filter(|v| {
                        let l = v.log10();
                        l >= self.lo && l <= self.hi
                    })
                    .collect();
            }
            return t;
        }
        let raw = (self.hi - self.lo) / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        return format!("{v:.0e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Numbers print in shortest form so `5.0000000000000000e-1` reads `0.5`.
fn series_value(table: &Table, row: &[String], col: &str) -> String {
    match table.raw(row, col) {
        Some(s) => s
            .parse::<f64>()
            .map(|v| v.to_string())
            .unwrap_or_else(|_| s.to_string()),
        None => table
            .number(row, col)
            .map(|v| v.to_string())
            .unwrap_or_default(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the chart for an in-memory table.
pub fn render_svg(table: &Table, spec: &PlotSpec) -> Result<String> {
    let mut wanted = vec![spec.x.as_str(), spec.y.as_str()];
    if let Some(s) = &spec.series {
        wanted.push(s);
    }
    let missing: Vec<String> = wanted
        .iter()
        .filter(|c| !table.has(c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }

    // series in order of first appearance
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in &table.rows {
        let (Some(x), Some(y)) = (table.number(row, &spec.x), table.number(row, &spec.y)) else {
            continue;
        };
        if !(x.is_finite() && y.is_finite()) || (spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)
        {
            continue;
        }
        let key = match &spec.series {
            Some(col) => format!("{col}={}", series_value(table, row, col)),
            None => spec.y.clone(),
        };
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((x, y)),
            None => series.push((key, vec![(x, y)])),
        }
    }
    if series.is_empty() {
        return Err(invalid(format!(
            "no plottable rows for {} against {}",
            spec.y, spec.x
        )));
    }
    for (_, pts) in series.iter_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let all = || series.iter().flat_map(|(_, p)| p.iter());
    let sx = Scale::fit(all().map(|p| p.0), spec.log_x);
    let sy = Scale::fit(all().map(|p| p.1), spec.log_y);
    let px = |x: f64| LEFT + sx.unit(x) * (RIGHT - LEFT);
    let py = |y: f64| BOTTOM - sy.unit(y) * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let title = spec
        .title
        .clone()
        .unwrap_or_else(|| format!("{} vs {}", spec.y, spec.x));
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&title)
    );

    // grid and ticks
    for t in sx.ticks() {
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{BOTTOM:.2}" stroke="#e5e5e5"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            BOTTOM + 18.0,
            tick_label(t)
        );
    }
    for t in sy.ticks() {
        let y = py(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{RIGHT:.2}" y2="{y:.2}" stroke="#e5e5e5"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let axis_name = |c: &str, log: bool| {
        if log {
            format!("{c} (log)")
        } else {
            c.to_string()
        }
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 30.0,
        escape(&axis_name(&spec.x, spec.log_x))
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        escape(&axis_name(&spec.y, spec.log_y))
    );

    for (k, (_, pts)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
    }

    // legend, top right inside the frame
    let lx = RIGHT - 200.0;
    for (k, (name, _)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = TOP + 18.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" class="legend">{}</text>"#,
            lx + 28.0,
            y + 4.0,
            escape(name)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Reads the sweep CSV at `csv_path` and renders it.
pub fn emit_plot(csv_path: &Path, spec: &PlotSpec) -> Result<String> {
    let table = Table::read(std::fs::File::open(csv_path)?)?;
    render_svg(&table, spec)
}

/// [`emit_plot`], writing the document to `out`.
pub fn write_plot(csv_path: &Path, spec: &PlotSpec, out: &Path) -> Result<()> {
    let svg = emit_plot(csv_path, spec)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(out, svg)?;
    Ok(())
}
