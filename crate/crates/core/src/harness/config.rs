//! Sweep configuration files.
//!
//! Grammar, one statement per line:
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! key = v1, v2, v3        # lists, in the [axes] section
//! ```
//!
//! Sections are `sweep` (name, seed, trials, workers, empirical), `base`
//! (d, n, lambda, rho, strategy), `axes` (any of n, d, lambda, xi, p, rho,
//! strategy, exponent, kept) and `output` (csv, svg, plot_x, plot_y,
//! plot_series, log_x, log_y). Unknown sections or keys are errors.

use crate::error::{invalid, Error, Result};
use crate::selection::SelectionStrategy;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// A sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    Strategy,
    Exponent,
    Xi,
    P,
    Rho,
    D,
    N,
    /// Target kept count `n·p`; sets `n = round(kept/p)`.
    Kept,
    Lambda,
}

impl Axis {
    pub const ALL: [Axis; 9] = [
        Axis::Strategy,
        Axis::Exponent,
        Axis::Xi,
        Axis::P,
        Axis::Rho,
        Axis::D,
        Axis::N,
        Axis::Kept,
        Axis::Lambda,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::Strategy => "strategy",
            Axis::Exponent => "exponent",
            Axis::Xi => "xi",
            Axis::P => "p",
            Axis::Rho => "rho",
            Axis::D => "d",
            Axis::N => "n",
            Axis::Kept => "kept",
            Axis::Lambda => "lambda",
        }
    }

    fn is_integer(&self) -> bool {
        matches!(self, Axis::D | Axis::N | Axis::Kept)
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Integers(Vec<usize>),
    Reals(Vec<f64>),
    Strategies(Vec<SelectionStrategy>),
}

impl AxisValues {
    pub fn len(&self) -> usize {
        match self {
            AxisValues::Integers(v) => v.len(),
            AxisValues::Reals(v) => v.len(),
            AxisValues::Strategies(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn render(&self) -> String {
        match self {
            AxisValues::Integers(v) => join(v.iter().map(|x| x.to_string())),
            AxisValues::Reals(v) => join(v.iter().map(|x| format!("{x:?}"))),
            AxisValues::Strategies(v) => join(v.iter().map(|x| x.to_string())),
        }
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

/// Parameters shared by every cell unless an axis overrides them.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseConfig {
    pub d: usize,
    pub n: usize,
    pub lambda: f64,
    pub rho: f64,
    pub strategy: SelectionStrategy,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self {
            d: 350,
            n: 700,
            lambda: 1e-2,
            rho: 1.0,
            strategy: SelectionStrategy::KeepAll,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub plot_x: Option<String>,
    pub plot_y: Option<String>,
    pub plot_series: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub seed: u64,
    /// Monte Carlo trials per cell when `empirical`.
    pub trials: usize,
    pub empirical: bool,
    pub workers: usize,
    pub base: BaseConfig,
    /// In declaration order; the first axis varies slowest.
    pub axes: Vec<(Axis, AxisValues)>,
    pub output: OutputSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            name: "sweep".to_string(),
            seed: 0,
            trials: 200,
            empirical: false,
            workers: 1,
            base: BaseConfig::default(),
            axes: Vec::new(),
            output: OutputSpec::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        let mut seen = Vec::new();
        for (axis, values) in &self.axes {
            if seen.contains(axis) {
                return Err(invalid(format!("axis `{}` given twice", axis.name())));
            }
            seen.push(*axis);
            if values.is_empty() {
                return Err(invalid(format!("axis `{}` has no values", axis.name())));
            }
        }
        self.base.strategy.validate()
    }

    /// Number of grid cells.
    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    /// Canonical text form; parsing it gives back an identical spec.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let b = &self.base;
        let _ = writeln!(out, "[sweep]");
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "trials = {}", self.trials);
        let _ = writeln!(out, "empirical = {}", self.empirical);
        let _ = writeln!(out, "workers = {}", self.workers);
        let _ = writeln!(out, "\n[base]");
        let _ = writeln!(out, "d = {}", b.d);
        let _ = writeln!(out, "n = {}", b.n);
        let _ = writeln!(out, "lambda = {:?}", b.lambda);
        let _ = writeln!(out, "rho = {:?}", b.rho);
        let _ = writeln!(out, "strategy = {}", b.strategy);
        let _ = writeln!(out, "\n[axes]");
        for (axis, values) in &self.axes {
            let _ = writeln!(out, "{} = {}", axis.name(), values.render());
        }
        let o = &self.output;
        let _ = writeln!(out, "\n[output]");
        for (key, value) in [
            ("csv", &o.csv),
            ("svg", &o.svg),
            ("plot_x", &o.plot_x),
            ("plot_y", &o.plot_y),
            ("plot_series", &o.plot_series),
        ] {
            if let Some(v) = value {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        let _ = writeln!(out, "log_x = {}", o.log_x);
        let _ = writeln!(out, "log_y = {}", o.log_y);
        out
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::Parse(format!("bad value `{value}` for `{key}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Parse(format!("bad boolean `{other}` for `{key}`"))),
    }
}

fn parse_axis(axis: Axis, value: &str) -> Result<AxisValues> {
    let items: Vec<&str> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Parse(format!(
            "axis `{}` has no values",
            axis.name()
        )));
    }
    let key = axis.name();
    Ok(if axis == Axis::Strategy {
        AxisValues::Strategies(items.iter().map(|s| s.parse()).collect::<Result<_>>()?)
    } else if axis.is_integer() {
        AxisValues::Integers(
            items
                .iter()
                .map(|s| parse_num(key, s))
                .collect::<Result<_>>()?,
        )
    } else {
        AxisValues::Reals(
            items
                .iter()
                .map(|s| parse_num(key, s))
                .collect::<Result<_>>()?,
        )
    })
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut spec = SweepSpec::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("unterminated section header `{line}`")))?
                    .trim();
                if !matches!(name, "sweep" | "base" | "axes" | "output") {
                    return Err(at(format!("unknown section `{name}`")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let wrap = |e: Error| match e {
                Error::Parse(m) | Error::InvalidParameter(m) => at(m),
                other => other,
            };
            match (section.as_str(), key) {
                ("sweep", "name") => spec.name = value.to_string(),
                ("sweep", "seed") => spec.seed = parse_num(key, value).map_err(wrap)?,
                ("sweep", "trials") => spec.trials = parse_num(key, value).map_err(wrap)?,
                ("sweep", "workers") => spec.workers = parse_num(key, value).map_err(wrap)?,
                ("sweep", "empirical") => spec.empirical = parse_bool(key, value).map_err(wrap)?,
                ("base", "d") => spec.base.d = parse_num(key, value).map_err(wrap)?,
                ("base", "n") => spec.base.n = parse_num(key, value).map_err(wrap)?,
                ("base", "lambda") => spec.base.lambda = parse_num(key, value).map_err(wrap)?,
                ("base", "rho") => spec.base.rho = parse_num(key, value).map_err(wrap)?,
                ("base", "strategy") => spec.base.strategy = value.parse().map_err(wrap)?,
                ("axes", name) => {
                    let axis: Axis = name.parse().map_err(wrap)?;
                    if spec.axes.iter().any(|(a, _)| *a == axis) {
                        return Err(at(format!("axis `{name}` given twice")));
                    }
                    spec.axes
                        .push((axis, parse_axis(axis, value).map_err(wrap)?));
                }
                ("output", "csv") => spec.output.csv = Some(value.to_string()),
                ("output", "svg") => spec.output.svg = Some(value.to_string()),
                ("output", "plot_x") => spec.output.plot_x = Some(value.to_string()),
                ("output", "plot_y") => spec.output.plot_y = Some(value.to_string()),
                ("output", "plot_series") => spec.output.plot_series = Some(value.to_string()),
                ("output", "log_x") => spec.output.log_x = parse_bool(key, value).map_err(wrap)?,
                ("output", "log_y") => spec.output.log_y = parse_bool(key, value).map_err(wrap)?,
                ("", _) => return Err(at(format!("`{key}` appears before any section"))),
                (s, k) => return Err(at(format!("unknown key `{k}` in section [{s}]"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}
