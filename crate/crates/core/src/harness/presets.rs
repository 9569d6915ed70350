//! Built-in sweeps.

use super::config::{Axis, AxisValues, BaseConfig, OutputSpec, SweepSpec};
use crate::error::{invalid, Result};
use crate::selection::SelectionStrategy;

pub const PRESET_NAMES: [&str; 4] = [
    "theory-scaling",
    "figcool",
    "figcool-small",
    "oversample-curve",
];

fn keep_hard() -> SelectionStrategy {
    SelectionStrategy::KeepHard { xi: 1.0 }
}

/// Theory and simulation at `d = 350`, `ρ = 1`, three keep-hard thresholds and
/// `n` across the interpolation threshold, with and without ridge.
fn figcool(d: usize, ns: Vec<usize>, trials: usize, name: &str) -> SweepSpec {
    SweepSpec {
        name: name.into(),
        seed: 2024,
        trials,
        empirical: true,
        workers: 1,
        base: BaseConfig {
            d,
            n: d,
            lambda: 1e-2,
            rho: 1.0,
            strategy: keep_hard(),
        },
        axes: vec![
            (Axis::Lambda, AxisValues::Reals(vec![1e-2, 1e-6])),
            (Axis::Xi, AxisValues::Reals(vec![0.5, 1.0, 2.0])),
            (Axis::N, AxisValues::Integers(ns)),
        ],
        output: OutputSpec {
            csv: Some(format!("{name}.csv")),
            svg: Some(format!("{name}.svg")),
            plot_x: Some("n".into()),
            plot_y: Some("theory_error".into()),
            plot_series: Some("strategy".into()),
            log_x: true,
            log_y: false,
        },
    }
}

pub fn preset(name: &str) -> Result<SweepSpec> {
    Ok(match name {
        "figcool" => figcool(
            350,
            vec![150, 250, 350, 450, 600, 800, 1100, 1500],
            200,
            "figcool",
        ),
        "figcool-small" => figcool(
            100,
            vec![43, 71, 100, 129, 171, 229, 314, 429],
            60,
            "figcool-small",
        ),
        // accuracy against kept count, one curve per keep probability
        "theory-scaling" => SweepSpec {
            name: name.into(),
            seed: 0,
            trials: 1,
            empirical: false,
            workers: 1,
            base: BaseConfig {
                d: 512,
                n: 512,
                lambda: 1e-3,
                rho: 0.9,
                strategy: keep_hard(),
            },
            axes: vec![
                (Axis::P, AxisValues::Reals(vec![1.0, 0.8, 0.5, 0.2, 0.02])),
                (
                    Axis::Kept,
                    AxisValues::Integers(vec![
                        128, 256, 362, 512, 724, 1024, 1448, 2048, 2896, 4096, 5793, 8192, 16384,
                    ]),
                ),
            ],
            output: OutputSpec {
                csv: Some("theory-scaling.csv".into()),
                svg: Some("theory-scaling.svg".into()),
                plot_x: Some("kept".into()),
                plot_y: Some("accuracy".into()),
                plot_series: Some("p".into()),
                log_x: true,
                log_y: false,
            },
        },
        // fixed kept count, growing pool: accuracy against pool/kept
        "oversample-curve" => SweepSpec {
            name: name.into(),
            seed: 0,
            trials: 1,
            empirical: false,
            workers: 1,
            base: BaseConfig {
                d: 512,
                n: 2048,
                lambda: 1e-3,
                rho: 0.9,
                strategy: keep_hard(),
            },
            axes: vec![
                (Axis::Kept, AxisValues::Integers(vec![2048])),
                (
                    Axis::P,
                    AxisValues::Reals(vec![1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02]),
                ),
            ],
            output: OutputSpec {
                csv: Some("oversample-curve.csv".into()),
                svg: Some("oversample-curve.svg".into()),
                plot_x: Some("oversample".into()),
                plot_y: Some("accuracy".into()),
                plot_series: None,
                log_x: true,
                log_y: false,
            },
        },
        other => {
            return Err(invalid(format!(
                "unknown preset `{other}` (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}
