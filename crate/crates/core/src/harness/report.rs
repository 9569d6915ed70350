//! Theory versus Monte Carlo comparison over sweep rows.

use super::schema::SweepRow;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub cell_id: usize,
    pub label: String,
    pub theory_error: f64,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    pub trials: usize,
    pub abs_deviation: f64,
    /// `(empirical − theory)/(std/√trials)`.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub cells: usize,
    /// Rows lacking theory or empirical values.
    pub skipped: usize,
    pub max_abs_deviation: f64,
    pub abs_tolerance: f64,
    pub fraction_within_abs: f64,
    pub z_tolerance: f64,
    pub fraction_within_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub summary: ComparisonSummary,
}

fn z_score(dev: f64, std: f64, trials: usize) -> f64 {
    let se = std / (trials as f64).sqrt();
    if se > 0.0 {
        dev / se
    } else if dev == 0.0 {
        0.0
    } else {
        dev.signum() * f64::INFINITY
    }
}

fn label(r: &SweepRow) -> String {
    let mut s = r.strategy.clone();
    if let (Some(d), Some(n)) = (r.d, r.n) {
        let _ = write!(s, " d={d} n={n}");
    }
    if let Some(l) = r.lambda {
        let _ = write!(s, " lambda={l:e}");
    }
    if let Some(rho) = r.rho {
        let _ = write!(s, " rho={rho}");
    }
    s
}

impl ComparisonReport {
    pub fn from_rows(rows: &[SweepRow], abs_tolerance: f64, z_tolerance: f64) -> Self {
        let mut out = Vec::new();
        let mut skipped = 0;
        for r in rows {
            match (r.theory_error, r.empirical_mean, r.empirical_std, r.trials) {
                (Some(t), Some(mean), Some(std), Some(trials)) if trials > 0 => {
                    let dev = mean - t;
                    out.push(ComparisonRow {
                        cell_id: r.cell_id,
                        label: label(r),
                        theory_error: t,
                        empirical_mean: mean,
                        empirical_std: std,
                        trials,
                        abs_deviation: dev.abs(),
                        z_score: z_score(dev, std, trials),
                    });
                }
                _ => skipped += 1,
            }
        }
        let summary = summarize(&out, skipped, abs_tolerance, z_tolerance);
        Self { rows: out, summary }
    }

    /// One line: cell count, max deviation and the two coverage fractions.
    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        format!(
            "cells={} skipped={} max_abs_deviation={:.5} within_{}={:.3} within_{}se={:.3}",
            s.cells,
            s.skipped,
            s.max_abs_deviation,
            s.abs_tolerance,
            s.fraction_within_abs,
            s.z_tolerance,
            s.fraction_within_z
        )
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>5}  {:>9}  {:>9}  {:>8}  {:>7}  configuration",
            "cell", "theory", "empirical", "|dev|", "z"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>5}  {:>9.5}  {:>9.5}  {:>8.5}  {:>7.2}  {}",
                r.cell_id, r.theory_error, r.empirical_mean, r.abs_deviation, r.z_score, r.label
            );
        }
        out
    }
}

/// Summary statistics, recomputable from the rows alone.
pub fn summarize(
    rows: &[ComparisonRow],
    skipped: usize,
    abs_tolerance: f64,
    z_tolerance: f64,
) -> ComparisonSummary {
    let cells = rows.len();
    let frac = |pred: &dyn Fn(&ComparisonRow) -> bool| {
        if cells == 0 {
            0.0
        } else {
            rows.iter().filter(|r| pred(r)).count() as f64 / cells as f64
        }
    };
    ComparisonSummary {
        cells,
        skipped,
        max_abs_deviation: rows.iter().map(|r| r.abs_deviation).fold(0.0, f64::max),
        abs_tolerance,
        fraction_within_abs: frac(&|r| r.abs_deviation <= abs_tolerance),
        z_tolerance,
        fraction_within_z: frac(&|r| r.z_score.abs() <= z_tolerance),
    }
}
