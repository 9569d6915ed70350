//! Grid evaluation: theory at every cell, Monte Carlo when requested.

use super::config::{Axis, AxisValues, SweepSpec};
use super::schema::{write_rows, SweepRow};
use crate::error::{invalid, Error, Result};
use crate::parallel::map_indexed;
use crate::rng::derive_seed;
use crate::selection::{scalars, SelectionStrategy};
use crate::simulate::{run_cell, ExperimentConfig};
use crate::spectral::{predict, spectral_state, RegimeParams};
use std::path::Path;

/// Fully resolved parameters of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub strategy: SelectionStrategy,
    pub d: usize,
    pub n: usize,
    pub lambda: f64,
    pub rho: f64,
    pub seed: u64,
}

/// Per-axis value indices of cell `id`; the first axis varies slowest.
fn axis_indices(spec: &SweepSpec, id: usize) -> Vec<usize> {
    let mut rem = id;
    let mut idx = vec![0; spec.axes.len()];
    for (k, (_, values)) in spec.axes.iter().enumerate().rev() {
        idx[k] = rem % values.len();
        rem /= values.len();
    }
    idx
}

fn with_threshold(strategy: SelectionStrategy, xi: f64) -> Result<SelectionStrategy> {
    match strategy {
        SelectionStrategy::KeepHard { .. } => SelectionStrategy::keep_hard(xi),
        SelectionStrategy::KeepEasy { .. } => SelectionStrategy::keep_easy(xi),
        other => Err(invalid(format!(
            "axis `xi` needs a kh or ke strategy, got {other}"
        ))),
    }
}

fn with_probability(strategy: SelectionStrategy, p: f64) -> Result<SelectionStrategy> {
    match strategy {
        SelectionStrategy::KeepHard { .. } => SelectionStrategy::keep_hard_with_probability(p),
        SelectionStrategy::KeepEasy { .. } => SelectionStrategy::keep_easy_with_probability(p),
        SelectionStrategy::KeepAll if p == 1.0 => Ok(SelectionStrategy::KeepAll),
        other => Err(invalid(format!(
            "axis `p` cannot set the keep probability of {other} to {p}"
        ))),
    }
}

/// Resolves cell `id`. On failure the partially resolved cell is returned
/// alongside the error so the row can still describe it.
pub fn resolve_cell(spec: &SweepSpec, id: usize) -> (Cell, Option<Error>) {
    let mut cell = Cell {
        id,
        strategy: spec.base.strategy,
        d: spec.base.d,
        n: spec.base.n,
        lambda: spec.base.lambda,
        rho: spec.base.rho,
        seed: derive_seed(spec.seed, id as u64),
    };
    let idx = axis_indices(spec, id);
    let mut chosen: Vec<(Axis, &AxisValues, usize)> = spec
        .axes
        .iter()
        .zip(&idx)
        .map(|((a, v), &i)| (*a, v, i))
        .collect();
    // strategy before its parameters, p before kept
    chosen.sort_by_key(|(a, _, _)| *a);

    for (axis, values, i) in chosen {
        let step = match (axis, values) {
            (Axis::Strategy, AxisValues::Strategies(v)) => {
                cell.strategy = v[i];
                Ok(())
            }
            (Axis::Exponent, AxisValues::Reals(v)) => match cell.strategy {
                SelectionStrategy::SigmoidPower { .. } => {
                    SelectionStrategy::sigmoid_power(v[i]).map(|s| cell.strategy = s)
                }
                other => Err(invalid(format!(
                    "axis `exponent` needs a sig strategy, got {other}"
                ))),
            },
            (Axis::Xi, AxisValues::Reals(v)) => {
                with_threshold(cell.strategy, v[i]).map(|s| cell.strategy = s)
            }
            (Axis::P, AxisValues::Reals(v)) => {
                with_probability(cell.strategy, v[i]).map(|s| cell.strategy = s)
            }
            (Axis::Rho, AxisValues::Reals(v)) => {
                cell.rho = v[i];
                Ok(())
            }
            (Axis::Lambda, AxisValues::Reals(v)) => {
                cell.lambda = v[i];
                Ok(())
            }
            (Axis::D, AxisValues::Integers(v)) => {
                cell.d = v[i];
                Ok(())
            }
            (Axis::N, AxisValues::Integers(v)) => {
                cell.n = v[i];
                Ok(())
            }
            (Axis::Kept, AxisValues::Integers(v)) => scalars(&cell.strategy, 0.0).and_then(|s| {
                if s.p <= 0.0 {
                    return Err(invalid("axis `kept` needs a positive keep probability"));
                }
                cell.n = ((v[i] as f64 / s.p).round() as usize).max(1);
                Ok(())
            }),
            (axis, _) => Err(invalid(format!(
                "axis `{}` has values of the wrong type",
                axis.name()
            ))),
        };
        if let Err(e) = step {
            return (cell, Some(e));
        }
    }
    (cell, None)
}

fn describe(cell: &Cell) -> SweepRow {
    SweepRow {
        cell_id: cell.id,
        strategy: cell.strategy.to_string(),
        xi: cell.strategy.threshold(),
        exponent: cell.strategy.exponent(),
        d: Some(cell.d),
        n: Some(cell.n),
        phi: (cell.n > 0).then(|| cell.d as f64 / cell.n as f64),
        lambda: Some(cell.lambda),
        rho: Some(cell.rho),
        seed: cell.seed,
        ..SweepRow::default()
    }
}

/// Theory columns; returns the first error met.
fn fill_theory(cell: &Cell, row: &mut SweepRow) -> Result<()> {
    let sc = scalars(&cell.strategy, cell.rho)?;
    row.p = Some(sc.p);
    row.gamma = Some(sc.gamma);
    row.beta = Some(sc.beta);
    row.beta_tilde = Some(sc.beta_tilde);
    let params = RegimeParams::from_dims(cell.d, cell.n, cell.lambda, sc.p)?;
    if cell.lambda > 0.0 {
        let st = spectral_state(&params, &sc)?;
        row.m = Some(st.m);
        row.m_prime = Some(st.m_prime);
        row.m_tilde = Some(st.m_tilde);
    }
    let pred = predict(&params, &sc)?;
    row.m0 = Some(pred.m0);
    row.nu0 = Some(pred.nu0);
    row.theory_error = Some(pred.test_error);
    Ok(())
}

fn fill_empirical(spec: &SweepSpec, cell: &Cell, row: &mut SweepRow) -> Result<()> {
    let config = ExperimentConfig::new(
        cell.d,
        cell.n,
        cell.lambda,
        cell.strategy,
        cell.rho,
        spec.trials,
        cell.seed,
    )?;
    let summary = run_cell(&config)?;
    row.empirical_mean = Some(summary.mean);
    row.empirical_std = Some(summary.std);
    row.trials = Some(summary.trials);
    Ok(())
}

/// Evaluates one cell. Failures are recorded in `error_code`, never raised.
pub fn evaluate_cell(spec: &SweepSpec, id: usize) -> SweepRow {
    let (cell, resolve_error) = resolve_cell(spec, id);
    let mut row = describe(&cell);
    if let Some(e) = resolve_error {
        row.error_code = e.code().to_string();
        return row;
    }
    let theory = fill_theory(&cell, &mut row);
    let empirical = if spec.empirical {
        fill_empirical(spec, &cell, &mut row)
    } else {
        Ok(())
    };
    if let Some(e) = theory.err().or(empirical.err()) {
        row.error_code = e.code().to_string();
    }
    row
}

/// Evaluates every cell on up to `workers` threads. Rows come back in cell
/// order whatever the schedule.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(map_indexed(workers, spec.cell_count(), |id| {
        evaluate_cell(spec, id)
    }))
}

/// Runs the sweep and writes its CSV to `path`.
pub fn run_sweep_to_csv(spec: &SweepSpec, workers: usize, path: &Path) -> Result<Vec<SweepRow>> {
    let rows = run_sweep(spec, workers)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_rows(std::fs::File::create(path)?, &rows)?;
    Ok(rows)
}
