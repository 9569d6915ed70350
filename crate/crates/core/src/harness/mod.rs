//! Sweeps, CSV and SVG output, presets and the command-line front end.

pub mod cli;
pub mod config;
pub mod plot;
pub mod presets;
pub mod report;
pub mod schema;
pub mod sweep;

pub use config::{Axis, AxisValues, BaseConfig, OutputSpec, SweepSpec};
pub use plot::{emit_plot, render_svg, write_plot, PlotSpec};
pub use presets::{preset, PRESET_NAMES};
pub use report::{ComparisonReport, ComparisonRow, ComparisonSummary};
pub use schema::{read_rows, write_rows, SweepRow, COLUMNS, SCHEMA_VERSION};
pub use sweep::{evaluate_cell, resolve_cell, run_sweep, run_sweep_to_csv, Cell};
