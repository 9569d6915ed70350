//! A small sweep from config text to CSV, comparison report and SVG chart.
//! Output goes to the directory given as the first argument (default: a
//! temporary directory).

use prunelab::harness::sweep::run_sweep_to_csv;
use prunelab::harness::{write_plot, ComparisonReport, PlotSpec, SweepSpec};
use std::path::PathBuf;

const CONFIG: &str = "\
[sweep]
name = demo
seed = 3
trials = 20
empirical = true

[base]
d = 100
lambda = 1e-2
rho = 1
strategy = kh:xi=1.0

[axes]
xi = 0.5, 1.5
n = 50, 100, 150, 200, 300, 450
";

fn main() -> prunelab::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let spec: SweepSpec = CONFIG.parse()?;
    let csv = dir.join("demo.csv");
    let rows = run_sweep_to_csv(&spec, prunelab::parallel::default_workers(), &csv)?;
    let report = ComparisonReport::from_rows(&rows, 0.02, 3.0);
    print!("{}", report.render_table());
    println!("{}", report.summary_line());

    let svg = dir.join("demo.svg");
    let plot = PlotSpec {
        y: "empirical_mean".into(),
        ..PlotSpec::default()
    };
    write_plot(&csv, &plot, &svg)?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
