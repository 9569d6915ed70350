//! Command-line interface.
//!
//! Exit status: 0 success, 1 usage error, 2 numerically invalid request,
//! 3 I/O failure. `PRUNELAB_OUT_DIR` sets the output directory when `--out`
//! is not given.

use super::config::SweepSpec;
use super::plot::{write_plot, PlotSpec};
use super::presets::{preset, PRESET_NAMES};
use super::report::ComparisonReport;
use super::schema::write_dp_history;
use super::sweep::run_sweep_to_csv;
use crate::error::{invalid, Error, Result};
use crate::parallel::default_workers;
use crate::practice::{compare_adaptive_static_with, run_dp, DPConfig, PatienceMode};
use crate::selection::{scalars_quadrature, SelectionStrategy, DEFAULT_NODES};
use crate::simulate::{run_cell_with, ExperimentConfig};
use crate::spectral::{predict, spectral_state, RegimeParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "PRUNELAB_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "prunelab",
    version,
    about = "Test-error predictions and simulations for linear classifiers trained on pruned Gaussian data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predict the test error of one configuration.
    Theory(TheoryArgs),
    /// Simulate one configuration and compare with the prediction.
    Simulate(SimulateArgs),
    /// Run a sweep from a config file or preset and write its CSV.
    Sweep(SweepArgs),
    /// Run the patience-driven pool growth loop.
    Dp(DpArgs),
    /// Compare theory and simulation over a sweep.
    Compare(CompareArgs),
    /// Render an SVG chart from a sweep CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct CellArgs {
    /// Selection rule: all, kh:xi=<v>, ke:xi=<v>, sig:w=<v>; bare kh/ke with --p.
    #[arg(long, default_value = "all")]
    strategy: String,
    /// Keep probability; picks the threshold for a bare kh/ke strategy.
    #[arg(long)]
    p: Option<f64>,
    /// Alignment of the pruning direction with the labeler.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 1e-2)]
    lambda: f64,
}

impl CellArgs {
    fn strategy(&self) -> Result<SelectionStrategy> {
        let s = self.strategy.trim();
        let strategy = match (s, self.p) {
            ("kh", Some(p)) => SelectionStrategy::keep_hard_with_probability(p)?,
            ("ke", Some(p)) => SelectionStrategy::keep_easy_with_probability(p)?,
            _ => s.parse()?,
        };
        Ok(strategy)
    }

    fn check_p(&self, actual: f64) -> Result<()> {
        match self.p {
            Some(p) if (p - actual).abs() > 1e-9 => Err(invalid(format!(
                "--p {p} disagrees with the keep probability {actual} of {}",
                self.strategy
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[command(flatten)]
    cell: CellArgs,
    /// d/n; alternatively give --d and --n.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Quadrature nodes for strategies without a closed form.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    cell: CellArgs,
    #[arg(long, default_value_t = 350)]
    d: usize,
    #[arg(long, default_value_t = 700)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Also estimate each trial's error on this many fresh test points.
    #[arg(long, default_value_t = 0)]
    mc_test_points: usize,
}

#[derive(Debug, Args)]
struct SweepSource {
    /// Sweep configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in sweep: theory-scaling, figcool, figcool-small, oversample-curve.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per cell (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepSource {
    fn load(&self) -> Result<SweepSpec> {
        let mut spec = match (&self.config, &self.preset) {
            (Some(path), None) => SweepSpec::from_file(path)?,
            (None, Some(name)) => preset(name)?,
            _ => {
                return Err(invalid(format!(
                    "give --config <file> or --preset <{}>",
                    PRESET_NAMES.join("|")
                )))
            }
        };
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(w) = self.workers {
            spec.workers = w;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SweepSource,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatienceArg {
    Fixed,
    Incremental,
}

#[derive(Debug, Args)]
struct DpArgs {
    #[arg(long, default_value_t = 64)]
    d: usize,
    /// Initial pool size N.
    #[arg(long, default_value_t = 128)]
    n_initial: usize,
    /// Examples added per augmentation, P.
    #[arg(long, default_value_t = 128)]
    batch: usize,
    #[arg(long, default_value_t = 1)]
    eval_interval: usize,
    /// Patience; `inf` disables augmentation.
    #[arg(long, default_value = "2")]
    t_max: String,
    #[arg(long, value_enum, default_value_t = PatienceArg::Fixed)]
    patience: PatienceArg,
    #[arg(long, default_value_t = 60)]
    steps: usize,
    #[arg(long, default_value = "kh:xi=0.5")]
    strategy: String,
    /// Keep the pruning direction frozen at the initial fit.
    #[arg(long)]
    frozen: bool,
    #[arg(long, default_value_t = 1e-2)]
    lambda: f64,
    #[arg(long, default_value_t = 2048)]
    validation_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run refreshed and frozen arms on this many paired seeds instead.
    #[arg(long)]
    paired: Option<usize>,
    /// Worker threads for --paired; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// History CSV path (default dp_history.csv in the output directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl DpArgs {
    fn config(&self) -> Result<DPConfig> {
        let t_max = match self.t_max.trim() {
            "inf" | "none" => None,
            s => Some(
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad --t-max `{s}`: {e}")))?,
            ),
        };
        let config = DPConfig {
            n_initial: self.n_initial,
            batch_size: self.batch,
            eval_interval: self.eval_interval,
            t_max,
            patience_mode: match self.patience {
                PatienceArg::Fixed => PatienceMode::Fixed,
                PatienceArg::Incremental => PatienceMode::Incremental,
            },
            total_steps: self.steps,
            selection: self.strategy.parse()?,
            refresh_direction: !self.frozen,
            d: self.d,
            lambda: self.lambda,
            validation_size: self.validation_size,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    source: SweepSource,
    #[arg(long, default_value_t = 0.02)]
    abs_tol: f64,
    #[arg(long, default_value_t = 3.0)]
    z_tol: f64,
    /// Print every cell, not just the summary.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV to plot.
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = "n")]
    x: String,
    #[arg(long, default_value = "theory_error")]
    y: String,
    /// Column that splits curves; `none` for a single curve.
    #[arg(long, default_value = "strategy")]
    series: String,
    #[arg(long)]
    log_x: bool,
    #[arg(long)]
    log_y: bool,
    #[arg(long)]
    title: Option<String>,
    /// SVG path (default: the CSV path with an .svg extension).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn workers(w: usize) -> usize {
    if w == 0 {
        default_workers()
    } else {
        w
    }
}

fn print_fields(out: &mut impl Write, fields: &[(&str, String)]) -> Result<()> {
    for (k, v) in fields {
        writeln!(out, "{k} = {v}")?;
    }
    Ok(())
}

fn cmd_theory(args: &TheoryArgs, out: &mut impl Write) -> Result<()> {
    let strategy = args.cell.strategy()?;
    let sc = scalars_quadrature_or_closed(&strategy, args.cell.rho, args.nodes)?;
    args.cell.check_p(sc.p)?;
    let phi = match (args.phi, args.d, args.n) {
        (Some(phi), None, None) => phi,
        (None, Some(d), Some(n)) if n > 0 => d as f64 / n as f64,
        _ => return Err(invalid("give either --phi or both --d and --n")),
    };
    let params = RegimeParams::new(phi, args.cell.lambda, sc.p)?;
    let mut fields = vec![
        ("strategy", strategy.to_string()),
        ("p", sc.p.to_string()),
        ("rho", sc.rho.to_string()),
        ("gamma", sc.gamma.to_string()),
        ("beta", sc.beta.to_string()),
        ("beta_tilde", sc.beta_tilde.to_string()),
        ("phi", phi.to_string()),
        ("lambda", args.cell.lambda.to_string()),
    ];
    if params.lambda > 0.0 {
        let st = spectral_state(&params, &sc)?;
        fields.extend([
            ("m", st.m.to_string()),
            ("m_prime", st.m_prime.to_string()),
            ("s", st.s.to_string()),
            ("m_tilde", st.m_tilde.to_string()),
            ("m_tilde_prime", st.m_tilde_prime.to_string()),
            ("r_mean", st.r_mean.to_string()),
            ("r_var", st.r_var.to_string()),
            ("r_quadratic", st.r_quadratic.to_string()),
        ]);
    }
    let pred = predict(&params, &sc)?;
    fields.extend([
        ("regime", pred.regime.to_string()),
        ("m0", pred.m0.to_string()),
        ("nu0", pred.nu0.to_string()),
        ("cosine", pred.cosine.to_string()),
        ("test_error", pred.test_error.to_string()),
        (
            "gaussian_margin_error",
            pred.gaussian_margin_error.to_string(),
        ),
    ]);
    if let Some(c) = pred.closed_form {
        fields.push(("closed_form_a", c.a.to_string()));
        fields.push(("closed_form_b", c.b.to_string()));
        fields.push((
            "closed_form_test_error",
            c.test_error
                .map(|e| e.to_string())
                .unwrap_or_else(|| "invalid".into()),
        ));
    }
    print_fields(out, &fields)
}

/// Closed form when available; quadrature with `nodes` otherwise.
fn scalars_quadrature_or_closed(
    strategy: &SelectionStrategy,
    rho: f64,
    nodes: usize,
) -> Result<crate::selection::StrategyScalars> {
    match crate::selection::scalars_closed_form(strategy, rho) {
        Err(Error::NoClosedForm(_)) => scalars_quadrature(strategy, rho, nodes),
        other => other,
    }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut impl Write) -> Result<()> {
    let strategy = args.cell.strategy()?;
    let mut config = ExperimentConfig::new(
        args.d,
        args.n,
        args.cell.lambda,
        strategy,
        args.cell.rho,
        args.trials,
        args.seed,
    )?;
    config.mc_test_points = args.mc_test_points;
    let summary = run_cell_with(&config, workers(args.workers))?;
    let sc = scalars_quadrature_or_closed(&strategy, args.cell.rho, DEFAULT_NODES)?;
    args.cell.check_p(sc.p)?;
    let mut fields = vec![
        ("strategy", strategy.to_string()),
        ("d", args.d.to_string()),
        ("n", args.n.to_string()),
        ("trials", summary.trials.to_string()),
        ("failures", summary.failures.to_string()),
        ("kept_mean", summary.kept_mean.to_string()),
        ("empirical_mean", summary.mean.to_string()),
        ("empirical_std", summary.std.to_string()),
        ("empirical_stderr", summary.stderr.to_string()),
    ];
    let params = RegimeParams::from_dims(args.d, args.n, args.cell.lambda, sc.p)?;
    match predict(&params, &sc) {
        Ok(pred) => {
            fields.push(("theory_error", pred.test_error.to_string()));
            fields.push(("deviation", (summary.mean - pred.test_error).to_string()));
        }
        Err(e) => fields.push(("theory_error", format!("unavailable ({})", e.code()))),
    }
    print_fields(out, &fields)
}

fn run_spec(
    source: &SweepSource,
    spec: &SweepSpec,
    out: &mut impl Write,
) -> Result<Vec<super::schema::SweepRow>> {
    let dir = out_dir(&source.out);
    let csv_name = spec
        .output
        .csv
        .clone()
        .unwrap_or_else(|| format!("{}.csv", spec.name));
    let csv_path = dir.join(csv_name);
    let rows = run_sweep_to_csv(spec, workers(spec.workers), &csv_path)?;
    writeln!(out, "wrote {} rows to {}", rows.len(), csv_path.display())?;
    let mut codes: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.error_code.is_empty()) {
        *codes.entry(r.error_code.as_str()).or_default() += 1;
    }
    for (code, count) in codes {
        writeln!(out, "cells with error `{code}`: {count}")?;
    }
    if let Some(svg) = &spec.output.svg {
        let o = &spec.output;
        let plot = PlotSpec {
            x: o.plot_x.clone().unwrap_or_else(|| "n".into()),
            y: o.plot_y.clone().unwrap_or_else(|| "theory_error".into()),
            series: o.plot_series.clone(),
            log_x: o.log_x,
            log_y: o.log_y,
            title: Some(spec.name.clone()),
        };
        let svg_path = dir.join(svg);
        write_plot(&csv_path, &plot, &svg_path)?;
        writeln!(out, "wrote {}", svg_path.display())?;
    }
    Ok(rows)
}

fn cmd_sweep(args: &SweepArgs, out: &mut impl Write) -> Result<()> {
    let spec = args.source.load()?;
    run_spec(&args.source, &spec, out).map(|_| ())
}

fn cmd_compare(args: &CompareArgs, out: &mut impl Write) -> Result<()> {
    let mut spec = args.source.load()?;
    spec.empirical = true;
    let rows = run_spec(&args.source, &spec, out)?;
    let report = ComparisonReport::from_rows(&rows, args.abs_tol, args.z_tol);
    if args.table {
        write!(out, "{}", report.render_table())?;
    }
    writeln!(out, "{}", report.summary_line())?;
    Ok(())
}

fn cmd_dp(args: &DpArgs, out: &mut impl Write) -> Result<()> {
    let config = args.config()?;
    if let Some(n_seeds) = args.paired {
        let r = compare_adaptive_static_with(&config, n_seeds, workers(args.workers))?;
        return print_fields(
            out,
            &[
                ("seeds", n_seeds.to_string()),
                ("adaptive_mean_error", r.adaptive_mean.to_string()),
                ("static_mean_error", r.static_mean.to_string()),
                ("mean_delta", r.mean_delta.to_string()),
                ("paired_se", r.paired_se.to_string()),
                ("win_rate", r.win_rate.to_string()),
                ("ties", r.ties.to_string()),
                (
                    "win_rate_ci95",
                    format!("[{:.4}, {:.4}]", r.win_rate_ci.0, r.win_rate_ci.1),
                ),
            ],
        );
    }
    let history = run_dp(&config)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| out_dir(&None).join("dp_history.csv"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_dp_history(std::fs::File::create(&path)?, &history)?;
    print_fields(
        out,
        &[
            ("augmentations", history.augmentations.to_string()),
            ("final_pool_size", history.final_pool_size.to_string()),
            ("final_test_error", history.final_test_error.to_string()),
            ("degenerate", history.degenerate.to_string()),
            ("history", path.display().to_string()),
        ],
    )
}

fn cmd_plot(args: &PlotArgs, out: &mut impl Write) -> Result<()> {
    let spec = PlotSpec {
        x: args.x.clone(),
        y: args.y.clone(),
        series: (args.series != "none").then(|| args.series.clone()),
        log_x: args.log_x,
        log_y: args.log_y,
        title: args.title.clone(),
    };
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| args.csv.with_extension("svg"));
    write_plot(Path::new(&args.csv), &spec, &path)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit status.
pub fn run_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => 1,
            };
        }
    };
    let result = match &cli.command {
        Command::Theory(a) => cmd_theory(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Dp(a) => cmd_dp(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Plot(a) => cmd_plot(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error [{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process arguments and standard streams.
pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
