//! The `prunelab` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn prunelab(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prunelab"))
        .args(args)
        .env("PRUNELAB_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn theory_prints_stieltjes_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = prunelab(
        &[
            "theory",
            "--p",
            "1",
            "--phi",
            "1",
            "--lambda",
            "1",
            "--strategy",
            "all",
            "--rho",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("m = "))
        .unwrap()
        .to_string();
    let m: f64 = line[4..].parse().unwrap();
    assert!((m - 0.618_033_988_749_894_8).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = prunelab(&["theory", "--no-such-flag"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("usage"));

    let o = prunelab(
        &[
            "theory",
            "--phi",
            "0.5",
            "--lambda",
            "0",
            "--strategy",
            "kh",
            "--p",
            "0.5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = prunelab(&["plot", "--csv", "/definitely/not/here.csv"], dir.path());
    assert_eq!(o.status.code(), Some(3));

    let o = prunelab(&["--version"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn simulate_reports_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let o = prunelab(
        &[
            "simulate",
            "--d",
            "40",
            "--n",
            "120",
            "--strategy",
            "ke:xi=0.5",
            "--rho",
            "0.7",
            "--trials",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(
        s.contains("empirical_mean = ") && s.contains("theory_error = "),
        "{s}"
    );
}

#[test]
fn sweep_uses_env_out_dir_and_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.cfg");
    std::fs::write(
        &cfg,
        "[sweep]\nname = grid\n[base]\nd = 64\nrho = 0.9\nstrategy = kh:xi=1.0\n\
         [axes]\np = 1.0, 0.5\nn = 64, 128, 256\n[output]\nsvg = grid.svg\nplot_series = p\n",
    )
    .unwrap();
    let o = prunelab(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    let svg = std::fs::read_to_string(dir.path().join("grid.svg")).unwrap();
    assert_eq!(svg.matches("class=\"legend\"").count(), 2);
}

#[test]
fn compare_small_grid_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(
        &cfg,
        "[sweep]\nname = c\ntrials = 5\n[base]\nd = 30\nstrategy = kh:xi=1.0\n[axes]\nn = 60, 120\n",
    )
    .unwrap();
    let o = prunelab(
        &["compare", "--config", cfg.to_str().unwrap(), "--table"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("max_abs_deviation="));
}

#[test]
fn dp_writes_history_and_paired_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = prunelab(
        &[
            "dp",
            "--d",
            "16",
            "--n-initial",
            "32",
            "--batch",
            "16",
            "--steps",
            "12",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let hist = std::fs::read_to_string(dir.path().join("dp_history.csv")).unwrap();
    assert!(hist.lines().nth(1).unwrap().starts_with("warmup,0,32"));

    let o = prunelab(
        &[
            "dp",
            "--d",
            "16",
            "--n-initial",
            "32",
            "--batch",
            "16",
            "--steps",
            "12",
            "--paired",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("win_rate = "));
}
