//! The patience-driven pool growth loop, its event log, and the paired
//! comparison of refreshed against frozen pruning directions.

use prunelab::practice::{compare_adaptive_static, run_dp, DPConfig, EventKind};

fn main() -> prunelab::Result<()> {
    let config = DPConfig::default();
    let h = run_dp(&config)?;
    for e in h.events.iter().filter(|e| e.kind != EventKind::Evaluation) {
        println!(
            "{:>12} step {:>3}  pool {:>5}  test error {:.4}",
            e.kind.as_str(),
            e.step,
            e.pool_size,
            e.test_error_exact
        );
    }
    println!(
        "augmentations {}, mean margin initial {:.3} vs last batch {:.3}",
        h.augmentations,
        h.initial_margin,
        h.late_margin.unwrap_or(f64::NAN)
    );

    let r = compare_adaptive_static(&config, 10)?;
    println!(
        "\n10 paired seeds: refreshed {:.4}, frozen {:.4}, win rate {:.2} (95% CI {:.2}-{:.2})",
        r.adaptive_mean, r.static_mean, r.win_rate, r.win_rate_ci.0, r.win_rate_ci.1
    );
    Ok(())
}
