//! The λ → 0 prediction on both sides of the interpolation threshold
//! `n·p = d`, and the closed-form pair reported alongside it.

use prunelab::selection::{scalars, SelectionStrategy};
use prunelab::spectral::ridgeless_test_error;

fn main() -> prunelab::Result<()> {
    let sc = scalars(&SelectionStrategy::keep_hard(1.0)?, 0.8)?;
    println!("keep-hard xi=1, rho=0.8, p = {:.4}", sc.p);
    println!(
        "{:>8} {:>17} {:>10} {:>16}",
        "phi/p", "regime", "error", "closed-form pair"
    );
    for r in [0.3, 0.6, 0.9, 0.97, 1.03, 1.1, 1.5, 2.5, 5.0] {
        let pred = ridgeless_test_error(&sc, r * sc.p, sc.p)?;
        let pair = pred
            .closed_form
            .and_then(|c| c.test_error)
            .map(|e| format!("{e:.4}"))
            .unwrap_or_else(|| "invalid".into());
        println!(
            "{r:>8} {:>17} {:>10.4} {pair:>16}",
            pred.regime.to_string(),
            pred.test_error
        );
    }
    println!(
        "\nphi = p itself is rejected: {:?}",
        ridgeless_test_error(&sc, sc.p, sc.p)
            .err()
            .map(|e| e.code())
    );
    Ok(())
}
