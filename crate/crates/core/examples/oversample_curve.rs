//! Generate-then-prune at a fixed kept count: accuracy first improves with
//! the over-sampling ratio N/m, then degrades once pruning is too aggressive.

use prunelab::selection::{scalars, SelectionStrategy};
use prunelab::spectral::{theory_test_error, RegimeParams};

fn main() -> prunelab::Result<()> {
    let (d, kept, lambda, rho) = (512usize, 2048.0, 1e-3, 0.9);
    println!("{:>10} {:>8} {:>9}", "N/m", "pool", "accuracy");
    for p in [1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02] {
        let sc = scalars(&SelectionStrategy::keep_hard_with_probability(p)?, rho)?;
        let n = (kept / sc.p).round() as usize;
        let err = theory_test_error(&RegimeParams::from_dims(d, n, lambda, sc.p)?, &sc)?.test_error;
        println!("{:>10.2} {n:>8} {:>9.4}", 1.0 / sc.p, 1.0 - err);
    }
    Ok(())
}
