//! Accuracy against kept-sample count for several keep probabilities at
//! d = 512: harder selection wins in the mid range, extreme pruning loses.

use prunelab::selection::{scalars, SelectionStrategy};
use prunelab::spectral::{theory_test_error, RegimeParams};

fn main() -> prunelab::Result<()> {
    let (d, lambda, rho) = (512usize, 1e-3, 0.9);
    let ps = [1.0, 0.8, 0.5, 0.2, 0.02];
    print!("{:>7}", "kept");
    for p in ps {
        print!(" {:>8}", format!("p={p}"));
    }
    println!();
    for kept in [128usize, 256, 512, 1024, 2048, 4096, 8192, 16384] {
        print!("{kept:>7}");
        for p in ps {
            let sc = scalars(&SelectionStrategy::keep_hard_with_probability(p)?, rho)?;
            let n = (kept as f64 / sc.p).round() as usize;
            let err =
                theory_test_error(&RegimeParams::from_dims(d, n, lambda, sc.p)?, &sc)?.test_error;
            print!(" {:>8.4}", 1.0 - err);
        }
        println!();
    }
    Ok(())
}
