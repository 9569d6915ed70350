//! One configuration simulated at finite d and compared with the prediction.

use prunelab::selection::{scalars, SelectionStrategy};
use prunelab::simulate::{run_cell_with, ExperimentConfig};
use prunelab::spectral::{theory_test_error, RegimeParams};

fn main() -> prunelab::Result<()> {
    let (d, lambda, rho) = (200, 1e-2, 0.8);
    let strategy = SelectionStrategy::keep_hard(1.0)?;
    let sc = scalars(&strategy, rho)?;
    println!("{strategy}, rho = {rho}, d = {d}, lambda = {lambda}");
    println!(
        "{:>6} {:>9} {:>11} {:>9}",
        "n", "theory", "empirical", "stderr"
    );
    for n in [100, 200, 400, 800, 1600] {
        let params = RegimeParams::from_dims(d, n, lambda, sc.p)?;
        let theory = theory_test_error(&params, &sc)?.test_error;
        let config = ExperimentConfig::new(d, n, lambda, strategy, rho, 40, 7)?;
        let sim = run_cell_with(&config, prunelab::parallel::default_workers())?;
        println!(
            "{n:>6} {theory:>9.4} {:>11.4} {:>9.4}",
            sim.mean, sim.stderr
        );
    }
    Ok(())
}
