//! The Stieltjes transform of the pruned sample covariance, its derivative
//! and the companion m̃, compared with the fixed-point iteration.

use prunelab::selection::{scalars, SelectionStrategy};
use prunelab::spectral::{fixed_point_t, spectral_state, stieltjes_m, RegimeParams};

fn main() -> prunelab::Result<()> {
    // p = 1, φ = 1, λ = 1 gives the golden ratio conjugate
    let golden = stieltjes_m(&RegimeParams::new(1.0, 1.0, 1.0)?)?;
    println!("m(p=1, phi=1, lambda=1) = {golden:.12}");

    let sc = scalars(&SelectionStrategy::keep_hard(0.8)?, 0.9)?;
    println!(
        "\nkeep-hard xi=0.8, rho=0.9 (p = {:.4}), lambda = 1e-2",
        sc.p
    );
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "phi", "m", "m'", "m~", "z + 1/m - t"
    );
    for phi in [0.1, 0.3, 0.5, 0.9, 2.0] {
        let params = RegimeParams::new(phi, 1e-2, sc.p)?;
        let st = spectral_state(&params, &sc)?;
        let t = fixed_point_t(&params)?;
        let gap = -params.lambda + 1.0 / st.m - t;
        println!(
            "{phi:>6} {:>12.6} {:>12.4} {:>12.6} {:>12.1e}",
            st.m, st.m_prime, st.m_tilde, gap
        );
    }
    Ok(())
}
