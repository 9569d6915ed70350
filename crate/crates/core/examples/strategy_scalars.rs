//! Strategy scalars (p, γ, β, β̃) for each selection rule, by closed form and
//! by quadrature.

use prunelab::selection::{scalars_closed_form, scalars_quadrature, SelectionStrategy};

fn main() -> prunelab::Result<()> {
    let strategies = [
        SelectionStrategy::KeepAll,
        SelectionStrategy::keep_hard(1.0)?,
        SelectionStrategy::keep_easy(1.0)?,
        SelectionStrategy::keep_hard_with_probability(0.3)?,
        SelectionStrategy::sigmoid_power(2.0)?,
    ];
    println!(
        "{:<28} {:>5} {:>9} {:>9} {:>9} {:>9}  route",
        "strategy", "rho", "p", "gamma", "beta", "beta~"
    );
    for s in strategies {
        for rho in [0.5, 1.0] {
            let (sc, route) = match scalars_closed_form(&s, rho) {
                Ok(sc) => (sc, "closed"),
                Err(_) => (scalars_quadrature(&s, rho, 128)?, "quadrature"),
            };
            println!(
                "{:<28} {:>5} {:>9.6} {:>9.6} {:>9.6} {:>9.6}  {route}",
                s.to_string(),
                rho,
                sc.p,
                sc.gamma,
                sc.beta,
                sc.beta_tilde
            );
        }
    }
    Ok(())
}
