//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --release --test acceptance`.

use nalgebra::DVector;
use prunelab::harness::schema::rows_to_string;
use prunelab::harness::{preset, run_sweep, ComparisonReport, SweepRow, SweepSpec};
use prunelab::parallel::default_workers;
use prunelab::practice::{compare_adaptive_static_with, DPConfig};
use prunelab::rng::{stream, Purpose};
use prunelab::selection::{
    mean_vector_coeffs, scalars, scalars_closed_form, scalars_quadrature, SelectionStrategy,
    StrategyScalars,
};
use prunelab::simulate::{estimate_mean_vectors, make_directions};
use prunelab::spectral::{
    ridgeless_test_error, spectral_state, stieltjes_m, theory_test_error, RegimeParams,
};
use rand::Rng;
use std::time::Instant;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn distinct<T: PartialEq + Copy>(rows: &[SweepRow], f: impl Fn(&SweepRow) -> Option<T>) -> usize {
    let mut seen: Vec<T> = Vec::new();
    for v in rows.iter().filter_map(f) {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen.len()
}

fn figcool_reproduction() -> Outcome {
    let spec = preset("figcool").unwrap();
    let start = Instant::now();
    let rows = run_sweep(&spec, default_workers()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let failed = rows.iter().filter(|r| !r.error_code.is_empty()).count();
    let report = ComparisonReport::from_rows(&rows, 0.02, 3.0);
    let s = &report.summary;
    let shape_ok = spec.base.d == 350
        && spec.base.rho == 1.0
        && spec.trials >= 200
        && distinct(&rows, |r| r.n) >= 8
        && distinct(&rows, |r| r.xi.map(f64::to_bits)) >= 3
        && distinct(&rows, |r| r.lambda.map(f64::to_bits)) == 2;
    outcome(
        shape_ok
            && failed == 0
            && s.skipped == 0
            && s.max_abs_deviation <= 0.02
            && s.fraction_within_z >= 0.95,
        format!(
            "{} cells x {} trials, max |dev| = {:.4}, within 3 SE = {:.1}%, {:.0} s",
            s.cells,
            spec.trials,
            s.max_abs_deviation,
            100.0 * s.fraction_within_z,
            secs
        ),
    )
}

fn interpolation_peak() -> Outcome {
    let d = 350;
    let mut details = Vec::new();
    let mut pass = true;
    for xi in [0.5, 1.0, 2.0] {
        let sc = scalars(&SelectionStrategy::keep_hard(xi).unwrap(), 1.0).unwrap();
        let target = d as f64 / sc.p;
        let ns: Vec<usize> = (100..=3000).collect();
        let err: Vec<Option<f64>> = ns
            .iter()
            .map(|&n| {
                let params = RegimeParams::from_dims(d, n, 1e-6, sc.p).ok()?;
                theory_test_error(&params, &sc).ok().map(|p| p.test_error)
            })
            .collect();
        let peaks: Vec<usize> = (1..ns.len() - 1)
            .filter(|&i| match (err[i - 1], err[i], err[i + 1]) {
                (Some(a), Some(b), Some(c)) => b > a && b > c,
                _ => false,
            })
            .map(|i| ns[i])
            .collect();
        let nearest = peaks.iter().copied().min_by(|a, b| {
            (*a as f64 - target)
                .abs()
                .total_cmp(&(*b as f64 - target).abs())
        });
        let ok = nearest.is_some_and(|n| (n as f64 - target).abs() <= 0.1 * target);
        pass &= ok;
        details.push(format!("xi={xi}: d/p={target:.0}, peak n={nearest:?}"));
    }
    outcome(pass, details.join("; "))
}

fn marchenko_pastur() -> Outcome {
    let mut rng = stream(2024, 0, Purpose::Directions);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = 0.2 * 15f64.powf(rng.random::<f64>());
        let lambda = 0.05 * 100f64.powf(rng.random::<f64>());
        let m = stieltjes_m(&RegimeParams::new(phi, lambda, 1.0).unwrap()).unwrap();
        // classical MP transform at z = −λ, textbook root form
        let z = -lambda;
        let b = 1.0 - phi - z;
        let classical = (-b + (b * b - 4.0 * phi * z).sqrt()) / (-2.0 * phi * z);
        worst = worst.max(rel(m, classical));
    }
    outcome(
        worst <= 1e-12,
        format!("20 points, max relative difference {worst:.2e}"),
    )
}

fn scalar_routes() -> Outcome {
    let xis = [0.25, 0.75, 1.5, 2.5];
    let rhos = [-0.5, 0.0, 0.7, 1.0];
    let fields = |s: &StrategyScalars| [s.p, s.gamma, s.beta, s.beta_tilde];
    let (mut route, mut additivity): (f64, f64) = (0.0, 0.0);
    for &xi in &xis {
        for &rho in &rhos {
            let hard = SelectionStrategy::keep_hard(xi).unwrap();
            let easy = SelectionStrategy::keep_easy(xi).unwrap();
            let all = scalars_closed_form(&SelectionStrategy::KeepAll, rho).unwrap();
            let (h, e) = (
                scalars_closed_form(&hard, rho).unwrap(),
                scalars_closed_form(&easy, rho).unwrap(),
            );
            for s in [hard, easy] {
                let a = fields(&scalars_closed_form(&s, rho).unwrap());
                let b = fields(&scalars_quadrature(&s, rho, 128).unwrap());
                for (x, y) in a.iter().zip(&b) {
                    route = route.max((x - y).abs());
                }
            }
            for ((x, y), z) in fields(&h).iter().zip(&fields(&e)).zip(&fields(&all)) {
                additivity = additivity.max((x + y - z).abs());
            }
        }
    }
    outcome(
        route <= 1e-8 && additivity <= 1e-10,
        format!("4x4 grid: closed vs quadrature {route:.1e}, KH+KE-all {additivity:.1e}"),
    )
}

fn derivative_checks() -> Outcome {
    let (mut fd_worst, mut id_worst): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for p in [0.2, 0.5, 0.8, 1.0] {
        let strategy = if p == 1.0 {
            SelectionStrategy::KeepAll
        } else {
            SelectionStrategy::keep_hard_with_probability(p).unwrap()
        };
        let mut sc = scalars(&strategy, 0.7).unwrap();
        sc.p = p;
        for phi in [0.1, 0.45, 1.3, 4.0] {
            for lambda in [0.01, 0.3, 2.0] {
                let at = |l: f64| RegimeParams::new(phi, l, p).unwrap();
                let st = spectral_state(&at(lambda), &sc).unwrap();
                let h = 1e-6;
                let (up, down) = (
                    spectral_state(&at(lambda + h), &sc).unwrap(),
                    spectral_state(&at(lambda - h), &sc).unwrap(),
                );
                // d/dz = −d/dλ
                let fd_m = -(up.m - down.m) / (2.0 * h);
                let fd_mt = -(up.m_tilde - down.m_tilde) / (2.0 * h);
                fd_worst = fd_worst
                    .max(rel(st.m_prime, fd_m))
                    .max(rel(st.m_tilde_prime, fd_mt));

                let u = 1.0 + phi * st.m;
                let m_id = st.m * st.m / (1.0 - p * phi * st.m * st.m / (u * u));
                let mt_id = st.m_tilde.powi(2) * (sc.gamma * phi * st.m_prime / (u * u) + 1.0);
                id_worst = id_worst
                    .max(rel(st.m_prime, m_id))
                    .max(rel(st.m_tilde_prime, mt_id));
                count += 1;
            }
        }
    }
    outcome(
        count == 48 && fd_worst <= 1e-6 && id_worst <= 1e-8,
        format!("{count} points: finite differences {fd_worst:.1e}, identities {id_worst:.1e}"),
    )
}

fn ridgeless_consistency() -> Outcome {
    let strategies = [
        SelectionStrategy::KeepAll,
        SelectionStrategy::keep_hard(0.5).unwrap(),
        SelectionStrategy::keep_hard(1.0).unwrap(),
        SelectionStrategy::keep_hard(2.0).unwrap(),
        SelectionStrategy::keep_easy(0.5).unwrap(),
        SelectionStrategy::keep_easy(1.0).unwrap(),
    ];
    let phis = [0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.2, 1.5, 2.0, 3.0, 5.0];
    let (mut worst, mut cells, mut under, mut over): (f64, usize, usize, usize) = (0.0, 0, 0, 0);
    let mut failures = 0;
    for s in strategies {
        for rho in [0.3, 0.8, 1.0] {
            let sc = scalars(&s, rho).unwrap();
            for phi in phis {
                if (phi - sc.p).abs() < 0.05 {
                    continue;
                }
                let ridge =
                    RegimeParams::new(phi, 1e-8, sc.p).and_then(|pr| theory_test_error(&pr, &sc));
                match (ridgeless_test_error(&sc, phi, sc.p), ridge) {
                    (Ok(a), Ok(b)) => worst = worst.max((a.test_error - b.test_error).abs()),
                    _ => failures += 1,
                }
                cells += 1;
                if phi < sc.p {
                    under += 1;
                } else {
                    over += 1;
                }
            }
        }
    }
    outcome(
        failures == 0 && under > 0 && over > 0 && worst <= 1e-3,
        format!("{cells} cells ({under} phi<p, {over} phi>p), {failures} failed, max |delta| {worst:.1e}"),
    )
}

fn scaling_benefit() -> Outcome {
    let rows = run_sweep(&preset("theory-scaling").unwrap(), 1).unwrap();
    let error = |p: f64, kept: usize| {
        rows.iter()
            .find(|r| {
                (r.p.unwrap() - p).abs() < 1e-9
                    && (r.n.unwrap() as f64 * r.p.unwrap()).round() as usize == kept
            })
            .and_then(|r| r.theory_error)
    };
    let kepts = [512, 724, 1024, 1448, 2048, 2896, 4096];
    let wins: Vec<usize> = kepts
        .iter()
        .copied()
        .filter(|&k| matches!((error(0.5, k), error(1.0, k)), (Some(h), Some(a)) if h < a))
        .collect();
    let all_kept = [
        128, 256, 362, 512, 724, 1024, 1448, 2048, 2896, 4096, 5793, 8192, 16384,
    ];
    let degraded = all_kept
        .iter()
        .all(|&k| matches!((error(0.02, k), error(0.5, k)), (Some(x), Some(h)) if x > h));
    let at = 2048;
    outcome(
        !wins.is_empty() && degraded,
        format!(
            "KH p=0.5 beats all at kept {wins:?}; at kept={at}: all {:.4}, p=0.5 {:.4}, p=0.02 {:.4}",
            error(1.0, at).unwrap_or(f64::NAN),
            error(0.5, at).unwrap_or(f64::NAN),
            error(0.02, at).unwrap_or(f64::NAN)
        ),
    )
}

fn mean_vector_coefficients() -> Outcome {
    let cases = [
        (SelectionStrategy::KeepAll, 0.5),
        (SelectionStrategy::keep_hard(1.0).unwrap(), 0.6),
        (SelectionStrategy::keep_hard(0.5).unwrap(), 1.0),
        (SelectionStrategy::keep_easy(0.8).unwrap(), 0.3),
        (SelectionStrategy::keep_easy(1.2).unwrap(), -0.9),
        (SelectionStrategy::sigmoid_power(2.0).unwrap(), 0.5),
    ];
    let d = 8;
    let (mut min_cos, mut max_rel): (f64, f64) = (1.0, 0.0);
    for (i, (s, rho)) in cases.into_iter().enumerate() {
        let mut rng = stream(31, i as u64, Purpose::MeanVectors);
        let (w0, ws) = make_directions(d, rho, &mut rng).unwrap();
        let c_hat = estimate_mean_vectors(&s, &ws, &w0, 1_000_000, &mut rng);
        let coeffs = mean_vector_coeffs(&s, rho).unwrap();
        let residual = &w0 - &ws * ws.dot(&w0);
        let v = if residual.norm() > 1e-12 {
            residual.normalize()
        } else {
            DVector::zeros(d)
        };
        let c = &ws * coeffs.along_pruning + v * coeffs.orthogonal;
        min_cos = min_cos.min(c_hat.dot(&c) / (c_hat.norm() * c.norm()));
        max_rel = max_rel.max(rel(c_hat.norm(), c.norm()));
    }
    outcome(
        min_cos >= 0.999 && max_rel <= 0.01,
        format!(
            "6 cases at 1e6 samples: min cosine {min_cos:.5}, max norm error {:.2}%",
            100.0 * max_rel
        ),
    )
}

fn adaptive_practice() -> Outcome {
    let w = default_workers();
    let hard = compare_adaptive_static_with(&DPConfig::default(), 20, w).unwrap();
    let all = compare_adaptive_static_with(
        &DPConfig {
            selection: SelectionStrategy::KeepAll,
            ..DPConfig::default()
        },
        20,
        w,
    )
    .unwrap();
    let pass = hard.adaptive_mean <= hard.static_mean
        && hard.win_rate >= 0.6
        && all.mean_delta.abs() <= 2.0 * all.paired_se;
    outcome(
        pass,
        format!(
            "KH: adaptive {:.4} vs static {:.4}, win rate {:.2}; all: delta {:.1e} (se {:.1e})",
            hard.adaptive_mean, hard.static_mean, hard.win_rate, all.mean_delta, all.paired_se
        ),
    )
}

fn determinism() -> Outcome {
    let empirical: SweepSpec = "[sweep]\nname = det\nseed = 5\ntrials = 6\nempirical = true\n\
        [base]\nd = 48\nlambda = 1e-3\n[axes]\nstrategy = all, kh:xi=0.7, ke:xi=0.7, sig:w=2.0\n\
        rho = 0.5, 1\nn = 24, 96\n"
        .parse()
        .unwrap();
    let mut identical = true;
    let mut checked = 0;
    for spec in [empirical, preset("figcool-small").unwrap()] {
        let spec = SweepSpec {
            trials: spec.trials.min(6),
            ..spec
        };
        let reference = rows_to_string(&run_sweep(&spec, 1).unwrap()).unwrap();
        for workers in [2, 4, 7] {
            identical &= rows_to_string(&run_sweep(&spec, workers).unwrap()).unwrap() == reference;
            checked += 1;
        }
        identical &= rows_to_string(&run_sweep(&spec, 1).unwrap()).unwrap() == reference;
    }
    outcome(
        identical,
        format!("{checked} reruns across worker counts 1, 2, 4, 7"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("figcool reproduction", figcool_reproduction),
        ("interpolation threshold", interpolation_peak),
        ("Marchenko-Pastur reduction", marchenko_pastur),
        ("closed form vs quadrature", scalar_routes),
        ("derivative checks", derivative_checks),
        ("ridgeless consistency", ridgeless_consistency),
        ("hard-example scaling benefit", scaling_benefit),
        ("mean-vector coefficients", mean_vector_coefficients),
        ("adaptive practice", adaptive_practice),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
