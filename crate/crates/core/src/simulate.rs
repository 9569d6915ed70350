//! Exact finite-dimensional experiment.
//!
//! Each trial draws a pool `x_i ~ N(0, I_d)` labeled by `y_i = sign(w0ᵀx_i)`,
//! keeps example `i` with probability `q(x_iᵀw_s)`, fits
//!
//! ```text
//! ŵ = (XᵀDX/n + λI)⁻¹ XᵀDY/n
//! ```
//!
//! and scores it with the exact isotropic error `arccos(cos∠(ŵ, w0))/π`.

use crate::error::{invalid, Error, Result};
use crate::parallel::map_indexed;
use crate::rng::{stream, Purpose};
use crate::selection::{check_rho, SelectionStrategy};
use crate::special::angular_error;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Singular values below this fraction of the largest are treated as zero in
/// the minimum-norm solve.
const PINV_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    /// Pool size before selection.
    pub n: usize,
    pub lambda: f64,
    pub strategy: SelectionStrategy,
    /// Alignment `w_sᵀw0` of the pruning direction with the labeler.
    pub rho: f64,
    pub trials: usize,
    pub seed: u64,
    /// When positive, each trial also estimates its error on this many fresh
    /// test points.
    pub mc_test_points: usize,
}

impl ExperimentConfig {
    pub fn new(
        d: usize,
        n: usize,
        lambda: f64,
        strategy: SelectionStrategy,
        rho: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            d,
            n,
            lambda,
            strategy,
            rho,
            trials,
            seed,
            mc_test_points: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(invalid("d and n must be positive"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        check_rho(self.rho)?;
        if self.d < 2 && self.rho.abs() < 1.0 {
            return Err(invalid("|rho| < 1 needs d >= 2"));
        }
        self.strategy.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub w_hat: DVector<f64>,
    pub w0: DVector<f64>,
    pub kept_count: usize,
    /// `cos∠(ŵ, w0)`; 0 when `ŵ = 0`.
    pub rho_hat: f64,
    pub test_error_exact: f64,
    pub test_error_mc: Option<McEstimate>,
    /// True when the minimum-norm least-squares fallback was used.
    pub min_norm: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub mean: f64,
    /// Sample standard deviation across trials (0 for a single trial).
    pub std: f64,
    pub stderr: f64,
    pub kept_mean: f64,
    /// Successful trials.
    pub trials: usize,
    pub failures: usize,
    pub min_norm_trials: usize,
}

fn standard_normal_vector<R: Rng>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Unit `w0` and `w_s` with `w_sᵀw0 = ρ`: `w_s = ρw0 + √(1−ρ²)w⊥` for a random
/// unit `w⊥ ⟂ w0`.
pub fn make_directions<R: Rng>(
    d: usize,
    rho: f64,
    rng: &mut R,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_rho(rho)?;
    if d == 0 {
        return Err(invalid("d must be positive"));
    }
    let w0 = standard_normal_vector(d, rng).normalize();
    if rho.abs() == 1.0 {
        let ws = &w0 * rho;
        return Ok((w0, ws));
    }
    if d < 2 {
        return Err(invalid("|rho| < 1 needs d >= 2"));
    }
    let mut perp = standard_normal_vector(d, rng);
    // two Gram–Schmidt passes keep w⊥ orthogonal to rounding
    for _ in 0..2 {
        let proj = perp.dot(&w0);
        perp.axpy(-proj, &w0, 1.0);
    }
    let perp = perp.normalize();
    let ws = &w0 * rho + perp * (1.0 - rho * rho).sqrt();
    Ok((w0, ws))
}

/// Solves `(XᵀX/n + λI)w = XᵀY/n` for the kept rows `X`. Cholesky when the
/// system is positive definite, otherwise (λ = 0 only) the minimum-norm
/// least-squares solution of `Xw = Y`. Returns `(w, used_min_norm)`.
pub fn solve_weighted_ridge(
    x_kept: &DMatrix<f64>,
    y_kept: &DVector<f64>,
    n: usize,
    lambda: f64,
) -> Result<(DVector<f64>, bool)> {
    let d = x_kept.ncols();
    let k = x_kept.nrows();
    if k == 0 {
        return Ok((DVector::zeros(d), lambda == 0.0));
    }
    let scale = 1.0 / n as f64;
    if lambda > 0.0 || k >= d {
        let mut gram = x_kept.tr_mul(x_kept) * scale;
        for i in 0..d {
            gram[(i, i)] += lambda;
        }
        let rhs = x_kept.tr_mul(y_kept) * scale;
        if let Some(chol) = gram.cholesky() {
            return Ok((chol.solve(&rhs), false));
        }
        if lambda > 0.0 {
            return Err(invalid("ridge system is not positive definite"));
        }
    }
    let svd = x_kept.clone().svd(true, true);
    let tol = PINV_RCOND * svd.singular_values.max();
    let w = svd
        .solve(y_kept, tol)
        .map_err(|e| invalid(format!("minimum-norm solve failed: {e}")))?;
    Ok((w, true))
}

fn label(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Fraction of `n_test` fresh Gaussian points on which `ŵ` and `w0` disagree,
/// with its binomial standard error.
pub fn mc_test_error<R: Rng>(
    w_hat: &DVector<f64>,
    w0: &DVector<f64>,
    n_test: usize,
    rng: &mut R,
) -> McEstimate {
    let d = w0.len();
    let mut wrong = 0usize;
    for _ in 0..n_test {
        let (mut a, mut b) = (0.0, 0.0);
        for j in 0..d {
            let x: f64 = rng.sample(StandardNormal);
            a += x * w_hat[j];
            b += x * w0[j];
        }
        if label(a) != label(b) {
            wrong += 1;
        }
    }
    let est = wrong as f64 / n_test.max(1) as f64;
    McEstimate {
        estimate: est,
        stderr: (est * (1.0 - est) / n_test.max(1) as f64).sqrt(),
    }
}

/// `cos∠(a, b)`, 0 if either vector vanishes.
pub fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (a.dot(b) / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// One trial, a pure function of `(config.seed, trial_index)`.
pub fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<FitResult> {
    config.validate()?;
    let (d, n) = (config.d, config.n);
    let mut dir_rng = stream(config.seed, trial_index, Purpose::Directions);
    let (w0, ws) = make_directions(d, config.rho, &mut dir_rng)?;

    let mut data_rng = stream(config.seed, trial_index, Purpose::Data);
    let mut sel_rng = stream(config.seed, trial_index, Purpose::Selection);
    let binary = config.strategy.is_binary();

    let mut rows: Vec<f64> = Vec::with_capacity(n * d);
    let mut labels: Vec<f64> = Vec::with_capacity(n);
    let mut x = vec![0.0; d];
    for _ in 0..n {
        let (mut t_label, mut t_sel) = (0.0, 0.0);
        for j in 0..d {
            let v: f64 = data_rng.sample(StandardNormal);
            x[j] = v;
            t_label += v * w0[j];
            t_sel += v * ws[j];
        }
        let q = config.strategy.eval(t_sel);
        // one uniform per example keeps the selection stream aligned
        let u: f64 = sel_rng.random();
        let keep = if binary { q == 1.0 } else { u < q };
        if keep {
            rows.extend_from_slice(&x);
            labels.push(label(t_label));
        }
    }
    let k = labels.len();
    let x_kept = DMatrix::from_row_slice(k, d, &rows);
    let y_kept = DVector::from_vec(labels);
    let (w_hat, min_norm) = solve_weighted_ridge(&x_kept, &y_kept, n, config.lambda)?;

    let rho_hat = cosine(&w_hat, &w0);
    let test_error_mc = (config.mc_test_points > 0).then(|| {
        let mut rng = stream(config.seed, trial_index, Purpose::TestPoints);
        mc_test_error(&w_hat, &w0, config.mc_test_points, &mut rng)
    });
    Ok(FitResult {
        w_hat,
        w0,
        kept_count: k,
        rho_hat,
        test_error_exact: angular_error(rho_hat),
        test_error_mc,
        min_norm,
    })
}

/// All trials of a cell on a single thread.
pub fn run_cell(config: &ExperimentConfig) -> Result<CellSummary> {
    run_cell_with(config, 1)
}

/// All trials of a cell on up to `workers` threads. The summary does not
/// depend on `workers`.
pub fn run_cell_with(config: &ExperimentConfig, workers: usize) -> Result<CellSummary> {
    config.validate()?;
    let outcomes = map_indexed(workers, config.trials, |i| {
        run_trial(config, i as u64).map(|r| (r.test_error_exact, r.kept_count, r.min_norm))
    });
    let mut errors = Vec::with_capacity(config.trials);
    let mut kept = 0usize;
    let mut min_norm_trials = 0usize;
    let mut first_failure: Option<Error> = None;
    let mut failures = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok((err, k, mn)) => {
                errors.push(err);
                kept += k;
                min_norm_trials += mn as usize;
            }
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    if errors.is_empty() {
        return Err(first_failure.expect("at least one trial ran"));
    }
    let count = errors.len();
    let mean = errors.iter().sum::<f64>() / count as f64;
    let std = if count > 1 {
        (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(CellSummary {
        mean,
        std,
        stderr: std / (count as f64).sqrt(),
        kept_mean: kept as f64 / count as f64,
        trials: count,
        failures,
        min_norm_trials,
    })
}

/// Monte Carlo estimate of `c = E[q(xᵀw_s) y x]`.
pub fn estimate_mean_vectors<R: Rng>(
    strategy: &SelectionStrategy,
    ws: &DVector<f64>,
    w0: &DVector<f64>,
    n_samples: usize,
    rng: &mut R,
) -> DVector<f64> {
    let d = w0.len();
    let mut acc = DVector::zeros(d);
    let mut x = DVector::zeros(d);
    for _ in 0..n_samples {
        for j in 0..d {
            x[j] = rng.sample(StandardNormal);
        }
        let weight = strategy.eval(x.dot(ws)) * label(x.dot(w0));
        if weight != 0.0 {
            acc.axpy(weight, &x, 1.0);
        }
    }
    acc / n_samples.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn kh(xi: f64) -> SelectionStrategy {
        SelectionStrategy::keep_hard(xi).unwrap()
    }

    #[test]
    fn directions_have_requested_alignment() {
        let mut rng = stream(1, 0, Purpose::Directions);
        let (w0, ws) = make_directions(8, 1.0, &mut rng).unwrap();
        assert_eq!(w0, ws);
        let (w0, ws) = make_directions(8, 0.0, &mut rng).unwrap();
        assert!(w0.dot(&ws).abs() < 1e-12);
        let (w0, ws) = make_directions(350, 0.7, &mut rng).unwrap();
        assert_abs_diff_eq!(w0.dot(&ws), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(ws.norm(), 1.0, epsilon = 1e-12);
        assert!(make_directions(1, 0.5, &mut rng).is_err());
        assert!(make_directions(1, -1.0, &mut rng).is_ok());
    }

    #[test]
    fn scalar_fit() {
        let x = DMatrix::from_row_slice(1, 1, &[2.0]);
        let y = DVector::from_vec(vec![1.0]);
        let (w, min_norm) = solve_weighted_ridge(&x, &y, 1, 1.0).unwrap();
        assert_abs_diff_eq!(w[0], 0.4, epsilon = 1e-15);
        assert!(!min_norm);
    }

    #[test]
    fn min_norm_fallback_interpolates() {
        // 2 kept rows in 4 dimensions: the solution interpolates and lies in the row space
        let x = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 2.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        let y = DVector::from_vec(vec![1.0, -1.0]);
        let (w, min_norm) = solve_weighted_ridge(&x, &y, 10, 0.0).unwrap();
        assert!(min_norm);
        assert!((&x * &w - &y).norm() < 1e-12);
        assert_abs_diff_eq!(w[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn arccos_identity_endpoints() {
        let w0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(angular_error(cosine(&(&w0 * 3.0), &w0)), 0.0);
        let perp = DVector::from_vec(vec![0.0, 2.0, 0.0]);
        assert_abs_diff_eq!(angular_error(cosine(&perp, &w0)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mc_error_extremes() {
        let mut rng = stream(3, 0, Purpose::TestPoints);
        let w0 = DVector::from_vec(vec![0.6, 0.8]);
        assert_eq!(mc_test_error(&w0, &w0, 1000, &mut rng).estimate, 0.0);
        assert_eq!(mc_test_error(&(-&w0), &w0, 1000, &mut rng).estimate, 1.0);
    }

    #[test]
    fn mc_error_matches_arccos_at_one_third() {
        let mut rng = stream(5, 0, Purpose::TestPoints);
        let w0 = DVector::from_vec(vec![1.0, 0.0]);
        let w = DVector::from_vec(vec![0.5, 0.75f64.sqrt()]);
        let mc = mc_test_error(&w, &w0, 1_000_000, &mut rng);
        assert!((mc.estimate - 1.0 / 3.0).abs() <= 3.0 * mc.stderr, "{mc:?}");
    }

    #[test]
    fn trial_is_deterministic_and_solves_the_system() {
        let cfg = ExperimentConfig::new(40, 120, 0.05, kh(1.0), 0.6, 1, 11).unwrap();
        let a = run_trial(&cfg, 3).unwrap();
        let b = run_trial(&cfg, 3).unwrap();
        assert_eq!(a, b);
        let c = run_trial(&cfg, 4).unwrap();
        assert_ne!(a.w_hat, c.w_hat);
        assert!(a.kept_count <= cfg.n);
        assert!((0.0..=1.0).contains(&a.test_error_exact));
        assert_abs_diff_eq!(a.test_error_exact, angular_error(a.rho_hat), epsilon = 0.0);
    }

    #[test]
    fn single_trial_cell_equals_trial() {
        let cfg = ExperimentConfig::new(20, 50, 0.1, kh(0.8), 1.0, 1, 2).unwrap();
        let cell = run_cell(&cfg).unwrap();
        let trial = run_trial(&cfg, 0).unwrap();
        assert_eq!(cell.mean, trial.test_error_exact);
        assert_eq!(cell.kept_mean, trial.kept_count as f64);
        assert_eq!(cell.std, 0.0);
        assert_eq!(cell.trials, 1);
    }

    #[test]
    fn cell_independent_of_worker_count() {
        let strategy = SelectionStrategy::sigmoid_power(1.5).unwrap();
        let cfg = ExperimentConfig::new(30, 90, 0.02, strategy, 0.5, 9, 77).unwrap();
        let one = run_cell_with(&cfg, 1).unwrap();
        for workers in [2, 4, 16] {
            assert_eq!(run_cell_with(&cfg, workers).unwrap(), one);
        }
    }

    #[test]
    fn ridgeless_overparameterized_uses_min_norm() {
        let cfg =
            ExperimentConfig::new(60, 40, 0.0, SelectionStrategy::KeepAll, 1.0, 1, 4).unwrap();
        let r = run_trial(&cfg, 0).unwrap();
        assert!(r.min_norm);
        assert_eq!(r.kept_count, 40);
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(1, 10, 0.1, kh(1.0), 0.5, 1, 0).is_err());
        assert!(ExperimentConfig::new(1, 10, 0.1, kh(1.0), 1.0, 1, 0).is_ok());
        assert!(ExperimentConfig::new(5, 10, 0.1, kh(1.0), 0.5, 0, 0).is_err());
        assert!(ExperimentConfig::new(5, 10, -0.1, kh(1.0), 0.5, 1, 0).is_err());
        assert!(ExperimentConfig::new(5, 0, 0.1, kh(1.0), 0.5, 1, 0).is_err());
    }

    #[test]
    fn mean_vector_examples() {
        let mut rng = stream(8, 0, Purpose::MeanVectors);
        let (w0, _) = make_directions(6, 1.0, &mut rng).unwrap();
        let c = estimate_mean_vectors(&SelectionStrategy::KeepAll, &w0, &w0, 200_000, &mut rng);
        let target = &w0 * crate::special::SQRT_2_OVER_PI;
        assert!((c - target).norm() < 0.02);

        let (w0, ws) = make_directions(6, 0.0, &mut rng).unwrap();
        let c = estimate_mean_vectors(&kh(1.0), &ws, &w0, 200_000, &mut rng);
        assert!(c.dot(&ws).abs() < 0.01);
    }
}
