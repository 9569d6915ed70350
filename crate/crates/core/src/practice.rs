//! Patience-driven pool growth ("deliberate practice") for the linear model.
//!
//! The learner starts from `N` plain Gaussian examples and refits the ridge
//! estimator every step. Every `eval_interval` steps it checks accuracy on a
//! fixed validation set; when accuracy has not strictly improved for `T_max`
//! checks, `P` new examples are drawn from the pruned distribution
//! `dQ ∝ q(xᵀw_s) dP` by rejection sampling and added to the pool. With
//! `refresh_direction` the pruning direction `w_s` tracks the current
//! estimator; otherwise it stays at the initial fit.

use crate::error::{invalid, Result};
use crate::parallel::map_indexed;
use crate::rng::{derive_seed, stream, Purpose};
use crate::selection::SelectionStrategy;
use crate::simulate::{cosine, solve_weighted_ridge};
use crate::special::{angular_error, norm_quantile};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Candidate draws allowed per requested example before giving up.
const MAX_DRAWS_PER_EXAMPLE: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatienceMode {
    Fixed,
    /// `T_max` grows by one after each augmentation.
    Incremental,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DPConfig {
    /// Initial pool size `N`.
    pub n_initial: usize,
    /// Examples added per augmentation, `P`.
    pub batch_size: usize,
    pub eval_interval: usize,
    /// Initial patience; `None` never triggers augmentation.
    pub t_max: Option<usize>,
    pub patience_mode: PatienceMode,
    pub total_steps: usize,
    pub selection: SelectionStrategy,
    pub refresh_direction: bool,
    pub d: usize,
    pub lambda: f64,
    pub validation_size: usize,
    pub seed: u64,
}

impl Default for DPConfig {
    fn default() -> Self {
        Self {
            n_initial: 128,
            batch_size: 128,
            eval_interval: 1,
            t_max: Some(2),
            patience_mode: PatienceMode::Fixed,
            total_steps: 60,
            selection: SelectionStrategy::KeepHard { xi: 0.5 },
            refresh_direction: true,
            d: 64,
            lambda: 1e-2,
            validation_size: 2048,
            seed: 0,
        }
    }
}

impl DPConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_initial == 0 {
            return Err(invalid("initial pool size N must be at least 1"));
        }
        if self.eval_interval == 0 {
            return Err(invalid("eval_interval must be at least 1"));
        }
        if self.t_max == Some(0) {
            return Err(invalid("patience T_max must be at least 1"));
        }
        if self.d == 0 {
            return Err(invalid("d must be positive"));
        }
        if self.validation_size == 0 {
            return Err(invalid("validation_size must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        self.selection.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Start of training; the schedule has no analogue for a closed-form fit.
    WarmUp,
    Evaluation,
    Augmentation,
    /// End of training; likewise a no-op.
    CoolDown,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::WarmUp => "warmup",
            EventKind::Evaluation => "evaluation",
            EventKind::Augmentation => "augmentation",
            EventKind::CoolDown => "cooldown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DPEvent {
    pub kind: EventKind,
    pub step: usize,
    pub pool_size: usize,
    /// Accuracy of the current fit on the validation set (evaluations only).
    pub validation_accuracy: Option<f64>,
    pub test_error_exact: f64,
    pub patience_counter: usize,
    /// Patience limit in force at this event.
    pub patience_limit: Option<usize>,
    pub augmented: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DPHistory {
    pub events: Vec<DPEvent>,
    pub augmentations: usize,
    /// Patience ran out with `P = 0`, so training continued on a static pool.
    pub degenerate: bool,
    pub final_pool_size: usize,
    pub final_test_error: f64,
    /// Mean `|xᵀŵ_final|/‖ŵ_final‖` over the initial examples.
    pub initial_margin: f64,
    /// The same over the most recently added batch, if any.
    pub late_margin: Option<f64>,
}

struct Pool {
    d: usize,
    rows: Vec<f64>,
    labels: Vec<f64>,
}

impl Pool {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn push(&mut self, x: &[f64], w0: &DVector<f64>) {
        let t: f64 = x.iter().zip(w0.iter()).map(|(a, b)| a * b).sum();
        self.rows.extend_from_slice(x);
        self.labels.push(if t >= 0.0 { 1.0 } else { -1.0 });
    }

    fn fit(&self, lambda: f64) -> Result<DVector<f64>> {
        let x = DMatrix::from_row_slice(self.len(), self.d, &self.rows);
        let y = DVector::from_column_slice(&self.labels);
        Ok(solve_weighted_ridge(&x, &y, self.len(), lambda)?.0)
    }

    fn mean_margin(&self, range: std::ops::Range<usize>, w: &DVector<f64>) -> f64 {
        let norm = w.norm();
        if range.is_empty() || norm == 0.0 {
            return f64::NAN;
        }
        let count = range.len();
        range
            .map(|i| {
                let row = &self.rows[i * self.d..(i + 1) * self.d];
                row.iter()
                    .zip(w.iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .abs()
                    / norm
            })
            .sum::<f64>()
            / count as f64
    }
}

fn gaussian_row(rng: &mut ChaCha8Rng, buf: &mut [f64]) {
    for v in buf.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

fn unit_direction(w: &DVector<f64>, fallback: &DVector<f64>) -> DVector<f64> {
    let norm = w.norm();
    if norm > 0.0 {
        w / norm
    } else {
        fallback.clone()
    }
}

/// Draws `count` examples with acceptance probability `q(xᵀw_s)`.
fn draw_pruned(
    rng: &mut ChaCha8Rng,
    strategy: &SelectionStrategy,
    ws: &DVector<f64>,
    count: usize,
    w0: &DVector<f64>,
    pool: &mut Pool,
) -> Result<()> {
    let d = ws.len();
    let mut x = vec![0.0; d];
    let budget = count.saturating_mul(MAX_DRAWS_PER_EXAMPLE);
    let mut accepted = 0;
    let mut draws = 0;
    while accepted < count {
        if draws == budget {
            return Err(invalid(format!(
                "acceptance rate of {strategy} is too low: {accepted} of {count} after {draws} draws"
            )));
        }
        draws += 1;
        gaussian_row(rng, &mut x);
        let t: f64 = x.iter().zip(ws.iter()).map(|(a, b)| a * b).sum();
        let q = strategy.eval(t);
        let u: f64 = rng.random();
        let keep = if strategy.is_binary() {
            q == 1.0
        } else {
            u < q
        };
        if keep {
            pool.push(&x, w0);
            accepted += 1;
        }
    }
    Ok(())
}

/// Runs one deliberate-practice trajectory. Deterministic in `config.seed`.
pub fn run_dp(config: &DPConfig) -> Result<DPHistory> {
    config.validate()?;
    let d = config.d;
    let seed = config.seed;

    let mut dir_rng = stream(seed, 0, Purpose::Directions);
    let w0 = DVector::from_iterator(d, (0..d).map(|_| dir_rng.sample::<f64, _>(StandardNormal)))
        .normalize();

    let mut pool = Pool {
        d,
        rows: Vec::new(),
        labels: Vec::new(),
    };
    let mut init_rng = stream(seed, 0, Purpose::InitialPool);
    let mut x = vec![0.0; d];
    for _ in 0..config.n_initial {
        gaussian_row(&mut init_rng, &mut x);
        pool.push(&x, &w0);
    }

    let mut val_rng = stream(seed, 0, Purpose::Validation);
    let val_x = DMatrix::from_fn(config.validation_size, d, |_, _| {
        val_rng.sample::<f64, _>(StandardNormal)
    });
    let val_y = &val_x * &w0;
    let accuracy = |w: &DVector<f64>| {
        let scores = &val_x * w;
        let hits = scores
            .iter()
            .zip(val_y.iter())
            .filter(|(s, y)| (**s >= 0.0) == (**y >= 0.0))
            .count();
        hits as f64 / config.validation_size as f64
    };
    let error_of = |w: &DVector<f64>| angular_error(cosine(w, &w0));

    let mut gen_rng = stream(seed, 0, Purpose::Generator);
    let mut events = Vec::new();
    let mut w = pool.fit(config.lambda)?;
    let initial_direction = unit_direction(&w, &w0);
    let mut patience_limit = config.t_max;
    events.push(DPEvent {
        kind: EventKind::WarmUp,
        step: 0,
        pool_size: pool.len(),
        validation_accuracy: None,
        test_error_exact: error_of(&w),
        patience_counter: 0,
        patience_limit,
        augmented: false,
    });

    let mut best = f64::NEG_INFINITY;
    let mut counter = 0usize;
    let mut augmentations = 0usize;
    let mut degenerate = false;
    let mut last_batch: Option<std::ops::Range<usize>> = None;
    let mut stale = false;

    for step in 1..=config.total_steps {
        // training step: refit on the current pool
        if stale {
            w = pool.fit(config.lambda)?;
            stale = false;
        }
        if step % config.eval_interval != 0 {
            continue;
        }
        let acc = accuracy(&w);
        if acc > best {
            best = acc;
            counter = 0;
        } else {
            counter += 1;
        }
        events.push(DPEvent {
            kind: EventKind::Evaluation,
            step,
            pool_size: pool.len(),
            validation_accuracy: Some(acc),
            test_error_exact: error_of(&w),
            patience_counter: counter,
            patience_limit,
            augmented: false,
        });
        let exhausted = matches!(patience_limit, Some(limit) if counter >= limit);
        if !exhausted {
            continue;
        }
        if config.batch_size == 0 {
            degenerate = true;
        } else {
            let ws = if config.refresh_direction {
                unit_direction(&w, &initial_direction)
            } else {
                initial_direction.clone()
            };
            let start = pool.len();
            draw_pruned(
                &mut gen_rng,
                &config.selection,
                &ws,
                config.batch_size,
                &w0,
                &mut pool,
            )?;
            last_batch = Some(start..pool.len());
            stale = true;
        }
        augmentations += 1;
        counter = 0;
        if config.patience_mode == PatienceMode::Incremental {
            patience_limit = patience_limit.map(|t| t + 1);
        }
        events.push(DPEvent {
            kind: EventKind::Augmentation,
            step,
            pool_size: pool.len(),
            validation_accuracy: None,
            test_error_exact: error_of(&w),
            patience_counter: 0,
            patience_limit,
            augmented: config.batch_size > 0,
        });
    }

    if stale {
        w = pool.fit(config.lambda)?;
    }
    let final_test_error = error_of(&w);
    events.push(DPEvent {
        kind: EventKind::CoolDown,
        step: config.total_steps,
        pool_size: pool.len(),
        validation_accuracy: None,
        test_error_exact: final_test_error,
        patience_counter: counter,
        patience_limit,
        augmented: false,
    });

    Ok(DPHistory {
        events,
        augmentations,
        degenerate,
        final_pool_size: pool.len(),
        final_test_error,
        initial_margin: pool.mean_margin(0..config.n_initial, &w),
        late_margin: last_batch.map(|r| pool.mean_margin(r, &w)),
    })
}

/// Paired comparison of refreshed versus frozen pruning directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedReport {
    pub seeds: Vec<u64>,
    pub adaptive_errors: Vec<f64>,
    pub static_errors: Vec<f64>,
    /// `adaptive − static` per seed.
    pub deltas: Vec<f64>,
    pub mean_delta: f64,
    pub paired_se: f64,
    /// Fraction of seeds where the adaptive arm is strictly better.
    pub win_rate: f64,
    pub ties: usize,
    /// 95% Wilson interval for the win rate.
    pub win_rate_ci: (f64, f64),
    pub adaptive_mean: f64,
    pub static_mean: f64,
}

/// Wilson score interval for `wins` successes out of `n` at confidence `level`.
pub fn wilson_interval(wins: usize, n: usize, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = norm_quantile(0.5 + 0.5 * level);
    let nf = n as f64;
    let phat = wins as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (phat + z * z / (2.0 * nf)) / denom;
    let half = z * (phat * (1.0 - phat) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Runs both arms on `n_seeds` derived seeds. Each seed shares the labeler,
/// initial pool, validation set and candidate stream across the two arms.
pub fn compare_adaptive_static(config: &DPConfig, n_seeds: usize) -> Result<PairedReport> {
    compare_adaptive_static_with(config, n_seeds, 1)
}

pub fn compare_adaptive_static_with(
    config: &DPConfig,
    n_seeds: usize,
    workers: usize,
) -> Result<PairedReport> {
    if n_seeds < 2 {
        return Err(invalid(format!(
            "paired comparison needs at least 2 seeds, got {n_seeds}"
        )));
    }
    config.validate()?;
    let seeds: Vec<u64> = (0..n_seeds as u64)
        .map(|i| derive_seed(config.seed, i))
        .collect();
    let runs = map_indexed(workers, 2 * n_seeds, |j| {
        let mut cfg = config.clone();
        cfg.seed = seeds[j / 2];
        cfg.refresh_direction = j % 2 == 0;
        run_dp(&cfg).map(|h| h.final_test_error)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let adaptive_errors: Vec<f64> = runs.iter().step_by(2).copied().collect();
    let static_errors: Vec<f64> = runs.iter().skip(1).step_by(2).copied().collect();
    let deltas: Vec<f64> = adaptive_errors
        .iter()
        .zip(&static_errors)
        .map(|(a, s)| a - s)
        .collect();

    let n = n_seeds as f64;
    let mean_delta = deltas.iter().sum::<f64>() / n;
    let var = deltas.iter().map(|x| (x - mean_delta).powi(2)).sum::<f64>() / (n - 1.0);
    let wins = deltas.iter().filter(|&&x| x < 0.0).count();
    let ties = deltas.iter().filter(|&&x| x == 0.0).count();
    Ok(PairedReport {
        adaptive_mean: adaptive_errors.iter().sum::<f64>() / n,
        static_mean: static_errors.iter().sum::<f64>() / n,
        seeds,
        adaptive_errors,
        static_errors,
        mean_delta,
        paired_se: (var / n).sqrt(),
        win_rate: wins as f64 / n,
        ties,
        win_rate_ci: wilson_interval(wins, n_seeds, 0.95),
        deltas,
    })
}
