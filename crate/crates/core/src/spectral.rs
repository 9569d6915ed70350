//! Deterministic equivalents for the pruned sample covariance and the
//! resulting test-error prediction.
//!
//! With `n` samples in `d` dimensions, `φ = d/n`, keep probability `p` and
//! ridge `λ`, the Stieltjes transform `m(z)` at `z = −λ` of the kept sample
//! covariance `XᵀDX/n` is the positive root of
//!
//! ```text
//! φ z m² + (φ − p + z) m + 1 = 0.
//! ```
//!
//! The selection rule bends the covariance along the pruning direction, which
//! gives the companion `m̃ = 1/(s − z)` with `s = γ/(1 + φm)`. The prediction
//! combines `m`, `m̃` and their `z`-derivatives with the strategy scalars into
//! the alignment `m0 = E[y xᵀŵ]` and squared norm `ν0 = E‖ŵ‖²`. For isotropic
//! inputs the test error of `ŵ` is exactly `arccos(cos∠(ŵ, w0))/π`, and
//! `cos∠(ŵ, w0) = m0 / √((2/π)ν0)`.

use crate::error::{invalid, Error, Result};
use crate::selection::StrategyScalars;
use crate::special::{angular_error, norm_cdf, SQRT_2_OVER_PI};
use std::fmt;

/// Ridgeless queries closer than this to `φ = p` are rejected.
pub const THRESHOLD_GAP: f64 = 1e-3;

const FIXED_POINT_DAMPING: f64 = 0.5;
const FIXED_POINT_CAP: usize = 10_000;
const FIXED_POINT_TOL: f64 = 1e-13;

/// Scaling regime of the design: `φ = d/n`, ridge `λ` and keep probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub phi: f64,
    pub lambda: f64,
    pub p: f64,
}

impl RegimeParams {
    pub fn new(phi: f64, lambda: f64, p: f64) -> Result<Self> {
        if !(phi.is_finite() && phi > 0.0) {
            return Err(invalid(format!(
                "phi must be positive and finite, got {phi}"
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(format!(
                "keep probability must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self { phi, lambda, p })
    }

    /// Regime for a design with `n` samples in `d` dimensions.
    pub fn from_dims(d: usize, n: usize, lambda: f64, p: f64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(invalid("d and n must be positive"));
        }
        Self::new(d as f64 / n as f64, lambda, p)
    }

    fn z(&self) -> f64 {
        -self.lambda
    }

    fn require_ridge(&self) -> Result<()> {
        if self.lambda > 0.0 {
            Ok(())
        } else {
            Err(Error::RequiresRidge(self.lambda))
        }
    }
}

/// Spectral quantities at `z = −λ`. Primes are derivatives in `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralState {
    pub m: f64,
    pub m_prime: f64,
    pub s: f64,
    pub m_tilde: f64,
    pub m_tilde_prime: f64,
    /// `ωm + ω̃m̃`, drives the alignment `m0`.
    pub r_mean: f64,
    /// `β²m + β̃²m̃`, the quadratic form of the class-mean vector.
    pub r_var: f64,
    pub r_var_prime: f64,
    pub omega: f64,
    pub omega_tilde: f64,
    /// `ω²m + ω̃²m̃`, an alternative weighting kept for comparison only.
    pub r_quadratic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Ridge,
    /// `λ → 0` with `φ < p`: fewer features than kept samples.
    RidgelessUnder,
    /// `λ → 0` with `φ > p`: interpolating, minimum-norm solution.
    RidgelessOver,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Ridge => "ridge",
            Regime::RidgelessUnder => "ridgeless_under",
            Regime::RidgelessOver => "ridgeless_over",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The closed-form `(a, b)` pair for the ridgeless limit, evaluated through
/// the same readout as the main prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormPair {
    pub a: f64,
    pub b: f64,
    /// `None` when the pair does not describe a valid estimator
    /// (`b ≤ 0` or implied cosine above 1).
    pub test_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPrediction {
    /// Predicted `E[y xᵀŵ]`. In [`Regime::RidgelessOver`] this is scaled by `λ`.
    pub m0: f64,
    /// Predicted `E‖ŵ‖²`. In [`Regime::RidgelessOver`] this is scaled by `λ²`.
    pub nu0: f64,
    /// Predicted `cos∠(ŵ, w0)`.
    pub cosine: f64,
    /// `arccos(cosine)/π`.
    pub test_error: f64,
    /// `Φ(−m0/√(ν0 − m0²))`, the error if the margin `y xᵀŵ` were Gaussian.
    pub gaussian_margin_error: f64,
    pub regime: Regime,
    /// Ridgeless paths only.
    pub closed_form: Option<ClosedFormPair>,
}

/// `m(−λ)`, the positive root of the defining quadratic.
pub fn stieltjes_m(params: &RegimeParams) -> Result<f64> {
    params.require_ridge()?;
    Ok(m_positive_root(params))
}

fn m_positive_root(params: &RegimeParams) -> f64 {
    let RegimeParams { phi, lambda, p } = *params;
    // φλm² + Am − 1 = 0 with A = p − φ + λ; this root form never cancels.
    let a = p - phi + lambda;
    2.0 / (a + (a * a + 4.0 * phi * lambda).sqrt())
}

/// `m′(−λ)` by differentiating the closed-form root.
fn m_derivative(params: &RegimeParams) -> f64 {
    let RegimeParams { phi, p, .. } = *params;
    let z = params.z();
    let a = p - phi - z;
    let disc = (a * a - 4.0 * phi * z).sqrt();
    let denom = a + disc;
    2.0 * (1.0 + (a + 2.0 * phi) / disc) / (denom * denom)
}

/// Residual of `φzm² + (φ − p + z)m + 1 = 0`, relative to the largest term
/// once `m` is large (near the threshold as `λ → 0` the terms grow like `1/λ`).
pub fn quadratic_residual(params: &RegimeParams, m: f64) -> f64 {
    let z = params.z();
    let quad = params.phi * z * m * m;
    let lin = (params.phi - params.p + z) * m;
    (quad + lin + 1.0).abs() / quad.abs().max(lin.abs()).max(1.0)
}

/// `t(−λ)` by damped iteration of `t ↦ p(t+λ)/(t+λ+φ)`, an independent route
/// to `z + 1/m`.
pub fn fixed_point_t(params: &RegimeParams) -> Result<f64> {
    params.require_ridge()?;
    let RegimeParams { phi, lambda, p } = *params;
    let map = |t: f64| p * (t + lambda) / (t + lambda + phi);
    let mut t = p;
    let mut residual = f64::INFINITY;
    for _ in 0..FIXED_POINT_CAP {
        let next = (1.0 - FIXED_POINT_DAMPING) * t + FIXED_POINT_DAMPING * map(t);
        residual = (next - t).abs();
        t = next;
        if residual <= FIXED_POINT_TOL * t.abs().max(1.0) {
            return Ok(t);
        }
    }
    Err(Error::NoConvergence {
        iterations: FIXED_POINT_CAP,
        residual,
    })
}

fn check_consistent(p: f64, scalars: &StrategyScalars) -> Result<()> {
    if (p - scalars.p).abs() > 1e-9 {
        return Err(invalid(format!(
            "regime keep probability {p} does not match strategy scalars p = {}",
            scalars.p
        )));
    }
    Ok(())
}

fn omegas(scalars: &StrategyScalars) -> (f64, f64) {
    let rho = scalars.rho;
    (
        (1.0 - rho * rho).sqrt() * scalars.beta,
        rho * scalars.beta_tilde,
    )
}

/// Assembles the spectral quantities from `m`, `m′` and the scalars.
fn assemble(phi: f64, z: f64, m: f64, m_prime: f64, scalars: &StrategyScalars) -> SpectralState {
    let gamma = scalars.gamma;
    let u = 1.0 + phi * m;
    let u_prime = phi * m_prime;
    let s = gamma / u;
    let m_tilde = 1.0 / (s - z);
    // m̃ = u/(γ − zu)
    let den = gamma - z * u;
    let m_tilde_prime = (u_prime * gamma + u * u) / (den * den);

    let (omega, omega_tilde) = omegas(scalars);
    let b2 = scalars.beta * scalars.beta;
    let bt2 = scalars.beta_tilde * scalars.beta_tilde;
    SpectralState {
        m,
        m_prime,
        s,
        m_tilde,
        m_tilde_prime,
        r_mean: omega * m + omega_tilde * m_tilde,
        r_var: b2 * m + bt2 * m_tilde,
        r_var_prime: b2 * m_prime + bt2 * m_tilde_prime,
        omega,
        omega_tilde,
        r_quadratic: omega * omega * m + omega_tilde * omega_tilde * m_tilde,
    }
}

/// All spectral quantities at `z = −λ`.
pub fn spectral_state(params: &RegimeParams, scalars: &StrategyScalars) -> Result<SpectralState> {
    params.require_ridge()?;
    let m = m_positive_root(params);
    let m_prime = m_derivative(params);
    Ok(assemble(params.phi, params.z(), m, m_prime, scalars))
}

/// `(m0, ν0)` from a spectral state.
fn moments(state: &SpectralState, phi: f64, p: f64) -> (f64, f64) {
    let m0 = SQRT_2_OVER_PI * state.r_mean;
    let nu0 = p * phi * state.m_prime + state.r_var_prime
        - 2.0 * phi * state.m_prime / (1.0 + phi * state.m) * state.r_var;
    (m0, nu0)
}

/// Readout `(cosine, arccos error, Gaussian-margin error)` of a moment pair,
/// or `None` if the pair is not realizable.
fn readout_parts(m0: f64, nu0: f64) -> Option<(f64, f64, f64)> {
    if !(m0.is_finite() && nu0.is_finite()) || nu0 <= m0 * m0 {
        return None;
    }
    let cosine = m0 / (SQRT_2_OVER_PI * nu0.sqrt());
    if cosine.abs() > 1.0 + 1e-12 {
        return None;
    }
    let cosine = cosine.clamp(-1.0, 1.0);
    let gaussian = norm_cdf(-m0 / (nu0 - m0 * m0).sqrt());
    Some((cosine, angular_error(cosine), gaussian))
}

fn readout(
    m0: f64,
    nu0: f64,
    regime: Regime,
    closed_form: Option<ClosedFormPair>,
) -> Result<TheoryPrediction> {
    let (cosine, test_error, gaussian_margin_error) =
        readout_parts(m0, nu0).ok_or(Error::InvalidPrediction { m0, nu0 })?;
    Ok(TheoryPrediction {
        m0,
        nu0,
        cosine,
        test_error,
        gaussian_margin_error,
        regime,
        closed_form,
    })
}

/// Predicted test error of the ridge estimator.
pub fn theory_test_error(
    params: &RegimeParams,
    scalars: &StrategyScalars,
) -> Result<TheoryPrediction> {
    check_consistent(params.p, scalars)?;
    let state = spectral_state(params, scalars)?;
    let (m0, nu0) = moments(&state, params.phi, params.p);
    readout(m0, nu0, Regime::Ridge, None)
}

/// Ridge path when `λ > 0`, ridgeless limit when `λ = 0`.
pub fn predict(params: &RegimeParams, scalars: &StrategyScalars) -> Result<TheoryPrediction> {
    if params.lambda > 0.0 {
        theory_test_error(params, scalars)
    } else {
        ridgeless_test_error(scalars, params.phi, params.p)
    }
}

/// `λ → 0` limit of the prediction, away from the interpolation threshold.
///
/// Below the threshold (`φ < p`) the spectral quantities have finite limits.
/// Above it `m`, `m̃` blow up like `1/λ`; the limits of `λm0` and `λ²ν0` are
/// used instead, which leaves the readout unchanged.
pub fn ridgeless_test_error(
    scalars: &StrategyScalars,
    phi: f64,
    p: f64,
) -> Result<TheoryPrediction> {
    let params = RegimeParams::new(phi, 0.0, p)?;
    check_consistent(p, scalars)?;
    if (phi - p).abs() < THRESHOLD_GAP {
        return Err(Error::InterpolationThreshold { phi, p });
    }
    let gamma = scalars.gamma;
    if gamma <= 0.0 {
        return Err(invalid(format!(
            "ridgeless limit needs gamma > 0, got {gamma}"
        )));
    }
    let closed_form = closed_form_pair(scalars, params.phi, params.p);

    if phi < p {
        let gap = p - phi;
        let m = 1.0 / gap;
        let m_prime = p / gap.powi(3);
        let state = assemble(phi, 0.0, m, m_prime, scalars);
        let (m0, nu0) = moments(&state, phi, p);
        readout(m0, nu0, Regime::RidgelessUnder, Some(closed_form))
    } else {
        let c0 = 1.0 - p / phi;
        let tilde = c0 / (gamma / phi + c0);
        let (omega, omega_tilde) = omegas(scalars);
        let m0 = SQRT_2_OVER_PI * (omega * c0 + omega_tilde * tilde);
        // λ·r_var and λ²·r_var′ share the same limit.
        let sv = scalars.beta.powi(2) * c0 + scalars.beta_tilde.powi(2) * tilde;
        // λ·m′/(1+φm) → 1/φ
        let nu0 = p * phi * c0 + sv - 2.0 * sv;
        readout(m0, nu0, Regime::RidgelessOver, Some(closed_form))
    }
}

/// The closed-form ridgeless pair, written in terms of `β` and `ρ` only.
fn closed_form_pair(scalars: &StrategyScalars, phi: f64, p: f64) -> ClosedFormPair {
    let rho2 = scalars.rho * scalars.rho;
    let beta = scalars.beta;
    let gamma = scalars.gamma;
    let (a, b) = if phi < p {
        let gap = p - phi;
        let r0 = 1.0 - rho2 + rho2 * p / gamma;
        let r0p = p * (1.0 - rho2 + rho2 * (gap * p / (gamma * gamma) + phi / gamma));
        let a = beta * SQRT_2_OVER_PI * r0 / gap;
        let b = (p * p * phi + beta * beta * (r0p - 2.0 * phi * r0)) / gap.powi(3);
        (a, b)
    } else {
        let c0 = 1.0 - p / phi;
        let r0 = 1.0 - rho2 + rho2 / (gamma / phi + c0);
        (
            beta * SQRT_2_OVER_PI * c0 * r0,
            c0 * (p * phi - beta * beta * r0),
        )
    };
    ClosedFormPair {
        a,
        b,
        test_error: readout_parts(a, b).map(|(_, err, _)| err),
    }
}
