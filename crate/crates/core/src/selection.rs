//! Selection strategies `q` and the scalars through which they enter the
//! asymptotic test error.
//!
//! A strategy keeps a pool example `x` with probability `q(xᵀw_s)`, where
//! `w_s` is a unit pruning direction. With `G ~ N(0, 1)`, `ρ = w_sᵀw0/‖w0‖`
//! and `τ = ρ/√(1−ρ²)`, the strategy only matters through
//!
//! ```text
//! p  = E[q(G)]                γ  = E[q(G) G²]
//! β  = 2 E[q(G) φ(τG)]        β̃ = 2 E[q(G) Φ(τG) G]
//! ```
//!
//! [`scalars_closed_form`] evaluates these for the threshold strategies and
//! [`scalars_quadrature`] evaluates them for any strategy by numerical
//! integration; the two routes are checked against each other in the tests.

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussianIntegrator;
use crate::special::{norm_cdf, norm_pdf, norm_quantile, PHI0};
use std::fmt;
use std::str::FromStr;

/// Default node count for [`scalars_quadrature`].
pub const DEFAULT_NODES: usize = 128;

/// Minimum node count accepted by [`scalars_quadrature`].
pub const MIN_NODES: usize = 32;

/// |ρ| in this open band below 1 is rejected: τ loses all precision there.
pub const RHO_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionStrategy {
    KeepAll,
    /// Keep `|t| ≤ ξ`: examples near the pruning boundary.
    KeepHard {
        xi: f64,
    },
    /// Keep `|t| > ξ`: examples far from the pruning boundary.
    KeepEasy {
        xi: f64,
    },
    /// Keep with probability `[σ(t)(1−σ(t))]^ω / (1/4)^ω`, so `sup q = 1`.
    SigmoidPower {
        exponent: f64,
    },
}

impl SelectionStrategy {
    pub fn keep_hard(xi: f64) -> Result<Self> {
        let s = SelectionStrategy::KeepHard { xi };
        s.validate()?;
        Ok(s)
    }

    pub fn keep_easy(xi: f64) -> Result<Self> {
        let s = SelectionStrategy::KeepEasy { xi };
        s.validate()?;
        Ok(s)
    }

    pub fn sigmoid_power(exponent: f64) -> Result<Self> {
        let s = SelectionStrategy::SigmoidPower { exponent };
        s.validate()?;
        Ok(s)
    }

    /// Keep-hard threshold with keep probability `p`: ξ = Φ⁻¹((1+p)/2).
    pub fn keep_hard_with_probability(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::keep_hard(norm_quantile(0.5 * (1.0 + p)))
    }

    /// Keep-easy threshold with keep probability `p`: ξ = Φ⁻¹(1 − p/2).
    pub fn keep_easy_with_probability(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::keep_easy(norm_quantile(1.0 - 0.5 * p))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SelectionStrategy::KeepAll => Ok(()),
            SelectionStrategy::KeepHard { xi } | SelectionStrategy::KeepEasy { xi } => {
                if xi.is_nan() || xi < 0.0 {
                    Err(invalid(format!("threshold xi must be >= 0, got {xi}")))
                } else {
                    Ok(())
                }
            }
            SelectionStrategy::SigmoidPower { exponent } => {
                if !exponent.is_finite() || exponent < 0.0 {
                    Err(invalid(format!(
                        "sigmoid exponent must be finite and >= 0 (sup q = 1 normalization), got {exponent}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Keep probability `q(t)` of an example with projection `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SelectionStrategy::KeepAll => 1.0,
            SelectionStrategy::KeepHard { xi } => {
                if t.abs() <= xi {
                    1.0
                } else {
                    0.0
                }
            }
            SelectionStrategy::KeepEasy { xi } => {
                if t.abs() > xi {
                    1.0
                } else {
                    0.0
                }
            }
            SelectionStrategy::SigmoidPower { exponent } => {
                if exponent == 0.0 {
                    return 1.0;
                }
                // 4σ(t)(1−σ(t)) = cosh(t/2)^{-2}; ln cosh(a) = |a| + ln(1+e^{-2|a|}) − ln 2
                let a = 0.5 * t.abs();
                let ln_cosh = a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2;
                (-2.0 * exponent * ln_cosh).exp()
            }
        }
    }

    /// True when `q` only takes the values 0 and 1.
    pub fn is_binary(&self) -> bool {
        !matches!(self, SelectionStrategy::SigmoidPower { exponent } if *exponent != 0.0)
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            SelectionStrategy::KeepHard { xi } | SelectionStrategy::KeepEasy { xi } => Some(xi),
            _ => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match *self {
            SelectionStrategy::SigmoidPower { exponent } => Some(exponent),
            _ => None,
        }
    }

    /// Short kind label: `all`, `kh`, `ke`, `sig`.
    pub fn kind(&self) -> &'static str {
        match self {
            SelectionStrategy::KeepAll => "all",
            SelectionStrategy::KeepHard { .. } => "kh",
            SelectionStrategy::KeepEasy { .. } => "ke",
            SelectionStrategy::SigmoidPower { .. } => "sig",
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self.threshold() {
            Some(xi) if xi.is_finite() && xi > 0.0 => vec![-xi, xi],
            _ => Vec::new(),
        }
    }
}

/// Free-function form of [`SelectionStrategy::eval`].
pub fn eval_q(strategy: &SelectionStrategy, t: f64) -> f64 {
    strategy.eval(t)
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SelectionStrategy::KeepAll => write!(f, "all"),
            SelectionStrategy::KeepHard { xi } => write!(f, "kh:xi={xi:?}"),
            SelectionStrategy::KeepEasy { xi } => write!(f, "ke:xi={xi:?}"),
            SelectionStrategy::SigmoidPower { exponent } => write!(f, "sig:w={exponent:?}"),
        }
    }
}

impl FromStr for SelectionStrategy {
    type Err = Error;

    /// Parses `all`, `kh:xi=1.0`, `ke:xi=0.5`, `sig:w=2.0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (s, None),
        };
        let param = |expected: &str| -> Result<f64> {
            let rest = rest.ok_or_else(|| {
                Error::Parse(format!("strategy `{s}` needs a `{expected}=` parameter"))
            })?;
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `{expected}=<value>` in `{s}`")))?;
            if key.trim() != expected {
                return Err(Error::Parse(format!(
                    "unknown parameter `{}` in `{s}` (expected `{expected}`)",
                    key.trim()
                )));
            }
            value
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number in `{s}`: {e}")))
        };
        match kind {
            "all" if rest.is_none() => Ok(SelectionStrategy::KeepAll),
            "kh" => Self::keep_hard(param("xi")?),
            "ke" => Self::keep_easy(param("xi")?),
            "sig" => Self::sigmoid_power(param("w")?),
            _ => Err(Error::Parse(format!("unknown strategy descriptor `{s}`"))),
        }
    }
}

/// Sufficient statistics of a strategy at alignment ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyScalars {
    pub p: f64,
    pub rho: f64,
    /// ρ/√(1−ρ²); ±∞ at |ρ| = 1.
    pub tau: f64,
    pub gamma: f64,
    pub beta: f64,
    pub beta_tilde: f64,
}

/// Coefficients of the pruned class-mean vector `c = E[q(xᵀw_s) y x]` in the
/// orthonormal basis `(u, v)`: `u` along the pruning direction, `v` the
/// completion toward the labeling direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCoefficients {
    /// β̃, the coefficient on `u`.
    pub along_pruning: f64,
    /// β, the coefficient on `v`.
    pub orthogonal: f64,
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(invalid(format!(
            "alignment rho must lie in [-1, 1], got {rho}"
        )));
    }
    let gap = 1.0 - rho.abs();
    if gap > 0.0 && gap < RHO_GUARD {
        return Err(invalid(format!(
            "|rho| = {} is within {RHO_GUARD:e} of 1; pass exactly ±1 instead",
            rho.abs()
        )));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!(
            "keep probability must lie in (0, 1], got {p}"
        )));
    }
    Ok(())
}

fn tau_of(rho: f64) -> f64 {
    if rho.abs() == 1.0 {
        rho * f64::INFINITY
    } else {
        rho / (1.0 - rho * rho).sqrt()
    }
}

/// `ξ φ(ξ)`, with the ξ = ∞ limit 0.
fn xi_pdf(xi: f64) -> f64 {
    if xi.is_finite() {
        xi * norm_pdf(xi)
    } else {
        0.0
    }
}

/// Closed-form scalars for `KeepAll`, `KeepHard` and `KeepEasy`.
pub fn scalars_closed_form(strategy: &SelectionStrategy, rho: f64) -> Result<StrategyScalars> {
    strategy.validate()?;
    check_rho(rho)?;
    let tau = tau_of(rho);
    let aligned = rho.abs() == 1.0;
    let s = (1.0 - rho * rho).sqrt();

    let (p, gamma, beta, beta_tilde) = match *strategy {
        SelectionStrategy::KeepAll => (1.0, 1.0, 2.0 * PHI0 * s, 2.0 * rho * PHI0),
        SelectionStrategy::KeepHard { xi } => {
            let p = 2.0 * norm_cdf(xi) - 1.0;
            let gamma = p - 2.0 * xi_pdf(xi);
            if aligned {
                (p, gamma, 0.0, rho * 2.0 * (PHI0 - norm_pdf(xi)))
            } else {
                let eps1 = 2.0 * norm_cdf(xi / s) - 1.0;
                let eps2 = 2.0 * norm_cdf(tau * xi) - 1.0;
                let beta = 2.0 * PHI0 * s * eps1;
                let beta_tilde = 2.0 * (rho * PHI0 * eps1 - norm_pdf(xi) * eps2);
                (p, gamma, beta, beta_tilde)
            }
        }
        SelectionStrategy::KeepEasy { xi } => {
            let p = 2.0 * norm_cdf(-xi);
            let gamma = p + 2.0 * xi_pdf(xi);
            if aligned {
                (p, gamma, 0.0, rho * 2.0 * norm_pdf(xi))
            } else {
                let eps1 = 2.0 * norm_cdf(-xi / s);
                let eps2 = 2.0 * norm_cdf(tau * xi) - 1.0;
                let beta = 2.0 * PHI0 * s * eps1;
                let beta_tilde = 2.0 * (rho * PHI0 * eps1 + norm_pdf(xi) * eps2);
                (p, gamma, beta, beta_tilde)
            }
        }
        SelectionStrategy::SigmoidPower { exponent: 0.0 } => {
            return scalars_closed_form(&SelectionStrategy::KeepAll, rho);
        }
        SelectionStrategy::SigmoidPower { .. } => {
            return Err(Error::NoClosedForm(strategy.to_string()));
        }
    };
    Ok(StrategyScalars {
        p,
        rho,
        tau,
        gamma,
        beta,
        beta_tilde,
    })
}

/// Scalars by one-dimensional Gaussian quadrature, valid for every strategy.
pub fn scalars_quadrature(
    strategy: &SelectionStrategy,
    rho: f64,
    nodes: usize,
) -> Result<StrategyScalars> {
    strategy.validate()?;
    check_rho(rho)?;
    if nodes < MIN_NODES {
        return Err(invalid(format!(
            "quadrature needs at least {MIN_NODES} nodes, got {nodes}"
        )));
    }
    let integ = GaussianIntegrator::new(nodes)?;
    let tau = tau_of(rho);
    let q = |g: f64| strategy.eval(g);

    let mut cuts = strategy.breakpoints();
    let expect = |f: &dyn Fn(f64) -> f64, cuts: &[f64]| {
        if cuts.is_empty() {
            integ.smooth(f)
        } else {
            integ.piecewise(f, cuts)
        }
    };

    let p = expect(&|g| q(g), &cuts);
    let gamma = expect(&|g| q(g) * g * g, &cuts);

    let (beta, beta_tilde) = if rho.abs() == 1.0 {
        cuts.push(0.0);
        let abs_moment = expect(&|g| q(g) * g.abs(), &cuts);
        (0.0, rho.signum() * abs_moment)
    } else {
        // Φ(τg) turns into a near step at 0 for strong alignment.
        if tau.abs() > 3.0 {
            cuts.push(0.0);
        }
        let beta = 2.0 * expect(&|g| q(g) * norm_pdf(tau * g), &cuts);
        let beta_tilde = 2.0 * expect(&|g| q(g) * norm_cdf(tau * g) * g, &cuts);
        (beta, beta_tilde)
    };

    Ok(StrategyScalars {
        p,
        rho,
        tau,
        gamma,
        beta,
        beta_tilde,
    })
}

/// Closed form where one exists, otherwise quadrature with [`DEFAULT_NODES`].
pub fn scalars(strategy: &SelectionStrategy, rho: f64) -> Result<StrategyScalars> {
    match scalars_closed_form(strategy, rho) {
        Err(Error::NoClosedForm(_)) => scalars_quadrature(strategy, rho, DEFAULT_NODES),
        other => other,
    }
}

/// Coefficients `(β̃, β)` of `c = β̃u + βv`. At `ρ = ±1` the basis collapses to
/// `u` and the result is `(±E[q(G)|G|], 0)`.
pub fn mean_vector_coeffs(strategy: &SelectionStrategy, rho: f64) -> Result<MeanCoefficients> {
    let s = scalars(strategy, rho)?;
    Ok(MeanCoefficients {
        along_pruning: s.beta_tilde,
        orthogonal: s.beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn kh(xi: f64) -> SelectionStrategy {
        SelectionStrategy::keep_hard(xi).unwrap()
    }

    fn ke(xi: f64) -> SelectionStrategy {
        SelectionStrategy::keep_easy(xi).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(kh(1.0).eval(0.5), 1.0);
        assert_eq!(kh(1.0).eval(-1.5), 0.0);
        assert_eq!(kh(1.0).eval(1.0), 1.0);
        assert_eq!(ke(1.0).eval(1.0), 0.0);
        assert_eq!(ke(1.0).eval(-1.5), 1.0);
        assert_eq!(
            SelectionStrategy::sigmoid_power(1.0).unwrap().eval(0.0),
            1.0
        );
        assert_eq!(SelectionStrategy::KeepAll.eval(123.0), 1.0);
    }

    #[test]
    fn sigmoid_power_matches_direct_formula() {
        let s = SelectionStrategy::sigmoid_power(1.7).unwrap();
        for &t in &[-4.0f64, -0.3, 0.0, 0.9, 6.0] {
            let sg = 1.0 / (1.0 + (-t).exp());
            let direct = (sg * (1.0 - sg)).powf(1.7) / 0.25f64.powf(1.7);
            assert_abs_diff_eq!(s.eval(t), direct, epsilon = 1e-14);
        }
        // no overflow far out
        assert!(s.eval(5000.0) >= 0.0);
    }

    #[test]
    fn limiting_strategies_coincide() {
        let inf = kh(f64::INFINITY);
        let zero = ke(0.0);
        for &t in &[-3.0, -0.1, 0.2, 10.0] {
            assert_eq!(inf.eval(t), 1.0);
            assert_eq!(zero.eval(t), 1.0);
        }
        // ke(0) drops only t = 0, a null set
        assert_eq!(zero.eval(0.0), 0.0);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(SelectionStrategy::keep_hard(-0.1).is_err());
        assert!(SelectionStrategy::keep_easy(f64::NAN).is_err());
        assert!(SelectionStrategy::sigmoid_power(-1.0).is_err());
        assert!(SelectionStrategy::sigmoid_power(f64::INFINITY).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        for s in [
            SelectionStrategy::KeepAll,
            kh(1.0),
            ke(0.5),
            SelectionStrategy::sigmoid_power(2.0).unwrap(),
            kh(f64::INFINITY),
            kh(0.123_456_789_012_345_67),
        ] {
            let text = s.to_string();
            assert_eq!(text.parse::<SelectionStrategy>().unwrap(), s, "{text}");
        }
        assert_eq!(kh(1.0).to_string(), "kh:xi=1.0");
        assert_eq!(
            SelectionStrategy::sigmoid_power(2.0).unwrap().to_string(),
            "sig:w=2.0"
        );
        assert_eq!(
            " ke : xi = 0.5 ".parse::<SelectionStrategy>().unwrap(),
            ke(0.5)
        );
    }

    #[test]
    fn descriptor_errors() {
        for bad in [
            "",
            "kh",
            "kh:w=1",
            "kh:xi=abc",
            "zz:xi=1",
            "all:xi=1",
            "kh:xi=-1",
        ] {
            assert!(bad.parse::<SelectionStrategy>().is_err(), "{bad}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let s = scalars_closed_form(&kh(f64::INFINITY), 0.5).unwrap();
        assert_eq!(s.p, 1.0);
        assert_eq!(s.gamma, 1.0);
        assert_abs_diff_eq!(s.beta_tilde, 2.0 * 0.5 * PHI0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.beta_tilde, 0.398_942_280_401_432_7, epsilon = 1e-15);

        let s = scalars_closed_form(&kh(1.0), 0.0).unwrap();
        assert_eq!(s.beta_tilde, 0.0);
        assert_eq!(s.tau, 0.0);

        let s = scalars_closed_form(&SelectionStrategy::KeepAll, 0.3).unwrap();
        assert_abs_diff_eq!(s.beta, 2.0 * PHI0 * 0.91f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn sigmoid_has_no_closed_form() {
        let s = SelectionStrategy::sigmoid_power(2.0).unwrap();
        assert!(matches!(
            scalars_closed_form(&s, 0.5),
            Err(Error::NoClosedForm(_))
        ));
        // exponent 0 is KeepAll
        let s0 = SelectionStrategy::sigmoid_power(0.0).unwrap();
        assert_eq!(
            scalars_closed_form(&s0, 0.5).unwrap(),
            scalars_closed_form(&SelectionStrategy::KeepAll, 0.5).unwrap()
        );
    }

    #[test]
    fn rho_guard_band() {
        assert!(scalars_closed_form(&kh(1.0), 1.0 - 1e-12).is_err());
        assert!(scalars_closed_form(&kh(1.0), 1.5).is_err());
        assert!(scalars_closed_form(&kh(1.0), f64::NAN).is_err());
        assert!(scalars_closed_form(&kh(1.0), 1.0).is_ok());
        assert!(scalars_closed_form(&kh(1.0), -1.0).is_ok());
        assert!(scalars_closed_form(&kh(1.0), 1.0 - 1e-6).is_ok());
    }

    #[test]
    fn quadrature_matches_closed_form_on_grid() {
        for &xi in &[0.25, 0.5, 1.0, 2.0] {
            for &rho in &[0.0, 0.3, 0.6, 0.9] {
                for strat in [kh(xi), ke(xi)] {
                    let a = scalars_closed_form(&strat, rho).unwrap();
                    let b = scalars_quadrature(&strat, rho, DEFAULT_NODES).unwrap();
                    for (x, y) in [
                        (a.p, b.p),
                        (a.gamma, b.gamma),
                        (a.beta, b.beta),
                        (a.beta_tilde, b.beta_tilde),
                    ] {
                        assert_abs_diff_eq!(x, y, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_form_when_aligned() {
        for &rho in &[1.0, -1.0] {
            for strat in [kh(0.7), ke(0.7), SelectionStrategy::KeepAll] {
                let a = scalars_closed_form(&strat, rho).unwrap();
                let b = scalars_quadrature(&strat, rho, DEFAULT_NODES).unwrap();
                assert_abs_diff_eq!(a.beta_tilde, b.beta_tilde, epsilon = 1e-12);
                assert_eq!(b.beta, 0.0);
            }
        }
    }

    #[test]
    fn quadrature_node_floor() {
        assert!(scalars_quadrature(&kh(1.0), 0.5, 16).is_err());
        assert!(scalars_quadrature(&kh(1.0), 0.5, 32).is_ok());
    }

    #[test]
    fn mean_vector_examples() {
        let c = mean_vector_coeffs(&SelectionStrategy::KeepAll, 1.0).unwrap();
        assert_abs_diff_eq!(c.along_pruning, 2.0 * PHI0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            c.along_pruning,
            (2.0 / std::f64::consts::PI).sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(c.orthogonal, 0.0);

        let c = mean_vector_coeffs(&kh(1.0), 0.0).unwrap();
        assert_eq!(c.along_pruning, 0.0);
        assert_abs_diff_eq!(
            c.orthogonal,
            2.0 * PHI0 * (2.0 * norm_cdf(1.0) - 1.0),
            epsilon = 1e-15
        );

        let c = mean_vector_coeffs(&kh(1.0), -1.0).unwrap();
        assert!(c.along_pruning < 0.0);
    }

    #[test]
    fn keep_probability_constructors() {
        let s = SelectionStrategy::keep_hard_with_probability(0.5).unwrap();
        assert_abs_diff_eq!(
            scalars_closed_form(&s, 0.0).unwrap().p,
            0.5,
            epsilon = 1e-13
        );
        let s = SelectionStrategy::keep_easy_with_probability(0.2).unwrap();
        assert_abs_diff_eq!(
            scalars_closed_form(&s, 0.0).unwrap().p,
            0.2,
            epsilon = 1e-13
        );
        assert!(SelectionStrategy::keep_hard_with_probability(0.0).is_err());
    }

    fn sum_identities(xi: f64, rho: f64) {
        let a = scalars_closed_form(&kh(xi), rho).unwrap();
        let b = scalars_closed_form(&ke(xi), rho).unwrap();
        let s = (1.0 - rho * rho).sqrt();
        assert_abs_diff_eq!(a.p + b.p, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(a.gamma + b.gamma, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(a.beta + b.beta, 2.0 * PHI0 * s, epsilon = 1e-10);
        assert_abs_diff_eq!(
            a.beta_tilde + b.beta_tilde,
            2.0 * rho * PHI0,
            epsilon = 1e-10
        );
    }

    proptest! {
        #[test]
        fn keep_hard_keep_easy_additivity(xi in 0.0f64..6.0, rho in -0.999f64..0.999) {
            sum_identities(xi, rho);
        }

        #[test]
        fn strategies_are_symmetric(t in -50.0f64..50.0, xi in 0.0f64..4.0, w in 0.0f64..5.0) {
            for s in [SelectionStrategy::KeepAll, kh(xi), ke(xi),
                      SelectionStrategy::sigmoid_power(w).unwrap()] {
                prop_assert_eq!(s.eval(t), s.eval(-t));
                let q = s.eval(t);
                prop_assert!((0.0..=1.0).contains(&q));
                if s.is_binary() {
                    prop_assert!(q == 0.0 || q == 1.0);
                }
            }
        }

        #[test]
        fn gamma_in_unit_interval(xi in 0.0f64..8.0, rho in -0.99f64..0.99) {
            for s in [kh(xi), ke(xi)] {
                let sc = scalars_closed_form(&s, rho).unwrap();
                prop_assert!(sc.gamma >= -1e-15 && sc.gamma <= 1.0 + 1e-15);
                prop_assert!(sc.p >= 0.0 && sc.p <= 1.0);
            }
        }

        #[test]
        fn keep_hard_monotone_in_threshold(a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let s_lo = scalars_closed_form(&kh(lo), 0.3).unwrap();
            let s_hi = scalars_closed_form(&kh(hi), 0.3).unwrap();
            prop_assert!(s_lo.p <= s_hi.p);
            prop_assert!(s_lo.gamma <= s_hi.gamma + 1e-16);
        }
    }
}
