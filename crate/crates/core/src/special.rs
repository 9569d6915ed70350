//! Standard normal density, distribution function and friends.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{PI, SQRT_2};

/// φ(0) = 1/√(2π).
pub const PHI0: f64 = 0.398_942_280_401_432_7;

/// √(2/π) = E|G| for G ~ N(0, 1).
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    PHI0 * (-0.5 * x * x).exp()
}

/// Φ(x), accurate to a few ulp in both tails (computed from erfc).
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// Φ⁻¹(u) for u in (0, 1).
pub fn norm_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let x = -SQRT_2 * erfc_inv(2.0 * u);
    // one Newton step against the accurate CDF
    let density = norm_pdf(x);
    if density > 0.0 {
        x - (norm_cdf(x) - u) / density
    } else {
        x
    }
}

#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// E[sign(aG + b)] = 2Φ(b/|a|) − 1, with the a → 0 limit sign(b).
pub fn expected_sign(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return sign(b);
    }
    2.0 * norm_cdf(b / a.abs()) - 1.0
}

/// E[sign(aG + b)·G] = 2·sign(a)·φ(b/a), with the a → 0 limit 0.
pub fn expected_sign_times_gaussian(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    2.0 * a.signum() * norm_pdf(b / a)
}

/// sign with sign(0) = 0.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Misclassification probability of `ŵ` when `cos∠(ŵ, w0) = cosine` and
/// x ~ N(0, I): arccos(cosine)/π.
pub fn angular_error(cosine: f64) -> f64 {
    cosine.clamp(-1.0, 1.0).acos() / PI
}
