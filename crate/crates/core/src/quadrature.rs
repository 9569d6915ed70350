//! Gauss–Hermite and Gauss–Legendre rules, and expectations against the
//! standard normal measure built from them.
//!
//! Nodes are found by Newton iteration on the three-term recurrences
//! (orthonormal Hermite polynomials keep the recurrence stable for a few
//! hundred nodes). Smooth integrands go through Gauss–Hermite after the change
//! of variables `E f(G) = π^{-1/2} Σ wᵢ f(√2 xᵢ)`. Integrands with jumps or
//! kinks are split at their breakpoints and each piece is covered by
//! Gauss–Legendre panels, because a global Hermite rule converges only
//! algebraically across a discontinuity.

use crate::error::{invalid, Result};
use crate::special::norm_pdf;
use std::f64::consts::{PI, SQRT_2};

const NEWTON_TOL: f64 = 1e-15;
const MAX_NEWTON: usize = 200;

/// Beyond this radius the standard normal mass is below 1e-32.
pub const GAUSSIAN_RADIUS: f64 = 12.0;

/// Panels wider than this are subdivided.
const MAX_PANEL_WIDTH: f64 = 2.0;

/// Gauss–Hermite rule for `∫ e^{-x²} f(x) dx` over the real line.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Gauss-Hermite rule needs at least one node"));
        }
        // π^{-1/4}
        let pim4 = 0.751_125_544_464_942_5_f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0_f64;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut deriv = 0.0;
            for _ in 0..MAX_NEWTON {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                deriv = (2.0 * nf).sqrt() * p2;
                let step = p1 / deriv;
                z -= step;
                if step.abs() <= NEWTON_TOL * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = 2.0 / (deriv * deriv);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ e^{-x²} f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `E f(G)` for `G ~ N(0, 1)`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate(|x| f(SQRT_2 * x)) / PI.sqrt()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Gauss-Legendre rule needs at least one node"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..MAX_NEWTON {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
                }
                deriv = nf * (z * p1 - p2) / (z * z - 1.0);
                let step = p1 / deriv;
                z -= step;
                if step.abs() <= NEWTON_TOL {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * deriv * deriv);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// Expectations `E f(G)`, `G ~ N(0, 1)`, for smooth or piecewise-smooth `f`.
#[derive(Debug, Clone)]
pub struct GaussianIntegrator {
    hermite: GaussHermite,
    legendre: GaussLegendre,
}

impl GaussianIntegrator {
    pub fn new(nodes: usize) -> Result<Self> {
        Ok(Self {
            hermite: GaussHermite::new(nodes)?,
            legendre: GaussLegendre::new(nodes)?,
        })
    }

    pub fn nodes(&self) -> usize {
        self.hermite.len()
    }

    /// Gauss–Hermite expectation; `f` should be smooth on the whole line.
    pub fn smooth<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.hermite.expectation(f)
    }

    /// Expectation of a function that is smooth between `breakpoints`.
    pub fn piecewise<F: Fn(f64) -> f64>(&self, f: F, breakpoints: &[f64]) -> f64 {
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && b.abs() < GAUSSIAN_RADIUS)
            .collect();
        cuts.push(-GAUSSIAN_RADIUS);
        cuts.push(GAUSSIAN_RADIUS);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut total = 0.0;
        for piece in cuts.windows(2) {
            let (a, b) = (piece[0], piece[1]);
            let panels = ((b - a) / MAX_PANEL_WIDTH).ceil().max(1.0) as usize;
            let width = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + k as f64 * width;
                let hi = if k + 1 == panels { b } else { lo + width };
                total += self.legendre.integrate(lo, hi, |g| f(g) * norm_pdf(g));
            }
        }
        total
    }
}
