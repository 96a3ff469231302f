//! Weighted ℓ1 penalties, soft thresholding, penalized quadratic minima and
//! Euclidean projection onto the ℓ1-ball.

use crate::error::{ensure_positive, Error, Result};
use crate::numerics::bisect_root;

/// γ(θ) = Σⱼ λⱼ|θⱼ| with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Penalty {
    weights: Vec<f64>,
}

impl L1Penalty {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("penalty needs at least one weight".into()));
        }
        for &w in &weights {
            ensure_positive("penalty weight", w)?;
        }
        Ok(Self { weights })
    }

    /// The same weight `lam` on each of `d` coordinates.
    pub fn uniform(lam: f64, d: usize) -> Result<Self> {
        Self::new(vec![lam; d])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: theta.len(),
            });
        }
        Ok(self.weights.iter().zip(theta).map(|(w, t)| w * t.abs()).sum())
    }
}

/// γ(θ) for the given penalty.
pub fn penalty_eval(p: &L1Penalty, theta: &[f64]) -> Result<f64> {
    p.eval(theta)
}

/// sign(u)·max(|u| − lam, 0)
#[inline]
pub fn soft_threshold(u: f64, lam: f64) -> f64 {
    debug_assert!(lam >= 0.0);
    let shrunk = u.abs() - lam;
    if shrunk > 0.0 {
        shrunk.copysign(u)
    } else {
        0.0
    }
}

/// min over θ of (a/2)(θ − u)² + lam·|θ|.
///
/// The minimizer is `soft_threshold(u, lam / a)`.
#[inline]
pub fn penalized_quad_min(a: f64, u: f64, lam: f64) -> f64 {
    debug_assert!(a > 0.0 && lam >= 0.0);
    if u.abs() <= lam / a {
        0.5 * a * u * u
    } else {
        lam * u.abs() - lam * lam / (2.0 * a)
    }
}

/// Euclidean projection of `x` onto {θ : ‖θ‖₁ ≤ radius}.
pub fn l1_ball_project(x: &[f64], radius: f64) -> Result<Vec<f64>> {
    ensure_positive("ball radius", radius)?;
    let norm: f64 = x.iter().map(|v| v.abs()).sum();
    if norm <= radius {
        return Ok(x.to_vec());
    }
    let top = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let excess = |tau: f64| x.iter().map(|v| (v.abs() - tau).max(0.0)).sum::<f64>() - radius;
    let tau = bisect_root(excess, 0.0, top, 0.0)?;
    Ok(x.iter().map(|&v| soft_threshold(v, tau)).collect())
}
