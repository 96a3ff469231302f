//! Lower-bound side of the factor-of-two comparison: the three-point prior
//! (1−ε)δ₀ + (ε/2)(δ_{−μ} + δ_μ) with μ = √(2 ln(1/ε)/L), its Bayes risk
//! under the L-precision Gaussian log loss, and the asymptotic minimax
//! lower bound over ℓ1-balls.

use crate::error::{ensure_positive, Error, Result};
use crate::numerics::{bisect_root, log_sum_exp, quadrature_oracle, Interval};

const RISK_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePointPrior {
    pub eps: f64,
    pub mu: f64,
}

impl ThreePointPrior {
    /// (location, mass) of the three atoms.
    pub fn atoms(&self) -> [(f64, f64); 3] {
        [
            (0.0, 1.0 - self.eps),
            (-self.mu, 0.5 * self.eps),
            (self.mu, 0.5 * self.eps),
        ]
    }
}

fn ensure_unit_open(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// The three-point prior with μ(ε) = √(2·ln(1/ε)/L).
pub fn three_point(eps: f64, smoothness: f64) -> Result<ThreePointPrior> {
    ensure_unit_open(eps)?;
    ensure_positive("smoothness", smoothness)?;
    Ok(ThreePointPrior {
        eps,
        mu: (-2.0 * eps.ln() / smoothness).sqrt(),
    })
}

/// Shannon entropy (nats) of the three-point masses,
/// (1−ε)·ln(1/(1−ε)) + ε·ln(2/ε).
pub fn prior_entropy(eps: f64) -> Result<f64> {
    ensure_unit_open(eps)?;
    Ok(-(1.0 - eps) * (-eps).ln_1p() + eps * (2.0 / eps).ln())
}

/// Bayes risk of the three-point prior for one observation
/// X ~ N(θ, 1/L), which for log loss is the mutual information between θ and X:
///
///   Σ_θ F(θ) ∫ p(x|θ) ln(p(x|θ)/p̄(x)) dx,  p̄ = Σ_θ F(θ) p(·|θ).
pub fn bayes_risk_three_point(eps: f64, smoothness: f64) -> Result<f64> {
    let prior = three_point(eps, smoothness)?;
    let atoms = prior.atoms();
    let l = smoothness;
    let ln_norm = 0.5 * (l / (2.0 * std::f64::consts::PI)).ln();
    let ln_mass = atoms.map(|(_, m)| m.ln());
    let integrand = |x: f64| {
        let ln_p = atoms.map(|(loc, _)| -0.5 * l * (x - loc) * (x - loc) + ln_norm);
        let ln_mix = log_sum_exp(&[ln_mass[0] + ln_p[0], ln_mass[1] + ln_p[1], ln_mass[2] + ln_p[2]]);
        (0..3)
            .map(|k| (ln_mass[k] + ln_p[k]).exp() * (ln_p[k] - ln_mix))
            .sum::<f64>()
    };
    let reach = prior.mu + 10.0 / l.sqrt();
    let cuts = [-reach, -prior.mu, 0.0, prior.mu, reach];
    let mut risk = 0.0;
    for pair in cuts.windows(2) {
        risk += quadrature_oracle(integrand, Interval::new(pair[0], pair[1])?, RISK_TOL)?;
    }
    Ok(risk)
}

/// (B/2)·√(2·L·ln(d/√L)), the asymptotic minimax regret lower bound over
/// {‖θ‖₁ ≤ B} with total precision L.
pub fn minimax_regret_lower(radius: f64, total_smoothness: f64, d: usize) -> Result<f64> {
    ensure_positive("radius", radius)?;
    ensure_positive("smoothness", total_smoothness)?;
    let ratio = d as f64 / total_smoothness.sqrt();
    if ratio <= 1.0 {
        return Err(Error::Domain(format!(
            "lower bound needs d > sqrt(L); got d = {d}, sqrt(L) = {}",
            total_smoothness.sqrt()
        )));
    }
    Ok(0.5 * radius * (2.0 * total_smoothness * ratio.ln()).sqrt())
}

/// Magnitudes governing the least-favorable-prior argument on the ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfpDiagnostics {
    pub eps: f64,
    /// Chebyshev bound (1−c)²/(c²·d·ε) on the prior mass outside the ball.
    pub p_d_bound: f64,
    /// d·ε, which must diverge.
    pub d_eps: f64,
    /// d·ε·ln(1/ε), the scale of the d-dimensional Bayes risk.
    pub risk_scale: f64,
}

/// The three magnitudes at any ε, without the consistency requirement.
pub fn lfp_magnitudes(eps: f64, c: f64, d: usize) -> Result<LfpDiagnostics> {
    ensure_unit_open(eps)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("c must lie in (0, 1), got {c}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let d_eps = d as f64 * eps;
    Ok(LfpDiagnostics {
        eps,
        p_d_bound: (1.0 - c) * (1.0 - c) / (c * c * d_eps),
        d_eps,
        risk_scale: -d_eps * eps.ln(),
    })
}

/// Diagnostics at an ε tied to the ball by ε·μ(ε) = (1−c)·B/d.
pub fn lfp_diagnostics(eps: f64, c: f64, radius: f64, d: usize, smoothness: f64) -> Result<LfpDiagnostics> {
    ensure_positive("radius", radius)?;
    let prior = three_point(eps, smoothness)?;
    let target = (1.0 - c) * radius / d as f64;
    let got = eps * prior.mu;
    if (got - target).abs() > 1e-9 * target.abs() {
        return Err(Error::Domain(format!(
            "eps*mu = {got} but (1-c)B/d = {target}; use solve_lfp_eps for a consistent eps"
        )));
    }
    lfp_magnitudes(eps, c, d)
}

/// Solves ε·μ(ε) = (1−c)·B/d for ε on (0, e^{−1/2}), where the left side is
/// increasing.
pub fn solve_lfp_eps(c: f64, radius: f64, d: usize, smoothness: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    ensure_positive("smoothness", smoothness)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("c must lie in (0, 1), got {c}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let ln_target = ((1.0 - c) * radius / d as f64).ln();
    // ln(ε·μ) as a function of s = ln ε
    let gap = |s: f64| s + 0.5 * (-2.0 * s / smoothness).ln() - ln_target;
    let s = bisect_root(gap, -700.0, -0.5, 0.0).map_err(|_| {
        Error::Domain(format!(
            "no eps in (0, e^-1/2) satisfies eps*mu = (1-c)B/d = {}",
            ln_target.exp()
        ))
    })?;
    Ok(s.exp())
}
