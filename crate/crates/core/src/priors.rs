//! Pre-priors for the ℓ1 penalty: spike-and-tails (plain and scale
//! corrected), Lebesgue (tilted Jeffreys) and spike-only, plus the
//! per-coordinate weight schedule for infinitely many dimensions.

use crate::error::{ensure_positive, Error, Result};
use crate::measures::{Atom, MixtureMeasure1D, Piece};
use crate::numerics::Interval;

/// ln of the spike-and-tails tail level, c(λ) = e^{λ²/2 − 1}/λ.
///
/// This is the smallest constant for which A(x) = e^{−x²/2} + c∫_{λ−x}^∞ e^{−y²/2} dy
/// is nondecreasing on x ≥ 0 (A′(x) ≥ 0 reduces to e^{λx−1} ≥ λx), so the
/// measure stays inside the Bayesian envelope of every f_u + λ|·|.
pub fn st_ln_tail_level(lam: f64) -> f64 {
    0.5 * lam * lam - 1.0 - lam.ln()
}

/// Spike-and-tails pre-prior: unit atom at 0 plus constant density c(λ) on |θ| > λ.
pub fn st_preprior(lam: f64) -> Result<MixtureMeasure1D> {
    ensure_positive("lambda", lam)?;
    let ln_c = st_ln_tail_level(lam);
    MixtureMeasure1D::new(
        vec![Atom {
            location: 0.0,
            mass: 1.0,
        }],
        vec![
            Piece::from_ln_level(Interval::new(f64::NEG_INFINITY, -lam)?, ln_c)?,
            Piece::from_ln_level(Interval::new(lam, f64::INFINITY)?, ln_c)?,
        ],
    )
}

/// Spike-and-tails pre-prior corrected for L-smooth losses: the pushforward
/// of `st_preprior(lam/√L)` under θ ↦ θ/√L. Tails start at |θ| = λ/L.
pub fn st_preprior_scaled(lam: f64, smoothness: f64) -> Result<MixtureMeasure1D> {
    ensure_positive("lambda", lam)?;
    ensure_positive("smoothness", smoothness)?;
    let s = smoothness.sqrt();
    st_preprior(lam / s)?.scale(s)
}

/// Lebesgue measure; with the penalty it gives the double-exponential
/// (tilted Jeffreys) prior.
pub fn lebesgue_preprior() -> MixtureMeasure1D {
    MixtureMeasure1D::lebesgue(1.0).expect("unit level is valid")
}

/// Unit atom at the origin.
pub fn spike_only() -> MixtureMeasure1D {
    MixtureMeasure1D::atom(0.0, 1.0).expect("unit atom is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    SpikeAndTails,
    Lebesgue,
    SpikeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub l1weight: f64,
    pub smoothness: f64,
}

impl PriorSpec {
    pub fn new(kind: PriorKind, l1weight: f64, smoothness: f64) -> Result<Self> {
        ensure_positive("lambda", l1weight)?;
        ensure_positive("smoothness", smoothness)?;
        Ok(Self {
            kind,
            l1weight,
            smoothness,
        })
    }

    pub fn build(&self) -> Result<MixtureMeasure1D> {
        match self.kind {
            PriorKind::SpikeAndTails => st_preprior_scaled(self.l1weight, self.smoothness),
            PriorKind::Lebesgue => Ok(lebesgue_preprior()),
            PriorKind::SpikeOnly => Ok(spike_only()),
        }
    }
}

/// Ln x = ln max(e, x)
fn big_ln(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}

/// λⱼ = √(2L·Ln(j·Ln j)) for j = 1..=J.
pub fn infinite_dim_weights(smoothness: f64, dims: usize) -> Result<Vec<f64>> {
    ensure_positive("smoothness", smoothness)?;
    if dims == 0 {
        return Err(Error::InvalidParameter(
            "number of dimensions must be at least 1".into(),
        ));
    }
    Ok((1..=dims)
        .map(|j| {
            let j = j as f64;
            (2.0 * smoothness * big_ln(j * big_ln(j))).sqrt()
        })
        .collect())
}

/// Running partial sums Σ_{i≤j} 1/(i·Ln(i)²), j = 1..=J.
pub fn infinite_dim_partial_bounds(dims: usize) -> Result<Vec<f64>> {
    if dims == 0 {
        return Err(Error::InvalidParameter(
            "number of dimensions must be at least 1".into(),
        ));
    }
    let mut total = 0.0;
    Ok((1..=dims)
        .map(|j| {
            let j = j as f64;
            let ln = big_ln(j);
            total += 1.0 / (j * ln * ln);
            total
        })
        .collect())
}

/// Σ_{j=1}^{J} 1/(j·Ln(j)²), the truncated complexity bound for the
/// weights of [`infinite_dim_weights`]. It does not depend on L.
pub fn infinite_dim_bound(smoothness: f64, dims: usize) -> Result<f64> {
    ensure_positive("smoothness", smoothness)?;
    Ok(*infinite_dim_partial_bounds(dims)?.last().expect("dims >= 1"))
}
