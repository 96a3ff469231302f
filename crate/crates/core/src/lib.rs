//! Minimax regret under logarithmic loss with an ℓ1 luckiness penalty.
//!
//! The crate evaluates, in closed form wherever possible:
//!
//! - the exact Shtarkov complexity of the Gaussian location model with
//!   penalty `λ‖θ‖₁` ([`complexity::shtarkov_exact`]),
//! - envelope-complexity upper bounds given by the spike-and-tails pre-prior
//!   ([`priors::st_preprior`], [`complexity::ec_upper_bound`]),
//! - worst-case regrets of Bayesian predictors built from one-dimensional
//!   pre-priors ([`complexity::worst_case_regret`]),
//! - sequential regret of the Bayes mixture on Gaussian losses
//!   ([`online::run_online`]),
//! - the three-point-prior lower bound on the minimax regret over ℓ1-balls
//!   ([`lowerbound`]).
//!
//! Every penalty used here is separable, so all d-dimensional quantities are
//! sums of one-dimensional integrals against [`measures::MixtureMeasure1D`].
//! Integrals are returned as natural logarithms.

pub mod cli;
pub mod complexity;
mod error;
pub mod lowerbound;
pub mod measures;
pub mod numerics;
pub mod online;
pub mod penalty;
pub mod priors;

pub use error::{Error, Result};
