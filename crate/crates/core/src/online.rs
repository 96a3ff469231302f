//! Sequential prediction with the spike-and-tails Bayes mixture on the
//! L-precision Gaussian location loss
//!
//!   f_X(θ) = (L/2)‖X − θ‖² + (d/2)·ln(2π/L),
//!
//! and its regret against the ℓ1-luckiness comparator min_θ{F_n(θ) + λ‖θ‖₁}
//! and the hard-ball comparator min_{‖θ‖₁≤B} F_n(θ).
//!
//! After t rounds the cumulative loss is (tL/2)‖θ − x̄_t‖² plus a θ-free
//! constant, so every posterior quantity is a product over coordinates of
//! one-dimensional integrals with curvature tL centred at the running mean.
//! The `(d/2)·ln(2π/L)` term appears in both the predictor's loss and the
//! comparator's and is dropped everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::complexity::ec_upper_bound;
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::measures::{integrate_exp, log_integral_excess, log_partition, ExpQuadIntegrand, MixtureMeasure1D};
use crate::penalty::{l1_ball_project, penalized_quad_min};
use crate::priors::st_preprior_scaled;

/// λ* = √(2Ln·ln(d/√(Ln))), defined when d > √(Ln).
pub fn lambda_star(smoothness: f64, n: usize, d: usize) -> Result<f64> {
    ensure_positive("smoothness", smoothness)?;
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("n and d must be at least 1".into()));
    }
    let total = smoothness * n as f64;
    let ratio = d as f64 / total.sqrt();
    if ratio <= 1.0 {
        return Err(Error::Domain(format!(
            "lambda* needs d > sqrt(L n); got d = {d}, sqrt(L n) = {}",
            total.sqrt()
        )));
    }
    Ok((2.0 * total * ratio.ln()).sqrt())
}

/// λ*·B + d·ln(1 + (2Ln/(e·λ*²))·e^{−λ*²/(2Ln)}): the regret guarantee of the
/// scale-corrected spike-and-tails mixture over the ball ‖θ‖₁ ≤ B.
pub fn regret_upper_bound(radius: f64, smoothness: f64, n: usize, d: usize) -> Result<f64> {
    ensure_nonnegative("radius", radius)?;
    let lam = lambda_star(smoothness, n, d)?;
    bound_for_lambda(lam, radius, smoothness, n, d)
}

fn bound_for_lambda(lam: f64, radius: f64, smoothness: f64, n: usize, d: usize) -> Result<f64> {
    Ok(lam * radius + ec_upper_bound(d as u64, lam, smoothness * n as f64)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchRegret {
    pub luckiness: f64,
    pub ball: f64,
}

/// Regret of the product mixture after the sufficient statistic
/// (curvature `a` = nL, running mean `xbar`) against both comparators.
pub fn batch_regret(w: &MixtureMeasure1D, lam: f64, a: f64, xbar: &[f64], radius: f64) -> Result<BatchRegret> {
    ensure_positive("curvature", a)?;
    let ln_z = log_partition(w, lam)?;
    let mut luckiness = 0.0;
    let mut ball = 0.0;
    for &x in xbar {
        let g = ExpQuadIntegrand::new(a, x, lam, 0.0)?;
        let r = ln_z - log_integral_excess(w, &g)?;
        luckiness += r;
        // ln w[e^{−γ}] − ln w[e^{−g}] = r + min g
        ball += r + penalized_quad_min(a, x, lam);
    }
    let proj = l1_ball_project(xbar, radius)?;
    let dist2: f64 = proj.iter().zip(xbar).map(|(p, x)| (p - x) * (p - x)).sum();
    Ok(BatchRegret {
        luckiness,
        ball: ball - 0.5 * a * dist2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaChoice {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataMode {
    /// X_t = B·e₁ every round; the ball comparator sits on the boundary.
    AdversarialMean,
    /// X_t,j ~ N(0, 1/L), seeded.
    IidGaussian,
    /// X_t = 0.
    Zeros,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineConfig {
    pub d: usize,
    pub n: usize,
    pub smoothness: f64,
    pub radius: f64,
    pub lam: LambdaChoice,
    pub data: DataMode,
    pub seed: u64,
}

impl OnlineConfig {
    pub fn validate(&self) -> Result<f64> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("d and n must be at least 1".into()));
        }
        ensure_positive("smoothness", self.smoothness)?;
        ensure_positive("radius", self.radius)?;
        match self.lam {
            LambdaChoice::Auto => lambda_star(self.smoothness, self.n, self.d),
            LambdaChoice::Fixed(lam) => {
                ensure_positive("lambda", lam)?;
                Ok(lam)
            }
        }
    }

    pub fn generate(&self) -> Result<Vec<Vec<f64>>> {
        Ok(match self.data {
            DataMode::AdversarialMean => {
                let mut x = vec![0.0; self.d];
                x[0] = self.radius;
                vec![x; self.n]
            }
            DataMode::Zeros => vec![vec![0.0; self.d]; self.n],
            DataMode::IidGaussian => {
                let normal = Normal::new(0.0, 1.0 / self.smoothness.sqrt())
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.n)
                    .map(|_| (0..self.d).map(|_| normal.sample(&mut rng)).collect())
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineRunResult {
    pub lam: f64,
    /// Predictive log-loss of round t minus (d/2)·ln(2π/L).
    pub step_losses: Vec<f64>,
    pub cum_regret_luckiness: Vec<f64>,
    pub cum_regret_ball: Vec<f64>,
    /// Final regrets from summing the rounds.
    pub cumulative_regret_luckiness: f64,
    pub cumulative_regret_ball: f64,
    /// The same regrets from a single batch evaluation at round n.
    pub batch: BatchRegret,
    /// Mixture log-loss of the whole sequence, evaluated in one shot.
    pub batch_mixture_loss: f64,
    pub comparator_theta: Vec<f64>,
    pub bound: f64,
}

impl OnlineRunResult {
    pub fn sequential_mixture_loss(&self) -> f64 {
        self.step_losses.iter().sum()
    }

    /// |Σ step losses − batch mixture loss| / max(1, |batch mixture loss|).
    pub fn telescoping_gap(&self) -> f64 {
        (self.sequential_mixture_loss() - self.batch_mixture_loss).abs() / self.batch_mixture_loss.abs().max(1.0)
    }
}

/// Runs the spike-and-tails mixture (scale-corrected for curvature nL) on the
/// data stream described by `cfg`.
pub fn run_online(cfg: &OnlineConfig) -> Result<OnlineRunResult> {
    let lam = cfg.validate()?;
    let data = cfg.generate()?;
    run_online_with_data(cfg, lam, &data)
}

/// [`run_online`] on an explicit sequence of observations.
pub fn run_online_with_data(cfg: &OnlineConfig, lam: f64, data: &[Vec<f64>]) -> Result<OnlineRunResult> {
    let (d, l) = (cfg.d, cfg.smoothness);
    ensure_positive("lambda", lam)?;
    if data.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            got: data.len(),
        });
    }
    if let Some(bad) = data.iter().find(|x| x.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    let w = st_preprior_scaled(lam, l * cfg.n as f64)?;
    let ln_z = log_partition(&w, lam)?;

    let mut mean = vec![0.0; d];
    let mut ln_evidence = d as f64 * ln_z;
    let mut loss_total = 0.0;
    let mut scatter = 0.0;
    let mut step_losses = Vec::with_capacity(cfg.n);
    let mut cum_luck = Vec::with_capacity(cfg.n);
    let mut cum_ball = Vec::with_capacity(cfg.n);

    for (i, x) in data.iter().enumerate() {
        let t = (i + 1) as f64;
        let a = t * l;
        // (L/2)‖X − θ‖² + ((t−1)L/2)‖θ − x̄‖² = (tL/2)‖θ − x̄'‖² + κ
        let kappa = 0.5 * l * (t - 1.0) / t * x.iter().zip(&mean).map(|(v, m)| (v - m) * (v - m)).sum::<f64>();
        for (m, v) in mean.iter_mut().zip(x) {
            *m += (v - *m) / t;
        }
        let mut next = 0.0;
        let mut comparator = 0.0;
        for &m in &mean {
            let g = ExpQuadIntegrand::new(a, m, lam, 0.0)?;
            next += integrate_exp(&w, &g)?;
            comparator += penalized_quad_min(a, m, lam);
        }
        let step = ln_evidence - next + kappa;
        ln_evidence = next;
        scatter += kappa;
        loss_total += step;
        step_losses.push(step);

        let proj = l1_ball_project(&mean, cfg.radius)?;
        let dist2: f64 = proj.iter().zip(&mean).map(|(p, m)| (p - m) * (p - m)).sum();
        cum_luck.push(loss_total - scatter - comparator);
        cum_ball.push(loss_total - scatter - 0.5 * a * dist2);
    }

    let a = cfg.n as f64 * l;
    let batch = batch_regret(&w, lam, a, &mean, cfg.radius)?;
    let direct_scatter: f64 = data
        .iter()
        .map(|x| 0.5 * l * x.iter().zip(&mean).map(|(v, m)| (v - m) * (v - m)).sum::<f64>())
        .sum();
    let mut ln_final = 0.0;
    for &m in &mean {
        ln_final += integrate_exp(&w, &ExpQuadIntegrand::new(a, m, lam, 0.0)?)?;
    }
    let batch_mixture_loss = d as f64 * ln_z - ln_final + direct_scatter;

    Ok(OnlineRunResult {
        lam,
        cumulative_regret_luckiness: *cum_luck.last().expect("n >= 1"),
        cumulative_regret_ball: *cum_ball.last().expect("n >= 1"),
        step_losses,
        cum_regret_luckiness: cum_luck,
        cum_regret_ball: cum_ball,
        batch,
        batch_mixture_loss,
        comparator_theta: l1_ball_project(&mean, cfg.radius)?,
        bound: bound_for_lambda(lam, cfg.radius, l, cfg.n, d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::RegretCurve;
    use crate::priors::st_preprior;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(d: usize, n: usize, l: f64, b: f64, data: DataMode) -> OnlineConfig {
        OnlineConfig {
            d,
            n,
            smoothness: l,
            radius: b,
            lam: LambdaChoice::Auto,
            data,
            seed: 7,
        }
    }

    #[test]
    fn lambda_star_examples() {
        assert_relative_eq!(
            lambda_star(1.0, 100, 1_000_000).unwrap(),
            47.985_259_121_880_81,
            max_relative = 1e-12
        );
        assert!(matches!(lambda_star(1.0, 100, 10), Err(Error::Domain(_))));
        assert!(matches!(lambda_star(4.0, 4, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn upper_bound_examples() {
        let b1 = regret_upper_bound(1.0, 1.0, 100, 1_000_000).unwrap();
        assert_relative_eq!(b1, 48.304_795_093_442_01, max_relative = 1e-10);
        let b2 = regret_upper_bound(2.0, 1.0, 100, 1_000_000).unwrap();
        let ls = lambda_star(1.0, 100, 1_000_000).unwrap();
        assert_relative_eq!(b2 - b1, ls, max_relative = 1e-12);
        let b0 = regret_upper_bound(0.0, 1.0, 100, 1_000_000).unwrap();
        assert_relative_eq!(b0, ec_upper_bound(1_000_000, ls, 100.0).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn batch_at_zero_mean() {
        let w = st_preprior_scaled(2.0, 3.0).unwrap();
        let r = batch_regret(&w, 2.0, 3.0, &[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(r.luckiness, r.ball, max_relative = 1e-14);
        let g = ExpQuadIntegrand::new(3.0, 0.0, 2.0, 0.0).unwrap();
        let single = log_partition(&w, 2.0).unwrap() - integrate_exp(&w, &g).unwrap();
        assert_relative_eq!(r.luckiness, 3.0 * single, max_relative = 1e-12);
    }

    #[test]
    fn batch_luckiness_below_partition() {
        for &lam in &[0.3, 1.0, 2.0] {
            let w = st_preprior(lam).unwrap();
            for &x in &[0.0, 0.5, 1.7, 4.0, -9.0] {
                let r = batch_regret(&w, lam, 1.0, &[x], 1.0).unwrap();
                assert!(r.luckiness <= log_partition(&w, lam).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn single_round_reduces_to_regret_curve() {
        let c = OnlineConfig {
            d: 1,
            n: 1,
            smoothness: 1.0,
            radius: 1.0,
            lam: LambdaChoice::Fixed(1.3),
            data: DataMode::Zeros,
            seed: 0,
        };
        let r = run_online(&c).unwrap();
        let w = st_preprior(1.3).unwrap();
        let curve = RegretCurve::new(&w, 1.3).unwrap();
        assert!((r.cumulative_regret_luckiness - curve.at(0.0)).abs() < 1e-12);
        assert!((r.batch.luckiness - curve.at(0.0)).abs() < 1e-12);
    }

    #[test]
    fn adversarial_run_respects_bound() {
        let r = run_online(&cfg(100, 50, 1.0, 1.0, DataMode::AdversarialMean)).unwrap();
        assert!(r.cumulative_regret_ball <= r.bound);
        assert!(r.telescoping_gap() <= 1e-7);
        assert!((r.cumulative_regret_ball - r.batch.ball).abs() <= 1e-8 * r.batch.ball.abs().max(1.0));
        assert!((r.cumulative_regret_luckiness - r.batch.luckiness).abs() <= 1e-8 * r.batch.luckiness.abs().max(1.0));
        assert_eq!(r.comparator_theta[0], 1.0);
        assert_relative_eq!(
            r.bound,
            regret_upper_bound(1.0, 1.0, 50, 100).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn config_errors() {
        assert!(run_online(&cfg(10, 100, 1.0, 1.0, DataMode::AdversarialMean)).is_err());
        assert!(run_online(&cfg(0, 10, 1.0, 1.0, DataMode::AdversarialMean)).is_err());
        assert!(run_online(&cfg(10, 2, 1.0, 0.0, DataMode::AdversarialMean)).is_err());
        let mut c = cfg(10, 2, 1.0, 1.0, DataMode::Zeros);
        c.lam = LambdaChoice::Fixed(-1.0);
        assert!(run_online(&c).is_err());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let c = cfg(30, 20, 2.0, 1.5, DataMode::IidGaussian);
        assert_eq!(run_online(&c).unwrap(), run_online(&c).unwrap());
        let other = OnlineConfig { seed: 8, ..c };
        assert_ne!(
            run_online(&c).unwrap().step_losses,
            run_online(&other).unwrap().step_losses
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn gaussian_runs_telescope_and_order_comparators(
            d in 5usize..60,
            n in 1usize..25,
            l in 0.2f64..4.0,
            b in 0.2f64..3.0,
            lam in 0.1f64..5.0,
            seed in 0u64..1000,
        ) {
            let c = OnlineConfig { d, n, smoothness: l, radius: b, lam: LambdaChoice::Fixed(lam), data: DataMode::IidGaussian, seed };
            let r = run_online(&c).unwrap();
            prop_assert!(r.telescoping_gap() <= 1e-7);
            prop_assert!(r.batch.ball <= r.batch.luckiness + lam * b + 1e-9);
            prop_assert!(r.cumulative_regret_ball <= r.bound + 1e-9);
        }
    }
}
