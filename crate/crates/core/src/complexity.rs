//! Shtarkov complexity of the Gaussian location model under λ‖θ‖₁,
//! envelope membership checks, worst-case regret of Bayes mixtures, and the
//! λ sweep comparing the spike-and-tails and tilted Jeffreys predictors.
//!
//! All quantities are per dimension; a d-dimensional value is d times the
//! one-dimensional one because the penalty and the loss both separate.

use std::f64::consts::{E, LN_2};

use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::measures::{log_integral_excess, log_partition, ExpQuadIntegrand, MixtureMeasure1D};
use crate::numerics::{ln_std_normal_sf, maximize_1d_grid, std_normal_pdf, LN_SQRT_2PI};
use crate::priors::{lebesgue_preprior, st_preprior};

/// Scan size used by [`worst_case_regret`].
pub const DEFAULT_REGRET_GRID: usize = 2048;
const ARGMAX_TOL: f64 = 1e-10;

fn ensure_dim(d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok(())
}

/// Exact Shtarkov complexity S(γ) = d·ln(2Φ(λ) − 1 + √(2/π)·e^{−λ²/2}/λ).
pub fn shtarkov_exact(d: u64, lam: f64) -> Result<f64> {
    ensure_dim(d)?;
    ensure_positive("lambda", lam)?;
    // 2Φ(λ) − 1 = 1 − erfc(λ/√2); √(2/π)e^{−λ²/2} = 2φ(λ)
    let excess = 2.0 * std_normal_pdf(lam) / lam - libm::erfc(lam * std::f64::consts::FRAC_1_SQRT_2);
    Ok(d as f64 * excess.ln_1p())
}

/// d·ln(1 + e^{−λ²/2}/(√(2π)λ³)), the leading-order lower reference for
/// [`shtarkov_exact`] as λ → ∞.
pub fn shtarkov_asymptotic_lower(d: u64, lam: f64) -> Result<f64> {
    ensure_dim(d)?;
    if !(lam >= 1.0 && lam.is_finite()) {
        return Err(Error::Domain(format!(
            "asymptotic reference needs lambda >= 1, got {lam}"
        )));
    }
    Ok(d as f64 * (-0.5 * lam * lam - LN_SQRT_2PI - 3.0 * lam.ln()).exp().ln_1p())
}

/// Closed-form envelope-complexity bound of the scale-corrected
/// spike-and-tails prior: d·ln(1 + (2L/(eλ²))·e^{−λ²/(2L)}).
pub fn ec_upper_bound(d: u64, lam: f64, smoothness: f64) -> Result<f64> {
    ensure_dim(d)?;
    ensure_positive("lambda", lam)?;
    ensure_positive("smoothness", smoothness)?;
    let ln_tail = (2.0 * smoothness / (E * lam * lam)).ln() - lam * lam / (2.0 * smoothness);
    Ok(d as f64 * ln_tail.exp().ln_1p())
}

/// Komatu's lower bound on the normal distribution function,
/// 1 − 2φ(λ)/(√(2 + λ²) + λ).
pub fn komatu_cdf_lower_bound(lam: f64) -> f64 {
    1.0 - 2.0 * std_normal_pdf(lam) / ((2.0 + lam * lam).sqrt() + lam)
}

/// ln of the Komatu tail bound minus ln(1 − Φ(λ)); positive exactly when
/// Φ(λ) exceeds [`komatu_cdf_lower_bound`]. Past λ ≈ 8 both sides of the
/// CDF form round to 1, so this is the form to test.
pub fn komatu_tail_gap(lam: f64) -> f64 {
    let ln_bound = LN_2 - 0.5 * lam * lam - LN_SQRT_2PI - ((2.0 + lam * lam).sqrt() + lam).ln();
    ln_bound - ln_std_normal_sf(lam)
}

/// The single-observation regret curve r(u) of the Bayes mixture built from a
/// pre-prior `w` and penalty λ|θ|, against the luckiness comparator:
///
/// r(u) = ln w[e^{−γ}] − ln w[e^{−f_u−γ}] − min_θ(f_u + γ)(θ),  f_u(θ) = ½(θ−u)².
pub struct RegretCurve<'a> {
    prior: &'a MixtureMeasure1D,
    lam: f64,
    ln_partition: f64,
}

impl<'a> RegretCurve<'a> {
    pub fn new(prior: &'a MixtureMeasure1D, lam: f64) -> Result<Self> {
        ensure_positive("lambda", lam)?;
        let ln_partition = log_partition(prior, lam)?;
        Ok(Self {
            prior,
            lam,
            ln_partition,
        })
    }

    pub fn ln_partition(&self) -> f64 {
        self.ln_partition
    }

    pub fn at(&self, u: f64) -> f64 {
        let g = ExpQuadIntegrand {
            curvature: 1.0,
            center: u,
            l1weight: self.lam,
            offset: 0.0,
        };
        self.ln_partition - log_integral_excess(self.prior, &g).expect("integrals with positive curvature converge")
    }
}

/// Smallest value of w[e^{−f_u−γ+m(f_u+γ)}] over an evenly spaced grid of
/// `u ∈ [0, u_max]`. A value ≥ 1 certifies envelope membership on that range.
pub fn envelope_check(w: &MixtureMeasure1D, lam: f64, u_max: f64, grid: usize) -> Result<f64> {
    ensure_positive("lambda", lam)?;
    if grid < 2 {
        return Err(Error::InvalidParameter("envelope grid needs at least 2 points".into()));
    }
    if u_max.is_nan() || u_max <= lam {
        return Err(Error::InvalidParameter(format!(
            "u_max {u_max} must exceed lambda {lam}"
        )));
    }
    let step = u_max / (grid - 1) as f64;
    let mut worst = f64::INFINITY;
    for i in 0..grid {
        let u = if i == grid - 1 { u_max } else { step * i as f64 };
        let g = ExpQuadIntegrand::unit_quadratic(u, lam)?;
        worst = worst.min(log_integral_excess(w, &g)?);
    }
    Ok(worst.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCaseRegret {
    /// sup of r(u) over the tested range, or +∞ when `divergent`.
    pub regret: f64,
    pub argmax_u: f64,
    /// The curve was still climbing at the end of the range.
    pub divergent: bool,
}

/// Default search range for the worst case, 10 + 5λ.
pub fn default_u_max(lam: f64) -> f64 {
    10.0 + 5.0 * lam
}

/// sup over u ∈ [0, u_max] of the regret curve (it is even in u).
pub fn worst_case_regret(w: &MixtureMeasure1D, lam: f64, u_max: f64) -> Result<WorstCaseRegret> {
    worst_case_regret_grid(w, lam, u_max, DEFAULT_REGRET_GRID)
}

pub fn worst_case_regret_grid(w: &MixtureMeasure1D, lam: f64, u_max: f64, grid: usize) -> Result<WorstCaseRegret> {
    ensure_positive("u_max", u_max)?;
    let curve = RegretCurve::new(w, lam)?;
    let best = maximize_1d_grid(|u| curve.at(u), 0.0, u_max, grid, ARGMAX_TOL);
    let cell = u_max / (grid.max(256) - 1) as f64;
    if best.argmax >= u_max - 2.0 * cell {
        let far = curve.at(2.0 * u_max);
        if far > best.max + 1e-9 * best.max.abs().max(1.0) {
            return Ok(WorstCaseRegret {
                regret: f64::INFINITY,
                argmax_u: best.argmax,
                divergent: true,
            });
        }
    }
    Ok(WorstCaseRegret {
        regret: best.max,
        argmax_u: best.argmax,
        divergent: false,
    })
}

/// One λ of the spike-and-tails vs. tilted Jeffreys comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretCurvePoint {
    pub lam: f64,
    pub shtarkov: f64,
    pub regret_st: f64,
    pub regret_jeffreys: f64,
    /// ln w[e^{−γ}] of the spike-and-tails pre-prior.
    pub st_upper: f64,
    pub argmax_u_st: f64,
    pub argmax_u_jeffreys: f64,
}

pub fn regret_curve_point(lam: f64, u_max: Option<f64>, grid: usize) -> Result<RegretCurvePoint> {
    let u_max = u_max.unwrap_or_else(|| default_u_max(lam));
    let st = st_preprior(lam)?;
    let st_regret = worst_case_regret_grid(&st, lam, u_max, grid)?;
    let jeffreys = worst_case_regret_grid(&lebesgue_preprior(), lam, u_max, grid)?;
    if st_regret.divergent || jeffreys.divergent {
        return Err(Error::Divergent(format!(
            "worst-case regret is unbounded at lambda = {lam}"
        )));
    }
    Ok(RegretCurvePoint {
        lam,
        shtarkov: shtarkov_exact(1, lam)?,
        regret_st: st_regret.regret,
        regret_jeffreys: jeffreys.regret,
        st_upper: log_partition(&st, lam)?,
        argmax_u_st: st_regret.argmax_u,
        argmax_u_jeffreys: jeffreys.argmax_u,
    })
}

/// Evaluates [`regret_curve_point`] for every λ (in parallel) and returns
/// the rows sorted by λ.
pub fn sweep_lambda(lams: &[f64], u_max: Option<f64>, grid: usize) -> Result<Vec<RegretCurvePoint>> {
    if lams.is_empty() {
        return Err(Error::InvalidParameter("lambda list is empty".into()));
    }
    for &lam in lams {
        ensure_positive("lambda", lam)?;
    }
    let mut rows = lams
        .par_iter()
        .map(|&lam| regret_curve_point(lam, u_max, grid))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.lam.total_cmp(&b.lam));
    Ok(rows)
}

/// `points` values spaced evenly in ln λ from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    ensure_positive("lower end", lo)?;
    ensure_positive("upper end", hi)?;
    if points == 0 || hi < lo {
        return Err(Error::InvalidParameter(format!(
            "need points >= 1 and lo <= hi, got {points} points on [{lo}, {hi}]"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            i if i == points - 1 => hi,
            i => (a + step * i as f64).exp(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::integrate_exp;
    use crate::numerics::{quadrature_oracle, std_normal_cdf, Interval};
    use crate::penalty::penalized_quad_min;
    use crate::priors::spike_only;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn shtarkov_by_quadrature(lam: f64) -> f64 {
        let f = |x: f64| (-penalized_quad_min(1.0, x, lam) - LN_SQRT_2PI).exp();
        let mut total = 0.0;
        for (lo, hi) in [(f64::NEG_INFINITY, -lam), (-lam, 0.0), (0.0, lam), (lam, f64::INFINITY)] {
            total += quadrature_oracle(f, Interval::new(lo, hi).unwrap(), 1e-15).unwrap();
        }
        total.ln()
    }

    #[test]
    fn shtarkov_examples() {
        // mpmath quadrature of the sup-free integrand
        assert_relative_eq!(
            shtarkov_exact(1, 2.0).unwrap(),
            0.008_454_859_348_146_254,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            shtarkov_exact(7, 2.0).unwrap(),
            7.0 * shtarkov_exact(1, 2.0).unwrap(),
            max_relative = 1e-15
        );
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = shtarkov_exact(1, 0.1 * i as f64).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(shtarkov_exact(0, 1.0).is_err());
        assert!(shtarkov_exact(1, 0.0).is_err());
    }

    #[test]
    fn shtarkov_matches_quadrature() {
        for &lam in &[0.5, 1.0, 2.0, 4.0] {
            assert!((shtarkov_exact(1, lam).unwrap() - shtarkov_by_quadrature(lam)).abs() < 1e-9);
        }
    }

    #[test]
    fn asymptotic_reference() {
        assert_relative_eq!(
            shtarkov_asymptotic_lower(1, 3.0).unwrap(),
            1.641_290_638_637_547_6e-4,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            shtarkov_asymptotic_lower(5, 3.0).unwrap(),
            5.0 * 1.641_290_638_637_547_6e-4,
            max_relative = 1e-12
        );
        for i in 0..=70 {
            let lam = 3.0 + 0.1 * i as f64;
            assert!(shtarkov_exact(1, lam).unwrap() >= 0.8 * shtarkov_asymptotic_lower(1, lam).unwrap());
        }
        assert!(matches!(shtarkov_asymptotic_lower(1, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn ec_bound_examples() {
        assert_relative_eq!(
            ec_upper_bound(1, 2.0, 1.0).unwrap(),
            0.024_588_738_106_757_265,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ec_upper_bound(3, 2.0, 4.0).unwrap(),
            ec_upper_bound(3, 1.0, 1.0).unwrap(),
            max_relative = 1e-14
        );
        // at λ² = 2 ln k the tail term is 1/(e·k·ln k)
        let k = 1e6f64;
        let expected = (1.0 / (E * k * k.ln())).ln_1p();
        assert_relative_eq!(
            ec_upper_bound(1, (2.0 * k.ln()).sqrt(), 1.0).unwrap(),
            expected,
            max_relative = 1e-10
        );
    }

    #[test]
    fn komatu_bound_holds() {
        for i in 1..=100 {
            let lam = 0.1 * i as f64;
            assert!(komatu_tail_gap(lam) > 0.0, "lambda = {lam}");
            assert!(std_normal_cdf(lam) >= komatu_cdf_lower_bound(lam));
        }
    }

    #[test]
    fn envelope_examples() {
        for lam in [0.5, 2.0] {
            let v = envelope_check(&spike_only(), lam, lam + 1e-9, 64).unwrap();
            assert!(v >= 1.0 - 1e-15);
        }
        assert!(envelope_check(&st_preprior(1.0).unwrap(), 1.0, 20.0, 4096).unwrap() >= 1.0 - 1e-9);
        assert!(envelope_check(&lebesgue_preprior(), 3.0, 25.0, 512).unwrap() < 1.0);
        assert!(envelope_check(&spike_only(), 1.0, 0.5, 10).is_err());
        assert!(envelope_check(&spike_only(), 1.0, 5.0, 1).is_err());
    }

    #[test]
    fn spike_only_regret_diverges() {
        let r = worst_case_regret(&spike_only(), 1.0, 15.0).unwrap();
        assert!(r.divergent);
        assert_eq!(r.regret, f64::INFINITY);
        let spike = spike_only();
        let curve = RegretCurve::new(&spike, 1.0).unwrap();
        for &u in &[0.5, 2.0, 7.0] {
            let closed = if u > 1.0 { 0.5 * (u - 1.0) * (u - 1.0) } else { 0.0 };
            assert!((curve.at(u) - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn st_regret_below_partition() {
        for &lam in &[0.1, 0.3, 1.0, 2.5, 6.0, 10.0] {
            let w = st_preprior(lam).unwrap();
            let r = worst_case_regret(&w, lam, default_u_max(lam)).unwrap();
            assert!(!r.divergent);
            assert!(r.regret <= log_partition(&w, lam).unwrap() + 1e-12, "lam={lam}");
            assert!(r.regret >= shtarkov_exact(1, lam).unwrap() - 1e-9, "lam={lam}");
        }
    }

    #[test]
    fn jeffreys_matches_shtarkov_at_small_lambda() {
        let r = worst_case_regret(&lebesgue_preprior(), 0.1, default_u_max(0.1)).unwrap();
        let s = shtarkov_exact(1, 0.1).unwrap();
        assert!(!r.divergent);
        assert!(r.regret >= s - 1e-9);
        assert!((r.regret - s) / s <= 0.05);
    }

    #[test]
    fn curve_matches_literal_formula() {
        for &lam in &[0.2, 1.0, 3.0] {
            for w in [st_preprior(lam).unwrap(), lebesgue_preprior()] {
                let curve = RegretCurve::new(&w, lam).unwrap();
                for &u in &[0.0, 0.4, lam, 1.3 * lam + 0.5, 6.0] {
                    let g = ExpQuadIntegrand::unit_quadratic(u, lam).unwrap();
                    let literal = log_partition(&w, lam).unwrap()
                        - integrate_exp(&w, &g).unwrap()
                        - penalized_quad_min(1.0, u, lam);
                    assert!((curve.at(u) - literal).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sweep_rows_sorted_and_sandwiched() {
        let rows = sweep_lambda(&[4.0, 0.3, 1.5], None, 512).unwrap();
        assert_eq!(rows.iter().map(|r| r.lam).collect::<Vec<_>>(), vec![0.3, 1.5, 4.0]);
        for r in rows {
            assert!(r.shtarkov <= r.regret_st + 1e-6);
            assert!(r.regret_st <= r.st_upper + 1e-6);
        }
        assert!(sweep_lambda(&[], None, 512).is_err());
        assert!(sweep_lambda(&[1.0, -1.0], None, 512).is_err());
    }

    #[test]
    fn log_spacing() {
        let v = log_spaced(0.1, 10.0, 3).unwrap();
        assert_eq!(v[0], 0.1);
        assert_relative_eq!(v[1], 1.0, max_relative = 1e-15);
        assert_eq!(v[2], 10.0);
        assert_eq!(log_spaced(1.0, 1.0, 1).unwrap(), vec![1.0]);
        assert!(log_spaced(1.0, 0.5, 4).is_err());
    }

    proptest! {
        #[test]
        fn regret_curve_is_even(lam in 0.05f64..8.0, u in 0.0f64..30.0) {
            for w in [st_preprior(lam).unwrap(), lebesgue_preprior()] {
                let curve = RegretCurve::new(&w, lam).unwrap();
                prop_assert!((curve.at(u) - curve.at(-u)).abs() <= 1e-10);
            }
        }
    }
}
