//! One-dimensional pre-priors built from point atoms and piecewise-constant
//! densities, and exact integrals of `exp(−(a/2)(θ−u)² − λ|θ| − c)` against
//! them.
//!
//! Every integral is evaluated in closed form. Each piece is split at the
//! kink θ = 0; on either half line the exponent is a shifted quadratic (or a
//! linear function when `a = 0`), so a piece contributes one Gaussian or
//! exponential segment integral. Results are natural logarithms.
//!
//! The exponent is first re-expressed relative to its global minimum
//! `min_θ g(θ)`. Terms near the minimizer then carry exact zeros instead of a
//! difference of two large numbers, which is what lets regrets of order
//! `e^{−λ²/2}` survive at λ = 10 and beyond.

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::numerics::{ln_exp_linear_segment, ln_gaussian_segment, log_sum_exp, Interval};
use crate::penalty::penalized_quad_min;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Constant density on an open interval. The level is stored as a logarithm
/// so spike-and-tails levels `e^{λ²/2−1}/λ` stay representable at large λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    interval: Interval,
    ln_level: f64,
}

impl Piece {
    pub fn new(interval: Interval, level: f64) -> Result<Self> {
        ensure_nonnegative("piece level", level)?;
        Ok(Self {
            interval,
            ln_level: level.ln(),
        })
    }

    pub fn from_ln_level(interval: Interval, ln_level: f64) -> Result<Self> {
        if ln_level.is_nan() || ln_level == f64::INFINITY {
            return Err(Error::InvalidMeasure(format!(
                "log level must be finite or -inf, got {ln_level}"
            )));
        }
        Ok(Self { interval, ln_level })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn level(&self) -> f64 {
        self.ln_level.exp()
    }

    pub fn ln_level(&self) -> f64 {
        self.ln_level
    }
}

/// A nonzero positive measure on ℝ: atoms plus piecewise-constant density on
/// pairwise disjoint intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureMeasure1D {
    atoms: Vec<Atom>,
    pieces: Vec<Piece>,
}

impl MixtureMeasure1D {
    pub fn new(atoms: Vec<Atom>, mut pieces: Vec<Piece>) -> Result<Self> {
        for a in &atoms {
            if !a.location.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom location {} is not finite",
                    a.location
                )));
            }
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom mass {} is not positive", a.mass)));
            }
        }
        pieces.sort_by(|a, b| a.interval.lo().total_cmp(&b.interval.lo()));
        for pair in pieces.windows(2) {
            if pair[0].interval.hi() > pair[1].interval.lo() {
                return Err(Error::InvalidMeasure(format!(
                    "pieces ({}, {}) and ({}, {}) overlap",
                    pair[0].interval.lo(),
                    pair[0].interval.hi(),
                    pair[1].interval.lo(),
                    pair[1].interval.hi()
                )));
            }
        }
        if atoms.is_empty() && pieces.iter().all(|p| p.ln_level == f64::NEG_INFINITY) {
            return Err(Error::InvalidMeasure("measure is identically zero".into()));
        }
        Ok(Self { atoms, pieces })
    }

    /// A single point mass.
    pub fn atom(location: f64, mass: f64) -> Result<Self> {
        Self::new(vec![Atom { location, mass }], vec![])
    }

    /// `level` times Lebesgue measure on the whole line.
    pub fn lebesgue(level: f64) -> Result<Self> {
        ensure_positive("Lebesgue level", level)?;
        Self::new(vec![], vec![Piece::new(Interval::real_line(), level)?])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Pieces sorted by left endpoint.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Density of the continuous part at `x` (zero on piece boundaries).
    pub fn density(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.interval.contains(x))
            .map_or(0.0, Piece::level)
    }

    /// Pushforward under θ ↦ θ/s: locations and endpoints divide by `s`,
    /// density levels multiply by `s`.
    pub fn scale(&self, s: f64) -> Result<Self> {
        ensure_positive("scale", s)?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: a.location / s,
                mass: a.mass,
            })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let iv = Interval::new(p.interval.lo() / s, p.interval.hi() / s)?;
                Piece::from_ln_level(iv, p.ln_level + s.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, pieces)
    }
}

/// g(θ) = (curvature/2)(θ − center)² + l1weight·|θ| + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpQuadIntegrand {
    pub curvature: f64,
    pub center: f64,
    pub l1weight: f64,
    pub offset: f64,
}

impl ExpQuadIntegrand {
    pub fn new(curvature: f64, center: f64, l1weight: f64, offset: f64) -> Result<Self> {
        ensure_nonnegative("curvature", curvature)?;
        ensure_nonnegative("l1 weight", l1weight)?;
        if !center.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidParameter("center and offset must be finite".into()));
        }
        Ok(Self {
            curvature,
            center,
            l1weight,
            offset,
        })
    }

    /// f_u + γ: unit curvature around `u` with ℓ1 weight `lam`.
    pub fn unit_quadratic(u: f64, lam: f64) -> Result<Self> {
        Self::new(1.0, u, lam, 0.0)
    }

    /// The penalty alone, λ|θ|.
    pub fn penalty_only(lam: f64) -> Result<Self> {
        Self::new(0.0, 0.0, lam, 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let d = theta - self.center;
        0.5 * self.curvature * d * d + self.l1weight * theta.abs() + self.offset
    }

    /// min over θ ∈ ℝ of g(θ).
    pub fn minimum(&self) -> f64 {
        if self.curvature > 0.0 {
            penalized_quad_min(self.curvature, self.center, self.l1weight) + self.offset
        } else {
            self.offset
        }
    }

    fn profile(&self) -> Profile {
        let (a, u, lam) = (self.curvature, self.center, self.l1weight);
        if a == 0.0 {
            return Profile {
                plus: Half::Linear { rate: lam },
                minus: Half::Linear { rate: -lam },
                prefer_plus: true,
            };
        }
        let k = lam / a;
        let (cp, cm) = (u - k, u + k);
        // Height of each half-line parabola's vertex above the global minimum.
        let (dp, dm) = if u > k {
            (0.0, -2.0 * lam * u)
        } else if u < -k {
            (2.0 * lam * u, 0.0)
        } else {
            (-0.5 * a * cp * cp, -0.5 * a * cm * cm)
        };
        Profile {
            plus: Half::Quadratic {
                curvature: a,
                center: cp,
                shift: dp,
            },
            minus: Half::Quadratic {
                curvature: a,
                center: cm,
                shift: dm,
            },
            prefer_plus: u >= -k,
        }
    }
}

/// g − min g, split at θ = 0.
struct Profile {
    plus: Half,
    minus: Half,
    /// Which half's formula evaluates θ = 0 without cancellation.
    prefer_plus: bool,
}

enum Half {
    Quadratic { curvature: f64, center: f64, shift: f64 },
    Linear { rate: f64 },
}

impl Half {
    fn excess(&self, theta: f64) -> f64 {
        match *self {
            Half::Quadratic {
                curvature,
                center,
                shift,
            } => {
                let d = theta - center;
                0.5 * curvature * d * d + shift
            }
            Half::Linear { rate } => rate * theta,
        }
    }

    fn ln_integral(&self, iv: Interval) -> Result<f64> {
        match *self {
            Half::Quadratic {
                curvature,
                center,
                shift,
            } => Ok(ln_gaussian_segment(iv, center, 1.0 / curvature) - shift),
            Half::Linear { rate } => ln_exp_linear_segment(iv, rate),
        }
    }
}

impl Profile {
    fn excess(&self, theta: f64) -> f64 {
        if theta > 0.0 || (theta == 0.0 && self.prefer_plus) {
            self.plus.excess(theta)
        } else {
            self.minus.excess(theta)
        }
    }
}

/// ln ∫ exp(−(g(θ) − min g)) w(dθ).
///
/// The value is ≥ 0 exactly when `w` dominates the envelope condition for
/// `g`; this form keeps full relative precision when it is close to zero.
pub fn log_integral_excess(w: &MixtureMeasure1D, g: &ExpQuadIntegrand) -> Result<f64> {
    let profile = g.profile();
    let mut terms = Vec::with_capacity(w.atoms.len() + 2 * w.pieces.len());
    for a in &w.atoms {
        terms.push(a.mass.ln() - profile.excess(a.location));
    }
    for p in &w.pieces {
        if p.ln_level == f64::NEG_INFINITY {
            continue;
        }
        if let Some(iv) = p.interval.clip(0.0, f64::INFINITY) {
            terms.push(p.ln_level + profile.plus.ln_integral(iv)?);
        }
        if let Some(iv) = p.interval.clip(f64::NEG_INFINITY, 0.0) {
            terms.push(p.ln_level + profile.minus.ln_integral(iv)?);
        }
    }
    Ok(log_sum_exp(&terms))
}

/// ln ∫ e^{−g(θ)} w(dθ).
pub fn integrate_exp(w: &MixtureMeasure1D, g: &ExpQuadIntegrand) -> Result<f64> {
    Ok(log_integral_excess(w, g)? - g.minimum())
}

/// ln w[e^{−λ|θ|}].
pub fn log_partition(w: &MixtureMeasure1D, l1weight: f64) -> Result<f64> {
    integrate_exp(w, &ExpQuadIntegrand::penalty_only(l1weight)?)
}

/// Pushforward of `w` under θ ↦ θ/s.
pub fn scale_measure(w: &MixtureMeasure1D, s: f64) -> Result<MixtureMeasure1D> {
    w.scale(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature_oracle;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn st_like(lam: f64) -> MixtureMeasure1D {
        let c = (0.5 * lam * lam - 1.0).exp() / lam;
        MixtureMeasure1D::new(
            vec![Atom {
                location: 0.0,
                mass: 1.0,
            }],
            vec![
                Piece::new(Interval::new(f64::NEG_INFINITY, -lam).unwrap(), c).unwrap(),
                Piece::new(Interval::new(lam, f64::INFINITY).unwrap(), c).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn integrate_examples() {
        let spike = MixtureMeasure1D::atom(0.0, 1.0).unwrap();
        let g = ExpQuadIntegrand::unit_quadratic(1.0, 1.0).unwrap();
        assert_relative_eq!(integrate_exp(&spike, &g).unwrap(), -0.5, max_relative = 1e-15);

        let leb = MixtureMeasure1D::lebesgue(1.0).unwrap();
        let g = ExpQuadIntegrand::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(
            integrate_exp(&leb, &g).unwrap(),
            0.918_938_533_204_672_8,
            max_relative = 1e-14
        );

        // mpmath: ln(1 + 2c∫_1^∞ e^{-θ}dθ), c = e^{-1/2}
        let g = ExpQuadIntegrand::penalty_only(1.0).unwrap();
        assert_relative_eq!(
            integrate_exp(&st_like(1.0), &g).unwrap(),
            0.368_981_135_401_315_4,
            max_relative = 1e-13
        );
    }

    #[test]
    fn log_partition_examples() {
        assert_relative_eq!(
            log_partition(&st_like(2.0), 2.0).unwrap(),
            0.024_588_738_106_757_265,
            max_relative = 1e-12
        );
        let spike = MixtureMeasure1D::atom(0.0, 1.0).unwrap();
        assert_eq!(log_partition(&spike, 3.7).unwrap(), 0.0);
        let leb = MixtureMeasure1D::lebesgue(1.0).unwrap();
        assert_relative_eq!(log_partition(&leb, 1.0).unwrap(), LN_2, max_relative = 1e-15);
        assert!(matches!(log_partition(&leb, 0.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn scale_examples() {
        let spike = MixtureMeasure1D::atom(0.0, 1.0).unwrap();
        assert_eq!(spike.scale(3.0).unwrap(), spike);
        let leb = MixtureMeasure1D::lebesgue(1.0).unwrap().scale(2.0).unwrap();
        assert_relative_eq!(leb.pieces()[0].level(), 2.0, max_relative = 1e-15);
        let st = st_like(2.0).scale(2.0).unwrap();
        assert_eq!(
            st.atoms(),
            &[Atom {
                location: 0.0,
                mass: 1.0
            }]
        );
        assert_eq!(st.pieces()[1].interval().lo(), 1.0);
        assert_relative_eq!(st.pieces()[1].level(), 2.0 * 1f64.exp() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn construction_errors() {
        assert!(MixtureMeasure1D::atom(0.0, 0.0).is_err());
        assert!(MixtureMeasure1D::new(vec![], vec![]).is_err());
        let a = Piece::new(Interval::new(0.0, 2.0).unwrap(), 1.0).unwrap();
        let b = Piece::new(Interval::new(1.0, 3.0).unwrap(), 1.0).unwrap();
        assert!(MixtureMeasure1D::new(vec![], vec![a, b]).is_err());
        let zero = Piece::new(Interval::new(0.0, 2.0).unwrap(), 0.0).unwrap();
        assert!(MixtureMeasure1D::new(vec![], vec![zero]).is_err());
        assert!(Piece::new(Interval::real_line(), -1.0).is_err());
        assert!(ExpQuadIntegrand::new(-1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn flat_integrand_on_bounded_piece_is_length() {
        let w = MixtureMeasure1D::new(
            vec![],
            vec![Piece::new(Interval::new(-1.0, 2.0).unwrap(), 2.0).unwrap()],
        )
        .unwrap();
        let g = ExpQuadIntegrand::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(integrate_exp(&w, &g).unwrap(), 6f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn excess_is_exactly_zero_for_spike_inside_threshold() {
        let spike = MixtureMeasure1D::atom(0.0, 1.0).unwrap();
        for &u in &[0.0, 0.3, -7.5, 9.999] {
            let g = ExpQuadIntegrand::unit_quadratic(u, 10.0).unwrap();
            assert_eq!(log_integral_excess(&spike, &g).unwrap(), 0.0);
        }
        let g = ExpQuadIntegrand::unit_quadratic(12.0, 10.0).unwrap();
        assert_eq!(log_integral_excess(&spike, &g).unwrap(), -2.0);
    }

    fn oracle(w: &MixtureMeasure1D, g: &ExpQuadIntegrand) -> f64 {
        let atoms: f64 = w.atoms().iter().map(|a| a.mass * (-g.eval(a.location)).exp()).sum();
        let pieces: f64 = w
            .pieces()
            .iter()
            .flat_map(|p| {
                [
                    p.interval().clip(f64::NEG_INFINITY, 0.0),
                    p.interval().clip(0.0, f64::INFINITY),
                ]
                .into_iter()
                .flatten()
                .map(move |iv| (p.level(), iv))
            })
            .map(|(level, iv)| {
                let f = |t: f64| (-g.eval(t)).exp();
                let rough = quadrature_oracle(f, iv, 1e-6).unwrap();
                level * quadrature_oracle(f, iv, 1e-13 * rough.max(1e-300)).unwrap()
            })
            .sum();
        atoms + pieces
    }

    fn measure_strategy() -> impl Strategy<Value = MixtureMeasure1D> {
        (
            proptest::collection::vec((-3.0f64..3.0, 0.05f64..3.0), 0..3),
            -4.0f64..0.0,
            proptest::collection::vec((0.05f64..2.0, 0.1f64..2.0, 0.0f64..2.5), 1..4),
        )
            .prop_map(|(atoms, start, gaps)| {
                let atoms = atoms
                    .into_iter()
                    .map(|(location, mass)| Atom { location, mass })
                    .collect();
                let mut lo = start;
                let mut pieces = Vec::new();
                for (gap, width, level) in gaps {
                    lo += gap;
                    pieces.push(Piece::new(Interval::new(lo, lo + width).unwrap(), level + 0.01).unwrap());
                    lo += width;
                }
                MixtureMeasure1D::new(atoms, pieces).unwrap()
            })
    }

    proptest! {
        #[test]
        fn closed_form_matches_quadrature(
            w in measure_strategy(),
            a in 0.0f64..4.0,
            u in -3.0f64..3.0,
            lam in 0.0f64..3.0,
            offset in -1.0f64..1.0,
        ) {
            let g = ExpQuadIntegrand::new(a, u, lam, offset).unwrap();
            let closed = integrate_exp(&w, &g).unwrap().exp();
            let q = oracle(&w, &g);
            prop_assert!((closed - q).abs() / q <= 1e-8, "closed {closed} oracle {q}");
        }

        #[test]
        fn scaling_equivariance(
            w in measure_strategy(),
            s in 0.2f64..5.0,
            a in 0.01f64..4.0,
            u in -3.0f64..3.0,
            lam in 0.0f64..3.0,
        ) {
            let lhs = integrate_exp(&w.scale(s).unwrap(), &ExpQuadIntegrand::new(a, u, lam, 0.0).unwrap()).unwrap();
            let rhs = integrate_exp(&w, &ExpQuadIntegrand::new(a / (s * s), s * u, lam / s, 0.0).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn splitting_a_piece_changes_nothing(
            w in measure_strategy(),
            frac in 0.05f64..0.95,
            a in 0.0f64..4.0,
            u in -3.0f64..3.0,
            lam in 0.01f64..3.0,
        ) {
            let g = ExpQuadIntegrand::new(a, u, lam, 0.0).unwrap();
            let p = w.pieces()[0];
            let cut = p.interval().lo() + frac * (p.interval().hi() - p.interval().lo());
            let mut pieces = w.pieces()[1..].to_vec();
            pieces.push(Piece::from_ln_level(Interval::new(p.interval().lo(), cut).unwrap(), p.ln_level()).unwrap());
            pieces.push(Piece::from_ln_level(Interval::new(cut, p.interval().hi()).unwrap(), p.ln_level()).unwrap());
            let split = MixtureMeasure1D::new(w.atoms().to_vec(), pieces).unwrap();
            let lhs = integrate_exp(&w, &g).unwrap();
            let rhs = integrate_exp(&split, &g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }
}
