//! Scalar kernels: Gaussian CDF and its log-tails, closed-form Gaussian and
//! exponential segment integrals, log-domain summation, 1-D maximization,
//! bisection, and adaptive Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use crate::error::{Error, Result};

/// ln √(2π)
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// √(2π)
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// A possibly unbounded open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Intersection with `(lo, hi)`, or `None` when it is empty.
    pub fn clip(&self, lo: f64, hi: f64) -> Option<Self> {
        let lo = self.lo.max(lo);
        let hi = self.hi.min(hi);
        (lo < hi).then_some(Self { lo, hi })
    }
}

/// Standard normal distribution function Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 - 0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    } else {
        0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
    }
}

/// Standard normal density φ(x).
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// ln erfc(z), accurate far into the upper tail where erfc itself underflows.
pub fn ln_erfc(z: f64) -> f64 {
    if z < 20.0 {
        return libm::erfc(z).ln();
    }
    // erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + 0.5 * k as f64 / tail;
    }
    -z * z - 0.5 * PI.ln() - tail.ln()
}

/// ln Φ(x).
pub fn ln_std_normal_cdf(x: f64) -> f64 {
    if x < -1.0 {
        -LN_2 + ln_erfc(-x * FRAC_1_SQRT_2)
    } else {
        (-0.5 * libm::erfc(x * FRAC_1_SQRT_2)).ln_1p()
    }
}

/// ln(1 − Φ(x)).
pub fn ln_std_normal_sf(x: f64) -> f64 {
    ln_std_normal_cdf(-x)
}

/// ln(1 − eˣ) for x ≤ 0.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// ln Σ exp(tᵢ). The largest term is factored out and the rest enter through
/// `ln_1p`, so a sum of the form 1 + tiny keeps the tiny part.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let Some((imax, &max)) = terms.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return f64::NEG_INFINITY;
    };
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let rest: f64 = terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != imax)
        .map(|(_, &t)| (t - max).exp())
        .sum();
    max + rest.ln_1p()
}

/// ln ∫_iv exp(−(θ−center)²/(2·variance)) dθ.
pub fn ln_gaussian_segment(iv: Interval, center: f64, variance: f64) -> f64 {
    debug_assert!(variance > 0.0);
    let sd = variance.sqrt();
    let a = (iv.lo - center) / sd;
    let b = (iv.hi - center) / sd;
    let ln_mass = if a >= 0.0 {
        let upper = ln_std_normal_sf(a);
        let lower = ln_std_normal_sf(b);
        upper + ln_one_minus_exp(lower - upper)
    } else if b <= 0.0 {
        let upper = ln_std_normal_cdf(b);
        let lower = ln_std_normal_cdf(a);
        upper + ln_one_minus_exp(lower - upper)
    } else {
        let outside = 0.5 * libm::erfc(b * FRAC_1_SQRT_2) + 0.5 * libm::erfc(-a * FRAC_1_SQRT_2);
        (-outside).ln_1p()
    };
    ln_mass + LN_SQRT_2PI + 0.5 * variance.ln()
}

/// ∫_iv exp(−(θ−center)²/(2·variance)) dθ.
pub fn gaussian_segment(iv: Interval, center: f64, variance: f64) -> f64 {
    ln_gaussian_segment(iv, center, variance).exp()
}

/// ln ∫_iv e^{−rate·θ} dθ, or a divergence error when the integral is infinite.
pub fn ln_exp_linear_segment(iv: Interval, rate: f64) -> Result<f64> {
    let width = iv.hi - iv.lo;
    if rate == 0.0 {
        if iv.is_bounded() {
            return Ok(width.ln());
        }
        return Err(Error::Divergent(format!(
            "∫ dθ over ({}, {}) is infinite",
            iv.lo, iv.hi
        )));
    }
    if rate > 0.0 {
        if iv.lo == f64::NEG_INFINITY {
            return Err(Error::Divergent(format!("∫ e^(-{rate}θ) dθ diverges at -∞")));
        }
        // e^{-r lo}(1 - e^{-r(hi - lo)})/r
        Ok(-rate * iv.lo + ln_one_minus_exp(-rate * width) - rate.ln())
    } else {
        if iv.hi == f64::INFINITY {
            return Err(Error::Divergent(format!("∫ e^({}θ) dθ diverges at +∞", -rate)));
        }
        let r = -rate;
        Ok(r * iv.hi + ln_one_minus_exp(-r * width) - r.ln())
    }
}

/// ∫_iv e^{−rate·θ} dθ.
pub fn exp_linear_segment(iv: Interval, rate: f64) -> Result<f64> {
    ln_exp_linear_segment(iv, rate).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub max: f64,
}

/// Maximizes `f` on `[lo, hi]` with a 256-point scan followed by
/// golden-section refinement around the best grid point.
pub fn maximize_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    maximize_1d_grid(f, lo, hi, 256, tol)
}

/// [`maximize_1d`] with an explicit scan size (clamped to at least 256).
pub fn maximize_1d_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> Maximum {
    debug_assert!(lo < hi && tol > 0.0);
    let n = grid.max(256);
    let step = (hi - lo) / (n - 1) as f64;
    let point = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };

    let mut best = Maximum {
        argmax: lo,
        max: f64::NEG_INFINITY,
    };
    let mut best_i = 0;
    for i in 0..n {
        let x = point(i);
        let fx = f(x);
        if fx > best.max {
            best = Maximum { argmax: x, max: fx };
            best_i = i;
        }
    }

    let a = point(best_i.saturating_sub(1));
    let b = point((best_i + 1).min(n - 1));
    let refined = golden_section_max(&f, a, b, tol);
    if refined.max > best.max {
        refined
    } else {
        best
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Maximum {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    if fc >= fd {
        Maximum { argmax: c, max: fc }
    } else {
        Maximum { argmax: d, max: fd }
    }
}

/// Root of a continuous `f` bracketed by `[lo, hi]`, located to within `tol`.
///
/// Iteration also stops once the midpoint no longer separates the bracket,
/// so `tol = 0` means full double precision.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NotBracketed {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SUBINTERVALS: usize = 5000;

struct Segment {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> Segment {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = g(mid);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for (i, (&x, &w)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let pair = g(mid - half * x) + g(mid + half * x);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        estimate: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` over `iv` to absolute
/// error `tol`.
///
/// Unbounded ends are mapped onto a finite range: `x = t/(1−t²)` on `(−1, 1)`
/// for the whole line and `x = lo + t/(1−t)` on `[0, 1)` for a half line.
pub fn quadrature_oracle<F: Fn(f64) -> f64>(f: F, iv: Interval, tol: f64) -> Result<f64> {
    let (lo, hi) = (iv.lo, iv.hi);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive(&f, lo, hi, tol),
        (false, false) => adaptive(
            &|t: f64| {
                let s = 1.0 - t * t;
                weighted(&f, t / s, (1.0 + t * t) / (s * s))
            },
            -1.0,
            1.0,
            tol,
        ),
        (true, false) => adaptive(
            &|t: f64| {
                let s = 1.0 - t;
                weighted(&f, lo + t / s, 1.0 / (s * s))
            },
            0.0,
            1.0,
            tol,
        ),
        (false, true) => adaptive(
            &|t: f64| {
                let s = 1.0 - t;
                weighted(&f, hi - t / s, 1.0 / (s * s))
            },
            0.0,
            1.0,
            tol,
        ),
    }
}

fn weighted<F: Fn(f64) -> f64>(f: &F, x: f64, jacobian: f64) -> f64 {
    if !x.is_finite() {
        return 0.0;
    }
    let fx = f(x);
    if fx == 0.0 {
        0.0
    } else {
        fx * jacobian
    }
}

fn adaptive<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod(g, a, b);
    let mut estimate = first.estimate;
    let mut error = first.error;
    heap.push(first);
    while error > tol {
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(Error::NoConvergence {
                estimate,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NoConvergence {
                estimate,
                error,
                intervals: heap.len() + 1,
            });
        }
        let left = gauss_kronrod(g, worst.a, mid);
        let right = gauss_kronrod(g, mid, worst.b);
        estimate += left.estimate + right.estimate - worst.estimate;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if error <= tol {
            // Re-sum to shed accumulated cancellation in the running totals.
            estimate = heap.iter().map(|s| s.estimate).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(heap.iter().map(|s| s.estimate).sum())
}
