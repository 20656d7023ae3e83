//! Univariate and product kernels for sampling Kantorovich operators.
//!
//! Three families are provided:
//!
//! * central B-splines `B_s`, supported on `[-s/2, s/2]`;
//! * Jackson-type kernels `J_s(x) = c_s sinc^{2s}(x / (2 s pi))`, with the
//!   normalization `c_s` obtained by quadrature and cached per order;
//! * B-splines shifted right by `(s + 2) / 2`, supported on `[1, s + 1]`,
//!   used for prediction from past samples only.
//!
//! Sample nodes are the integers throughout (`t_k = k`).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;

/// Upper bound on the pointwise kernel value that series sums may drop.
pub const JACKSON_ENVELOPE_CUTOFF: f64 = 1e-12;
/// Upper bound on the relative kernel mass that series sums may drop.
pub const JACKSON_TAIL_MASS_CUTOFF: f64 = 1e-8;

const JACKSON_QUADRATURE_TOL: f64 = 1e-12;
// Integer so that the oscillating part of the tail integrates to (almost) zero.
const JACKSON_QUADRATURE_SPAN: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    CentralBSpline,
    Jackson,
    ShiftedBSpline,
}

/// An evaluable univariate kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateKernel {
    kind: KernelKind,
    order: u32,
    shift: f64,
    normalization: f64,
}

impl UnivariateKernel {
    pub fn central_bspline(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            kind: KernelKind::CentralBSpline,
            order,
            shift: 0.0,
            normalization: 1.0,
        })
    }

    pub fn jackson(order: u32) -> Result<Self> {
        Ok(Self {
            kind: KernelKind::Jackson,
            order,
            shift: 0.0,
            normalization: jackson_normalization(order)?,
        })
    }

    /// B-spline of order `s` translated by `(s + 2) / 2`, so its support is
    /// `[1, s + 1]`.
    pub fn shifted_bspline(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            kind: KernelKind::ShiftedBSpline,
            order,
            shift: bspline_shift(order),
            normalization: 1.0,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn is_compact(&self) -> bool {
        self.kind != KernelKind::Jackson
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            KernelKind::CentralBSpline | KernelKind::ShiftedBSpline => {
                bspline_value(self.order, x - self.shift)
            }
            KernelKind::Jackson => self.normalization * sinc_power(self.order, x),
        }
    }

    /// Interval outside of which the kernel vanishes. For Jackson kernels
    /// this is the truncation interval `[-R, R]` used by series sums (see
    /// [`jackson_truncation_radius`]).
    pub fn support(&self) -> (f64, f64) {
        let s = f64::from(self.order);
        match self.kind {
            KernelKind::CentralBSpline => (-s / 2.0, s / 2.0),
            KernelKind::ShiftedBSpline => (self.shift - s / 2.0, self.shift + s / 2.0),
            KernelKind::Jackson => {
                let r = jackson_truncation_radius(self.order, self.normalization);
                (-r, r)
            }
        }
    }
}

/// Tensor-product kernel `X(x) = chi_1(x_1) chi_2(x_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductKernel {
    factors: [UnivariateKernel; 2],
}

impl ProductKernel {
    /// Product of two copies of `factor`.
    pub fn new(factor: UnivariateKernel) -> Self {
        Self {
            factors: [factor, factor],
        }
    }

    pub fn from_factors(first: UnivariateKernel, second: UnivariateKernel) -> Self {
        Self {
            factors: [first, second],
        }
    }

    pub fn bspline(order: u32) -> Result<Self> {
        UnivariateKernel::central_bspline(order).map(Self::new)
    }

    pub fn jackson(order: u32) -> Result<Self> {
        UnivariateKernel::jackson(order).map(Self::new)
    }

    pub fn shifted_bspline(order: u32) -> Result<Self> {
        UnivariateKernel::shifted_bspline(order).map(Self::new)
    }

    pub fn factors(&self) -> &[UnivariateKernel; 2] {
        &self.factors
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.factors[0].eval(x1) * self.factors[1].eval(x2)
    }

    /// Cartesian product of the factor supports.
    pub fn support(&self) -> [(f64, f64); 2] {
        [self.factors[0].support(), self.factors[1].support()]
    }

    /// The same kernel with its two factors swapped.
    pub fn transposed(&self) -> Self {
        Self::from_factors(self.factors[1], self.factors[0])
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidOrder(order))
    } else {
        Ok(())
    }
}

fn bspline_shift(order: u32) -> f64 {
    (f64::from(order) + 2.0) / 2.0
}

/// Central B-spline of order `s` via its truncated-power closed form.
pub fn eval_bspline(s: u32, x: f64) -> Result<f64> {
    check_order(s)?;
    Ok(bspline_value(s, x))
}

/// Shifted B-spline `B_s(x - (s + 2) / 2)`; zero for `x < 1`.
pub fn eval_shifted_bspline(s: u32, x: f64) -> Result<f64> {
    check_order(s)?;
    Ok(bspline_value(s, x - bspline_shift(s)))
}

/// Jackson kernel of order `s` at `x`, normalized to unit integral.
pub fn eval_jackson(s: u32, x: f64) -> Result<f64> {
    Ok(jackson_normalization(s)? * sinc_power(s, x))
}

// Evaluated at -|x|: the truncated powers that survive there are small, so the
// alternating sum loses little to cancellation, and symmetry is exact.
fn bspline_value(s: u32, x: f64) -> f64 {
    let half = f64::from(s) / 2.0;
    let t = -x.abs();
    if s == 1 {
        // Endpoint value 1/2 keeps the partition of unity exact at half-integers.
        return match t.partial_cmp(&-half) {
            Some(std::cmp::Ordering::Greater) => 1.0,
            Some(std::cmp::Ordering::Equal) => 0.5,
            _ => 0.0,
        };
    }
    if t <= -half {
        return 0.0;
    }
    let degree = (s - 1) as i32;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=s {
        let base = half + t - f64::from(j);
        if base <= 0.0 {
            break;
        }
        let term = binom * base.powi(degree);
        acc += if j % 2 == 0 { term } else { -term };
        binom = binom * f64::from(s - j) / f64::from(j + 1);
    }
    (acc / factorial(s - 1)).max(0.0)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `sinc^{2s}(x / (2 s pi))` with `sinc(t) = sin(pi t) / (pi t)`.
fn sinc_power(s: u32, x: f64) -> f64 {
    let arg = x / (2.0 * f64::from(s));
    if arg == 0.0 {
        return 1.0;
    }
    (arg.sin() / arg).powi(2 * s as i32)
}

fn normalization_cache() -> &'static Mutex<HashMap<u32, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normalization `c_s = [int sinc^{2s}(u / (2 s pi)) du]^{-1}`, cached per order.
///
/// The integral is computed as `2 s pi * 2 * int_0^inf sinc^{2s}(t) dt`. The
/// finite part uses adaptive Gauss-Kronrod on unit intervals up to `T = 1000`.
/// The tail beyond `T` is added analytically from the constant Fourier term
/// of `sin^{2s}`; the oscillating terms left out are below `1/(4 pi^4 T^3)`.
pub fn jackson_normalization(s: u32) -> Result<f64> {
    check_order(s)?;
    if let Some(&c) = normalization_cache().lock().expect("cache poisoned").get(&s) {
        return Ok(c);
    }
    let c = compute_jackson_normalization(s)?;
    normalization_cache()
        .lock()
        .expect("cache poisoned")
        .insert(s, c);
    Ok(c)
}

fn compute_jackson_normalization(s: u32) -> Result<f64> {
    let power = 2 * s as i32;
    let integrand = move |t: f64| {
        if t == 0.0 {
            1.0
        } else {
            let pt = std::f64::consts::PI * t;
            (pt.sin() / pt).powi(power)
        }
    };
    let span = JACKSON_QUADRATURE_SPAN;
    let per_interval_tol = JACKSON_QUADRATURE_TOL / f64::from(span);
    let mut finite = 0.0;
    let mut achieved = 0.0;
    for j in 0..span {
        let piece = adaptive_integrate(integrand, f64::from(j), f64::from(j + 1), per_interval_tol)?;
        finite += piece.value;
        achieved += piece.error_estimate;
    }
    if achieved > JACKSON_QUADRATURE_TOL {
        return Err(Error::Quadrature {
            achieved,
            requested: JACKSON_QUADRATURE_TOL,
        });
    }
    let n = 2 * s;
    let mean_sin_power = central_binomial(s) / 4f64.powi(s as i32);
    let t = f64::from(span);
    let tail = mean_sin_power * std::f64::consts::PI.powi(-(n as i32)) * t.powi(1 - n as i32)
        / f64::from(n - 1);
    let half_line = finite + tail;
    let total = 2.0 * f64::from(s) * std::f64::consts::PI * 2.0 * half_line;
    Ok(1.0 / total)
}

fn central_binomial(s: u32) -> f64 {
    (1..=s).fold(1.0, |acc, j| acc * f64::from(s + j) / f64::from(j))
}

/// Radius `R` beyond which Jackson terms are dropped from series sums: both
/// the envelope `c_s (2s/|x|)^{2s}` is below [`JACKSON_ENVELOPE_CUTOFF`] and the
/// envelope mass outside `[-R, R]` is below [`JACKSON_TAIL_MASS_CUTOFF`].
pub fn jackson_truncation_radius(s: u32, normalization: f64) -> f64 {
    let two_s = 2.0 * f64::from(s);
    let by_value = two_s * (normalization / JACKSON_ENVELOPE_CUTOFF).powf(1.0 / two_s);
    let by_mass = two_s
        * (2.0 * normalization * two_s / ((two_s - 1.0) * JACKSON_TAIL_MASS_CUTOFF))
            .powf(1.0 / (two_s - 1.0));
    by_value.max(by_mass)
}

/// `max_x |sum_{|k| <= K} chi(x - k) - 1|` over the given sample points.
pub fn partition_of_unity_residual(kernel: &UnivariateKernel, grid: &[f64], truncation: i64) -> f64 {
    grid.iter()
        .map(|&x| {
            let sum: f64 = (-truncation..=truncation)
                .map(|k| kernel.eval(x - k as f64))
                .sum();
            (sum - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Points of `[0, 1]` at which discrete moments are sampled.
pub const MOMENT_GRID_POINTS: usize = 11;

/// Truncated discrete absolute moment
/// `sup_x sum_{|k| <= K} |chi(x - k)| |x - k|^beta`.
///
/// With integer nodes the sum is 1-periodic in `x`, so the supremum is taken
/// over [`MOMENT_GRID_POINTS`] equispaced points of `[0, 1]`.
pub fn discrete_moment_estimate(kernel: &UnivariateKernel, beta: f64, truncation: i64) -> f64 {
    let n = MOMENT_GRID_POINTS;
    (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            (-truncation..=truncation)
                .map(|k| {
                    let d = x - k as f64;
                    let weight = kernel.eval(d).abs();
                    if beta == 0.0 {
                        weight
                    } else {
                        weight * d.abs().powf(beta)
                    }
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}
