//! Empirical convergence rates of SK operators on synthetic functions.
//!
//! Test functions are products of univariate profiles,
//! `f(x1, x2) = phi1(x1) phi2(x2)`, so with a product kernel the operator
//! factors too: `K_w f (x) = (K_w phi1)(x1) (K_w phi2)(x2)` with the 1-D
//! operator `K_w phi (t) = sum_k chi(w t - k) w int_{k/w}^{(k+1)/w} phi`.
//! Cell integrals use closed-form antiderivatives where the profile has one
//! and graded Gauss-Legendre quadrature otherwise. A direct 2-D summation
//! ([`sup_error_direct`]) is kept as an independent cross-check.
//!
//! Errors are measured on a tensor grid over the support box widened by a
//! fixed fraction of its width; with an odd node count the box centre is a
//! node.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::kernels::{ProductKernel, UnivariateKernel};
use crate::quadrature::gauss_legendre8;

/// Univariate building block of a synthetic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `slope t + intercept` everywhere.
    Linear { slope: f64, intercept: f64 },
    /// `max(0, 1 - (|t| / radius)^alpha)`: a tent for `alpha = 1`, a cusp
    /// at 0 for `alpha < 1`. Lipschitz of order `alpha`.
    Cap { alpha: f64, radius: f64 },
    /// `exp(-t^2 / (2 sigma^2))`, cut to zero beyond `8 sigma`.
    Gaussian { sigma: f64 },
    /// `1 + slope t` on `[a, b]`, zero elsewhere.
    Plateau { a: f64, b: f64, slope: f64 },
}

const GAUSSIAN_CUTOFF: f64 = 8.0;

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Constant(c) => c,
            Self::Linear { slope, intercept } => slope * t + intercept,
            Self::Cap { alpha, radius } => {
                if t.abs() >= radius {
                    0.0
                } else {
                    1.0 - (t.abs() / radius).powf(alpha)
                }
            }
            Self::Gaussian { sigma } => {
                if t.abs() > GAUSSIAN_CUTOFF * sigma {
                    0.0
                } else {
                    (-t * t / (2.0 * sigma * sigma)).exp()
                }
            }
            Self::Plateau { a, b, slope } => {
                if t < a || t > b {
                    0.0
                } else {
                    1.0 + slope * t
                }
            }
        }
    }

    /// Interval outside which the profile vanishes, if bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Constant(_) | Self::Linear { .. } => None,
            Self::Cap { radius, .. } => Some((-radius, radius)),
            Self::Gaussian { sigma } => Some((-GAUSSIAN_CUTOFF * sigma, GAUSSIAN_CUTOFF * sigma)),
            Self::Plateau { a, b, .. } => Some((a, b)),
        }
    }

    /// Points where the profile or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::Constant(_) | Self::Linear { .. } => Vec::new(),
            Self::Cap { radius, .. } => vec![-radius, 0.0, radius],
            Self::Gaussian { sigma } => vec![-GAUSSIAN_CUTOFF * sigma, GAUSSIAN_CUTOFF * sigma],
            Self::Plateau { a, b, .. } => vec![a, b],
        }
    }

    /// `int_a^b phi`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match *self {
            Self::Constant(c) => c * (b - a),
            Self::Linear { slope, intercept } => slope * (b * b - a * a) / 2.0 + intercept * (b - a),
            Self::Cap { alpha, radius } => {
                // Odd antiderivative, constant beyond the radius.
                let g = |t: f64| {
                    let u = t.abs().min(radius);
                    t.signum() * (u - radius * (u / radius).powf(alpha + 1.0) / (alpha + 1.0))
                };
                g(b) - g(a)
            }
            Self::Plateau { a: lo, b: hi, slope } => {
                let (x, y) = (a.max(lo), b.min(hi));
                if y <= x {
                    0.0
                } else {
                    (y - x) + slope * (y * y - x * x) / 2.0
                }
            }
            Self::Gaussian { sigma } => {
                let (lo, hi) = (-GAUSSIAN_CUTOFF * sigma, GAUSSIAN_CUTOFF * sigma);
                let (x, y) = (a.max(lo), b.min(hi));
                if y <= x {
                    return 0.0;
                }
                let pieces = ((y - x) / (0.25 * sigma)).ceil().max(1.0) as usize;
                let h = (y - x) / pieces as f64;
                (0..pieces)
                    .map(|i| {
                        let s = x + i as f64 * h;
                        gauss_legendre8(|t| self.eval(t), s, s + h)
                    })
                    .sum()
            }
        }
    }

    /// Modulus-of-continuity order, when the profile is Lipschitz.
    pub fn lipschitz_order(&self) -> Option<f64> {
        match *self {
            Self::Constant(_) | Self::Linear { .. } | Self::Gaussian { .. } => Some(1.0),
            Self::Cap { alpha, .. } => Some(alpha.min(1.0)),
            Self::Plateau { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    Constant,
    Linear,
    Lipschitz(f64),
    SmoothGaussian,
    StepEdge,
    Indicator,
}

/// `f(x1, x2) = phi1(x1) phi2(x2)` with a bounding box for evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticFunction {
    pub kind: SyntheticKind,
    pub factors: [Profile; 2],
    pub support_box: [(f64, f64); 2],
}

impl SyntheticFunction {
    pub fn constant(c: f64) -> Self {
        Self {
            kind: SyntheticKind::Constant,
            factors: [Profile::Constant(c), Profile::Constant(1.0)],
            support_box: [(-1.0, 1.0); 2],
        }
    }

    /// `f(x) = slope x1 + intercept` on `[-1, 1]^2`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self {
            kind: SyntheticKind::Linear,
            factors: [Profile::Linear { slope, intercept }, Profile::Constant(1.0)],
            support_box: [(-1.0, 1.0); 2],
        }
    }

    /// Product of two caps of order `alpha` and the given radius, centred at
    /// the origin; `alpha = 1` is a pyramid-shaped tent.
    pub fn lipschitz(alpha: f64, radius: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("Lipschitz order must lie in (0, 1], got {alpha}")));
        }
        if !(radius > 0.0) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        let cap = Profile::Cap { alpha, radius };
        Ok(Self {
            kind: SyntheticKind::Lipschitz(alpha),
            factors: [cap, cap],
            support_box: [(-radius, radius); 2],
        })
    }

    pub fn gaussian(sigma: f64) -> Self {
        let g = Profile::Gaussian { sigma };
        let r = GAUSSIAN_CUTOFF * sigma;
        Self {
            kind: SyntheticKind::SmoothGaussian,
            factors: [g, g],
            support_box: [(-r, r); 2],
        }
    }

    /// Square plateau on `[-1, 1]^2` with a gentle ramp `1 + x1 / 2` on top:
    /// jumps along the square's edges, linear elsewhere.
    pub fn step_edge() -> Self {
        Self {
            kind: SyntheticKind::StepEdge,
            factors: [
                Profile::Plateau { a: -1.0, b: 1.0, slope: 0.5 },
                Profile::Plateau { a: -1.0, b: 1.0, slope: 0.0 },
            ],
            support_box: [(-1.0, 1.0); 2],
        }
    }

    /// Square indicator of `[-1, 1]^2`: in `Lip(1/2, 2)` but not continuous.
    pub fn indicator() -> Self {
        let p = Profile::Plateau { a: -1.0, b: 1.0, slope: 0.0 };
        Self {
            kind: SyntheticKind::Indicator,
            factors: [p, p],
            support_box: [(-1.0, 1.0); 2],
        }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.factors[0].eval(x1) * self.factors[1].eval(x2)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.factors, [Profile::Constant(_), Profile::Constant(_)])
    }
}

impl fmt::Display for SyntheticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SyntheticKind::Constant => write!(f, "constant"),
            SyntheticKind::Linear => write!(f, "linear"),
            SyntheticKind::Lipschitz(a) => write!(f, "lipschitz(alpha={a})"),
            SyntheticKind::SmoothGaussian => write!(f, "gaussian"),
            SyntheticKind::StepEdge => write!(f, "step-edge"),
            SyntheticKind::Indicator => write!(f, "indicator"),
        }
    }
}

/// Evaluation nodes along one axis: `n` equispaced points over the support
/// interval widened by `margin` on both sides.
pub fn axis_nodes(interval: (f64, f64), margin: f64, n: usize) -> Vec<f64> {
    let (a, b) = (interval.0 - margin, interval.1 + margin);
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Margin added on each side of the support box, as a fraction of its
/// width. It is the same for every `w`, so the normalized measure behind the
/// cSSIM comparison does not drift as `w` grows.
pub const BOX_MARGIN: f64 = 0.125;

fn margin_for(interval: (f64, f64)) -> f64 {
    BOX_MARGIN * (interval.1 - interval.0)
}

/// `(K_w phi)(t)` at each node.
pub fn operator_1d(profile: &Profile, w: f64, kernel: &UnivariateKernel, nodes: &[f64]) -> Result<Vec<f64>> {
    if let (Profile::Constant(c), false) = (profile, kernel.is_compact()) {
        // Jackson kernels are band-limited below 1 and so reproduce constants
        // exactly; their tails are too long to sum term by term here.
        return Ok(vec![*c; nodes.len()]);
    }
    let (lo, hi) = kernel.support();
    let cell_range = match profile.support() {
        Some((a, b)) => Some(((a * w).floor() as i64 - 1, (b * w).ceil() as i64)),
        None if kernel.is_compact() => None,
        None => {
            return Err(invalid("unbounded profiles need a compactly supported kernel"));
        }
    };
    let mut out = Vec::with_capacity(nodes.len());
    let mut cache: Option<(i64, Vec<f64>)> = None;
    for &t in nodes {
        let wt = w * t;
        let mut from = (wt - hi).ceil() as i64;
        let mut to = (wt - lo).floor() as i64;
        if let Some((kmin, kmax)) = cell_range {
            from = from.max(kmin);
            to = to.min(kmax);
        }
        if from > to {
            out.push(0.0);
            continue;
        }
        // Cell means are shared between nodes; keep a growing window of them.
        let need = |c: &Option<(i64, Vec<f64>)>| match c {
            Some((start, v)) => from < *start || to >= start + v.len() as i64,
            None => true,
        };
        if need(&cache) {
            let (start, end) = match &cache {
                Some((s, v)) => ((*s).min(from), (s + v.len() as i64).max(to + 1)),
                None => (from, to + 1),
            };
            let means = (start..end)
                .map(|k| w * profile.integral(k as f64 / w, (k + 1) as f64 / w))
                .collect();
            cache = Some((start, means));
        }
        let (start, means) = cache.as_ref().expect("filled above");
        let mut acc = 0.0;
        for k in from..=to {
            let chi = kernel.eval(wt - k as f64);
            if chi != 0.0 {
                acc += chi * means[(k - start) as usize];
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Grid values of `f` and `K_w f` on an `eval_grid x eval_grid` tensor grid.
#[derive(Debug, Clone)]
pub struct GridSample {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub f: Vec<f64>,
    pub approx: Vec<f64>,
}

impl GridSample {
    pub fn cell_area(&self) -> f64 {
        let step = |v: &[f64]| if v.len() > 1 { v[1] - v[0] } else { 1.0 };
        step(&self.x1) * step(&self.x2)
    }
}

pub fn sample_operator(f: &SyntheticFunction, w: f64, kernel: &ProductKernel, eval_grid: usize) -> Result<GridSample> {
    if !(w.is_finite() && w > 0.0) {
        return Err(invalid(format!("sampling rate w must be positive, got {w}")));
    }
    if eval_grid < 2 {
        return Err(invalid(format!("evaluation grid needs at least 2 nodes per axis, got {eval_grid}")));
    }
    let [k1, k2] = kernel.factors();
    let x1 = axis_nodes(f.support_box[0], margin_for(f.support_box[0]), eval_grid);
    let x2 = axis_nodes(f.support_box[1], margin_for(f.support_box[1]), eval_grid);
    let a1 = operator_1d(&f.factors[0], w, k1, &x1)?;
    let a2 = operator_1d(&f.factors[1], w, k2, &x2)?;
    let p1: Vec<f64> = x1.iter().map(|&t| f.factors[0].eval(t)).collect();
    let p2: Vec<f64> = x2.iter().map(|&t| f.factors[1].eval(t)).collect();
    let n = eval_grid;
    let mut fv = Vec::with_capacity(n * n);
    let mut av = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            fv.push(p1[i] * p2[j]);
            av.push(a1[i] * a2[j]);
        }
    }
    Ok(GridSample { x1, x2, f: fv, approx: av })
}

/// `max |K_w f - f|` over the evaluation grid.
pub fn sup_error(f: &SyntheticFunction, w: f64, kernel: &ProductKernel, eval_grid: usize) -> Result<f64> {
    let s = sample_operator(f, w, kernel, eval_grid)?;
    Ok(s.f.iter().zip(&s.approx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Sup error restricted to grid points at least `distance` away from every
/// breakpoint of the profiles along both axes.
pub fn sup_error_away_from_breaks(
    f: &SyntheticFunction,
    w: f64,
    kernel: &ProductKernel,
    eval_grid: usize,
    distance: f64,
) -> Result<f64> {
    let s = sample_operator(f, w, kernel, eval_grid)?;
    let far = |t: f64, p: &Profile| p.breakpoints().iter().all(|b| (t - b).abs() >= distance);
    let n = eval_grid;
    let mut worst = 0.0f64;
    for i in 0..n {
        if !far(s.x1[i], &f.factors[0]) {
            continue;
        }
        for j in 0..n {
            if far(s.x2[j], &f.factors[1]) {
                worst = worst.max((s.f[i * n + j] - s.approx[i * n + j]).abs());
            }
        }
    }
    Ok(worst)
}

/// `L^2` error by grid quadrature.
pub fn l2_error(f: &SyntheticFunction, w: f64, kernel: &ProductKernel, eval_grid: usize) -> Result<f64> {
    let s = sample_operator(f, w, kernel, eval_grid)?;
    let sum: f64 = s.f.iter().zip(&s.approx).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sum * s.cell_area()).sqrt())
}

/// Continuous SSIM with the normalized Lebesgue measure on the grid box.
pub fn cssim(f: &[f64], g: &[f64], c1: f64, c2: f64) -> f64 {
    let n = f.len() as f64;
    let mf = f.iter().sum::<f64>() / n;
    let mg = g.iter().sum::<f64>() / n;
    let (mut vf, mut vg, mut cov) = (0.0, 0.0, 0.0);
    for (a, b) in f.iter().zip(g) {
        let (da, db) = (a - mf, b - mg);
        vf += da * da;
        vg += db * db;
        cov += da * db;
    }
    let (vf, vg, cov) = (vf / n, vg / n, cov / n);
    ((2.0 * mf * mg + c1) * (2.0 * cov + c2)) / ((mf * mf + mg * mg + c1) * (vf + vg + c2))
}

/// Relative size of the cSSIM stabilizers: `c = CSSIM_STABILIZER * max|f|^2`.
pub const CSSIM_STABILIZER: f64 = 1e-4;

/// `1 - cSSIM(f, K_w f)` with stabilizers `scale * 1e-4 * max|f|^2`.
pub fn cssim_dissimilarity(
    f: &SyntheticFunction,
    w: f64,
    kernel: &ProductKernel,
    eval_grid: usize,
    stabilizer_scale: f64,
) -> Result<f64> {
    let s = sample_operator(f, w, kernel, eval_grid)?;
    let peak = s.f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let c = stabilizer_scale * CSSIM_STABILIZER * peak * peak;
    Ok(1.0 - cssim(&s.f, &s.approx, c, c))
}

/// Sup error by direct 2-D summation over cells, with cell means from
/// tensor Gauss-Legendre quadrature of `f` split at the breakpoints. Needs a
/// compactly supported kernel.
pub fn sup_error_direct(f: &SyntheticFunction, w: f64, kernel: &ProductKernel, eval_grid: usize) -> Result<f64> {
    let [k1, k2] = kernel.factors();
    if !(k1.is_compact() && k2.is_compact()) {
        return Err(invalid("direct summation needs a compactly supported kernel"));
    }
    let x1 = axis_nodes(f.support_box[0], margin_for(f.support_box[0]), eval_grid);
    let x2 = axis_nodes(f.support_box[1], margin_for(f.support_box[1]), eval_grid);
    let cell_mean = |j1: i64, j2: i64| {
        let pieces = |j: i64, p: &Profile| {
            let (a, b) = (j as f64 / w, (j + 1) as f64 / w);
            let mut cuts = vec![a];
            cuts.extend(p.breakpoints().into_iter().filter(|&t| t > a && t < b));
            cuts.push(b);
            cuts
        };
        let c1 = pieces(j1, &f.factors[0]);
        let c2 = pieces(j2, &f.factors[1]);
        let mut acc = 0.0;
        for s1 in c1.windows(2) {
            for s2 in c2.windows(2) {
                acc += gauss_legendre8(
                    |u| gauss_legendre8(|v| f.eval(u, v), s2[0], s2[1]),
                    s1[0],
                    s1[1],
                );
            }
        }
        acc * w * w
    };
    let ((lo1, hi1), (lo2, hi2)) = (k1.support(), k2.support());
    let mut worst = 0.0f64;
    for &a in &x1 {
        for &b in &x2 {
            let mut acc = 0.0;
            for j1 in (w * a - hi1).ceil() as i64..=(w * a - lo1).floor() as i64 {
                let c1 = k1.eval(w * a - j1 as f64);
                if c1 == 0.0 {
                    continue;
                }
                for j2 in (w * b - hi2).ceil() as i64..=(w * b - lo2).floor() as i64 {
                    let c2 = k2.eval(w * b - j2 as f64);
                    if c2 != 0.0 {
                        acc += c1 * c2 * cell_mean(j1, j2);
                    }
                }
            }
            worst = worst.max((acc - f.eval(a, b)).abs());
        }
    }
    Ok(worst)
}

/// Least-squares line through `(ln w, ln error)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub w_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate(w_values: &[f64], errors: &[f64]) -> Result<RateFit> {
    if w_values.len() != errors.len() {
        return Err(invalid("w values and errors differ in length"));
    }
    if w_values.len() < 4 {
        return Err(invalid(format!("need at least 4 points to fit a rate, got {}", w_values.len())));
    }
    if let Some(&bad) = errors.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::NonPositiveError(bad));
    }
    if let Some(&bad) = w_values.iter().find(|&&w| !(w > 0.0)) {
        return Err(invalid(format!("w values must be positive, got {bad}")));
    }
    let xs: Vec<f64> = w_values.iter().map(|w| w.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("w values must not all be equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(RateFit {
        w_values: w_values.to_vec(),
        errors: errors.to_vec(),
        slope,
        intercept,
        r_squared,
    })
}

/// Geometric sequence `start, 2 start, ...` of `count` rates.
pub fn doubling(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * 2f64.powi(i as i32)).collect()
}

/// Grid used by the sup-norm suites.
pub const SUP_GRID: usize = 257;
/// Grid used by the L^2 and cSSIM suites.
pub const FINE_GRID: usize = 1025;

fn errors_over(ws: &[f64], mut err: impl FnMut(f64) -> Result<f64>) -> Result<Vec<f64>> {
    ws.iter().map(|&w| err(w)).collect()
}

/// One asserted fit of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCheck {
    pub suite: Suite,
    pub case: String,
    pub fit: RateFit,
    pub expected: String,
    pub passed: bool,
}

/// Sup-norm rate of a Lipschitz cap under the order-3 B-spline,
/// `w = 8 .. 128`; expected slope `-alpha +- 0.15`.
pub fn verify_lipschitz_rate(alpha: f64) -> Result<RateCheck> {
    let f = SyntheticFunction::lipschitz(alpha, 1.0)?;
    let kernel = ProductKernel::bspline(3)?;
    let ws = doubling(8.0, 5);
    let errs = errors_over(&ws, |w| sup_error(&f, w, &kernel, SUP_GRID))?;
    let fit = fit_rate(&ws, &errs)?;
    let passed = (fit.slope + alpha).abs() <= 0.15;
    Ok(RateCheck {
        suite: Suite::Lipschitz,
        case: format!("{f}, B-spline s=3, sup norm"),
        expected: format!("slope {:.2} +- 0.15", -alpha),
        fit,
        passed,
    })
}

/// Jackson `s = 1` on the tent, `w = 16 .. 256`: `err w / ln w` must stay
/// within a factor 2 across the range.
pub fn verify_logw_rate() -> Result<(RateCheck, f64)> {
    let f = SyntheticFunction::lipschitz(1.0, 1.0)?;
    let kernel = ProductKernel::jackson(1)?;
    let ws = doubling(16.0, 5);
    let errs = errors_over(&ws, |w| sup_error(&f, w, &kernel, SUP_GRID))?;
    let fit = fit_rate(&ws, &errs)?;
    let spread = log_bound_spread(&ws, &errs);
    Ok((
        RateCheck {
            suite: Suite::Logw,
            case: format!("{f}, Jackson s=1, sup norm"),
            expected: "err * w / ln w within a factor 2".to_owned(),
            passed: spread <= 2.0,
            fit,
        },
        spread,
    ))
}

/// `max / min` of `err w / ln w`.
pub fn log_bound_spread(ws: &[f64], errs: &[f64]) -> f64 {
    let c: Vec<f64> = ws.iter().zip(errs).map(|(w, e)| e * w / w.ln()).collect();
    let max = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = c.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Test function for the cSSIM check at order `alpha`: the tent for
/// `alpha = 1`, the square indicator (in `Lip(1/2, 2)`) for `alpha = 1/2`.
pub fn cssim_test_function(alpha: f64) -> Result<SyntheticFunction> {
    if alpha == 1.0 {
        SyntheticFunction::lipschitz(1.0, 1.0)
    } else if alpha == 0.5 {
        Ok(SyntheticFunction::indicator())
    } else {
        Err(invalid(format!("no cSSIM test function for alpha = {alpha}")))
    }
}

/// Slope of `1 - cSSIM(f, K_w f)`; expected `-2 alpha +- 0.3`.
pub fn verify_cssim_decay(alpha: f64, stabilizer_scale: f64) -> Result<RateCheck> {
    let f = cssim_test_function(alpha)?;
    let kernel = ProductKernel::bspline(3)?;
    let ws = doubling(8.0, 5);
    let errs = errors_over(&ws, |w| cssim_dissimilarity(&f, w, &kernel, FINE_GRID, stabilizer_scale))?;
    let fit = fit_rate(&ws, &errs)?;
    let passed = (fit.slope + 2.0 * alpha).abs() <= 0.3;
    Ok(RateCheck {
        suite: Suite::Cssim,
        case: format!("{f}, B-spline s=3, 1 - cSSIM (stabilizer x{stabilizer_scale})"),
        expected: format!("slope {:.2} +- 0.3", -2.0 * alpha),
        fit,
        passed,
    })
}

/// `L^2` rate of the tent under the order-3 B-spline; expected `-1 +- 0.15`.
pub fn verify_lp_rate() -> Result<RateCheck> {
    let f = SyntheticFunction::lipschitz(1.0, 1.0)?;
    let kernel = ProductKernel::bspline(3)?;
    let ws = doubling(8.0, 5);
    let errs = errors_over(&ws, |w| l2_error(&f, w, &kernel, FINE_GRID))?;
    let fit = fit_rate(&ws, &errs)?;
    let passed = (fit.slope + 1.0).abs() <= 0.15;
    Ok(RateCheck {
        suite: Suite::Lp,
        case: format!("{f}, B-spline s=3, L2 norm"),
        expected: "slope -1.00 +- 0.15".to_owned(),
        fit,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lipschitz,
    Logw,
    Cssim,
    Lp,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lipschitz => "lipschitz",
            Self::Logw => "logw",
            Self::Cssim => "cssim",
            Self::Lp => "lp",
        }
    }

    pub fn run(self) -> Result<Vec<RateCheck>> {
        Ok(match self {
            Self::Lipschitz => vec![verify_lipschitz_rate(1.0)?, verify_lipschitz_rate(0.5)?],
            Self::Logw => vec![verify_logw_rate()?.0],
            Self::Cssim => vec![verify_cssim_decay(1.0, 1.0)?, verify_cssim_decay(0.5, 1.0)?],
            Self::Lp => vec![verify_lp_rate()?],
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lipschitz" => Ok(Self::Lipschitz),
            "logw" => Ok(Self::Logw),
            "cssim" => Ok(Self::Cssim),
            "lp" => Ok(Self::Lp),
            _ => Err(invalid(format!("unknown suite {s:?} (lipschitz, logw, cssim, lp)"))),
        }
    }
}

/// One row per `(check, w)`: `suite,case,w,error,slope,intercept,r_squared,expected,passed`.
pub fn write_rate_csv<W: Write>(writer: W, checks: &[RateCheck]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["suite", "case", "w", "error", "slope", "intercept", "r_squared", "expected", "passed"])?;
    for c in checks {
        for (w, e) in c.fit.w_values.iter().zip(&c.fit.errors) {
            out.write_record([
                c.suite.name().to_owned(),
                c.case.clone(),
                format!("{w}"),
                format!("{e:.6e}"),
                format!("{:.6}", c.fit.slope),
                format!("{:.6}", c.fit.intercept),
                format!("{:.6}", c.fit.r_squared),
                c.expected.clone(),
                c.passed.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
