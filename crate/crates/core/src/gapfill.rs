//! Gap filling by linear prediction with SK operators (LP-SK).
//!
//! A missing pixel at 0-based position `(nu, mu)` is predicted by evaluating
//! the SK operator with the product of two shifted B-splines at the point
//! `x = (nu, mu)`, the top-left corner of the missing pixel's cell. The
//! shifted kernel vanishes below 1, so every contributing cell index `k`
//! satisfies `k_i < w x_i - 1` and its cell lies strictly above and to the
//! left of the point: only already-scanned data is used.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::image::{axis_overlaps, clamp_intensity, GapMask, GrayImage};
use crate::kernels::UnivariateKernel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapFillParams {
    pub w: f64,
    /// Order of the B-spline.
    pub s: u32,
    /// Rows of past data a prediction may read.
    pub window_rows: usize,
    /// Columns of past data a prediction may read.
    pub window_cols: usize,
}

impl Default for GapFillParams {
    fn default() -> Self {
        Self {
            w: 40.0,
            s: 9,
            window_rows: 10,
            window_cols: 10,
        }
    }
}

impl GapFillParams {
    /// Window of `s + 1` rows and columns, the most the kernel support can
    /// reach at unit node spacing.
    pub fn new(w: f64, s: u32) -> Result<Self> {
        let p = Self {
            w,
            s,
            window_rows: s as usize + 1,
            window_cols: s as usize + 1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w.is_finite() && self.w > 0.0) {
            return Err(invalid(format!("sampling rate w must be positive, got {}", self.w)));
        }
        if self.s == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if self.window_rows == 0 || self.window_cols == 0 {
            return Err(invalid("prediction window must be at least 1x1"));
        }
        Ok(())
    }
}

/// One cell of the prediction sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTerm {
    pub k1: i64,
    pub k2: i64,
    pub weight: f64,
    pub cell_mean: f64,
    /// Pixels `(row, col)` the cell overlaps.
    pub pixels: Vec<(usize, usize)>,
}

/// The cells used to predict `(nu, mu)`, after excluding cells that leave
/// the image or the window or touch a pixel for which `pending` is true.
pub fn prediction_terms(
    image: &GrayImage,
    nu: usize,
    mu: usize,
    params: &GapFillParams,
    pending: &dyn Fn(usize, usize) -> bool,
) -> Result<Vec<PredictionTerm>> {
    params.validate()?;
    let kernel = UnivariateKernel::shifted_bspline(params.s)?;
    let w = params.w;
    let ks = |t: usize, window: usize, n: usize| -> Vec<(i64, f64, Vec<(usize, f64)>)> {
        let wx = w * t as f64;
        let (lo, hi) = kernel.support();
        let mut out = Vec::new();
        let from = (wx - hi).floor() as i64;
        let to = (wx - lo).ceil() as i64;
        let first_allowed = t as f64 - window as f64;
        for k in from..=to {
            let chi = kernel.eval(wx - k as f64);
            if chi == 0.0 {
                continue;
            }
            let (a, b) = (k as f64 / w, (k + 1) as f64 / w);
            // Whole cell inside the raster and the window.
            if a < 0.0 || b > n as f64 || a < first_allowed || b > t as f64 {
                continue;
            }
            out.push((k, chi, axis_overlaps(k, w, n)));
        }
        out
    };
    let rows = ks(nu, params.window_rows, image.height());
    let cols = ks(mu, params.window_cols, image.width());
    let mut terms = Vec::new();
    for (k1, chi1, rov) in &rows {
        for (k2, chi2, cov) in &cols {
            let pixels: Vec<(usize, usize)> = rov
                .iter()
                .flat_map(|&(r, _)| cov.iter().map(move |&(c, _)| (r, c)))
                .collect();
            if pixels.iter().any(|&(r, c)| pending(r, c)) {
                continue;
            }
            terms.push(PredictionTerm {
                k1: *k1,
                k2: *k2,
                weight: chi1 * chi2,
                cell_mean: image.cell_mean(*k1, *k2, w),
                pixels,
            });
        }
    }
    Ok(terms)
}

fn combine(terms: &[PredictionTerm], nu: usize, mu: usize) -> Result<f64> {
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    if total <= 0.0 {
        return Err(Error::PredictionImpossible { row: nu, col: mu });
    }
    let acc: f64 = terms.iter().map(|t| t.weight * t.cell_mean).sum();
    Ok(acc / total)
}

/// Prediction for `(nu, mu)` from a gap-free image, renormalized by the
/// used weights but not clamped.
pub fn lp_sk_predict_unclamped(image: &GrayImage, nu: usize, mu: usize, params: &GapFillParams) -> Result<f64> {
    let terms = prediction_terms(image, nu, mu, params, &|_, _| false)?;
    combine(&terms, nu, mu)
}

/// Prediction for `(nu, mu)`, clamped to `[0, 255]`.
pub fn lp_sk_predict(image: &GrayImage, nu: usize, mu: usize, params: &GapFillParams) -> Result<f64> {
    lp_sk_predict_unclamped(image, nu, mu, params).map(clamp_intensity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FillReport {
    pub predicted: usize,
    /// Gaps with no usable past, filled from the nearest valid pixel.
    pub fallbacks: usize,
}

/// What happened at one gap, for inspection.
#[derive(Debug)]
pub struct FillEvent<'a> {
    pub row: usize,
    pub col: usize,
    pub terms: &'a [PredictionTerm],
    /// Gaps not yet filled when this one was processed.
    pub pending: &'a GapMask,
    pub value: f64,
    pub fallback: bool,
}

pub fn lp_sk_fill(image: &GrayImage, mask: &GapMask, params: &GapFillParams) -> Result<GrayImage> {
    lp_sk_fill_observed(image, mask, params, |_| {}).map(|(img, _)| img)
}

pub fn lp_sk_fill_with_report(image: &GrayImage, mask: &GapMask, params: &GapFillParams) -> Result<(GrayImage, FillReport)> {
    lp_sk_fill_observed(image, mask, params, |_| {})
}

/// Fills gaps in raster order; each filled value is available to later
/// predictions. `observe` sees every gap as it is filled.
pub fn lp_sk_fill_observed(
    image: &GrayImage,
    mask: &GapMask,
    params: &GapFillParams,
    mut observe: impl FnMut(&FillEvent<'_>),
) -> Result<(GrayImage, FillReport)> {
    params.validate()?;
    mask.check_matches(image)?;
    let gaps = mask.missing_count();
    if gaps == 0 {
        return Ok((image.clone(), FillReport::default()));
    }
    if gaps == image.len() {
        return Err(invalid("every pixel is missing; nothing to predict from"));
    }
    let mut out = image.clone();
    let mut pending = mask.clone();
    let mut report = FillReport::default();
    let width = image.width();
    for (row, col) in mask.missing() {
        let terms = {
            let p = &pending;
            prediction_terms(&out, row, col, params, &|r, c| p.is_missing(r, c))?
        };
        let (value, fallback) = match combine(&terms, row, col) {
            Ok(v) => (clamp_intensity(v), false),
            Err(Error::PredictionImpossible { .. }) => (nearest_valid(&out, &pending, row * width + col), true),
            Err(e) => return Err(e),
        };
        observe(&FillEvent {
            row,
            col,
            terms: &terms,
            pending: &pending,
            value,
            fallback,
        });
        out.set(row, col, value)?;
        pending.set_missing(row, col, false);
        if fallback {
            report.fallbacks += 1;
        } else {
            report.predicted += 1;
        }
    }
    Ok((out, report))
}

// Closest available pixel before `index` in raster order, else after it.
fn nearest_valid(image: &GrayImage, pending: &GapMask, index: usize) -> f64 {
    let flags = pending.flags();
    let before = (0..index).rev().find(|&i| !flags[i]);
    let after = || (index + 1..flags.len()).find(|&i| !flags[i]);
    let i = before.or_else(after).expect("at least one pixel is present");
    image.pixels()[i]
}

/// Uniformly random gaps: exactly `round(fraction * width * height)`
/// distinct pixels, deterministic for a seed.
pub fn generate_random_gaps(width: usize, height: usize, fraction: f64, seed: u64) -> Result<GapMask> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid(format!("gap fraction must lie in (0, 1), got {fraction}")));
    }
    let n = width * height;
    let count = (fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flags = vec![false; n];
    for i in sample(&mut rng, n, count) {
        flags[i] = true;
    }
    GapMask::new(width, height, flags)
}
