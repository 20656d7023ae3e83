//! Non-local means.
//!
//! Each pixel becomes a weighted average of the pixels in its search window,
//! weighted by `exp(-max(d^2 - 2 sigma^2, 0) / h^2)` where `d^2` is the mean
//! squared difference of the surrounding patches. Patches use edge
//! replication; candidates outside the image are skipped.

use rayon::prelude::*;

use super::filters::check_window;
use super::noise::estimate_noise_cv2;
use crate::error::{invalid, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlmParams {
    pub patch: usize,
    pub search: usize,
    /// Noise standard deviation in gray levels; estimated when `None`.
    pub sigma: Option<f64>,
    /// Smoothing strength; defaults to the noise standard deviation.
    pub h: Option<f64>,
}

impl Default for NlmParams {
    fn default() -> Self {
        Self {
            patch: 5,
            search: 21,
            sigma: None,
            h: None,
        }
    }
}

/// Noise standard deviation in gray levels: the relative noise level times
/// the mean intensity.
pub fn estimate_noise_sigma(image: &GrayImage) -> f64 {
    estimate_noise_cv2(image).sqrt() * image.mean()
}

pub fn nlm_filter(image: &GrayImage, params: &NlmParams) -> Result<GrayImage> {
    check_window(params.patch)?;
    check_window(params.search)?;
    if params.patch > params.search {
        return Err(invalid(format!(
            "patch {} is larger than search window {}",
            params.patch, params.search
        )));
    }
    let sigma = match params.sigma {
        Some(s) if s.is_finite() && s >= 0.0 => s,
        Some(s) => return Err(invalid(format!("noise sigma must be non-negative, got {s}"))),
        None => estimate_noise_sigma(image),
    };
    let h = params.h.unwrap_or(sigma);
    if !(h.is_finite() && h >= 0.0) {
        return Err(invalid(format!("smoothing h must be non-negative, got {h}")));
    }

    let (w, h_img) = image.dims();
    let ph = (params.patch / 2) as isize;
    let sh = (params.search / 2) as isize;
    // Replicated padding wide enough for any patch of any candidate.
    let pad = ph + sh;
    let pw = w + 2 * pad as usize;
    let ph_rows = h_img + 2 * pad as usize;
    let mut padded = vec![0.0; pw * ph_rows];
    for r in 0..ph_rows {
        for c in 0..pw {
            padded[r * pw + c] = image.get_replicated(r as isize - pad, c as isize - pad);
        }
    }
    let at = |r: isize, c: isize| padded[(r + pad) as usize * pw + (c + pad) as usize];
    let patch_n = (params.patch * params.patch) as f64;
    let offset2 = 2.0 * sigma * sigma;
    let inv_h2 = if h > 0.0 { 1.0 / (h * h) } else { f64::INFINITY };

    let mut out = vec![0.0; w * h_img];
    out.par_chunks_mut(w).enumerate().for_each(|(row, line)| {
        let row = row as isize;
        let mut num = vec![0.0; w];
        let mut den = vec![0.0; w];
        // Column sums of squared differences over the patch rows, for the
        // padded columns one candidate offset needs.
        let span = w + 2 * ph as usize;
        let mut colsum = vec![0.0; span];
        for dr in -sh..=sh {
            let cand_row = row + dr;
            if cand_row < 0 || cand_row >= h_img as isize {
                continue;
            }
            for dc in -sh..=sh {
                for (j, slot) in colsum.iter_mut().enumerate() {
                    let c = j as isize - ph;
                    let mut s = 0.0;
                    for pr in -ph..=ph {
                        let d = at(row + pr, c) - at(cand_row + pr, c + dc);
                        s += d * d;
                    }
                    *slot = s;
                }
                for col in 0..w {
                    // Summed afresh rather than slid, so the result does not
                    // depend on the column's position in the row.
                    let window: f64 = colsum[col..col + params.patch].iter().sum();
                    let cand_col = col as isize + dc;
                    if cand_col < 0 || cand_col >= w as isize {
                        continue;
                    }
                    let d2 = (window / patch_n).max(0.0);
                    let excess = (d2 - offset2).max(0.0);
                    let weight = if excess == 0.0 { 1.0 } else { (-excess * inv_h2).exp() };
                    num[col] += weight * image.get(cand_row as usize, cand_col as usize);
                    den[col] += weight;
                }
            }
        }
        for ((slot, n), d) in line.iter_mut().zip(&num).zip(&den) {
            *slot = n / d;
        }
    });
    GrayImage::from_clamped(w, h_img, out)
}
