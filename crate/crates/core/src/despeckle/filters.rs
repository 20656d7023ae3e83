//! Windowed despeckling filters. Borders are handled by edge replication.

use rayon::prelude::*;

use super::noise::{estimate_noise_cv2, global_cv2};
use crate::error::{invalid, Result};
use crate::image::GrayImage;

pub(crate) fn check_window(window: usize) -> Result<()> {
    if window == 0 || window % 2 == 0 {
        return Err(invalid(format!("window must be odd and positive, got {window}")));
    }
    Ok(())
}

/// Per-pixel box mean with edge replication, computed separably.
fn box_mean(data: &[f64], width: usize, height: usize, window: usize) -> Vec<f64> {
    let half = (window / 2) as isize;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let mut horiz = vec![0.0; data.len()];
    for r in 0..height {
        let line = &data[r * width..(r + 1) * width];
        for c in 0..width {
            horiz[r * width + c] = (-half..=half)
                .map(|d| line[clamp(c as isize + d, width)])
                .sum();
        }
    }
    let norm = (window * window) as f64;
    let mut out = vec![0.0; data.len()];
    for r in 0..height {
        for c in 0..width {
            let s: f64 = (-half..=half)
                .map(|d| horiz[clamp(r as isize + d, height) * width + c])
                .sum();
            out[r * width + c] = s / norm;
        }
    }
    out
}

/// Local mean and (population) variance over each window.
fn local_moments(image: &GrayImage, window: usize) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = image.dims();
    let mean = box_mean(image.pixels(), w, h, window);
    let squares: Vec<f64> = image.pixels().iter().map(|v| v * v).collect();
    let mean_sq = box_mean(&squares, w, h, window);
    let var = mean
        .iter()
        .zip(&mean_sq)
        .map(|(m, s)| (s - m * m).max(0.0))
        .collect();
    (mean, var)
}

fn window_values(image: &GrayImage, row: usize, col: usize, half: isize, buf: &mut Vec<f64>) {
    buf.clear();
    for dr in -half..=half {
        for dc in -half..=half {
            buf.push(image.get_replicated(row as isize + dr, col as isize + dc));
        }
    }
}

fn map_pixels(image: &GrayImage, f: impl Fn(usize, usize, &mut Vec<f64>) -> f64 + Sync) -> Result<GrayImage> {
    let (w, h) = image.dims();
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(r, line)| {
        let mut buf = Vec::new();
        for (c, slot) in line.iter_mut().enumerate() {
            *slot = f(r, c, &mut buf);
        }
    });
    GrayImage::from_clamped(w, h, out)
}

pub fn mean_filter(image: &GrayImage, window: usize) -> Result<GrayImage> {
    check_window(window)?;
    if window == 1 {
        return Ok(image.clone());
    }
    let (w, h) = image.dims();
    GrayImage::from_clamped(w, h, box_mean(image.pixels(), w, h, window))
}

pub fn median_filter(image: &GrayImage, window: usize) -> Result<GrayImage> {
    check_window(window)?;
    let half = (window / 2) as isize;
    map_pixels(image, |r, c, buf| {
        window_values(image, r, c, half, buf);
        let mid = buf.len() / 2;
        *buf.select_nth_unstable_by(mid, f64::total_cmp).1
    })
}

/// Lee filter with the relative noise variance estimated from the image.
pub fn lee_filter(image: &GrayImage, window: usize) -> Result<GrayImage> {
    lee_filter_with(image, window, estimate_noise_cv2(image))
}

/// Lee filter with an explicit relative noise variance `noise_cv2`:
///
/// `var_x = (var + m^2) / (noise_cv2 + 1) - m^2`,
/// `K = var_x / (m^2 noise_cv2 + var_x)`, output `m + K (I - m)`,
/// with `var_x` clamped at 0 and `K` to `[0, 1]`.
pub fn lee_filter_with(image: &GrayImage, window: usize, noise_cv2: f64) -> Result<GrayImage> {
    check_window(window)?;
    if !(noise_cv2.is_finite() && noise_cv2 >= 0.0) {
        return Err(invalid(format!("noise variance must be non-negative, got {noise_cv2}")));
    }
    let (mean, var) = local_moments(image, window);
    let (w, h) = image.dims();
    let out = image
        .pixels()
        .iter()
        .zip(mean.iter().zip(&var))
        .map(|(&v, (&m, &s2))| {
            let var_x = ((s2 + m * m) / (noise_cv2 + 1.0) - m * m).max(0.0);
            let denom = m * m * noise_cv2 + var_x;
            let k = if denom > 0.0 { (var_x / denom).clamp(0.0, 1.0) } else { 0.0 };
            m + k * (v - m)
        })
        .collect();
    GrayImage::from_clamped(w, h, out)
}

/// Frost filter with the global squared coefficient of variation of the
/// input as the reference noise level.
pub fn frost_filter(image: &GrayImage, window: usize) -> Result<GrayImage> {
    frost_filter_with(image, window, global_cv2(image))
}

/// Frost filter: per-window weights `exp(-alpha |t|)` normalized to sum 1,
/// `|t|` the city-block distance to the centre and
/// `alpha = 4 / (N cv2_ref) * var_loc / mean_loc^2`, with `N` the number of
/// pixels in the window. Flat or zero-mean windows get uniform weights.
pub fn frost_filter_with(image: &GrayImage, window: usize, cv2_ref: f64) -> Result<GrayImage> {
    check_window(window)?;
    if !(cv2_ref.is_finite() && cv2_ref >= 0.0) {
        return Err(invalid(format!("reference variation must be non-negative, got {cv2_ref}")));
    }
    let (mean, var) = local_moments(image, window);
    let half = (window / 2) as isize;
    let n = (window * window) as f64;
    let w = image.width();
    map_pixels(image, |r, c, buf| {
        window_values(image, r, c, half, buf);
        let (m, s2) = (mean[r * w + c], var[r * w + c]);
        let alpha = if m > 0.0 && s2 > 0.0 && cv2_ref > 0.0 {
            4.0 / (n * cv2_ref) * s2 / (m * m)
        } else {
            0.0
        };
        let (mut num, mut den) = (0.0, 0.0);
        let mut idx = 0;
        for dr in -half..=half {
            for dc in -half..=half {
                let weight = (-alpha * (dr.abs() + dc.abs()) as f64).exp();
                num += weight * buf[idx];
                den += weight;
                idx += 1;
            }
        }
        num / den
    })
}
