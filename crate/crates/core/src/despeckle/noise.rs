//! Multiplicative speckle simulation and global noise-level estimation.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeckleParams {
    /// Variance `v` of the mean-1 multiplicative noise.
    pub variance: f64,
    pub seed: u64,
}

impl SpeckleParams {
    pub fn new(variance: f64, seed: u64) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(invalid(format!("speckle variance must be positive, got {variance}")));
        }
        Ok(Self { variance, seed })
    }
}

/// `clamp(I (1 + u))` with `u` uniform on `[-sqrt(3v), sqrt(3v)]`, drawn in
/// raster order from a seeded ChaCha8 stream (the `imnoise` speckle model).
pub fn add_speckle(image: &GrayImage, params: &SpeckleParams) -> Result<GrayImage> {
    let params = SpeckleParams::new(params.variance, params.seed)?;
    let half_width = (3.0 * params.variance).sqrt();
    let dist = Uniform::new_inclusive(-half_width, half_width);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pixels = image
        .pixels()
        .iter()
        .map(|&v| v * (1.0 + dist.sample(&mut rng)))
        .collect();
    GrayImage::from_clamped(image.width(), image.height(), pixels)
}

/// Side of the tiles used by [`estimate_noise_cv2`].
pub const NOISE_TILE: usize = 7;

/// Relative noise variance (squared coefficient of variation) estimated as
/// the median of per-tile `(std / mean)^2` over the lowest-variance tenth of
/// non-overlapping 7x7 tiles. Tiles with zero mean are skipped.
pub fn estimate_noise_cv2(image: &GrayImage) -> f64 {
    let t = NOISE_TILE.min(image.width()).min(image.height());
    let mut tiles: Vec<(f64, f64)> = Vec::new();
    for r0 in (0..=image.height() - t).step_by(t) {
        for c0 in (0..=image.width() - t).step_by(t) {
            let n = (t * t) as f64;
            let (mut s, mut s2) = (0.0, 0.0);
            for r in r0..r0 + t {
                for &v in &image.row(r)[c0..c0 + t] {
                    s += v;
                    s2 += v * v;
                }
            }
            let mean = s / n;
            if mean <= 0.0 {
                continue;
            }
            let var = (s2 / n - mean * mean).max(0.0);
            tiles.push((var, var / (mean * mean)));
        }
    }
    if tiles.is_empty() {
        return 0.0;
    }
    tiles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let keep = (tiles.len() / 10).max(1);
    let mut cv2: Vec<f64> = tiles[..keep].iter().map(|t| t.1).collect();
    cv2.sort_by(f64::total_cmp);
    let mid = cv2.len() / 2;
    if cv2.len() % 2 == 1 {
        cv2[mid]
    } else {
        0.5 * (cv2[mid - 1] + cv2[mid])
    }
}

/// Squared coefficient of variation of the whole image.
pub fn global_cv2(image: &GrayImage) -> f64 {
    let mean = image.mean();
    if mean == 0.0 {
        return 0.0;
    }
    let var = image.pixels().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / image.len() as f64;
    var / (mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_image_stays_zero() {
        let z = GrayImage::filled(16, 16, 0.0).unwrap();
        let out = add_speckle(&z, &SpeckleParams::new(0.05, 3).unwrap()).unwrap();
        assert!(out.pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_image_statistics() {
        let c = GrayImage::filled(256, 256, 128.0).unwrap();
        let out = add_speckle(&c, &SpeckleParams::new(0.05, 11).unwrap()).unwrap();
        let mean = out.mean();
        assert!((126.0..=130.0).contains(&mean), "{mean}");
        let rel: Vec<f64> = out.pixels().iter().map(|v| v / 128.0 - 1.0).collect();
        let m = rel.iter().sum::<f64>() / rel.len() as f64;
        let var = rel.iter().map(|u| (u - m) * (u - m)).sum::<f64>() / rel.len() as f64;
        assert!((var - 0.05).abs() <= 0.15 * 0.05, "{var}");
    }

    #[test]
    fn seeded_noise_is_deterministic() {
        let img = GrayImage::from_fn(20, 10, |r, c| (r * 10 + c) as f64).unwrap();
        let p = SpeckleParams::new(0.05, 42).unwrap();
        assert_eq!(add_speckle(&img, &p).unwrap(), add_speckle(&img, &p).unwrap());
        let q = SpeckleParams::new(0.05, 43).unwrap();
        assert_ne!(add_speckle(&img, &p).unwrap(), add_speckle(&img, &q).unwrap());
        assert!(SpeckleParams::new(0.0, 1).is_err());
    }

    #[test]
    fn noise_has_unit_mean_in_expectation() {
        // The 200-sample mean has standard error 0.0158 I, so a 1-level
        // tolerance is a 3-sigma bound only for I <= 20.
        let img = GrayImage::from_fn(12, 12, |r, c| 5.0 + r as f64 + 0.3 * c as f64).unwrap();
        let mut acc = vec![0.0; img.len()];
        for seed in 0..200 {
            let out = add_speckle(&img, &SpeckleParams::new(0.05, seed).unwrap()).unwrap();
            for (a, v) in acc.iter_mut().zip(out.pixels()) {
                *a += v / 200.0;
            }
        }
        for (a, v) in acc.iter().zip(img.pixels()) {
            assert!((a - v).abs() <= 1.0, "{a} vs {v}");
        }
    }

    #[test]
    fn noise_estimate_recovers_variance_on_flat_image() {
        let c = GrayImage::filled(128, 128, 100.0).unwrap();
        let out = add_speckle(&c, &SpeckleParams::new(0.05, 5).unwrap()).unwrap();
        let est = estimate_noise_cv2(&out);
        assert!((est - 0.05).abs() < 0.02, "{est}");
        assert_eq!(estimate_noise_cv2(&c), 0.0);
    }
}
