//! Grayscale rasters as step functions, gap masks and regions of interest.
//!
//! Geometry: the continuous coordinate `x` runs down the rows and `y` across
//! the columns. The pixel in 0-based row `r`, column `c` is the value of the
//! step function on the cell `(r, r + 1] x (c, c + 1]`, and the function is
//! zero outside `[0, height] x [0, width]`.

use std::fmt;

use crate::error::{invalid, Error, Result};

pub const MAX_INTENSITY: f64 = 255.0;

/// Row-major grayscale image with intensities in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    /// Validates dimensions and that every value is a finite intensity.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if let Some((index, &value)) = pixels
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=MAX_INTENSITY).contains(*v)))
        {
            return Err(Error::InvalidPixel { index, value });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Like [`GrayImage::new`] but clamps every value into `[0, 255]`.
    /// Non-finite values are rejected.
    pub fn from_clamped(width: usize, height: usize, mut pixels: Vec<f64>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        for (index, v) in pixels.iter_mut().enumerate() {
            if v.is_nan() {
                return Err(Error::InvalidPixel { index, value: *v });
            }
            *v = clamp_intensity(*v);
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image from `f(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(invalid("rows have unequal lengths"));
        }
        Self::new(width, height, rows.concat())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Value with rows and columns clamped into range (edge replication).
    pub fn get_replicated(&self, row: isize, col: isize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c)
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    /// Sets one pixel; the value must be a valid intensity.
    pub fn set(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        let index = row * self.width + col;
        if !(value.is_finite() && (0.0..=MAX_INTENSITY).contains(&value)) {
            return Err(Error::InvalidPixel { index, value });
        }
        self.pixels[index] = value;
        Ok(())
    }

    pub fn transposed(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for c in 0..self.width {
            for r in 0..self.height {
                pixels.push(self.get(r, c));
            }
        }
        Self {
            width: self.height,
            height: self.width,
            pixels,
        }
    }

    /// Copy of the sub-rectangle described by `roi`.
    pub fn crop(&self, roi: &Roi) -> Result<Self> {
        roi.check_inside(self.width, self.height)?;
        let mut pixels = Vec::with_capacity(roi.w * roi.h);
        for r in roi.y0..roi.y0 + roi.h {
            pixels.extend_from_slice(&self.row(r)[roi.x0..roi.x0 + roi.w]);
        }
        Ok(Self {
            width: roi.w,
            height: roi.h,
            pixels,
        })
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// Step-function value `I(x, y)`: the pixel whose half-open cell
    /// `(r, r + 1] x (c, c + 1]` contains the point, 0 outside the raster.
    pub fn step_value(&self, x: f64, y: f64) -> f64 {
        match (cell_index(x, self.height), cell_index(y, self.width)) {
            (Some(r), Some(c)) => self.get(r, c),
            _ => 0.0,
        }
    }

    /// Exact mean of the step function over
    /// `[k1 / w, (k1 + 1) / w] x [k2 / w, (k2 + 1) / w]`.
    pub fn cell_mean(&self, k1: i64, k2: i64, w: f64) -> f64 {
        let rows = axis_overlaps(k1, w, self.height);
        let cols = axis_overlaps(k2, w, self.width);
        if rows.is_empty() || cols.is_empty() {
            return 0.0;
        }
        let mut acc = 0.0;
        for &(r, lr) in &rows {
            let line = self.row(r);
            let partial: f64 = cols.iter().map(|&(c, lc)| line[c] * lc).sum();
            acc += lr * partial;
        }
        acc * w * w
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(invalid(format!("image dimensions must be positive, got {width}x{height}")));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::DimensionMismatch {
            expected: (width, height),
            found: (len, 1),
        });
    }
    Ok(())
}

pub fn clamp_intensity(v: f64) -> f64 {
    v.clamp(0.0, MAX_INTENSITY)
}

fn cell_index(t: f64, n: usize) -> Option<usize> {
    if !(t > 0.0 && t <= n as f64) {
        return None;
    }
    Some(t.ceil() as usize - 1)
}

/// Pixels along one axis of length `n` that overlap `[k / w, (k + 1) / w]`,
/// with overlap lengths. Pixel `p` spans `[p, p + 1]`.
pub fn axis_overlaps(k: i64, w: f64, n: usize) -> Vec<(usize, f64)> {
    let lo = k as f64 / w;
    let hi = (k + 1) as f64 / w;
    let mut out = Vec::new();
    if hi <= 0.0 || lo >= n as f64 {
        return out;
    }
    let first = lo.max(0.0).floor() as usize;
    let last = (hi.min(n as f64).ceil() as usize).min(n);
    for p in first..last {
        let len = hi.min((p + 1) as f64) - lo.max(p as f64);
        if len > 0.0 {
            out.push((p, len));
        }
    }
    out
}

/// Unconstrained real-valued raster, used for results before clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn into_image(self) -> Result<GrayImage> {
        GrayImage::from_clamped(self.width, self.height, self.data)
    }
}

/// Missing-pixel mask; `true` marks a gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapMask {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl GapMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            flags: vec![false; width * height],
        }
    }

    pub fn new(width: usize, height: usize, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (flags.len(), 1),
            });
        }
        Ok(Self {
            width,
            height,
            flags,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_missing(&self, row: usize, col: usize) -> bool {
        self.flags[row * self.width + col]
    }

    pub fn set_missing(&mut self, row: usize, col: usize, missing: bool) {
        self.flags[row * self.width + col] = missing;
    }

    pub fn missing_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Missing positions as `(row, col)` in raster order.
    pub fn missing(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(i, _)| (i / w, i % w))
    }

    pub fn check_matches(&self, image: &GrayImage) -> Result<()> {
        if self.dims() != image.dims() {
            return Err(Error::DimensionMismatch {
                expected: image.dims(),
                found: self.dims(),
            });
        }
        Ok(())
    }

    /// Copy of `image` with gaps painted black, as in the test images.
    pub fn apply_black(&self, image: &GrayImage) -> Result<GrayImage> {
        self.check_matches(image)?;
        let pixels = image
            .pixels()
            .iter()
            .zip(&self.flags)
            .map(|(&v, &m)| if m { 0.0 } else { v })
            .collect();
        GrayImage::new(image.width(), image.height(), pixels)
    }
}

/// Axis-aligned rectangle: `x0` is the first column, `y0` the first row
/// (the `[x, y, w, h]` convention of the paper's ROI listings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Roi {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Roi {
    pub fn new(x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(invalid(format!("ROI size must be positive, got {w}x{h}")));
        }
        Ok(Self { x0, y0, w, h })
    }

    pub fn check_inside(&self, width: usize, height: usize) -> Result<()> {
        if self.w == 0 || self.h == 0 || self.x0 + self.w > width || self.y0 + self.h > height {
            return Err(Error::RoiOutOfBounds {
                roi: self.to_string(),
                width,
                height,
            });
        }
        Ok(())
    }

    pub fn transposed(&self) -> Self {
        Self {
            x0: self.y0,
            y0: self.x0,
            w: self.h,
            h: self.w,
        }
    }
}

impl fmt::Display for Roi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{}]", self.x0, self.y0, self.w, self.h)
    }
}

impl std::str::FromStr for Roi {
    type Err = Error;

    /// Parses `x,y,w,h` (optionally bracketed).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(str::trim)
            .collect();
        if parts.len() != 4 {
            return Err(invalid(format!("ROI must be x,y,w,h, got {s:?}")));
        }
        let mut v = [0usize; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| invalid(format!("ROI component {p:?} is not a non-negative integer")))?;
        }
        Roi::new(v[0], v[1], v[2], v[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_by_two() -> GrayImage {
        GrayImage::from_rows(&[vec![10.0, 20.0], vec![30.0, 40.0]]).unwrap()
    }

    #[test]
    fn step_function_examples() {
        let img = two_by_two();
        assert_eq!(img.step_value(0.5, 0.5), 10.0);
        assert_eq!(img.step_value(-1.0, -1.0), 0.0);
        assert_eq!(img.step_value(1.0, 1.0), 10.0);
        assert_eq!(img.step_value(1.5, 0.5), 30.0);
        assert_eq!(img.step_value(0.5, 1.5), 20.0);
        assert_eq!(img.step_value(0.0, 0.5), 0.0);
        assert_eq!(img.step_value(2.0, 2.0), 40.0);
        assert_eq!(img.step_value(2.0001, 1.0), 0.0);
    }

    #[test]
    fn rejects_out_of_range_pixels() {
        assert!(matches!(
            GrayImage::new(2, 1, vec![0.0, 256.0]),
            Err(Error::InvalidPixel { index: 1, .. })
        ));
        assert!(GrayImage::new(1, 1, vec![f64::NAN]).is_err());
        assert!(GrayImage::new(0, 1, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0.0; 3]).is_err());
        let c = GrayImage::from_clamped(2, 1, vec![-3.0, 300.0]).unwrap();
        assert_eq!(c.pixels(), &[0.0, 255.0]);
    }

    #[test]
    fn cell_mean_examples() {
        let c = GrayImage::filled(7, 5, 42.0).unwrap();
        for &(k1, k2, w) in &[(0, 0, 1.0), (3, 4, 1.7), (10, 2, 3.0)] {
            assert!((c.cell_mean(k1, k2, w) - 42.0).abs() < 1e-12);
        }
        let one = GrayImage::filled(1, 1, 100.0).unwrap();
        assert_eq!(one.cell_mean(0, 0, 2.0), 100.0);
        let two = GrayImage::from_rows(&[vec![0.0], vec![255.0]]).unwrap();
        assert!((two.cell_mean(1, 0, 1.5) - 127.5).abs() < 1e-12);
        assert_eq!(two.cell_mean(-5, 0, 1.0), 0.0);
        // Cell straddling the border sees zero outside.
        assert!((one.cell_mean(0, 0, 0.5) - 100.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn cell_mean_at_unit_rate_is_the_pixel() {
        let img = GrayImage::from_fn(5, 4, |r, c| (r * 17 + c * 31) as f64 % 256.0).unwrap();
        for r in 0..4 {
            for c in 0..5 {
                assert_eq!(img.cell_mean(r as i64, c as i64, 1.0), img.get(r, c));
            }
        }
    }

    #[test]
    fn cell_means_integrate_to_pixel_sum() {
        let img = GrayImage::from_fn(9, 6, |r, c| ((r * 7 + c * 13) % 19) as f64 * 10.0).unwrap();
        let total: f64 = img.pixels().iter().sum();
        for w in [1.0, 1.5, 2.0] {
            let kmax = (w * 10.0) as i64 + 2;
            let mut acc = 0.0;
            for k1 in -2..kmax {
                for k2 in -2..kmax {
                    acc += img.cell_mean(k1, k2, w) / (w * w);
                }
            }
            assert!((acc - total).abs() < 1e-9, "w={w}: {acc} vs {total}");
        }
    }

    #[test]
    fn roi_parsing_and_bounds() {
        let roi: Roi = "220,200,30,40".parse().unwrap();
        assert_eq!(roi, Roi { x0: 220, y0: 200, w: 30, h: 40 });
        assert_eq!("[1, 2, 3, 4]".parse::<Roi>().unwrap(), Roi::new(1, 2, 3, 4).unwrap());
        assert!("1,2,3".parse::<Roi>().is_err());
        assert!("1,2,0,4".parse::<Roi>().is_err());
        assert!(roi.check_inside(256, 256).is_ok());
        assert!(matches!(roi.check_inside(249, 256), Err(Error::RoiOutOfBounds { .. })));
        let img = GrayImage::from_fn(4, 3, |r, c| (r * 4 + c) as f64).unwrap();
        let crop = img.crop(&Roi::new(1, 1, 2, 2).unwrap()).unwrap();
        assert_eq!(crop.pixels(), &[5.0, 6.0, 9.0, 10.0]);
    }

    #[test]
    fn mask_basics() {
        let mut m = GapMask::empty(3, 2);
        m.set_missing(1, 2, true);
        m.set_missing(0, 1, true);
        assert_eq!(m.missing_count(), 2);
        assert_eq!(m.missing().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let img = GrayImage::filled(2, 3, 1.0).unwrap();
        assert!(m.check_matches(&img).is_err());
    }

    proptest! {
        #[test]
        fn cell_mean_is_linear(
            a in proptest::collection::vec(0.0f64..100.0, 20),
            b in proptest::collection::vec(0.0f64..100.0, 20),
            alpha in 0.0f64..1.2,
            beta in 0.0f64..1.2,
            k1 in -2i64..8,
            k2 in -2i64..10,
            w in 0.3f64..3.0,
        ) {
            let ia = GrayImage::new(5, 4, a.clone()).unwrap();
            let ib = GrayImage::new(5, 4, b.clone()).unwrap();
            let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
            let im = GrayImage::new(5, 4, mix).unwrap();
            let lhs = im.cell_mean(k1, k2, w);
            let rhs = alpha * ia.cell_mean(k1, k2, w) + beta * ib.cell_mean(k1, k2, w);
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()) * 10.0);
        }

        #[test]
        fn transpose_swaps_step_function_arguments(x in -1.0f64..6.0, y in -1.0f64..6.0) {
            let img = GrayImage::from_fn(5, 3, |r, c| (r * 5 + c) as f64).unwrap();
            prop_assert_eq!(img.step_value(x, y), img.transposed().step_value(y, x));
        }
    }
}
