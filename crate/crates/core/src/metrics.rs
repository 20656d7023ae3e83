//! With-reference (MSE, PSNR, SSIM) and without-reference (SI, SSI, SMPI,
//! ENL) quality indexes, and report emission.
//!
//! Without-reference indexes read the `sigma` of their usual formulas as
//! the ROI variance wherever it appears under a square root, so `SI` is the
//! coefficient of variation and `ENL = (mean / std)^2`. All variances are
//! population variances.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::image::{GrayImage, Roi, MAX_INTENSITY};

pub const SSIM_C1: f64 = (0.01 * MAX_INTENSITY) * (0.01 * MAX_INTENSITY);
pub const SSIM_C2: f64 = (0.03 * MAX_INTENSITY) * (0.03 * MAX_INTENSITY);
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;

fn check_same_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    Ok(())
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_same_dims(a, b)?;
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

/// PSNR in dB with peak 255; `+inf` for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (MAX_INTENSITY / mse.sqrt()).log10()
    }
}

fn ssim_formula(mu_a: f64, mu_b: f64, var_a: f64, var_b: f64, cov: f64) -> f64 {
    ((2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2))
}

/// SSIM from the global means, variances and covariance of the two images.
pub fn ssim_global(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_same_dims(a, b)?;
    let n = a.len() as f64;
    let mu_a = a.mean();
    let mu_b = b.mean();
    let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.pixels().iter().zip(b.pixels()) {
        let (dx, dy) = (x - mu_a, y - mu_b);
        va += dx * dx;
        vb += dy * dy;
        cov += dx * dy;
    }
    Ok(ssim_formula(mu_a, mu_b, va / n, vb / n, cov / n))
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut g = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    for (i, v) in g.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = g.iter().sum();
    g.map(|v| v / total)
}

// Separable "valid" correlation with the Gaussian window.
fn gaussian_valid(data: &[f64], width: usize, height: usize) -> (Vec<f64>, usize, usize) {
    let g = gaussian_window();
    let ow = width + 1 - SSIM_WINDOW;
    let oh = height + 1 - SSIM_WINDOW;
    let mut tmp = vec![0.0; ow * height];
    for r in 0..height {
        let line = &data[r * width..(r + 1) * width];
        for c in 0..ow {
            tmp[r * ow + c] = g.iter().zip(&line[c..c + SSIM_WINDOW]).map(|(w, v)| w * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = g
                .iter()
                .enumerate()
                .map(|(i, w)| w * tmp[(r + i) * ow + c])
                .sum();
        }
    }
    (out, ow, oh)
}

/// Mean local SSIM over all positions where the 11x11 Gaussian window
/// (sigma 1.5) fits inside the image.
pub fn ssim_windowed(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_same_dims(a, b)?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall(format!(
            "windowed SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let pa = a.pixels();
    let pb = b.pixels();
    let sq = |p: &[f64]| p.iter().map(|v| v * v).collect::<Vec<_>>();
    let cross: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| x * y).collect();
    let (mu_a, ow, oh) = gaussian_valid(pa, w, h);
    let (mu_b, _, _) = gaussian_valid(pb, w, h);
    let (ea2, _, _) = gaussian_valid(&sq(pa), w, h);
    let (eb2, _, _) = gaussian_valid(&sq(pb), w, h);
    let (eab, _, _) = gaussian_valid(&cross, w, h);
    let total: f64 = (0..ow * oh)
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            ssim_formula(ma, mb, ea2[i] - ma * ma, eb2[i] - mb * mb, eab[i] - ma * mb)
        })
        .sum();
    Ok(total / (ow * oh) as f64)
}

/// Mean and population standard deviation over a ROI.
pub fn roi_stats(image: &GrayImage, roi: &Roi) -> Result<(f64, f64)> {
    let crop = image.crop(roi)?;
    let mean = crop.mean();
    let var = crop.pixels().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / crop.len() as f64;
    Ok((mean, var.sqrt()))
}

/// Without-reference indexes of one ROI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeckleIndexes {
    pub si: f64,
    pub ssi: f64,
    pub smpi: f64,
    pub enl: f64,
}

/// The four indexes from ROI statistics `(mean, std)` of the noisy and
/// despeckled images.
pub fn speckle_indexes_from_stats(noisy: (f64, f64), despeckled: (f64, f64)) -> Result<SpeckleIndexes> {
    let (mean_n, std_n) = noisy;
    let (mean_d, std_d) = despeckled;
    if std_n == 0.0 {
        return Err(Error::UndefinedMetric("noisy ROI has zero variance"));
    }
    if mean_n == 0.0 {
        return Err(Error::UndefinedMetric("noisy ROI has zero mean"));
    }
    let si = if std_d == 0.0 {
        0.0
    } else if mean_d == 0.0 {
        return Err(Error::UndefinedMetric("despeckled ROI has zero mean"));
    } else {
        std_d / mean_d
    };
    let si_n = std_n / mean_n;
    Ok(SpeckleIndexes {
        si,
        ssi: si / si_n,
        smpi: (1.0 + (mean_n - mean_d).abs()) * (std_d / std_n),
        enl: if std_d == 0.0 {
            f64::INFINITY
        } else {
            (mean_d / std_d).powi(2)
        },
    })
}

pub fn speckle_indexes(noisy: &GrayImage, despeckled: &GrayImage, roi: &Roi) -> Result<SpeckleIndexes> {
    check_same_dims(noisy, despeckled)?;
    speckle_indexes_from_stats(roi_stats(noisy, roi)?, roi_stats(despeckled, roi)?)
}

/// Every index for one processed image.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub experiment: String,
    pub image: String,
    pub method: String,
    pub mse: Option<f64>,
    pub psnr: Option<f64>,
    pub ssim_windowed: Option<f64>,
    pub ssim_global: Option<f64>,
    pub rois: Vec<(Roi, SpeckleIndexes)>,
}

impl MetricsReport {
    /// Computes the with-reference indexes when `reference` is given and the
    /// speckle indexes for each ROI when `noisy` is given.
    pub fn compute(
        experiment: &str,
        image: &str,
        method: &str,
        output: &GrayImage,
        reference: Option<&GrayImage>,
        noisy: Option<&GrayImage>,
        rois: &[Roi],
    ) -> Result<Self> {
        let mut report = Self {
            experiment: experiment.to_owned(),
            image: image.to_owned(),
            method: method.to_owned(),
            mse: None,
            psnr: None,
            ssim_windowed: None,
            ssim_global: None,
            rois: Vec::new(),
        };
        if let Some(reference) = reference {
            let m = mse(reference, output)?;
            report.mse = Some(m);
            report.psnr = Some(psnr_from_mse(m));
            report.ssim_global = Some(ssim_global(reference, output)?);
            report.ssim_windowed = match ssim_windowed(reference, output) {
                Ok(v) => Some(v),
                Err(Error::ImageTooSmall(_)) => None,
                Err(e) => return Err(e),
            };
        }
        if let Some(noisy) = noisy {
            check_same_dims(noisy, output)?;
            for roi in rois {
                let (n, d) = (roi_stats(noisy, roi)?, roi_stats(output, roi)?);
                let ix = match speckle_indexes_from_stats(n, d) {
                    // A flat noisy ROI leaves SSI and SMPI undefined, but SI
                    // and ENL depend on the output alone.
                    Err(Error::UndefinedMetric(_)) if n.1 == 0.0 || n.0 == 0.0 => {
                        let mut ix = speckle_indexes_from_stats((1.0, 1.0), d)?;
                        ix.ssi = f64::NAN;
                        ix.smpi = f64::NAN;
                        ix
                    }
                    other => other?,
                };
                report.rois.push((*roi, ix));
            }
        }
        Ok(report)
    }

    /// Flattened rows in the CSV schema; undefined (NaN) indexes are left out.
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        let mut push = |metric: &str, roi: String, value: f64| {
            if value.is_nan() {
                return;
            }
            rows.push(ReportRow {
                experiment: self.experiment.clone(),
                image: self.image.clone(),
                method: self.method.clone(),
                metric: metric.to_owned(),
                roi,
                value,
            })
        };
        for (name, v) in [
            ("MSE", self.mse),
            ("PSNR", self.psnr),
            ("SSIM", self.ssim_windowed),
            ("SSIM_global", self.ssim_global),
        ] {
            if let Some(v) = v {
                push(name, String::new(), v);
            }
        }
        for (i, (_, ix)) in self.rois.iter().enumerate() {
            let roi = format!("ROI{}", i + 1);
            push("SI", roi.clone(), ix.si);
            push("SSI", roi.clone(), ix.ssi);
            push("SMPI", roi.clone(), ix.smpi);
            push("ENL", roi, ix.enl);
        }
        rows
    }
}

/// One line of `experiment,image,method,metric,roi,value`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub image: String,
    pub method: String,
    pub metric: String,
    pub roi: String,
    pub value: f64,
}

pub const CSV_HEADER: [&str; 6] = ["experiment", "image", "method", "metric", "roi", "value"];

/// Infinite values are written as `inf`.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_owned()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{v:.6}")
    }
}

pub fn write_csv<W: Write>(writer: W, reports: &[MetricsReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in reports.iter().flat_map(MetricsReport::rows) {
        let value = format_value(row.value);
        w.write_record([
            row.experiment.as_str(),
            row.image.as_str(),
            row.method.as_str(),
            row.metric.as_str(),
            row.roi.as_str(),
            value.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Markdown table with one row per method, laid out like the paper's
/// comparison tables: PSNR, SSIM, then SI/SSI/SMPI/ENL for each ROI.
pub fn markdown_table(reports: &[MetricsReport]) -> String {
    let roi_count = reports.iter().map(|r| r.rois.len()).max().unwrap_or(0);
    let mut header = vec!["method".to_owned(), "PSNR".to_owned(), "SSIM".to_owned()];
    for metric in ["SI", "SSI", "SMPI", "ENL"] {
        for i in 0..roi_count {
            header.push(format!("{metric} ROI{}", i + 1));
        }
    }
    let mut by_method: BTreeMap<usize, &MetricsReport> = BTreeMap::new();
    for (i, r) in reports.iter().enumerate() {
        by_method.insert(i, r);
    }
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), format_cell);
    for r in by_method.values() {
        let mut cells = vec![r.method.clone(), cell(r.psnr), cell(r.ssim_windowed)];
        for pick in [
            |x: &SpeckleIndexes| x.si,
            |x: &SpeckleIndexes| x.ssi,
            |x: &SpeckleIndexes| x.smpi,
            |x: &SpeckleIndexes| x.enl,
        ] {
            for i in 0..roi_count {
                cells.push(cell(r.rois.get(i).map(|(_, ix)| pick(ix))));
            }
        }
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "-".to_owned()
    } else if v.is_infinite() {
        format_value(v)
    } else {
        format!("{v:.4}")
    }
}
