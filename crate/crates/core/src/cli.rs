//! Command-line front end: `rescale`, `gapfill`, `despeckle`, `convergence`.
//!
//! Parameters are validated before any pixel work. Diagnostics go to stderr;
//! images and reports only to the files named on the command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::convergence::{write_rate_csv, Suite};
use crate::despeckle::{add_speckle, run_pipeline, FilterKind, FilterSpec, PipelineSpec, SpeckleParams};
use crate::error::Error;
use crate::gapfill::{generate_random_gaps, lp_sk_fill_with_report, GapFillParams};
use crate::image::{GapMask, Roi};
use crate::io::{read_image, read_mask, write_image, write_mask};
use crate::kernels::ProductKernel;
use crate::metrics::{markdown_table, write_csv, MetricsReport};
use crate::resample::{sk_rescale, RescaleParams, Resampler};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "SKRECON_THREADS";

const PAPER_RESCALE_W: f64 = 15.0;
const PAPER_RESCALE_ORDER: u32 = 12;
const PAPER_VARIANCE: f64 = 0.05;
const PAPER_WINDOW: usize = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{} convergence check(s) failed:\n  {}", .0.len(), .0.join("\n  "))]
    SuiteFailed(Vec<String>),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "skrecon", version, about = "Image reconstruction with sampling Kantorovich operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rescale an image by a factor r with an SK operator.
    Rescale(RescaleArgs),
    /// Fill missing pixels by LP-SK prediction.
    Gapfill(GapfillArgs),
    /// Despeckle an image directly or through a scaling pipeline.
    Despeckle(DespeckleArgs),
    /// Run a convergence-rate verification suite.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelChoice {
    Bspline,
    Jackson,
}

#[derive(Debug, Args)]
pub struct RescaleArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Scale factor of the output size.
    #[arg(long)]
    pub r: f64,
    /// Sampling rate of the operator.
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelChoice>,
    /// Kernel order (default 12 for Jackson, 3 for B-spline).
    #[arg(long)]
    pub order: Option<u32>,
    /// w = 15 with the Jackson kernel of order 12, unless overridden.
    #[arg(long)]
    pub paper_defaults: bool,
}

#[derive(Debug, Args)]
pub struct GapfillArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Mask image: pixels darker than 128 are gaps.
    #[arg(long, conflicts_with_all = ["fraction", "seed"])]
    pub mask: Option<PathBuf>,
    /// Fraction of pixels to remove at random.
    #[arg(long, requires = "seed")]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Where to write the generated mask (default: `<output>_mask.<ext>`).
    #[arg(long)]
    pub mask_out: Option<PathBuf>,
    #[arg(long)]
    pub w: Option<f64>,
    /// B-spline order.
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub window_rows: Option<usize>,
    #[arg(long)]
    pub window_cols: Option<usize>,
    /// CSV report comparing the output with the input.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// w = 40 and s = 9, unless overridden.
    #[arg(long)]
    pub paper_defaults: bool,
}

#[derive(Debug, Args)]
pub struct DespeckleArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long)]
    pub filter: String,
    /// `direct`, or two resamplers `first,second` among sk, bil, bic.
    #[arg(long, default_value = "direct")]
    pub pipeline: String,
    /// Enlarge first and shrink back instead of shrinking first.
    #[arg(long)]
    pub up_down: bool,
    /// Speckle variance added to the input when no reference is given.
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Region of interest `x,y,w,h` (column, row, width, height); repeatable.
    #[arg(long = "roi")]
    pub rois: Vec<Roi>,
    /// Clean image; the input is then taken as already speckled.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// CSV report of every metric.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Markdown table of the same metrics.
    #[arg(long)]
    pub markdown: Option<PathBuf>,
    /// Also write the speckled input.
    #[arg(long)]
    pub noisy_out: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub patch: Option<usize>,
    #[arg(long)]
    pub search: Option<usize>,
    /// NLM smoothing strength in gray levels.
    #[arg(long)]
    pub h: Option<f64>,
    /// Relative noise variance, instead of estimating it.
    #[arg(long)]
    pub noise_cv2: Option<f64>,
    /// Sampling rate of the SK resampler.
    #[arg(long, default_value_t = PAPER_RESCALE_W)]
    pub sk_w: f64,
    /// Jackson order of the SK resampler.
    #[arg(long, default_value_t = PAPER_RESCALE_ORDER)]
    pub sk_order: u32,
    /// Experiment name in the report.
    #[arg(long, default_value = "despeckle")]
    pub experiment: String,
    /// Variance 0.05, window 3 and NLM patch 5 / search 21, unless overridden.
    #[arg(long)]
    pub paper_defaults: bool,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub suite: Suite,
    /// CSV of the fitted rates.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Rescale(a) => cmd_rescale(&a),
        Command::Gapfill(a) => cmd_gapfill(&a),
        Command::Despeckle(a) => cmd_despeckle(&a),
        Command::Convergence(a) => cmd_convergence(&a),
    }
}

/// Caps the global thread pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // A pool may already exist (tests); the cap then simply does not apply.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn required<T>(value: Option<T>, paper: Option<T>, flag: &str) -> CliResult<T> {
    value
        .or(paper)
        .ok_or_else(|| usage(format!("missing --{flag} (or pass --paper-defaults)")))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn sibling_mask_path(output: &Path) -> PathBuf {
    let ext = output.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "pgm".into());
    output.with_file_name(format!("{}_mask.{ext}", stem(output)))
}

fn write_report(path: &Path, reports: &[MetricsReport]) -> CliResult<()> {
    write_csv(BufWriter::new(File::create(path)?), reports)?;
    Ok(())
}

pub fn cmd_rescale(a: &RescaleArgs) -> CliResult<()> {
    let paper = a.paper_defaults;
    let w = required(a.w, paper.then_some(PAPER_RESCALE_W), "w")?;
    let kind = required(a.kernel, paper.then_some(KernelChoice::Jackson), "kernel")?;
    let kernel = match kind {
        KernelChoice::Jackson => ProductKernel::jackson(a.order.unwrap_or(PAPER_RESCALE_ORDER))?,
        KernelChoice::Bspline => ProductKernel::bspline(a.order.unwrap_or(3))?,
    };
    let params = RescaleParams::new(w, a.r, kernel)?;
    let image = read_image(&a.input)?;
    params.output_dims(image.width(), image.height())?;
    let out = sk_rescale(&image, &params)?;
    write_image(&out, &a.output)?;
    eprintln!(
        "rescaled {}x{} -> {}x{} (w = {w}, {kind:?} order {})",
        image.width(),
        image.height(),
        out.width(),
        out.height(),
        kernel.factors()[0].order()
    );
    Ok(())
}

pub fn cmd_gapfill(a: &GapfillArgs) -> CliResult<()> {
    let paper = GapFillParams::default();
    let pd = a.paper_defaults;
    let w = required(a.w, pd.then_some(paper.w), "w")?;
    let s = required(a.s, pd.then_some(paper.s), "s")?;
    let mut params = if pd { GapFillParams { w, s, ..paper } } else { GapFillParams::new(w, s)? };
    if let Some(r) = a.window_rows {
        params.window_rows = r;
    }
    if let Some(c) = a.window_cols {
        params.window_cols = c;
    }
    params.validate()?;
    if let Some(f) = a.fraction {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidParameter(format!("gap fraction must lie in [0, 1], got {f}")).into());
        }
    }

    let image = read_image(&a.input)?;
    let mask: GapMask = match (&a.mask, a.fraction, a.seed) {
        (Some(path), _, _) => {
            let m = read_mask(path)?;
            m.check_matches(&image)?;
            m
        }
        (None, Some(f), Some(seed)) => {
            let m = generate_random_gaps(image.width(), image.height(), f, seed)?;
            let path = a.mask_out.clone().unwrap_or_else(|| sibling_mask_path(&a.output));
            write_mask(&m, &path)?;
            m
        }
        _ => return Err(usage("give either --mask or --fraction with --seed")),
    };
    let damaged = mask.apply_black(&image)?;
    let (filled, report) = lp_sk_fill_with_report(&damaged, &mask, &params)?;
    write_image(&filled, &a.output)?;
    eprintln!(
        "filled {} of {} pixels ({} by fallback)",
        report.predicted + report.fallbacks,
        image.len(),
        report.fallbacks
    );
    if let Some(path) = &a.report {
        let method = format!("LP-SK w={} s={}", params.w, params.s);
        let r = MetricsReport::compute("gapfill", &stem(&a.input), &method, &filled, Some(&image), None, &[])?;
        write_report(path, &[r])?;
    }
    Ok(())
}

fn parse_resampler(name: &str, sk: Resampler) -> CliResult<Resampler> {
    match name.trim().to_ascii_lowercase().as_str() {
        "sk" => Ok(sk),
        "bil" | "bilinear" => Ok(Resampler::Bilinear),
        "bic" | "bicubic" => Ok(Resampler::Bicubic),
        other => Err(usage(format!("unknown resampler {other:?} (sk, bil, bic)"))),
    }
}

fn check_rois(rois: &[Roi], width: usize, height: usize) -> CliResult<()> {
    for (i, roi) in rois.iter().enumerate() {
        roi.check_inside(width, height)?;
        for other in &rois[..i] {
            let apart = roi.x0 >= other.x0 + other.w
                || other.x0 >= roi.x0 + roi.w
                || roi.y0 >= other.y0 + other.h
                || other.y0 >= roi.y0 + roi.h;
            if !apart {
                return Err(usage(format!("regions of interest {other} and {roi} overlap")));
            }
        }
    }
    Ok(())
}

pub fn cmd_despeckle(a: &DespeckleArgs) -> CliResult<()> {
    let kind: FilterKind = a.filter.parse()?;
    let mut filter = FilterSpec::new(kind);
    if a.paper_defaults && kind != FilterKind::Frost {
        filter.window = PAPER_WINDOW;
    }
    if let Some(w) = a.window {
        filter.window = w;
    }
    if let Some(p) = a.patch {
        filter.nlm.patch = p;
    }
    if let Some(s) = a.search {
        filter.nlm.search = s;
    }
    filter.nlm.h = a.h;
    filter.noise_cv2 = a.noise_cv2;
    let variance = a.variance.or((a.paper_defaults && a.reference.is_none()).then_some(PAPER_VARIANCE));

    let sk = Resampler::Sk {
        w: a.sk_w,
        kernel: ProductKernel::jackson(a.sk_order)?,
    };
    let pipeline = match a.pipeline.trim() {
        "direct" => None,
        spec => {
            let parts: Vec<&str> = spec.split(',').collect();
            let [first, second] = parts[..] else {
                return Err(usage(format!("pipeline must be `direct` or `first,second`, got {spec:?}")));
            };
            let (first, second) = (parse_resampler(first, sk)?, parse_resampler(second, sk)?);
            Some(if a.up_down {
                PipelineSpec::up_down(first, filter, second)
            } else {
                PipelineSpec::down_up(first, filter, second)
            })
        }
    };

    let input = read_image(&a.input)?;
    check_rois(&a.rois, input.width(), input.height())?;
    let (noisy, reference) = match (&a.reference, variance) {
        (Some(path), _) => {
            let r = read_image(path)?;
            if r.dims() != input.dims() {
                return Err(Error::DimensionMismatch { expected: input.dims(), found: r.dims() }.into());
            }
            (input, Some(r))
        }
        (None, Some(v)) => (add_speckle(&input, &SpeckleParams::new(v, a.seed)?)?, Some(input)),
        (None, None) => (input, None),
    };
    if let Some(path) = &a.noisy_out {
        write_image(&noisy, path)?;
    }

    let (output, method) = match &pipeline {
        Some(p) => (run_pipeline(&noisy, p)?, p.label()),
        None => (filter.apply(&noisy)?, kind.name().to_owned()),
    };
    write_image(&output, &a.output)?;

    let report = MetricsReport::compute(
        &a.experiment,
        &stem(&a.input),
        &method,
        &output,
        reference.as_ref(),
        Some(&noisy),
        &a.rois,
    )?;
    if let Some(p) = report.psnr {
        eprintln!("{method}: PSNR {p:.3} dB");
    }
    if let Some(path) = &a.report {
        write_report(path, std::slice::from_ref(&report))?;
    }
    if let Some(path) = &a.markdown {
        std::fs::write(path, markdown_table(std::slice::from_ref(&report)))?;
    }
    Ok(())
}

pub fn cmd_convergence(a: &ConvergenceArgs) -> CliResult<()> {
    let checks = a.suite.run()?;
    write_rate_csv(BufWriter::new(File::create(&a.out)?), &checks)?;
    let mut failed = Vec::new();
    for c in &checks {
        eprintln!(
            "{}: {}: slope {:.3} (expected {}){}",
            c.suite,
            c.case,
            c.fit.slope,
            c.expected,
            if c.passed { "" } else { " FAILED" }
        );
        if !c.passed {
            failed.push(format!("{}: slope {:.3}, expected {}", c.case, c.fit.slope, c.expected));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SuiteFailed(failed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_rois_are_rejected() {
        let a = Roi::new(0, 0, 10, 10).unwrap();
        let b = Roi::new(5, 5, 10, 10).unwrap();
        let c = Roi::new(10, 0, 5, 5).unwrap();
        assert!(check_rois(&[a, c], 20, 20).is_ok());
        assert!(check_rois(&[a, b], 20, 20).is_err());
        assert!(check_rois(&[Roi::new(15, 15, 10, 10).unwrap()], 20, 20).is_err());
    }

    #[test]
    fn pipelines_parse() {
        let sk = Resampler::default_sk().unwrap();
        assert_eq!(parse_resampler("bic", sk).unwrap(), Resampler::Bicubic);
        assert_eq!(parse_resampler("SK", sk).unwrap(), sk);
        assert!(parse_resampler("lanczos", sk).is_err());
    }

    #[test]
    fn unknown_suite_is_a_usage_error() {
        let r = run_from(["skrecon", "convergence", "--suite", "fast", "--out", "x.csv"]);
        assert!(matches!(r, Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_parameters_mention_paper_defaults() {
        let r = run_from(["skrecon", "rescale", "in.pgm", "out.pgm", "--r", "2"]);
        match r {
            Err(CliError::Usage(m)) => assert!(m.contains("--paper-defaults")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mask_path_sits_next_to_output() {
        assert_eq!(sibling_mask_path(Path::new("/tmp/out.png")), Path::new("/tmp/out_mask.png"));
        assert_eq!(sibling_mask_path(Path::new("filled")), Path::new("filled_mask.pgm"));
    }
}
