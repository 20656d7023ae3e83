//! Scaling pipelines: Down-Up (half size, filter, back) and Up-Down
//! (double size, filter, back).

use super::FilterSpec;
use crate::error::Result;
use crate::image::GrayImage;
use crate::resample::Resampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    DownUp,
    UpDown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineSpec {
    pub direction: Direction,
    /// Resampler of the shrinking step.
    pub down: Resampler,
    pub filter: FilterSpec,
    /// Resampler of the enlarging step.
    pub up: Resampler,
}

impl PipelineSpec {
    pub fn down_up(down: Resampler, filter: FilterSpec, up: Resampler) -> Self {
        Self {
            direction: Direction::DownUp,
            down,
            filter,
            up,
        }
    }

    pub fn up_down(up: Resampler, filter: FilterSpec, down: Resampler) -> Self {
        Self {
            direction: Direction::UpDown,
            down,
            filter,
            up,
        }
    }

    /// Label in the paper's style, e.g. `bic+NLM+sk`.
    pub fn label(&self) -> String {
        let (first, second) = match self.direction {
            Direction::DownUp => (self.down.label(), self.up.label()),
            Direction::UpDown => (self.up.label(), self.down.label()),
        };
        let suffix = if self.direction == Direction::UpDown { " (up-down)" } else { "" };
        format!("{first}+{}+{second}{suffix}", self.filter.kind)
    }
}

/// Runs the pipeline. Odd sizes are floor-halved on the way down and the
/// result always has the input's exact size.
pub fn run_pipeline(image: &GrayImage, spec: &PipelineSpec) -> Result<GrayImage> {
    let (w, h) = image.dims();
    match spec.direction {
        Direction::DownUp => {
            let small = spec.down.resize(image, (w / 2).max(1), (h / 2).max(1))?;
            let filtered = spec.filter.apply(&small)?;
            spec.up.resize(&filtered, w, h)
        }
        Direction::UpDown => {
            let large = spec.up.resize(image, 2 * w, 2 * h)?;
            let filtered = spec.filter.apply(&large)?;
            spec.down.resize(&filtered, w, h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::despeckle::{add_speckle, FilterKind, SpeckleParams};
    use crate::metrics::roi_stats;
    use crate::resample::bilinear_resize;
    use crate::Roi;

    #[test]
    fn plumbing_with_identity_filter() {
        let img = GrayImage::from_fn(20, 14, |r, c| ((r * 13 + c * 7) % 200) as f64).unwrap();
        let spec = PipelineSpec::down_up(
            Resampler::Bilinear,
            FilterSpec::new(FilterKind::Mean).with_window(1),
            Resampler::Bilinear,
        );
        let out = run_pipeline(&img, &spec).unwrap();
        let expect = bilinear_resize(&bilinear_resize(&img, 10, 7).unwrap(), 20, 14).unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn odd_sizes_come_back_exactly() {
        let img = GrayImage::filled(21, 15, 50.0).unwrap();
        for spec in [
            PipelineSpec::down_up(Resampler::Bicubic, FilterSpec::new(FilterKind::Median), Resampler::Bilinear),
            PipelineSpec::up_down(Resampler::Bilinear, FilterSpec::new(FilterKind::Mean), Resampler::Bicubic),
        ] {
            assert_eq!(run_pipeline(&img, &spec).unwrap().dims(), (21, 15));
        }
    }

    #[test]
    fn down_up_raises_enl_on_flat_phantom() {
        let clean = GrayImage::filled(96, 96, 120.0).unwrap();
        let noisy = add_speckle(&clean, &SpeckleParams::new(0.05, 21).unwrap()).unwrap();
        let roi = Roi::new(24, 24, 48, 48).unwrap();
        let enl = |img: &GrayImage| {
            let (m, s) = roi_stats(img, &roi).unwrap();
            (m / s).powi(2)
        };
        let sk = Resampler::default_sk().unwrap();
        for kind in FilterKind::ALL {
            let f = FilterSpec::new(kind);
            let direct = f.apply(&noisy).unwrap();
            let piped = run_pipeline(&noisy, &PipelineSpec::down_up(Resampler::Bicubic, f, sk)).unwrap();
            assert!(enl(&piped) > enl(&direct), "{kind}: {} vs {}", enl(&piped), enl(&direct));
            assert!(enl(&direct) > enl(&noisy), "{kind}");
        }
    }

    #[test]
    fn labels() {
        let sk = Resampler::default_sk().unwrap();
        let spec = PipelineSpec::down_up(Resampler::Bicubic, FilterSpec::new(FilterKind::Nlm), sk);
        assert_eq!(spec.label(), "bic+NLM+sk");
    }
}
