//! Speckle simulation, despeckling filters and the Down-Up / Up-Down
//! scaling pipelines.

mod filters;
mod nlm;
mod noise;
mod pipeline;

pub use filters::{frost_filter, frost_filter_with, lee_filter, lee_filter_with, mean_filter, median_filter};
pub use nlm::{estimate_noise_sigma, nlm_filter, NlmParams};
pub use noise::{add_speckle, estimate_noise_cv2, global_cv2, SpeckleParams, NOISE_TILE};
pub use pipeline::{run_pipeline, Direction, PipelineSpec};

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Mean,
    Median,
    Frost,
    Lee,
    Nlm,
}

impl FilterKind {
    pub const ALL: [FilterKind; 5] = [Self::Mean, Self::Median, Self::Frost, Self::Lee, Self::Nlm];

    pub fn default_window(self) -> usize {
        match self {
            Self::Frost => 5,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Median => "median",
            Self::Frost => "Frost",
            Self::Lee => "Lee",
            Self::Nlm => "NLM",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            "frost" => Ok(Self::Frost),
            "lee" => Ok(Self::Lee),
            "nlm" => Ok(Self::Nlm),
            _ => Err(invalid(format!("unknown filter {s:?} (mean, median, frost, lee, nlm)"))),
        }
    }
}

/// A filter and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Local window side for mean, median, Lee and Frost.
    pub window: usize,
    pub nlm: NlmParams,
    /// Overrides the estimated relative noise variance: the Lee noise term,
    /// the Frost reference variation and (as `sqrt(v) * mean`) the NLM
    /// noise level.
    pub noise_cv2: Option<f64>,
}

impl FilterSpec {
    pub fn new(kind: FilterKind) -> Self {
        Self {
            kind,
            window: kind.default_window(),
            nlm: NlmParams::default(),
            noise_cv2: None,
        }
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn apply(&self, image: &GrayImage) -> Result<GrayImage> {
        match self.kind {
            FilterKind::Mean => mean_filter(image, self.window),
            FilterKind::Median => median_filter(image, self.window),
            FilterKind::Frost => match self.noise_cv2 {
                Some(v) => frost_filter_with(image, self.window, v),
                None => frost_filter(image, self.window),
            },
            FilterKind::Lee => match self.noise_cv2 {
                Some(v) => lee_filter_with(image, self.window, v),
                None => lee_filter(image, self.window),
            },
            FilterKind::Nlm => {
                let mut p = self.nlm;
                if let (None, Some(v)) = (p.sigma, self.noise_cv2) {
                    p.sigma = Some(v.max(0.0).sqrt() * image.mean());
                }
                nlm_filter(image, &p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn every_filter_fixes_constants() {
        for value in [0.0, 1.0, 128.0, 255.0] {
            let c = GrayImage::filled(24, 20, value).unwrap();
            for kind in FilterKind::ALL {
                let out = FilterSpec::new(kind).apply(&c).unwrap();
                for v in out.pixels() {
                    assert!((v - value).abs() < 1e-9, "{kind} on {value}: {v}");
                }
            }
        }
    }

    #[test]
    fn filter_names_parse() {
        for kind in FilterKind::ALL {
            assert_eq!(kind.name().parse::<FilterKind>().unwrap(), kind);
        }
        assert!("gauss".parse::<FilterKind>().is_err());
    }

    fn noisy_scene(seed: u64) -> GrayImage {
        let clean = GrayImage::from_fn(40, 36, |r, c| {
            if (r / 9 + c / 7) % 2 == 0 { 60.0 } else { 180.0 }
        })
        .unwrap();
        add_speckle(&clean, &SpeckleParams::new(0.05, seed).unwrap()).unwrap()
    }

    fn spec(kind: FilterKind) -> FilterSpec {
        let mut s = FilterSpec::new(kind);
        s.noise_cv2 = Some(0.05);
        s.nlm.search = 7;
        s.nlm.sigma = Some(25.0);
        s
    }

    #[test]
    fn outputs_stay_within_window_range() {
        let img = noisy_scene(3);
        for kind in FilterKind::ALL {
            let s = spec(kind);
            let out = s.apply(&img).unwrap();
            let half = if kind == FilterKind::Nlm { s.nlm.search / 2 } else { s.window / 2 } as isize;
            for r in 0..img.height() as isize {
                for c in 0..img.width() as isize {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for dr in -half..=half {
                        for dc in -half..=half {
                            let v = img.get_replicated(r + dr, c + dc);
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    let v = out.get(r as usize, c as usize);
                    assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "{kind} at ({r},{c})");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn filters_commute_with_translation(dr in 0usize..4, dc in 0usize..4, seed in 0u64..50) {
            let img = noisy_scene(seed);
            let (w, h) = img.dims();
            let shifted = GrayImage::from_fn(w - dc, h - dr, |r, c| img.get(r + dr, c + dc)).unwrap();
            for kind in FilterKind::ALL {
                let s = spec(kind);
                let a = s.apply(&img).unwrap();
                let b = s.apply(&shifted).unwrap();
                // Pixels whose whole footprint avoids both borders.
                let m = if kind == FilterKind::Nlm { s.nlm.search / 2 + s.nlm.patch / 2 } else { s.window / 2 };
                for r in m..h - dr - m {
                    for c in m..w - dc - m {
                        prop_assert_eq!(a.get(r + dr, c + dc), b.get(r, c), "{}", kind);
                    }
                }
            }
        }
    }
}
