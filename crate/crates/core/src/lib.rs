//! Sampling Kantorovich operators for grayscale image reconstruction.
//!
//! The crate covers rescaling with SK operators ([`resample`]), gap filling
//! by linear prediction with shifted B-spline kernels ([`gapfill`]), speckle
//! simulation and despeckling filters with the Down-Up pipeline
//! ([`despeckle`]), image-quality indexes ([`metrics`]) and empirical
//! convergence-rate checks for the operators ([`convergence`]).

pub mod cli;
pub mod convergence;
pub mod despeckle;
pub mod error;
pub mod gapfill;
pub mod image;
pub mod io;
pub mod kernels;
pub mod metrics;
pub mod quadrature;
pub mod resample;

pub use crate::error::{Error, Result};
pub use crate::image::{GapMask, GrayImage, Plane, Roi};
pub use crate::kernels::{KernelKind, ProductKernel, UnivariateKernel};
