//! Expected maxima of Hölder Gaussian processes and fractional Brownian
//! motion: exact path sampling, Monte Carlo estimation, closed-form bounds,
//! Gaussian comparison inequalities and the fractional-calculus
//! representation of Wiener integrals.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common case.

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod frac_calculus;
pub mod gauss_inequalities;
pub mod kernels;
pub mod numeric;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use estimator::{estimate_expected_max, estimate_gaps, GapEstimate, MaxEstimate};
pub use experiments::{Experiment, ExperimentConfig, ExperimentOutput};
pub use frac_calculus::{GridFunction, WienerKernel};
pub use gauss_inequalities::{ChainingNets, FiniteGaussian};
pub use kernels::{
    Family, FredholmKernel, HolderCertificate, HolderConstants, ProcessSpec, ProcessSpecFile,
};
pub use sampling::{PathBatch, PathSampler};
pub use scalar::Scalar;

pub type ProcessSpec64 = ProcessSpec<f64>;
pub type ProcessSpec32 = ProcessSpec<f32>;
pub type PathSampler64 = PathSampler<f64>;
pub type PathSampler32 = PathSampler<f32>;
pub type PathBatch64 = PathBatch<f64>;
pub type PathBatch32 = PathBatch<f32>;
pub type MaxEstimate64 = MaxEstimate<f64>;
pub type MaxEstimate32 = MaxEstimate<f32>;
pub type GapEstimate64 = GapEstimate<f64>;
pub type GridFunction64 = GridFunction<f64>;
pub type FredholmKernel64 = FredholmKernel<f64>;
pub type FiniteGaussian64 = FiniteGaussian<f64>;
pub type HolderCertificate64 = HolderCertificate<f64>;
