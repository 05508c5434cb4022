//! Hausdorff operators, their partial integrals `F_eps`, kernels and Fourier
//! multipliers, together with Hardy-space (`H^1`) norm estimates and the
//! numerical experiments built on them.
//!
//! The numerical core is generic over [`Real`] (implemented for `f32` and
//! `f64`); the aliases below fix the scalar to `f64`, which is what the
//! experiment runner and the file formats use.

pub mod error;
pub mod hardy;
pub mod hausdorff;
pub mod io;
pub mod quad;
pub mod scalar;
pub mod signal;
pub mod verify;
pub mod weights;

pub use error::{HausError, Result};
pub use scalar::Real;

pub type GridSpec = signal::GridSpec<f64>;
pub type SampledSignal = signal::SampledSignal<f64>;
pub type Spectrum = signal::Spectrum<f64>;
pub type AtomSpec = signal::AtomSpec<f64>;
pub type WeightSpec = weights::WeightSpec<f64>;
pub type ScaleSpec = weights::ScaleSpec<f64>;
pub type AdmissibilityReport = weights::AdmissibilityReport<f64>;
pub type OperatorConfig = hausdorff::OperatorConfig<f64>;
pub type PartialSum = hausdorff::PartialSum<f64>;
pub type MaximalConfig = hardy::MaximalConfig<f64>;
pub type H1Estimate = hardy::H1Estimate<f64>;
pub type KFunctionalBound = hardy::KFunctionalBound<f64>;
pub type KFunctionalTable = hardy::KFunctionalTable<f64>;
pub type QuadResult = quad::QuadResult<f64>;
pub type QuadOptions = quad::QuadOptions<f64>;

pub use signal::AtomShape;
pub use verify::{BoundednessBudget, CellMetrics, ExperimentReport, HormanderSettings};
