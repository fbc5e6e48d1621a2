//! Cavity-stimulated Raman spin-flip emission from a charged quantum dot.
//!
//! Two model tiers share one device description: the closed-form
//! perturbative intensities in [`raman`] and the Lindblad master-equation
//! engine in [`engine`]. [`spin`] adds optical pumping and spin-resolved
//! emission, [`instrument`] the measurement chain, and [`scenario`] the
//! named runs behind the `raman-sim` binary.
//!
//! Physics code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar.

// `!(x > 0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod device;
pub mod engine;
pub mod error;
pub mod instrument;
pub mod oracle;
pub mod raman;
pub mod scalar;
pub mod scenario;
pub mod spectrum;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DeviceParametersF64 = device::DeviceParameters<f64>;
pub type DeviceParametersF32 = device::DeviceParameters<f32>;
pub type LevelStructureF64 = device::LevelStructure<f64>;
pub type LevelStructureF32 = device::LevelStructure<f32>;
pub type SpectrumF64 = spectrum::Spectrum<f64>;
pub type SpectrumF32 = spectrum::Spectrum<f32>;
pub type LindbladModelF64 = engine::LindbladModel<f64>;
pub type LindbladModelF32 = engine::LindbladModel<f32>;
pub type DensityMatrixF64 = engine::DensityMatrix<f64>;
pub type DensityMatrixF32 = engine::DensityMatrix<f32>;
pub type CorrelationTraceF64 = engine::CorrelationTrace<f64>;
pub type CorrelationTraceF32 = engine::CorrelationTrace<f32>;
pub type SpinStateF64 = spin::SpinState<f64>;
pub type SpinStateF32 = spin::SpinState<f32>;
pub type FitResultF64 = instrument::FitResult<f64>;
pub type FitResultF32 = instrument::FitResult<f32>;
