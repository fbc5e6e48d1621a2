//! Lindblad master-equation engine on the dot ⊗ cavity space.

mod calibrate;
mod density;
mod evolve;
pub mod hilbert;
mod model;
mod qrt;
mod resolvent;
mod steady;

pub use calibrate::{
    calibrate_coupling, calibrate_coupling_report, probe_linewidth, purcell_rate,
    CalibrationReport,
};
pub use density::{DensityMatrix, TRUNCATION_LIMIT};
pub use evolve::{evolve, evolve_with, EvolveOptions, Propagator};
pub use hilbert::{CMatrix, CVector, HilbertSpace, QdLevel};
pub use model::{
    build_model, build_model_with, lamb_shifts, liouvillian, CollapseChannel, LindbladModel,
    ModelOptions, DEFAULT_FOCK_CUTOFF,
};
pub use qrt::{emission_spectrum, g2, g2_leg, sideband_weights, CorrelationTrace, EmissionAnalysis, SidebandWeights};
pub use steady::{null_space_dimension, steady_state, steady_state_residual};
