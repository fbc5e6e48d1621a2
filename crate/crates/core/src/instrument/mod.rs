//! Measurement chain: interferometer, detector jitter, polarization optics
//! and the fits that turn simulated curves into reported numbers.

mod detector;
mod filter;
mod fit;

pub use detector::{convolve_g2, DetectorResponse};
pub use filter::{fp_scan, fp_transmit, order_window, FabryPerotFilter};
pub use fit::{
    fit_g2_rise, fit_lorentzian, lorentzian, rise_model, FitParameter, FitResult, MAX_ITERATIONS,
    RELATIVE_TOLERANCE,
};

use crate::scalar::Real;

/// Malus-law intensity behind a linear analyzer at `angle` (rad) for a
/// field with components (x, y). Angles are taken modulo π.
pub fn polarization_project<T: Real>(field: [T; 2], angle: T) -> T {
    let a = angle % T::pi();
    let amp = field[0] * a.cos() + field[1] * a.sin();
    amp * amp
}

/// Fraction of cross-polarized light leaking through a parallel analyzer
/// at misalignment `theta`: sin²θ.
pub fn misalignment_leakage<T: Real>(theta: T) -> T {
    polarization_project([T::zero(), T::one()], theta)
}

/// Drive and detection weights of the cross-polarized geometry at
/// misalignment θ: (cross legs cos²θ, cavity legs sin²θ).
pub fn geometry_factors<T: Real>(theta: T) -> (T, T) {
    (polarization_project([T::one(), T::zero()], theta), misalignment_leakage(theta))
}
