//! Dot-cavity coupling calibration against a target optical linewidth.
//!
//! The linewidth is the FWHM of the engine's weak-probe absorption
//!
//! ```text
//! A(ν) = Re Tr[σ (−iν − L₀)⁻¹ (σ† ρ_g)]
//! ```
//!
//! of the undriven model at zero field, where σ is the laser-polarized
//! lowering operator and ρ_g the unpolarized ground state. The dot-cavity
//! detuning is taken from the parameters (500 μeV by default).

use crate::device::{build_level_structure, DeviceParameters, LEGS};
use crate::error::{Error, Result};
use crate::scalar::{im, lit, re, to_f64, Cplx, Real};

use super::density::DensityMatrix;
use super::hilbert::{CMatrix, CVector};
use super::model::{build_model_with, ModelOptions};
use super::resolvent::HessenbergResolvent;

/// Frame offset below E_X; keeps the probe line away from the stationary
/// pole at ν = 0.
const FRAME_OFFSET: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationReport<T> {
    pub coupling: T,
    pub fwhm: T,
    pub natural_fwhm: T,
    /// g from the closed-form Purcell estimate for the same target.
    pub analytic_coupling: T,
    pub evaluations: usize,
}

/// Purcell rate 4g²κ/(4δ² + κ²).
pub fn purcell_rate<T: Real>(coupling: T, kappa: T, detuning: T) -> T {
    let four = lit::<T>(4.0);
    four * coupling * coupling * kappa / (four * detuning * detuning + kappa * kappa)
}

/// Weak-probe FWHM (μeV) of the dot line at zero field.
pub fn probe_linewidth<T: Real>(params: &DeviceParameters<T>) -> Result<T> {
    let p = DeviceParameters {
        drive_rabi: T::zero(),
        magnetic_field: T::zero(),
        ..params.clone()
    };
    let levels = build_level_structure(&p)?;
    let frame = p.qd_center_energy - lit(FRAME_OFFSET);
    let model = build_model_with(
        &p,
        &levels,
        frame,
        &ModelOptions {
            fock_cutoff: 1,
            lamb_shift_compensation: true,
        },
    )?;
    let space = model.space();
    let d = space.total_dim();

    let mut sigma = CMatrix::<T>::zeros(d, d);
    let theta = p.polarization_mixing_angle;
    for leg in LEGS {
        let pol = if leg.is_cavity_coupled() { theta.sin() } else { theta.cos() };
        sigma += space.lowering::<T>(leg) * re(p.dipoles.normalized().get(leg) * pol);
    }
    let rho_g = DensityMatrix::ground_state(space, lit(0.5), Cplx::new(T::zero(), T::zero()));
    let x0 = sigma.adjoint() * rho_g.matrix();
    let row = CVector::from_column_slice(sigma.transpose().as_slice());
    let col = CVector::from_column_slice(x0.as_slice());

    let res = HessenbergResolvent::new(model.liouvillian().clone());
    let row_q = res.project_row(&row);
    let col_q = res.project_col(&col);
    // (σ − L)⁻¹ at σ = −iν
    let absorb = |nu: T| res.bilinear(im(-nu), &row_q, &col_q).re;

    // coarse peak search around the line
    let center = lit::<T>(FRAME_OFFSET);
    let span = lit::<T>(300.0);
    let steps = 1200;
    let mut best = (center, absorb(center));
    for k in 0..=steps {
        let nu = center - span + span * lit::<T>(2.0 * k as f64 / steps as f64);
        let a = absorb(nu);
        if a > best.1 {
            best = (nu, a);
        }
    }
    // golden-section refinement of the maximum
    let (mut lo, mut hi) = (best.0 - span / lit(600.0), best.0 + span / lit(600.0));
    let phi = lit::<T>(0.618_033_988_749_895);
    for _ in 0..60 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if absorb(x1) > absorb(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let peak_nu = (lo + hi) / lit(2.0);
    let half = absorb(peak_nu) / lit(2.0);
    if !(half > T::zero()) {
        return Err(Error::CalibrationFailure("probe absorption vanishes".into()));
    }

    let crossing = |mut inside: T, mut outside: T| -> Result<T> {
        if absorb(outside) > half {
            return Err(Error::CalibrationFailure(
                "linewidth exceeds the probe window".into(),
            ));
        }
        for _ in 0..80 {
            let mid = (inside + outside) / lit(2.0);
            if absorb(mid) > half {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok((inside + outside) / lit(2.0))
    };
    let right = crossing(peak_nu, peak_nu + span * lit(1.5))?;
    let left = crossing(peak_nu, peak_nu - span * lit(1.5))?;
    Ok(right - left)
}

/// Coupling g_c (μeV) for which [`probe_linewidth`] equals `target_fwhm`
/// within 1e-4 relative.
pub fn calibrate_coupling<T: Real>(params: &DeviceParameters<T>, target_fwhm: T) -> Result<T> {
    Ok(calibrate_coupling_report(params, target_fwhm)?.coupling)
}

pub fn calibrate_coupling_report<T: Real>(
    params: &DeviceParameters<T>,
    target_fwhm: T,
) -> Result<CalibrationReport<T>> {
    let with_g = |g: T| {
        probe_linewidth(&DeviceParameters {
            qd_cavity_coupling: g,
            ..params.clone()
        })
    };
    let natural = with_g(T::zero())?;
    let rel_tol = lit::<T>(1e-4);
    let kappa = lit::<T>(2.0) * params.cavity_hwhm;
    let delta = params.qd_center_energy - params.cavity_energy;
    let analytic = {
        let excess = (target_fwhm - natural).max(T::zero());
        (excess * (lit::<T>(4.0) * delta * delta + kappa * kappa) / (lit::<T>(4.0) * kappa)).sqrt()
    };

    if (target_fwhm - natural).abs() <= rel_tol * target_fwhm {
        return Ok(CalibrationReport {
            coupling: T::zero(),
            fwhm: natural,
            natural_fwhm: natural,
            analytic_coupling: analytic,
            evaluations: 1,
        });
    }
    if target_fwhm < natural {
        return Err(Error::CalibrationFailure(format!(
            "target FWHM {} is below the natural linewidth {}",
            to_f64(target_fwhm),
            to_f64(natural)
        )));
    }

    let mut evaluations = 1;
    let mut lo = T::zero();
    let mut hi = analytic.max(T::one()) * lit(1.5);
    loop {
        let w = with_g(hi)?;
        evaluations += 1;
        if w > target_fwhm {
            break;
        }
        lo = hi;
        hi *= lit(2.0);
        if hi > lit(1e5) {
            return Err(Error::CalibrationFailure(format!(
                "target FWHM {} unreachable",
                to_f64(target_fwhm)
            )));
        }
    }
    let mut g = (lo + hi) / lit(2.0);
    let mut w = with_g(g)?;
    while (w - target_fwhm).abs() > rel_tol * target_fwhm && evaluations < 200 {
        if w > target_fwhm {
            hi = g;
        } else {
            lo = g;
        }
        g = (lo + hi) / lit(2.0);
        w = with_g(g)?;
        evaluations += 1;
    }
    Ok(CalibrationReport {
        coupling: g,
        fwhm: w,
        natural_fwhm: natural,
        analytic_coupling: analytic,
        evaluations,
    })
}
