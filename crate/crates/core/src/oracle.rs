//! Engine-versus-closed-form comparison of the Raman sideband ratio over a
//! laser scan.
//!
//! The closed form treats each Λ system as a QD Lorentzian of HWHM γ times the
//! cavity density of states. The engine reproduces that picture when the dot
//! is weakly coupled (its line is then set by γ_r, γ_s and Γ_ct, not by the
//! Purcell rate), which is what [`weak_coupling_profile`] arranges.

use rayon::prelude::*;

use crate::device::{build_level_structure, DeviceParameters, Spin};
use crate::engine::{build_model_with, steady_state, EmissionAnalysis, ModelOptions};
use crate::error::{Error, Result};
use crate::raman::raman_intensities;
use crate::spectrum::csv_string;

/// Dot-cavity coupling of the weak-coupling profile (μeV).
pub const WEAK_COUPLING_UEV: f64 = 10.0;

/// Scan geometry: laser detunings from E_X.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleScan {
    pub span: f64,
    pub step: f64,
    /// Points closer than this to any transition are skipped.
    pub exclusion: f64,
    pub tolerance: f64,
}

impl Default for OracleScan {
    fn default() -> Self {
        Self {
            span: 600.0,
            step: 50.0,
            exclusion: 150.0,
            tolerance: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OraclePoint {
    pub detuning: f64,
    pub laser_energy: f64,
    /// Sideband weights per unit population of the emitting spin.
    pub engine_stokes: f64,
    pub engine_anti_stokes: f64,
    pub oracle_stokes: f64,
    pub oracle_anti_stokes: f64,
}

impl OraclePoint {
    pub fn engine_ratio(&self) -> f64 {
        self.engine_anti_stokes / self.engine_stokes
    }

    pub fn oracle_ratio(&self) -> f64 {
        self.oracle_anti_stokes / self.oracle_stokes
    }

    pub fn deviation(&self) -> f64 {
        self.engine_ratio() / self.oracle_ratio() - 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub points: Vec<OraclePoint>,
    pub rms: f64,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.rms <= self.tolerance
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::OracleMismatch {
                rms: self.rms,
                tolerance: self.tolerance,
            })
        }
    }

    /// `detuning_ueV,laser_ueV,ratio_engine,ratio_oracle,deviation`
    pub fn to_csv(&self) -> String {
        csv_string(
            Some(&format!("rms={} tolerance={}", self.rms, self.tolerance)),
            &["detuning_ueV", "laser_ueV", "ratio_engine", "ratio_oracle", "deviation"],
            self.points.iter().map(|p| {
                vec![
                    p.detuning,
                    p.laser_energy,
                    p.engine_ratio(),
                    p.oracle_ratio(),
                    p.deviation(),
                ]
            }),
        )
    }
}

/// Weak-drive, weakly coupled variant of `base`: g_c = 10 μeV, Ω = 1 μeV, and
/// γ_r chosen so the dot's optical FWHM γ_r + γ_s/2 + Γ_ct equals 2γ.
pub fn weak_coupling_profile(base: &DeviceParameters<f64>) -> Result<DeviceParameters<f64>> {
    let radiative = 2.0 * base.qd_hwhm - base.spin_dephasing_rate / 2.0 - base.spin_flip_rate;
    if !(radiative > 0.0) {
        return Err(Error::param(
            "qd_hwhm_ueV",
            "2*gamma must exceed gamma_s/2 + Gamma_ct for the weak-coupling profile",
        ));
    }
    Ok(DeviceParameters {
        qd_cavity_coupling: WEAK_COUPLING_UEV,
        radiative_rate: radiative,
        drive_rabi: base.drive_rabi.min(1.0),
        trion_dephasing_rate: 0.0,
        ..base.clone()
    })
}

/// Laser detunings of the scan, skipping those near a transition.
pub fn scan_detunings(params: &DeviceParameters<f64>, scan: &OracleScan) -> Result<Vec<f64>> {
    let levels = build_level_structure(params)?;
    let n = (2.0 * scan.span / scan.step).round() as i64;
    Ok((0..=n)
        .map(|k| -scan.span + k as f64 * scan.step)
        .filter(|&d| {
            levels
                .transition_energies()
                .iter()
                .all(|w| (params.qd_center_energy + d - w).abs() >= scan.exclusion)
        })
        .collect())
}

fn engine_point(params: &DeviceParameters<f64>, detuning: f64, options: &ModelOptions) -> Result<OraclePoint> {
    let levels = build_level_structure(params)?;
    let laser = params.qd_center_energy + detuning;
    let model = build_model_with(params, &levels, laser, options)?;
    let rho = steady_state(&model)?;
    let w = EmissionAnalysis::from_states(&model, &rho, &rho)?.sideband_weights();
    let i = raman_intensities(laser, params, &levels)?;
    Ok(OraclePoint {
        detuning,
        laser_energy: laser,
        engine_stokes: w.stokes / rho.spin_population(Spin::Up),
        engine_anti_stokes: w.anti_stokes / rho.spin_population(Spin::Down),
        oracle_stokes: i.stokes,
        oracle_anti_stokes: i.anti_stokes,
    })
}

/// Compares engine and closed-form AS/S ratios for `params` as given.
pub fn oracle_scan(params: &DeviceParameters<f64>, scan: &OracleScan, options: &ModelOptions) -> Result<OracleReport> {
    let detunings = scan_detunings(params, scan)?;
    if detunings.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points = detunings
        .par_iter()
        .map(|&d| engine_point(params, d, options))
        .collect::<Result<Vec<_>>>()?;
    let rms = (points.iter().map(|p| p.deviation().powi(2)).sum::<f64>() / points.len() as f64).sqrt();
    Ok(OracleReport {
        points,
        rms,
        tolerance: scan.tolerance,
    })
}

/// [`oracle_scan`] on the weak-coupling profile of `base`; fails with
/// [`Error::OracleMismatch`] above tolerance.
pub fn oracle_check(base: &DeviceParameters<f64>, scan: &OracleScan, options: &ModelOptions) -> Result<OracleReport> {
    let weak = weak_coupling_profile(base)?;
    oracle_scan(&weak, scan, options)?.into_result()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_skips_transitions() {
        let p = DeviceParameters::<f64>::default();
        let d = scan_detunings(&p, &OracleScan::default()).unwrap();
        assert_eq!(d.len(), 16);
        assert!(d.iter().all(|x| x.abs() >= 224.0));
    }

    #[test]
    fn weak_profile_linewidth() {
        let p = weak_coupling_profile(&DeviceParameters::default()).unwrap();
        let fwhm = p.radiative_rate + p.spin_dephasing_rate / 2.0 + p.spin_flip_rate;
        assert!((fwhm - 18.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_agrees() {
        let p = weak_coupling_profile(&DeviceParameters::default()).unwrap();
        let pt = engine_point(&p, -400.0, &ModelOptions::default()).unwrap();
        assert!(pt.deviation().abs() < 0.01, "{}", pt.deviation());
    }

    #[test]
    fn mismatch_is_reported() {
        let r = OracleReport {
            points: vec![],
            rms: 0.09,
            tolerance: 0.05,
        };
        assert!(matches!(r.into_result(), Err(Error::OracleMismatch { .. })));
    }
}
