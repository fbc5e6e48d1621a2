//! Closed-form Raman emission model: second-order scattering amplitude times
//! the cavity density of states at the Raman-shifted photon energy.
//!
//! ```text
//! I_S  ∝ μ²(T1,↑) μ²(T1,↓) / ((ω_L − ω(T1,↑))² + γ²) · D(ω_L − E_z)
//! I_AS ∝ μ²(T2,↓) μ²(T2,↑) / ((ω_L − ω(T2,↓))² + γ²) · D(ω_L + E_z)
//! D(ω) = Γ² / ((ω − ω_c)² + Γ²)
//! ```
//!
//! Spin populations are taken equal and saturation is ignored, so only ratios
//! and lineshapes are meaningful; the normalization fixes `D(ω_c) = 1`.

use rayon::prelude::*;

use crate::device::{DeviceParameters, LevelStructure, Leg, Spin, Trion};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{csv_string, Spectrum};
use crate::units::zeeman_splitting;

const STOKES_DRIVE: Leg = Leg::new(Trion::T1, Spin::Up);
const ANTI_STOKES_DRIVE: Leg = Leg::new(Trion::T2, Spin::Down);

/// Cavity photon density of states, unity at the cavity peak.
pub fn cavity_dos<T: Real>(energy: T, cavity_energy: T, cavity_hwhm: T) -> Result<T> {
    if !(cavity_hwhm > T::zero()) {
        return Err(Error::param(
            "cavity_hwhm_ueV",
            format!("cavity half-width must be positive, got {cavity_hwhm}"),
        ));
    }
    let d = energy - cavity_energy;
    let g2 = cavity_hwhm * cavity_hwhm;
    Ok(g2 / (d * d + g2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamanIntensities<T> {
    pub stokes: T,
    pub anti_stokes: T,
    pub laser_energy: T,
    pub stokes_energy: T,
    pub antistokes_energy: T,
}

impl<T: Real> RamanIntensities<T> {
    pub fn total(&self) -> T {
        self.stokes + self.anti_stokes
    }

    /// (I_AS − I_S)/(I_AS + I_S)
    pub fn selectivity(&self) -> Result<T> {
        let sum = self.total();
        if !(sum > T::zero()) {
            return Err(Error::DarkEmitter);
        }
        Ok((self.anti_stokes - self.stokes) / sum)
    }
}

fn lorentzian_denominator<T: Real>(laser: T, levels: &LevelStructure<T>, leg: Leg, hwhm: T) -> T {
    // relative to E_X to keep precision at meV-scale absolute energies
    let d = (laser - levels.qd_center_energy) - levels.detuning_from_center(leg);
    d * d + hwhm * hwhm
}

/// Stokes and anti-Stokes intensities for laser energy `laser` (μeV).
pub fn raman_intensities<T: Real>(
    laser: T,
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
) -> Result<RamanIntensities<T>> {
    let ez = levels.electron_zeeman;
    let mu = &params.dipoles;
    let gamma = params.qd_hwhm;
    let dos = |e: T| cavity_dos(e, params.cavity_energy, params.cavity_hwhm);

    let s_dipole = (mu.t1_up * mu.t1_up) * (mu.t1_down * mu.t1_down);
    let as_dipole = (mu.t2_down * mu.t2_down) * (mu.t2_up * mu.t2_up);

    let stokes = s_dipole / lorentzian_denominator(laser, levels, STOKES_DRIVE, gamma)
        * dos(laser - ez)?;
    let anti_stokes = as_dipole / lorentzian_denominator(laser, levels, ANTI_STOKES_DRIVE, gamma)
        * dos(laser + ez)?;

    Ok(RamanIntensities {
        stokes,
        anti_stokes,
        laser_energy: laser,
        stokes_energy: laser - ez,
        antistokes_energy: laser + ez,
    })
}

/// Raman excitation spectra: sideband intensity versus laser energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationScan<T> {
    pub stokes: Spectrum<T>,
    pub anti_stokes: Spectrum<T>,
}

impl<T: Real> ExcitationScan<T> {
    /// CSV with header `laser_ueV,I_S,I_AS`.
    pub fn to_csv(&self) -> String {
        csv_string(
            None,
            &["laser_ueV", "I_S", "I_AS"],
            self.stokes
                .grid()
                .iter()
                .zip(self.stokes.values())
                .zip(self.anti_stokes.values())
                .map(|((x, s), a)| vec![to_f64(*x), to_f64(*s), to_f64(*a)]),
        )
    }
}

pub fn excitation_spectrum<T: Real>(
    laser_grid: &[T],
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
) -> Result<ExcitationScan<T>> {
    if laser_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points = laser_grid
        .par_iter()
        .map(|&w| raman_intensities(w, params, levels))
        .collect::<Result<Vec<_>>>()?;
    let grid = laser_grid.to_vec();
    Ok(ExcitationScan {
        stokes: Spectrum::new(grid.clone(), points.iter().map(|p| p.stokes).collect())?,
        anti_stokes: Spectrum::new(grid, points.iter().map(|p| p.anti_stokes).collect())?,
    })
}

/// Which sideband is held on the cavity peak while the field is swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CavityPin {
    /// ω_L = ω_c − E_z
    AntiStokes,
    /// ω_L = ω_c + E_z
    Stokes,
}

/// Laser energy that places the pinned sideband on the cavity peak.
pub fn pinned_laser_energy<T: Real>(cavity_energy: T, electron_zeeman: T, pin: CavityPin) -> T {
    match pin {
        CavityPin::AntiStokes => cavity_energy - electron_zeeman,
        CavityPin::Stokes => cavity_energy + electron_zeeman,
    }
}

/// Spin selectivity (I_AS − I_S)/(I_AS + I_S) at field `field_tesla`, with
/// the anti-Stokes photon held on the cavity peak.
pub fn selectivity<T: Real>(field_tesla: T, params: &DeviceParameters<T>) -> Result<T> {
    selectivity_pinned(field_tesla, params, CavityPin::AntiStokes)
}

pub fn selectivity_pinned<T: Real>(
    field_tesla: T,
    params: &DeviceParameters<T>,
    pin: CavityPin,
) -> Result<T> {
    let ez_e = zeeman_splitting(params.electron_g, field_tesla)?;
    let ez_t = zeeman_splitting(params.trion_g, field_tesla)?;
    let levels =
        LevelStructure::from_splittings(params.qd_center_energy, ez_e, ez_t, params.numbering);
    let laser = pinned_laser_energy(params.cavity_energy, ez_e, pin);
    raman_intensities(laser, params, &levels)?.selectivity()
}

/// Emission spectrum for a fixed laser: Lorentzian sidebands of FWHM 2γ_s at
/// ω_L ∓ E_z whose integrated weights equal I_S and I_AS.
pub fn sideband_lineshape<T: Real>(
    laser: T,
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    grid: &[T],
) -> Result<Spectrum<T>> {
    let gs = params.spin_dephasing_rate;
    if !(gs > T::zero()) {
        return Err(Error::param(
            "spin_dephasing_rate_ueV",
            "sideband lineshape needs a positive spin dephasing rate",
        ));
    }
    let i = raman_intensities(laser, params, levels)?;
    let line = |x: T, center: T, weight: T| {
        let d = x - center;
        weight * gs / (T::pi() * (d * d + gs * gs))
    };
    Spectrum::from_fn(grid.to_vec(), |x| {
        line(x, i.stokes_energy, i.stokes) + line(x, i.antistokes_energy, i.anti_stokes)
    })
}

/// Default grid for [`sideband_lineshape`]: both sidebands plus 20 linewidths
/// of margin at 0.1 μeV spacing.
pub fn sideband_grid<T: Real>(laser: T, params: &DeviceParameters<T>, levels: &LevelStructure<T>) -> Vec<T> {
    let half = levels.electron_zeeman.abs() + lit::<T>(20.0) * params.spin_dephasing_rate;
    crate::spectrum::centered_grid(laser, half, lit(crate::spectrum::DEFAULT_SPACING_UEV))
        .expect("positive width")
}

/// Raman signal at the red (cavity-side) versus blue laser detuning from E_X.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityAsymmetry<T> {
    pub detuning: T,
    /// (I_S + I_AS) at E_X − detuning over the same at E_X + detuning.
    pub total_ratio: T,
    pub stokes_ratio: T,
    pub anti_stokes_ratio: T,
}

pub fn cavity_asymmetry<T: Real>(
    detuning: T,
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
) -> Result<CavityAsymmetry<T>> {
    let red = raman_intensities(levels.qd_center_energy - detuning, params, levels)?;
    let blue = raman_intensities(levels.qd_center_energy + detuning, params, levels)?;
    Ok(CavityAsymmetry {
        detuning,
        total_ratio: red.total() / blue.total(),
        stokes_ratio: red.stokes / blue.stokes,
        anti_stokes_ratio: red.anti_stokes / blue.anti_stokes,
    })
}
