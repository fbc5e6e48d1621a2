//! Unit system and physical constants.
//!
//! Energies and rates are carried in μeV with ħ = 1, so a rate `r` in μeV
//! decays as `exp(-r t)` when `t` is expressed in the internal time unit
//! ħ/μeV (≈ 658.2 ps). Lab-facing times are in ps and go through
//! [`UnitSystem::ps_to_internal`] / [`UnitSystem::internal_to_ps`].

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Reduced Planck constant, μeV·ps.
pub const HBAR_UEV_PS: f64 = 658.211_956_9;
/// Bohr magneton, μeV/T.
pub const BOHR_MAGNETON_UEV_PER_T: f64 = 57.8838;
/// Planck constant, μeV/GHz.
pub const PLANCK_UEV_PER_GHZ: f64 = 4.135_668;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem<T> {
    /// μeV·ps
    pub hbar: T,
    /// μeV/T
    pub mu_b: T,
    /// μeV/GHz
    pub planck: T,
}

impl<T: Real> Default for UnitSystem<T> {
    fn default() -> Self {
        Self {
            hbar: lit(HBAR_UEV_PS),
            mu_b: lit(BOHR_MAGNETON_UEV_PER_T),
            planck: lit(PLANCK_UEV_PER_GHZ),
        }
    }
}

impl<T: Real> UnitSystem<T> {
    pub fn uev_to_ghz(&self, energy: T) -> T {
        energy / self.planck
    }

    pub fn ghz_to_uev(&self, frequency: T) -> T {
        frequency * self.planck
    }

    /// Converts a time in ps to the internal unit ħ/μeV.
    pub fn ps_to_internal(&self, t_ps: T) -> T {
        t_ps / self.hbar
    }

    pub fn internal_to_ps(&self, t: T) -> T {
        t * self.hbar
    }

    /// Rate in μeV to an inverse time in 1/ps.
    pub fn rate_per_ps(&self, rate: T) -> T {
        rate / self.hbar
    }

    /// Lifetime in ps of a process with rate `rate` (μeV).
    pub fn lifetime_ps(&self, rate: T) -> T {
        self.hbar / rate
    }
}

/// Zeeman splitting `g μ_B B` in μeV.
pub fn zeeman_splitting<T: Real>(g: T, field_tesla: T) -> Result<T> {
    if !(field_tesla >= T::zero()) {
        return Err(Error::param(
            "magnetic_field_T",
            format!("field must be non-negative, got {field_tesla}"),
        ));
    }
    Ok(g * lit::<T>(BOHR_MAGNETON_UEV_PER_T) * field_tesla)
}

/// Cavity linewidth (FWHM, μeV) implied by a quality factor.
pub fn cavity_fwhm_from_q<T: Real>(cavity_energy: T, q: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::param(
            "cavity_q",
            format!("quality factor must be positive, got {q}"),
        ));
    }
    Ok(cavity_energy / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn hbar_is_h_over_two_pi() {
        let u = UnitSystem::<f64>::default();
        // ħ in μeV·ns from h in μeV/GHz
        let hbar_ns = u.planck / (2.0 * std::f64::consts::PI);
        assert_relative_eq!(hbar_ns * 1e3, u.hbar, max_relative = 1e-6);
    }

    #[test]
    fn ghz_round_trip() {
        let u = UnitSystem::<f64>::default();
        for e in [1e-3, 1.0, 99.56, 500.0, 1_291_200.0] {
            assert_relative_eq!(u.ghz_to_uev(u.uev_to_ghz(e)), e, max_relative = 1e-12);
        }
        // 0.5 meV ≈ 121 GHz
        assert!((u.uev_to_ghz(500.0) - 120.9).abs() < 0.1);
    }

    #[test]
    fn zeeman_examples() {
        let ez = zeeman_splitting(0.43f64, 4.0).unwrap();
        assert!((ez - 99.56).abs() < 5e-3);
        assert!((ez - 100.0).abs() < 1.0);
        assert_eq!(zeeman_splitting(0.43, 0.0).unwrap(), 0.0);
        assert!((zeeman_splitting(0.21f64, 4.0).unwrap() - 48.62).abs() < 5e-3);
        assert!(zeeman_splitting(0.43, -1.0).is_err());
        assert!(zeeman_splitting(0.43f32, 4.0).unwrap() > 99.5);
    }

    #[test]
    fn cavity_fwhm_examples() {
        let fwhm = cavity_fwhm_from_q(1_290_700.0f64, 4000.0).unwrap();
        assert!((fwhm - 322.7).abs() < 0.05);
        assert_eq!(cavity_fwhm_from_q(1_290_700.0, f64::INFINITY).unwrap(), 0.0);
        assert!(cavity_fwhm_from_q(1_290_700.0, 0.0).is_err());
        assert!(cavity_fwhm_from_q(1_290_700.0, -5.0).is_err());
    }

    #[test]
    fn dephasing_time_of_three_uev_line() {
        // FWHM 3 μeV ↔ coherence time 2ħ/FWHM
        let u = UnitSystem::<f64>::default();
        let t2 = u.lifetime_ps(1.5);
        assert!((t2 - 438.8).abs() < 0.5);
    }

    proptest! {
        #[test]
        fn zeeman_linear_in_field(g in -2.0f64..2.0, b in 0.0f64..10.0, a in 0.0f64..8.0) {
            let lhs = zeeman_splitting(g, a * b).unwrap();
            let rhs = a * zeeman_splitting(g, b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }
}
