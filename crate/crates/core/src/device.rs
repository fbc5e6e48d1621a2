//! Device parameters and the four-transition level structure of the charged
//! dot in an in-plane magnetic field.
//!
//! Ground states: |↓⟩ at +E_z,e/2 and |↑⟩ at −E_z,e/2. Trions: T1 at
//! E_X + E_z,t/2 and T2 at E_X − E_z,t/2. The four optical lines are
//!
//! | line | leg       | role                          | polarization |
//! |------|-----------|-------------------------------|--------------|
//! | 1    | ↓ ↔ T2    | anti-Stokes pump              | ⊥ cavity     |
//! | 2    | ↓ ↔ T1    | Stokes emission               | ∥ cavity     |
//! | 3    | ↑ ↔ T2    | anti-Stokes emission          | ∥ cavity     |
//! | 4    | ↑ ↔ T1    | Stokes pump                   | ⊥ cavity     |
//!
//! With the default ascending numbering line 1 is the lowest-energy
//! transition and line 4 the highest; [`TransitionNumbering::Descending`]
//! reverses the labels without changing the physics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::units::{zeeman_splitting, HBAR_UEV_PS, PLANCK_UEV_PER_GHZ};

/// Calibrated dot-cavity coupling (μeV) for the default profile: the value
/// for which the engine's weak-probe linewidth at 500 μeV dot-cavity
/// detuning is 18 μeV FWHM. Regenerate with
/// [`crate::engine::calibrate_coupling`].
pub const DEFAULT_QD_CAVITY_COUPLING: f64 = 104.24;

/// Plateau-centre spin relaxation time, ps.
pub const PLATEAU_CENTER_T1_PS: f64 = 2.0e7;
/// Ratio between the plateau-edge and plateau-centre co-tunneling rates.
pub const PLATEAU_EDGE_SPEEDUP: f64 = 1000.0;

/// Spin-flip rate per direction (μeV) for a population relaxation time `t1_ps`.
pub fn flip_rate_from_t1(t1_ps: f64) -> f64 {
    HBAR_UEV_PS / (2.0 * t1_ps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trion {
    T1,
    T2,
}

/// An optical leg connecting a ground spin state to a trion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Leg {
    pub trion: Trion,
    pub spin: Spin,
}

impl Leg {
    pub const fn new(trion: Trion, spin: Spin) -> Self {
        Self { trion, spin }
    }

    /// Whether the leg's dipole is (nominally) aligned with the cavity mode.
    pub fn is_cavity_coupled(self) -> bool {
        matches!(
            (self.trion, self.spin),
            (Trion::T1, Spin::Down) | (Trion::T2, Spin::Up)
        )
    }
}

/// Legs in physical-role order: AS pump, S emission, AS emission, S pump.
pub const LEGS: [Leg; 4] = [
    Leg::new(Trion::T2, Spin::Down),
    Leg::new(Trion::T1, Spin::Down),
    Leg::new(Trion::T2, Spin::Up),
    Leg::new(Trion::T1, Spin::Up),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionNumbering {
    /// Line 1 is the anti-Stokes pump leg (lowest energy).
    #[default]
    Ascending,
    /// Line 1 is the Stokes pump leg (highest energy).
    Descending,
}

impl TransitionNumbering {
    /// Leg carrying transition number `n` (1..=4).
    pub fn leg(self, n: usize) -> Leg {
        assert!((1..=4).contains(&n), "transition number {n} out of range");
        match self {
            TransitionNumbering::Ascending => LEGS[n - 1],
            TransitionNumbering::Descending => LEGS[4 - n],
        }
    }

    /// Transition number (1..=4) of `leg`.
    pub fn number(self, leg: Leg) -> usize {
        let idx = LEGS.iter().position(|l| *l == leg).unwrap();
        match self {
            TransitionNumbering::Ascending => idx + 1,
            TransitionNumbering::Descending => 4 - idx,
        }
    }
}

/// Relative transition dipole moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipoleMoments<T> {
    pub t1_up: T,
    pub t1_down: T,
    pub t2_up: T,
    pub t2_down: T,
}

impl<T: Real> DipoleMoments<T> {
    pub fn uniform() -> Self {
        Self {
            t1_up: T::one(),
            t1_down: T::one(),
            t2_up: T::one(),
            t2_down: T::one(),
        }
    }

    pub fn get(&self, leg: Leg) -> T {
        match (leg.trion, leg.spin) {
            (Trion::T1, Spin::Up) => self.t1_up,
            (Trion::T1, Spin::Down) => self.t1_down,
            (Trion::T2, Spin::Up) => self.t2_up,
            (Trion::T2, Spin::Down) => self.t2_down,
        }
    }

    fn all(&self) -> [T; 4] {
        [self.t1_up, self.t1_down, self.t2_up, self.t2_down]
    }

    /// Rescaled so the largest moment is 1. All-zero moments are left as is.
    pub fn normalized(&self) -> Self {
        let max = self.all().into_iter().fold(T::zero(), |m, x| m.max(x));
        if max > T::zero() {
            self.map(|x| x / max)
        } else {
            *self
        }
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> DipoleMoments<U> {
        DipoleMoments {
            t1_up: f(self.t1_up),
            t1_down: f(self.t1_down),
            t2_up: f(self.t2_up),
            t2_down: f(self.t2_down),
        }
    }
}

/// Physical constants of the coupled dot-cavity device. Energies and rates in
/// μeV, field in T, angles in rad.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceParameters<T> {
    /// Trion transition centroid E_X.
    pub qd_center_energy: T,
    /// Cavity resonance ω_c.
    pub cavity_energy: T,
    /// Cavity half-width Γ (FWHM = 2Γ).
    pub cavity_hwhm: T,
    /// Optional quality factor, checked against Γ when both are present.
    pub cavity_q: Option<T>,
    pub electron_g: T,
    pub trion_g: T,
    /// Optical transition half-width γ of the perturbative model.
    pub qd_hwhm: T,
    /// Ground-spin dephasing rate γ_s; Raman sidebands have FWHM 2γ_s.
    pub spin_dephasing_rate: T,
    /// Co-tunneling spin-flip rate Γ_ct, per direction.
    pub spin_flip_rate: T,
    /// Free-space trion decay rate γ_r (total per trion).
    pub radiative_rate: T,
    /// Optional pure dephasing of the trion coherences.
    pub trion_dephasing_rate: T,
    /// Dot-cavity coupling g_c.
    pub qd_cavity_coupling: T,
    /// Drive Rabi energy Ω.
    pub drive_rabi: T,
    /// Misalignment θ of the cavity-coupled dipoles from the cavity axis.
    pub polarization_mixing_angle: T,
    pub magnetic_field: T,
    pub dipoles: DipoleMoments<T>,
    pub numbering: TransitionNumbering,
}

impl<T: Real> Default for DeviceParameters<T> {
    fn default() -> Self {
        Self {
            qd_center_energy: lit(1_291_200.0),
            cavity_energy: lit(1_290_700.0),
            cavity_hwhm: lit(175.0),
            cavity_q: None,
            electron_g: lit(0.43),
            trion_g: lit(0.21),
            qd_hwhm: lit(9.0),
            spin_dephasing_rate: lit(1.5),
            spin_flip_rate: lit(flip_rate_from_t1(PLATEAU_CENTER_T1_PS / PLATEAU_EDGE_SPEEDUP)),
            // ~1 GHz natural linewidth
            radiative_rate: lit(PLANCK_UEV_PER_GHZ),
            trion_dephasing_rate: T::zero(),
            qd_cavity_coupling: lit(DEFAULT_QD_CAVITY_COUPLING),
            drive_rabi: lit(1.0),
            polarization_mixing_angle: T::zero(),
            magnetic_field: lit(4.0),
            dipoles: DipoleMoments::uniform(),
            numbering: TransitionNumbering::Ascending,
        }
    }
}

impl<T: Real> DeviceParameters<T> {
    /// Checks every invariant; returns non-fatal consistency warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let non_negative = [
            ("cavity_hwhm_ueV", self.cavity_hwhm),
            ("qd_hwhm_ueV", self.qd_hwhm),
            ("spin_dephasing_rate_ueV", self.spin_dephasing_rate),
            ("spin_flip_rate_ueV", self.spin_flip_rate),
            ("radiative_rate_ueV", self.radiative_rate),
            ("trion_dephasing_rate_ueV", self.trion_dephasing_rate),
            ("qd_cavity_coupling_ueV", self.qd_cavity_coupling),
            ("drive_rabi_ueV", self.drive_rabi),
            ("magnetic_field_T", self.magnetic_field),
            ("dipole_t1_up", self.dipoles.t1_up),
            ("dipole_t1_down", self.dipoles.t1_down),
            ("dipole_t2_up", self.dipoles.t2_up),
            ("dipole_t2_down", self.dipoles.t2_down),
        ];
        for (key, value) in non_negative {
            if !(value >= T::zero()) || !value.is_finite() {
                return Err(Error::param(key, format!("must be finite and >= 0, got {value}")));
            }
        }
        for (key, value) in [
            ("qd_center_energy_ueV", self.qd_center_energy),
            ("cavity_energy_ueV", self.cavity_energy),
            ("electron_g", self.electron_g),
            ("trion_g", self.trion_g),
            ("polarization_mixing_angle_rad", self.polarization_mixing_angle),
        ] {
            if !value.is_finite() {
                return Err(Error::param(key, format!("must be finite, got {value}")));
            }
        }

        let mut warnings = Vec::new();
        if let Some(q) = self.cavity_q {
            if !(q > T::zero()) {
                return Err(Error::param("cavity_q", format!("must be > 0, got {q}")));
            }
            let fwhm = to_f64(self.cavity_hwhm) * 2.0;
            let from_q = to_f64(self.cavity_energy) / to_f64(q);
            let mismatch = (from_q - fwhm).abs() / fwhm;
            if mismatch > 0.15 {
                return Err(Error::param(
                    "cavity_q",
                    format!(
                        "omega_c/Q = {from_q:.1} ueV disagrees with 2*Gamma = {fwhm:.1} ueV by {:.0}% (limit 15%)",
                        mismatch * 100.0
                    ),
                ));
            }
            if mismatch > 1e-3 {
                warnings.push(format!(
                    "cavity_q: omega_c/Q = {from_q:.1} ueV differs from 2*Gamma = {fwhm:.1} ueV by {:.1}%; using 2*Gamma",
                    mismatch * 100.0
                ));
            }
        }
        Ok(warnings)
    }

    pub fn with_field(&self, field_tesla: T) -> Self {
        Self {
            magnetic_field: field_tesla,
            ..self.clone()
        }
    }

    /// Electron Zeeman energy E_z,e at the configured field.
    pub fn electron_zeeman(&self) -> Result<T> {
        zeeman_splitting(self.electron_g, self.magnetic_field)
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> DeviceParameters<U> {
        let c = |x: T| lit::<U>(to_f64(x));
        DeviceParameters {
            qd_center_energy: c(self.qd_center_energy),
            cavity_energy: c(self.cavity_energy),
            cavity_hwhm: c(self.cavity_hwhm),
            cavity_q: self.cavity_q.map(c),
            electron_g: c(self.electron_g),
            trion_g: c(self.trion_g),
            qd_hwhm: c(self.qd_hwhm),
            spin_dephasing_rate: c(self.spin_dephasing_rate),
            spin_flip_rate: c(self.spin_flip_rate),
            radiative_rate: c(self.radiative_rate),
            trion_dephasing_rate: c(self.trion_dephasing_rate),
            qd_cavity_coupling: c(self.qd_cavity_coupling),
            drive_rabi: c(self.drive_rabi),
            polarization_mixing_angle: c(self.polarization_mixing_angle),
            magnetic_field: c(self.magnetic_field),
            dipoles: self.dipoles.map(c),
            numbering: self.numbering,
        }
    }
}

/// One optical transition with its energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionLine<T> {
    pub number: usize,
    pub leg: Leg,
    pub energy: T,
}

/// Energies of the four-level system at a given field.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStructure<T> {
    pub qd_center_energy: T,
    pub electron_zeeman: T,
    pub trion_zeeman: T,
    pub numbering: TransitionNumbering,
}

impl<T: Real> LevelStructure<T> {
    /// Level structure from (possibly signed) Zeeman energies.
    pub fn from_splittings(
        qd_center_energy: T,
        electron_zeeman: T,
        trion_zeeman: T,
        numbering: TransitionNumbering,
    ) -> Self {
        Self {
            qd_center_energy,
            electron_zeeman,
            trion_zeeman,
            numbering,
        }
    }

    pub fn ground_energy(&self, spin: Spin) -> T {
        let half = self.electron_zeeman / lit(2.0);
        match spin {
            Spin::Down => half,
            Spin::Up => -half,
        }
    }

    pub fn trion_energy(&self, trion: Trion) -> T {
        let half = self.trion_zeeman / lit(2.0);
        match trion {
            Trion::T1 => self.qd_center_energy + half,
            Trion::T2 => self.qd_center_energy - half,
        }
    }

    /// [ε_↓, ε_↑]
    pub fn ground_energies(&self) -> [T; 2] {
        [self.ground_energy(Spin::Down), self.ground_energy(Spin::Up)]
    }

    /// [ε_T1, ε_T2]
    pub fn trion_energies(&self) -> [T; 2] {
        [self.trion_energy(Trion::T1), self.trion_energy(Trion::T2)]
    }

    /// Offset of a leg's transition energy from E_X.
    pub fn detuning_from_center(&self, leg: Leg) -> T {
        let two = lit::<T>(2.0);
        let t = match leg.trion {
            Trion::T1 => self.trion_zeeman / two,
            Trion::T2 => -self.trion_zeeman / two,
        };
        t - self.ground_energy(leg.spin)
    }

    pub fn leg_energy(&self, leg: Leg) -> T {
        self.qd_center_energy + self.detuning_from_center(leg)
    }

    /// Energy of transition number `n` (1..=4).
    pub fn transition_energy(&self, n: usize) -> T {
        self.leg_energy(self.numbering.leg(n))
    }

    /// [ω_1, ω_2, ω_3, ω_4]
    pub fn transition_energies(&self) -> [T; 4] {
        [1, 2, 3, 4].map(|n| self.transition_energy(n))
    }

    pub fn transitions(&self) -> [TransitionLine<T>; 4] {
        [1, 2, 3, 4].map(|n| TransitionLine {
            number: n,
            leg: self.numbering.leg(n),
            energy: self.transition_energy(n),
        })
    }

    /// Transition numbers of the cavity-coupled legs.
    pub fn cavity_coupled_legs(&self) -> (usize, usize) {
        (2, 3)
    }

    /// Transition numbers of the cross-polarized (drive) legs.
    pub fn cross_polarized_legs(&self) -> (usize, usize) {
        (1, 4)
    }

    /// The two Λ systems, one per trion, each listing its (drive, emission) legs.
    pub fn lambda_systems(&self) -> [(Trion, Leg, Leg); 2] {
        [
            (Trion::T1, Leg::new(Trion::T1, Spin::Up), Leg::new(Trion::T1, Spin::Down)),
            (Trion::T2, Leg::new(Trion::T2, Spin::Down), Leg::new(Trion::T2, Spin::Up)),
        ]
    }
}

/// Level structure at the device's configured field.
pub fn build_level_structure<T: Real>(params: &DeviceParameters<T>) -> Result<LevelStructure<T>> {
    params.validate()?;
    let ez_e = zeeman_splitting(params.electron_g, params.magnetic_field)?;
    let ez_t = zeeman_splitting(params.trion_g, params.magnetic_field)?;
    Ok(LevelStructure::from_splittings(
        params.qd_center_energy,
        ez_e,
        ez_t,
        params.numbering,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_tesla_transitions() {
        let p = DeviceParameters::<f64>::default();
        let l = build_level_structure(&p).unwrap();
        let ex = 1_291_200.0;
        let w = l.transition_energies();
        assert!((w[0] - (ex - 74.09)).abs() < 5e-3);
        assert!((w[1] - (ex - 25.47)).abs() < 5e-3);
        assert!((w[2] - (ex + 25.47)).abs() < 5e-3);
        assert!((w[3] - (ex + 74.09)).abs() < 5e-3);
        // inner lines sit at the dot centroid seen in reflectance
        assert!((0.5 * (w[1] + w[2]) - 1_291_200.0).abs() < 1e-9);
    }

    #[test]
    fn zero_field_is_degenerate() {
        let p = DeviceParameters::<f64>::default().with_field(0.0);
        let l = build_level_structure(&p).unwrap();
        for w in l.transition_energies() {
            assert_eq!(w, p.qd_center_energy);
        }
    }

    #[test]
    fn numbering_roles() {
        let p = DeviceParameters::<f64>::default();
        let l = build_level_structure(&p).unwrap();
        assert_eq!(l.cavity_coupled_legs(), (2, 3));
        for n in [2, 3] {
            assert!(l.numbering.leg(n).is_cavity_coupled());
        }
        for n in [1, 4] {
            assert!(!l.numbering.leg(n).is_cavity_coupled());
        }
        let desc = LevelStructure {
            numbering: TransitionNumbering::Descending,
            ..l.clone()
        };
        assert_eq!(desc.transition_energy(1), l.transition_energy(4));
        assert!(desc.transition_energies().windows(2).all(|w| w[0] > w[1]));
        for n in 1..=4 {
            assert_eq!(desc.numbering.number(desc.numbering.leg(n)), n);
        }
    }

    #[test]
    fn each_trion_reaches_both_spins() {
        let l = build_level_structure(&DeviceParameters::<f64>::default()).unwrap();
        for (trion, drive, emit) in l.lambda_systems() {
            assert_eq!(drive.trion, trion);
            assert_eq!(emit.trion, trion);
            assert_ne!(drive.spin, emit.spin);
            assert!(!drive.is_cavity_coupled());
            assert!(emit.is_cavity_coupled());
        }
    }

    #[test]
    fn q_consistency() {
        let mut p = DeviceParameters::<f64> {
            cavity_q: Some(4000.0),
            ..Default::default()
        };
        let warnings = p.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("7.8%"), "{}", warnings[0]);
        p.cavity_q = Some(3000.0);
        assert!(p.validate().is_err());
        p.cavity_q = Some(0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn negative_rate_rejected() {
        let p = DeviceParameters::<f64> {
            cavity_hwhm: -1.0,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::InvalidParameter { key, .. }) => assert_eq!(key, "cavity_hwhm_ueV"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dipole_normalization() {
        let d = DipoleMoments {
            t1_up: 0.5,
            t1_down: 2.0,
            t2_up: 1.0,
            t2_down: 0.0,
        }
        .normalized();
        assert_eq!(d.t1_down, 1.0);
        assert_eq!(d.t1_up, 0.25);
        let zero = DipoleMoments::<f64> {
            t1_up: 0.0,
            t1_down: 0.0,
            t2_up: 0.0,
            t2_down: 0.0,
        };
        assert_eq!(zero.normalized(), zero);
    }

    #[test]
    fn default_flip_rate_is_plateau_edge() {
        let p = DeviceParameters::<f64>::default();
        // T1 = 20 ns at the plateau edge
        let t1 = HBAR_UEV_PS / (2.0 * p.spin_flip_rate);
        assert!((t1 - 2.0e4).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn level_identities(ex in 1.28e6f64..1.30e6, ge in 0.0f64..1.0, gt in 0.0f64..1.0, b in 0.0f64..8.0) {
            let p = DeviceParameters::<f64> {
                qd_center_energy: ex,
                electron_g: ge,
                trion_g: gt,
                magnetic_field: b,
                ..Default::default()
            };
            let l = build_level_structure(&p).unwrap();
            let w = l.transition_energies();
            let tol = 1e-9 * ex;
            // outer-line separation
            prop_assert!(((w[3] - w[0]) - (l.electron_zeeman + l.trion_zeeman)).abs() < tol);
            // centroid preservation
            prop_assert!((w[0] + w[3] - 2.0 * ex).abs() < tol);
            prop_assert!((w[1] + w[2] - 2.0 * ex).abs() < tol);
            // Raman shifts equal the electron Zeeman energy in each Λ system
            prop_assert!(((w[2] - w[0]) - l.electron_zeeman).abs() < tol);
            prop_assert!(((w[3] - w[1]) - l.electron_zeeman).abs() < tol);
        }
    }
}
