//! Rotating-frame Hamiltonian, collapse channels and the Liouvillian
//! superoperator.
//!
//! Frame: the laser frequency ω_L, with the rotating-wave approximation on
//! both the drive and the cavity coupling. Superoperators act on the
//! column-major vectorization, `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use std::fmt::Write as _;

use nalgebra::ComplexField;

use crate::device::{DeviceParameters, Leg, LevelStructure, Spin, Trion, LEGS};
use crate::error::{Error, Result};
use crate::scalar::{im, lit, re, to_f64, Cplx, Real};

use super::hilbert::{CMatrix, HilbertSpace, QdLevel};

pub const DEFAULT_FOCK_CUTOFF: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelOptions {
    pub fock_cutoff: usize,
    /// Shift the bare trion energies so the cavity-dressed transitions sit at
    /// the configured (measured) energies.
    pub lamb_shift_compensation: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
            lamb_shift_compensation: true,
        }
    }
}

/// `L = √rate · operator`
#[derive(Clone, Debug)]
pub struct CollapseChannel<T: Real> {
    pub label: String,
    pub rate: T,
    pub operator: CMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct LindbladModel<T: Real> {
    space: HilbertSpace,
    hamiltonian: CMatrix<T>,
    channels: Vec<CollapseChannel<T>>,
    liouvillian: CMatrix<T>,
    laser_energy: T,
    cavity_detuning: T,
    kappa: T,
    electron_zeeman: T,
    lamb_shifts: [T; 2],
}

/// Polarization overlap of the laser with a leg (laser ⊥ cavity).
fn drive_projection<T: Real>(leg: Leg, theta: T) -> T {
    if leg.is_cavity_coupled() {
        theta.sin()
    } else {
        theta.cos()
    }
}

/// Overlap of a leg's dipole with the cavity polarization.
fn cavity_projection<T: Real>(leg: Leg, theta: T) -> T {
    if leg.is_cavity_coupled() {
        theta.cos()
    } else {
        -theta.sin()
    }
}

/// Real part of the vacuum cavity self-energy of each trion, [T1, T2].
pub fn lamb_shifts<T: Real>(params: &DeviceParameters<T>, levels: &LevelStructure<T>) -> [T; 2] {
    let kappa = lit::<T>(2.0) * params.cavity_hwhm;
    let shift = |trion: Trion| {
        [Spin::Down, Spin::Up]
            .into_iter()
            .map(|spin| {
                let leg = Leg::new(trion, spin);
                let g = params.qd_cavity_coupling
                    * params.dipoles.normalized().get(leg)
                    * cavity_projection(leg, params.polarization_mixing_angle);
                let delta = (levels.qd_center_energy - params.cavity_energy)
                    + levels.detuning_from_center(leg);
                g * g * delta / (delta * delta + kappa * kappa / lit(4.0))
            })
            .fold(T::zero(), |a, b| a + b)
    };
    [shift(Trion::T1), shift(Trion::T2)]
}

pub fn build_model<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    laser_energy: T,
    fock_cutoff: usize,
) -> Result<LindbladModel<T>> {
    build_model_with(
        params,
        levels,
        laser_energy,
        &ModelOptions {
            fock_cutoff,
            ..ModelOptions::default()
        },
    )
}

pub fn build_model_with<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    laser_energy: T,
    options: &ModelOptions,
) -> Result<LindbladModel<T>> {
    params.validate()?;
    if !laser_energy.is_finite() {
        return Err(Error::param("laser_energy_ueV", "must be finite"));
    }
    let space = HilbertSpace::new(options.fock_cutoff)?;
    let dim = space.total_dim();
    let half = lit::<T>(0.5);
    let theta = params.polarization_mixing_angle;
    let mu = params.dipoles.normalized();

    let shifts = if options.lamb_shift_compensation {
        lamb_shifts(params, levels)
    } else {
        [T::zero(); 2]
    };

    // Energies in the laser frame, referenced to E_X for precision.
    let laser_offset = laser_energy - levels.qd_center_energy;
    let cavity_detuning = (params.cavity_energy - levels.qd_center_energy) - laser_offset;
    let mut h = CMatrix::<T>::zeros(dim, dim);
    for spin in [Spin::Down, Spin::Up] {
        h += space.projector::<T>(QdLevel::ground(spin)) * re(levels.ground_energy(spin));
    }
    for (i, trion) in [Trion::T1, Trion::T2].into_iter().enumerate() {
        let rel = levels.trion_energy(trion) - levels.qd_center_energy;
        h += space.projector::<T>(QdLevel::trion(trion)) * re(rel - laser_offset - shifts[i]);
    }
    h += space.number::<T>() * re(cavity_detuning);

    let a = space.annihilation::<T>();
    let a_dag = a.adjoint();
    for leg in LEGS {
        let sigma = space.lowering::<T>(leg);
        let drive = half * params.drive_rabi * mu.get(leg) * drive_projection(leg, theta);
        if drive != T::zero() {
            h += (&sigma + sigma.adjoint()) * re(drive);
        }
        let g = params.qd_cavity_coupling * mu.get(leg) * cavity_projection(leg, theta);
        if g != T::zero() {
            let up = &a * sigma.adjoint();
            h += (&a_dag * &sigma + up) * re(g);
        }
    }

    let kappa = lit::<T>(2.0) * params.cavity_hwhm;
    let mut channels = vec![CollapseChannel {
        label: "cavity_decay".into(),
        rate: kappa,
        operator: a.clone(),
    }];
    for trion in [Trion::T1, Trion::T2] {
        let down = Leg::new(trion, Spin::Down);
        let up = Leg::new(trion, Spin::Up);
        let total = mu.get(down) * mu.get(down) + mu.get(up) * mu.get(up);
        for leg in [down, up] {
            if total > T::zero() {
                channels.push(CollapseChannel {
                    label: format!("radiative_{:?}_{:?}", leg.trion, leg.spin).to_lowercase(),
                    rate: params.radiative_rate * mu.get(leg) * mu.get(leg) / total,
                    operator: space.lowering(leg),
                });
            }
        }
    }
    channels.push(CollapseChannel {
        label: "spin_dephasing".into(),
        rate: half * params.spin_dephasing_rate,
        operator: space.projector::<T>(QdLevel::Up) - space.projector::<T>(QdLevel::Down),
    });
    channels.push(CollapseChannel {
        label: "spin_flip_down_to_up".into(),
        rate: params.spin_flip_rate,
        operator: space.qd_transition(QdLevel::Up, QdLevel::Down),
    });
    channels.push(CollapseChannel {
        label: "spin_flip_up_to_down".into(),
        rate: params.spin_flip_rate,
        operator: space.qd_transition(QdLevel::Down, QdLevel::Up),
    });
    channels.push(CollapseChannel {
        label: "trion_dephasing".into(),
        rate: lit::<T>(2.0) * params.trion_dephasing_rate,
        operator: space.projector::<T>(QdLevel::T1) + space.projector::<T>(QdLevel::T2),
    });
    channels.retain(|c| c.rate > T::zero());

    let liouvillian = liouvillian(&h, &channels);
    let model = LindbladModel {
        space,
        hamiltonian: h,
        channels,
        liouvillian,
        laser_energy,
        cavity_detuning,
        kappa,
        electron_zeeman: levels.electron_zeeman,
        lamb_shifts: shifts,
    };
    let herm = model.hermiticity_error();
    if herm > lit(1e-12) {
        return Err(Error::InvariantViolation(format!(
            "Hamiltonian not Hermitian (relative error {})",
            to_f64(herm)
        )));
    }
    Ok(model)
}

/// Liouvillian superoperator on column-major vectorized density matrices.
pub fn liouvillian<T: Real>(h: &CMatrix<T>, channels: &[CollapseChannel<T>]) -> CMatrix<T> {
    let d = h.nrows();
    let id = CMatrix::<T>::identity(d, d);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * im(-T::one());
    let half = re(lit::<T>(0.5));
    for c in channels {
        let op = &c.operator * re(c.rate.sqrt());
        let op_dag_op = op.adjoint() * &op;
        l += op.conjugate().kronecker(&op);
        l -= id.kronecker(&op_dag_op) * half;
        l -= op_dag_op.transpose().kronecker(&id) * half;
    }
    l
}

impl<T: Real> LindbladModel<T> {
    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn hamiltonian(&self) -> &CMatrix<T> {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[CollapseChannel<T>] {
        &self.channels
    }

    pub fn liouvillian(&self) -> &CMatrix<T> {
        &self.liouvillian
    }

    pub fn laser_energy(&self) -> T {
        self.laser_energy
    }

    /// Δ_c = ω_c − ω_L
    pub fn cavity_detuning(&self) -> T {
        self.cavity_detuning
    }

    /// Cavity energy decay rate κ = 2Γ.
    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn electron_zeeman(&self) -> T {
        self.electron_zeeman
    }

    /// Compensating shifts applied to the bare [T1, T2] energies.
    pub fn lamb_shifts(&self) -> [T; 2] {
        self.lamb_shifts
    }

    pub fn channel_rate(&self, label: &str) -> Option<T> {
        self.channels.iter().find(|c| c.label == label).map(|c| c.rate)
    }

    /// max |H − H†| / max |H|
    pub fn hermiticity_error(&self) -> T {
        let scale = self.hamiltonian.iter().fold(T::zero(), |m, z| m.max(z.modulus()));
        let diff = (&self.hamiltonian - self.hamiltonian.adjoint())
            .iter()
            .fold(T::zero(), |m, z| m.max(z.modulus()));
        if scale > T::zero() {
            diff / scale
        } else {
            diff
        }
    }

    /// Largest |Σ_i L[(i,i), k]| over columns k: the trace functional must be
    /// a left null vector.
    pub fn trace_defect(&self) -> T {
        let d = self.space.total_dim();
        (0..d * d)
            .map(|k| {
                (0..d)
                    .map(|i| self.liouvillian[(i + i * d, k)])
                    .fold(Cplx::new(T::zero(), T::zero()), |a, b| a + b)
                    .modulus()
            })
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// Plain-text summary for regression diffing.
    pub fn summary_report(&self) -> String {
        let mut out = String::new();
        let d = self.space.total_dim();
        let fro = self.hamiltonian.iter().fold(0.0, |s, z| s + to_f64(z.modulus_squared())).sqrt();
        writeln!(out, "hilbert_dim = {d}").unwrap();
        writeln!(out, "fock_cutoff = {}", self.space.fock_cutoff()).unwrap();
        writeln!(out, "liouvillian_dim = {}", d * d).unwrap();
        writeln!(out, "laser_energy_ueV = {}", to_f64(self.laser_energy)).unwrap();
        writeln!(out, "cavity_detuning_ueV = {}", to_f64(self.cavity_detuning)).unwrap();
        writeln!(out, "hamiltonian_frobenius_norm_ueV = {fro:.9e}").unwrap();
        writeln!(
            out,
            "lamb_shift_t1_ueV = {:.9e}\nlamb_shift_t2_ueV = {:.9e}",
            to_f64(self.lamb_shifts[0]),
            to_f64(self.lamb_shifts[1])
        )
        .unwrap();
        for c in &self.channels {
            writeln!(out, "rate.{} = {:.9e}", c.label, to_f64(c.rate)).unwrap();
        }
        out
    }
}
