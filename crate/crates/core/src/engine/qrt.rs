//! Cavity emission spectra and photon correlations by the quantum
//! regression theorem.
//!
//! With ν = ω − ω_L, the incoherent spectrum is
//!
//! ```text
//! S(ν) = (κ/π) Re Tr[a† (iν − L')⁻¹ Y],   Y = aρ − Tr(aρ) ρ_ss
//! ```
//!
//! where `L'X = LX − ρ_ss Tr X` removes the stationary pole. The coherent
//! part is a delta of weight κ|⟨a⟩|² at ν = 0, reported separately.


use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::scalar::{im, lit, re, to_f64, Cplx, Real};
use crate::spectrum::{csv_string, Spectrum};
use crate::units::HBAR_UEV_PS;

use crate::device::Leg;

use super::density::DensityMatrix;
use super::evolve::ExpCache;
use super::hilbert::{CMatrix, CVector};
use super::model::LindbladModel;
use super::resolvent::HessenbergResolvent;
use super::steady::steady_state;

/// Contour points for sideband residues.
const CONTOUR_POINTS: usize = 96;

pub struct EmissionAnalysis<T: Real> {
    resolvent: HessenbergResolvent<T>,
    row_q: CVector<T>,
    col_q: CVector<T>,
    kappa: T,
    laser_energy: T,
    electron_zeeman: T,
    sideband_width: T,
    photon_number: T,
    coherent_amplitude: Cplx<T>,
}

/// Sideband weights from the residues at ν = ∓E_z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandWeights<T> {
    pub stokes: T,
    pub anti_stokes: T,
}

impl<T: Real> EmissionAnalysis<T> {
    /// Stationary emission.
    pub fn new(model: &LindbladModel<T>) -> Result<Self> {
        let rho = steady_state(model)?;
        Self::from_states(model, &rho, &rho)
    }

    /// Emission seeded by `rho` (a quasi-stationary state), regularized with
    /// the true steady state `rho_ss`. Linear in `rho`.
    pub fn from_states(
        model: &LindbladModel<T>,
        rho_ss: &DensityMatrix<T>,
        rho: &DensityMatrix<T>,
    ) -> Result<Self> {
        let space = model.space();
        let d = space.total_dim();
        let a = space.annihilation::<T>();
        let a_rho = &a * rho.matrix();
        let mean_a = a_rho.trace();
        let y = a_rho - rho_ss.matrix() * mean_a;

        // L' = L − vec(ρ_ss) ⊗ trace functional
        let mut lp = model.liouvillian().clone();
        let ss = rho_ss.to_vec();
        for i in 0..d {
            let col = i + i * d;
            for r in 0..d * d {
                lp[(r, col)] -= ss[r];
            }
        }
        let resolvent = HessenbergResolvent::new(lp);
        // Tr[a† X] = Σ_ij (a†)_ij X_ji = vec((a†)ᵀ) · vec(X)
        let a_dag_t = a.adjoint().transpose();
        let row = CVector::from_column_slice(a_dag_t.as_slice());
        let col = CVector::from_column_slice(y.as_slice());
        let row_q = resolvent.project_row(&row);
        let col_q = resolvent.project_col(&col);

        let spin_decoherence = model
            .channel_rate("spin_dephasing")
            .map(|r| lit::<T>(2.0) * r)
            .unwrap_or(T::zero())
            + model.channel_rate("spin_flip_up_to_down").unwrap_or(T::zero());
        Ok(Self {
            resolvent,
            row_q,
            col_q,
            kappa: model.kappa(),
            laser_energy: model.laser_energy(),
            electron_zeeman: model.electron_zeeman(),
            sideband_width: spin_decoherence,
            photon_number: rho.photon_number(),
            coherent_amplitude: mean_a,
        })
    }

    fn resolvent_at(&self, z: Cplx<T>) -> Cplx<T> {
        self.resolvent.bilinear(z, &self.row_q, &self.col_q)
    }

    /// Incoherent spectral density at ν = ω − ω_L (μeV).
    pub fn density(&self, nu: T) -> T {
        self.kappa / T::pi() * self.resolvent_at(im(nu)).re
    }

    /// κ⟨a†a⟩: total emitted flux (μeV, i.e. photons per ħ/μeV).
    pub fn photon_flux(&self) -> T {
        self.kappa * self.photon_number
    }

    pub fn photon_number(&self) -> T {
        self.photon_number
    }

    /// κ|⟨a⟩|², the coherently scattered part at ν = 0.
    pub fn coherent_weight(&self) -> T {
        self.kappa * self.coherent_amplitude.modulus_squared()
    }

    /// Sideband half-width γ_s + Γ_ct expected from the collapse rates.
    pub fn sideband_hwhm(&self) -> T {
        self.sideband_width
    }

    /// Spectrum on absolute photon energies (μeV). The grid must resolve the
    /// sidebands: spacing ≤ half their HWHM.
    pub fn spectrum(&self, grid: &[T]) -> Result<Spectrum<T>> {
        crate::spectrum::check_grid(grid)?;
        let limit = self.sideband_width / lit(2.0);
        let step = grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), |m, x| m.max(x));
        if limit > T::zero() && step > limit {
            return Err(Error::Undersampled {
                spacing: to_f64(step),
                limit: to_f64(limit),
            });
        }
        let values: Vec<T> = grid
            .iter()
            .map(|&w| self.density(w - self.laser_energy).max(T::zero()))
            .collect();
        Spectrum::new(grid.to_vec(), values)
    }

    /// Integrated weight of the pole nearest ν = `center`, by a trapezoidal
    /// contour integral of radius `radius` around −γ + i·center.
    pub fn pole_weight(&self, center: T, radius: T) -> T {
        let z0 = Cplx::new(-self.sideband_width, center);
        let n = CONTOUR_POINTS;
        let mut acc = Cplx::new(T::zero(), T::zero());
        for k in 0..n {
            let phase = lit::<T>(2.0) * T::pi() * lit::<T>(k as f64 + 0.5) / lit::<T>(n as f64);
            let e = Cplx::new(phase.cos(), phase.sin());
            acc += self.resolvent_at(z0 + e * re(radius)) * e;
        }
        let residue = acc * re(radius / lit::<T>(n as f64));
        self.kappa * residue.re
    }

    /// Stokes (ν = −E_z) and anti-Stokes (ν = +E_z) weights.
    pub fn sideband_weights(&self) -> SidebandWeights<T> {
        let ez = self.electron_zeeman;
        let radius = (lit::<T>(3.0) * self.sideband_width)
            .max(lit(0.5))
            .min(ez.abs() / lit(2.0));
        SidebandWeights {
            stokes: self.pole_weight(-ez, radius),
            anti_stokes: self.pole_weight(ez, radius),
        }
    }

    /// ∫ S(ν) dν over the real line: fine trapezoid on |ν| ≤ `inner`,
    /// ν = inner/u substitution for the tails.
    pub fn integrated_incoherent(&self, inner: T, step: T) -> T {
        let n = to_f64(lit::<T>(2.0) * inner / step).ceil() as usize;
        let h = lit::<T>(2.0) * inner / lit::<T>(n as f64);
        let mut core = T::zero();
        for k in 0..=n {
            let w = if k == 0 || k == n { lit(0.5) } else { T::one() };
            core += w * self.density(-inner + h * lit::<T>(k as f64));
        }
        core *= h;
        let m = 400;
        let mut tails = T::zero();
        for k in 0..m {
            let u = (lit::<T>(k as f64) + lit(0.5)) / lit::<T>(m as f64);
            let nu = inner / u;
            tails += (self.density(nu) + self.density(-nu)) * inner / (u * u);
        }
        core + tails / lit::<T>(m as f64)
    }
}

/// Stationary cavity emission spectrum on absolute energies (μeV).
pub fn emission_spectrum<T: Real>(model: &LindbladModel<T>, grid: &[T]) -> Result<Spectrum<T>> {
    EmissionAnalysis::new(model)?.spectrum(grid)
}

pub fn sideband_weights<T: Real>(model: &LindbladModel<T>) -> Result<SidebandWeights<T>> {
    Ok(EmissionAnalysis::new(model)?.sideband_weights())
}

/// Sampled g²(τ).
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTrace<T> {
    tau_ps: Vec<T>,
    values: Vec<T>,
    /// ⟨a†a⟩_ss used for normalization.
    pub photon_number: T,
}

impl<T: Real> CorrelationTrace<T> {
    pub fn new(tau_ps: Vec<T>, values: Vec<T>, photon_number: T) -> Result<Self> {
        crate::spectrum::check_grid(&tau_ps)?;
        assert_eq!(tau_ps.len(), values.len());
        if let Some(index) = values.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidSpectrumValue {
                index,
                value: to_f64(values[index]),
            });
        }
        Ok(Self {
            tau_ps,
            values,
            photon_number,
        })
    }

    pub fn tau_ps(&self) -> &[T] {
        &self.tau_ps
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at the sample nearest τ = `tau`.
    pub fn at(&self, tau: T) -> T {
        let i = self
            .tau_ps
            .iter()
            .enumerate()
            .fold((0, T::max_value().unwrap()), |(bi, bd), (i, &t)| {
                let d = (t - tau).abs();
                if d < bd {
                    (i, d)
                } else {
                    (bi, bd)
                }
            })
            .0;
        self.values[i]
    }

    /// CSV with header `tau_ps,g2`.
    pub fn to_csv(&self) -> String {
        csv_string(
            None,
            &["tau_ps", "g2"],
            self.tau_ps
                .iter()
                .zip(&self.values)
                .map(|(t, g)| vec![to_f64(*t), to_f64(*g)]),
        )
    }
}

/// g²(τ) = Tr[a†a e^{L|τ|}(a ρ_ss a†)] / ⟨a†a⟩²_ss on a delay grid in ps.
pub fn g2<T: Real>(model: &LindbladModel<T>, tau_ps: &[T]) -> Result<CorrelationTrace<T>> {
    let a = model.space().annihilation::<T>();
    correlation(model, &a, tau_ps)
}

/// Intensity correlation of the photons emitted on one transition,
/// with the leg lowering operator σ in place of a. This is the correlation
/// seen behind a filter that passes a single Raman line.
pub fn g2_leg<T: Real>(
    model: &LindbladModel<T>,
    leg: Leg,
    tau_ps: &[T],
) -> Result<CorrelationTrace<T>> {
    let sigma = model.space().lowering::<T>(leg);
    correlation(model, &sigma, tau_ps)
}

fn correlation<T: Real>(
    model: &LindbladModel<T>,
    op: &CMatrix<T>,
    tau_ps: &[T],
) -> Result<CorrelationTrace<T>> {
    crate::spectrum::check_grid(tau_ps)?;
    let rho = steady_state(model)?;
    let space = model.space();
    let num = op.adjoint() * op;
    let n_ss = (&num * rho.matrix()).trace().re;
    if !(n_ss > T::zero()) {
        return Err(Error::ZeroFlux);
    }
    let conditioned = op * rho.matrix() * op.adjoint();
    let mut y = CVector::from_column_slice(conditioned.as_slice());

    let hbar = lit::<T>(HBAR_UEV_PS);
    let mut order: Vec<(usize, T)> = tau_ps.iter().map(|t| t.abs()).enumerate().collect();
    order.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());

    let mut cache = ExpCache::new(model.liouvillian());
    let mut values = vec![T::zero(); tau_ps.len()];
    let mut t = T::zero();
    let d = space.total_dim();
    let norm = n_ss * n_ss;
    for (i, tau) in order {
        let dt = tau - t;
        if dt > T::zero() {
            y = cache.apply(y, dt / hbar);
            t = tau;
        }
        let m = CMatrix::from_column_slice(d, d, y.as_slice());
        let v = (&num * m).trace().re / norm;
        values[i] = v.max(T::zero());
    }
    CorrelationTrace::new(tau_ps.to_vec(), values, n_ss)
}
