use nalgebra::ComplexField;

use crate::device::Spin;
use crate::error::{Error, Result};
use crate::scalar::{lit, re, to_f64, Cplx, Real};

use super::hilbert::{CMatrix, CVector, HilbertSpace, QdLevel};

/// Tolerances scaled to the working precision: `base` for `f64`, loosened in
/// proportion to machine epsilon for coarser types.
pub(crate) fn tolerance<T: Real>(base: f64) -> T {
    let eps = to_f64(T::default_epsilon());
    lit(base.max(eps * 1e4))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    space: HilbertSpace,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps a matrix without checking the physical invariants.
    pub fn from_matrix(space: HilbertSpace, matrix: CMatrix<T>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvariantViolation(format!(
                "density matrix is {}x{}, expected {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub(crate) fn from_vec(space: HilbertSpace, v: &CVector<T>) -> Self {
        let d = space.total_dim();
        Self {
            space,
            matrix: CMatrix::from_column_slice(d, d, v.as_slice()),
        }
    }

    /// (ρ + ρ†)/2
    pub(crate) fn hermitized(mut self) -> Self {
        self.matrix = (&self.matrix + self.matrix.adjoint()) * re(lit::<T>(0.5));
        self
    }

    pub(crate) fn to_vec(&self) -> CVector<T> {
        CVector::from_column_slice(self.matrix.as_slice())
    }

    /// Ground doublet with the given populations and coherence ⟨↑|ρ|↓⟩,
    /// cavity in vacuum.
    pub fn ground_state(space: HilbertSpace, p_up: T, coherence: Cplx<T>) -> Self {
        let d = space.total_dim();
        let mut m = CMatrix::zeros(d, d);
        let up = space.index(QdLevel::Up, 0);
        let down = space.index(QdLevel::Down, 0);
        m[(up, up)] = re(p_up);
        m[(down, down)] = re(T::one() - p_up);
        m[(up, down)] = coherence;
        m[(down, up)] = coherence.conj();
        Self { space, matrix: m }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> Cplx<T> {
        self.matrix.trace()
    }

    /// Tr(op ρ)
    pub fn expectation(&self, op: &CMatrix<T>) -> Cplx<T> {
        (op * &self.matrix).trace()
    }

    pub fn level_population(&self, level: QdLevel) -> T {
        let n = self.space.fock_dim();
        let base = level as usize * n;
        (0..n).fold(T::zero(), |s, k| s + self.matrix[(base + k, base + k)].re)
    }

    pub fn spin_population(&self, spin: Spin) -> T {
        self.level_population(QdLevel::ground(spin))
    }

    /// Population with exactly `photons` cavity photons.
    pub fn fock_population(&self, photons: usize) -> T {
        (0..4).fold(T::zero(), |s, q| {
            let i = q * self.space.fock_dim() + photons;
            s + self.matrix[(i, i)].re
        })
    }

    pub fn photon_number(&self) -> T {
        (1..=self.space.fock_cutoff()).fold(T::zero(), |s, n| {
            s + lit::<T>(n as f64) * self.fock_population(n)
        })
    }

    /// Largest entry of |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> T {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(T::zero(), |m, z| m.max(z.modulus()))
    }

    pub fn min_eigenvalue(&self) -> T {
        let h = (&self.matrix + self.matrix.adjoint()) * re(lit::<T>(0.5));
        h.symmetric_eigenvalues()
            .iter()
            .fold(T::max_value().unwrap(), |m, &x| m.min(x))
    }

    /// ½ ‖ρ − σ‖₁
    pub fn trace_distance(&self, other: &Self) -> T {
        let diff = &self.matrix - &other.matrix;
        let h = (&diff + diff.adjoint()) * re(lit::<T>(0.5));
        h.symmetric_eigenvalues()
            .iter()
            .fold(T::zero(), |s, x| s + x.abs())
            * lit(0.5)
    }

    /// Hermiticity ≤ 1e-10, |Tr ρ − 1| ≤ 1e-10, λ_min ≥ −1e-9.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tolerance(1e-10) {
            return Err(Error::InvariantViolation(format!(
                "hermiticity error {:e}",
                to_f64(herm)
            )));
        }
        let tr = self.trace();
        if (tr - re(T::one())).modulus() > tolerance(1e-10) {
            return Err(Error::InvariantViolation(format!(
                "trace {} differs from 1",
                to_f64(tr.re)
            )));
        }
        let min = self.min_eigenvalue();
        if min < -tolerance::<T>(1e-9) {
            return Err(Error::InvariantViolation(format!(
                "negative eigenvalue {:e}",
                to_f64(min)
            )));
        }
        Ok(())
    }

    /// Population in the highest retained Fock level must stay below `limit`.
    pub fn check_truncation(&self, limit: T) -> Result<()> {
        let top = self.fock_population(self.space.fock_cutoff());
        if top > limit {
            return Err(Error::TruncationExceeded {
                population: to_f64(top),
                cutoff: self.space.fock_cutoff(),
                limit: to_f64(limit),
            });
        }
        Ok(())
    }
}

/// Guard on the highest Fock population.
pub const TRUNCATION_LIMIT: f64 = 1e-4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_invariants() {
        let s = HilbertSpace::new(2).unwrap();
        let rho = DensityMatrix::<f64>::ground_state(s, 0.3, Cplx::new(0.1, 0.2));
        rho.check_invariants().unwrap();
        assert!((rho.spin_population(Spin::Up) - 0.3).abs() < 1e-15);
        assert_eq!(rho.photon_number(), 0.0);
        let bad = DensityMatrix::<f64>::ground_state(s, 0.5, Cplx::new(0.6, 0.0));
        assert!(bad.check_invariants().is_err());
        let other = DensityMatrix::<f64>::ground_state(s, 0.8, Cplx::new(0.0, 0.0));
        let plain = DensityMatrix::<f64>::ground_state(s, 0.3, Cplx::new(0.0, 0.0));
        assert!((plain.trace_distance(&other) - 0.5).abs() < 1e-12);
    }
}
