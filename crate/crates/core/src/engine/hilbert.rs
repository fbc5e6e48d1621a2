//! Product space of the four dot levels and a truncated cavity Fock ladder.
//!
//! Basis ordering: index = q·(N_max+1) + n with q ∈ {↓ = 0, ↑ = 1, T1 = 2,
//! T2 = 3} and n the photon number. Operators are `Q ⊗ P` Kronecker products
//! in this order.

use nalgebra::{DMatrix, DVector};

use crate::device::{Leg, Spin, Trion};
use crate::error::{Error, Result};
use crate::scalar::{lit, re, Cplx, Real};

pub type CMatrix<T> = DMatrix<Cplx<T>>;
pub type CVector<T> = DVector<Cplx<T>>;

pub const QD_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QdLevel {
    Down = 0,
    Up = 1,
    T1 = 2,
    T2 = 3,
}

impl QdLevel {
    pub fn ground(spin: Spin) -> Self {
        match spin {
            Spin::Down => QdLevel::Down,
            Spin::Up => QdLevel::Up,
        }
    }

    pub fn trion(trion: Trion) -> Self {
        match trion {
            Trion::T1 => QdLevel::T1,
            Trion::T2 => QdLevel::T2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    fock_cutoff: usize,
}

impl HilbertSpace {
    pub fn new(fock_cutoff: usize) -> Result<Self> {
        if fock_cutoff < 1 {
            return Err(Error::param("fock_cutoff", "photon cutoff N_max must be >= 1"));
        }
        Ok(Self { fock_cutoff })
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn total_dim(&self) -> usize {
        QD_DIM * self.fock_dim()
    }

    pub fn index(&self, level: QdLevel, photons: usize) -> usize {
        assert!(photons <= self.fock_cutoff);
        level as usize * self.fock_dim() + photons
    }

    fn qd_op<T: Real>(&self, entries: &[(QdLevel, QdLevel, T)]) -> CMatrix<T> {
        let mut q = CMatrix::zeros(QD_DIM, QD_DIM);
        for &(r, c, v) in entries {
            q[(r as usize, c as usize)] += re(v);
        }
        q
    }

    fn fock_identity<T: Real>(&self) -> CMatrix<T> {
        CMatrix::identity(self.fock_dim(), self.fock_dim())
    }

    /// Photon annihilator on the truncated ladder.
    pub fn fock_annihilation<T: Real>(&self) -> CMatrix<T> {
        let n = self.fock_dim();
        let mut a = CMatrix::zeros(n, n);
        for k in 1..n {
            a[(k - 1, k)] = re(lit::<T>(k as f64).sqrt());
        }
        a
    }

    pub fn identity<T: Real>(&self) -> CMatrix<T> {
        CMatrix::identity(self.total_dim(), self.total_dim())
    }

    /// `I_qd ⊗ a`
    pub fn annihilation<T: Real>(&self) -> CMatrix<T> {
        CMatrix::<T>::identity(QD_DIM, QD_DIM).kronecker(&self.fock_annihilation())
    }

    /// `I_qd ⊗ a†a`
    pub fn number<T: Real>(&self) -> CMatrix<T> {
        let a = self.fock_annihilation::<T>();
        CMatrix::<T>::identity(QD_DIM, QD_DIM).kronecker(&(a.adjoint() * a))
    }

    /// `|level⟩⟨level| ⊗ I`
    pub fn projector<T: Real>(&self, level: QdLevel) -> CMatrix<T> {
        self.qd_op(&[(level, level, T::one())])
            .kronecker(&self.fock_identity())
    }

    /// `|to⟩⟨from| ⊗ I`
    pub fn qd_transition<T: Real>(&self, to: QdLevel, from: QdLevel) -> CMatrix<T> {
        self.qd_op(&[(to, from, T::one())])
            .kronecker(&self.fock_identity())
    }

    /// Lowering operator `|g⟩⟨T| ⊗ I` of an optical leg.
    pub fn lowering<T: Real>(&self, leg: Leg) -> CMatrix<T> {
        self.qd_transition(QdLevel::ground(leg.spin), QdLevel::trion(leg.trion))
    }

    /// `I_qd ⊗ |n⟩⟨n|`
    pub fn fock_projector<T: Real>(&self, photons: usize) -> CMatrix<T> {
        let mut p = CMatrix::zeros(self.fock_dim(), self.fock_dim());
        p[(photons, photons)] = re(T::one());
        CMatrix::<T>::identity(QD_DIM, QD_DIM).kronecker(&p)
    }

    /// Embeds a dot-only operator.
    pub fn embed_qd<T: Real>(&self, q: &CMatrix<T>) -> CMatrix<T> {
        q.kronecker(&self.fock_identity())
    }
}
