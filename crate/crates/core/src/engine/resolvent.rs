//! Resolvent `(σ − M)⁻¹` for many shifts σ via one Hessenberg reduction.
//!
//! `M = Q H Q*` once (O(n³)); each shifted solve is then O(n²).

use nalgebra::ComplexField;

use crate::scalar::{Cplx, Real};

use super::hilbert::{CMatrix, CVector};

pub(crate) struct HessenbergResolvent<T: Real> {
    q: CMatrix<T>,
    h: CMatrix<T>,
}

impl<T: Real> HessenbergResolvent<T> {
    pub fn new(m: CMatrix<T>) -> Self {
        let (q, h) = m.hessenberg().unpack();
        Self { q, h }
    }

    /// `row · Q`, for a bilinear form `row · (σ − M)⁻¹ · col`.
    pub fn project_row(&self, row: &CVector<T>) -> CVector<T> {
        (row.transpose() * &self.q).transpose()
    }

    /// `Q* · col`
    pub fn project_col(&self, col: &CVector<T>) -> CVector<T> {
        self.q.adjoint() * col
    }

    /// `row_q · (σ − H)⁻¹ · col_q` with projected vectors.
    pub fn bilinear(&self, sigma: Cplx<T>, row_q: &CVector<T>, col_q: &CVector<T>) -> Cplx<T> {
        let x = self.solve_shifted(sigma, col_q);
        row_q.iter().zip(x.iter()).fold(Cplx::new(T::zero(), T::zero()), |s, (a, b)| s + *a * *b)
    }

    /// Solves `(σ − H) x = b` by Gaussian elimination with adjacent-row
    /// pivoting, which preserves the Hessenberg pattern.
    fn solve_shifted(&self, sigma: Cplx<T>, b: &CVector<T>) -> CVector<T> {
        let n = self.h.nrows();
        let mut a = -&self.h;
        for i in 0..n {
            a[(i, i)] += sigma;
        }
        let mut x = b.clone();
        for k in 0..n.saturating_sub(1) {
            if a[(k + 1, k)].modulus() > a[(k, k)].modulus() {
                for j in k..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(k + 1, j)];
                    a[(k + 1, j)] = tmp;
                }
                x.swap_rows(k, k + 1);
            }
            let pivot = a[(k, k)];
            if pivot.modulus() == T::zero() {
                continue;
            }
            let f = a[(k + 1, k)] / pivot;
            if f.modulus() != T::zero() {
                for j in k..n {
                    let v = a[(k, j)];
                    a[(k + 1, j)] -= f * v;
                }
                let xk = x[k];
                x[k + 1] -= f * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        x
    }
}
