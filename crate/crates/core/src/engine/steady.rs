use crate::error::{Error, Result};
use crate::scalar::{lit, re, to_f64, Real};

use super::density::{tolerance, DensityMatrix, TRUNCATION_LIMIT};
use super::hilbert::CVector;
use super::model::LindbladModel;

/// Null-space dimension of the Liouvillian, from its singular values.
pub fn null_space_dimension<T: Real>(model: &LindbladModel<T>) -> usize {
    let l = model.liouvillian();
    let sv = l.singular_values();
    let max = sv.iter().fold(T::zero(), |m, &x| m.max(x));
    let tol = max * T::default_epsilon() * lit((l.nrows() as f64).sqrt());
    sv.iter().filter(|&&s| s <= tol).count().max(1)
}

/// ‖L vec(ρ)‖₂
pub fn steady_state_residual<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> T {
    (model.liouvillian() * rho.to_vec()).norm()
}

/// Unique trace-one null vector of the Liouvillian.
pub fn steady_state<T: Real>(model: &LindbladModel<T>) -> Result<DensityMatrix<T>> {
    let nullity = null_space_dimension(model);
    if nullity > 1 {
        return Err(Error::NonUniqueSteadyState { dimension: nullity });
    }
    let space = model.space();
    let d = space.total_dim();
    let l = model.liouvillian();

    // Replace the ρ_00 equation by the trace condition.
    let mut m = l.clone();
    for k in 0..d * d {
        m[(0, k)] = re(T::zero());
    }
    for i in 0..d {
        m[(0, i + i * d)] = re(T::one());
    }
    let mut rhs = CVector::<T>::zeros(d * d);
    rhs[0] = re(T::one());
    let lu = m.clone().lu();
    let mut v = lu
        .solve(&rhs)
        .ok_or(Error::NonUniqueSteadyState { dimension: 2 })?;
    // one step of iterative refinement
    let r = &rhs - &m * &v;
    if let Some(dv) = lu.solve(&r) {
        v += dv;
    }

    let raw = DensityMatrix::from_vec(space, &v);
    let herm = (raw.matrix() + raw.matrix().adjoint()) * re(lit::<T>(0.5));
    let tr = herm.trace().re;
    let rho = DensityMatrix::from_matrix(space, herm * re(T::one() / tr))?;

    let residual = steady_state_residual(model, &rho);
    if residual > tolerance(1e-9) {
        return Err(Error::InvariantViolation(format!(
            "steady-state residual {:e} exceeds 1e-9",
            to_f64(residual)
        )));
    }
    rho.check_invariants()?;
    rho.check_truncation(lit(TRUNCATION_LIMIT))?;
    Ok(rho)
}
