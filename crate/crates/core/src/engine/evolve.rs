//! Time evolution of the master equation.
//!
//! Two independent propagators: adaptive Dormand–Prince 5(4) on the
//! vectorized state, and the exact exponential `exp(L Δt)` applied between
//! output samples. The second is used for long horizons where the optical
//! coherences force the explicit integrator into tiny steps.

use std::collections::HashMap;

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::scalar::{lit, re, to_f64, Real};
use crate::units::HBAR_UEV_PS;

use super::density::{tolerance, DensityMatrix};
use super::hilbert::{CMatrix, CVector};
use super::model::LindbladModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Propagator {
    #[default]
    Adaptive,
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub propagator: Propagator,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            propagator: Propagator::Adaptive,
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 5_000_000,
        }
    }
}

impl EvolveOptions {
    pub fn exponential() -> Self {
        Self {
            propagator: Propagator::Exponential,
            ..Self::default()
        }
    }
}

/// ρ(t) at each requested time (ps), starting from ρ(0) = `rho0`.
pub fn evolve<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    times_ps: &[T],
) -> Result<Vec<DensityMatrix<T>>> {
    evolve_with(model, rho0, times_ps, &EvolveOptions::default())
}

pub fn evolve_with<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    times_ps: &[T],
    options: &EvolveOptions,
) -> Result<Vec<DensityMatrix<T>>> {
    if rho0.space() != model.space() {
        return Err(Error::param("rho0", "state and model live on different spaces"));
    }
    if let Some(&t0) = times_ps.first() {
        if t0 < T::zero() {
            return Err(Error::param("times_ps", "times must be non-negative"));
        }
    }
    if let Some(i) = times_ps.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(Error::NonMonotonicGrid { index: i + 1 });
    }
    rho0.check_invariants()?;

    let hbar = lit::<T>(HBAR_UEV_PS);
    let times: Vec<T> = times_ps.iter().map(|&t| t / hbar).collect();
    let l = model.liouvillian();
    let vecs = match options.propagator {
        Propagator::Adaptive => dormand_prince(l, rho0.to_vec(), &times, options)?,
        Propagator::Exponential => exponential(l, rho0.to_vec(), &times),
    };

    let space = model.space();
    // integrator error is not Hermitian; project it out
    let out: Vec<DensityMatrix<T>> = vecs
        .iter()
        .map(|v| DensityMatrix::from_vec(space, v).hermitized())
        .collect();
    for (rho, t) in out.iter().zip(times_ps) {
        let tr = (rho.trace() - re(T::one())).modulus();
        if tr > tolerance(1e-9) {
            return Err(Error::InvariantViolation(format!(
                "trace drifted by {:e} at t = {} ps",
                to_f64(tr),
                to_f64(*t)
            )));
        }
    }
    Ok(out)
}

/// Longest single exponential step (ħ/μeV). Longer intervals are chained so
/// that scaling-and-squaring error stays at rounding level.
const MAX_EXP_STEP: f64 = 2.0;

/// Propagator cache keyed by step length.
pub(crate) struct ExpCache<'a, T: Real> {
    l: &'a CMatrix<T>,
    cache: HashMap<u64, CMatrix<T>>,
}

impl<'a, T: Real> ExpCache<'a, T> {
    pub(crate) fn new(l: &'a CMatrix<T>) -> Self {
        Self {
            l,
            cache: HashMap::new(),
        }
    }

    /// e^{L dt} y, dt in internal units.
    pub(crate) fn apply(&mut self, mut y: CVector<T>, dt: T) -> CVector<T> {
        if !(dt > T::zero()) {
            return y;
        }
        let max = lit::<T>(MAX_EXP_STEP);
        let n = to_f64(dt / max).ceil().max(1.0) as usize;
        let h = dt / lit(n as f64);
        let l = self.l;
        let p = self
            .cache
            .entry(to_f64(h).to_bits())
            .or_insert_with(|| (l * re(h)).exp());
        for _ in 0..n {
            y = &*p * &y;
        }
        y
    }
}

fn exponential<T: Real>(l: &CMatrix<T>, mut y: CVector<T>, times: &[T]) -> Vec<CVector<T>> {
    let mut cache = ExpCache::new(l);
    let mut t = T::zero();
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let dt = target - t;
        if dt > T::zero() {
            y = cache.apply(y, dt);
            t = target;
        }
        out.push(y.clone());
    }
    out
}

// Dormand–Prince 5(4) tableau (autonomous system, nodes unused).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dormand_prince<T: Real>(
    l: &CMatrix<T>,
    mut y: CVector<T>,
    times: &[T],
    opts: &EvolveOptions,
) -> Result<Vec<CVector<T>>> {
    let rtol = lit::<T>(opts.rtol);
    let atol = lit::<T>(opts.atol);
    let norm_inf = (0..l.nrows())
        .map(|i| l.row(i).iter().fold(T::zero(), |s, z| s + z.modulus()))
        .fold(T::zero(), |m, x| m.max(x));
    let mut h = lit::<T>(0.01) / norm_inf.max(T::one());
    let h_min = lit::<T>(1e-14) * times.last().copied().unwrap_or(T::one()).max(T::one());

    let mut t = T::zero();
    let mut k1 = l * &y;
    let mut out = Vec::with_capacity(times.len());
    let mut steps = 0usize;
    for &target in times {
        while t < target {
            let last = target - t <= h;
            let step = if last { target - t } else { h };
            let mut k: Vec<CVector<T>> = vec![k1.clone()];
            for row in &A[1..] {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    let a = row[j];
                    if a != 0.0 {
                        ys.axpy(re(step * lit::<T>(a)), kj, re(T::one()));
                    }
                }
                k.push(l * ys);
            }
            // the 7th stage argument is the 5th-order solution
            let mut y_new = y.clone();
            for (j, kj) in k.iter().enumerate().take(6) {
                let b = A[6][j];
                if b != 0.0 {
                    y_new.axpy(re(step * lit::<T>(b)), kj, re(T::one()));
                }
            }
            let mut err = T::zero();
            for i in 0..y.len() {
                let mut e = re(T::zero());
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        e += kj[i] * re(lit::<T>(E[j]));
                    }
                }
                let scale = atol + rtol * y[i].modulus().max(y_new[i].modulus());
                err = err.max((e * re(step)).modulus() / scale);
            }
            steps += 1;
            if err <= T::one() {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k.pop().unwrap();
            }
            let factor = if err > T::zero() {
                (lit::<T>(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            } else {
                lit(5.0)
            };
            if !(last && err <= T::one()) {
                h = step * factor;
            }
            if h < h_min || steps > opts.max_steps {
                return Err(Error::StepSizeFailure {
                    time: to_f64(t) * HBAR_UEV_PS,
                    step: to_f64(h) * HBAR_UEV_PS,
                    error: to_f64(err),
                });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
