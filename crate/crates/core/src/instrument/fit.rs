//! Least-squares fits: Lorentzian lines and detector-broadened g² rises.
//!
//! The minimizer is Levenberg–Marquardt with Marquardt diagonal scaling and a
//! central-difference Jacobian. Uncertainties come from the linearized
//! covariance s²(JᵀJ)⁻¹ at the optimum, s² = SSR/(m − n).

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::engine::CorrelationTrace;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{csv_string, Spectrum};

use super::detector::{convolve_values, DetectorResponse};

pub const MAX_ITERATIONS: usize = 200;
pub const RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FitParameter<T> {
    pub name: &'static str,
    pub value: T,
    pub sigma: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    pub model: &'static str,
    pub parameters: Vec<FitParameter<T>>,
    /// √SSR
    pub residual_norm: T,
    pub iterations: usize,
}

impl<T: Real> FitResult<T> {
    pub fn get(&self, name: &str) -> Option<&FitParameter<T>> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> T {
        self.get(name)
            .unwrap_or_else(|| panic!("fit `{}` has no parameter `{name}`", self.model))
            .value
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        writeln!(s, "model: {}", self.model).unwrap();
        for p in &self.parameters {
            writeln!(s, "  {:<10} {:>14.6e} +/- {:.3e}", p.name, to_f64(p.value), to_f64(p.sigma)).unwrap();
        }
        writeln!(s, "residual_norm: {:e}", to_f64(self.residual_norm)).unwrap();
        writeln!(s, "iterations: {}", self.iterations).unwrap();
        s
    }

    /// Rows `model,param,value,sigma`.
    pub fn to_csv(&self) -> String {
        let body = csv_string(
            None,
            &["model", "param", "value", "sigma"],
            std::iter::empty(),
        );
        let mut s = body;
        for p in &self.parameters {
            writeln!(
                s,
                "{},{},{},{}",
                self.model,
                p.name,
                crate::spectrum::format_value(to_f64(p.value)),
                crate::spectrum::format_value(to_f64(p.sigma))
            )
            .unwrap();
        }
        s
    }
}

struct Minimum<T> {
    params: Vec<T>,
    sigmas: Vec<T>,
    ssr: T,
    iterations: usize,
}

fn jacobian<T: Real>(f: &impl Fn(&[T]) -> Vec<T>, p: &[T], m: usize) -> DMatrix<T> {
    let eps = T::default_epsilon().cbrt();
    let mut j = DMatrix::zeros(m, p.len());
    let mut q = p.to_vec();
    for k in 0..p.len() {
        let h = eps * p[k].abs().max(lit(1e-8));
        q[k] = p[k] + h;
        let up = f(&q);
        q[k] = p[k] - h;
        let down = f(&q);
        q[k] = p[k];
        for i in 0..m {
            j[(i, k)] = (up[i] - down[i]) / (h + h);
        }
    }
    j
}

fn sum_sq<T: Real>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |a, &x| a + x * x)
}

fn levenberg_marquardt<T: Real>(
    model: &'static str,
    p0: Vec<T>,
    residuals: impl Fn(&[T]) -> Vec<T>,
) -> Result<Minimum<T>> {
    let n = p0.len();
    let mut p = p0;
    let mut r = residuals(&p);
    let m = r.len();
    if m <= n {
        return Err(Error::param(model, format!("need more than {n} samples, got {m}")));
    }
    let tol = lit::<T>(RELATIVE_TOLERANCE);
    let mut ssr = sum_sq(&r);
    let mut lambda = lit::<T>(1e-3);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if ssr == T::zero() {
            converged = true;
            break;
        }
        let j = jacobian(&residuals, &p, m);
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let mut improved = false;
        while lambda < lit(1e16) {
            let mut damped = a.clone();
            for k in 0..n {
                damped[(k, k)] += lambda * a[(k, k)].max(T::default_epsilon());
            }
            let Some(step) = damped.lu().solve(&(-&g)) else {
                lambda *= lit(10.0);
                continue;
            };
            let trial: Vec<T> = p.iter().zip(step.iter()).map(|(a, b)| *a + *b).collect();
            let rt = residuals(&trial);
            let st = sum_sq(&rt);
            if st.is_finite() && st < ssr {
                let drop = ssr - st;
                let pnorm = p.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
                let small_step = step.norm() <= tol * (pnorm + tol);
                p = trial;
                r = rt;
                ssr = st;
                lambda = (lambda / lit(10.0)).max(lit(1e-15));
                improved = true;
                if drop <= tol * ssr || small_step {
                    converged = true;
                }
                break;
            }
            lambda *= lit(10.0);
        }
        if !improved {
            // no descent direction left: at the minimum to working precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::FitDidNotConverge {
            model,
            iterations,
            residual: to_f64(ssr.sqrt()),
        });
    }

    let j = jacobian(&residuals, &p, m);
    let a = j.transpose() * &j;
    let s2 = ssr / lit((m - n) as f64);
    let cov = a
        .clone()
        .try_inverse()
        .or_else(|| a.pseudo_inverse(T::default_epsilon()).ok())
        .unwrap_or_else(|| DMatrix::from_element(n, n, T::max_value().unwrap()));
    let sigmas = (0..n).map(|k| (cov[(k, k)].abs() * s2).sqrt()).collect();
    Ok(Minimum {
        params: p,
        sigmas,
        ssr,
        iterations,
    })
}

/// A·(w/2)² / ((x − c)² + (w/2)²) + b
pub fn lorentzian<T: Real>(x: T, amplitude: T, center: T, fwhm: T, baseline: T) -> T {
    let hw = fwhm / lit(2.0);
    amplitude * hw * hw / ((x - center) * (x - center) + hw * hw) + baseline
}

/// Fits amplitude, center, FWHM and baseline. The peak sample seeds centre
/// and amplitude, the minimum the baseline, and the second moment of the
/// samples above half maximum the width.
pub fn fit_lorentzian<T: Real>(spectrum: &Spectrum<T>) -> Result<FitResult<T>> {
    let x = spectrum.grid();
    let y = spectrum.values();
    let (ipk, ymax) = spectrum.peak();
    let ymin = y.iter().copied().fold(ymax, |a, b| a.min(b));
    let c0 = x[ipk];
    let a0 = ymax - ymin;
    let half = ymin + a0 / lit(2.0);
    let (mut w, mut m2) = (T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        if yi >= half {
            w += yi - ymin;
            m2 += (yi - ymin) * (xi - c0) * (xi - c0);
        }
    }
    let sigma = if w > T::zero() { (m2 / w).sqrt() } else { T::zero() };
    // a Lorentzian cut at half maximum has σ = 0.5224·(w/2)
    let span = x[x.len() - 1] - x[0];
    let mut fwhm0 = sigma * lit(3.828);
    if !(fwhm0 > T::zero()) {
        fwhm0 = span / lit(x.len().max(2) as f64);
    }
    let min = levenberg_marquardt("lorentzian", vec![a0, c0, fwhm0, ymin], |p| {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| lorentzian(xi, p[0], p[1], p[2], p[3]) - yi)
            .collect()
    })?;
    let names = ["amplitude", "center", "fwhm", "baseline"];
    let mut params: Vec<FitParameter<T>> = names
        .iter()
        .zip(min.params.iter().zip(&min.sigmas))
        .map(|(&name, (&value, &sigma))| FitParameter { name, value, sigma })
        .collect();
    params[2].value = params[2].value.abs();
    Ok(FitResult {
        model: "lorentzian",
        parameters: params,
        residual_norm: min.ssr.sqrt(),
        iterations: min.iterations,
    })
}

/// level·(1 − contrast·e^{−|τ|/t_rise})
pub fn rise_model<T: Real>(tau: T, t_rise: T, contrast: T, level: T) -> T {
    level * (T::one() - contrast * (-tau.abs() / t_rise).exp())
}

/// Fits `rise_model` convolved with the detector kernel (none for ideal
/// detectors). Returns t_rise (ps), contrast and level.
pub fn fit_g2_rise<T: Real>(
    trace: &CorrelationTrace<T>,
    detector: Option<&DetectorResponse<T>>,
) -> Result<FitResult<T>> {
    let tau = trace.tau_ps();
    let y = trace.values();
    let ideal = DetectorResponse::new(T::zero())?;
    let det = detector.unwrap_or(&ideal);
    // fail early on grids the convolution cannot handle
    convolve_values(tau, y, det)?;

    let n = y.len();
    let level0 = y[n - (n / 10).max(1)..].iter().fold(T::zero(), |a, &b| a + b) / lit((n / 10).max(1) as f64);
    let ymin = y.iter().copied().fold(level0, |a, b| a.min(b));
    let contrast0 = if level0 > T::zero() { T::one() - ymin / level0 } else { T::one() };
    let target = ymin + (level0 - ymin) * (T::one() - (-T::one()).exp());
    let t0 = tau
        .iter()
        .zip(y)
        .find(|(t, v)| **t > T::zero() && **v >= target)
        .map(|(t, _)| *t)
        .unwrap_or((tau[n - 1] - tau[0]) / lit(10.0))
        .max((tau[n - 1] - tau[0]) / lit(1000.0));

    let min = levenberg_marquardt("g2_rise", vec![t0, contrast0, level0], |p| {
        let model: Vec<T> = tau.iter().map(|&t| rise_model(t, p[0].abs(), p[1], p[2])).collect();
        let conv = convolve_values(tau, &model, det).unwrap_or(model);
        conv.iter().zip(y).map(|(m, v)| *m - *v).collect()
    })?;
    let t_rise = min.params[0].abs();
    let span = tau[n - 1] - tau[0].max(T::zero());
    if span < lit::<T>(5.0) * t_rise {
        return Err(Error::param(
            "tau_ps",
            format!(
                "trace spans {} ps, less than 5x the fitted rise time {} ps",
                to_f64(span),
                to_f64(t_rise)
            ),
        ));
    }
    let names = ["t_rise_ps", "contrast", "level"];
    let mut params: Vec<FitParameter<T>> = names
        .iter()
        .zip(min.params.iter().zip(&min.sigmas))
        .map(|(&name, (&value, &sigma))| FitParameter { name, value, sigma })
        .collect();
    params[0].value = t_rise;
    Ok(FitResult {
        model: "g2_rise",
        parameters: params,
        residual_norm: min.ssr.sqrt(),
        iterations: min.iterations,
    })
}
