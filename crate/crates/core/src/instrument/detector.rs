//! Gaussian timing jitter of the correlation setup.

use crate::engine::CorrelationTrace;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::uniform_spacing;

/// Kernel support in units of Δt.
const KERNEL_EXTENT: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorResponse<T> {
    /// Width Δt (ps) of exp(−τ²/Δt²). Zero means ideal detectors.
    pub dt: T,
}

impl<T: Real> Default for DetectorResponse<T> {
    fn default() -> Self {
        Self { dt: lit(400.0) }
    }
}

impl<T: Real> DetectorResponse<T> {
    pub fn new(dt: T) -> Result<Self> {
        if !(dt >= T::zero()) || !dt.is_finite() {
            return Err(Error::param("detector_dt_ps", "must be finite and >= 0"));
        }
        Ok(Self { dt })
    }

    /// exp(−τ²/Δt²) / (Δt √π)
    pub fn kernel(&self, tau: T) -> T {
        let x = tau / self.dt;
        (-x * x).exp() / (self.dt * T::pi().sqrt())
    }

    /// Discrete kernel on a grid of spacing `h`, normalized to unit sum;
    /// index `k` is the weight at offset (k − half)·h.
    pub fn weights(&self, h: T) -> Vec<T> {
        let half = to_f64(lit::<T>(KERNEL_EXTENT) * self.dt / h).ceil() as usize;
        let raw: Vec<T> = (0..=2 * half)
            .map(|k| self.kernel(h * lit((k as f64) - half as f64)))
            .collect();
        let sum = raw.iter().fold(T::zero(), |a, &b| a + b);
        raw.into_iter().map(|w| w / sum).collect()
    }
}

/// Convolution on a uniform grid. Samples beyond the right edge repeat the
/// last value; a one-sided grid starting at τ = 0 is mirrored (g² is even),
/// otherwise the first value is repeated.
pub(crate) fn convolve_values<T: Real>(tau: &[T], values: &[T], det: &DetectorResponse<T>) -> Result<Vec<T>> {
    if det.dt == T::zero() {
        return Ok(values.to_vec());
    }
    let h = uniform_spacing(tau).ok_or_else(|| {
        let n = tau.len().max(2) - 1;
        let expected = if tau.len() > 1 {
            to_f64((tau[n] - tau[0]) / lit(n as f64))
        } else {
            0.0
        };
        let found = tau
            .windows(2)
            .map(|w| to_f64(w[1] - w[0]))
            .find(|d| (d - expected).abs() > 1e-6 * expected.abs())
            .unwrap_or(expected);
        Error::NonUniformGrid { expected, found }
    })?;
    let limit = det.dt / lit(4.0);
    if h > limit {
        return Err(Error::Undersampled {
            spacing: to_f64(h),
            limit: to_f64(limit),
        });
    }
    let w = det.weights(h);
    let half = (w.len() - 1) / 2;
    let n = values.len() as isize;
    let mirrored = tau[0].abs() <= h * lit(1e-6);
    let sample = |i: isize| -> T {
        if i >= n {
            values[(n - 1) as usize]
        } else if i >= 0 {
            values[i as usize]
        } else if mirrored {
            values[((-i).min(n - 1)) as usize]
        } else {
            values[0]
        }
    };
    Ok((0..n)
        .map(|i| {
            w.iter().enumerate().fold(T::zero(), |acc, (k, &wk)| {
                acc + wk * sample(i + k as isize - half as isize)
            })
        })
        .collect())
}

/// g² as recorded through detectors with Gaussian jitter Δt.
pub fn convolve_g2<T: Real>(trace: &CorrelationTrace<T>, det: &DetectorResponse<T>) -> Result<CorrelationTrace<T>> {
    let v = convolve_values(trace.tau_ps(), trace.values(), det)?;
    CorrelationTrace::new(trace.tau_ps().to_vec(), v, trace.photon_number)
}
