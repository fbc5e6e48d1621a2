//! Scanning Fabry-Perot interferometer and spectrometer order selection.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{trapezoid, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FabryPerotFilter<T> {
    /// Transmission FWHM (μeV).
    pub fwhm: T,
    /// Free spectral range (μeV).
    pub fsr: T,
    /// Transmission maximum of the central order (μeV).
    pub center: T,
    /// Keep only the order at `center`, as after the spectrometer.
    pub single_order: bool,
}

impl<T: Real> Default for FabryPerotFilter<T> {
    fn default() -> Self {
        Self {
            fwhm: lit(1.7),
            fsr: lit(400.0),
            center: T::zero(),
            single_order: false,
        }
    }
}

impl<T: Real> FabryPerotFilter<T> {
    pub fn centered(center: T) -> Self {
        Self {
            center,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm > T::zero() && self.fwhm < self.fsr) {
            return Err(Error::param("fp_fwhm_ueV", "must satisfy 0 < fwhm < fsr"));
        }
        Ok(())
    }

    pub fn finesse(&self) -> T {
        self.fsr / self.fwhm
    }

    /// Coefficient of finesse F, chosen so that the Airy FWHM is exactly
    /// `fwhm`: sin(π·fwhm/2fsr) = 1/√F.
    pub fn coefficient(&self) -> T {
        let s = (T::pi() * self.fwhm / (lit::<T>(2.0) * self.fsr)).sin();
        T::one() / (s * s)
    }

    /// Airy transmission 1 / (1 + F sin²(π(ω − center)/fsr)).
    pub fn transmission(&self, energy: T) -> T {
        let offset = energy - self.center;
        if self.single_order && offset.abs() > self.fsr / lit(2.0) {
            return T::zero();
        }
        let s = (T::pi() * offset / self.fsr).sin();
        T::one() / (T::one() + self.coefficient() * s * s)
    }

    fn check_sampling(&self, spectrum: &Spectrum<T>) -> Result<()> {
        self.validate()?;
        let limit = self.fwhm / lit(4.0);
        let step = spectrum.max_step();
        if step > limit {
            return Err(Error::Undersampled {
                spacing: to_f64(step),
                limit: to_f64(limit),
            });
        }
        Ok(())
    }
}

/// Spectrum after the interferometer at a fixed setting.
pub fn fp_transmit<T: Real>(spectrum: &Spectrum<T>, filter: &FabryPerotFilter<T>) -> Result<Spectrum<T>> {
    filter.check_sampling(spectrum)?;
    let g = spectrum.grid();
    let span = g[g.len() - 1] - g[0];
    if !filter.single_order && span < filter.fsr {
        return Err(Error::param(
            "single_order",
            "spectrum spans less than one free spectral range; enable single-order mode",
        ));
    }
    let values = g
        .iter()
        .zip(spectrum.values())
        .map(|(&x, &y)| y * filter.transmission(x))
        .collect();
    Spectrum::new(g.to_vec(), values)
}

/// Detected intensity ∫ S(ω) T(ω; c) dω as the filter centre c sweeps
/// `centers`: the measured interferometer trace.
pub fn fp_scan<T: Real>(
    spectrum: &Spectrum<T>,
    filter: &FabryPerotFilter<T>,
    centers: &[T],
) -> Result<Spectrum<T>> {
    filter.check_sampling(spectrum)?;
    crate::spectrum::check_grid(centers)?;
    let g = spectrum.grid();
    let values = centers
        .iter()
        .map(|&c| {
            let f = FabryPerotFilter { center: c, ..*filter };
            let y: Vec<T> = g
                .iter()
                .zip(spectrum.values())
                .map(|(&x, &v)| v * f.transmission(x))
                .collect();
            trapezoid(g, &y)
        })
        .collect();
    Spectrum::new(centers.to_vec(), values)
}

/// Spectrometer order selection: keeps one free spectral range centred on
/// `center`.
pub fn order_window<T: Real>(spectrum: &Spectrum<T>, center: T, fsr: T) -> Result<Spectrum<T>> {
    let half = fsr / lit(2.0);
    spectrum.window(center - half, center + half)
}
