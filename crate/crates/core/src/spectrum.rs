//! Sampled spectra and CSV emission.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Default sampling step for spectra (μeV).
pub const DEFAULT_SPACING_UEV: f64 = 0.1;

/// A sampled (energy, intensity) curve. Energies in μeV.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    grid: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_grid(&grid)?;
        assert_eq!(grid.len(), values.len(), "grid/value length mismatch");
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < T::zero() {
                return Err(Error::InvalidSpectrumValue {
                    index,
                    value: to_f64(*v),
                });
            }
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Vec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Spacing of a uniform grid; `None` if the grid is not uniform to 1e-9
    /// relative or has fewer than two points.
    pub fn grid_spacing(&self) -> Option<T> {
        uniform_spacing(&self.grid)
    }

    /// Largest step between neighbouring samples.
    pub fn max_step(&self) -> T {
        self.grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Trapezoidal integral over the whole grid.
    pub fn integral(&self) -> T {
        trapezoid(&self.grid, &self.values)
    }

    /// Trapezoidal integral restricted to `[lo, hi]` (sample-aligned).
    pub fn integral_between(&self, lo: T, hi: T) -> T {
        let (g, v): (Vec<T>, Vec<T>) = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(x, y)| (*x, *y))
            .unzip();
        trapezoid(&g, &v)
    }

    /// Index and value of the maximum sample.
    pub fn peak(&self) -> (usize, T) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, T::zero()), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) })
    }

    /// Restriction to samples in `[lo, hi]`.
    pub fn window(&self, lo: T, hi: T) -> Result<Self> {
        let (g, v) = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(x, y)| (*x, *y))
            .unzip();
        Self::new(g, v)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| v * factor).collect(),
        }
    }

    /// CSV with header `energy_ueV,intensity`.
    pub fn to_csv(&self) -> String {
        csv_string(
            None,
            &["energy_ueV", "intensity"],
            self.grid
                .iter()
                .zip(&self.values)
                .map(|(x, y)| vec![to_f64(*x), to_f64(*y)]),
        )
    }
}

/// Uniform grid from `start` to `stop` inclusive (up to rounding) with the
/// given step.
pub fn uniform_grid<T: Real>(start: T, stop: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(stop >= start) {
        return Err(Error::EmptyGrid);
    }
    let n = to_f64((stop - start) / step + lit(1e-9)).floor() as usize + 1;
    Ok((0..n).map(|i| start + step * lit::<T>(i as f64)).collect())
}

/// Uniform grid of `n` points centred on `center` with half-width `half`.
pub fn centered_grid<T: Real>(center: T, half: T, step: T) -> Result<Vec<T>> {
    uniform_grid(center - half, center + half, step)
}

pub(crate) fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotonicGrid { index: i + 1 });
        }
    }
    Ok(())
}

pub(crate) fn uniform_spacing<T: Real>(grid: &[T]) -> Option<T> {
    if grid.len() < 2 {
        return None;
    }
    let n = grid.len() - 1;
    let h = (grid[n] - grid[0]) / lit(n as f64);
    let tol = h * lit(1e-6);
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= tol)
        .then_some(h)
}

pub(crate) fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    x.windows(2)
        .zip(y.windows(2))
        .fold(T::zero(), |acc, (xw, yw)| {
            acc + (xw[1] - xw[0]) * (yw[0] + yw[1]) / lit(2.0)
        })
}

/// Renders CSV text: optional `#` comment line, header row, LF endings.
pub fn csv_string(
    comment: Option<&str>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        writeln!(out, "# {c}").unwrap();
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip representation; exponent form for very small or
/// very large magnitudes.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(Spectrum::<f64>::new(vec![], vec![]), Err(Error::EmptyGrid)));
        assert!(matches!(
            Spectrum::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]),
            Err(Error::NonMonotonicGrid { index: 2 })
        ));
        assert!(Spectrum::new(vec![0.0, 1.0], vec![0.0, -1.0]).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(-1.0f64, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[20] - 1.0).abs() < 1e-12);
        let s = Spectrum::from_fn(g, |x| 1.0 + x).unwrap();
        assert!((s.grid_spacing().unwrap() - 0.1).abs() < 1e-12);
        assert!((s.integral() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_format() {
        let s = Spectrum::new(vec![1.5, 2.0], vec![0.25, 1e-20]).unwrap();
        assert_eq!(s.to_csv(), "energy_ueV,intensity\n1.5,0.25\n2,1e-20\n");
        let c = csv_string(Some("spin=up"), &["a"], vec![vec![1.0]]);
        assert_eq!(c, "# spin=up\na\n1\n");
    }
}
