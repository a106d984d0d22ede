use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real, mean-zero periodic scalar stored as Fourier coefficients.
///
/// Coefficients are normalized so that `u(x) = sum_k c(k) exp(2 pi i k.x)`.
/// Hermitian symmetry `c(-k) = conj(c(k))` holds for every field produced by
/// this module; the mean coefficient `c(0)` is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// Wraps raw coefficients. The mean mode is cleared.
    pub fn from_coefficients(grid: &Grid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        coeffs[0] = Complex64::default();
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Forward transform of physical samples; returns the field and the removed mean.
    pub fn from_physical(grid: &Grid, samples: &[f64]) -> Result<(Self, f64)> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        grid.fft2(&mut data, false);
        let norm = 1.0 / grid.len() as f64;
        for c in &mut data {
            *c *= norm;
        }
        let mean = data[0].re;
        data[0] = Complex64::default();
        Ok((
            Self {
                grid: grid.clone(),
                coeffs: data,
            },
            mean,
        ))
    }

    /// Builds a field by sampling `f(x, y)` on the grid. The mean is discarded.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let h = grid.spacing();
        let samples: Vec<f64> = (0..grid.len())
            .map(|idx| f((idx / n) as f64 * h, (idx % n) as f64 * h))
            .collect();
        Self::from_physical(grid, &samples)
            .expect("sample count matches grid")
            .0
    }

    /// Inverse transform to physical samples.
    pub fn to_physical(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        self.grid.fft2(&mut data, true);
        data.into_iter().map(|c| c.re).collect()
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mutable coefficient access. Callers are responsible for keeping the
    /// Hermitian symmetry; the mean is cleared again by [`Self::enforce_zero_mean`].
    #[inline]
    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn enforce_zero_mean(&mut self) {
        self.coeffs[0] = Complex64::default();
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.coeffs[self.grid.flat_index(k1, k2)]
    }

    /// Sets `c(k) = value` and `c(-k) = conj(value)`. Setting the mean mode is ignored.
    pub fn set_mode(&mut self, k1: i64, k2: i64, value: Complex64) {
        if k1 == 0 && k2 == 0 {
            return;
        }
        let a = self.grid.flat_index(k1, k2);
        let b = self.grid.flat_index(-k1, -k2);
        self.coeffs[a] = value;
        self.coeffs[b] = value.conj();
        if a == b {
            self.coeffs[a] = Complex64::new(value.re, 0.0);
        }
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for flat in 0..self.coeffs.len() {
            let (k1, k2) = self.grid.wavevector(flat);
            let mirror = self.grid.flat_index(-k1, -k2);
            worst = worst.max((self.coeffs[flat] - self.coeffs[mirror].conj()).norm());
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &SpectralScalar) {
        debug_assert_eq!(self.grid, other.grid);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(1.0, other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(-1.0, other);
        Ok(out)
    }

    /// Applies a real per-mode multiplier `m(k1, k2)`.
    pub fn map_modes(&self, m: impl Fn(i64, i64) -> f64) -> Self {
        let mut out = self.clone();
        for (flat, c) in out.coeffs.iter_mut().enumerate() {
            let (k1, k2) = self.grid.wavevector(flat);
            *c *= m(k1, k2);
        }
        out.enforce_zero_mean();
        out
    }

    /// `-4 pi^2 |k|^2` per mode.
    pub fn laplacian(&self) -> Self {
        self.map_modes(|k1, k2| -4.0 * PI * PI * (k1 * k1 + k2 * k2) as f64)
    }

    /// Partial derivative along `axis` (0 = x, 1 = y). The Nyquist column is zeroed.
    pub fn derivative(&self, axis: usize) -> Self {
        let half = (self.grid.n() / 2) as i64;
        let mut out = self.clone();
        for (flat, c) in out.coeffs.iter_mut().enumerate() {
            let (k1, k2) = self.grid.wavevector(flat);
            let k = if axis == 0 { k1 } else { k2 };
            *c = if k == half {
                Complex64::default()
            } else {
                *c * Complex64::new(0.0, 2.0 * PI * k as f64)
            };
        }
        out.enforce_zero_mean();
        out
    }

    /// Zeroes every mode with `max(|k1|, |k2|) > cutoff`.
    pub fn truncate(&mut self, cutoff: i64) {
        for flat in 0..self.coeffs.len() {
            let (k1, k2) = self.grid.wavevector(flat);
            if k1.abs().max(k2.abs()) > cutoff {
                self.coeffs[flat] = Complex64::default();
            }
        }
        self.enforce_zero_mean();
    }

    /// Two-thirds-rule dealiasing.
    pub fn dealias(&self) -> Self {
        let mut out = self.clone();
        out.truncate(self.grid.dealias_cutoff());
        out
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn h1_seminorm_sq(&self) -> f64 {
        self.weighted_sum(|k2| 4.0 * PI * PI * k2)
    }

    pub fn h1_seminorm(&self) -> f64 {
        self.h1_seminorm_sq().sqrt()
    }

    /// `||Laplacian u||^2`
    pub fn h2_seminorm_sq(&self) -> f64 {
        self.weighted_sum(|k2| (4.0 * PI * PI * k2).powi(2))
    }

    pub fn h2_seminorm(&self) -> f64 {
        self.h2_seminorm_sq().sqrt()
    }

    fn weighted_sum(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| {
                let (k1, k2) = self.grid.wavevector(flat);
                w((k1 * k1 + k2 * k2) as f64) * c.norm_sqr()
            })
            .sum()
    }

    /// L2 inner product over the unit square.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(16).unwrap()
    }

    #[test]
    fn cosine_is_a_conjugate_pair() {
        let g = grid();
        let s = SpectralScalar::from_fn(&g, |x, _| (2.0 * PI * x).cos());
        assert!((s.coeff(1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((s.coeff(-1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let others: f64 = s.l2_norm_sq() - 0.5;
        assert!(others.abs() < 1e-14);
    }

    #[test]
    fn constant_field_reports_its_mean() {
        let g = grid();
        let (s, mean) = SpectralScalar::from_physical(&g, &vec![5.0; g.len()]).unwrap();
        assert!((mean - 5.0).abs() < 1e-14);
        assert!(s.coefficients().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn rejects_wrong_sample_count() {
        let g = grid();
        assert!(matches!(
            SpectralScalar::from_physical(&g, &[0.0; 10]),
            Err(Error::SampleCount { .. })
        ));
    }

    #[test]
    fn sine_is_a_laplacian_eigenfunction() {
        let g = grid();
        let s = SpectralScalar::from_fn(&g, |x, _| (2.0 * PI * x).sin());
        let expected = s.scaled(-4.0 * PI * PI);
        let lap = s.laplacian();
        let diff = lap.sub(&expected).unwrap().l2_norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn single_mode_norms() {
        let g = grid();
        let s = SpectralScalar::from_fn(&g, |x, _| (2.0 * PI * x).sin());
        assert!((s.l2_norm() - 0.5_f64.sqrt()).abs() < 1e-14);
        assert!((s.h1_seminorm() - PI * 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((s.h2_seminorm() - 4.0 * PI * PI / 2.0_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn set_mode_keeps_field_real() {
        let g = grid();
        let mut s = SpectralScalar::zeros(&g);
        s.set_mode(2, -3, Complex64::new(0.3, -0.7));
        assert_eq!(s.hermitian_defect(), 0.0);
        let phys = s.to_physical();
        let (back, mean) = SpectralScalar::from_physical(&g, &phys).unwrap();
        assert!(mean.abs() < 1e-15);
        assert!(back.sub(&s).unwrap().l2_norm() < 1e-14);
    }
}
