use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use super::grid::Grid;
use super::scalar::SpectralScalar;
use super::vector::SpectralVectorField;
use crate::error::{Error, Result};

/// Deterministic random divergence-free field with unit L2 norm.
///
/// Every mode with `0 < |k| <= k_max` gets amplitude `|k|^-decay` and
/// independent random phases on both components; the result is then
/// Leray-projected and normalized.
pub fn random_divfree_field(
    grid: &Grid,
    seed: u64,
    decay: f64,
    k_max: i64,
) -> Result<SpectralVectorField> {
    if k_max < 1 || k_max > grid.dealias_cutoff() {
        return Err(Error::OutOfRange {
            name: "k_max",
            detail: format!("{k_max} not in [1, {}]", grid.dealias_cutoff()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = SpectralScalar::zeros(grid);
    let mut y = SpectralScalar::zeros(grid);
    for k1 in 0..=k_max {
        for k2 in -k_max..=k_max {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let kk = ((k1 * k1 + k2 * k2) as f64).sqrt();
            if kk > k_max as f64 {
                continue;
            }
            let amp = kk.powf(-decay);
            let (p1, p2): (f64, f64) = (rng.random(), rng.random());
            x.set_mode(k1, k2, Complex64::from_polar(amp, 2.0 * PI * p1));
            y.set_mode(k1, k2, Complex64::from_polar(amp, 2.0 * PI * p2));
        }
    }
    let u = SpectralVectorField::new(x, y)?.leray_project();
    let norm = u.l2_norm();
    Ok(u.scaled(1.0 / norm))
}
