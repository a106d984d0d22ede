use serde::{Deserialize, Serialize};

use super::forcing::ForcingSpec;
use super::state::to_elsasser;
use crate::error::{Error, Result};
use crate::spectral::SpectralVectorField;

/// Dimensional MHD parameters on the square `[0, L]^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    /// Kinematic viscosity.
    pub nu: f64,
    /// Magnetic diffusivity.
    pub lambda: f64,
    /// Density.
    pub rho0: f64,
    /// Magnetic permeability.
    pub mu0: f64,
    /// Domain side.
    pub length: f64,
    /// Reference velocity.
    pub velocity: f64,
}

impl DimensionalParams {
    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("nu", self.nu),
            ("lambda", self.lambda),
            ("rho0", self.rho0),
            ("mu0", self.mu0),
            ("length", self.length),
            ("velocity", self.velocity),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    detail: format!("{value} must be positive"),
                });
            }
        }
        Ok(())
    }

    /// Scale applied to dimensional `f1` to obtain its nondimensional form.
    pub fn velocity_forcing_scale(&self) -> f64 {
        self.length / (self.velocity * self.velocity)
    }

    /// Scale applied to dimensional `g1`; includes the `(rho0 mu0)^(-1/2)` factor.
    pub fn magnetic_forcing_scale(&self) -> f64 {
        self.velocity_forcing_scale() / (self.rho0 * self.mu0).sqrt()
    }
}

/// Viscosity coefficients of the Elsässer system.
///
/// `alpha = (1/Re + 1/Rm)/2`, `beta = |1/Re - 1/Rm|/2`. When `1/Re < 1/Rm`
/// the second variable is `w = b - u` (`swapped`), which keeps `beta >= 0`
/// and `alpha - beta = min(1/Re, 1/Rm)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElsasserParams {
    pub re: f64,
    pub rm: f64,
    pub alpha: f64,
    pub beta: f64,
    pub swapped: bool,
}

impl ElsasserParams {
    /// `alpha - beta`, the effective dissipation coefficient.
    #[inline]
    pub fn gap(&self) -> f64 {
        self.alpha - self.beta
    }

    /// Window length `1/(pi^2 (alpha - beta))` used by the a-priori bounds.
    pub fn dissipation_window(&self) -> f64 {
        1.0 / (std::f64::consts::PI.powi(2) * self.gap())
    }
}

pub fn derive_elsasser_params(re: f64, rm: f64) -> Result<ElsasserParams> {
    for (name, value) in [("Re", re), ("Rm", rm)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                detail: format!("{value} must be positive"),
            });
        }
    }
    let (inv_re, inv_rm) = (1.0 / re, 1.0 / rm);
    let alpha = 0.5 * (inv_re + inv_rm);
    let beta = 0.5 * (inv_re - inv_rm).abs();
    Ok(ElsasserParams {
        re,
        rm,
        alpha,
        beta,
        swapped: inv_re < inv_rm,
    })
}

/// Converts dimensional parameters and forcing to the nondimensional Elsässer form.
///
/// `f1`, `g1` are sampled on the unit grid that represents `[0, L]^2`. The
/// returned forcing is steady.
pub fn nondimensionalize(
    params: &DimensionalParams,
    f1: &SpectralVectorField,
    g1: &SpectralVectorField,
) -> Result<(ElsasserParams, ForcingSpec)> {
    params.validate()?;
    let re = params.velocity * params.length / params.nu;
    let rm = params.velocity * params.length / params.lambda;
    let ep = derive_elsasser_params(re, rm)?;
    let f1 = f1.scaled(params.velocity_forcing_scale());
    let g1 = g1.scaled(params.magnetic_forcing_scale());
    let (f, g) = to_elsasser(&f1, &g1, ep.swapped)?;
    Ok((ep, ForcingSpec::steady(f, g)?))
}

/// Inverse of the forcing scaling in [`nondimensionalize`].
pub fn redimensionalize_forcing(
    params: &DimensionalParams,
    f1: &SpectralVectorField,
    g1: &SpectralVectorField,
) -> (SpectralVectorField, SpectralVectorField) {
    (
        f1.scaled(1.0 / params.velocity_forcing_scale()),
        g1.scaled(1.0 / params.magnetic_forcing_scale()),
    )
}

/// Grashof number from steady dimensional forcing:
/// `(8/lambda_1) max(1/nu^2, 1/lambda^2) max(||f1||, ||g1||/sqrt(rho0 mu0))`
/// with norms over `[0, L]^2` and `lambda_1 = 4 pi^2 / L^2`.
pub fn dimensional_grashof(
    params: &DimensionalParams,
    f1: &SpectralVectorField,
    g1: &SpectralVectorField,
) -> Result<f64> {
    params.validate()?;
    let lambda1 = 4.0 * std::f64::consts::PI.powi(2) / params.length.powi(2);
    let inv_sq = (1.0 / params.nu.powi(2)).max(1.0 / params.lambda.powi(2));
    // unit-grid norms are RMS values; multiply by L for the [0, L]^2 norm
    let f_norm = params.length * f1.l2_norm();
    let g_norm = params.length * g1.l2_norm() / (params.rho0 * params.mu0).sqrt();
    Ok(8.0 / lambda1 * inv_sq * f_norm.max(g_norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_case() {
        let p = derive_elsasser_params(1.0, 1.0).unwrap();
        assert_eq!((p.alpha, p.beta, p.swapped), (1.0, 0.0, false));
    }

    #[test]
    fn unswapped_case() {
        let p = derive_elsasser_params(1.0, 2.0).unwrap();
        assert_eq!((p.alpha, p.beta, p.swapped), (0.75, 0.25, false));
        assert_eq!(p.gap(), 0.5);
    }

    #[test]
    fn swapped_case() {
        let p = derive_elsasser_params(2.0, 1.0).unwrap();
        assert_eq!((p.alpha, p.beta, p.swapped), (0.75, 0.25, true));
        assert_eq!(p.gap(), 0.5);
    }

    #[test]
    fn gap_is_min_inverse_reynolds() {
        for (re, rm) in [(3.0, 7.0), (7.0, 3.0), (0.5, 20.0), (11.0, 11.0)] {
            let p = derive_elsasser_params(re, rm).unwrap();
            let expect = (1.0_f64 / re).min(1.0 / rm);
            assert!((p.gap() - expect).abs() < 1e-14);
            assert!(p.beta >= 0.0 && p.alpha > 0.0);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(derive_elsasser_params(0.0, 1.0).is_err());
        assert!(derive_elsasser_params(1.0, -2.0).is_err());
        assert!(derive_elsasser_params(f64::NAN, 1.0).is_err());
    }
}
