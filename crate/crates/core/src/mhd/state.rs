use super::params::ElsasserParams;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralVectorField};

/// `(v, w)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElsasserState {
    pub v: SpectralVectorField,
    pub w: SpectralVectorField,
    pub t: f64,
}

impl ElsasserState {
    /// Validates that both fields are divergence-free and share a grid.
    pub fn new(v: SpectralVectorField, w: SpectralVectorField, t: f64) -> Result<Self> {
        v.grid().ensure_same(w.grid())?;
        let v = if v.is_divergence_free() {
            v
        } else {
            v.mark_divergence_free()?
        };
        let w = if w.is_divergence_free() {
            w
        } else {
            w.mark_divergence_free()?
        };
        Ok(Self { v, w, t })
    }

    pub fn zeros(grid: &Grid, t: f64) -> Self {
        Self {
            v: SpectralVectorField::zeros(grid),
            w: SpectralVectorField::zeros(grid),
            t,
        }
    }

    /// Builds the state from primitive velocity and magnetic fields.
    pub fn from_primitive(
        u: &SpectralVectorField,
        b: &SpectralVectorField,
        params: &ElsasserParams,
        t: f64,
    ) -> Result<Self> {
        let (v, w) = to_elsasser(u, b, params.swapped)?;
        Self::new(v.leray_project(), w.leray_project(), t)
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    /// `||v||^2 + ||w||^2`
    pub fn energy(&self) -> f64 {
        self.v.l2_norm_sq() + self.w.l2_norm_sq()
    }

    /// `||grad v||^2 + ||grad w||^2`
    pub fn enstrophy(&self) -> f64 {
        self.v.h1_seminorm_sq() + self.w.h1_seminorm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.energy().is_finite()
    }
}

/// `v = u + b`, `w = u - b` (or `b - u` when swapped).
pub fn to_elsasser(
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    swapped: bool,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let v = u.add(b)?;
    let w = if swapped { b.sub(u)? } else { u.sub(b)? };
    Ok((v, w))
}

/// Inverse of [`to_elsasser`].
pub fn from_elsasser(
    v: &SpectralVectorField,
    w: &SpectralVectorField,
    swapped: bool,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let sum = v.add(w)?.scaled(0.5);
    let diff = v.sub(w)?.scaled(0.5);
    Ok(if swapped { (diff, sum) } else { (sum, diff) })
}

/// Raises a clock mismatch unless `a` and `b` agree exactly.
pub(crate) fn ensure_same_clock(a: f64, b: f64) -> Result<()> {
    if a != b {
        return Err(Error::ClockMismatch { left: a, right: b });
    }
    Ok(())
}
