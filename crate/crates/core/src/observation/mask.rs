use serde::{Deserialize, Serialize};

use super::interpolant::{apply_interpolant, InterpolantSpec};
use crate::error::Result;
use crate::spectral::{SpectralScalar, SpectralVectorField};

/// Which components of the observed difference feed back into the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservationMask {
    /// Both components of both Elsässer variables.
    All,
    /// First components of both variables, embedded along `e1`.
    FirstComponent,
    /// Only `v`.
    VOnly,
    /// Only `w`.
    WOnly,
    /// Only the magnetic field `b`.
    MagneticOnly,
    /// Only the velocity `u`.
    VelocityOnly,
}

impl ObservationMask {
    /// Matrix taking the observed `(dv, dw)` to the feedback on the `(v, w)` equations.
    pub fn mixing(self, swapped: bool) -> [[f64; 2]; 2] {
        let s = if swapped { -1.0 } else { 1.0 };
        match self {
            Self::All | Self::FirstComponent => [[1.0, 0.0], [0.0, 1.0]],
            Self::VOnly => [[1.0, 0.0], [0.0, 0.0]],
            Self::WOnly => [[0.0, 0.0], [0.0, 1.0]],
            // b = (v - w)/2, or (v + w)/2 when w = b - u
            Self::MagneticOnly => [[0.5, -0.5 * s], [-0.5 * s, 0.5]],
            // u = (v + w)/2, or (v - w)/2 when w = b - u
            Self::VelocityOnly => [[0.5, 0.5 * s], [0.5 * s, 0.5]],
        }
    }

    pub fn first_component_only(self) -> bool {
        matches!(self, Self::FirstComponent)
    }
}

/// Masked interpolated feedback `(I_h-part for v, I_h-part for w)` of an
/// observed difference `(dv, dw)`. Not Leray-projected.
pub fn apply_masked(
    spec: &InterpolantSpec,
    mask: ObservationMask,
    swapped: bool,
    dv: &SpectralVectorField,
    dw: &SpectralVectorField,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    dv.grid().ensure_same(dw.grid())?;
    let grid = dv.grid();
    let m = mask.mixing(swapped);
    let axes: &[usize] = if mask.first_component_only() { &[0] } else { &[0, 1] };
    let mut out_v = [SpectralScalar::zeros(grid), SpectralScalar::zeros(grid)];
    let mut out_w = out_v.clone();
    for &axis in axes {
        let mut needs = [false; 2];
        for row in &m {
            needs[0] |= row[0] != 0.0;
            needs[1] |= row[1] != 0.0;
        }
        let iv = if needs[0] {
            Some(apply_interpolant(spec, dv.component(axis))?)
        } else {
            None
        };
        let iw = if needs[1] {
            Some(apply_interpolant(spec, dw.component(axis))?)
        } else {
            None
        };
        for (out, row) in [(&mut out_v[axis], m[0]), (&mut out_w[axis], m[1])] {
            if let Some(iv) = &iv {
                out.axpy(row[0], iv);
            }
            if let Some(iw) = &iw {
                out.axpy(row[1], iw);
            }
        }
    }
    let [vx, vy] = out_v;
    let [wx, wy] = out_w;
    Ok((SpectralVectorField::new(vx, vy)?, SpectralVectorField::new(wx, wy)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::InterpolantKind;
    use crate::spectral::{random_divfree_field, Grid};

    fn fields(g: &Grid) -> (SpectralVectorField, SpectralVectorField) {
        (
            random_divfree_field(g, 1, 1.0, 8).unwrap(),
            random_divfree_field(g, 2, 1.0, 8).unwrap(),
        )
    }

    #[test]
    fn v_only_gives_zero_w_feedback() {
        let g = Grid::new(32).unwrap();
        let (dv, dw) = fields(&g);
        let spec = InterpolantSpec::with_resolution(InterpolantKind::VolumeAverage, 8);
        let (fv, fw) = apply_masked(&spec, ObservationMask::VOnly, false, &dv, &dw).unwrap();
        assert!(fw.is_zero());
        assert!(!fv.is_zero());
    }

    #[test]
    fn first_component_ignores_second_components() {
        let g = Grid::new(32).unwrap();
        let (dv, dw) = fields(&g);
        let spec = InterpolantSpec::with_resolution(InterpolantKind::NodalBilinear, 8);
        let zero_first = |f: &SpectralVectorField| {
            SpectralVectorField::new(SpectralScalar::zeros(&g), f.y().clone()).unwrap()
        };
        let (fv, fw) =
            apply_masked(&spec, ObservationMask::FirstComponent, false, &zero_first(&dv), &zero_first(&dw)).unwrap();
        assert!(fv.is_zero() && fw.is_zero());
        let (fv, _) = apply_masked(&spec, ObservationMask::FirstComponent, false, &dv, &dw).unwrap();
        assert!(fv.y().is_zero() && !fv.x().is_zero());
    }

    #[test]
    fn all_with_spectral_projection_is_truncation() {
        let g = Grid::new(32).unwrap();
        let (dv, dw) = fields(&g);
        let spec = InterpolantSpec::with_resolution(InterpolantKind::SpectralProjection, 4);
        let (fv, fw) = apply_masked(&spec, ObservationMask::All, true, &dv, &dw).unwrap();
        assert_eq!(fv.sub(&dv.truncated(4)).unwrap().l2_norm(), 0.0);
        assert_eq!(fw.sub(&dw.truncated(4)).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn magnetic_mask_observes_b_only() {
        let g = Grid::new(32).unwrap();
        let (u, _) = fields(&g);
        let spec = InterpolantSpec::with_resolution(InterpolantKind::SpectralProjection, 8);
        for swapped in [false, true] {
            // b = 0 gives v = u and w = u (or -u when swapped)
            let w = if swapped { u.scaled(-1.0) } else { u.clone() };
            let (fv, fw) = apply_masked(&spec, ObservationMask::MagneticOnly, swapped, &u, &w).unwrap();
            assert!(fv.l2_norm() < 1e-15 && fw.l2_norm() < 1e-15);
            let (fv, _) = apply_masked(&spec, ObservationMask::VelocityOnly, swapped, &u, &w).unwrap();
            assert!(fv.sub(&u.truncated(8)).unwrap().l2_norm() < 1e-15);
        }
    }
}
