use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralScalar, SpectralVectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolantKind {
    /// Fourier truncation to `max(|k1|, |k2|) <= 1/h`.
    SpectralProjection,
    /// Mean over each of the `(1/h)^2` cells, piecewise constant.
    VolumeAverage,
    /// Node values on the `(1/h)^2` lattice, bilinear inside each cell.
    NodalBilinear,
}

impl InterpolantKind {
    pub fn type_class(self) -> u8 {
        match self {
            Self::SpectralProjection | Self::VolumeAverage => 1,
            Self::NodalBilinear => 2,
        }
    }
}

/// Approximation constants of an interpolant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InterpolantConstants {
    /// `||u - I_h u|| <= c1 h ||grad u||`
    Type1 { c1: f64 },
    /// `||u - I_h u|| <= c2 h ||grad u|| + c3 h^2 ||Lap u||`
    Type2 { c2: f64, c3: f64 },
}

impl InterpolantConstants {
    pub fn type_class(&self) -> u8 {
        match self {
            Self::Type1 { .. } => 1,
            Self::Type2 { .. } => 2,
        }
    }
}

/// Observation operator `I_h` at resolution `h = 1/resolution`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolantSpec {
    pub kind: InterpolantKind,
    resolution: usize,
    pub constants: Option<InterpolantConstants>,
}

impl InterpolantSpec {
    /// `h` must be the reciprocal of a positive integer.
    pub fn new(kind: InterpolantKind, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::OutOfRange {
                name: "h",
                detail: format!("{h} not in (0, 1]"),
            });
        }
        let resolution = (1.0 / h).round();
        if ((1.0 / resolution) - h).abs() > 1e-9 * h {
            return Err(Error::InvalidParameter {
                name: "h",
                detail: format!("1/{h} is not an integer"),
            });
        }
        Ok(Self::with_resolution(kind, resolution as usize))
    }

    pub fn with_resolution(kind: InterpolantKind, resolution: usize) -> Self {
        Self {
            kind,
            resolution: resolution.max(1),
            constants: None,
        }
    }

    pub fn with_constants(mut self, constants: InterpolantConstants) -> Result<Self> {
        if constants.type_class() != self.type_class() {
            return Err(Error::TypeMismatch {
                expected: self.type_class(),
                found: constants.type_class(),
            });
        }
        self.constants = Some(constants);
        Ok(self)
    }

    pub fn h(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// `N = 1/h`.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn type_class(&self) -> u8 {
        self.kind.type_class()
    }

    /// Grid-based kinds need `1/h` to divide `n`.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        match self.kind {
            InterpolantKind::SpectralProjection => Ok(()),
            _ if grid.n() % self.resolution == 0 => Ok(()),
            _ => Err(Error::InvalidParameter {
                name: "h",
                detail: format!(
                    "1/h = {} does not divide the grid size {}",
                    self.resolution,
                    grid.n()
                ),
            }),
        }
    }
}

/// `I_h` applied to a scalar field. The result has zero mean.
pub fn apply_interpolant(spec: &InterpolantSpec, field: &SpectralScalar) -> Result<SpectralScalar> {
    let grid = field.grid();
    spec.check_grid(grid)?;
    let n_obs = spec.resolution;
    match spec.kind {
        InterpolantKind::SpectralProjection => {
            let mut out = field.clone();
            out.truncate(n_obs as i64);
            Ok(out)
        }
        InterpolantKind::VolumeAverage => {
            let n = grid.n();
            let m = n / n_obs;
            let u = field.to_physical();
            let mut means = vec![0.0; n_obs * n_obs];
            for i in 0..n {
                for j in 0..n {
                    means[(i / m) * n_obs + j / m] += u[i * n + j];
                }
            }
            let inv = 1.0 / (m * m) as f64;
            let samples: Vec<f64> = (0..n * n)
                .map(|idx| means[(idx / n / m) * n_obs + (idx % n) / m] * inv)
                .collect();
            Ok(SpectralScalar::from_physical(grid, &samples)?.0)
        }
        InterpolantKind::NodalBilinear => {
            let n = grid.n();
            let m = n / n_obs;
            let u = field.to_physical();
            let node = |a: usize, b: usize| u[((a % n_obs) * m) * n + (b % n_obs) * m];
            let samples: Vec<f64> = (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    let (a, b) = (i / m, j / m);
                    let s = (i % m) as f64 / m as f64;
                    let t = (j % m) as f64 / m as f64;
                    (1.0 - s) * (1.0 - t) * node(a, b)
                        + s * (1.0 - t) * node(a + 1, b)
                        + (1.0 - s) * t * node(a, b + 1)
                        + s * t * node(a + 1, b + 1)
                })
                .collect();
            Ok(SpectralScalar::from_physical(grid, &samples)?.0)
        }
    }
}

/// `I_h` applied componentwise.
pub fn apply_interpolant_vector(
    spec: &InterpolantSpec,
    field: &SpectralVectorField,
) -> Result<SpectralVectorField> {
    SpectralVectorField::new(
        apply_interpolant(spec, field.x())?,
        apply_interpolant(spec, field.y())?,
    )
}
