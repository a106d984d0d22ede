//! Periodic fields on the unit square: transforms, calculus, Leray
//! projection, two-thirds dealiasing, norms and snapshot files.

mod grid;
mod random;
mod scalar;
mod snapshot;
mod vector;

pub use grid::Grid;
pub use random::random_divfree_field;
pub use scalar::SpectralScalar;
pub use snapshot::{read_snapshot, write_snapshot};
pub use vector::{
    advect, elsasser_advection, gradient, ElsasserAdvection, SpectralVectorField,
    DIVERGENCE_TOLERANCE,
};

pub use rustfft::num_complex::Complex64;
