//! Observation operators `I_h`, component masks, and empirical checks of
//! the interpolant approximation inequalities.

mod interpolant;
mod mask;
mod verify;

pub use interpolant::{
    apply_interpolant, apply_interpolant_vector, InterpolantConstants, InterpolantKind,
    InterpolantSpec,
};
pub use mask::{apply_masked, ObservationMask};
pub use verify::{
    count_violations, random_band_limited, verify_type1_bound, verify_type2_bound,
    VerificationReport, CONSTANT_INFLATION,
};
