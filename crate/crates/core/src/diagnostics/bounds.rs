use serde::Serialize;

use super::windows::{intervals_per_window, sliding_integrals};
use crate::error::{Error, Result};
use crate::mhd::ElsasserParams;

/// Absolute slack allowed on the windowed enstrophy bound.
pub const INT_BOUND_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntBoundReport {
    pub window: f64,
    /// `(1 + T pi^2 (alpha - beta)) (alpha - beta) G^2`
    pub bound: f64,
    pub worst_integral: f64,
    pub worst_start: f64,
    /// `bound - worst_integral`
    pub margin: f64,
    pub passed: bool,
}

/// Checks `int_t^{t+T} (||grad v||^2 + ||grad w||^2) <= (1 + T pi^2 gap) gap G^2`
/// for every window start.
pub fn check_int_bound(
    times: &[f64],
    enstrophy: &[f64],
    grashof: f64,
    params: &ElsasserParams,
    window: f64,
) -> Result<IntBoundReport> {
    if times.len() != enstrophy.len() {
        return Err(Error::SampleCount {
            expected: times.len(),
            got: enstrophy.len(),
        });
    }
    let w = intervals_per_window(times, window, 8)?;
    let gap = params.gap();
    let bound = (1.0 + window * std::f64::consts::PI.powi(2) * gap) * gap * grashof * grashof;
    let integrals = sliding_integrals(times, enstrophy, w);
    let (worst_start, worst_integral) = integrals
        .into_iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if !worst_integral.is_finite() {
        return Err(Error::InsufficientSamples {
            needed: w + 1,
            got: times.len(),
        });
    }
    Ok(IntBoundReport {
        window,
        bound,
        worst_integral,
        worst_start,
        margin: bound - worst_integral,
        passed: worst_integral <= bound + INT_BOUND_FLOOR,
    })
}
