//! Error metrics, exponential-rate fits, theorem thresholds, the Grönwall
//! window conditions and the windowed enstrophy bound.

mod bounds;
mod errors;
mod fit;
mod gronwall;
mod thresholds;
mod windows;

pub use bounds::{check_int_bound, IntBoundReport, INT_BOUND_FLOOR};
pub use errors::{error_norms, ErrorSample, ErrorSeries, Norm};
pub use fit::{
    assess_convergence, fit_exponential_rate, Convergence, RateFit, NORM_FLOOR, ONSET_LEVEL,
    RESOLVED_LEVEL, SUCCESS_R_SQUARED,
};
pub use gronwall::{gronwall_condition_check, psi_full_observation, GronwallReport};
pub use thresholds::{
    theorem_thresholds, AnalysisConstants, ConstantRecord, TheoremId, TheoremThresholds,
};
