//! Nudged (data-assimilating) Elsässer systems co-evolved with a reference
//! solution, including forcing and observation perturbations.

mod config;
mod pair;
mod run;

pub use config::{NudgingConfig, ObservationPerturbation};
pub use pair::{coupled_step, init_assimilation, nudging_term, AssimilationPair, InitMode};
pub use run::{run_assimilation, AssimilationRun, PrimitiveErrorSample, RunSpec};
