//! The incompressible MHD system in Elsässer variables: parameters,
//! forcing and the Grashof number, the IMEX integrator, the discrete
//! energy budget and spin-up.

mod energy;
mod forcing;
mod integrator;
mod params;
mod spinup;
mod state;

pub use energy::{energy_budget, EnergyBudget, TrajectorySample};
pub use forcing::{
    grashof_number, grashof_number_of, limsup_forcing_norm, ForcingKind, ForcingSpec, Modulation,
    ModulationShape,
};
pub(crate) use integrator::Feedback;
pub use integrator::{admissible_dt, imex_step, mhd_rhs, Integrator, ModeDamping, CFL_SAFETY};
pub use params::{
    derive_elsasser_params, dimensional_grashof, nondimensionalize, redimensionalize_forcing,
    DimensionalParams, ElsasserParams,
};
pub(crate) use state::ensure_same_clock;
pub use state::{from_elsasser, to_elsasser, ElsasserState};
pub use spinup::{spin_up, SpinUpPolicy, SpinUpReport, SPINUP_TOLERANCE};
