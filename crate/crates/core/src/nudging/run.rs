use serde::Serialize;

use super::config::NudgingConfig;
use super::pair::{coupled_step, init_assimilation, AssimilationPair, InitMode};
use crate::diagnostics::{error_norms, ErrorSeries};
use crate::error::{Error, Result};
use crate::mhd::{
    from_elsasser, spin_up, ElsasserParams, ElsasserState, ForcingSpec, Integrator, SpinUpPolicy,
    SpinUpReport, TrajectorySample,
};
use crate::observation::apply_interpolant_vector;

/// Time stepping and sampling of an assimilation run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub dt: f64,
    pub horizon: f64,
    /// Must be an integer multiple of `dt`.
    pub sample_interval: f64,
    pub spinup: SpinUpPolicy,
    pub init: InitMode,
}

impl RunSpec {
    fn steps_per_sample(&self) -> Result<u64> {
        for (name, value) in [("dt", self.dt), ("horizon", self.horizon), ("sample_interval", self.sample_interval)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    detail: format!("{value} must be positive"),
                });
            }
        }
        let k = (self.sample_interval / self.dt).round();
        if k < 1.0 || (k * self.dt - self.sample_interval).abs() > 1e-9 * self.sample_interval {
            return Err(Error::InvalidParameter {
                name: "sample_interval",
                detail: format!("{} is not a multiple of dt = {}", self.sample_interval, self.dt),
            });
        }
        Ok(k as u64)
    }
}

/// L2 errors of the primitive fields `u` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrimitiveErrorSample {
    pub t: f64,
    pub l2_u: f64,
    pub l2_b: f64,
}

#[derive(Clone, Debug)]
pub struct AssimilationRun {
    pub spinup: SpinUpReport,
    pub errors: ErrorSeries,
    /// Reference trajectory norms.
    pub trajectory: Vec<TrajectorySample>,
    pub primitive_errors: Vec<PrimitiveErrorSample>,
    /// `||I_h(v - v~)||^2 + ||I_h(w - w~)||^2` square-rooted, per sample.
    pub observed_errors: Vec<f64>,
    pub pair: AssimilationPair,
}

/// Spins up the reference from `initial`, resets the clock, then co-evolves
/// the reference and the nudged system up to `horizon`, sampling errors at
/// a fixed cadence.
pub fn run_assimilation(
    params: &ElsasserParams,
    initial: ElsasserState,
    forcing: &[&ForcingSpec],
    config: &NudgingConfig,
    run: &RunSpec,
) -> Result<AssimilationRun> {
    let every = run.steps_per_sample()?;
    let mut reference = Integrator::new(*params, initial, run.dt)?;
    let spinup = spin_up(&mut reference, forcing, run.spinup)?;
    let mut pair = init_assimilation(reference, config, run.init.clone())?;
    let total = (run.horizon / run.dt).round() as u64;
    let mut out = AssimilationRun {
        spinup,
        errors: ErrorSeries::default(),
        trajectory: Vec::new(),
        primitive_errors: Vec::new(),
        observed_errors: Vec::new(),
        pair: pair.clone(),
    };
    record(&mut out, &pair, forcing, config)?;
    for step in 1..=total {
        coupled_step(&mut pair, forcing, config).map_err(|e| match e {
            Error::Instability { step: _, time, detail } => Error::Instability {
                step,
                time,
                detail: format!("{detail}; mu={}, mask={:?}", config.mu, config.mask),
            },
            other => other,
        })?;
        if step % every == 0 {
            record(&mut out, &pair, forcing, config)?;
        }
    }
    out.pair = pair;
    Ok(out)
}

fn record(out: &mut AssimilationRun, pair: &AssimilationPair, forcing: &[&ForcingSpec], config: &NudgingConfig) -> Result<()> {
    let reference = pair.reference();
    let assimilated = pair.assimilated();
    out.errors.push(error_norms(reference, assimilated)?)?;
    out.trajectory.push(TrajectorySample::record(reference, forcing));
    let eta = reference.v.sub(&assimilated.v)?;
    let zeta = reference.w.sub(&assimilated.w)?;
    let (du, db) = from_elsasser(&eta, &zeta, pair.params().swapped)?;
    out.primitive_errors.push(PrimitiveErrorSample {
        t: reference.t,
        l2_u: du.l2_norm(),
        l2_b: db.l2_norm(),
    });
    let oe = apply_interpolant_vector(&config.interpolant, &eta)?.l2_norm_sq()
        + apply_interpolant_vector(&config.interpolant, &zeta)?.l2_norm_sq();
    out.observed_errors.push(oe.sqrt());
    Ok(())
}
