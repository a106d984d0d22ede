use std::f64::consts::PI;

use serde::Serialize;

use super::forcing::ForcingSpec;
use super::params::ElsasserParams;
use super::state::ElsasserState;
use crate::error::{Error, Result};

/// Norms of one trajectory sample, plus `||f||^2 + ||g||^2` at the same time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub l2_v: f64,
    pub l2_w: f64,
    pub h1_v: f64,
    pub h1_w: f64,
    pub forcing_sq: f64,
}

impl TrajectorySample {
    pub fn record(state: &ElsasserState, forcing: &[&ForcingSpec]) -> Self {
        let mut fv = None;
        for term in forcing {
            let (f, g) = term.evaluate(state.t);
            match &mut fv {
                None => fv = Some((f, g)),
                Some((a, b)) => {
                    a.axpy(1.0, &f);
                    b.axpy(1.0, &g);
                }
            }
        }
        let forcing_sq = fv.map_or(0.0, |(f, g)| f.l2_norm_sq() + g.l2_norm_sq());
        Self {
            t: state.t,
            l2_v: state.v.l2_norm(),
            l2_w: state.w.l2_norm(),
            h1_v: state.v.h1_seminorm(),
            h1_w: state.w.h1_seminorm(),
            forcing_sq,
        }
    }

    pub fn energy(&self) -> f64 {
        self.l2_v * self.l2_v + self.l2_w * self.l2_w
    }

    pub fn enstrophy(&self) -> f64 {
        self.h1_v * self.h1_v + self.h1_w * self.h1_w
    }
}

/// Residuals of `dE/dt + (alpha-beta) D - (||f||^2+||g||^2)/(4 pi^2 (alpha-beta))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyBudget {
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    /// Indices where the residual exceeds `tolerance`.
    pub violations: Vec<usize>,
}

impl EnergyBudget {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Discrete energy inequality along a uniformly sampled trajectory.
///
/// `dE/dt` uses central differences inside and second-order one-sided
/// differences at both ends.
pub fn energy_budget(samples: &[TrajectorySample], params: &ElsasserParams) -> Result<EnergyBudget> {
    let m = samples.len();
    if m < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: m });
    }
    let energy: Vec<f64> = samples.iter().map(TrajectorySample::energy).collect();
    let gap = params.gap();
    let mut residuals = Vec::with_capacity(m);
    let mut max_forcing: f64 = 0.0;
    for i in 0..m {
        let de = if i == 0 {
            let h = samples[1].t - samples[0].t;
            (-3.0 * energy[0] + 4.0 * energy[1] - energy[2]) / (2.0 * h)
        } else if i == m - 1 {
            let h = samples[m - 1].t - samples[m - 2].t;
            (3.0 * energy[m - 1] - 4.0 * energy[m - 2] + energy[m - 3]) / (2.0 * h)
        } else {
            (energy[i + 1] - energy[i - 1]) / (samples[i + 1].t - samples[i - 1].t)
        };
        let s = &samples[i];
        max_forcing = max_forcing.max(s.forcing_sq);
        residuals.push(de + gap * s.enstrophy() - s.forcing_sq / (4.0 * PI * PI * gap));
    }
    let tolerance = 1e-6 * max_forcing.max(1.0);
    let violations = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > tolerance)
        .map(|(i, _)| i)
        .collect();
    Ok(EnergyBudget {
        residuals,
        tolerance,
        violations,
    })
}
