use serde::Serialize;

use crate::error::{Error, Result};
use crate::mhd::{ensure_same_clock, ElsasserState};

/// Norms of `eta = v - v~` and `zeta = w - w~` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorSample {
    pub t: f64,
    pub l2_eta: f64,
    pub l2_zeta: f64,
    pub h1_eta: f64,
    pub h1_zeta: f64,
}

impl ErrorSample {
    /// `(||eta||^2 + ||zeta||^2)^(1/2)`
    pub fn l2_total(&self) -> f64 {
        self.l2_eta.hypot(self.l2_zeta)
    }

    pub fn h1_total(&self) -> f64 {
        self.h1_eta.hypot(self.h1_zeta)
    }
}

pub fn error_norms(reference: &ElsasserState, assimilated: &ElsasserState) -> Result<ErrorSample> {
    ensure_same_clock(reference.t, assimilated.t)?;
    let eta = reference.v.sub(&assimilated.v)?;
    let zeta = reference.w.sub(&assimilated.w)?;
    Ok(ErrorSample {
        t: reference.t,
        l2_eta: eta.l2_norm(),
        l2_zeta: zeta.l2_norm(),
        h1_eta: eta.h1_seminorm(),
        h1_zeta: zeta.h1_seminorm(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L2,
    H1,
}

/// Time series of error norms with strictly increasing times.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    pub l2_eta: Vec<f64>,
    pub l2_zeta: Vec<f64>,
    pub h1_eta: Vec<f64>,
    pub h1_zeta: Vec<f64>,
}

impl ErrorSeries {
    pub fn push(&mut self, s: ErrorSample) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if s.t <= last {
                return Err(Error::InvalidParameter {
                    name: "t",
                    detail: format!("sample time {} not after {last}", s.t),
                });
            }
        }
        self.times.push(s.t);
        self.l2_eta.push(s.l2_eta);
        self.l2_zeta.push(s.l2_zeta);
        self.h1_eta.push(s.h1_eta);
        self.h1_zeta.push(s.h1_zeta);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample(&self, i: usize) -> ErrorSample {
        ErrorSample {
            t: self.times[i],
            l2_eta: self.l2_eta[i],
            l2_zeta: self.l2_zeta[i],
            h1_eta: self.h1_eta[i],
            h1_zeta: self.h1_zeta[i],
        }
    }

    /// Combined norm of `(eta, zeta)` per sample.
    pub fn total(&self, norm: Norm) -> Vec<f64> {
        let (a, b) = match norm {
            Norm::L2 => (&self.l2_eta, &self.l2_zeta),
            Norm::H1 => (&self.h1_eta, &self.h1_zeta),
        };
        a.iter().zip(b).map(|(x, y)| x.hypot(*y)).collect()
    }
}
