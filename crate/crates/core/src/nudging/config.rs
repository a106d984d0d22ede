use crate::error::{Error, Result};
use crate::mhd::{ElsasserParams, ForcingSpec, Modulation};
use crate::observation::{InterpolantKind, InterpolantSpec, ObservationMask};
use crate::spectral::SpectralVectorField;

/// Observation error `eps(t) = envelope(t) * (eps1, eps2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationPerturbation {
    pub eps1: SpectralVectorField,
    pub eps2: SpectralVectorField,
    pub envelope: Modulation,
}

impl ObservationPerturbation {
    pub fn at(&self, t: f64) -> (SpectralVectorField, SpectralVectorField) {
        let m = self.envelope.at(t);
        (self.eps1.scaled(m), self.eps2.scaled(m))
    }
}

/// Gain, observation operator and optional perturbations of a nudged system.
#[derive(Clone, Debug, PartialEq)]
pub struct NudgingConfig {
    pub mu: f64,
    pub interpolant: InterpolantSpec,
    pub mask: ObservationMask,
    /// Forcing perturbation `(delta1, delta2)` seen only by the assimilated system.
    pub delta: Option<ForcingSpec>,
    pub eps: Option<ObservationPerturbation>,
}

impl NudgingConfig {
    pub fn new(mu: f64, interpolant: InterpolantSpec, mask: ObservationMask) -> Result<Self> {
        let config = Self {
            mu,
            interpolant,
            mask,
            delta: None,
            eps: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu",
                detail: format!("{} must be nonnegative", self.mu),
            });
        }
        if let Some(eps) = &self.eps {
            eps.envelope.validate()?;
        }
        Ok(())
    }

    /// Spectral projections are applied implicitly mode by mode; other
    /// interpolants enter the explicit part and need `mu dt <= 1`.
    pub fn is_implicit(&self) -> bool {
        self.interpolant.kind == InterpolantKind::SpectralProjection
    }

    pub(crate) fn mixing(&self, params: &ElsasserParams) -> [[f64; 2]; 2] {
        self.mask.mixing(params.swapped)
    }
}
