use super::config::NudgingConfig;
use crate::error::{Error, Result};
use crate::mhd::{ensure_same_clock, ElsasserParams, ElsasserState, Feedback, ForcingSpec, Integrator, ModeDamping};
use crate::observation::apply_masked;
use crate::spectral::SpectralVectorField;

/// Initial condition of the assimilated system.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum InitMode {
    /// `v~ = w~ = 0`.
    #[default]
    Zero,
    /// Exact copy of the reference, including its multistep history.
    CopyReference,
    /// Caller-supplied fields; must be divergence-free.
    Custom(SpectralVectorField, SpectralVectorField),
}

/// Reference and assimilated systems advanced on a shared clock.
#[derive(Clone, Debug)]
pub struct AssimilationPair {
    reference: Integrator,
    assimilated: Integrator,
}

impl AssimilationPair {
    pub fn reference(&self) -> &ElsasserState {
        self.reference.state()
    }

    pub fn assimilated(&self) -> &ElsasserState {
        self.assimilated.state()
    }

    pub fn time(&self) -> f64 {
        self.reference.time()
    }

    pub fn dt(&self) -> f64 {
        self.reference.dt()
    }

    pub fn params(&self) -> &ElsasserParams {
        self.reference.params()
    }

    pub fn steps(&self) -> u64 {
        self.assimilated.steps()
    }
}

/// Pairs a (spun-up) reference integrator with a fresh assimilated system.
pub fn init_assimilation(reference: Integrator, config: &NudgingConfig, init: InitMode) -> Result<AssimilationPair> {
    config.validate()?;
    config.interpolant.check_grid(reference.state().grid())?;
    let t = reference.time();
    let assimilated = match init {
        InitMode::Zero => Integrator::new(
            *reference.params(),
            ElsasserState::zeros(reference.state().grid(), t),
            reference.dt(),
        )?,
        InitMode::CopyReference => reference.clone(),
        InitMode::Custom(v, w) => {
            reference.state().grid().ensure_same(v.grid())?;
            let state = ElsasserState::new(v, w, t)?;
            Integrator::new(*reference.params(), state, reference.dt())?
        }
    };
    Ok(AssimilationPair {
        reference,
        assimilated,
    })
}

/// `mu P I_h(mask (v + eps1 - v~, w + eps2 - w~))` at time `t`.
pub fn nudging_term(
    config: &NudgingConfig,
    params: &ElsasserParams,
    reference: &ElsasserState,
    assimilated: &ElsasserState,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    ensure_same_clock(reference.t, assimilated.t)?;
    let grid = reference.grid();
    if config.mu == 0.0 {
        return Ok((SpectralVectorField::zeros(grid), SpectralVectorField::zeros(grid)));
    }
    let (dv, dw) = observed_difference(config, reference, Some(assimilated), reference.t)?;
    let (fv, fw) = apply_masked(&config.interpolant, config.mask, params.swapped, &dv, &dw)?;
    Ok((
        fv.leray_project().scaled(config.mu),
        fw.leray_project().scaled(config.mu),
    ))
}

/// `reference + eps(t) - assimilated`.
fn observed_difference(
    config: &NudgingConfig,
    reference: &ElsasserState,
    assimilated: Option<&ElsasserState>,
    t: f64,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let mut dv = reference.v.clone();
    let mut dw = reference.w.clone();
    if let Some(eps) = &config.eps {
        let (e1, e2) = eps.at(t);
        dv.axpy(1.0, &e1);
        dw.axpy(1.0, &e2);
    }
    if let Some(a) = assimilated {
        dv = dv.sub(&a.v)?;
        dw = dw.sub(&a.w)?;
    }
    Ok((dv, dw))
}

/// Advances both systems by one step.
///
/// The reference takes a plain step. The assimilated system adds `delta`
/// to its forcing and the nudging feedback: for spectral projections the
/// self-damping part goes into the Crank–Nicolson block and the observed
/// part is averaged over the step; otherwise the whole feedback is explicit.
pub fn coupled_step(pair: &mut AssimilationPair, forcing: &[&ForcingSpec], config: &NudgingConfig) -> Result<()> {
    let dt = pair.dt();
    let t = pair.time();
    let params = *pair.params();
    let implicit = config.is_implicit();
    if config.mu > 0.0 && !implicit && config.mu * dt > 1.0 {
        return Err(Error::NudgingStability {
            mu_dt: config.mu * dt,
            admissible: 1.0 / config.mu,
        });
    }
    let before = pair.reference.state().clone();
    pair.reference.step(forcing)?;

    let mut assimilated_forcing = forcing.to_vec();
    if let Some(delta) = &config.delta {
        assimilated_forcing.push(delta);
    }
    let project = |(fv, fw): (SpectralVectorField, SpectralVectorField)| {
        (
            fv.dealias().scaled(config.mu),
            fw.dealias().scaled(config.mu),
        )
    };
    let damping;
    let feedback = if config.mu == 0.0 {
        Feedback::default()
    } else if implicit {
        let after = pair.reference.state();
        let mid = ElsasserState {
            v: before.v.add(&after.v)?.scaled(0.5),
            w: before.w.add(&after.w)?.scaled(0.5),
            t: t + 0.5 * dt,
        };
        let (ov, ow) = observed_difference(config, &mid, None, t + 0.5 * dt)?;
        let (sv, sw) = project(apply_masked(&config.interpolant, config.mask, params.swapped, &ov, &ow)?);
        let grid = before.grid();
        damping = ModeDamping {
            mu: config.mu,
            mixing: config.mixing(&params),
            cutoff: (config.interpolant.resolution() as i64).min(grid.dealias_cutoff()),
            first_component_only: config.mask.first_component_only(),
        };
        Feedback {
            explicit: None,
            implicit: Some((&damping, (sv.leray_project(), sw.leray_project()))),
        }
    } else {
        let (dv, dw) = observed_difference(config, &before, Some(pair.assimilated.state()), t)?;
        let terms = project(apply_masked(&config.interpolant, config.mask, params.swapped, &dv, &dw)?);
        Feedback {
            explicit: Some(terms),
            implicit: None,
        }
    };
    pair.assimilated.step_with(&assimilated_forcing, feedback)?;
    ensure_same_clock(pair.reference.time(), pair.assimilated.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::error_norms;
    use crate::mhd::derive_elsasser_params;
    use crate::observation::{InterpolantKind, InterpolantSpec, ObservationMask};
    use crate::spectral::{random_divfree_field, Grid};

    fn reference(g: &Grid, params: ElsasserParams) -> Integrator {
        let v = random_divfree_field(g, 1, 1.0, 4).unwrap();
        let w = random_divfree_field(g, 2, 1.0, 4).unwrap();
        Integrator::new(params, ElsasserState::new(v, w, 0.0).unwrap(), 5e-3).unwrap()
    }

    fn config(kind: InterpolantKind, mask: ObservationMask, mu: f64) -> NudgingConfig {
        NudgingConfig::new(mu, InterpolantSpec::with_resolution(kind, 4), mask).unwrap()
    }

    #[test]
    fn default_init_is_zero_and_custom_is_validated() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(2.0, 3.0).unwrap();
        let c = config(InterpolantKind::SpectralProjection, ObservationMask::All, 1.0);
        let pair = init_assimilation(reference(&g, p), &c, InitMode::default()).unwrap();
        assert!(pair.assimilated().v.is_zero() && pair.assimilated().w.is_zero());
        let copy = init_assimilation(reference(&g, p), &c, InitMode::CopyReference).unwrap();
        assert_eq!(error_norms(copy.reference(), copy.assimilated()).unwrap().l2_total(), 0.0);
        let bad = SpectralVectorField::from_fns(&g, |x, _| (2.0 * std::f64::consts::PI * x).sin(), |_, _| 0.0);
        let custom = InitMode::Custom(bad, SpectralVectorField::zeros(&g));
        assert!(init_assimilation(reference(&g, p), &c, custom).is_err());
    }

    #[test]
    fn nudging_term_edge_cases() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(2.0, 3.0).unwrap();
        let r = reference(&g, p);
        let s = r.state();
        let c = config(InterpolantKind::VolumeAverage, ObservationMask::All, 3.0);
        let (fv, fw) = nudging_term(&c, &p, s, s).unwrap();
        assert!(fv.is_zero() && fw.is_zero());
        let zero = ElsasserState::zeros(&g, 0.0);
        let c0 = config(InterpolantKind::VolumeAverage, ObservationMask::All, 0.0);
        let (fv, fw) = nudging_term(&c0, &p, s, &zero).unwrap();
        assert!(fv.is_zero() && fw.is_zero());
        // full-resolution projection: F = mu P (v - v~)
        let full = NudgingConfig::new(
            2.0,
            InterpolantSpec::with_resolution(InterpolantKind::SpectralProjection, 16),
            ObservationMask::All,
        )
        .unwrap();
        let (fv, fw) = nudging_term(&full, &p, s, &zero).unwrap();
        assert!(fv.sub(&s.v.scaled(2.0)).unwrap().l2_norm() < 1e-14);
        assert!(fw.sub(&s.w.scaled(2.0)).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn explicit_gain_limit() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(2.0, 3.0).unwrap();
        let c = config(InterpolantKind::NodalBilinear, ObservationMask::All, 500.0);
        let mut pair = init_assimilation(reference(&g, p), &c, InitMode::Zero).unwrap();
        let f = ForcingSpec::zero(&g);
        match coupled_step(&mut pair, &[&f], &c) {
            Err(Error::NudgingStability { mu_dt, admissible }) => {
                assert!((mu_dt - 2.5).abs() < 1e-12);
                assert!((admissible - 0.002).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn synchronized_pair_stays_synchronized() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(5.0, 3.0).unwrap();
        let f = ForcingSpec::steady_low_mode(&g, &p, 10.0, true, None).unwrap();
        for (kind, mask) in [
            (InterpolantKind::SpectralProjection, ObservationMask::All),
            (InterpolantKind::SpectralProjection, ObservationMask::FirstComponent),
            (InterpolantKind::VolumeAverage, ObservationMask::VOnly),
        ] {
            let c = config(kind, mask, 20.0);
            let mut pair = init_assimilation(reference(&g, p), &c, InitMode::CopyReference).unwrap();
            for _ in 0..200 {
                coupled_step(&mut pair, &[&f], &c).unwrap();
            }
            let e = error_norms(pair.reference(), pair.assimilated()).unwrap();
            assert!(e.l2_total() <= 1e-10, "{kind:?} {mask:?}: {}", e.l2_total());
        }
    }

    #[test]
    fn zero_gain_does_not_synchronize() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(5.0, 5.0).unwrap();
        let f = ForcingSpec::steady_low_mode(&g, &p, 10.0, true, None).unwrap();
        let c = config(InterpolantKind::SpectralProjection, ObservationMask::All, 0.0);
        let mut pair = init_assimilation(reference(&g, p), &c, InitMode::Zero).unwrap();
        for _ in 0..200 {
            coupled_step(&mut pair, &[&f], &c).unwrap();
        }
        let e = error_norms(pair.reference(), pair.assimilated()).unwrap();
        assert!(e.l2_total() > 1e-6);
    }

    #[test]
    fn full_observation_decays() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(5.0, 5.0).unwrap();
        let f = ForcingSpec::steady_low_mode(&g, &p, 10.0, true, None).unwrap();
        for kind in [InterpolantKind::SpectralProjection, InterpolantKind::VolumeAverage] {
            let c = config(kind, ObservationMask::All, 50.0);
            let mut pair = init_assimilation(reference(&g, p), &c, InitMode::Zero).unwrap();
            let e0 = error_norms(pair.reference(), pair.assimilated()).unwrap().l2_total();
            for _ in 0..400 {
                coupled_step(&mut pair, &[&f], &c).unwrap();
            }
            let e1 = error_norms(pair.reference(), pair.assimilated()).unwrap().l2_total();
            assert!(e1 < 1e-3 * e0, "{kind:?}: {e0} -> {e1}");
        }
    }
}
