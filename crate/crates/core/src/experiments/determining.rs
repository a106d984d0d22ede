use super::checks::{decay_trend, Check};
use super::config::ExperimentConfig;
use super::output::{csv, RunFiles};
use super::scenario::{
    applicable_theorems, base_forcing, choose_dt, constants_file, initial_state, threshold_entries,
    verify_interpolant, with_dt_retries, DeterminingSummary, RunSummary, ScenarioOutcome,
    ThresholdReport, REGIME_LABEL, TREND_RATIO,
};
use crate::error::{Error, Result};
use crate::mhd::{
    derive_elsasser_params, grashof_number, grashof_number_of, spin_up, ElsasserParams,
    ElsasserState, ForcingSpec, Integrator, Modulation, SpinUpPolicy,
};
use crate::nudging::{coupled_step, init_assimilation, InitMode, NudgingConfig};
use crate::observation::{apply_interpolant_vector, InterpolantConstants, InterpolantSpec, ObservationMask};

/// Difference norms sampled during the determining experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeterminingSeries {
    pub times: Vec<f64>,
    /// `||I_h(v1 - v2)|| + ||I_h(w1 - w2)||` in the root-sum-square sense.
    pub observed_difference: Vec<f64>,
    pub full_difference: Vec<f64>,
    pub aux_to_first: Vec<f64>,
    pub aux_to_second: Vec<f64>,
}

impl DeterminingSeries {
    pub fn to_csv(&self) -> String {
        csv(
            ["t", "ih_difference", "full_difference", "aux_to_first", "aux_to_second"],
            (0..self.times.len()).map(|i| {
                [
                    self.times[i],
                    self.observed_difference[i],
                    self.full_difference[i],
                    self.aux_to_first[i],
                    self.aux_to_second[i],
                ]
            }),
        )
    }
}

fn pair_distance(a: &ElsasserState, b: &ElsasserState) -> Result<f64> {
    Ok((a.v.sub(&b.v)?.l2_norm_sq() + a.w.sub(&b.w)?.l2_norm_sq()).sqrt())
}

fn observed_distance(spec: &InterpolantSpec, a: &ElsasserState, b: &ElsasserState) -> Result<f64> {
    let dv = apply_interpolant_vector(spec, &a.v.sub(&b.v)?)?;
    let dw = apply_interpolant_vector(spec, &a.w.sub(&b.w)?)?;
    Ok((dv.l2_norm_sq() + dw.l2_norm_sq()).sqrt())
}

/// Gain `(alpha - beta) / (c1^2 h^2)` of the auxiliary nudged system.
pub fn auxiliary_gain(params: &ElsasserParams, spec: &InterpolantSpec) -> Result<f64> {
    match spec.constants {
        Some(InterpolantConstants::Type1 { c1 }) => Ok(params.gap() / (c1 * spec.h()).powi(2)),
        Some(InterpolantConstants::Type2 { .. }) => Err(Error::TypeMismatch {
            expected: 1,
            found: 2,
        }),
        None => Err(Error::MissingConstant("c1")),
    }
}

struct Setup<'a> {
    params: ElsasserParams,
    first: ElsasserState,
    second: ElsasserState,
    forcing: &'a ForcingSpec,
    nudging: NudgingConfig,
    horizon: f64,
    sample_interval: f64,
    spinup: SpinUpPolicy,
}

fn integrate(setup: &Setup, dt: f64) -> Result<DeterminingSeries> {
    let every = (setup.sample_interval / dt).round() as u64;
    let delta = setup.nudging.delta.as_ref().expect("determining setup carries a perturbation");
    let mut first = Integrator::new(setup.params, setup.first.clone(), dt)?;
    let mut second = Integrator::new(setup.params, setup.second.clone(), dt)?;
    spin_up(&mut first, &[setup.forcing], setup.spinup)?;
    spin_up(&mut second, &[setup.forcing], setup.spinup)?;
    let mut pair = init_assimilation(first, &setup.nudging, InitMode::Zero)?;
    let mut series = DeterminingSeries::default();
    let spec = &setup.nudging.interpolant;
    let mut record = |pair: &crate::nudging::AssimilationPair, second: &Integrator| -> Result<()> {
        let (r, a, s) = (pair.reference(), pair.assimilated(), second.state());
        series.times.push(r.t);
        series.observed_difference.push(observed_distance(spec, r, s)?);
        series.full_difference.push(pair_distance(r, s)?);
        series.aux_to_first.push(pair_distance(a, r)?);
        series.aux_to_second.push(pair_distance(a, s)?);
        Ok(())
    };
    record(&pair, &second)?;
    let total = (setup.horizon / dt).round() as u64;
    for step in 1..=total {
        coupled_step(&mut pair, &[setup.forcing], &setup.nudging)?;
        second.step(&[setup.forcing, delta])?;
        if step % every == 0 {
            record(&pair, &second)?;
        }
    }
    Ok(series)
}

/// Two solutions under the same Grashof number from different seeds, the
/// second forced by `F + delta(t)` with decaying `delta`, plus an auxiliary
/// system nudged toward the first through the interpolant.
pub fn run_determining_experiment(config: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let grid = config.grid()?;
    let params = derive_elsasser_params(config.re, config.rm)?;
    let forcing = base_forcing(config, &grid, &params)?;
    let a = config.perturbation_amplitude;
    let (f, g) = forcing.base_fields();
    let delta = ForcingSpec::modulated(
        f.scaled(a),
        g.scaled(a),
        Modulation::decaying(1.0, config.perturbation_rate, 0.0),
    )?;
    let grashof_first = grashof_number(&forcing, &params);
    let grashof_second = grashof_number_of(&[&forcing, &delta], &params);
    if (grashof_first - grashof_second).abs() > 1e-9 * grashof_first.max(1.0) {
        return Err(Error::GrashofMismatch {
            first: grashof_first,
            second: grashof_second,
        });
    }

    let verification = verify_interpolant(config, &grid)?;
    let spec = config.interpolant_spec()?.with_constants(verification.constants)?;
    let mu_aux = auxiliary_gain(&params, &spec)?;
    let mut nudging = NudgingConfig::new(mu_aux, spec.clone(), ObservationMask::All)?;
    nudging.delta = Some(delta);

    let first = initial_state(config, &grid, &params, config.seed)?;
    let second = initial_state(config, &grid, &params, config.secondary_seed())?;
    let explicit_mu = (!nudging.is_implicit()).then_some(mu_aux);
    let faster = if first.v.max_magnitude().max(first.w.max_magnitude())
        >= second.v.max_magnitude().max(second.w.max_magnitude())
    {
        &first
    } else {
        &second
    };
    let dt0 = choose_dt(config, faster, explicit_mu);
    let setup = Setup {
        params,
        first: first.clone(),
        second: second.clone(),
        forcing: &forcing,
        nudging,
        horizon: config.horizon,
        sample_interval: config.sample_interval,
        spinup: config.spinup_policy(),
    };
    let (series, dt, dt_halvings) = with_dt_retries(config, dt0, |dt| integrate(&setup, dt))?;
    let mut effective = config.clone();
    effective.dt = Some(dt);

    let t = &series.times;
    let observed = decay_trend(t, &series.observed_difference, TREND_RATIO);
    let full = decay_trend(t, &series.full_difference, TREND_RATIO);
    let aux = decay_trend(t, &series.aux_to_first, TREND_RATIO);
    let trend_check = |name, tr: &super::checks::Trend| {
        Check::new(
            name,
            tr.decaying,
            format!("peak {:e}, terminal {:e}, tail rate {:?}", tr.peak, tr.terminal, tr.tail_rate),
        )
    };
    let checks = vec![
        trend_check("observed_difference_decays", &observed),
        trend_check("full_difference_decays", &full),
        trend_check("auxiliary_synchronizes", &aux),
    ];
    let passed = checks.iter().all(|c| !c.failed());

    let theorems = threshold_entries(
        &applicable_theorems(ObservationMask::All, spec.type_class()),
        grashof_first,
        &params,
        &config.analysis_constants(),
        &spec,
        mu_aux,
        config.threshold_margin,
    )?;
    let thresholds = ThresholdReport {
        grashof: grashof_first,
        actual_mu: mu_aux,
        actual_h: spec.h(),
        empirical_rate_l2: aux.tail_rate,
        empirical_rate_h1: None,
        theorems,
        checks: checks.clone(),
    };
    let summary = RunSummary {
        scenario: config.scenario,
        regime: REGIME_LABEL,
        grashof: grashof_first,
        params,
        mask: ObservationMask::All,
        interpolant: config.interpolant,
        h: spec.h(),
        mu: mu_aux,
        dt,
        dt_halvings,
        horizon: config.horizon,
        seed: config.seed,
        assimilation: None,
        determining: Some(DeterminingSummary {
            mu_aux,
            grashof_first,
            grashof_second,
            observed_difference: observed,
            full_difference: full,
            aux_to_first: aux,
        }),
        checks,
        passed,
    };

    let mut files = RunFiles::default();
    files.insert("config.toml", effective.to_toml_string());
    constants_file(config, &verification, &mut files)?;
    files.insert_json("thresholds.json", &thresholds)?;
    files.insert("determining.csv", series.to_csv());
    files.insert_json("summary.json", &summary)?;
    Ok(ScenarioOutcome {
        config: effective,
        summary,
        thresholds,
        verification,
        files,
        run: None,
    })
}
