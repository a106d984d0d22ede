use std::f64::consts::PI;

use super::forcing::ForcingSpec;
use super::params::ElsasserParams;
use super::state::ElsasserState;
use crate::error::{Error, Result};
use crate::spectral::{elsasser_advection, Complex64, Grid, SpectralScalar, SpectralVectorField};

/// Safety factor in `dt <= CFL_SAFETY * dx / max|velocity|`.
pub const CFL_SAFETY: f64 = 0.5;

/// Largest step allowed by the advective CFL condition.
pub fn admissible_dt(grid: &Grid, max_speed: f64) -> f64 {
    if max_speed > 0.0 {
        CFL_SAFETY * grid.spacing() / max_speed
    } else {
        f64::INFINITY
    }
}

/// Per-mode linear damping `mu * s(k) * M` added to the implicit block.
///
/// `M` mixes the two Elsässer variables (rows: equation for `v`, `w`;
/// columns: `v`, `w`). `s(k)` is one inside the spectral cutoff and zero
/// outside; with `first_component_only` it becomes `k2^2/|k|^2`, which is
/// what `P(e1 e1^T u)` reduces to on divergence-free modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeDamping {
    pub mu: f64,
    pub mixing: [[f64; 2]; 2],
    pub cutoff: i64,
    pub first_component_only: bool,
}

impl ModeDamping {
    #[inline]
    pub fn selector(&self, k1: i64, k2: i64) -> f64 {
        if k1.abs().max(k2.abs()) > self.cutoff {
            0.0
        } else if self.first_component_only {
            let kk = (k1 * k1 + k2 * k2) as f64;
            (k2 * k2) as f64 / kk
        } else {
            1.0
        }
    }
}

/// Extra terms a nudged system adds on top of the plain MHD step.
#[derive(Default)]
pub(crate) struct Feedback<'a> {
    /// Added to the explicit (Adams–Bashforth) part.
    pub explicit: Option<(SpectralVectorField, SpectralVectorField)>,
    /// Damping folded into the Crank–Nicolson block, plus its time-centred source.
    pub implicit: Option<(&'a ModeDamping, (SpectralVectorField, SpectralVectorField))>,
}

/// Crank–Nicolson / Adams–Bashforth 2 integrator for the Elsässer system.
///
/// The coupled diffusion block `[[alpha, beta], [beta, alpha]] (-Laplacian)`
/// is treated with Crank–Nicolson through a 2x2 solve per wavevector; the
/// projected advection terms use AB2 after one explicit Euler start-up step;
/// forcing is evaluated at the half step.
#[derive(Clone, Debug)]
pub struct Integrator {
    params: ElsasserParams,
    dt: f64,
    state: ElsasserState,
    history: Option<(SpectralVectorField, SpectralVectorField)>,
    steps: u64,
    last_max_speed: f64,
}

impl Integrator {
    pub fn new(params: ElsasserParams, state: ElsasserState, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                detail: format!("{dt} must be positive"),
            });
        }
        Ok(Self {
            params,
            dt,
            state,
            history: None,
            steps: 0,
            last_max_speed: 0.0,
        })
    }

    pub fn state(&self) -> &ElsasserState {
        &self.state
    }

    pub fn into_state(self) -> ElsasserState {
        self.state
    }

    pub fn params(&self) -> &ElsasserParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Max of `|v|`, `|w|` on the grid at the start of the last step.
    pub fn last_max_speed(&self) -> f64 {
        self.last_max_speed
    }

    /// Shifts the clock to `t`, keeping the multistep history.
    pub fn reset_clock(&mut self, t: f64) {
        self.state.t = t;
    }

    /// Advances the plain MHD system by one step.
    pub fn step(&mut self, forcing: &[&ForcingSpec]) -> Result<()> {
        self.step_with(forcing, Feedback::default())
    }

    pub(crate) fn step_with(&mut self, forcing: &[&ForcingSpec], feedback: Feedback<'_>) -> Result<()> {
        let grid = self.state.grid().clone();
        let adv = elsasser_advection(&self.state.v, &self.state.w)?;
        self.last_max_speed = adv.max_speed;
        let admissible = admissible_dt(&grid, adv.max_speed);
        if self.dt > admissible {
            return Err(Error::Cfl {
                dt: self.dt,
                admissible,
            });
        }

        let mut nv = adv.w_grad_v.scaled(-1.0);
        let mut nw = adv.v_grad_w.scaled(-1.0);
        if let Some((ev, ew)) = &feedback.explicit {
            nv.axpy(1.0, ev);
            nw.axpy(1.0, ew);
        }
        let nv = nv.leray_project();
        let nw = nw.leray_project();
        let (ev, ew) = match &self.history {
            Some((hv, hw)) => {
                let mut ev = nv.scaled(1.5);
                ev.axpy(-0.5, hv);
                let mut ew = nw.scaled(1.5);
                ew.axpy(-0.5, hw);
                (ev, ew)
            }
            None => (nv.clone(), nw.clone()),
        };
        self.history = Some((nv, nw));

        let t_mid = self.state.t + 0.5 * self.dt;
        let mut fv = SpectralVectorField::zeros(&grid);
        let mut fw = SpectralVectorField::zeros(&grid);
        for term in forcing {
            let m = term.factor(t_mid);
            let (f, g) = term.base_fields();
            fv.axpy(m, f);
            fw.axpy(m, g);
        }
        let mut explicit_v = ev;
        explicit_v.axpy(1.0, &fv);
        let mut explicit_w = ew;
        explicit_w.axpy(1.0, &fw);
        let damping = feedback.implicit.map(|(d, (sv, sw))| {
            explicit_v.axpy(1.0, &sv);
            explicit_w.axpy(1.0, &sw);
            d
        });

        let (v, w) = crank_nicolson_update(
            &self.params,
            self.dt,
            &self.state.v,
            &self.state.w,
            &explicit_v,
            &explicit_w,
            damping,
        );
        self.state = ElsasserState {
            v,
            w,
            t: self.state.t + self.dt,
        };
        self.steps += 1;
        if !self.state.is_finite() {
            return Err(Error::Instability {
                step: self.steps,
                time: self.state.t,
                detail: format!(
                    "non-finite state (Re={}, Rm={}, dt={})",
                    self.params.re, self.params.rm, self.dt
                ),
            });
        }
        Ok(())
    }
}

/// Solves `(I + dt/2 A) x_new = (I - dt/2 A) x_old + dt * explicit` per mode.
fn crank_nicolson_update(
    params: &ElsasserParams,
    dt: f64,
    v: &SpectralVectorField,
    w: &SpectralVectorField,
    explicit_v: &SpectralVectorField,
    explicit_w: &SpectralVectorField,
    damping: Option<&ModeDamping>,
) -> (SpectralVectorField, SpectralVectorField) {
    let grid = v.grid().clone();
    let half = 0.5 * dt;
    let mut out_v: [Vec<Complex64>; 2] = [vec![Complex64::default(); grid.len()], vec![Complex64::default(); grid.len()]];
    let mut out_w = out_v.clone();
    for flat in 1..grid.len() {
        let (k1, k2) = grid.wavevector(flat);
        let lambda = 4.0 * PI * PI * (k1 * k1 + k2 * k2) as f64;
        let mut a = [
            [params.alpha * lambda, params.beta * lambda],
            [params.beta * lambda, params.alpha * lambda],
        ];
        if let Some(d) = damping {
            let s = d.mu * d.selector(k1, k2);
            if s != 0.0 {
                for (row, mix) in a.iter_mut().zip(d.mixing.iter()) {
                    row[0] += s * mix[0];
                    row[1] += s * mix[1];
                }
            }
        }
        let b = [
            [1.0 + half * a[0][0], half * a[0][1]],
            [half * a[1][0], 1.0 + half * a[1][1]],
        ];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        for c in 0..2 {
            let xv = v.component(c).coefficients()[flat];
            let xw = w.component(c).coefficients()[flat];
            let rv = xv - (xv * a[0][0] + xw * a[0][1]) * half
                + explicit_v.component(c).coefficients()[flat] * dt;
            let rw = xw - (xv * a[1][0] + xw * a[1][1]) * half
                + explicit_w.component(c).coefficients()[flat] * dt;
            out_v[c][flat] = (rv * b[1][1] - rw * b[0][1]) / det;
            out_w[c][flat] = (rw * b[0][0] - rv * b[1][0]) / det;
        }
    }
    let build = |[x, y]: [Vec<Complex64>; 2]| {
        SpectralVectorField::from_divfree_parts(
            SpectralScalar::from_coefficients(&grid, x).expect("length"),
            SpectralScalar::from_coefficients(&grid, y).expect("length"),
        )
    };
    (build(out_v), build(out_w))
}

/// Continuous-time right-hand side of the Elsässer system at time `t`:
/// `alpha Lap v + beta Lap w - P[(w.grad)v] + P f` and the mirrored `w` equation.
pub fn mhd_rhs(
    state: &ElsasserState,
    params: &ElsasserParams,
    forcing: &ForcingSpec,
    t: f64,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let adv = elsasser_advection(&state.v, &state.w)?;
    let (f, g) = forcing.evaluate(t);
    let lap_v = state.v.laplacian();
    let lap_w = state.w.laplacian();
    let mut rv = lap_v.scaled(params.alpha);
    rv.axpy(params.beta, &lap_w);
    rv.axpy(-1.0, &adv.w_grad_v);
    rv.axpy(1.0, &f);
    let mut rw = lap_w.scaled(params.alpha);
    rw.axpy(params.beta, &lap_v);
    rw.axpy(-1.0, &adv.v_grad_w);
    rw.axpy(1.0, &g);
    Ok((rv.leray_project(), rw.leray_project()))
}

/// One step from a fresh history (explicit Euler for the advection terms).
pub fn imex_step(
    state: &ElsasserState,
    params: &ElsasserParams,
    forcing: &ForcingSpec,
    dt: f64,
) -> Result<ElsasserState> {
    let mut integrator = Integrator::new(*params, state.clone(), dt)?;
    integrator.step(&[forcing])?;
    Ok(integrator.into_state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhd::derive_elsasser_params;
    use crate::spectral::random_divfree_field;

    fn single_mode_state(grid: &Grid) -> ElsasserState {
        let mut y = SpectralScalar::zeros(grid);
        y.set_mode(1, 0, Complex64::new(0.3, 0.1));
        let v = SpectralVectorField::new(SpectralScalar::zeros(grid), y)
            .unwrap()
            .mark_divergence_free()
            .unwrap();
        ElsasserState::new(v, SpectralVectorField::zeros(grid), 0.0).unwrap()
    }

    #[test]
    fn crank_nicolson_amplification_factor() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(2.0, 2.0).unwrap();
        let s0 = single_mode_state(&g);
        let dt = 0.01;
        let s1 = imex_step(&s0, &p, &ForcingSpec::zero(&g), dt).unwrap();
        let x = 2.0 * PI * PI * p.alpha * dt;
        let ratio = (1.0 - x) / (1.0 + x);
        let got = s1.v.y().coeff(1, 0) / s0.v.y().coeff(1, 0);
        assert!((got.re - ratio).abs() < 1e-14 && got.im.abs() < 1e-14);
        assert!(s1.w.is_zero());
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(3.0, 1.0).unwrap();
        let s0 = ElsasserState::zeros(&g, 0.0);
        let mut it = Integrator::new(p, s0, 0.01).unwrap();
        for _ in 0..5 {
            it.step(&[&ForcingSpec::zero(&g)]).unwrap();
        }
        assert!(it.state().v.is_zero() && it.state().w.is_zero());
        assert!((it.time() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn cfl_violation_reports_admissible_dt() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(1.0, 1.0).unwrap();
        let v = random_divfree_field(&g, 1, 1.0, 4).unwrap().scaled(10.0);
        let s0 = ElsasserState::new(v.clone(), v, 0.0).unwrap();
        let err = imex_step(&s0, &p, &ForcingSpec::zero(&g), 0.1).unwrap_err();
        match err {
            Error::Cfl { dt, admissible } => {
                assert_eq!(dt, 0.1);
                assert!(admissible < 0.1 && admissible > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rhs_is_linear_for_single_mode_without_w() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(1.0, 3.0).unwrap();
        let s = single_mode_state(&g);
        let (rv, rw) = mhd_rhs(&s, &p, &ForcingSpec::zero(&g), 0.0).unwrap();
        let lap = s.v.laplacian();
        assert!(rv.sub(&lap.scaled(p.alpha)).unwrap().l2_norm() < 1e-12);
        assert!(rw.sub(&lap.scaled(p.beta)).unwrap().l2_norm() < 1e-12);
        let zero = ElsasserState::zeros(&g, 0.0);
        let (zv, zw) = mhd_rhs(&zero, &p, &ForcingSpec::zero(&g), 0.0).unwrap();
        assert!(zv.is_zero() && zw.is_zero());
    }

    fn integrate(s0: &ElsasserState, p: ElsasserParams, f: &ForcingSpec, dt: f64, t_end: f64) -> ElsasserState {
        let mut it = Integrator::new(p, s0.clone(), dt).unwrap();
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            it.step(&[f]).unwrap();
        }
        it.into_state()
    }

    #[test]
    fn second_order_in_time() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(4.0, 2.0).unwrap();
        let f = ForcingSpec::steady_low_mode(&g, &p, 20.0, true, None).unwrap();
        let v = random_divfree_field(&g, 5, 2.0, 3).unwrap();
        let w = random_divfree_field(&g, 6, 2.0, 3).unwrap().scaled(0.7);
        let s0 = ElsasserState::new(v, w, 0.0).unwrap();
        let t_end = 0.2;
        let reference = integrate(&s0, p, &f, 0.02 / 64.0, t_end);
        let err = |dt: f64| {
            let s = integrate(&s0, p, &f, dt, t_end);
            let dv = s.v.sub(&reference.v).unwrap().l2_norm_sq();
            let dw = s.w.sub(&reference.w).unwrap().l2_norm_sq();
            (dv + dw).sqrt()
        };
        let (e1, e2) = (err(0.01), err(0.005));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order} ({e1:e}, {e2:e})");
    }

    #[test]
    fn steps_preserve_divergence_free_and_zero_mean() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(3.0, 5.0).unwrap();
        let f = ForcingSpec::steady_low_mode(&g, &p, 10.0, true, None).unwrap();
        let v = random_divfree_field(&g, 9, 1.0, 5).unwrap();
        let s0 = ElsasserState::new(v.clone(), v.scaled(0.2), 0.0).unwrap();
        let s = integrate(&s0, p, &f, 0.005, 0.25);
        for field in [&s.v, &s.w] {
            assert!(field.divergence().l2_norm() <= 1e-10 * field.l2_norm().max(1.0));
            assert_eq!(field.x().coefficients()[0], Complex64::default());
            assert_eq!(field.y().coefficients()[0], Complex64::default());
        }
    }
}
