use serde::{Deserialize, Serialize};

use super::forcing::ForcingSpec;
use super::integrator::Integrator;
use crate::error::{Error, Result};

/// How long to pre-integrate the reference solution before the clock is reset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum SpinUpPolicy {
    /// Stop once two consecutive window averages of the enstrophy differ by
    /// less than 1%, giving up after `max_windows`.
    Windowed { max_windows: usize },
    /// Integrate for a fixed duration.
    Fixed { duration: f64 },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinUpReport {
    pub settled: bool,
    pub duration: f64,
    pub window: f64,
    pub window_averages: Vec<f64>,
}

/// Relative change between consecutive windows accepted as settled.
pub const SPINUP_TOLERANCE: f64 = 0.01;

/// Runs the spin-up phase, then resets the integrator clock to zero.
pub fn spin_up(
    integrator: &mut Integrator,
    forcing: &[&ForcingSpec],
    policy: SpinUpPolicy,
) -> Result<SpinUpReport> {
    let window = integrator.params().dissipation_window();
    let start = integrator.time();
    let report = match policy {
        SpinUpPolicy::None => SpinUpReport {
            settled: true,
            duration: 0.0,
            window,
            window_averages: Vec::new(),
        },
        SpinUpPolicy::Fixed { duration } => {
            if !(duration >= 0.0 && duration.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "spinup_duration",
                    detail: format!("{duration} must be nonnegative"),
                });
            }
            let steps = (duration / integrator.dt()).round() as u64;
            for _ in 0..steps {
                integrator.step(forcing)?;
            }
            SpinUpReport {
                settled: true,
                duration: integrator.time() - start,
                window,
                window_averages: Vec::new(),
            }
        }
        SpinUpPolicy::Windowed { max_windows } => {
            let steps = ((window / integrator.dt()).round() as u64).max(1);
            let mut averages: Vec<f64> = Vec::new();
            let mut settled = false;
            for _ in 0..max_windows {
                let mut prev = integrator.state().enstrophy();
                let mut acc = 0.0;
                for _ in 0..steps {
                    integrator.step(forcing)?;
                    let next = integrator.state().enstrophy();
                    acc += 0.5 * (prev + next);
                    prev = next;
                }
                let avg = acc / steps as f64;
                if let Some(&last) = averages.last() {
                    let scale = last.abs().max(avg.abs());
                    if scale == 0.0 || (avg - last).abs() < SPINUP_TOLERANCE * scale {
                        settled = true;
                    }
                }
                averages.push(avg);
                if settled {
                    break;
                }
            }
            SpinUpReport {
                settled,
                duration: integrator.time() - start,
                window,
                window_averages: averages,
            }
        }
    };
    integrator.reset_clock(0.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhd::{derive_elsasser_params, ElsasserState};
    use crate::spectral::{random_divfree_field, Grid, SpectralVectorField};

    #[test]
    fn windowed_spin_up_settles_and_resets_clock() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(2.0, 2.0).unwrap();
        let forcing = ForcingSpec::steady_low_mode(&g, &p, 5.0, true, None).unwrap();
        let v = random_divfree_field(&g, 3, 1.0, 4).unwrap();
        let s = ElsasserState::new(v, SpectralVectorField::zeros(&g), 0.0).unwrap();
        let mut it = Integrator::new(p, s, 5e-3).unwrap();
        let report = spin_up(&mut it, &[&forcing], SpinUpPolicy::Windowed { max_windows: 40 }).unwrap();
        assert!(report.settled);
        assert!(report.duration > report.window);
        assert_eq!(it.time(), 0.0);
    }

    #[test]
    fn fixed_and_none() {
        let g = Grid::new(16).unwrap();
        let p = derive_elsasser_params(2.0, 2.0).unwrap();
        let zero = ForcingSpec::zero(&g);
        let mut it = Integrator::new(p, ElsasserState::zeros(&g, 0.0), 0.01).unwrap();
        let r = spin_up(&mut it, &[&zero], SpinUpPolicy::Fixed { duration: 0.5 }).unwrap();
        assert!((r.duration - 0.5).abs() < 1e-12);
        assert_eq!(it.steps(), 50);
        let r = spin_up(&mut it, &[&zero], SpinUpPolicy::None).unwrap();
        assert_eq!(r.duration, 0.0);
    }

}
