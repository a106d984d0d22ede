use serde::Serialize;

use super::windows::{intervals_per_window, sliding_integrals};
use crate::error::{Error, Result};
use crate::mhd::ElsasserParams;

/// Window-average proxies for the liminf/limsup conditions of the
/// generalized Grönwall lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GronwallReport {
    pub window: f64,
    /// Smallest window average of `psi`.
    pub min_average: f64,
    /// Largest window average of `max(-psi, 0)`.
    pub max_negative_average: f64,
    pub liminf_positive: bool,
    pub limsup_finite: bool,
    pub holds: bool,
}

/// `psi = mu - (c_L^4 + gap^4) / (2 gap^3) * (||grad v||^2 + ||grad w||^2)`
pub fn psi_full_observation(mu: f64, params: &ElsasserParams, c_l: f64, enstrophy: &[f64]) -> Vec<f64> {
    let gap = params.gap();
    let k = (c_l.powi(4) + gap.powi(4)) / (2.0 * gap.powi(3));
    enstrophy.iter().map(|z| mu - k * z).collect()
}

pub fn gronwall_condition_check(times: &[f64], psi: &[f64], window: f64) -> Result<GronwallReport> {
    if times.len() != psi.len() {
        return Err(Error::SampleCount {
            expected: times.len(),
            got: psi.len(),
        });
    }
    let duration = times.last().copied().unwrap_or(0.0) - times.first().copied().unwrap_or(0.0);
    if duration < 3.0 * window * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter {
            name: "duration",
            detail: format!("run of length {duration} shorter than 3 windows of {window}"),
        });
    }
    let w = intervals_per_window(times, window, 2)?;
    let span = times[w] - times[0];
    let negative: Vec<f64> = psi.iter().map(|p| (-p).max(0.0)).collect();
    let min_average = sliding_integrals(times, psi, w)
        .into_iter()
        .map(|(_, v)| v / span)
        .fold(f64::INFINITY, f64::min);
    let max_negative_average = sliding_integrals(times, &negative, w)
        .into_iter()
        .map(|(_, v)| v / span)
        .fold(0.0, f64::max);
    let liminf_positive = min_average > 0.0;
    let limsup_finite = max_negative_average.is_finite();
    Ok(GronwallReport {
        window,
        min_average,
        max_negative_average,
        liminf_positive,
        limsup_finite,
        holds: liminf_positive && limsup_finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 * 0.01).collect()
    }

    #[test]
    fn constant_positive_psi() {
        let t = times(400);
        let r = gronwall_condition_check(&t, &vec![2.5; 400], 1.0).unwrap();
        assert!((r.min_average - 2.5).abs() < 1e-12);
        assert_eq!(r.max_negative_average, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn alternating_psi_fails() {
        let t = times(400);
        let psi: Vec<f64> = (0..400).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = gronwall_condition_check(&t, &psi, 1.0).unwrap();
        assert!(r.min_average.abs() < 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn short_run_is_rejected() {
        let t = times(200);
        assert!(gronwall_condition_check(&t, &vec![1.0; 200], 1.0).is_err());
    }
}
