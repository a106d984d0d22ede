use serde::Serialize;

use crate::error::{Error, Result};

/// Values below this are clamped before taking logarithms.
pub const NORM_FLOOR: f64 = 1e-14;

/// Least-squares fit of `ln(norm) = a - rate * t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub r_squared: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

/// Fits an exponential rate over the last `window` fraction of the samples.
pub fn fit_exponential_rate(times: &[f64], values: &[f64], window: f64) -> Result<RateFit> {
    if times.len() != values.len() {
        return Err(Error::DegenerateWindow(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::DegenerateWindow(format!("window fraction {window} not in (0, 1]")));
    }
    let count = ((times.len() as f64) * window).round() as usize;
    if count < 10 {
        return Err(Error::DegenerateWindow(format!(
            "{count} samples in window, need at least 10"
        )));
    }
    let start = times.len() - count;
    let t = &times[start..];
    let y: Vec<f64> = values[start..].iter().map(|v| v.max(NORM_FLOOR).ln()).collect();
    let n = count as f64;
    let t_mean = t.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (ti, yi) in t.iter().zip(&y) {
        stt += (ti - t_mean) * (ti - t_mean);
        sty += (ti - t_mean) * (yi - y_mean);
        syy += (yi - y_mean) * (yi - y_mean);
    }
    if stt <= 0.0 {
        return Err(Error::DegenerateWindow("all window times coincide".into()));
    }
    let slope = sty / stt;
    let r_squared = if syy > 0.0 { (sty * sty) / (stt * syy) } else { 1.0 };
    Ok(RateFit {
        rate: -slope,
        r_squared,
        t_start: t[0],
        t_end: t[count - 1],
        n_points: count,
    })
}

/// Decay assessment of one error norm series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub initial: f64,
    pub terminal: f64,
    /// `log10(initial / terminal)`
    pub orders: f64,
    /// First time the normalized error drops to `ONSET_LEVEL`.
    pub onset_time: Option<f64>,
    pub fit: Option<RateFit>,
    pub success: bool,
}

pub const ONSET_LEVEL: f64 = 0.1;
/// Normalized level below which samples are treated as converged to round-off.
pub const RESOLVED_LEVEL: f64 = 1e-12;
pub const SUCCESS_R_SQUARED: f64 = 0.98;

/// Fits the tail of the resolved part of the series and applies the success
/// rule: positive rate, `R^2 >= 0.98`, terminal `<= reduction * initial`.
///
/// The resolved part ends at the first sample whose normalized value is at
/// most `RESOLVED_LEVEL` (or below `NORM_FLOOR`); later samples only
/// carry round-off.
pub fn assess_convergence(times: &[f64], values: &[f64], tail_fraction: f64, reduction: f64) -> Convergence {
    let initial = values.first().copied().unwrap_or(0.0);
    let terminal = values.last().copied().unwrap_or(0.0);
    let orders = if terminal > 0.0 && initial > 0.0 {
        (initial / terminal).log10()
    } else if initial > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let onset_time = values
        .iter()
        .position(|v| initial > 0.0 && *v <= ONSET_LEVEL * initial)
        .map(|i| times[i]);
    let resolved = values
        .iter()
        .position(|v| *v <= RESOLVED_LEVEL * initial || *v <= NORM_FLOOR)
        .map_or(values.len(), |i| i + 1);
    let fit = fit_exponential_rate(&times[..resolved], &values[..resolved], tail_fraction).ok();
    let success = initial > 0.0
        && terminal <= reduction * initial
        && fit.is_some_and(|f| f.rate > 0.0 && f.r_squared >= SUCCESS_R_SQUARED);
    Convergence {
        initial,
        terminal,
        orders,
        onset_time,
        fit,
        success,
    }
}
