use serde::Serialize;

use crate::diagnostics::{fit_exponential_rate, NORM_FLOOR, RESOLVED_LEVEL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One named scenario check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        }
    }

    pub fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            name,
            status: CheckStatus::Skipped,
            detail: detail.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// Tail-half decay test for a difference series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trend {
    pub peak: f64,
    pub terminal: f64,
    pub tail_rate: Option<f64>,
    pub decaying: bool,
}

/// Terminal value at most `ratio * peak` and a positive fitted rate over the
/// last half of the samples that are still above round-off after the peak.
pub fn decay_trend(times: &[f64], values: &[f64], ratio: f64) -> Trend {
    let peak = values.iter().copied().fold(0.0, f64::max);
    let terminal = values.last().copied().unwrap_or(0.0);
    if peak == 0.0 {
        return Trend {
            peak,
            terminal,
            tail_rate: None,
            decaying: true,
        };
    }
    let peak_at = values.iter().position(|v| *v == peak).unwrap_or(0);
    let resolved = values[peak_at..]
        .iter()
        .position(|v| *v <= RESOLVED_LEVEL * peak || *v <= NORM_FLOOR)
        .map_or(values.len(), |i| peak_at + i + 1);
    let tail_rate = fit_exponential_rate(&times[..resolved], &values[..resolved], 0.5)
        .ok()
        .map(|f| f.rate);
    Trend {
        peak,
        terminal,
        tail_rate,
        decaying: terminal <= ratio * peak && tail_rate.is_some_and(|r| r > 0.0),
    }
}
