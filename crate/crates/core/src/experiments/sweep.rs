use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::scenario::run_scenario;
use super::ExitCode;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Mu,
    H,
    Grashof,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mu => "mu",
            Self::H => "h",
            Self::Grashof => "grashof",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" => Ok(Self::Mu),
            "h" => Ok(Self::H),
            "grashof" | "G" => Ok(Self::Grashof),
            other => Err(Error::Config(format!("unknown sweep axis {other:?}; expected mu, h or grashof"))),
        }
    }
}

impl SweepAxis {
    fn apply(self, base: &ExperimentConfig, value: f64) -> ExperimentConfig {
        let mut c = base.clone();
        match self {
            Self::Mu => c.mu = value,
            Self::H => c.h = value,
            Self::Grashof => c.grashof = value,
        }
        c
    }
}

/// Parses a comma-separated list of finite numbers.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("sweep value {s:?} is not a finite number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Config("empty sweep value list".into()));
    }
    Ok(values)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub exit_code: i32,
    pub passed: bool,
    pub l2_rate: Option<f64>,
    pub l2_r_squared: Option<f64>,
    pub l2_orders: Option<f64>,
    /// `mu_min` for the mu and Grashof axes, `h_max` at the run's gain for the h axis.
    pub threshold: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        fn opt(x: Option<f64>) -> String {
            x.map(|v| format!("{v:e}")).unwrap_or_default()
        }
        let mut out = String::from("value,exit_code,passed,l2_rate,l2_r_squared,l2_orders,threshold\n");
        for r in &self.rows {
            writeln!(
                out,
                "{:e},{},{},{},{},{},{}",
                r.value,
                r.exit_code,
                r.passed,
                opt(r.l2_rate),
                opt(r.l2_r_squared),
                opt(r.l2_orders),
                opt(r.threshold)
            )
            .expect("writing to a String");
        }
        out
    }

    /// Worst exit code over all rows.
    pub fn exit_code(&self) -> ExitCode {
        self.rows
            .iter()
            .map(|r| ExitCode::from_i32(r.exit_code))
            .max()
            .unwrap_or(ExitCode::Ok)
    }
}

fn run_one(axis: SweepAxis, config: ExperimentConfig, value: f64) -> SweepRow {
    match run_scenario(&config) {
        Ok(out) => {
            let l2 = out.summary.assimilation.as_ref().map(|a| a.l2);
            let threshold = out.thresholds.theorems.first().map(|t| match axis {
                SweepAxis::H => t.h_max_at_actual_mu,
                _ => t.thresholds.mu_min,
            });
            SweepRow {
                value,
                exit_code: if out.passed() { ExitCode::Ok } else { ExitCode::CheckFailed }.code(),
                passed: out.passed(),
                l2_rate: l2.and_then(|c| c.fit.map(|f| f.rate)),
                l2_r_squared: l2.and_then(|c| c.fit.map(|f| f.r_squared)),
                l2_orders: l2.map(|c| c.orders),
                threshold,
                error: None,
            }
        }
        Err(e) => SweepRow {
            value,
            exit_code: ExitCode::from_error(&e).code(),
            passed: false,
            l2_rate: None,
            l2_r_squared: None,
            l2_orders: None,
            threshold: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs one scenario per value in parallel. Each run writes to
/// `<output_dir>/<axis>-<index>` and the table goes to `<output_dir>/sweep.csv`.
pub fn run_sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::Config("empty sweep value list".into()));
    }
    let configs: Vec<ExperimentConfig> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut c = axis.apply(base, v);
            c.output_dir = base
                .output_dir
                .as_ref()
                .map(|d| d.join(format!("{axis}-{i:03}")));
            c.validate().map(|_| c)
        })
        .collect::<Result<_>>()?;
    let rows = configs
        .into_par_iter()
        .zip(values.par_iter())
        .map(|(c, &v)| run_one(axis, c, v))
        .collect();
    let table = SweepTable { axis, rows };
    if let Some(dir) = &base.output_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(PathBuf::from(dir).join("sweep.csv"), table.to_csv())?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_axes_and_values() {
        assert_eq!("mu".parse::<SweepAxis>().unwrap(), SweepAxis::Mu);
        assert!("nu".parse::<SweepAxis>().is_err());
        assert_eq!(parse_values("1, 2.5,1e3").unwrap(), vec![1.0, 2.5, 1000.0]);
        assert!(parse_values("1,,2").is_err());
        assert!(parse_values("inf").is_err());
    }

    #[test]
    fn invalid_value_is_rejected_before_running() {
        let base = ExperimentConfig::default();
        assert!(run_sweep(&base, SweepAxis::Mu, &[-1.0]).is_err());
        assert!(run_sweep(&base, SweepAxis::H, &[0.3]).is_err());
    }
}
