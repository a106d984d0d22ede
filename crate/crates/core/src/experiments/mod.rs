//! Scenario runner, determining-interpolant experiment and parameter sweeps
//! driven by flat TOML configs.

mod checks;
mod config;
mod determining;
mod output;
mod scenario;
mod sweep;

pub use checks::{decay_trend, Check, CheckStatus, Trend};
pub use config::{ExperimentConfig, InitKind, Scenario, SpinUpKind};
pub use determining::{auxiliary_gain, run_determining_experiment, DeterminingSeries};
pub use output::RunFiles;
pub use scenario::{
    applicable_theorems, run_scenario, verify_interpolant_config, InterpolantCheck, threshold_entries, AssimilationSummary, BudgetSummary,
    DeterminingSummary, RunSummary, ScenarioOutcome, ThresholdEntry, ThresholdReport,
    CONVERGENCE_REDUCTION, DT_CAP, DT_CFL_FRACTION, FIT_TAIL_FRACTION, MAX_DT_HALVINGS,
    REGIME_LABEL, TREND_RATIO,
};
pub use sweep::{parse_values, run_sweep, SweepAxis, SweepRow, SweepTable};

use crate::error::Error;

/// Process exit codes of the command-line tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitCode {
    Ok = 0,
    Io = 1,
    InvalidConfig = 2,
    Instability = 3,
    CheckFailed = 4,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_i32(code: i32) -> Self {
        match code {
            0 => Self::Ok,
            2 => Self::InvalidConfig,
            3 => Self::Instability,
            4 => Self::CheckFailed,
            _ => Self::Io,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidParameter { .. }
            | Error::OutOfRange { .. }
            | Error::InvalidGrid(_)
            | Error::TypeMismatch { .. }
            | Error::NudgingStability { .. }
            | Error::GrashofMismatch { .. }
            | Error::MissingConstant(_) => Self::InvalidConfig,
            Error::Instability { .. } | Error::Cfl { .. } => Self::Instability,
            _ => Self::Io,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(ExitCode::from_error(&Error::Config("x".into())).code(), 2);
        assert_eq!(ExitCode::from_error(&Error::Cfl { dt: 1.0, admissible: 0.5 }).code(), 3);
        let io = Error::Io(std::io::Error::other("x"));
        assert_eq!(ExitCode::from_error(&io).code(), 1);
        for c in [0, 1, 2, 3, 4] {
            assert_eq!(ExitCode::from_i32(c).code(), c);
        }
    }
}
