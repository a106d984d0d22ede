use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {0}: need an even n >= 8")]
    InvalidGrid(usize),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },

    #[error("{name} out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("field is not divergence-free (max normalized divergence {max_divergence:e})")]
    NotDivergenceFree { max_divergence: f64 },

    #[error("CFL violated: dt = {dt:e} exceeds admissible {admissible:e}")]
    Cfl { dt: f64, admissible: f64 },

    #[error("explicit nudging unstable: mu*dt = {mu_dt} > 1, admissible dt = {admissible:e}")]
    NudgingStability { mu_dt: f64, admissible: f64 },

    #[error("numerical instability at step {step} (t = {time}): {detail}")]
    Instability {
        step: u64,
        time: f64,
        detail: String,
    },

    #[error("interpolant type mismatch: operation needs type {expected}, spec declares type {found}")]
    TypeMismatch { expected: u8, found: u8 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("clock mismatch: {left} vs {right}")]
    ClockMismatch { left: f64, right: f64 },

    #[error("missing constant {0}")]
    MissingConstant(&'static str),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("mismatched Grashof numbers: {first} vs {second}")]
    GrashofMismatch { first: f64, second: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed snapshot at line {line}: {detail}")]
    Snapshot { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
