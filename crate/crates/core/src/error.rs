use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("spectral density requires a positive frequency, got {0}")]
    NonPositiveFrequency(f64),

    #[error("operation requires the crossing condition (omega_A = omega_C, g_AB = g_BC)")]
    CrossingConditionNotMet,

    #[error("crossing dissipator is inactive outside common-reservoir mode")]
    CommonModeInactive,

    #[error("degenerate null space: {0}")]
    DegenerateNullSpace(String),

    #[error("null space dimension {0} exceeds the expected 2")]
    NullSpaceTooLarge(usize),

    #[error("integration unstable: trace deviated by {0:.3e}")]
    StepInstability(f64),

    #[error("degenerate denominator in crossover fraction")]
    DegenerateDenominator,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
