use thiserror::Error;

/// Errors raised by loading, model evaluation and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing required field `{0}`")]
    MissingField(String),

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("timestamps must be strictly increasing (row {row}: {prev} then {next})")]
    Ordering { row: usize, prev: f64, next: f64 },

    #[error("series too short: {found} samples, at least {required} required")]
    Size { found: usize, required: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("radiative coefficient is not referenced to ambient when T_c ({t_c} °C) <= T_a ({t_a} °C)")]
    DegenerateReference { t_c: f64, t_a: f64 },

    #[error("derived coefficients violate `{0}`")]
    InternalConsistency(String),

    #[error("degenerate datasheet: {0}")]
    DegenerateDatasheet(String),

    #[error("inconsistent datasheet: {0}")]
    InconsistentDatasheet(String),

    #[error("diode solver failed: {0}")]
    Solver(String),

    #[error("efficiency undefined: {0}")]
    UndefinedEfficiency(String),

    #[error("simulated value is zero at t = {t} s")]
    ZeroSimulated { t: f64 },

    #[error("step {step} (t = {t} s): {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
}
