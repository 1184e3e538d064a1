use orientdecoh::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config schema error: {0}")]
    Schema(String),
    #[error("invalid input `{field}`: {reason}")]
    Precondition { field: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("selftest failed")]
    SelftestFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Precondition { .. } => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) | CliError::SelftestFailed => 1,
        }
    }

    pub fn missing(field: &str) -> Self {
        CliError::Schema(format!("missing required field `{field}`"))
    }

    pub fn precondition(field: &str, reason: impl Into<String>) -> Self {
        CliError::Precondition {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

/// Attaches the config section to errors raised by the library.
pub fn within(section: &'static str) -> impl Fn(CoreError) -> CliError {
    move |e| match e {
        CoreError::Domain { field, reason } => CliError::Precondition {
            field: format!("{section}.{field}"),
            reason,
        },
        CoreError::UnsupportedExponent { .. } => CliError::Precondition {
            field: format!("{section}.exponent"),
            reason: e.to_string(),
        },
        CoreError::Stability { .. } => CliError::Precondition {
            field: format!("{section}.dt_s"),
            reason: e.to_string(),
        },
        CoreError::NonFinite { .. } | CoreError::Truncation { .. } | CoreError::PoleProximity { .. } => {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
