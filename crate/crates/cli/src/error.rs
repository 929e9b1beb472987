use thiserror::Error;

/// CLI failures, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or inconsistent settings; exit code 2.
    #[error("invalid setting `{field}`: {message}")]
    Config { field: String, message: String },
    /// Anything that fails after the settings were accepted; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: field.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<qwalk_core::Error> for CliError {
    fn from(e: qwalk_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}
