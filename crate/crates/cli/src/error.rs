use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] larmor_core::Error),
    #[error("invalid {param}: {reason}")]
    Usage { param: String, reason: String },
    #[error("config {path}: {reason}")]
    Config { path: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("self-test failed: {0} check(s) did not pass")]
    SelfTest(usize),
}

impl CliError {
    pub fn usage(param: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Usage {
            param: param.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 bad input, 3 evanescent channel, 4 invariant violation, 1 I/O.
    pub fn exit_code(&self) -> u8 {
        use larmor_core::Error as E;
        match self {
            CliError::Core(E::Domain { .. }) => 2,
            CliError::Core(E::EvanescentChannel { .. }) => 3,
            CliError::Core(E::DegenerateSpinor | E::Invariant(_)) => 4,
            CliError::Usage { .. } | CliError::Config { .. } => 2,
            CliError::SelfTest(_) | CliError::Json(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
