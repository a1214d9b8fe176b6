use thiserror::Error;

/// Failures surfaced by the runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    /// One message per invalid record or setting.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn config(message: impl Into<String>) -> Self {
        RunError::Config(vec![message.into()])
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 2,
            RunError::Overflow(_) => 3,
        }
    }
}

/// Classifies a numeric error from the core crate.
pub fn from_core(context: &str, err: fockrel_core::Error) -> RunError {
    match err {
        fockrel_core::Error::TruncationOverflow { .. } => RunError::Overflow(format!("{context}: {err}")),
        other => RunError::config(format!("{context}: {other}")),
    }
}
