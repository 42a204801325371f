use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("property failed: {0}")]
    Property(String),
    #[error("{run}: {path}: {source}")]
    Io {
        run: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{run}: simulation fault: {source}")]
    Sim {
        run: String,
        #[source]
        source: synccount_core::SimFault,
    },
}

impl HarnessError {
    /// Process exit code: 1 for property failures, 2 for bad configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Property(_) | HarnessError::Sim { .. } => 1,
            HarnessError::Config(_) | HarnessError::Io { .. } => 2,
        }
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        HarnessError::Config(e.to_string())
    }
}
