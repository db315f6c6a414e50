//! Command-line laboratory for `hypercross-core`: configuration, artifact
//! files, the experiment subcommands and the acceptance suite.

pub mod commands;
pub mod config;
pub mod io;
pub mod verify;

pub use commands::{run, RunOutput};
pub use config::ExperimentConfig;

/// Errors at the process boundary, one per exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("bad config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("{0}")]
    Core(#[from] hypercross_core::Error),
    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

impl LabError {
    /// 2 bad config, 3 convergence budget exhausted, 4 acceptance failure.
    pub fn exit_code(&self) -> i32 {
        use hypercross_core::Error as E;
        match self {
            LabError::Config(_) | LabError::Io(_) => 2,
            LabError::Core(E::InvalidInput(_) | E::MemoryCap { .. } | E::Divergent(_)) => 2,
            LabError::Core(E::Convergence(_) | E::Untrusted(_) | E::Sampling(_)) => 3,
            LabError::Acceptance(_) => 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypercross_core::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(LabError::Config("x".into()).exit_code(), 2);
        assert_eq!(LabError::Core(E::MemoryCap { needed: 2, cap: 1 }).exit_code(), 2);
        assert_eq!(LabError::Core(E::Convergence("x".into())).exit_code(), 3);
        assert_eq!(LabError::Core(E::Sampling("x".into())).exit_code(), 3);
        assert_eq!(LabError::Acceptance("x".into()).exit_code(), 4);
    }
}
