use alloc::string::String;

/// Failure modes shared by every module.
///
/// The variants map one-to-one onto the command-line exit codes: invalid
/// input is a configuration problem, `Convergence` means a budget ran out,
/// and the remaining variants signal that a requested quantity cannot be
/// trusted at the given resolution.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("convergence budget exhausted: {0}")]
    Convergence(String),
    #[error("memory cap exceeded: {needed} grid points requested, cap is {cap}")]
    MemoryCap { needed: usize, cap: usize },
    #[error("untrusted regime: {0}")]
    Untrusted(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("inadequate sampling: {0}")]
    Sampling(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::InvalidInput(alloc::format!($($arg)*)) };
}
pub(crate) use invalid;
