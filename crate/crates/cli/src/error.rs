use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    /// A numerical module rejected its input or broke an invariant.
    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        source: qrf_core::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical {
                source: qrf_core::Error::Config(_),
                ..
            } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Tag core errors with the module that raised them.
pub(crate) fn in_module(module: &'static str) -> impl Fn(qrf_core::Error) -> CliError {
    move |source| CliError::Numerical { module, source }
}
