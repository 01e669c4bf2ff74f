use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// Support reached the outer band of a grid (momentum grid, or the
    /// conjugate position window of a Fourier shift).
    #[error("edge guard violated in {context}: |amp| = {amplitude:.3e} at {location}")]
    EdgeGuard {
        context: String,
        location: f64,
        amplitude: f64,
    },

    /// The decoherence timescale is infinite.
    #[error("no decoherence: {0}")]
    NoDecoherence(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("momentum {0} is not a grid point")]
    OffGrid(f64),

    #[error("pointer bin {0} is empty")]
    EmptyBin(usize),

    #[error("parameter regime not supported: {0}")]
    ParameterRegime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
