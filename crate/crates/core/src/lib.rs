//! Relational decoherence on discretized momentum grids.
//!
//! The crate follows one pure state of two free particles, described from the
//! quantum reference frame of a third particle C, into the frame of particle A
//! under the generalized Galilean frame change. In frame C the state of B stays
//! pure; in frame A the boost is controlled by C's momentum, B and C become
//! entangled and B decoheres in momentum.
//!
//! Module map:
//!
//! * [`states`]: momentum grids, single and bipartite pure states, density
//!   matrices, partial traces, purity and Schmidt coefficients.
//! * [`frames`]: the velocity parity swap, free evolution, the controlled
//!   Galilean coupling and the full frame-C to frame-A pipeline.
//! * [`decoherence`]: decoherence factor (quadrature and closed form),
//!   timescale, kernel assembly of the reduced state, generalized overlap.
//! * [`catstate`]: the decoherence factor for a two-branch momentum cat state
//!   and its modified timescale.
//! * [`sbs`]: the two-environment extension and spectrum-broadcast-structure
//!   diagnostics.
//!
//! All amplitudes use discrete normalization: `amps[i] = psi(p_i) * sqrt(dp)`,
//! so norms, traces and overlaps are plain sums.

pub mod catstate;
pub mod decoherence;
mod error;
mod fourier;
pub mod frames;
pub mod linalg;
pub mod sbs;
pub mod states;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
