//! Scenario runner for `qrf-core`.
//!
//! * [`config`]: INI-style scenario files, with defaults and round-trip
//!   serialization.
//! * [`units`] and [`model`]: conversion of a scenario to model units.
//! * [`run`]: the experiments and their CSV, SVG and manifest outputs.
//! * [`plot`]: the SVG line-plot emitter.
//! * [`fig2`]: the built-in decoherence-factor figure.
//! * [`acceptance`]: the checks behind `qrf check`.

pub mod acceptance;
pub mod config;
mod error;
pub mod fig2;
pub mod manifest;
pub mod model;
pub mod plot;
pub mod run;
pub mod units;

pub use error::CliError;
