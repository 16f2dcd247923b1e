//! Quantum-well exciton coupled to a driven optomechanical cavity.
//!
//! Three model variants (classical mirror, quantized mirror, modulated pump)
//! are integrated by a mean-field backend, a closed second-moment backend
//! (classical mirror only) and a stochastic ensemble backend.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod integrators;
pub mod io;
pub mod models;
pub mod moments;
pub mod observables;
pub mod params;
pub mod simulate;

pub use error::{Error, Result};
pub use params::{preset, preset_names, Backend, Scenario, Variant};
pub use simulate::{run, run_mean_field, RunOutput};
