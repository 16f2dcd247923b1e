//! Scenario files, sweeps, CSV output and plots.

pub mod output;
pub mod scenario_file;
pub mod svg;
pub mod sweep;

pub use output::{read_csv, read_sidecar, write_csv, Sidecar, SeriesKind};
pub use scenario_file::{parse_scenario, write_scenario, ScenarioFile};
