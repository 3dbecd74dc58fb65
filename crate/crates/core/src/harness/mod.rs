//! Scenario runner: executes action scripts against a simulated world,
//! scores the engine's predictions and writes run artifacts.

pub mod metrics;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use metrics::{Summary, CSV_HEADER, SCHEMA_VERSION};
pub use run::{execute, run_file, RunOutput};
pub use scenario::Scenario;
pub use sweep::{parse_grid, sweep, sweep_file, SweepOutput};
