//! Experiment orchestration: families, numerics, reports, configuration,
//! the certification studies and the runner.

pub mod config;
pub mod family;
pub mod numerics;
pub mod report;
pub mod run;
pub mod studies;
pub mod svg;

pub use config::{preset, LabConfig, Mode, Study, PRESETS};
pub use family::GapFamily;
pub use numerics::{gap_probes, Numerics};
pub use report::{fit_slope, rho, Criterion, SlopeFit, Stamp, SweepReport};
pub use run::{run, write_artifacts, RunOutcome};
