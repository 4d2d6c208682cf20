//! Reproducible experiment runs: configuration, per-trial seeding, and
//! CSV/JSON emission. Trial `t` always uses stream `t` of the master seed,
//! so output does not depend on thread scheduling.

mod config;
mod output;
mod runners;

pub use config::{Experiment, ExperimentConfig};
pub use output::{read_config, write_run, ExperimentOutput};
pub use runners::{
    cmd_contiguity, cmd_entropy_value, cmd_expected_count, cmd_growth_curve, cmd_near_cancellation, cmd_proper_fraction,
    cmd_property_m, cmd_shattering, run, shattering_delta, thresholds,
};
