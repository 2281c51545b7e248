//! Command line, config files and output formats around `etstir-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod sweep;

pub use config::{load_config, parse_config, Mode, RunConfig};
pub use error::{AppError, AppResult};
pub use run::{run_from_config, run_resolved, RunOptions, RunReport};
pub use sweep::{run_sweep, SweepRow, SweepTable};
