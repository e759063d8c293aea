//! Configuration, CSV/SVG output and subcommands of the `dimer` binary.

pub mod config;
pub mod csv;
pub mod presets;
pub mod run;
pub mod svg;

pub use config::{parse_config, ConfigError, RunConfig, Task};
pub use run::{run, Output, RunError};
