//! Command-line front end for the actuator transmissibility analysis:
//! config parsing, CSV/SVG emission and the verification battery.

pub mod commands;
pub mod config;
pub mod svg;
pub mod table;

pub use commands::CliError;
pub use config::Config;
