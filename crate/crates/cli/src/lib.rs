//! Command-line front end for `astsm-core`: layered TOML configs, CSV logs,
//! SVG figures, metric reports and run manifests.

pub mod app;
pub mod config;
pub mod csv;
pub mod manifest;
pub mod report;
pub mod svg;

pub use config::{parse_config, parse_config_str, ConfigError};
