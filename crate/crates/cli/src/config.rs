//! Layered TOML configuration: the built-in defaults overlaid with a user file.

use std::path::{Path, PathBuf};

use astsm_core::controllers::ControllerError;
use astsm_core::plant::PlantError;
use astsm_core::{ScenarioConfigD, SimError};
use thiserror::Error;
use toml::{Table, Value};

/// Built-in defaults; every other config is an overlay on this file.
pub const DEFAULTS: &str = include_str!("../defaults/builtin.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: malformed TOML: {message}")]
    Syntax { origin: String, message: String },
    #[error("{origin}: `{key}`: {message}")]
    Schema { origin: String, key: String, message: String },
    #[error("{origin}: `{key}`: {reason}")]
    Constraint { origin: String, key: String, reason: String },
}

impl ConfigError {
    /// Dotted key path of the offending entry, when known.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Schema { key, .. } | ConfigError::Constraint { key, .. } => Some(key),
            _ => None,
        }
    }
}

fn parse_table(text: &str, origin: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>().map_err(|e| ConfigError::Syntax { origin: origin.to_owned(), message: e.message().to_owned() })
}

/// Recursively overlays `top` onto `base`. Tables merge; every other value replaces.
pub fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn defaults_table() -> Table {
    parse_table(DEFAULTS, "built-in defaults").expect("built-in defaults are valid TOML")
}

/// Parses a config overlay given as text. `origin` labels error messages.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ScenarioConfigD, ConfigError> {
    let mut table = defaults_table();
    merge(&mut table, parse_table(text, origin)?);
    from_table(table, origin)
}

fn from_table(table: Table, origin: &str) -> Result<ScenarioConfigD, ConfigError> {
    let config: ScenarioConfigD = serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let key = e.path().to_string();
        let message = e.into_inner().message().trim().to_owned();
        ConfigError::Schema { origin: origin.to_owned(), key, message }
    })?;
    config.validate().map_err(|e| {
        let (key, reason) = match e {
            SimError::InvalidConfig { key, reason } => (key, reason),
            SimError::Plant(PlantError::InvalidParameter { key, reason }) => (format!("plant.{key}"), reason.to_owned()),
            SimError::Controller(ControllerError::InvalidParameter { key, reason }) => {
                (format!("controller.{key}"), reason.to_owned())
            }
            SimError::Plant(other @ PlantError::NotPositiveDefinite { .. }) => ("plant.inertia".to_owned(), other.to_string()),
            other => ("config".to_owned(), other.to_string()),
        };
        ConfigError::Constraint { origin: origin.to_owned(), key, reason }
    })?;
    Ok(config)
}

/// Reads and resolves a config file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfigD, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_config_str(&text, &path.display().to_string())
}

/// The defaults on their own.
pub fn default_config() -> ScenarioConfigD {
    parse_config_str("", "built-in defaults").expect("built-in defaults are valid")
}

/// Fully expanded TOML of a resolved config.
pub fn to_toml(config: &ScenarioConfigD) -> String {
    toml::to_string_pretty(config).expect("configs serialize to TOML")
}

/// The three built-in scenarios, each an overlay through [`parse_config_str`].
pub const BUILTIN_SCENARIOS: [(&str, &str); 3] = [
    ("nominal", ""),
    ("disturbance", "[scenario]\nname = \"disturbance\"\n[scenario.disturbance]\nenabled = true\n"),
    ("parametric", "[scenario]\nname = \"parametric\"\nuse_inertia_delta = true\n"),
];
