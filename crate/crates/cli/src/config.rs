use std::path::Path;

use repac_core::baseline::BaselineConfig;
use repac_core::bench::BenchGrid;
use repac_core::repac::RepacConfig;
use repac_core::synth::PacParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Contents of a `--config` file. Every table is optional.
///
/// ```toml
/// [synth]
/// f_l = 6.0
/// snr_db = -10.0
///
/// [repac]
/// activity_epsilon = 0.3
///
/// [bench]
/// snr_values = [-10.0]
/// trials_per_cell = 50
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub synth: PacParams,
    pub repac: RepacConfig,
    pub baseline: BaselineConfig,
    pub bench: BenchGrid,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|msg| CliError::validation(format!("{}: {msg}", path.display())))
    }

    /// Parse TOML; errors carry the line and field from the parser.
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}
