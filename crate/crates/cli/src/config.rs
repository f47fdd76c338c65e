//! Optional TOML config with one section per subcommand. Command-line flags
//! take precedence over values found here.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default, rename = "abstract")]
    pub abstraction: AbstractSection,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default, rename = "export-dot")]
    pub export_dot: ExportDotSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub traces: Option<PathBuf>,
    pub hidden: Option<usize>,
    pub lambda: Option<f64>,
    pub scale: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub network: Option<PathBuf>,
    pub num_traces: Option<usize>,
    pub horizon: Option<usize>,
    pub init_lower: Option<Vec<f64>>,
    pub init_upper: Option<Vec<f64>>,
    pub input_lower: Option<Vec<f64>>,
    pub input_upper: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractSection {
    pub network: Option<PathBuf>,
    pub traces: Option<PathBuf>,
    pub entropy: Option<f64>,
    pub lmin: Option<f64>,
    pub dwell: Option<usize>,
    pub epsilon: Option<f64>,
    pub zone_lower: Option<Vec<f64>>,
    pub zone_upper: Option<Vec<f64>>,
    pub zone_margin: Option<f64>,
    pub input_lower: Option<Vec<f64>>,
    pub input_upper: Option<Vec<f64>>,
    pub half_open: Option<bool>,
    pub out_sink: Option<bool>,
    pub out: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    pub system: Option<PathBuf>,
    pub formulas: Option<PathBuf>,
    pub initial: Option<usize>,
    pub json: Option<bool>,
    pub assert_all_true: Option<bool>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportDotSection {
    pub system: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}
