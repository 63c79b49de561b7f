//! Named study configurations shipped with the tool.

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const PRESETS: [(&str, &str); 4] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig2-desk", include_str!("../presets/fig2-desk.json")),
    ("fig4", include_str!("../presets/fig4.json")),
    ("fig4-desk", include_str!("../presets/fig4-desk.json")),
];

pub fn preset(name: &str) -> Result<ExperimentConfig, CliError> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Validation(format!("unknown preset `{name}` (available: {})", names.join(", ")))
        })?;
    ExperimentConfig::from_json(text)
}
