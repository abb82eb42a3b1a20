use serde::{Deserialize, Serialize};

use super::ArchiveMeta;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRegistryEntry {
    pub model_name: String,
    pub layer_count: usize,
    pub hidden_dim: usize,
}

impl ModelRegistryEntry {
    fn new(model_name: &str, layer_count: usize, hidden_dim: usize) -> Self {
        Self {
            model_name: model_name.to_string(),
            layer_count,
            hidden_dim,
        }
    }
}

/// Layer counts and representation widths of the five studied models.
pub fn known_models() -> Vec<ModelRegistryEntry> {
    vec![
        ModelRegistryEntry::new("Qwen-0.5B", 24, 1024),
        ModelRegistryEntry::new("Qwen-1.8B", 24, 2048),
        ModelRegistryEntry::new("Qwen-7B", 32, 4096),
        ModelRegistryEntry::new("Gemma-2B", 18, 2048),
        ModelRegistryEntry::new("Gemma-7B", 28, 3072),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub field: &'static str,
    pub expected: String,
    pub found: String,
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} expected {}, found {}",
            self.field, self.expected, self.found
        )
    }
}

/// Checks archive shape against a known model. Unknown models pass.
///
/// `num_layers` matches either the bare layer count or the layer count plus
/// the embedding slot.
pub fn validate_against_registry(
    meta: &ArchiveMeta,
    registry: &[ModelRegistryEntry],
) -> Vec<Finding> {
    let Some(entry) = registry.iter().find(|e| e.model_name == meta.model_name) else {
        return Vec::new();
    };
    let mut findings = Vec::new();
    if meta.num_layers != entry.layer_count && meta.num_layers != entry.layer_count + 1 {
        findings.push(Finding {
            field: "num_layers",
            expected: format!(
                "{} or {} (with embedding slot)",
                entry.layer_count,
                entry.layer_count + 1
            ),
            found: meta.num_layers.to_string(),
        });
    }
    if meta.hidden_dim != entry.hidden_dim {
        findings.push(Finding {
            field: "hidden_dim",
            expected: entry.hidden_dim.to_string(),
            found: meta.hidden_dim.to_string(),
        });
    }
    findings
}
