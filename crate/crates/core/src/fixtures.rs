//! Reference data shipped with the crate.

use crate::analysis::AccuracySurface;
use crate::archive::known_models;
use crate::error::{Error, Result};
use crate::language::LanguageTag;
use crate::report::LabeledGrid;

/// Published final-layer accuracies on the cities dataset: one row per
/// language, one column per model.
pub const CITIES_FINAL_LAYER_CSV: &str = include_str!("../data/cities_final_layer.csv");

pub fn cities_final_layer_grid() -> LabeledGrid {
    LabeledGrid::parse(CITIES_FINAL_LAYER_CSV).expect("bundled table parses")
}

/// One surface per model column, each holding a single slot: the model's
/// last transformer layer (index = layer count, slot 0 being the embedding).
pub fn cities_final_layer_surfaces() -> Result<Vec<AccuracySurface>> {
    let grid = cities_final_layer_grid();
    let registry = known_models();
    let mut out = Vec::with_capacity(grid.columns.len());
    for (col, model) in grid.columns.iter().enumerate() {
        let entry = registry
            .iter()
            .find(|e| &e.model_name == model)
            .ok_or_else(|| Error::Lookup(format!("model {model} not in registry")))?;
        let mut surface = AccuracySurface::new(model.clone(), "cities");
        for (code, values) in &grid.rows {
            let tag = LanguageTag::known(code)
                .ok_or_else(|| Error::Language(format!("unknown language {code}")))?;
            if let Some(v) = values[col] {
                surface.insert(tag, entry.layer_count, v)?;
            }
        }
        out.push(surface);
    }
    Ok(out)
}
