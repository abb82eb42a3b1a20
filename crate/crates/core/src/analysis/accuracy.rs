use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ProbeSet;
use crate::archive::Archive;
use crate::error::{Error, Result};
use crate::language::{sort_languages, LanguageTag, ResourceClass, KNOWN_LANGUAGES};
use crate::probe::{accuracy, predict};
use crate::scalar::Scalar;

/// Probe test accuracy indexed by (language, layer slot).
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracySurface {
    pub model_name: String,
    pub dataset_name: String,
    languages: BTreeMap<String, LanguageTag>,
    values: BTreeMap<(String, usize), f64>,
}

#[derive(Serialize, Deserialize)]
struct SurfaceJson {
    model_name: String,
    dataset_name: String,
    layers: Vec<usize>,
    rows: Vec<SurfaceRow>,
}

#[derive(Serialize, Deserialize)]
struct SurfaceRow {
    language: LanguageTag,
    accuracy: Vec<Option<f64>>,
}

impl AccuracySurface {
    pub fn new(model_name: impl Into<String>, dataset_name: impl Into<String>) -> Self {
        Self {
            model_name: model_name.into(),
            dataset_name: dataset_name.into(),
            languages: BTreeMap::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, language: LanguageTag, layer: usize, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::data(format!(
                "accuracy {value} for {language} layer {layer} outside [0, 1]"
            )));
        }
        self.values
            .insert((language.code().to_string(), layer), value);
        self.languages.insert(language.code().to_string(), language);
        Ok(())
    }

    pub fn get(&self, code: &str, layer: usize) -> Option<f64> {
        self.values.get(&(code.to_string(), layer)).copied()
    }

    pub fn languages(&self) -> Vec<LanguageTag> {
        let mut tags: Vec<_> = self.languages.values().cloned().collect();
        sort_languages(&mut tags);
        tags
    }

    pub fn language(&self, code: &str) -> Option<&LanguageTag> {
        self.languages.get(code)
    }

    pub fn layers(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.values.keys().map(|&(_, l)| l).collect();
        set.into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// (layer, accuracy) pairs for one language, ascending by layer.
    pub fn curve(&self, code: &str) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .filter(|((c, _), _)| c == code)
            .map(|(&(_, l), &v)| (l, v))
            .collect()
    }

    /// Languages as rows, layer slots as columns; missing cells are empty.
    pub fn to_csv(&self) -> String {
        let layers = self.layers();
        let mut out = String::from("language");
        for l in &layers {
            out.push_str(&format!(",{l}"));
        }
        out.push('\n');
        for tag in self.languages() {
            out.push_str(tag.code());
            for &l in &layers {
                out.push(',');
                if let Some(v) = self.get(tag.code(), l) {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let layers = self.layers();
        let rows = self
            .languages()
            .into_iter()
            .map(|tag| SurfaceRow {
                accuracy: layers.iter().map(|&l| self.get(tag.code(), l)).collect(),
                language: tag,
            })
            .collect();
        let json = SurfaceJson {
            model_name: self.model_name.clone(),
            dataset_name: self.dataset_name.clone(),
            layers,
            rows,
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: SurfaceJson = serde_json::from_str(text)?;
        let mut surface = Self::new(json.model_name, json.dataset_name);
        for row in json.rows {
            if row.accuracy.len() != json.layers.len() {
                return Err(Error::dim("accuracy row length differs from layer list"));
            }
            for (&l, v) in json.layers.iter().zip(row.accuracy) {
                if let Some(v) = v {
                    surface.insert(row.language.clone(), l, v)?;
                }
            }
        }
        Ok(surface)
    }
}

/// Evaluates every probe on the matching layer of its language's test archive.
pub fn layerwise_accuracy<T: Scalar>(
    probes: &ProbeSet<T>,
    test_archives: &BTreeMap<String, Archive>,
) -> Result<AccuracySurface> {
    let first = test_archives
        .values()
        .next()
        .ok_or_else(|| Error::Lookup("no test archives supplied".into()))?;
    let mut surface = AccuracySurface::new(&first.meta().model_name, &first.meta().dataset_name);
    for (tag, layer, probe) in probes.iter() {
        let archive = test_archives
            .get(tag.code())
            .ok_or_else(|| Error::Lookup(format!("no test archive for {tag}")))?;
        if archive.meta().hidden_dim != probe.dim() {
            return Err(Error::dim(format!(
                "probe for {tag} has width {}, archive has {}",
                probe.dim(),
                archive.meta().hidden_dim
            )));
        }
        let features: Vec<T> = archive
            .layer(layer)?
            .iter()
            .map(|&v| T::from_stored(v))
            .collect();
        let pred = predict(probe, &features)?;
        surface.insert(
            tag.clone(),
            layer,
            accuracy(&pred.labels, archive.labels())?,
        )?;
    }
    Ok(surface)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub high_mean: f64,
    pub low_mean: f64,
    pub gap: f64,
    pub layer: usize,
    pub per_language: Vec<(LanguageTag, f64)>,
}

/// High- minus low-resource mean accuracy at `layer`, over all sixteen
/// table languages (each must be present).
pub fn resource_gap(surface: &AccuracySurface, layer: usize) -> Result<GapSummary> {
    let codes: Vec<&str> = KNOWN_LANGUAGES.iter().map(|(c, _, _)| *c).collect();
    resource_gap_subset(surface, layer, &codes)
}

/// As [`resource_gap`] but over an explicit language subset.
pub fn resource_gap_subset(
    surface: &AccuracySurface,
    layer: usize,
    codes: &[&str],
) -> Result<GapSummary> {
    let mut tags = codes
        .iter()
        .map(|&code| {
            surface
                .language(code)
                .cloned()
                .ok_or_else(|| Error::Lookup(format!("language {code} absent from surface")))
        })
        .collect::<Result<Vec<_>>>()?;
    sort_languages(&mut tags);
    let mut per_language = Vec::with_capacity(tags.len());
    let (mut high, mut low) = (Vec::new(), Vec::new());
    for tag in tags {
        let v = surface
            .get(tag.code(), layer)
            .ok_or_else(|| Error::Lookup(format!("no accuracy for {tag} at layer {layer}")))?;
        match tag.resource_class() {
            ResourceClass::High => high.push(v),
            ResourceClass::Low => low.push(v),
        }
        per_language.push((tag, v));
    }
    if high.is_empty() || low.is_empty() {
        return Err(Error::DegenerateGrouping(format!(
            "{} high-resource and {} low-resource languages",
            high.len(),
            low.len()
        )));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let (high_mean, low_mean) = (mean(&high), mean(&low));
    Ok(GapSummary {
        high_mean,
        low_mean,
        gap: high_mean - low_mean,
        layer,
        per_language,
    })
}

/// Layer with the highest accuracy; ties go to the shallowest layer.
pub fn peak_layer(surface: &AccuracySurface, language: &LanguageTag) -> Result<(usize, f64)> {
    surface
        .curve(language.code())
        .into_iter()
        .fold(None, |best: Option<(usize, f64)>, (l, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((l, v)),
        })
        .ok_or_else(|| Error::Lookup(format!("language {language} absent from surface")))
}
