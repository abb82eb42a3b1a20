use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::language::{sort_languages, LanguageTag};
use crate::probe::{Probe, ProbeRecord};
use crate::scalar::Scalar;

/// Probes indexed by (language code, layer slot), all of one width.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet<T> {
    hidden_dim: usize,
    languages: BTreeMap<String, LanguageTag>,
    entries: BTreeMap<(String, usize), Probe<T>>,
}

impl<T: Scalar> ProbeSet<T> {
    pub fn new(hidden_dim: usize) -> Self {
        Self {
            hidden_dim,
            languages: BTreeMap::new(),
            entries: BTreeMap::new(),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn insert(&mut self, language: LanguageTag, layer: usize, probe: Probe<T>) -> Result<()> {
        if probe.dim() != self.hidden_dim {
            return Err(Error::dim(format!(
                "probe for {language} layer {layer} has width {}, set width is {}",
                probe.dim(),
                self.hidden_dim
            )));
        }
        if let Some(existing) = self.languages.get(language.code()) {
            if existing != &language {
                return Err(Error::Language(format!(
                    "conflicting tags for language {}",
                    language.code()
                )));
            }
        }
        self.entries
            .insert((language.code().to_string(), layer), probe);
        self.languages.insert(language.code().to_string(), language);
        Ok(())
    }

    pub fn get(&self, code: &str, layer: usize) -> Option<&Probe<T>> {
        self.entries.get(&(code.to_string(), layer))
    }

    pub fn language(&self, code: &str) -> Option<&LanguageTag> {
        self.languages.get(code)
    }

    /// Languages in presentation order.
    pub fn languages(&self) -> Vec<LanguageTag> {
        let mut tags: Vec<_> = self.languages.values().cloned().collect();
        sort_languages(&mut tags);
        tags
    }

    /// Layer slots present for a language, ascending.
    pub fn layers_for(&self, code: &str) -> Vec<usize> {
        self.entries
            .keys()
            .filter(|(c, _)| c == code)
            .map(|&(_, l)| l)
            .collect()
    }

    /// Every layer slot present for any language, ascending.
    pub fn layers(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.entries.keys().map(|&(_, l)| l).collect();
        set.into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LanguageTag, usize, &Probe<T>)> {
        self.entries
            .iter()
            .map(|((code, layer), p)| (&self.languages[code], *layer, p))
    }
}

impl ProbeSet<f64> {
    /// Builds a set from stored probe records.
    pub fn from_records(records: impl IntoIterator<Item = ProbeRecord>) -> Result<Self> {
        let mut set: Option<Self> = None;
        for r in records {
            let s = set.get_or_insert_with(|| Self::new(r.probe.dim()));
            s.insert(r.language, r.layer, r.probe)?;
        }
        set.ok_or_else(|| Error::IncompleteSet("no probe records".into()))
    }
}
