use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::rng::SeededRng;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Split each label class separately instead of the pooled list.
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
            stratified: false,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }

    fn train_size(&self, n: usize) -> usize {
        (self.train_fraction * n as f64).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// Provenance record written next to every experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub train_fraction: f64,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl SplitManifest {
    pub fn new(spec: &SplitSpec, split: &Split) -> Self {
        Self {
            seed: spec.seed,
            train_fraction: spec.train_fraction,
            train_ids: split.train.clone(),
            test_ids: split.test.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_items<S: AsRef<str>>(items: &[S]) -> Result<()> {
    if items.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "cannot split {} item(s)",
            items.len()
        )));
    }
    let mut seen = HashSet::with_capacity(items.len());
    for id in items {
        if !seen.insert(id.as_ref()) {
            return Err(Error::data(format!("duplicate id {:?}", id.as_ref())));
        }
    }
    Ok(())
}

/// Seeded uniform permutation; the first `floor(train_fraction * n)` items
/// of the permuted order form the training part. Both parts keep permuted
/// order.
pub fn split<S: AsRef<str>>(items: &[S], spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    check_items(items)?;
    let n = items.len();
    let k = spec.train_size(n);
    if k == 0 || k == n {
        return Err(Error::DegenerateData(format!(
            "fraction {} of {n} items leaves an empty part",
            spec.train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    SeededRng::new(spec.seed).shuffle(&mut order);
    let ids = |idx: &[usize]| idx.iter().map(|&i| items[i].as_ref().to_string()).collect();
    Ok(Split {
        train: ids(&order[..k]),
        test: ids(&order[k..]),
    })
}

/// Splits each label class with the floor rule, drawing both permutations
/// from one seeded stream (class 0 first). Train ids list class 0 then
/// class 1.
pub fn split_stratified<S: AsRef<str>>(
    items: &[S],
    labels: &[u8],
    spec: &SplitSpec,
) -> Result<Split> {
    spec.validate()?;
    check_items(items)?;
    if labels.len() != items.len() {
        return Err(Error::dim(format!(
            "{} labels for {} items",
            labels.len(),
            items.len()
        )));
    }
    let mut rng = SeededRng::new(spec.seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in 0..=1u8 {
        let mut members: Vec<usize> = (0..items.len()).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut members);
        let k = spec.train_size(members.len());
        train.extend(members[..k].iter().map(|&i| items[i].as_ref().to_string()));
        test.extend(members[k..].iter().map(|&i| items[i].as_ref().to_string()));
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::DegenerateData(
            "stratified split leaves an empty part".into(),
        ));
    }
    Ok(Split { train, test })
}
