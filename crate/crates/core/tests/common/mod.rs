#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lingprobe::dataset::{linear_schedule, synthesize, SyntheticConfig};
use lingprobe::{write_archive, ExperimentConfig, LanguageTag};

pub const MODEL: &str = "synthetic-model";
pub const DATASET: &str = "synthetic-cities";

/// Writes one synthetic archive per table language into `dir`: high-resource
/// languages share a direction and grow separation with depth, low-resource
/// ones get their own direction and a flat schedule.
pub fn write_language_archives(
    dir: &Path,
    num_layers: usize,
    hidden_dim: usize,
    num_samples: usize,
) -> BTreeMap<String, PathBuf> {
    let mut paths = BTreeMap::new();
    for (i, tag) in LanguageTag::all_known().into_iter().enumerate() {
        let high = tag.is_high_resource();
        let schedule = if high {
            linear_schedule(num_layers, 0.0, 4.0)
        } else {
            linear_schedule(num_layers, 0.3, 0.8)
        };
        let mut cfg = SyntheticConfig::new(hidden_dim, num_samples, schedule);
        cfg.direction_seed = if high { 1 } else { 100 + i as u64 };
        cfg.noise_seed = 1000 + i as u64;
        cfg.language = tag.clone();
        cfg.model_name = MODEL.into();
        cfg.dataset_name = DATASET.into();
        let archive = synthesize(&cfg).unwrap();
        let path = dir.join(format!("{}.hsaf", tag.code()));
        let file = std::fs::File::create(&path).unwrap();
        write_archive(
            archive.meta(),
            archive.tensors(),
            archive.labels(),
            std::io::BufWriter::new(file),
        )
        .unwrap();
        paths.insert(tag.code().to_string(), path);
    }
    paths
}

pub fn experiment(paths: BTreeMap<String, PathBuf>, out: &Path) -> ExperimentConfig {
    ExperimentConfig::new(paths, MODEL, DATASET, out)
}

/// Every file under `dir` with its bytes, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
