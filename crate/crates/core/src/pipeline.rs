//! End-to-end experiment: split, train one probe per (language, layer),
//! evaluate, analyze and write tables and figures.
//!
//! Probe training fans out to a worker pool. Results are collected in
//! (language order, layer index) order, so the pool size never changes a
//! single output byte.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{
    layerwise_accuracy, peak_layer, resource_gap_subset, similarity_matrix,
    similarity_to_reference, AccuracySurface, GapSummary, Metric, ProbeSet, SimilarityCurves,
    SimilarityMatrix,
};
use crate::archive::{read_archive, Archive};
use crate::dataset::{split, split_stratified, Split, SplitManifest, SplitSpec};
use crate::error::{Error, Result};
use crate::language::{sort_languages, LanguageTag};
use crate::probe::{train_probe, Probe, ProbeConfig, ProbeRecord};
use crate::report::{render_curves, render_heatmap, CurveChart};

pub const TOOLKIT_NAME: &str = "lingprobe";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which layer slots get a similarity heatmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeatmapLayers {
    #[default]
    Deepest,
    Index(usize),
    All,
}

impl fmt::Display for HeatmapLayers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeatmapLayers::Deepest => f.write_str("deepest"),
            HeatmapLayers::All => f.write_str("all"),
            HeatmapLayers::Index(l) => write!(f, "{l}"),
        }
    }
}

impl std::str::FromStr for HeatmapLayers {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "deepest" => Ok(HeatmapLayers::Deepest),
            "all" => Ok(HeatmapLayers::All),
            other => other.parse().map(HeatmapLayers::Index).map_err(|_| {
                Error::Config(format!(
                    "layer must be an integer, `all` or `deepest`, got {other:?}"
                ))
            }),
        }
    }
}

// Stored as a bare integer or one of the keywords.
impl Serialize for HeatmapLayers {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HeatmapLayers::Index(l) => s.serialize_u64(*l as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for HeatmapLayers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Index(l) => Ok(HeatmapLayers::Index(l)),
            Raw::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn default_heatmap_metric() -> Metric {
    Metric::Pearson
}

fn default_curve_metric() -> Metric {
    Metric::Cosine
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Language code to HSAF file.
    pub archive_paths: BTreeMap<String, PathBuf>,
    pub dataset_name: String,
    pub model_name: String,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default, skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub heatmap_layers: HeatmapLayers,
    #[serde(default = "default_heatmap_metric")]
    pub heatmap_metric: Metric,
    #[serde(default = "default_curve_metric")]
    pub curve_metric: Metric,
    /// Reference for the similarity curves; English when present, otherwise
    /// the first language in table order.
    #[serde(default)]
    pub reference_language: Option<String>,
    /// Worker threads for probe training, 0 = one per core. Does not affect
    /// results, so it is not recorded in the manifest.
    #[serde(default, skip_serializing)]
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(
        archive_paths: BTreeMap<String, PathBuf>,
        model_name: impl Into<String>,
        dataset_name: impl Into<String>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            archive_paths,
            dataset_name: dataset_name.into(),
            model_name: model_name.into(),
            probe: ProbeConfig::default(),
            split: SplitSpec::default(),
            output_dir: output_dir.into(),
            heatmap_layers: HeatmapLayers::Deepest,
            heatmap_metric: default_heatmap_metric(),
            curve_metric: default_curve_metric(),
            reference_language: None,
            workers: 0,
        }
    }

    /// Parses either a bare config or a manifest written by a previous run.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let inner = match value.get("config") {
            Some(c) if value.get("toolkit").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.archive_paths.is_empty() {
            return Err(Error::Config("no archives configured".into()));
        }
        self.probe.validate()?;
        self.split.validate()?;
        if let Some(code) = &self.reference_language {
            if !self.archive_paths.contains_key(code) {
                return Err(Error::Config(format!(
                    "reference language {code} has no archive"
                )));
            }
        }
        Ok(())
    }
}

/// Everything a run writes into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub split: SplitManifest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakLayer {
    pub language: LanguageTag,
    pub layer: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub deepest_layer: usize,
    /// Absent when the languages do not cover both resource classes.
    pub gap: Option<GapSummary>,
    pub peak_layers: Vec<PeakLayer>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub manifest: RunManifest,
    pub accuracy: AccuracySurface,
    pub probes: ProbeSet<f64>,
    pub heatmaps: Vec<SimilarityMatrix>,
    /// Absent with a single language.
    pub curves: Option<SimilarityCurves>,
    pub summary: RunSummary,
}

fn config_err(code: &str, what: impl fmt::Display) -> Error {
    Error::Config(format!("archive for {code}: {what}"))
}

/// Reads every configured archive and checks they describe one experiment:
/// matching language, model, dataset, shape and sample ids.
pub fn load_archives(config: &ExperimentConfig) -> Result<BTreeMap<String, Archive>> {
    config.validate()?;
    let mut archives = BTreeMap::new();
    for (code, path) in &config.archive_paths {
        let file = fs::File::open(path)
            .map_err(|e| config_err(code, format_args!("{}: {e}", path.display())))?;
        let archive = read_archive(std::io::BufReader::new(file))
            .map_err(|e| config_err(code, format_args!("{}: {e}", path.display())))?;
        archives.insert(code.clone(), archive);
    }
    check_consistency(config, &archives)?;
    Ok(archives)
}

fn check_consistency(
    config: &ExperimentConfig,
    archives: &BTreeMap<String, Archive>,
) -> Result<()> {
    let (first_code, first) = archives
        .iter()
        .next()
        .ok_or_else(|| Error::Config("no archives configured".into()))?;
    let mut reference_ids = first.meta().sample_ids.clone();
    reference_ids.sort();
    for (code, archive) in archives {
        let meta = archive.meta();
        if meta.language.code() != code {
            return Err(config_err(
                code,
                format_args!("file holds language {}", meta.language.code()),
            ));
        }
        if meta.model_name != config.model_name {
            return Err(config_err(
                code,
                format_args!(
                    "model {:?}, expected {:?}",
                    meta.model_name, config.model_name
                ),
            ));
        }
        if meta.dataset_name != config.dataset_name {
            return Err(config_err(
                code,
                format_args!(
                    "dataset {:?}, expected {:?}",
                    meta.dataset_name, config.dataset_name
                ),
            ));
        }
        if (meta.num_layers, meta.hidden_dim) != (first.meta().num_layers, first.meta().hidden_dim)
        {
            return Err(config_err(
                code,
                format_args!(
                    "shape {} layers x {} dims differs from {first_code} ({} x {})",
                    meta.num_layers,
                    meta.hidden_dim,
                    first.meta().num_layers,
                    first.meta().hidden_dim
                ),
            ));
        }
        let mut ids = meta.sample_ids.clone();
        ids.sort();
        if ids != reference_ids {
            return Err(config_err(
                code,
                format_args!("sample ids differ from {first_code}"),
            ));
        }
    }
    let num_layers = first.meta().num_layers;
    if let HeatmapLayers::Index(l) = config.heatmap_layers {
        if l >= num_layers {
            return Err(Error::Config(format!(
                "heatmap layer {l} out of range, archives have {num_layers} slots"
            )));
        }
    }
    Ok(())
}

fn shared_split(config: &ExperimentConfig, first: &Archive) -> Result<Split> {
    let ids = &first.meta().sample_ids;
    let result = if config.split.stratified {
        split_stratified(ids, first.labels(), &config.split)
    } else {
        split(ids, &config.split)
    };
    result.map_err(|e| Error::Config(format!("split: {e}")))
}

fn rows_for(archive: &Archive, ids: &[String]) -> Vec<usize> {
    ids.iter()
        .map(|id| archive.sample_index(id).expect("sample ids checked"))
        .collect()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Runs the experiment on archives already in memory. Nothing is written.
pub fn run_on_archives(
    config: &ExperimentConfig,
    archives: &BTreeMap<String, Archive>,
) -> Result<ReportBundle> {
    config.validate()?;
    check_consistency(config, archives)?;
    let first = archives.values().next().expect("checked non-empty");
    let num_layers = first.meta().num_layers;
    let deepest = first.meta().deepest_layer();
    let split = shared_split(config, first)?;

    let mut languages: Vec<LanguageTag> = archives.values().map(|a| a.language().clone()).collect();
    sort_languages(&mut languages);
    let jobs: Vec<(&LanguageTag, usize)> = languages
        .iter()
        .flat_map(|tag| (0..num_layers).map(move |l| (tag, l)))
        .collect();
    let train_rows: BTreeMap<&str, Vec<usize>> = archives
        .iter()
        .map(|(code, a)| (code.as_str(), rows_for(a, &split.train)))
        .collect();

    let trained: Vec<Result<Probe<f64>>> = pool(config.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(tag, layer)| {
                let archive = &archives[tag.code()];
                let data = archive.train_set::<f64>(layer, Some(&train_rows[tag.code()]))?;
                train_probe(&data, &config.probe)
                    .map_err(|e| Error::data(format!("probe for {tag} at layer {layer}: {e}")))
            })
            .collect()
    });
    let mut probes = ProbeSet::new(first.meta().hidden_dim);
    for ((tag, layer), probe) in jobs.iter().zip(trained) {
        probes.insert((*tag).clone(), *layer, probe?)?;
    }

    let test_archives = archives
        .iter()
        .map(|(code, a)| Ok((code.clone(), a.select_samples(&rows_for(a, &split.test))?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mut accuracy = layerwise_accuracy(&probes, &test_archives)?;
    accuracy.model_name = config.model_name.clone();
    accuracy.dataset_name = config.dataset_name.clone();

    let heatmap_layers: Vec<usize> = match config.heatmap_layers {
        HeatmapLayers::Deepest => vec![deepest],
        HeatmapLayers::Index(l) => vec![l],
        HeatmapLayers::All => (0..num_layers).collect(),
    };
    let heatmaps = heatmap_layers
        .iter()
        .map(|&l| similarity_matrix(&probes, l, config.heatmap_metric))
        .collect::<Result<Vec<_>>>()?;

    let curves = if languages.len() > 1 {
        let reference = match &config.reference_language {
            Some(code) => probes.language(code).cloned().ok_or_else(|| {
                Error::Config(format!("reference language {code} has no archive"))
            })?,
            None => probes
                .language("en")
                .cloned()
                .unwrap_or_else(|| languages[0].clone()),
        };
        Some(similarity_to_reference(
            &probes,
            &reference,
            config.curve_metric,
        )?)
    } else {
        None
    };

    let codes: Vec<&str> = languages.iter().map(|t| t.code()).collect();
    let gap = match resource_gap_subset(&accuracy, deepest, &codes) {
        Ok(g) => Some(g),
        Err(Error::DegenerateGrouping(_)) => None,
        Err(e) => return Err(e),
    };
    let peak_layers = languages
        .iter()
        .map(|tag| {
            let (layer, accuracy) = peak_layer(&accuracy, tag)?;
            Ok(PeakLayer {
                language: tag.clone(),
                layer,
                accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ReportBundle {
        manifest: RunManifest {
            toolkit: TOOLKIT_NAME.into(),
            version: TOOLKIT_VERSION.into(),
            config: config.clone(),
            split: SplitManifest::new(&config.split, &split),
        },
        accuracy,
        probes,
        heatmaps,
        curves,
        summary: RunSummary {
            deepest_layer: deepest,
            gap,
            peak_layers,
        },
    })
}

impl ReportBundle {
    /// Writes every table and figure under `dir` and returns the paths in
    /// write order.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let probe_dir = dir.join("probes");
        fs::create_dir_all(&probe_dir)?;
        let mut written = Vec::new();
        let mut put = |path: PathBuf, text: String| -> Result<()> {
            fs::write(&path, text)?;
            written.push(path);
            Ok(())
        };

        put(dir.join("manifest.json"), pretty(&self.manifest)?)?;
        put(dir.join("split.json"), self.manifest.split.to_json()?)?;
        put(dir.join("accuracy.csv"), self.accuracy.to_csv())?;
        put(dir.join("accuracy.json"), self.accuracy.to_json()?)?;
        put(
            dir.join("accuracy_curves.svg"),
            render_curves(&CurveChart::from_surface(&self.accuracy), None)?,
        )?;
        for (tag, layer, probe) in self.probes.iter() {
            let record = ProbeRecord {
                language: tag.clone(),
                layer,
                lambda: self.manifest.config.probe.lambda,
                probe: probe.clone(),
            };
            put(probe_dir.join(record.file_name()), record.to_json()?)?;
        }
        for m in &self.heatmaps {
            let stem = format!("similarity_layer{:03}", m.layer);
            put(dir.join(format!("{stem}.csv")), m.to_csv())?;
            put(dir.join(format!("{stem}.json")), m.to_json()?)?;
            put(
                dir.join(format!("heatmap_layer{:03}.svg", m.layer)),
                render_heatmap(m),
            )?;
        }
        if let Some(c) = &self.curves {
            let stem = format!("similarity_to_{}", c.reference.code());
            put(dir.join(format!("{stem}.csv")), c.to_csv())?;
            put(dir.join(format!("{stem}.json")), c.to_json()?)?;
            put(
                dir.join("similarity_curves.svg"),
                render_curves(&CurveChart::from_similarity(c), Some(&c.reference))?,
            )?;
        }
        put(dir.join("summary.json"), pretty(&self.summary)?)?;
        Ok(written)
    }
}

fn pretty<S: Serialize>(value: &S) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Loads the archives, runs the experiment and writes the report into
/// `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle> {
    let archives = load_archives(config)?;
    let bundle = run_on_archives(config, &archives)?;
    bundle.write(&config.output_dir)?;
    Ok(bundle)
}
