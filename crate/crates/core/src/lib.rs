//! Multilingual linear probing over stored LLM hidden states.
//!
//! The crate reads per-layer last-token representations from hidden-state
//! archives, trains one L2-regularized logistic-regression probe per
//! (language, layer), and analyzes the results: layer-wise accuracy, the
//! high/low-resource accuracy gap, and similarity between probe weight
//! vectors across languages.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below name the common instantiations.

pub mod analysis;
pub mod archive;
pub mod dataset;
mod error;
pub mod fixtures;
pub mod language;
pub mod pipeline;
pub mod probe;
pub mod report;
mod scalar;

pub use crate::analysis::{
    cosine_similarity, layerwise_accuracy, peak_layer, pearson_correlation, resource_gap,
    resource_gap_subset, similarity_matrix, similarity_to_reference, AccuracySurface, GapSummary,
    Metric, SimilarityCurves, SimilarityMatrix,
};
pub use crate::archive::{
    known_models, read_archive, validate_against_registry, write_archive, Archive, ArchiveMeta,
    Finding, ModelRegistryEntry,
};
pub use crate::error::{Error, Result};
pub use crate::language::{LanguageTag, ResourceClass};
pub use crate::pipeline::{run_experiment, ExperimentConfig, HeatmapLayers, ReportBundle};
pub use crate::probe::{
    accuracy, objective_and_gradient, predict, sigmoid, train_probe, Evaluation, Prediction,
    ProbeConfig, ProbeRecord,
};
pub use crate::scalar::Scalar;

pub type Probe<T = f64> = crate::probe::Probe<T>;
pub type TrainSet<T = f64> = crate::probe::TrainSet<T>;
pub type ProbeSet<T = f64> = crate::analysis::ProbeSet<T>;

pub type Probe32 = Probe<f32>;
pub type Probe64 = Probe<f64>;
pub type TrainSet32 = TrainSet<f32>;
pub type TrainSet64 = TrainSet<f64>;
pub type ProbeSet32 = ProbeSet<f32>;
pub type ProbeSet64 = ProbeSet<f64>;
