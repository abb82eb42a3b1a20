//! Probe-vector similarity and accuracy aggregation across languages and
//! layers.

mod accuracy;
mod probe_set;
mod similarity;

pub use self::accuracy::{
    layerwise_accuracy, peak_layer, resource_gap, resource_gap_subset, AccuracySurface, GapSummary,
};
pub use self::probe_set::ProbeSet;
pub use self::similarity::{
    cosine_similarity, pearson_correlation, similarity_matrix, similarity_to_reference, Metric,
    SimilarityCurves, SimilarityMatrix,
};
