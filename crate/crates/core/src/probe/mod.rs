//! Binary linear probes: L2-regularized logistic regression trained on one
//! layer's representations.

mod objective;
mod optimizer;
mod record;

use serde::{Deserialize, Serialize};

pub use self::objective::{objective_and_gradient, sigmoid, Evaluation};
pub use self::record::ProbeRecord;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Row-major feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSet<T> {
    features: Vec<T>,
    labels: Vec<u8>,
    dim: usize,
}

impl<T: Scalar> TrainSet<T> {
    pub fn new(features: Vec<T>, labels: Vec<u8>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dim("feature width must be positive"));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::dim(format!(
                "{} feature values for {} samples of width {dim}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite feature in sample {}",
                pos / dim
            )));
        }
        if let Some(pos) = labels.iter().position(|&l| l > 1) {
            return Err(Error::data(format!(
                "label {} at sample {pos}",
                labels[pos]
            )));
        }
        Ok(Self {
            features,
            labels,
            dim,
        })
    }

    pub fn from_rows(rows: &[Vec<T>], labels: Vec<u8>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::dim("rows have unequal widths"));
        }
        Self::new(rows.concat(), labels, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[T] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.features.chunks_exact(self.dim)
    }

    pub fn map_features(&self, f: impl Fn(usize, T) -> T) -> Self {
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % self.dim, v))
            .collect();
        Self {
            features,
            labels: self.labels.clone(),
            dim: self.dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub lambda: f64,
    pub fit_intercept: bool,
    /// Largest gradient infinity-norm accepted as converged.
    pub convergence_tol: f64,
    pub max_iterations: usize,
    /// Unused by the optimizer, which is deterministic; kept for provenance.
    pub seed: u64,
    /// Per-feature standardization before fitting. Weights are mapped back
    /// to the raw feature space afterwards.
    pub standardize: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            fit_intercept: true,
            convergence_tol: 1e-6,
            max_iterations: 5000,
            seed: 0,
            standardize: false,
        }
    }
}

impl ProbeConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::Config(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub converged: bool,
    pub final_gradient_norm: T,
    pub iterations_used: usize,
}

impl<T: Scalar> Probe<T> {
    /// The all-zero probe of the given width.
    pub fn zero(dim: usize) -> Self {
        Self {
            weights: vec![T::zero(); dim],
            bias: T::zero(),
            converged: false,
            final_gradient_norm: T::zero(),
            iterations_used: 0,
        }
    }

    pub fn from_weights(weights: Vec<T>, bias: T) -> Self {
        Self {
            weights,
            bias,
            ..Self::zero(0)
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn to_f64(&self) -> Probe<f64> {
        Probe {
            weights: self.weights.iter().map(|w| w.to_f64_lossy()).collect(),
            bias: self.bias.to_f64_lossy(),
            converged: self.converged,
            final_gradient_norm: self.final_gradient_norm.to_f64_lossy(),
            iterations_used: self.iterations_used,
        }
    }
}

/// Fits a probe by minimizing the regularized cross-entropy.
///
/// Training is deterministic: the same inputs always give a bitwise
/// identical probe.
pub fn train_probe<T: Scalar>(data: &TrainSet<T>, config: &ProbeConfig) -> Result<Probe<T>> {
    config.validate()?;
    if data.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 training samples, got {}",
            data.len()
        )));
    }
    let positives = data.labels().iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::DegenerateData(
            "training labels contain a single class".into(),
        ));
    }
    if !config.standardize {
        return optimizer::minimize(data, config);
    }

    let (mean, scale) = column_moments(data);
    let scaled = data.map_features(|j, v| (v - mean[j]) / scale[j]);
    let mut probe = optimizer::minimize(&scaled, config)?;
    let mut shift = T::zero();
    for ((w, &m), &s) in probe.weights.iter_mut().zip(&mean).zip(&scale) {
        *w /= s;
        shift += *w * m;
    }
    probe.bias -= shift;
    Ok(probe)
}

// Column means and standard deviations; constant columns get scale 1.
fn column_moments<T: Scalar>(data: &TrainSet<T>) -> (Vec<T>, Vec<T>) {
    let d = data.dim();
    let n = T::from_usize(data.len()).unwrap();
    let mut mean = vec![T::zero(); d];
    for row in data.rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![T::zero(); d];
    for row in data.rows() {
        for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > T::zero() {
                sd
            } else {
                T::one()
            }
        })
        .collect();
    (mean, scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub probabilities: Vec<T>,
    pub labels: Vec<u8>,
}

/// Class-1 probabilities and hard labels for a row-major feature matrix.
/// A probability of exactly 0.5 is labelled 1.
pub fn predict<T: Scalar>(probe: &Probe<T>, features: &[T]) -> Result<Prediction<T>> {
    let d = probe.dim();
    if d == 0 || !features.len().is_multiple_of(d) {
        return Err(Error::dim(format!(
            "{} feature values do not form rows of width {d}",
            features.len()
        )));
    }
    let half = T::lit(0.5);
    let probabilities: Vec<T> = features
        .chunks_exact(d)
        .map(|row| sigmoid(dot(&probe.weights, row) + probe.bias))
        .collect();
    let labels = probabilities.iter().map(|&p| u8::from(p >= half)).collect();
    Ok(Prediction {
        probabilities,
        labels,
    })
}

/// Fraction of positions where the two label vectors agree.
pub fn accuracy(predicted: &[u8], actual: &[u8]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::dim(format!(
            "{} predictions for {} labels",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::dim("accuracy of an empty label vector"));
    }
    let hits = predicted.iter().zip(actual).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / predicted.len() as f64)
}
