//! Synthetic archives with a controllable class separation per layer.
//!
//! Each sample is `±Δ(l)/2 · u + ε_l` where `u` is a unit direction fixed by
//! `direction_seed` and `ε_l` is standard Gaussian noise. Noise is carried
//! between adjacent slots like a residual stream:
//! `ε_l = ρ ε_{l-1} + sqrt(1 - ρ²) η_l` with fresh `η_l ~ N(0, I)`, so each
//! slot is marginally `N(0, I)` and the optimal accuracy at slot `l` is
//! `Φ(Δ(l)/2)`.

use serde::{Deserialize, Serialize};

use super::rng::SeededRng;
use crate::archive::{Archive, ArchiveMeta, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::language::{LanguageTag, ResourceClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_layers: usize,
    pub hidden_dim: usize,
    pub num_samples: usize,
    pub separation_schedule: Vec<f64>,
    pub direction_seed: u64,
    pub noise_seed: u64,
    /// Correlation ρ of the noise between adjacent layer slots, in [0, 1].
    #[serde(default = "default_correlation")]
    pub layer_noise_correlation: f64,
    #[serde(default = "default_language")]
    pub language: LanguageTag,
    #[serde(default = "default_model")]
    pub model_name: String,
    #[serde(default = "default_dataset")]
    pub dataset_name: String,
}

fn default_correlation() -> f64 {
    0.9
}

fn default_language() -> LanguageTag {
    LanguageTag::new("synthetic", "Synthetic", ResourceClass::High).unwrap()
}

fn default_model() -> String {
    "synthetic".into()
}

fn default_dataset() -> String {
    "synthetic".into()
}

impl SyntheticConfig {
    pub fn new(hidden_dim: usize, num_samples: usize, separation_schedule: Vec<f64>) -> Self {
        Self {
            num_layers: separation_schedule.len(),
            hidden_dim,
            num_samples,
            separation_schedule,
            direction_seed: 0,
            noise_seed: 0,
            layer_noise_correlation: default_correlation(),
            language: default_language(),
            model_name: default_model(),
            dataset_name: default_dataset(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.separation_schedule.len() != self.num_layers {
            return Err(Error::Config(format!(
                "schedule has {} entries for {} layers",
                self.separation_schedule.len(),
                self.num_layers
            )));
        }
        if let Some(d) = self
            .separation_schedule
            .iter()
            .find(|d| !(d.is_finite() && **d >= 0.0))
        {
            return Err(Error::Config(format!(
                "separation {d} must be finite and >= 0"
            )));
        }
        if !(0.0..=1.0).contains(&self.layer_noise_correlation) {
            return Err(Error::Config(format!(
                "layer_noise_correlation {} outside [0, 1]",
                self.layer_noise_correlation
            )));
        }
        if self.num_layers == 0 || self.hidden_dim == 0 || self.num_samples < 2 {
            return Err(Error::Config(
                "need at least 1 layer, 1 dimension and 2 samples".into(),
            ));
        }
        Ok(())
    }
}

/// `num_layers` values evenly spaced from `from` to `to` inclusive.
pub fn linear_schedule(num_layers: usize, from: f64, to: f64) -> Vec<f64> {
    match num_layers {
        0 => Vec::new(),
        1 => vec![to],
        _ => (0..num_layers)
            .map(|l| from + (to - from) * l as f64 / (num_layers - 1) as f64)
            .collect(),
    }
}

pub fn constant_schedule(num_layers: usize, value: f64) -> Vec<f64> {
    vec![value; num_layers]
}

/// Unit direction drawn from `direction_seed`.
fn direction(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = SeededRng::new(seed);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Generates the archive. Labels are `floor(n/2)` zeros then ones, shuffled
/// with the noise stream before any noise is drawn; noise is then drawn
/// layer by layer, sample by sample, dimension by dimension.
pub fn synthesize(config: &SyntheticConfig) -> Result<Archive> {
    config.validate()?;
    let (layers, n, d) = (config.num_layers, config.num_samples, config.hidden_dim);
    let u = direction(config.direction_seed, d);
    let mut rng = SeededRng::new(config.noise_seed);
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i >= n / 2)).collect();
    rng.shuffle(&mut labels);

    let rho = config.layer_noise_correlation;
    let fresh = (1.0 - rho * rho).sqrt();
    let mut noise = vec![0.0f64; n * d];
    let mut tensors = Vec::with_capacity(layers * n * d);
    for (layer, &delta) in config.separation_schedule.iter().enumerate() {
        for (i, &label) in labels.iter().enumerate() {
            let sign = if label == 1 { 0.5 } else { -0.5 };
            for j in 0..d {
                let e = &mut noise[i * d + j];
                let eta = rng.standard_normal();
                *e = if layer == 0 {
                    eta
                } else {
                    rho * *e + fresh * eta
                };
                tensors.push((sign * delta * u[j] + *e) as f32);
            }
        }
    }

    let meta = ArchiveMeta {
        format_version: FORMAT_VERSION,
        model_name: config.model_name.clone(),
        dataset_name: config.dataset_name.clone(),
        language: config.language.clone(),
        num_layers: layers,
        hidden_dim: d,
        num_samples: n,
        sample_ids: (0..n).map(|i| format!("s{i:05}")).collect(),
        label_names: ["negative".into(), "positive".into()],
    };
    Archive::new(meta, tensors, labels)
}
