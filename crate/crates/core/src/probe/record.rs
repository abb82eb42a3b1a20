use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::Probe;
use crate::error::Result;
use crate::language::LanguageTag;

/// A trained probe together with where it came from, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub language: LanguageTag,
    pub layer: usize,
    pub lambda: f64,
    pub probe: Probe<f64>,
}

#[derive(Serialize)]
struct Outgoing<'a> {
    language: &'a LanguageTag,
    layer: usize,
    lambda: f64,
    weights: Box<RawValue>,
    bias: f64,
    converged: bool,
    final_gradient_norm: f64,
    iterations_used: usize,
}

#[derive(Deserialize)]
struct Incoming {
    language: LanguageTag,
    layer: usize,
    lambda: f64,
    weights: Vec<f64>,
    bias: f64,
    converged: bool,
    final_gradient_norm: f64,
    iterations_used: usize,
}

// 17 significant digits: one before the point, sixteen after.
fn weights_literal(weights: &[f64]) -> String {
    let mut out = String::with_capacity(weights.len() * 24 + 2);
    out.push('[');
    for (i, w) in weights.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{w:.16e}"));
    }
    out.push(']');
    out
}

impl ProbeRecord {
    pub fn to_json(&self) -> Result<String> {
        let weights = RawValue::from_string(weights_literal(&self.probe.weights))?;
        let out = Outgoing {
            language: &self.language,
            layer: self.layer,
            lambda: self.lambda,
            weights,
            bias: self.probe.bias,
            converged: self.probe.converged,
            final_gradient_norm: self.probe.final_gradient_norm,
            iterations_used: self.probe.iterations_used,
        };
        Ok(serde_json::to_string(&out)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Incoming = serde_json::from_str(text)?;
        Ok(Self {
            language: r.language,
            layer: r.layer,
            lambda: r.lambda,
            probe: Probe {
                weights: r.weights,
                bias: r.bias,
                converged: r.converged,
                final_gradient_norm: r.final_gradient_norm,
                iterations_used: r.iterations_used,
            },
        })
    }

    /// Canonical file name inside a probe directory.
    pub fn file_name(&self) -> String {
        format!("{}_layer{:03}.json", self.language.code(), self.layer)
    }
}
