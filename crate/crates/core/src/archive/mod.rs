//! Hidden-state archives: one file per (model, dataset, language) holding the
//! last-token representation of every sample at every layer slot.
//!
//! Byte layout, little-endian throughout:
//!
//! ```text
//! "HSAF"                      4 bytes magic
//! format_version              u32 (= 1)
//! metadata_length             u64
//! metadata                    metadata_length bytes of UTF-8 JSON (ArchiveMeta)
//! tensors                     num_layers * num_samples * hidden_dim f32,
//!                             layer-major, then sample-major, then dimension
//! labels                      num_samples bytes, each 0 or 1
//! ```
//!
//! Slot 0 holds the embedding output; slot `l >= 1` holds the residual stream
//! at the end of transformer layer `l`.

mod registry;

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

pub use self::registry::{known_models, validate_against_registry, Finding, ModelRegistryEntry};
use crate::error::{Error, Result};
use crate::language::LanguageTag;
use crate::probe::TrainSet;
use crate::scalar::Scalar;

pub const MAGIC: [u8; 4] = *b"HSAF";
pub const FORMAT_VERSION: u32 = 1;

// Upper bound on the JSON header; real headers are a few hundred KiB at most.
const MAX_METADATA_LEN: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMeta {
    pub format_version: u32,
    pub model_name: String,
    pub dataset_name: String,
    pub language: LanguageTag,
    pub num_layers: usize,
    pub hidden_dim: usize,
    pub num_samples: usize,
    pub sample_ids: Vec<String>,
    pub label_names: [String; 2],
}

impl ArchiveMeta {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Version(self.format_version));
        }
        if self.num_layers < 1 {
            return Err(Error::data("num_layers must be at least 1"));
        }
        if self.hidden_dim < 1 {
            return Err(Error::data("hidden_dim must be at least 1"));
        }
        if self.num_samples < 2 {
            return Err(Error::data("num_samples must be at least 2"));
        }
        if self.sample_ids.len() != self.num_samples {
            return Err(Error::dim(format!(
                "{} sample ids for {} samples",
                self.sample_ids.len(),
                self.num_samples
            )));
        }
        let mut seen = HashSet::with_capacity(self.sample_ids.len());
        for id in &self.sample_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::data(format!("duplicate sample id {id:?}")));
            }
        }
        Ok(())
    }

    /// Number of f32 values in the tensor block, `None` on overflow.
    pub fn tensor_extent(&self) -> Option<usize> {
        self.num_layers
            .checked_mul(self.num_samples)?
            .checked_mul(self.hidden_dim)
    }

    /// Index of the deepest stored layer slot.
    pub fn deepest_layer(&self) -> usize {
        self.num_layers - 1
    }
}

/// A validated archive. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    meta: ArchiveMeta,
    tensors: Vec<f32>,
    labels: Vec<u8>,
}

fn check_payload(meta: &ArchiveMeta, tensors: &[f32], labels: &[u8]) -> Result<()> {
    meta.validate()?;
    let extent = meta
        .tensor_extent()
        .ok_or_else(|| Error::dim("tensor extent overflows"))?;
    if tensors.len() != extent {
        return Err(Error::dim(format!(
            "expected {extent} floats ({} layers x {} samples x {} dims), got {}",
            meta.num_layers,
            meta.num_samples,
            meta.hidden_dim,
            tensors.len()
        )));
    }
    if labels.len() != meta.num_samples {
        return Err(Error::dim(format!(
            "expected {} labels, got {}",
            meta.num_samples,
            labels.len()
        )));
    }
    if let Some(pos) = tensors.iter().position(|v| !v.is_finite()) {
        return Err(Error::data(format!(
            "non-finite value at tensor offset {pos}"
        )));
    }
    if let Some(pos) = labels.iter().position(|&l| l > 1) {
        return Err(Error::data(format!(
            "label {} at sample {pos} is not 0 or 1",
            labels[pos]
        )));
    }
    Ok(())
}

impl Archive {
    pub fn new(meta: ArchiveMeta, tensors: Vec<f32>, labels: Vec<u8>) -> Result<Self> {
        check_payload(&meta, &tensors, &labels)?;
        Ok(Self {
            meta,
            tensors,
            labels,
        })
    }

    pub fn meta(&self) -> &ArchiveMeta {
        &self.meta
    }

    pub fn tensors(&self) -> &[f32] {
        &self.tensors
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn language(&self) -> &LanguageTag {
        &self.meta.language
    }

    /// All representations at one layer slot, sample-major.
    pub fn layer(&self, layer: usize) -> Result<&[f32]> {
        if layer >= self.meta.num_layers {
            return Err(Error::dim(format!(
                "layer {layer} out of range (archive has {} slots)",
                self.meta.num_layers
            )));
        }
        let stride = self.meta.num_samples * self.meta.hidden_dim;
        Ok(&self.tensors[layer * stride..(layer + 1) * stride])
    }

    pub fn sample_index(&self, id: &str) -> Option<usize> {
        self.meta.sample_ids.iter().position(|s| s == id)
    }

    /// New archive containing only the given samples, in the given order.
    pub fn select_samples(&self, indices: &[usize]) -> Result<Archive> {
        let n = self.meta.num_samples;
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::dim(format!("sample index {bad} out of range ({n})")));
        }
        let d = self.meta.hidden_dim;
        let mut tensors = Vec::with_capacity(self.meta.num_layers * indices.len() * d);
        for layer in 0..self.meta.num_layers {
            let block = self.layer(layer)?;
            for &i in indices {
                tensors.extend_from_slice(&block[i * d..(i + 1) * d]);
            }
        }
        let meta = ArchiveMeta {
            num_samples: indices.len(),
            sample_ids: indices
                .iter()
                .map(|&i| self.meta.sample_ids[i].clone())
                .collect(),
            ..self.meta.clone()
        };
        Archive::new(
            meta,
            tensors,
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    /// Training matrix for one layer, optionally restricted to some rows.
    pub fn train_set<T: Scalar>(
        &self,
        layer: usize,
        rows: Option<&[usize]>,
    ) -> Result<TrainSet<T>> {
        let block = self.layer(layer)?;
        let d = self.meta.hidden_dim;
        let (features, labels) = match rows {
            None => (
                block.iter().map(|&v| T::from_stored(v)).collect(),
                self.labels.clone(),
            ),
            Some(rows) => {
                let mut features = Vec::with_capacity(rows.len() * d);
                let mut labels = Vec::with_capacity(rows.len());
                for &i in rows {
                    if i >= self.meta.num_samples {
                        return Err(Error::dim(format!("row {i} out of range")));
                    }
                    features.extend(block[i * d..(i + 1) * d].iter().map(|&v| T::from_stored(v)));
                    labels.push(self.labels[i]);
                }
                (features, labels)
            }
        };
        TrainSet::new(features, labels, d)
    }

    pub fn write_to<W: Write>(&self, dest: W) -> Result<u64> {
        write_archive(&self.meta, &self.tensors, &self.labels, dest)
    }
}

/// Serializes an archive, returning the number of bytes written.
pub fn write_archive<W: Write>(
    meta: &ArchiveMeta,
    tensors: &[f32],
    labels: &[u8],
    mut dest: W,
) -> Result<u64> {
    check_payload(meta, tensors, labels)?;
    let header = serde_json::to_vec(meta)?;
    dest.write_all(&MAGIC)?;
    dest.write_all(&FORMAT_VERSION.to_le_bytes())?;
    dest.write_all(&(header.len() as u64).to_le_bytes())?;
    dest.write_all(&header)?;
    let mut buf = Vec::with_capacity(tensors.len().min(1 << 16) * 4);
    for chunk in tensors.chunks(1 << 16) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        dest.write_all(&buf)?;
    }
    dest.write_all(labels)?;
    dest.flush()?;
    Ok(4 + 4 + 8 + header.len() as u64 + tensors.len() as u64 * 4 + labels.len() as u64)
}

// Reads exactly `len` bytes. The buffer grows with the bytes actually
// delivered, so a lying length field cannot force a large allocation.
fn read_block<R: Read>(source: &mut R, len: u64, what: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    source.by_ref().take(len).read_to_end(&mut buf)?;
    if (buf.len() as u64) < len {
        return Err(Error::Truncated(format!(
            "{what}: expected {len} bytes, found {}",
            buf.len()
        )));
    }
    Ok(buf)
}

/// Parses and validates an archive. Malformed input is rejected, never repaired.
pub fn read_archive<R: Read>(mut source: R) -> Result<Archive> {
    let magic = read_block(&mut source, 4, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format(format!("bad magic bytes {magic:02x?}")));
    }
    let version = u32::from_le_bytes(read_block(&mut source, 4, "version")?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Version(version));
    }
    let meta_len = u64::from_le_bytes(
        read_block(&mut source, 8, "metadata length")?
            .try_into()
            .unwrap(),
    );
    if meta_len > MAX_METADATA_LEN {
        return Err(Error::Format(format!(
            "metadata length {meta_len} is implausible"
        )));
    }
    let header = read_block(&mut source, meta_len, "metadata")?;
    let meta: ArchiveMeta = serde_json::from_slice(&header)
        .map_err(|e| Error::Format(format!("metadata JSON: {e}")))?;
    if meta.format_version != version {
        return Err(Error::Format(format!(
            "header version {version} disagrees with metadata version {}",
            meta.format_version
        )));
    }
    meta.validate()?;
    let extent = meta
        .tensor_extent()
        .and_then(|e| e.checked_mul(4).map(|b| (e, b)))
        .ok_or_else(|| Error::Format("tensor extent overflows".into()))?;
    let raw = read_block(&mut source, extent.1 as u64, "tensor block")?;
    let tensors: Vec<f32> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    drop(raw);
    let labels = read_block(&mut source, meta.num_samples as u64, "labels")?;
    let mut trailing = [0u8; 1];
    if source.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after label block".into()));
    }
    Archive::new(meta, tensors, labels)
}
