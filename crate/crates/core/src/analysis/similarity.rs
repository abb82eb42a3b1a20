use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ProbeSet;
use crate::error::{Error, Result};
use crate::language::LanguageTag;
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cosine,
    Pearson,
}

impl Metric {
    pub fn apply<T: Scalar>(self, u: &[T], v: &[T]) -> Result<T> {
        match self {
            Metric::Cosine => cosine_similarity(u, v),
            Metric::Pearson => pearson_correlation(u, v),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cosine => "cosine",
            Metric::Pearson => "pearson",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "pearson" => Ok(Metric::Pearson),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

/// `u.v / (|u| |v|)`, clamped to [-1, 1]. Zero vectors are an error.
///
/// The result is exactly symmetric in its arguments.
pub fn cosine_similarity<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::dim(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let nu = dot(u, u).sqrt();
    let nv = dot(v, v).sqrt();
    if !(nu > T::zero() && nv > T::zero()) {
        return Err(Error::UndefinedSimilarity(
            "cosine of a zero-norm vector".into(),
        ));
    }
    let c = dot(u, v) / (nu * nv);
    Ok(c.max(-T::one()).min(T::one()))
}

/// Cosine similarity of the mean-centered vectors.
pub fn pearson_correlation<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::dim(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.len() < 2 {
        return Err(Error::dim("correlation needs at least two entries"));
    }
    let center = |x: &[T]| -> Vec<T> {
        let mean = x.iter().copied().sum::<T>() / T::from_usize(x.len()).unwrap();
        x.iter().map(|&a| a - mean).collect()
    };
    let (cu, cv) = (center(u), center(v));
    if cu.iter().all(|a| a.is_zero()) || cv.iter().all(|a| a.is_zero()) {
        return Err(Error::UndefinedSimilarity(
            "correlation of a constant vector".into(),
        ));
    }
    cosine_similarity(&cu, &cv)
        .map_err(|_| Error::UndefinedSimilarity("correlation of a constant vector".into()))
}

/// Pairwise probe-vector similarity across languages at one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub languages: Vec<LanguageTag>,
    pub layer: usize,
    pub metric: Metric,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("language");
        for t in &self.languages {
            out.push(',');
            out.push_str(t.code());
        }
        out.push('\n');
        for (t, row) in self.languages.iter().zip(&self.values) {
            out.push_str(t.code());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Similarity of every language's probe with every other language's probe
/// at `layer`, using weight vectors only (bias excluded).
pub fn similarity_matrix<T: Scalar>(
    probes: &ProbeSet<T>,
    layer: usize,
    metric: Metric,
) -> Result<SimilarityMatrix> {
    let languages = probes.languages();
    let weights = languages
        .iter()
        .map(|t| {
            probes
                .get(t.code(), layer)
                .map(|p| p.weights.as_slice())
                .ok_or_else(|| Error::IncompleteSet(format!("no probe for {t} at layer {layer}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = languages.len();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let s = metric.apply(weights[i], weights[j])?.to_f64_lossy();
            values[i][j] = s;
            values[j][i] = s;
        }
    }
    Ok(SimilarityMatrix {
        languages,
        layer,
        metric,
        values,
    })
}

/// Per-layer similarity of each language's probe with a reference language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityCurves {
    pub reference: LanguageTag,
    pub metric: Metric,
    pub layers: Vec<usize>,
    pub curves: Vec<(LanguageTag, Vec<f64>)>,
}

impl SimilarityCurves {
    pub fn curve(&self, code: &str) -> Option<&[f64]> {
        self.curves
            .iter()
            .find(|(t, _)| t.code() == code)
            .map(|(_, c)| c.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("language");
        for l in &self.layers {
            out.push_str(&format!(",{l}"));
        }
        out.push('\n');
        for (t, curve) in &self.curves {
            out.push_str(t.code());
            for v in curve {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn similarity_to_reference<T: Scalar>(
    probes: &ProbeSet<T>,
    reference: &LanguageTag,
    metric: Metric,
) -> Result<SimilarityCurves> {
    let layers = probes.layers_for(reference.code());
    if layers.is_empty() {
        return Err(Error::IncompleteSet(format!(
            "reference {reference} has no probes"
        )));
    }
    let all_layers = probes.layers();
    if let Some(missing) = all_layers.iter().find(|l| !layers.contains(l)) {
        return Err(Error::IncompleteSet(format!(
            "reference {reference} has no probe at layer {missing}"
        )));
    }
    let mut curves = Vec::new();
    for tag in probes.languages() {
        if tag.code() == reference.code() {
            continue;
        }
        let curve = layers
            .iter()
            .map(|&l| {
                let p = probes.get(tag.code(), l).ok_or_else(|| {
                    Error::IncompleteSet(format!("no probe for {tag} at layer {l}"))
                })?;
                let r = probes.get(reference.code(), l).unwrap();
                Ok(metric.apply(&p.weights, &r.weights)?.to_f64_lossy())
            })
            .collect::<Result<Vec<_>>>()?;
        curves.push((tag, curve));
    }
    Ok(SimilarityCurves {
        reference: reference.clone(),
        metric,
        layers,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::Probe;
    use proptest::prelude::*;

    fn tag(code: &str) -> LanguageTag {
        LanguageTag::known(code).unwrap()
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine_similarity(&[3.0, 4.0], &[3.0, 4.0]).unwrap() - 1.0f64).abs() < 1e-15);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0f64);
        let c: f64 = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::UndefinedSimilarity(_))
        ));
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 0.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn pearson_examples() {
        let r: f64 = pearson_correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        let r: f64 = pearson_correlation(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((r + 1.0).abs() < 1e-15);
        assert!(matches!(
            pearson_correlation(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedSimilarity(_))
        ));
    }

    proptest! {
        #[test]
        fn cosine_scale_invariant(
            u in prop::collection::vec(-10.0f64..10.0, 8),
            v in prop::collection::vec(-10.0f64..10.0, 8),
            a in 0.01f64..100.0,
            b in 0.01f64..100.0,
        ) {
            prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
            let base = cosine_similarity(&u, &v).unwrap();
            let su: Vec<f64> = u.iter().map(|x| x * a).collect();
            let sv: Vec<f64> = v.iter().map(|x| x * b).collect();
            prop_assert!((cosine_similarity(&su, &sv).unwrap() - base).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&base));
            prop_assert_eq!(base, cosine_similarity(&v, &u).unwrap());
        }

        #[test]
        fn pearson_translation_invariant(
            u in prop::collection::vec(-10.0f64..10.0, 8),
            v in prop::collection::vec(-10.0f64..10.0, 8),
            shift in -5.0f64..5.0,
        ) {
            let spread = |x: &[f64]| x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min);
            prop_assume!(spread(&u) > 1e-2 && spread(&v) > 1e-2);
            let base = pearson_correlation(&u, &v).unwrap();
            let tu: Vec<f64> = u.iter().map(|x| x + shift).collect();
            prop_assert!((pearson_correlation(&tu, &v).unwrap() - base).abs() < 1e-12);
            prop_assert!((pearson_correlation(&u, &tu).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    fn set_with(weights: &[(&str, usize, Vec<f64>)]) -> ProbeSet<f64> {
        let dim = weights[0].2.len();
        let mut set = ProbeSet::new(dim);
        for (code, layer, w) in weights {
            set.insert(tag(code), *layer, Probe::from_weights(w.clone(), 0.0))
                .unwrap();
        }
        set
    }

    #[test]
    fn matrix_orders_languages_and_is_symmetric() {
        let set = set_with(&[
            ("ta", 0, vec![0.0, 0.0, 1.0]),
            ("de", 0, vec![0.0, 1.0, 0.0]),
            ("en", 0, vec![1.0, 0.0, 0.0]),
        ]);
        let m = similarity_matrix(&set, 0, Metric::Cosine).unwrap();
        let codes: Vec<_> = m.languages.iter().map(|t| t.code()).collect();
        assert_eq!(codes, ["en", "de", "ta"]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn proportional_probes_have_unit_cosine() {
        let set = set_with(&[
            ("en", 2, vec![1.0, -2.0, 0.5]),
            ("fr", 2, vec![3.0, -6.0, 1.5]),
        ]);
        let m = similarity_matrix(&set, 2, Metric::Cosine).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-15);
        assert!(matches!(
            similarity_matrix(&set, 3, Metric::Cosine),
            Err(Error::IncompleteSet(_))
        ));
    }

    #[test]
    fn matrix_entries_equal_pairwise_cosine() {
        let set = set_with(&[
            ("en", 0, vec![0.3, -1.1, 2.0, 0.7]),
            ("zh", 0, vec![-0.2, 0.4, 1.5, 0.1]),
            ("kk", 0, vec![1.3, 0.0, -0.8, 2.2]),
        ]);
        let m = similarity_matrix(&set, 0, Metric::Cosine).unwrap();
        for (i, a) in m.languages.iter().enumerate() {
            for (j, b) in m.languages.iter().enumerate() {
                let direct = cosine_similarity(
                    &set.get(a.code(), 0).unwrap().weights,
                    &set.get(b.code(), 0).unwrap().weights,
                )
                .unwrap();
                assert_eq!(m.get(i, j), direct);
            }
        }
    }

    #[test]
    fn curves_exclude_reference() {
        let mut entries = Vec::new();
        for l in 0..8 {
            let r = vec![1.0, l as f64 + 1.0, -0.5];
            entries.push(("en", l, r.clone()));
            entries.push(("de", l, r.clone()));
            let other = if l == 5 {
                r
            } else {
                vec![-(l as f64) - 1.0, 1.0, 0.25 + l as f64]
            };
            entries.push(("hi", l, other));
        }
        let set = set_with(&entries);
        let curves = similarity_to_reference(&set, &tag("en"), Metric::Cosine).unwrap();
        assert!(curves.curve("en").is_none());
        assert!(curves
            .curve("de")
            .unwrap()
            .iter()
            .all(|&c| (c - 1.0).abs() < 1e-15));
        let hi = curves.curve("hi").unwrap();
        assert!((hi[5] - 1.0).abs() < 1e-15);
        assert!(hi.iter().enumerate().all(|(i, &c)| i == 5 || c < 0.99));
    }

    #[test]
    fn csv_layout() {
        let set = set_with(&[("en", 0, vec![1.0, 0.0]), ("fr", 0, vec![1.0, 1.0])]);
        let m = similarity_matrix(&set, 0, Metric::Cosine).unwrap();
        let csv = m.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "language,en,fr");
        assert!(lines[1].starts_with("en,1,0.7071067811865"));
    }
}
