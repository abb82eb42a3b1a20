use std::collections::HashSet;
use std::io::BufRead;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::language::LanguageTag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledStatement {
    pub id: String,
    pub text: String,
    pub label: u8,
    pub language: LanguageTag,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    id: String,
    text: String,
    label: u8,
}

/// Reads a JSON-lines statement file (`{"id", "text", "label"}` per line),
/// preserving file order. Blank lines are skipped; line numbers are 1-based.
pub fn load_statements<R: BufRead>(
    source: R,
    language: &LanguageTag,
) -> Result<Vec<LabeledStatement>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if parsed.label > 1 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("label {} is not 0 or 1", parsed.label),
            });
        }
        if parsed.text.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty statement text".into(),
            });
        }
        if !seen.insert(parsed.id.clone()) {
            return Err(Error::data(format!(
                "duplicate id {:?} on line {lineno}",
                parsed.id
            )));
        }
        out.push(LabeledStatement {
            id: parsed.id,
            text: parsed.text,
            label: parsed.label,
            language: language.clone(),
        });
    }
    Ok(out)
}
