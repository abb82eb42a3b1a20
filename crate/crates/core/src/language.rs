//! Language identity and the high/low resource grouping.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceClass {
    High,
    Low,
}

impl fmt::Display for ResourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceClass::High => "high",
            ResourceClass::Low => "low",
        })
    }
}

/// The sixteen studied languages in table order: seven high-resource
/// languages followed by nine low-resource ones.
pub const KNOWN_LANGUAGES: [(&str, &str, ResourceClass); 16] = [
    ("en", "English", ResourceClass::High),
    ("de", "German", ResourceClass::High),
    ("fr", "French", ResourceClass::High),
    ("zh", "Chinese", ResourceClass::High),
    ("es", "Spanish", ResourceClass::High),
    ("ru", "Russian", ResourceClass::High),
    ("id", "Indonesian", ResourceClass::High),
    ("or", "Oriya", ResourceClass::Low),
    ("hi", "Hindi", ResourceClass::Low),
    ("my", "Burmese", ResourceClass::Low),
    ("haw", "Hawaiian", ResourceClass::Low),
    ("kn", "Kannada", ResourceClass::Low),
    ("ta", "Tamil", ResourceClass::Low),
    ("te", "Telugu", ResourceClass::Low),
    ("kk", "Kazakh", ResourceClass::Low),
    ("tk", "Turkmen", ResourceClass::Low),
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTag")]
pub struct LanguageTag {
    code: String,
    display_name: String,
    resource_class: ResourceClass,
}

#[derive(Deserialize)]
struct RawTag {
    code: String,
    display_name: String,
    resource_class: ResourceClass,
}

impl TryFrom<RawTag> for LanguageTag {
    type Error = Error;

    fn try_from(raw: RawTag) -> Result<Self> {
        LanguageTag::new(raw.code, raw.display_name, raw.resource_class)
    }
}

impl LanguageTag {
    /// Builds a tag, rejecting an empty code or a resource class that
    /// contradicts the built-in table for one of the known languages.
    pub fn new(
        code: impl Into<String>,
        display_name: impl Into<String>,
        resource_class: ResourceClass,
    ) -> Result<Self> {
        let code = code.into();
        if code.is_empty() {
            return Err(Error::Language("language code must be nonempty".into()));
        }
        if let Some(&(_, _, expected)) = KNOWN_LANGUAGES.iter().find(|(c, _, _)| *c == code) {
            if expected != resource_class {
                return Err(Error::Language(format!(
                    "language {code} is {expected}-resource, got {resource_class}"
                )));
            }
        }
        Ok(Self {
            code,
            display_name: display_name.into(),
            resource_class,
        })
    }

    /// Looks up one of the sixteen built-in languages by code.
    pub fn known(code: &str) -> Option<Self> {
        KNOWN_LANGUAGES
            .iter()
            .find(|(c, _, _)| *c == code)
            .map(|&(c, name, class)| Self {
                code: c.to_string(),
                display_name: name.to_string(),
                resource_class: class,
            })
    }

    pub fn all_known() -> Vec<Self> {
        KNOWN_LANGUAGES
            .iter()
            .map(|(c, _, _)| Self::known(c).unwrap())
            .collect()
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn display_name(&self) -> &str {
        &self.display_name
    }

    pub fn resource_class(&self) -> ResourceClass {
        self.resource_class
    }

    pub fn is_high_resource(&self) -> bool {
        self.resource_class == ResourceClass::High
    }

    /// Position in the table order, `None` for languages outside the table.
    pub fn table_position(&self) -> Option<usize> {
        table_position(&self.code)
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

fn table_position(code: &str) -> Option<usize> {
    KNOWN_LANGUAGES.iter().position(|(c, _, _)| *c == code)
}

/// Presentation order: known languages in table order (high block first),
/// then any other codes lexicographically.
pub fn compare_codes(a: &str, b: &str) -> Ordering {
    match (table_position(a), table_position(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}

pub fn sort_languages(tags: &mut [LanguageTag]) {
    tags.sort_by(|a, b| compare_codes(&a.code, &b.code));
}
