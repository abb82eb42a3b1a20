use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};
use crate::language::LanguageTag;

use super::LabeledStatement;

pub const PLACEHOLDER: &str = "<Statement>";

const BUILTIN_TEMPLATES: &str = include_str!("../../data/prompt_templates.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    language: LanguageTag,
    template: String,
}

impl PromptTemplate {
    /// The template must contain the placeholder exactly once.
    pub fn new(language: LanguageTag, template: impl Into<String>) -> Result<Self> {
        let template = template.into();
        let count = template.matches(PLACEHOLDER).count();
        if count != 1 {
            return Err(Error::data(format!(
                "template for {language} has {count} {PLACEHOLDER} placeholders, expected 1"
            )));
        }
        Ok(Self { language, template })
    }

    pub fn language(&self) -> &LanguageTag {
        &self.language
    }

    pub fn text(&self) -> &str {
        &self.template
    }
}

/// Substitutes the statement text for the placeholder. The statement text
/// itself is inserted verbatim, even if it contains the placeholder.
pub fn apply_template(template: &PromptTemplate, statement: &LabeledStatement) -> Result<String> {
    if template.language.code() != statement.language.code() {
        return Err(Error::Language(format!(
            "template is {}, statement {} is {}",
            template.language, statement.id, statement.language
        )));
    }
    let (head, tail) = template
        .template
        .split_once(PLACEHOLDER)
        .expect("placeholder checked at construction");
    Ok(format!("{head}{}{tail}", statement.text))
}

/// Template strings keyed by language code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateBook {
    templates: BTreeMap<String, String>,
}

impl TemplateBook {
    pub fn from_reader<R: Read>(source: R) -> Result<Self> {
        let templates: BTreeMap<String, String> = serde_json::from_reader(source)?;
        Ok(Self { templates })
    }

    /// The shipped templates for the sixteen table languages.
    pub fn builtin() -> Self {
        Self::from_reader(BUILTIN_TEMPLATES.as_bytes()).expect("bundled templates parse")
    }

    pub fn get(&self, language: &LanguageTag) -> Result<PromptTemplate> {
        let text = self
            .templates
            .get(language.code())
            .ok_or_else(|| Error::Lookup(format!("no template for {language}")))?;
        PromptTemplate::new(language.clone(), text.clone())
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }
}
