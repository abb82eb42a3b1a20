//! Dataset plumbing: statement files, prompt templates, train/test splits
//! and synthetic hidden-state archives.

pub mod rng;
mod split;
mod statements;
mod synth;
mod template;

pub use self::split::{split, split_stratified, Split, SplitManifest, SplitSpec};
pub use self::statements::{load_statements, LabeledStatement};
pub use self::synth::{constant_schedule, linear_schedule, synthesize, SyntheticConfig};
pub use self::template::{apply_template, PromptTemplate, TemplateBook, PLACEHOLDER};
