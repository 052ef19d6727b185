//! Pattern-based interpretation of user utterances and template-based
//! realization of system actions. All wording lives in two data files per
//! domain: a lexicon and a pattern set.

mod generate;
mod lexicon;
mod pattern;

use std::path::Path;

use thiserror::Error;

use crate::engine::SystemAction;
use crate::semantics::{Move, Question};

pub use generate::{fill_template, render_question};
pub use lexicon::{Lexicon, PredicateForms};
pub use pattern::{tokenize, PatternSet};

#[derive(Debug, Error)]
pub enum NlError {
    #[error("no template for {0}")]
    MissingTemplate(String),
    #[error("template `{template}` uses unknown slot `{slot}`")]
    UnboundSlot { template: String, slot: String },
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error("invalid pattern `{pattern}`: {message}")]
    Pattern { pattern: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// A lexicon and pattern set loaded for one domain.
#[derive(Debug, Clone)]
pub struct NlFrontend {
    lexicon: Lexicon,
    patterns: PatternSet,
}

impl NlFrontend {
    pub fn new(lexicon: Lexicon, patterns: PatternSet) -> Self {
        Self { lexicon, patterns }
    }

    pub fn from_json(lexicon: &str, patterns: &str) -> Result<Self, NlError> {
        let lexicon = Lexicon::from_json(lexicon)?;
        let patterns = PatternSet::from_json(patterns, &lexicon)?;
        Ok(Self { lexicon, patterns })
    }

    /// Loads `<stem>.lexicon.json` and `<stem>.patterns.json` that sit next
    /// to the DDD file `<stem>.xml`.
    pub fn load_for_ddd(ddd_path: &Path) -> Result<Self, NlError> {
        let read = |suffix: &str| {
            let path = ddd_path.with_extension(suffix);
            std::fs::read_to_string(&path).map_err(|source| NlError::Io { path: path.display().to_string(), source })
        };
        Self::from_json(&read("lexicon.json")?, &read("patterns.json")?)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    /// Moves conveyed by `utterance`; empty when nothing matches.
    pub fn interpret(&self, utterance: &str, qud: Option<&Question>) -> Vec<Move> {
        self.patterns.interpret(utterance, &self.lexicon, qud)
    }

    pub fn generate(&self, actions: &[SystemAction]) -> Result<String, NlError> {
        generate::generate(actions, &self.lexicon)
    }
}
