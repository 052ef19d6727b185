//! Dialogue sessions: loading a domain bundle, running turns, keeping
//! transcripts, and replaying scripted dialogues.

mod script;
mod store;

pub use script::{
    parse_script, run_script, run_script_file, ConformanceReport, DialogueScript, ScriptError, ScriptTurn, TurnResult,
};
pub use store::{SessionStore, SessionView, DEFAULT_IDLE_TIMEOUT};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ddd::{parse_ddd, DddError};
use crate::directory::{load_fixture, DirectoryKb, FixtureError};
use crate::engine::{Engine, EngineError, GoalStatus, InformationState};
use crate::nl::{render_question, NlError, NlFrontend};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Ddd { path: String, source: DddError },
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Nl(#[from] NlError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` is busy with another utterance")]
    Busy(String),
    #[error("session has ended")]
    Ended,
    #[error(transparent)]
    Generation(#[from] NlError),
}

/// A validated domain, its language files and a knowledge base.
#[derive(Debug)]
pub struct DomainBundle {
    engine: Engine,
    nl: NlFrontend,
    ddd_sha256: String,
    ddd_path: Option<PathBuf>,
    fixture_path: Option<PathBuf>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl DomainBundle {
    /// Builds a bundle from in-memory parts.
    pub fn from_parts(ddd_source: &str, nl: NlFrontend, kb: DirectoryKb) -> Result<Self, LoadError> {
        let domain = parse_ddd(ddd_source).map_err(|source| LoadError::Ddd { path: "<memory>".into(), source })?;
        let engine = Engine::new(Arc::new(domain), Arc::new(kb), Arc::new(nl.lexicon().sorts().clone()))?;
        Ok(Self { engine, nl, ddd_sha256: sha256_hex(ddd_source.as_bytes()), ddd_path: None, fixture_path: None })
    }

    /// Loads the DDD at `ddd_path`, its companion lexicon and pattern files,
    /// and the fixture at `fixture_path`.
    pub fn load(ddd_path: &Path, fixture_path: &Path) -> Result<Self, LoadError> {
        let source = std::fs::read_to_string(ddd_path)
            .map_err(|source| LoadError::Io { path: ddd_path.display().to_string(), source })?;
        let nl = NlFrontend::load_for_ddd(ddd_path)?;
        let kb = load_fixture(fixture_path)?;
        let mut bundle = Self::from_parts(&source, nl, kb).map_err(|e| match e {
            LoadError::Ddd { source, .. } => LoadError::Ddd { path: ddd_path.display().to_string(), source },
            other => other,
        })?;
        bundle.ddd_path = Some(ddd_path.to_owned());
        bundle.fixture_path = Some(fixture_path.to_owned());
        Ok(bundle)
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn nl(&self) -> &NlFrontend {
        &self.nl
    }

    pub fn kb(&self) -> &DirectoryKb {
        self.engine.kb()
    }

    /// SHA-256 of the DDD source text, lowercase hex.
    pub fn ddd_sha256(&self) -> &str {
        &self.ddd_sha256
    }

    pub fn ddd_path(&self) -> Option<&Path> {
        self.ddd_path.as_deref()
    }

    pub fn fixture_path(&self) -> Option<&Path> {
        self.fixture_path.as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Speaker {
    U,
    S,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub speaker: Speaker,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalSummary {
    pub name: String,
    pub status: String,
}

/// What a client may see of the information state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSummary {
    pub constraints: BTreeMap<String, String>,
    pub declined: Vec<String>,
    pub last_count: Option<usize>,
    pub qud: Option<String>,
    pub goal_stack: Vec<GoalSummary>,
    pub ended: bool,
}

impl StateSummary {
    pub fn new(state: &InformationState, nl: &NlFrontend) -> Self {
        Self {
            constraints: state.constraints.iter().map(|(k, v)| (k.to_owned(), v.to_string())).collect(),
            declined: state.declined.iter().cloned().collect(),
            last_count: state.last_count,
            qud: state
                .qud
                .as_ref()
                .map(|q| render_question(q, nl.lexicon()).unwrap_or_else(|_| q.predicate().name.clone())),
            goal_stack: state
                .goal_stack
                .iter()
                .map(|g| GoalSummary {
                    name: g.name().to_owned(),
                    status: match g.status {
                        GoalStatus::Fresh => "fresh",
                        GoalStatus::InProgress => "in-progress",
                        GoalStatus::Resolved => "resolved",
                    }
                    .to_owned(),
                })
                .collect(),
            ended: state.ended,
        }
    }
}

/// One system reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reply {
    pub system_text: String,
    pub state: StateSummary,
}

/// A running dialogue with its transcript.
#[derive(Debug)]
pub struct Session {
    id: String,
    bundle: Arc<DomainBundle>,
    state: InformationState,
    transcript: Vec<TranscriptEntry>,
    greeting: String,
    created_at: SystemTime,
    last_active: Instant,
}

impl Session {
    /// Starts a fresh dialogue. The opening system prompt is kept apart from
    /// the transcript, which starts empty.
    pub fn new(id: impl Into<String>, bundle: Arc<DomainBundle>) -> Result<Self, SessionError> {
        let mut state = bundle.engine.new_session();
        let greeting = bundle.nl.generate(&state.take_agenda())?;
        Ok(Self {
            id: id.into(),
            bundle,
            state,
            transcript: Vec::new(),
            greeting,
            created_at: SystemTime::now(),
            last_active: Instant::now(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn bundle(&self) -> &Arc<DomainBundle> {
        &self.bundle
    }

    pub fn greeting(&self) -> &str {
        &self.greeting
    }

    pub fn state(&self) -> &InformationState {
        &self.state
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn created_at_unix(&self) -> u64 {
        self.created_at.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or_default()
    }

    pub fn last_active(&self) -> Instant {
        self.last_active
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary::new(&self.state, &self.bundle.nl)
    }

    /// Interprets `text`, updates the state and returns the system's reply.
    pub fn post_utterance(&mut self, text: &str) -> Result<Reply, SessionError> {
        if self.state.ended {
            return Err(SessionError::Ended);
        }
        self.last_active = Instant::now();
        let nl = &self.bundle.nl;
        let moves = nl.interpret(text, self.state.qud.as_ref());
        let mut next = self.state.clone();
        let actions = self.bundle.engine.integrate_turn(&mut next, &moves);
        let mut system_text = nl.generate(&actions)?;
        if next.ended && system_text.is_empty() {
            system_text = nl.lexicon().template("goodbye").map(str::to_owned).unwrap_or_default();
        }
        self.state = next;
        self.transcript.push(TranscriptEntry { speaker: Speaker::U, text: text.to_owned() });
        self.transcript.push(TranscriptEntry { speaker: Speaker::S, text: system_text.clone() });
        Ok(Reply { system_text, state: self.summary() })
    }
}
