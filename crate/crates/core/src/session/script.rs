//! Scripted dialogues.
//!
//! A script is UTF-8 text made of `U: <utterance>` and `S: <expected reply>`
//! lines plus `#name:`, `#fixture:` and `#ddd:` headers; other `#` lines are
//! comments. Paths in headers are relative to the script. Consecutive `S:`
//! lines form one system turn, joined with a space. `{phone:<id>}` in an
//! expectation stands for the phone number of fixture entity `<id>`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DomainBundle, LoadError, Session, Speaker};
use crate::directory::DirectoryKb;

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("script has no `#{0}:` header and no default was given")]
    MissingHeader(&'static str),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Load(#[from] LoadError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptTurn {
    pub speaker: Speaker,
    pub text: String,
    /// 1-based line of the turn's first line.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DialogueScript {
    pub name: String,
    pub fixture: Option<String>,
    pub ddd: Option<String>,
    pub turns: Vec<ScriptTurn>,
}

pub fn parse_script(text: &str) -> Result<DialogueScript, ScriptError> {
    let mut script = DialogueScript::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some(header) = raw.strip_prefix('#') {
            if let Some((key, value)) = header.split_once(':') {
                let value = value.trim().to_owned();
                match key.trim() {
                    "name" => script.name = value,
                    "fixture" => script.fixture = Some(value),
                    "ddd" => script.ddd = Some(value),
                    _ => {}
                }
            }
            continue;
        }
        let (speaker, body) = match raw.split_once(':') {
            Some(("U", body)) => (Speaker::U, body.trim()),
            Some(("S", body)) => (Speaker::S, body.trim()),
            _ => return Err(ScriptError::Syntax { line, message: "expected `U:` or `S:`".into() }),
        };
        if body.is_empty() {
            return Err(ScriptError::Syntax { line, message: "empty turn".into() });
        }
        match script.turns.last_mut() {
            Some(prev) if speaker == Speaker::S && prev.speaker == Speaker::S => {
                prev.text.push(' ');
                prev.text.push_str(body);
            }
            _ => script.turns.push(ScriptTurn { speaker, text: body.to_owned(), line }),
        }
    }
    if !script.turns.iter().any(|t| t.speaker == Speaker::U) {
        return Err(ScriptError::Syntax { line: text.lines().count(), message: "script has no user turns".into() });
    }
    Ok(script)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnResult {
    pub line: usize,
    /// The user utterance, or `None` for the opening prompt.
    pub input: Option<String>,
    /// Expected reply after substitution; `None` when the script has none.
    pub expected: Option<String>,
    pub actual: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub name: String,
    pub ddd_sha256: String,
    pub turns: Vec<TurnResult>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        self.turns.iter().all(|t| t.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TurnResult> {
        self.turns.iter().filter(|t| !t.passed)
    }
}

impl fmt::Display for ConformanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.turns.iter().filter(|t| t.passed).count();
        writeln!(f, "{}: {ok}/{} turns passed (ddd sha256 {})", self.name, self.turns.len(), self.ddd_sha256)?;
        for t in &self.turns {
            let tag = if t.passed { "ok  " } else { "FAIL" };
            let input = t.input.as_deref().unwrap_or("<opening prompt>");
            writeln!(f, "  {tag} line {}: U: {input}", t.line)?;
            if !t.passed {
                writeln!(f, "       expected: {}", t.expected.as_deref().unwrap_or(""))?;
                writeln!(f, "       actual:   {}", t.actual)?;
            }
        }
        Ok(())
    }
}

/// Replaces `{phone:<id>}` with the entity's phone number.
fn substitute(text: &str, kb: &DirectoryKb) -> Result<String, String> {
    const OPEN: &str = "{phone:";
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find(OPEN) {
        out.push_str(&rest[..start]);
        let after = &rest[start + OPEN.len()..];
        let end = after.find('}').ok_or_else(|| format!("unclosed placeholder in `{text}`"))?;
        let id = after[..end].trim();
        let entity = kb.get(id).ok_or_else(|| format!("unknown entity `{id}`"))?;
        out.push_str(&entity.phonenumber);
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Replays the user turns through a fresh session and compares each system
/// reply with the script.
pub fn run_script(script: &DialogueScript, bundle: Arc<DomainBundle>) -> ConformanceReport {
    let ddd_sha256 = bundle.ddd_sha256().to_owned();
    let kb_bundle = bundle.clone();
    let kb = kb_bundle.kb();
    let mut report = ConformanceReport { name: script.name.clone(), ddd_sha256, turns: Vec::new() };
    let mut session = match Session::new("script", bundle) {
        Ok(s) => s,
        Err(e) => {
            report.turns.push(TurnResult {
                line: 0,
                input: None,
                expected: None,
                actual: format!("<error: {e}>"),
                passed: false,
            });
            return report;
        }
    };

    let check = |line: usize, input: Option<String>, expected: Option<&ScriptTurn>, actual: String| {
        let expected = expected.map(|t| substitute(&t.text, kb));
        let (expected, passed) = match expected {
            None => (None, true),
            Some(Ok(e)) => {
                let passed = e == actual;
                (Some(e), passed)
            }
            Some(Err(message)) => (Some(format!("<{message}>")), false),
        };
        TurnResult { line, input, expected, actual, passed }
    };

    let mut turns = script.turns.iter().peekable();
    if let Some(opening) = turns.next_if(|t| t.speaker == Speaker::S) {
        report.turns.push(check(opening.line, None, Some(opening), session.greeting().to_owned()));
    }
    while let Some(turn) = turns.next() {
        let expected = turns.next_if(|t| t.speaker == Speaker::S);
        let actual = match session.post_utterance(&turn.text) {
            Ok(reply) => reply.system_text,
            Err(e) => format!("<error: {e}>"),
        };
        report.turns.push(check(turn.line, Some(turn.text.clone()), expected, actual));
    }
    report
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_owned()
    } else {
        base.join(p)
    }
}

/// Parses the script at `path`, loads the domain it names (or
/// `default_ddd`) with its fixture, and runs it.
pub fn run_script_file(path: &Path, default_ddd: Option<&Path>) -> Result<ConformanceReport, ScriptError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ScriptError::Io { path: path.display().to_string(), source })?;
    let mut script = parse_script(&text)?;
    if script.name.is_empty() {
        script.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let ddd = match (&script.ddd, default_ddd) {
        (Some(d), _) => resolve(base, d),
        (None, Some(d)) => d.to_owned(),
        (None, None) => return Err(ScriptError::MissingHeader("ddd")),
    };
    let fixture = resolve(base, script.fixture.as_deref().ok_or(ScriptError::MissingHeader("fixture"))?);
    let bundle = DomainBundle::load(&ddd, &fixture)?;
    Ok(run_script(&script, Arc::new(bundle)))
}
