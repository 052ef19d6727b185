//! Utterance patterns.
//!
//! A pattern is a token sequence with these extras:
//!
//! - `<slot:sort>` binds an entity of `sort` (or a number, for numeric
//!   sorts) to the predicate `slot`;
//! - `(a | b c)` is a choice between sequences;
//! - `[ ... ]` is optional and may hold a choice too;
//! - `*` skips any number of tokens.
//!
//! Matching is case-insensitive and ignores punctuation. The match with the
//! most literal words wins; ties go to a pattern binding a value of the sort
//! the current question asks for, then to the earlier pattern.

use serde::Deserialize;

use super::{Lexicon, NlError};
use crate::semantics::{Answer, Individual, Move, Predicate, Proposition, Question, Sort};

const MAX_VARIANTS: usize = 4096;

/// What a matched pattern produces.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveTemplate {
    /// Request for the named goal.
    Request(String),
    /// Propositional answer from the named slot.
    Answer(String),
    /// Bare individual from the named slot.
    Short(String),
    /// Wh-question about the named predicate.
    Ask(String),
    Yes,
    No,
    DontKnow,
    Greet,
    Quit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternFile {
    #[serde(default)]
    fillers: Vec<String>,
    patterns: Vec<PatternEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternEntry {
    pattern: String,
    moves: Vec<MoveTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Atom {
    Word(String),
    Slot { name: String, sort: Sort },
    Wild,
}

#[derive(Debug, Clone)]
struct Compiled {
    source: String,
    /// Flat expansions of the pattern, most literal words first.
    variants: Vec<(usize, Vec<Atom>)>,
    moves: Vec<MoveTemplate>,
}

/// Compiled patterns plus filler prefixes.
#[derive(Debug, Clone)]
pub struct PatternSet {
    fillers: Vec<Vec<String>>,
    patterns: Vec<Compiled>,
}

/// Lowercases and splits on anything but letters, digits, inner
/// apostrophes and hyphens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .replace('\u{2019}', "'")
        .split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '-'))
        .map(|t| t.trim_matches(|c| c == '\'' || c == '-'))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lexeme {
    Text(String),
    Slot(String),
    Open(char),
    Close(char),
    Bar,
    Star,
}

fn lex_pattern(src: &str) -> Result<Vec<Lexeme>, String> {
    let mut out = Vec::new();
    let mut word = String::new();
    let mut chars = src.chars();
    let flush = |word: &mut String, out: &mut Vec<Lexeme>| {
        if !word.is_empty() {
            out.push(Lexeme::Text(std::mem::take(word)));
        }
    };
    while let Some(c) = chars.next() {
        match c {
            '[' | '(' => {
                flush(&mut word, &mut out);
                out.push(Lexeme::Open(c));
            }
            ']' | ')' => {
                flush(&mut word, &mut out);
                out.push(Lexeme::Close(c));
            }
            '|' => {
                flush(&mut word, &mut out);
                out.push(Lexeme::Bar);
            }
            '*' => {
                flush(&mut word, &mut out);
                out.push(Lexeme::Star);
            }
            '<' => {
                flush(&mut word, &mut out);
                let slot: String = chars.by_ref().take_while(|c| *c != '>').collect();
                out.push(Lexeme::Slot(slot));
            }
            '>' => return Err("unbalanced `>`".into()),
            c if c.is_whitespace() => flush(&mut word, &mut out),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut out);
    Ok(out)
}

struct Parser<'a> {
    lexemes: &'a [Lexeme],
    pos: usize,
    lexicon: &'a Lexicon,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Lexeme> {
        self.lexemes.get(self.pos)
    }

    /// Parses a sequence up to a closing bracket, bar or the end.
    fn sequence(&mut self) -> Result<Vec<Vec<Atom>>, String> {
        let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
        loop {
            let item = match self.peek() {
                None | Some(Lexeme::Close(_)) | Some(Lexeme::Bar) => return Ok(acc),
                Some(_) => self.item()?,
            };
            let mut next = Vec::with_capacity(acc.len() * item.len());
            for prefix in &acc {
                for suffix in &item {
                    let mut v = prefix.clone();
                    v.extend(suffix.iter().cloned());
                    next.push(v);
                }
            }
            if next.len() > MAX_VARIANTS {
                return Err("too many alternatives".into());
            }
            acc = next;
        }
    }

    fn item(&mut self) -> Result<Vec<Vec<Atom>>, String> {
        let lexeme = self.lexemes[self.pos].clone();
        self.pos += 1;
        match lexeme {
            Lexeme::Text(t) => Ok(vec![tokenize(&t).into_iter().map(Atom::Word).collect()]),
            Lexeme::Star => Ok(vec![vec![Atom::Wild]]),
            Lexeme::Slot(spec) => {
                let (name, sort) = spec.split_once(':').ok_or(format!("slot `<{spec}>` needs a sort"))?;
                let (name, sort_name) = (name.trim(), sort.trim());
                let sort = Sort::parse(sort_name).ok_or(format!("unknown sort `{sort_name}`"))?;
                match self.lexicon.sort_of(name) {
                    Some(s) if s == sort => Ok(vec![vec![Atom::Slot { name: name.to_owned(), sort }]]),
                    Some(s) => Err(format!("slot `{name}` has sort {s}, not {sort}")),
                    None => Err(format!("slot `{name}` is not a lexicon predicate")),
                }
            }
            Lexeme::Open(open) => {
                let mut alts = self.sequence()?;
                while self.peek() == Some(&Lexeme::Bar) {
                    self.pos += 1;
                    alts.extend(self.sequence()?);
                }
                let close = if open == '[' { ']' } else { ')' };
                match self.peek() {
                    Some(Lexeme::Close(c)) if *c == close => self.pos += 1,
                    _ => return Err(format!("missing `{close}`")),
                }
                if open == '[' {
                    alts.push(Vec::new());
                }
                Ok(alts)
            }
            Lexeme::Close(c) => Err(format!("unexpected `{c}`")),
            Lexeme::Bar => Err("`|` outside a choice".into()),
        }
    }
}

fn compile(source: &str, moves: Vec<MoveTemplate>, lexicon: &Lexicon) -> Result<Compiled, NlError> {
    let fail = |message: String| NlError::Pattern { pattern: source.to_owned(), message };
    let lexemes = lex_pattern(source).map_err(fail)?;
    let mut parser = Parser { lexemes: &lexemes, pos: 0, lexicon };
    let expansions = parser.sequence().map_err(fail)?;
    if parser.pos != lexemes.len() {
        return Err(fail(format!("unexpected {:?}", lexemes[parser.pos])));
    }
    if moves.is_empty() {
        return Err(fail("produces no moves".into()));
    }
    for m in &moves {
        match m {
            MoveTemplate::Answer(slot) | MoveTemplate::Short(slot) => {
                let bound = expansions.iter().flatten().any(|a| matches!(a, Atom::Slot { name, .. } if name == slot));
                if !bound {
                    return Err(fail(format!("move uses slot `{slot}` the pattern never binds")));
                }
            }
            MoveTemplate::Ask(p) if lexicon.sort_of(p).is_none() => {
                return Err(fail(format!("unknown predicate `{p}`")));
            }
            _ => {}
        }
    }
    if expansions.iter().any(|v| v.iter().all(|a| *a == Atom::Wild)) {
        return Err(fail("can match empty input".into()));
    }
    let mut variants: Vec<(usize, Vec<Atom>)> =
        expansions.into_iter().map(|v| (v.iter().filter(|a| matches!(a, Atom::Word(_))).count(), v)).collect();
    variants.sort_by_key(|v| std::cmp::Reverse(v.0));
    variants.dedup();
    Ok(Compiled { source: source.to_owned(), variants, moves })
}

type Bindings = Vec<(String, Individual)>;

fn match_atoms(atoms: &[Atom], tokens: &[String], lexicon: &Lexicon, binds: &mut Bindings) -> bool {
    let Some((atom, rest)) = atoms.split_first() else {
        return tokens.is_empty();
    };
    match atom {
        Atom::Word(w) => tokens.first() == Some(w) && match_atoms(rest, &tokens[1..], lexicon, binds),
        Atom::Wild => (0..=tokens.len()).any(|k| match_atoms(rest, &tokens[k..], lexicon, binds)),
        Atom::Slot { name, sort } if sort.is_integer() => {
            let Some(n) = tokens.first().and_then(|t| lexicon.parse_number(t)) else { return false };
            let Ok(ind) = Individual::int(*sort, n) else { return false };
            binds.push((name.clone(), ind));
            if match_atoms(rest, &tokens[1..], lexicon, binds) {
                return true;
            }
            binds.pop();
            false
        }
        Atom::Slot { name, sort } => {
            for (form, surface) in lexicon.entity_forms(*sort) {
                if !tokens.starts_with(form) {
                    continue;
                }
                let Ok(ind) = Individual::text(*sort, surface.clone()) else { continue };
                binds.push((name.clone(), ind));
                if match_atoms(rest, &tokens[form.len()..], lexicon, binds) {
                    return true;
                }
                binds.pop();
            }
            false
        }
    }
}

impl PatternSet {
    pub fn from_json(text: &str, lexicon: &Lexicon) -> Result<Self, NlError> {
        let file: PatternFile =
            serde_json::from_str(text).map_err(|source| NlError::Json { path: "patterns".into(), source })?;
        let mut fillers: Vec<Vec<String>> =
            file.fillers.iter().map(|f| tokenize(f)).filter(|f| !f.is_empty()).collect();
        fillers.sort_by_key(|f| std::cmp::Reverse(f.len()));
        let mut patterns =
            file.patterns.into_iter().map(|e| compile(&e.pattern, e.moves, lexicon)).collect::<Result<Vec<_>, _>>()?;
        for (phrase, goal) in lexicon.goal_triggers() {
            patterns.push(compile(phrase, vec![MoveTemplate::Request(goal.to_owned())], lexicon)?);
        }
        Ok(Self { fillers, patterns })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Source text of the pattern that `utterance` selects, if any.
    pub fn matching_pattern(&self, utterance: &str, lexicon: &Lexicon, qud: Option<&Question>) -> Option<&str> {
        self.best(utterance, lexicon, qud).map(|(i, _)| self.patterns[i].source.as_str())
    }

    fn strip_fillers(&self, mut tokens: Vec<String>) -> Vec<String> {
        while let Some(f) = self.fillers.iter().find(|f| tokens.len() > f.len() && tokens.starts_with(f)) {
            tokens.drain(..f.len());
        }
        tokens
    }

    fn best(&self, utterance: &str, lexicon: &Lexicon, qud: Option<&Question>) -> Option<(usize, Bindings)> {
        let tokens = self.strip_fillers(tokenize(utterance));
        if tokens.is_empty() {
            return None;
        }
        let wanted = qud.map(|q| q.predicate().sort);
        let mut best: Option<((usize, bool), usize, Bindings)> = None;
        for (i, p) in self.patterns.iter().enumerate() {
            for (literals, atoms) in &p.variants {
                if best.as_ref().is_some_and(|(score, _, _)| *literals < score.0) {
                    break;
                }
                let mut binds = Vec::new();
                if !match_atoms(atoms, &tokens, lexicon, &mut binds) {
                    continue;
                }
                let preferred = binds.iter().any(|(_, ind)| Some(ind.sort()) == wanted);
                let score = (*literals, preferred);
                if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                    best = Some((score, i, binds));
                }
                break;
            }
        }
        best.map(|(_, i, b)| (i, b))
    }

    pub fn interpret(&self, utterance: &str, lexicon: &Lexicon, qud: Option<&Question>) -> Vec<Move> {
        let Some((i, binds)) = self.best(utterance, lexicon, qud) else {
            return Vec::new();
        };
        let bound = |slot: &str| binds.iter().find(|(n, _)| n == slot).map(|(_, ind)| ind.clone());
        self.patterns[i]
            .moves
            .iter()
            .filter_map(|m| {
                Some(match m {
                    MoveTemplate::Request(goal) => Move::Request(goal.clone()),
                    MoveTemplate::Answer(slot) => {
                        let ind = bound(slot)?;
                        let pred = Predicate::new(slot.clone(), ind.sort());
                        Move::Answer(Answer::Prop(Proposition::positive(pred, ind).ok()?))
                    }
                    MoveTemplate::Short(slot) => Move::Answer(Answer::Short(bound(slot)?)),
                    MoveTemplate::Ask(p) => Move::Ask(Question::wh(Predicate::new(p.clone(), lexicon.sort_of(p)?))),
                    MoveTemplate::Yes => Move::Answer(Answer::Yes),
                    MoveTemplate::No => Move::Answer(Answer::No),
                    MoveTemplate::DontKnow => Move::Answer(Answer::DontKnow),
                    MoveTemplate::Greet => Move::Greet,
                    MoveTemplate::Quit => Move::Quit,
                })
            })
            .collect()
    }
}
