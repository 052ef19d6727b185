use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use super::generate::{check_template, ENTITY_FIELDS, TEMPLATE_SLOTS};
use super::pattern::tokenize;
use super::NlError;
use crate::semantics::{Individual, Sort, SortTable, GOAL_PREDICATE};

/// Surface forms of one predicate or goal.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateForms {
    /// Noun phrase, as in "Do you know the <noun>?".
    pub noun: Option<String>,
    /// Shorter noun used when repeating an answer.
    pub short_noun: Option<String>,
    /// Direct question text.
    pub wh: Option<String>,
    /// How a value is spoken, e.g. `{value} years`.
    pub value: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    sorts: BTreeMap<String, Sort>,
    #[serde(default)]
    entities: BTreeMap<Sort, Vec<String>>,
    #[serde(default)]
    goal_triggers: BTreeMap<String, String>,
    number_words: BTreeMap<u32, String>,
    predicates: BTreeMap<String, PredicateForms>,
    templates: BTreeMap<String, String>,
}

/// Domain vocabulary and output templates.
#[derive(Debug, Clone)]
pub struct Lexicon {
    sorts: SortTable,
    entities: BTreeMap<Sort, Vec<(Vec<String>, String)>>,
    goal_triggers: BTreeMap<String, String>,
    number_words: BTreeMap<u32, String>,
    word_numbers: BTreeMap<String, u32>,
    predicates: BTreeMap<String, PredicateForms>,
    templates: BTreeMap<String, String>,
}

impl Lexicon {
    pub fn from_json(text: &str) -> Result<Self, NlError> {
        let file: LexiconFile =
            serde_json::from_str(text).map_err(|source| NlError::Json { path: "lexicon".into(), source })?;
        Self::build(file)
    }

    fn build(file: LexiconFile) -> Result<Self, NlError> {
        let bad = |m: String| Err(NlError::Lexicon(m));
        if file.sorts.contains_key(GOAL_PREDICATE) {
            return bad(format!("`{GOAL_PREDICATE}` is reserved"));
        }

        let mut entities = BTreeMap::new();
        for (sort, forms) in file.entities {
            if sort.is_integer() {
                return bad(format!("sort `{sort}` is numeric and takes no entity list"));
            }
            let mut seen = BTreeSet::new();
            let mut list = Vec::with_capacity(forms.len());
            for form in forms {
                let tokens = tokenize(&form);
                if tokens.is_empty() {
                    return bad(format!("empty {sort} entity"));
                }
                if !seen.insert(tokens.clone()) {
                    return bad(format!("duplicate {sort} entity `{form}`"));
                }
                list.push((tokens, form));
            }
            // Longer surface forms first so "Anna Andersson" wins over "Anna".
            list.sort_by_key(|e| std::cmp::Reverse(e.0.len()));
            entities.insert(sort, list);
        }

        let mut word_numbers = BTreeMap::new();
        for (n, word) in &file.number_words {
            if *n == 0 || word.trim().is_empty() || word.chars().any(|c| c.is_ascii_digit()) {
                return bad(format!("invalid number word {n} = `{word}`"));
            }
            if word_numbers.insert(word.to_lowercase(), *n).is_some() {
                return bad(format!("number word `{word}` used twice"));
            }
        }

        for (key, template) in &file.templates {
            let slots: &[&str] = if key == "entity" {
                &ENTITY_FIELDS
            } else {
                match TEMPLATE_SLOTS.iter().find(|(k, _)| k == key) {
                    Some((_, slots)) => slots,
                    None => return bad(format!("unknown template `{key}`")),
                }
            };
            check_template(template, slots)?;
        }
        for (name, forms) in &file.predicates {
            if let Some(v) = &forms.value {
                check_template(v, &["value"])?;
            }
            if name != GOAL_PREDICATE && !file.sorts.contains_key(name) {
                return bad(format!("forms given for undeclared predicate `{name}`"));
            }
        }

        let mut goal_triggers = BTreeMap::new();
        for (phrase, goal) in file.goal_triggers {
            if tokenize(&phrase).is_empty() {
                return bad("empty goal trigger".into());
            }
            goal_triggers.insert(phrase, goal);
        }

        Ok(Self {
            sorts: file.sorts,
            entities,
            goal_triggers,
            number_words: file.number_words,
            word_numbers,
            predicates: file.predicates,
            templates: file.templates,
        })
    }

    /// Predicate sorts, as needed by the engine.
    pub fn sorts(&self) -> &SortTable {
        &self.sorts
    }

    pub fn sort_of(&self, predicate: &str) -> Option<Sort> {
        if predicate == GOAL_PREDICATE {
            return Some(Sort::GoalReference);
        }
        self.sorts.get(predicate).copied()
    }

    pub fn forms(&self, predicate: &str) -> Option<&PredicateForms> {
        self.predicates.get(predicate)
    }

    pub fn template(&self, key: &str) -> Result<&str, NlError> {
        self.templates.get(key).map(String::as_str).ok_or_else(|| NlError::MissingTemplate(key.to_owned()))
    }

    pub fn goal_triggers(&self) -> impl Iterator<Item = (&str, &str)> {
        self.goal_triggers.iter().map(|(p, g)| (p.as_str(), g.as_str()))
    }

    /// Tokenized surface forms of `sort`, longest first.
    pub(crate) fn entity_forms(&self, sort: Sort) -> &[(Vec<String>, String)] {
        self.entities.get(&sort).map(Vec::as_slice).unwrap_or_default()
    }

    /// Every entity surface form, for listing and tests.
    pub fn entities(&self, sort: Sort) -> impl Iterator<Item = &str> {
        self.entity_forms(sort).iter().map(|(_, s)| s.as_str())
    }

    /// The individual named by `surface`, if the lexicon knows it.
    pub fn entity(&self, sort: Sort, surface: &str) -> Option<Individual> {
        let tokens = tokenize(surface);
        self.entity_forms(sort)
            .iter()
            .find(|(t, _)| *t == tokens)
            .and_then(|(_, s)| Individual::text(sort, s.clone()).ok())
    }

    /// Spells small numbers as words and larger ones as digits.
    pub fn render_number(&self, n: usize) -> String {
        u32::try_from(n).ok().and_then(|k| self.number_words.get(&k)).cloned().unwrap_or_else(|| n.to_string())
    }

    /// Reads a token as a number: digits or a number word.
    pub fn parse_number(&self, token: &str) -> Option<i64> {
        if !token.is_empty() && token.chars().all(|c| c.is_ascii_digit()) {
            return token.parse().ok();
        }
        self.word_numbers.get(token).map(|n| i64::from(*n))
    }
}
