//! Semantic vocabulary shared by the engine and the language front end:
//! individuals, propositions, questions, answers and dialogue moves.
//!
//! A knowledge precondition question (KPQ) asks whether the hearer knows the
//! answer to an embedded wh-question. It behaves as a yes/no-question and as
//! the embedded wh-question at the same time, see [`resolves`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sort {
    IndividualName,
    City,
    Street,
    IntegerAge,
    PhoneNumber,
    GoalReference,
}

impl Sort {
    pub fn is_integer(self) -> bool {
        matches!(self, Sort::IntegerAge)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sort::IndividualName => "individual-name",
            Sort::City => "city",
            Sort::Street => "street",
            Sort::IntegerAge => "integer-age",
            Sort::PhoneNumber => "phone-number",
            Sort::GoalReference => "goal-reference",
        }
    }

    pub fn parse(s: &str) -> Option<Sort> {
        [Sort::IndividualName, Sort::City, Sort::Street, Sort::IntegerAge, Sort::PhoneNumber, Sort::GoalReference]
            .into_iter()
            .find(|sort| sort.as_str() == s)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sort of every predicate a domain mentions, keyed by predicate name.
pub type SortTable = BTreeMap<String, Sort>;

/// Name of the built-in predicate behind `findout type="goal"`.
pub const GOAL_PREDICATE: &str = "goal";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: String,
    pub sort: Sort,
}

impl Predicate {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Self { name: name.into(), sort }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Individual {
    sort: Sort,
    value: Value,
}

impl Individual {
    pub fn text(sort: Sort, surface: impl Into<String>) -> Result<Self, SemanticsError> {
        let surface = surface.into();
        if sort.is_integer() {
            return Err(SemanticsError::SortMismatch { expected: sort, found: surface });
        }
        if surface.trim().is_empty() {
            return Err(SemanticsError::EmptySurface(sort));
        }
        Ok(Self { sort, value: Value::Text(surface) })
    }

    pub fn int(sort: Sort, n: i64) -> Result<Self, SemanticsError> {
        if !sort.is_integer() {
            return Err(SemanticsError::SortMismatch { expected: sort, found: n.to_string() });
        }
        Ok(Self { sort, value: Value::Int(n) })
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn value(&self) -> &Value {
        &self.value
    }
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proposition {
    predicate: Predicate,
    value: Individual,
    polarity: Polarity,
}

impl Proposition {
    pub fn new(predicate: Predicate, value: Individual, polarity: Polarity) -> Result<Self, SemanticsError> {
        if predicate.sort != value.sort() {
            return Err(SemanticsError::SortMismatch { expected: predicate.sort, found: value.to_string() });
        }
        Ok(Self { predicate, value, polarity })
    }

    pub fn positive(predicate: Predicate, value: Individual) -> Result<Self, SemanticsError> {
        Self::new(predicate, value, Polarity::Positive)
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn value(&self) -> &Individual {
        &self.value
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WhQuestion {
    pub predicate: Predicate,
}

impl WhQuestion {
    pub fn new(predicate: Predicate) -> Self {
        Self { predicate }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Question {
    Wh(WhQuestion),
    YesNo(Proposition),
    /// "Do you know ...?" over an embedded wh-question. Nesting depth is one
    /// by construction.
    Kpq(WhQuestion),
}

impl Question {
    pub fn wh(predicate: Predicate) -> Self {
        Question::Wh(WhQuestion::new(predicate))
    }

    pub fn kpq(predicate: Predicate) -> Self {
        Question::Kpq(WhQuestion::new(predicate))
    }

    /// The predicate a content answer to this question would be about.
    pub fn predicate(&self) -> &Predicate {
        match self {
            Question::Wh(q) | Question::Kpq(q) => &q.predicate,
            Question::YesNo(p) => p.predicate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    DontKnow,
    Short(Individual),
    Prop(Proposition),
}

impl Answer {
    /// Answers that carry no constraint content.
    pub fn is_polar(&self) -> bool {
        matches!(self, Answer::Yes | Answer::No | Answer::DontKnow)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    Request(String),
    Ask(Question),
    Answer(Answer),
    Greet,
    Quit,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("value {found:?} does not fit sort {expected}")]
    SortMismatch { expected: Sort, found: String },
    #[error("empty surface form for sort {0}")]
    EmptySurface(Sort),
    #[error("answer does not resolve the question")]
    NotResolving,
}

fn resolves_wh(answer: &Answer, q: &WhQuestion) -> bool {
    match answer {
        Answer::Short(ind) => ind.sort() == q.predicate.sort,
        Answer::Prop(p) => p.predicate().name == q.predicate.name,
        Answer::DontKnow => true,
        Answer::Yes | Answer::No => false,
    }
}

/// Whether `answer` is a relevant, resolving answer to `question`.
///
/// A KPQ is resolved by a yes/no answer (to the overt question), by
/// "don't know", or by anything that resolves its embedded wh-question.
pub fn resolves(answer: &Answer, question: &Question) -> bool {
    match question {
        Question::Wh(q) => resolves_wh(answer, q),
        Question::YesNo(_) => matches!(answer, Answer::Yes | Answer::No | Answer::DontKnow),
        Question::Kpq(q) => answer.is_polar() || resolves_wh(answer, q),
    }
}

/// Integrates a resolving answer with its question, yielding the proposition
/// it contributes. Polar answers contribute nothing.
pub fn combine(answer: &Answer, question: &Question) -> Result<Option<Proposition>, SemanticsError> {
    if !resolves(answer, question) {
        return Err(SemanticsError::NotResolving);
    }
    match answer {
        Answer::Yes | Answer::No | Answer::DontKnow => Ok(None),
        Answer::Prop(p) => Ok(Some(p.clone())),
        Answer::Short(ind) => match question {
            Question::Wh(q) | Question::Kpq(q) => Ok(Some(Proposition::positive(q.predicate.clone(), ind.clone())?)),
            Question::YesNo(_) => Err(SemanticsError::NotResolving),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn city() -> Predicate {
        Predicate::new("person_city", Sort::City)
    }

    fn gothenburg() -> Individual {
        Individual::text(Sort::City, "Gothenburg").unwrap()
    }

    #[test]
    fn embedded_answer_resolves_kpq() {
        let a = Answer::Short(gothenburg());
        let q = Question::kpq(city());
        assert!(resolves(&a, &q));
        assert_eq!(combine(&a, &q).unwrap(), Some(Proposition::positive(city(), gothenburg()).unwrap()));
    }

    #[test]
    fn no_resolves_kpq_without_content() {
        let q = Question::kpq(city());
        assert!(resolves(&Answer::No, &q));
        assert_eq!(combine(&Answer::No, &Question::kpq(Predicate::new("person_street_name", Sort::Street))), Ok(None));
    }

    #[test]
    fn bare_yes_does_not_resolve_wh() {
        assert!(!resolves(&Answer::Yes, &Question::wh(city())));
        assert_eq!(combine(&Answer::Yes, &Question::wh(city())), Err(SemanticsError::NotResolving));
    }

    #[test]
    fn sort_mismatch_does_not_resolve() {
        let a = Answer::Short(Individual::int(Sort::IntegerAge, 42).unwrap());
        assert!(!resolves(&a, &Question::wh(city())));
    }

    #[test]
    fn proposition_answer_combines_to_itself() {
        let age = Predicate::new("age", Sort::IntegerAge);
        let p = Proposition::positive(age.clone(), Individual::int(Sort::IntegerAge, 42).unwrap()).unwrap();
        assert_eq!(combine(&Answer::Prop(p.clone()), &Question::wh(age)).unwrap(), Some(p));
    }

    #[test]
    fn dont_know_resolves_everything_without_content() {
        for q in [Question::wh(city()), Question::kpq(city())] {
            assert!(resolves(&Answer::DontKnow, &q));
            assert_eq!(combine(&Answer::DontKnow, &q), Ok(None));
        }
    }

    #[test]
    fn individual_invariants() {
        assert!(Individual::text(Sort::IntegerAge, "x").is_err());
        assert!(Individual::text(Sort::City, "  ").is_err());
        assert!(Individual::int(Sort::City, 3).is_err());
        assert!(Proposition::positive(city(), Individual::int(Sort::IntegerAge, 3).unwrap()).is_err());
    }

    #[test]
    fn yes_no_question() {
        let q = Question::YesNo(Proposition::positive(city(), gothenburg()).unwrap());
        assert!(resolves(&Answer::Yes, &q));
        assert!(!resolves(&Answer::Short(gothenburg()), &q));
    }

    fn arb_sort() -> impl Strategy<Value = Sort> {
        prop_oneof![
            Just(Sort::IndividualName),
            Just(Sort::City),
            Just(Sort::Street),
            Just(Sort::IntegerAge),
            Just(Sort::PhoneNumber),
        ]
    }

    fn arb_individual() -> impl Strategy<Value = Individual> {
        (arb_sort(), "[a-z]{1,6}", 0i64..120).prop_map(|(s, t, n)| {
            if s.is_integer() {
                Individual::int(s, n).unwrap()
            } else {
                Individual::text(s, t).unwrap()
            }
        })
    }

    fn arb_answer() -> impl Strategy<Value = Answer> {
        let names = prop_oneof![Just("person_city"), Just("person_name"), Just("age"), Just("x")];
        prop_oneof![
            Just(Answer::Yes),
            Just(Answer::No),
            Just(Answer::DontKnow),
            arb_individual().prop_map(Answer::Short),
            (arb_individual(), names).prop_map(|(ind, name)| {
                Answer::Prop(Proposition::positive(Predicate::new(name, ind.sort()), ind).unwrap())
            }),
        ]
    }

    proptest! {
        #[test]
        fn kpq_is_hybrid(a in arb_answer(), sort in arb_sort(), name in prop_oneof![Just("person_city"), Just("age")]) {
            let q = WhQuestion::new(Predicate::new(name, sort));
            let kpq = Question::Kpq(q.clone());
            let wh = Question::Wh(q);
            prop_assert_eq!(resolves(&a, &kpq), a.is_polar() || resolves(&a, &wh));
            prop_assert_eq!(combine(&a, &kpq).is_ok(), resolves(&a, &kpq));
            if !a.is_polar() && resolves(&a, &wh) {
                prop_assert_eq!(combine(&a, &kpq), combine(&a, &wh));
            }
        }
    }
}
