//! Phone-directory knowledge base: the backend behind `invoke_service_query`.

mod fixture;
mod generate;

pub use fixture::{load_fixture, parse_fixture, write_fixture, FixtureError};
pub use generate::{
    generate_large_fixture, REFERENCE_PROFILES, TARGET_CITY, TARGET_CITY_COUNT, TARGET_NAME, TARGET_NAME_COUNT,
};

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{Individual, Sort, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub person_name: String,
    pub person_city: String,
    pub person_street_name: String,
    pub street_number: String,
    pub age: u32,
    pub phonenumber: String,
}

/// Features a query may constrain.
pub const QUERYABLE_FEATURES: [(&str, Sort); 4] = [
    ("person_name", Sort::IndividualName),
    ("person_city", Sort::City),
    ("person_street_name", Sort::Street),
    ("age", Sort::IntegerAge),
];

/// Features that can be read back from an entity.
pub const PROJECTABLE_FEATURES: [(&str, Sort); 5] = [
    ("person_name", Sort::IndividualName),
    ("person_city", Sort::City),
    ("person_street_name", Sort::Street),
    ("age", Sort::IntegerAge),
    ("phonenumber", Sort::PhoneNumber),
];

/// Field names accepted by [`Entity::field_text`].
pub const ENTITY_FIELDS: [&str; 7] =
    ["id", "person_name", "person_city", "person_street_name", "street_number", "age", "phonenumber"];

pub fn is_queryable(predicate: &str) -> bool {
    QUERYABLE_FEATURES.iter().any(|(p, _)| *p == predicate)
}

impl Entity {
    /// Reads a feature as a semantic individual.
    pub fn feature(&self, predicate: &str) -> Option<Individual> {
        let (_, sort) = PROJECTABLE_FEATURES.iter().find(|(p, _)| *p == predicate)?;
        let ind = match predicate {
            "person_name" => Individual::text(*sort, &self.person_name),
            "person_city" => Individual::text(*sort, &self.person_city),
            "person_street_name" => Individual::text(*sort, &self.person_street_name),
            "age" => Individual::int(*sort, i64::from(self.age)),
            "phonenumber" => Individual::text(*sort, &self.phonenumber),
            _ => return None,
        };
        ind.ok()
    }

    /// Raw text of a field by name, including `street_number` and `id`.
    /// Used for filling description templates.
    pub fn field_text(&self, field: &str) -> Option<String> {
        Some(match field {
            "id" => self.id.clone(),
            "person_name" => self.person_name.clone(),
            "person_city" => self.person_city.clone(),
            "person_street_name" => self.person_street_name.clone(),
            "street_number" => self.street_number.clone(),
            "age" => self.age.to_string(),
            "phonenumber" => self.phonenumber.clone(),
            _ => return None,
        })
    }
}

/// Conjunction of feature constraints, at most one value per predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    constraints: BTreeMap<String, Individual>,
}

impl Query {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the constraint for `predicate`, returning the value it replaced.
    pub fn insert(&mut self, predicate: impl Into<String>, value: Individual) -> Option<Individual> {
        self.constraints.insert(predicate.into(), value)
    }

    pub fn remove(&mut self, predicate: &str) -> Option<Individual> {
        self.constraints.remove(predicate)
    }

    pub fn get(&self, predicate: &str) -> Option<&Individual> {
        self.constraints.get(predicate)
    }

    pub fn contains(&self, predicate: &str) -> bool {
        self.constraints.contains_key(predicate)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Individual)> {
        self.constraints.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn clear(&mut self) {
        self.constraints.clear();
    }
}

impl<K: Into<String>> FromIterator<(K, Individual)> for Query {
    fn from_iter<T: IntoIterator<Item = (K, Individual)>>(iter: T) -> Self {
        Self { constraints: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultSet {
    /// Matching entities ordered by id.
    pub matches: Vec<Entity>,
}

impl ResultSet {
    pub fn count(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DirectoryError {
    #[error("`{0}` is not an entity feature")]
    UnknownPredicate(String),
    #[error("constraint on `{predicate}` has a value of the wrong sort")]
    SortMismatch { predicate: String },
    #[error("duplicate entity id `{0}`")]
    DuplicateId(String),
    #[error("entity `{0}` has an empty phone number")]
    EmptyPhoneNumber(String),
}

/// Lower-cases and collapses runs of whitespace.
pub(crate) fn normalize(text: &str) -> String {
    text.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy)]
enum Field {
    Name,
    City,
    Street,
    Age,
}

enum Compiled {
    Text(Field, String),
    Age(i64),
}

impl Compiled {
    fn matches(&self, e: &Entity) -> bool {
        match self {
            Compiled::Text(field, want) => {
                let have = match field {
                    Field::Name => &e.person_name,
                    Field::City => &e.person_city,
                    Field::Street => &e.person_street_name,
                    Field::Age => unreachable!(),
                };
                normalize(have) == *want
            }
            Compiled::Age(n) => i64::from(e.age) == *n,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectoryKb {
    entities: Vec<Entity>,
}

impl DirectoryKb {
    /// Builds a knowledge base, ordering entities by id.
    pub fn new(mut entities: Vec<Entity>) -> Result<Self, DirectoryError> {
        let mut ids = HashSet::new();
        for e in &entities {
            if !ids.insert(e.id.as_str()) {
                return Err(DirectoryError::DuplicateId(e.id.clone()));
            }
            if e.phonenumber.trim().is_empty() {
                return Err(DirectoryError::EmptyPhoneNumber(e.id.clone()));
            }
        }
        entities.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Self { entities })
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.entities.binary_search_by(|e| e.id.as_str().cmp(id)).ok().map(|i| &self.entities[i])
    }

    /// All entities satisfying every constraint. Text features compare
    /// case-insensitively after whitespace normalization; age is exact.
    pub fn search(&self, query: &Query) -> Result<ResultSet, DirectoryError> {
        let compiled = query
            .iter()
            .map(|(pred, ind)| {
                let field = match pred {
                    "person_name" => Field::Name,
                    "person_city" => Field::City,
                    "person_street_name" => Field::Street,
                    "age" => Field::Age,
                    _ => return Err(DirectoryError::UnknownPredicate(pred.to_owned())),
                };
                match (field, ind.value()) {
                    (Field::Age, Value::Int(n)) => Ok(Compiled::Age(*n)),
                    (Field::Age, Value::Text(_)) | (_, Value::Int(_)) => {
                        Err(DirectoryError::SortMismatch { predicate: pred.to_owned() })
                    }
                    (f, Value::Text(t)) => Ok(Compiled::Text(f, normalize(t))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;

        let matches = self.entities.iter().filter(|e| compiled.iter().all(|c| c.matches(e))).cloned().collect();
        Ok(ResultSet { matches })
    }
}

/// Pairs each entity of `rs` with its value for `predicate`, in result order.
pub fn project(rs: &ResultSet, predicate: &str) -> Result<Vec<(Entity, Individual)>, DirectoryError> {
    if !PROJECTABLE_FEATURES.iter().any(|(p, _)| *p == predicate) {
        return Err(DirectoryError::UnknownPredicate(predicate.to_owned()));
    }
    Ok(rs
        .matches
        .iter()
        .map(|e| {
            let v = e.feature(predicate).expect("projectable feature");
            (e.clone(), v)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const F1: &str = include_str!("../../../../data/fixtures/f1_small.jsonl");

    fn f1() -> DirectoryKb {
        parse_fixture(F1).unwrap()
    }

    fn text(sort: Sort, s: &str) -> Individual {
        Individual::text(sort, s).unwrap()
    }

    fn anna_in_gothenburg() -> Query {
        [("person_name", text(Sort::IndividualName, "Anna Andersson")), ("person_city", text(Sort::City, "Gothenburg"))]
            .into_iter()
            .collect()
    }

    #[test]
    fn three_annas_in_gothenburg() {
        let rs = f1().search(&anna_in_gothenburg()).unwrap();
        assert_eq!(rs.count(), 3);
        let streets: Vec<_> =
            rs.matches.iter().map(|e| format!("{} {}", e.person_street_name, e.street_number)).collect();
        assert_eq!(streets, ["Olivedalsgatan 12", "Vasagatan 11", "Kompassgatan 10"]);
    }

    #[test]
    fn empty_query_matches_everything() {
        let kb = f1();
        assert_eq!(kb.search(&Query::new()).unwrap().count(), kb.len());
    }

    #[test]
    fn age_narrows_to_one() {
        let mut q = anna_in_gothenburg();
        q.insert("age", Individual::int(Sort::IntegerAge, 42).unwrap());
        let rs = f1().search(&q).unwrap();
        assert_eq!(rs.count(), 1);
        assert_eq!(rs.matches[0].person_street_name, "Vasagatan");
        assert_eq!(rs.matches[0].street_number, "11");
    }

    #[test]
    fn matching_ignores_case_and_spacing() {
        let q: Query = [("person_name", text(Sort::IndividualName, "  anna   ANDERSSON "))].into_iter().collect();
        assert_eq!(f1().search(&q).unwrap().count(), 4);
    }

    #[test]
    fn unknown_and_mistyped_predicates() {
        let q: Query = [("street_number", text(Sort::Street, "12"))].into_iter().collect();
        assert_eq!(f1().search(&q), Err(DirectoryError::UnknownPredicate("street_number".into())));
        let q: Query = [("age", text(Sort::City, "old"))].into_iter().collect();
        assert!(matches!(f1().search(&q), Err(DirectoryError::SortMismatch { .. })));
    }

    #[test]
    fn project_ages() {
        let rs = f1().search(&anna_in_gothenburg()).unwrap();
        let ages: Vec<_> = project(&rs, "age").unwrap().into_iter().map(|(e, v)| (e.id, v.to_string())).collect();
        assert_eq!(
            ages,
            [("p01".to_string(), "77".to_string()), ("p02".into(), "42".into()), ("p03".into(), "31".into())]
        );
        assert!(project(&ResultSet::default(), "age").unwrap().is_empty());
        assert!(project(&rs, "shoe_size").is_err());
    }

    #[test]
    fn project_single_phone_number_from_file() {
        // Read the number straight out of the fixture text.
        let line = F1.lines().find(|l| l.contains("\"p02\"")).unwrap();
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let expected = record["phonenumber"].as_str().unwrap();

        let kb = f1();
        let rs = ResultSet { matches: vec![kb.get("p02").unwrap().clone()] };
        let pairs = project(&rs, "phonenumber").unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].1.to_string(), expected);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let e = f1().entities()[0].clone();
        assert_eq!(DirectoryKb::new(vec![e.clone(), e]), Err(DirectoryError::DuplicateId("p01".into())));
    }

    // Entity-by-entity filter written independently of `search`.
    fn brute_force(kb: &DirectoryKb, q: &Query) -> Vec<String> {
        let mut out = Vec::new();
        for e in kb.entities() {
            let mut ok = true;
            for (p, v) in q.iter() {
                let hit = match (p, v.value()) {
                    ("age", Value::Int(n)) => e.age as i64 == *n,
                    ("person_name", Value::Text(t)) => e.person_name.to_lowercase() == t.to_lowercase(),
                    ("person_city", Value::Text(t)) => e.person_city.to_lowercase() == t.to_lowercase(),
                    ("person_street_name", Value::Text(t)) => e.person_street_name.to_lowercase() == t.to_lowercase(),
                    _ => false,
                };
                ok &= hit;
            }
            if ok {
                out.push(e.id.clone());
            }
        }
        out
    }

    fn arb_kb() -> impl Strategy<Value = DirectoryKb> {
        prop::collection::vec((0usize..3, 0usize..3, 0usize..3, 20u32..23), 0..60).prop_map(|rows| {
            let names = ["Anna Andersson", "Erik Berg", "Eva Ek"];
            let cities = ["Gothenburg", "Lund", "Umeå"];
            let streets = ["Vasagatan", "Storgatan", "Ringvägen"];
            let entities = rows
                .into_iter()
                .enumerate()
                .map(|(i, (n, c, s, age))| Entity {
                    id: format!("e{i:03}"),
                    person_name: names[n].into(),
                    person_city: cities[c].into(),
                    person_street_name: streets[s].into(),
                    street_number: "1".into(),
                    age,
                    phonenumber: format!("000-{i}"),
                })
                .collect();
            DirectoryKb::new(entities).unwrap()
        })
    }

    fn arb_query() -> impl Strategy<Value = Query> {
        (
            prop::option::of(prop_oneof![Just("Anna Andersson"), Just("Erik Berg"), Just("Nobody")]),
            prop::option::of(prop_oneof![Just("Gothenburg"), Just("lund")]),
            prop::option::of(prop_oneof![Just("Vasagatan"), Just("STORGATAN")]),
            prop::option::of(20i64..24),
        )
            .prop_map(|(n, c, s, a)| {
                let mut q = Query::new();
                if let Some(n) = n {
                    q.insert("person_name", text(Sort::IndividualName, n));
                }
                if let Some(c) = c {
                    q.insert("person_city", text(Sort::City, c));
                }
                if let Some(s) = s {
                    q.insert("person_street_name", text(Sort::Street, s));
                }
                if let Some(a) = a {
                    q.insert("age", Individual::int(Sort::IntegerAge, a).unwrap());
                }
                q
            })
    }

    proptest! {
        #[test]
        fn search_matches_brute_force(kb in arb_kb(), q in arb_query()) {
            let ids: Vec<_> = kb.search(&q).unwrap().matches.into_iter().map(|e| e.id).collect();
            prop_assert_eq!(ids, brute_force(&kb, &q));
        }

        #[test]
        fn adding_constraints_never_grows(kb in arb_kb(), q in arb_query(), extra in arb_query()) {
            let mut refined = q.clone();
            for (p, v) in extra.iter() {
                if !refined.contains(p) {
                    refined.insert(p, v.clone());
                }
            }
            prop_assert!(kb.search(&refined).unwrap().count() <= kb.search(&q).unwrap().count());
        }

        #[test]
        fn projection_preserves_length(kb in arb_kb(), q in arb_query()) {
            let rs = kb.search(&q).unwrap();
            prop_assert_eq!(project(&rs, "phonenumber").unwrap().len(), rs.count());
        }
    }
}
