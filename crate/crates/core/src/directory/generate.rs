use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DirectoryKb, Entity};

pub const TARGET_NAME: &str = "Anna Andersson";
pub const TARGET_CITY: &str = "Gothenburg";
/// Entities named [`TARGET_NAME`].
pub const TARGET_NAME_COUNT: usize = 4345;
/// Of those, entities living in [`TARGET_CITY`].
pub const TARGET_CITY_COUNT: usize = 86;
const FILLER_COUNT: usize = 2000;

/// Street, number, age and phone of the three reference entities that also
/// appear in the small fixture.
pub const REFERENCE_PROFILES: [(&str, &str, u32, &str); 3] = [
    ("Olivedalsgatan", "12", 77, "031-412 77 01"),
    ("Vasagatan", "11", 42, "031-118 42 02"),
    ("Kompassgatan", "10", 31, "031-710 31 03"),
];

pub const OTHER_CITIES: [&str; 20] = [
    "Stockholm",
    "Malmö",
    "Uppsala",
    "Västerås",
    "Örebro",
    "Linköping",
    "Helsingborg",
    "Jönköping",
    "Norrköping",
    "Lund",
    "Umeå",
    "Gävle",
    "Borås",
    "Södertälje",
    "Eskilstuna",
    "Halmstad",
    "Växjö",
    "Karlstad",
    "Sundsvall",
    "Luleå",
];

pub const STREETS: [&str; 30] = [
    "Storgatan",
    "Kungsgatan",
    "Drottninggatan",
    "Linnégatan",
    "Skolgatan",
    "Järntorgsgatan",
    "Majorsgatan",
    "Övre Husargatan",
    "Karl Johansgatan",
    "Mariaplan",
    "Första Långgatan",
    "Andra Långgatan",
    "Tredje Långgatan",
    "Fjärde Långgatan",
    "Kastellgatan",
    "Prinsgatan",
    "Nordhemsgatan",
    "Bellmansgatan",
    "Kaptensgatan",
    "Stigbergsliden",
    "Masthuggstorget",
    "Repslagaregatan",
    "Ringvägen",
    "Parkvägen",
    "Skogsvägen",
    "Björkvägen",
    "Ekvägen",
    "Sjömansgatan",
    "Tallvägen",
    "Lindvägen",
];

pub const FIRST_NAMES: [&str; 15] = [
    "Anna", "Anne", "Erik", "Maria", "Karin", "Lars", "Johan", "Eva", "Per", "Kristina", "Mikael", "Lena", "Nils",
    "Sara", "Olof",
];

pub const LAST_NAMES: [&str; 10] = [
    "Andersson",
    "Johansson",
    "Karlsson",
    "Nilsson",
    "Eriksson",
    "Larsson",
    "Olsson",
    "Persson",
    "Svensson",
    "Gustafsson",
];

fn area_code(city: &str) -> String {
    match city {
        "Gothenburg" => "031".into(),
        "Stockholm" => "08".into(),
        "Malmö" => "040".into(),
        _ => {
            let idx = OTHER_CITIES.iter().position(|c| *c == city).unwrap_or(0);
            format!("0{}", 10 + 3 * idx)
        }
    }
}

struct Builder {
    rng: ChaCha8Rng,
    phones: HashSet<String>,
    rows: Vec<Entity>,
}

impl Builder {
    fn phone(&mut self, city: &str) -> String {
        let area = area_code(city);
        loop {
            let n: u32 = self.rng.random_range(100_000..10_000_000);
            let phone = format!("{area}-{:03} {:02} {:02}", n / 10_000, (n / 100) % 100, n % 100);
            if self.phones.insert(phone.clone()) {
                return phone;
            }
        }
    }

    fn street_number(&mut self) -> String {
        let n: u32 = self.rng.random_range(1..=60);
        if self.rng.random_bool(0.2) {
            let letter = *b"ABCD".choose(&mut self.rng).unwrap() as char;
            format!("{n}{letter}")
        } else {
            n.to_string()
        }
    }

    fn push(&mut self, name: &str, city: &str, avoid_reference: bool) {
        let street = STREETS.choose(&mut self.rng).unwrap().to_string();
        let age = loop {
            let a: u32 = self.rng.random_range(18..=95);
            if !(avoid_reference && REFERENCE_PROFILES.iter().any(|p| p.2 == a)) {
                break a;
            }
        };
        let street_number = self.street_number();
        let phonenumber = self.phone(city);
        self.rows.push(Entity {
            id: String::new(),
            person_name: name.into(),
            person_city: city.into(),
            person_street_name: street,
            street_number,
            age,
            phonenumber,
        });
    }
}

/// Deterministically builds the large directory used by the incremental
/// search dialogues: exactly [`TARGET_NAME_COUNT`] entities named
/// [`TARGET_NAME`], [`TARGET_CITY_COUNT`] of them in [`TARGET_CITY`]. Three of
/// the latter are the [`REFERENCE_PROFILES`]; the others never share their
/// street or age, so a street or age answer still singles one out.
pub fn generate_large_fixture(seed: u64) -> DirectoryKb {
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        phones: REFERENCE_PROFILES.iter().map(|p| p.3.to_string()).collect(),
        rows: Vec::new(),
    };

    for _ in REFERENCE_PROFILES.len()..TARGET_CITY_COUNT {
        b.push(TARGET_NAME, TARGET_CITY, true);
    }
    for _ in TARGET_CITY_COUNT..TARGET_NAME_COUNT {
        let city = *OTHER_CITIES.choose(&mut b.rng).unwrap();
        b.push(TARGET_NAME, city, false);
    }
    let others: Vec<String> = FIRST_NAMES
        .iter()
        .flat_map(|f| LAST_NAMES.iter().map(move |l| format!("{f} {l}")))
        .filter(|n| n != TARGET_NAME)
        .collect();
    for _ in 0..FILLER_COUNT {
        let name = others.choose(&mut b.rng).unwrap().clone();
        let city = if b.rng.random_bool(0.25) { TARGET_CITY } else { *OTHER_CITIES.choose(&mut b.rng).unwrap() };
        b.push(&name, city, false);
    }

    let mut rows = std::mem::take(&mut b.rows);
    rows.shuffle(&mut b.rng);

    let reference = REFERENCE_PROFILES.iter().map(|(street, number, age, phone)| Entity {
        id: String::new(),
        person_name: TARGET_NAME.into(),
        person_city: TARGET_CITY.into(),
        person_street_name: (*street).into(),
        street_number: (*number).into(),
        age: *age,
        phonenumber: (*phone).into(),
    });
    let entities = reference
        .chain(rows)
        .enumerate()
        .map(|(i, mut e)| {
            e.id = format!("f2-{:05}", i + 1);
            e
        })
        .collect();
    DirectoryKb::new(entities).expect("generated ids and phone numbers are unique")
}

#[cfg(test)]
mod tests {
    use super::super::tests::F1;
    use super::super::{parse_fixture, Query};
    use super::*;
    use crate::semantics::{Individual, Sort};

    fn count(kb: &DirectoryKb, pairs: &[(&str, Individual)]) -> usize {
        let q: Query = pairs.iter().cloned().collect();
        kb.search(&q).unwrap().count()
    }

    fn name() -> (&'static str, Individual) {
        ("person_name", Individual::text(Sort::IndividualName, TARGET_NAME).unwrap())
    }

    fn city() -> (&'static str, Individual) {
        ("person_city", Individual::text(Sort::City, TARGET_CITY).unwrap())
    }

    #[test]
    fn reproduces_target_counts() {
        let kb = generate_large_fixture(0);
        assert_eq!(count(&kb, &[name()]), 4345);
        assert_eq!(count(&kb, &[name(), city()]), 86);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_large_fixture(0), generate_large_fixture(0));
        assert_ne!(generate_large_fixture(0), generate_large_fixture(1));
        let other = generate_large_fixture(7);
        assert_eq!(count(&other, &[name()]), 4345);
        assert_eq!(count(&other, &[name(), city()]), 86);
    }

    #[test]
    fn reference_profiles_stay_unique() {
        let kb = generate_large_fixture(0);
        for (street, _, age, phone) in REFERENCE_PROFILES {
            let by_age = [name(), city(), ("age", Individual::int(Sort::IntegerAge, age as i64).unwrap())];
            let rs = kb.search(&by_age.into_iter().collect()).unwrap();
            assert_eq!(rs.count(), 1);
            assert_eq!(rs.matches[0].phonenumber, phone);
            let by_street = [name(), city(), ("person_street_name", Individual::text(Sort::Street, street).unwrap())];
            assert_eq!(count(&kb, &by_street), 1);
        }
    }

    #[test]
    fn reference_profiles_match_small_fixture() {
        let f1 = parse_fixture(F1).unwrap();
        for (i, (street, number, age, phone)) in REFERENCE_PROFILES.iter().enumerate() {
            let e = &f1.entities()[i];
            assert_eq!(
                (e.person_street_name.as_str(), e.street_number.as_str(), e.age, e.phonenumber.as_str()),
                (*street, *number, *age, *phone)
            );
        }
    }

    #[test]
    fn phone_numbers_distinct() {
        let kb = generate_large_fixture(0);
        let phones: HashSet<_> = kb.entities().iter().map(|e| e.phonenumber.as_str()).collect();
        assert_eq!(phones.len(), kb.len());
    }
}
