//! The dialogue engine must not know the phone directory. Everything
//! domain specific comes from the DDD, the lexicon and the fixture.

use std::path::Path;

const FORBIDDEN: [&str; 5] = ["phonenumber", "person_", "Gothenburg", "Anna", "Andersson"];

fn production_source(rel: &str) -> String {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src").join(rel)).unwrap();
    match text.find("#[cfg(test)]") {
        Some(i) => text[..i].to_owned(),
        None => text,
    }
}

#[test]
fn engine_and_ddd_sources_name_no_domain_terms() {
    for rel in ["engine/mod.rs", "engine/state.rs", "semantics.rs", "ddd/mod.rs", "ddd/parse.rs", "ddd/validate.rs"] {
        let src = production_source(rel);
        for word in FORBIDDEN {
            assert!(!src.contains(word), "{rel} mentions `{word}`");
        }
    }
}
