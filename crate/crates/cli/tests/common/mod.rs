#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use negotia_core::session::SessionStore;
use negotia_dm::http::AppState;
use negotia_dm::Registry;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn ddd() -> PathBuf {
    data_dir().join("domains/phone_directory.xml")
}

pub fn fixture(name: &str) -> PathBuf {
    data_dir().join("fixtures").join(name)
}

pub fn app_state() -> AppState {
    let registry = Registry::load(&ddd(), &[fixture("f1_small.jsonl"), fixture("f2_large.jsonl")]).unwrap();
    AppState { store: Arc::new(SessionStore::default()), registry: Arc::new(registry) }
}
