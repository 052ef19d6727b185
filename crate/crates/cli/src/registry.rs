use std::path::Path;
use std::sync::Arc;

use negotia_core::session::{DomainBundle, LoadError};

/// Domain bundles a server can start sessions on, one per fixture.
#[derive(Debug, Default)]
pub struct Registry {
    entries: Vec<Entry>,
}

#[derive(Debug)]
struct Entry {
    domain_names: Vec<String>,
    fixture_names: Vec<String>,
    bundle: Arc<DomainBundle>,
}

fn file_names(path: Option<&Path>) -> Vec<String> {
    let Some(path) = path else { return Vec::new() };
    [path.file_name(), path.file_stem()].into_iter().flatten().map(|s| s.to_string_lossy().into_owned()).collect()
}

impl Registry {
    /// Loads `ddd` once per fixture.
    pub fn load(ddd: &Path, fixtures: &[impl AsRef<Path>]) -> Result<Self, LoadError> {
        let mut registry = Self::default();
        for f in fixtures {
            registry.insert(Arc::new(DomainBundle::load(ddd, f.as_ref())?));
        }
        Ok(registry)
    }

    pub fn insert(&mut self, bundle: Arc<DomainBundle>) {
        let mut domain_names = file_names(bundle.ddd_path());
        domain_names.push(bundle.engine().domain().name.clone());
        let fixture_names = file_names(bundle.fixture_path());
        self.entries.push(Entry { domain_names, fixture_names, bundle });
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Bundle matching the requested domain and fixture names. Either may be
    /// left out; the first registered match wins. Names are DDD or fixture
    /// file names with or without extension, or the DDD's domain name.
    pub fn find(&self, domain: Option<&str>, fixture: Option<&str>) -> Option<Arc<DomainBundle>> {
        let fits = |names: &[String], want: Option<&str>| want.is_none_or(|w| names.iter().any(|n| n == w));
        self.entries
            .iter()
            .find(|e| fits(&e.domain_names, domain) && fits(&e.fixture_names, fixture))
            .map(|e| e.bundle.clone())
    }
}
