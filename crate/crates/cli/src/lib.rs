//! Front ends for the dialogue manager: an HTTP chat service, a line REPL
//! and a conformance runner.

pub mod http;
pub mod registry;
pub mod repl;

pub use registry::Registry;

use std::path::{Path, PathBuf};

use negotia_core::session::{run_script_file, ConformanceReport, ScriptError};

/// `*.script` files in `dir`, sorted by name.
pub fn script_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "script"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every script in `dir`. A script that cannot be loaded yields an
/// error entry instead of a report.
pub fn run_conformance(
    dir: &Path,
    default_ddd: Option<&Path>,
) -> std::io::Result<Vec<(PathBuf, Result<ConformanceReport, ScriptError>)>> {
    Ok(script_files(dir)?
        .into_iter()
        .map(|p| {
            let r = run_script_file(&p, default_ddd);
            (p, r)
        })
        .collect())
}
