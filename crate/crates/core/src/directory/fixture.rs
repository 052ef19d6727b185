use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::{DirectoryError, DirectoryKb, Entity};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read fixture: {0}")]
    Io(#[from] io::Error),
    #[error("fixture line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Parses JSON-lines fixture text. Blank lines are skipped.
pub fn parse_fixture(text: &str) -> Result<DirectoryKb, FixtureError> {
    let mut entities = Vec::new();
    let mut first_line = std::collections::HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let entity: Entity = serde_json::from_str(line).map_err(|e| format_err(line_no, e.to_string()))?;
        if let Some(prev) = first_line.insert(entity.id.clone(), line_no) {
            return Err(format_err(line_no, format!("duplicate id `{}` (first seen on line {prev})", entity.id)));
        }
        if entity.phonenumber.trim().is_empty() {
            return Err(format_err(line_no, format!("entity `{}` has an empty phonenumber", entity.id)));
        }
        entities.push(entity);
    }
    DirectoryKb::new(entities).map_err(|e| {
        let line = match &e {
            DirectoryError::DuplicateId(id) | DirectoryError::EmptyPhoneNumber(id) => {
                first_line.get(id).copied().unwrap_or(0)
            }
            _ => 0,
        };
        format_err(line, e.to_string())
    })
}

fn format_err(line: usize, message: String) -> FixtureError {
    FixtureError::Format { line, message }
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<DirectoryKb, FixtureError> {
    let text = std::fs::read_to_string(path)?;
    parse_fixture(&text)
}

/// Writes the knowledge base in fixture format, one entity per line.
pub fn write_fixture(kb: &DirectoryKb, mut out: impl Write) -> io::Result<()> {
    for e in kb.entities() {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::tests::F1;
    use super::*;

    #[test]
    fn shipped_small_fixture_has_seven_records() {
        let rows = F1.lines().filter(|l| !l.trim().is_empty()).count();
        assert_eq!(rows, 7);
        assert_eq!(parse_fixture(F1).unwrap().len(), rows);
    }

    #[test]
    fn empty_file_is_empty_kb() {
        assert!(parse_fixture("").unwrap().is_empty());
        assert!(parse_fixture("\n\n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_reports_line() {
        let first = F1.lines().next().unwrap();
        let text = format!("{first}\n{first}\n");
        match parse_fixture(&text) {
            Err(FixtureError::Format { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("p01"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_json_reports_line() {
        let text = format!("{}\n{{\"id\": 3}}\n", F1.lines().next().unwrap());
        assert!(matches!(parse_fixture(&text), Err(FixtureError::Format { line: 2, .. })));
    }

    #[test]
    fn load_from_disk_and_write_back() {
        let kb = parse_fixture(F1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.jsonl");
        let mut buf = Vec::new();
        write_fixture(&kb, &mut buf).unwrap();
        std::fs::write(&path, &buf).unwrap();
        assert_eq!(load_fixture(&path).unwrap(), kb);
        assert!(matches!(load_fixture(dir.path().join("missing.jsonl")), Err(FixtureError::Io(_))));
    }
}
