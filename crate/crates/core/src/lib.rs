//! Issue-based dialogue management driven by declarative domain
//! descriptions.
//!
//! - [`ddd`] parses and validates Dialogue Domain Descriptions (XML).
//! - [`semantics`] holds questions, answers, moves and the resolution rules.
//! - [`directory`] is the phone-directory knowledge base and its fixtures.
//! - [`engine`] runs the information-state update rules.
//! - [`nl`] maps text to moves and actions to text.
//! - [`session`] ties them into sessions, a store and a script runner.

pub mod ddd;
pub mod directory;
pub mod engine;
pub mod nl;
pub mod semantics;
pub mod session;

pub use ddd::{parse_ddd, validate, DddError, Diagnostic, Domain, Severity};
pub use directory::{generate_large_fixture, load_fixture, DirectoryKb, Entity, Query, ResultSet};
pub use engine::{Engine, EngineError, InformationState, SystemAction};
pub use nl::{NlError, NlFrontend};
pub use semantics::{Answer, Individual, Move, Predicate, Proposition, Question, Sort, WhQuestion};
pub use session::{
    run_script, run_script_file, ConformanceReport, DomainBundle, LoadError, Reply, Session, SessionError,
    SessionStore, SessionView, StateSummary,
};
