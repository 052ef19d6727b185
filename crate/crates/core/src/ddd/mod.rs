//! Dialogue Domain Descriptions.
//!
//! A DDD declares the goals a user can pursue, the plans that resolve them
//! and the parameters the system collects to search for an individual. The
//! engine consumes these values read-only; nothing in here knows about any
//! particular domain.

mod parse;
mod validate;

pub use parse::parse_ddd;
pub use validate::validate;

use std::fmt;

use thiserror::Error;

/// The two question shapes a plan item may refer to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QuestionSpec {
    /// `type="goal"`: which goal does the user want to pursue?
    Goal,
    /// `type="wh_question" predicate="..."`.
    Wh(String),
}

impl QuestionSpec {
    pub fn predicate(&self) -> Option<&str> {
        match self {
            QuestionSpec::Goal => None,
            QuestionSpec::Wh(p) => Some(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanItem {
    ForgetAll,
    Findout(QuestionSpec),
    InvokeServiceQuery(QuestionSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoalType {
    Perform,
    Resolve,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GoalTarget {
    /// Action name of a perform goal, e.g. `top`.
    Action(String),
    /// Question resolved by a resolve goal.
    Question(QuestionSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub goal_type: GoalType,
    pub target: GoalTarget,
    pub plan: Vec<PlanItem>,
    pub max_answers: Option<u32>,
    pub alternatives_predicate: Option<String>,
}

impl Goal {
    /// The name a `Request` move uses to refer to this goal: the action of a
    /// perform goal, or the predicate of a resolve goal.
    pub fn name(&self) -> &str {
        match &self.target {
            GoalTarget::Action(a) => a,
            GoalTarget::Question(QuestionSpec::Wh(p)) => p,
            GoalTarget::Question(QuestionSpec::Goal) => "goal",
        }
    }

    pub fn is_top(&self) -> bool {
        self.goal_type == GoalType::Perform && matches!(&self.target, GoalTarget::Action(a) if a == "top")
    }

    /// Predicate this goal resolves, for resolve goals over wh-questions.
    pub fn resolved_predicate(&self) -> Option<&str> {
        match (&self.goal_type, &self.target) {
            (GoalType::Resolve, GoalTarget::Question(q)) => q.predicate(),
            _ => None,
        }
    }

    /// `(max_answers, alternatives_predicate)` when alternatives questions are enabled.
    pub fn alternatives(&self) -> Option<(u32, &str)> {
        match (self.max_answers, self.alternatives_predicate.as_deref()) {
            (Some(n), Some(p)) => Some((n, p)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AskFeature {
    pub predicate: String,
    pub kpq: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterSource {
    Service,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametersSpec {
    pub subject_predicate: String,
    pub source: ParameterSource,
    pub incremental: bool,
    pub ask_features: Vec<AskFeature>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub goals: Vec<Goal>,
    pub parameters: Vec<ParametersSpec>,
}

impl Domain {
    pub fn lookup_parameters(&self, predicate: &str) -> Option<&ParametersSpec> {
        self.parameters.iter().find(|p| p.subject_predicate == predicate)
    }

    pub fn top_goal(&self) -> Option<&Goal> {
        self.goals.iter().find(|g| g.is_top())
    }

    pub fn goal(&self, name: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.name() == name)
    }

    /// Resolve goal for `predicate` that has alternatives questions enabled.
    pub fn alternatives_goal(&self, predicate: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.resolved_predicate() == Some(predicate) && g.alternatives().is_some())
    }

    /// Predicates declared through parameters: subjects and their ask-features.
    pub fn parameter_predicates(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().flat_map(|p| {
            std::iter::once(p.subject_predicate.as_str()).chain(p.ask_features.iter().map(|f| f.predicate.as_str()))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    /// Element path such as `/domain/goal[3]/plan/findout[1]`.
    pub location: String,
}

impl Diagnostic {
    pub fn error(code: &'static str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, code, message: message.into(), location: location.into() }
    }

    pub fn warning(code: &'static str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, code, message: message.into(), location: location.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum DddError {
    #[error("malformed XML at byte {position}: {message}")]
    XmlSyntax { position: u64, message: String },
    #[error("schema error: {0}")]
    Schema(Diagnostic),
}
