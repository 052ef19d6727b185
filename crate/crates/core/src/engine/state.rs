use std::collections::BTreeSet;

use crate::ddd::{Goal, PlanItem};
use crate::directory::{DirectoryKb, Entity, Query, ResultSet};
use crate::semantics::{Individual, Question};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalStatus {
    Fresh,
    InProgress,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveGoal {
    pub goal: Goal,
    /// Index of the next plan item; `goal.plan[cursor..]` remains.
    pub(crate) cursor: usize,
    pub status: GoalStatus,
    /// How many times this goal has been resolved in the session.
    pub resolutions: u32,
}

impl ActiveGoal {
    pub fn new(goal: Goal) -> Self {
        Self { goal, cursor: 0, status: GoalStatus::Fresh, resolutions: 0 }
    }

    pub fn remaining_plan(&self) -> &[PlanItem] {
        &self.goal.plan[self.cursor.min(self.goal.plan.len())..]
    }

    pub(crate) fn current(&self) -> Option<&PlanItem> {
        self.goal.plan.get(self.cursor)
    }

    pub fn name(&self) -> &str {
        self.goal.name()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemAction {
    ReportCount(usize),
    AskQuestion(Question),
    ReportValue {
        predicate: String,
        entity: Entity,
        value: Individual,
        /// The goal was resolved before in this session.
        repeated: bool,
    },
    ReportAlternativeValues {
        predicate: String,
        values: Vec<(Entity, Individual)>,
    },
    ResumeGoal(String),
    ReportNoMatches,
    Acknowledge,
    NotUnderstood,
}

/// Per-session dialogue state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InformationState {
    /// Bottom entry is the top-level perform goal.
    pub goal_stack: Vec<ActiveGoal>,
    pub qud: Option<Question>,
    /// Committed search constraints, shared by every goal in the session.
    pub constraints: Query,
    /// Features the user declined to supply.
    pub declined: BTreeSet<String>,
    /// The current candidate set; equals a search over `constraints`.
    pub alternatives: Option<ResultSet>,
    /// System actions not yet handed to generation.
    pub agenda: Vec<SystemAction>,
    pub last_count: Option<usize>,
    pub ended: bool,
}

impl InformationState {
    pub fn take_agenda(&mut self) -> Vec<SystemAction> {
        std::mem::take(&mut self.agenda)
    }

    /// Topmost goal other than the top-level perform goal.
    pub fn active_goal(&self) -> Option<&ActiveGoal> {
        self.goal_stack.iter().skip(1).last()
    }

    pub(crate) fn active_goal_mut(&mut self) -> Option<&mut ActiveGoal> {
        self.goal_stack.iter_mut().skip(1).last()
    }

    /// Checks the state invariants against `kb`, returning a description of
    /// the first violation.
    pub fn check_invariants(&self, kb: &DirectoryKb) -> Result<(), String> {
        if let Some(p) = self.declined.iter().find(|p| self.constraints.contains(p)) {
            return Err(format!("`{p}` is both declined and constrained"));
        }
        if let Some(alts) = &self.alternatives {
            let fresh = kb.search(&self.constraints).map_err(|e| e.to_string())?;
            if &fresh != alts {
                return Err(format!(
                    "alternatives hold {} entities but the constraints match {}",
                    alts.count(),
                    fresh.count()
                ));
            }
        }
        for g in &self.goal_stack {
            if g.cursor > g.goal.plan.len() {
                return Err(format!("plan cursor of `{}` out of range", g.name()));
            }
        }
        Ok(())
    }
}
