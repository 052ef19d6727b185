//! Information-state update engine.
//!
//! The engine executes the plans of a [`Domain`] against a shared constraint
//! store. It knows nothing about any particular domain: predicates, goals
//! and questions all come from the loaded DDD and its sort table.
//!
//! Each user turn is a list of moves. All moves are integrated first; if
//! they changed the constraint store a single search follows, so a turn
//! carrying several constraints yields one count report.

mod state;

pub use state::{ActiveGoal, GoalStatus, InformationState, SystemAction};

use std::sync::Arc;

use thiserror::Error;

use crate::ddd::{self, Diagnostic, Domain, ParametersSpec, PlanItem, QuestionSpec, Severity};
use crate::directory::{self, project, DirectoryKb, PROJECTABLE_FEATURES};
use crate::semantics::{
    combine, resolves, Answer, Move, Polarity, Predicate, Proposition, Question, Sort, SortTable, WhQuestion,
    GOAL_PREDICATE,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("domain is not runnable: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidDomain(Vec<Diagnostic>),
    #[error("no sort declared for predicate `{0}`")]
    MissingSort(String),
    #[error("the directory service cannot answer or search `{0}`")]
    MissingServiceFeature(String),
    #[error("no alternatives have been established")]
    NoAlternativesEstablished,
    #[error("`{0}` is not an alternatives question in this domain")]
    NotAnAlternativesQuestion(String),
    #[error("`{0}` is not a searchable feature")]
    UnknownPredicate(String),
    #[error("negative constraints are not supported")]
    NegativeConstraint,
    #[error("no goal is active")]
    NoActiveGoal,
}

/// Output collected while integrating one user turn.
#[derive(Debug, Default)]
struct Turn {
    actions: Vec<SystemAction>,
    /// A goal was started by this turn; answers in the same turn are part of
    /// the request and are not acknowledged.
    started: bool,
    acknowledged: bool,
    changed: bool,
    need_question: bool,
    /// State right after a goal was started in this turn; a zero-match
    /// search rolls back to it instead of the turn's entry state.
    restart: Option<Snapshot>,
}

impl Turn {
    fn push(&mut self, a: SystemAction) {
        self.actions.push(a);
    }

    fn ack(&mut self) {
        if !self.started && !self.acknowledged {
            self.acknowledged = true;
            self.actions.push(SystemAction::Acknowledge);
        }
    }
}

/// State restored when a turn's constraints match nothing.
#[derive(Debug)]
struct Snapshot {
    goal_stack: Vec<ActiveGoal>,
    qud: Option<Question>,
    constraints: directory::Query,
    declined: std::collections::BTreeSet<String>,
    alternatives: Option<directory::ResultSet>,
    last_count: Option<usize>,
}

impl Snapshot {
    fn take(s: &InformationState) -> Self {
        Self {
            goal_stack: s.goal_stack.clone(),
            qud: s.qud.clone(),
            constraints: s.constraints.clone(),
            declined: s.declined.clone(),
            alternatives: s.alternatives.clone(),
            last_count: s.last_count,
        }
    }

    fn restore(self, s: &mut InformationState) {
        s.goal_stack = self.goal_stack;
        s.qud = self.qud;
        s.constraints = self.constraints;
        s.declined = self.declined;
        s.alternatives = self.alternatives;
        s.last_count = self.last_count;
    }
}

/// A loaded domain bound to its knowledge base. Cheap to clone and safe to
/// share between sessions.
#[derive(Debug, Clone)]
pub struct Engine {
    domain: Arc<Domain>,
    kb: Arc<DirectoryKb>,
    sorts: Arc<SortTable>,
}

impl Engine {
    pub fn new(domain: Arc<Domain>, kb: Arc<DirectoryKb>, sorts: Arc<SortTable>) -> Result<Self, EngineError> {
        let errors: Vec<_> = ddd::validate(&domain).into_iter().filter(|d| d.severity == Severity::Error).collect();
        if !errors.is_empty() {
            return Err(EngineError::InvalidDomain(errors));
        }
        let need_sort = |p: &str| {
            if sorts.contains_key(p) {
                Ok(())
            } else {
                Err(EngineError::MissingSort(p.to_owned()))
            }
        };
        for params in &domain.parameters {
            for f in &params.ask_features {
                need_sort(&f.predicate)?;
                if !directory::is_queryable(&f.predicate) {
                    return Err(EngineError::MissingServiceFeature(f.predicate.clone()));
                }
            }
        }
        for goal in &domain.goals {
            for item in &goal.plan {
                if let PlanItem::InvokeServiceQuery(QuestionSpec::Wh(p)) = item {
                    need_sort(p)?;
                    if !PROJECTABLE_FEATURES.iter().any(|(f, _)| f == p) {
                        return Err(EngineError::MissingServiceFeature(p.clone()));
                    }
                }
            }
        }
        Ok(Self { domain, kb, sorts })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kb(&self) -> &DirectoryKb {
        &self.kb
    }

    pub fn sorts(&self) -> &SortTable {
        &self.sorts
    }

    fn predicate(&self, name: &str) -> Predicate {
        if name == GOAL_PREDICATE {
            return Predicate::new(name, Sort::GoalReference);
        }
        let sort = self.sorts.get(name).copied().unwrap_or(Sort::IndividualName);
        Predicate::new(name, sort)
    }

    /// Starts a session: pushes the top goal and runs its plan up to the
    /// first question, which is left on the agenda.
    pub fn new_session(&self) -> InformationState {
        let mut state = InformationState::default();
        if let Some(top) = self.domain.top_goal() {
            state.goal_stack.push(ActiveGoal::new(top.clone()));
        }
        let mut turn = Turn::default();
        self.advance(&mut state, &mut turn);
        state.agenda = turn.actions;
        state
    }

    /// Pure form of [`Engine::integrate_turn`] for a single move.
    pub fn integrate(&self, state: &InformationState, mv: &Move) -> (InformationState, Vec<SystemAction>) {
        let mut next = state.clone();
        let actions = self.integrate_turn(&mut next, std::slice::from_ref(mv));
        (next, actions)
    }

    /// Integrates all moves of one user turn and returns the system's reply.
    pub fn integrate_turn(&self, state: &mut InformationState, moves: &[Move]) -> Vec<SystemAction> {
        if state.ended {
            return Vec::new();
        }
        if moves.is_empty() {
            return vec![SystemAction::NotUnderstood];
        }
        let snapshot = Snapshot::take(state);
        let mut turn = Turn::default();
        for mv in moves {
            match mv {
                Move::Greet => turn.push(SystemAction::Acknowledge),
                Move::Quit => {
                    state.ended = true;
                    state.qud = None;
                }
                Move::Request(goal) => self.start_goal(state, goal, &mut turn),
                Move::Answer(a) => self.integrate_answer(state, a, &mut turn),
                Move::Ask(Question::Wh(q)) => {
                    if self.alternatives_inner(state, q, &mut turn).is_err() {
                        turn.push(SystemAction::NotUnderstood);
                    }
                }
                Move::Ask(_) => turn.push(SystemAction::NotUnderstood),
            }
        }
        self.conclude(state, &mut turn, snapshot);
        turn.actions
    }

    /// Integrates an answer against the question under discussion.
    pub fn handle_answer(&self, state: &mut InformationState, answer: &Answer) -> Vec<SystemAction> {
        let snapshot = Snapshot::take(state);
        let mut turn = Turn::default();
        self.integrate_answer(state, answer, &mut turn);
        self.conclude(state, &mut turn, snapshot);
        turn.actions
    }

    /// Re-runs the search over the current constraints and decides what to
    /// say about the result.
    pub fn refine(&self, state: &mut InformationState) -> Vec<SystemAction> {
        let snapshot = Snapshot::take(state);
        let mut turn = Turn { changed: true, ..Turn::default() };
        self.conclude(state, &mut turn, snapshot);
        turn.actions
    }

    /// Replaces (or adds) the constraint for the proposition's predicate,
    /// re-opening a resolved goal if needed, then refines.
    pub fn revise(&self, state: &mut InformationState, prop: &Proposition) -> Result<Vec<SystemAction>, EngineError> {
        let snapshot = Snapshot::take(state);
        let mut turn = Turn::default();
        self.revise_inner(state, prop, &mut turn)?;
        self.conclude(state, &mut turn, snapshot);
        Ok(turn.actions)
    }

    /// Answers a user question about every member of the current candidate
    /// set, when the domain enables it and the set is small enough.
    pub fn answer_alternatives(
        &self,
        state: &mut InformationState,
        question: &WhQuestion,
    ) -> Result<Vec<SystemAction>, EngineError> {
        let mut turn = Turn::default();
        self.alternatives_inner(state, question, &mut turn)?;
        Ok(turn.actions)
    }

    /// First feature of the active findout that is neither known nor
    /// declined, as a KPQ when the feature is flagged `kpq`.
    pub fn select_next_question(&self, state: &InformationState) -> Option<Question> {
        let goal = state.active_goal()?;
        if goal.status == GoalStatus::Resolved {
            return None;
        }
        let PlanItem::Findout(QuestionSpec::Wh(p)) = goal.current()? else {
            return None;
        };
        let open = |name: &str| !state.constraints.contains(name) && !state.declined.contains(name);
        match self.domain.lookup_parameters(p) {
            Some(params) => params.ask_features.iter().find(|f| open(&f.predicate)).map(|f| {
                let pred = self.predicate(&f.predicate);
                if f.kpq {
                    Question::kpq(pred)
                } else {
                    Question::wh(pred)
                }
            }),
            None if open(p) => Some(Question::wh(self.predicate(p))),
            None => None,
        }
    }

    /// Returns to the goal below a just-resolved one.
    pub fn resume_outer_goal(&self, state: &mut InformationState) -> Vec<SystemAction> {
        let mut turn = Turn::default();
        self.resume_inner(state, &mut turn);
        turn.actions
    }

    fn conclude(&self, state: &mut InformationState, turn: &mut Turn, snapshot: Snapshot) {
        if state.ended {
            return;
        }
        if turn.changed {
            let snapshot = turn.restart.take().unwrap_or(snapshot);
            self.refine_inner(state, turn, snapshot);
        } else if turn.need_question {
            self.advance(state, turn);
        }
    }

    fn raise(&self, state: &mut InformationState, q: Question, turn: &mut Turn) {
        state.qud = Some(q.clone());
        turn.push(SystemAction::AskQuestion(q));
    }

    fn forget_all(&self, state: &mut InformationState) {
        state.constraints.clear();
        state.declined.clear();
        state.alternatives = None;
        state.last_count = None;
        state.qud = None;
    }

    fn subject_identified(&self, state: &InformationState, params: &ParametersSpec) -> bool {
        let unique = state.alternatives.as_ref().is_some_and(|rs| rs.count() == 1);
        unique && (params.incremental || self.select_next_question(state).is_none())
    }

    /// Executes plan items of the topmost goal until one needs the user.
    fn advance(&self, state: &mut InformationState, turn: &mut Turn) {
        loop {
            let Some(goal) = state.goal_stack.last_mut() else { return };
            if goal.status == GoalStatus::Resolved {
                return;
            }
            goal.status = GoalStatus::InProgress;
            let Some(item) = goal.current().cloned() else { return };
            match item {
                PlanItem::ForgetAll => {
                    goal.cursor += 1;
                    self.forget_all(state);
                }
                PlanItem::Findout(QuestionSpec::Goal) => {
                    let q = Question::wh(self.predicate(GOAL_PREDICATE));
                    self.raise(state, q, turn);
                    return;
                }
                PlanItem::Findout(QuestionSpec::Wh(p)) => {
                    let done = match self.domain.lookup_parameters(&p) {
                        Some(params) => self.subject_identified(state, params),
                        None => state.constraints.contains(&p),
                    };
                    if done {
                        if let Some(g) = state.goal_stack.last_mut() {
                            g.cursor += 1;
                        }
                        continue;
                    }
                    match self.select_next_question(state) {
                        Some(q) => self.raise(state, q, turn),
                        None => state.qud = None,
                    }
                    return;
                }
                PlanItem::InvokeServiceQuery(spec) => {
                    self.invoke_service_query(state, &spec, turn);
                    return;
                }
            }
        }
    }

    fn invoke_service_query(&self, state: &mut InformationState, spec: &QuestionSpec, turn: &mut Turn) {
        let QuestionSpec::Wh(p) = spec else { return };
        // Ambiguous results never reach the service; the findout before it
        // only completes on a unique match.
        let Some(entity) = state.alternatives.as_ref().filter(|rs| rs.count() == 1).map(|rs| rs.matches[0].clone())
        else {
            state.qud = None;
            return;
        };
        let Some(value) = entity.feature(p) else {
            turn.push(SystemAction::NotUnderstood);
            return;
        };
        let Some(goal) = state.goal_stack.last_mut() else { return };
        goal.cursor += 1;
        goal.status = GoalStatus::Resolved;
        let repeated = goal.resolutions > 0;
        goal.resolutions += 1;
        state.qud = None;
        turn.push(SystemAction::ReportValue { predicate: p.clone(), entity, value, repeated });

        if state.goal_stack.len() > 2 {
            state.goal_stack.pop();
            self.resume_inner(state, turn);
        }
    }

    fn resume_inner(&self, state: &mut InformationState, turn: &mut Turn) {
        let Some(outer) = state.active_goal() else { return };
        if outer.status != GoalStatus::InProgress {
            return;
        }
        turn.push(SystemAction::ResumeGoal(outer.name().to_owned()));
        if state.alternatives.as_ref().is_some_and(|rs| rs.count() == 1) {
            self.advance(state, turn);
            return;
        }
        if let Some(n) = state.last_count {
            turn.push(SystemAction::ReportCount(n));
        }
        match self.select_next_question(state) {
            Some(q) => self.raise(state, q, turn),
            None => state.qud = None,
        }
    }

    fn start_goal(&self, state: &mut InformationState, name: &str, turn: &mut Turn) {
        let Some(goal) = self.domain.goal(name).filter(|g| !g.is_top()) else {
            turn.push(SystemAction::NotUnderstood);
            return;
        };
        match state.active_goal() {
            Some(active) if active.status != GoalStatus::Resolved => {
                if active.name() != name {
                    state.goal_stack.push(ActiveGoal::new(goal.clone()));
                }
            }
            _ => {
                // A new issue: drop finished goals and start from a clean slate.
                state.goal_stack.truncate(1);
                self.forget_all(state);
                state.goal_stack.push(ActiveGoal::new(goal.clone()));
            }
        }
        if let Some(top) = state.goal_stack.first_mut() {
            if top.current() == Some(&PlanItem::Findout(QuestionSpec::Goal)) {
                top.cursor += 1;
            }
        }
        if state.qud.as_ref().is_some_and(|q| q.predicate().sort == Sort::GoalReference) {
            state.qud = None;
        }
        if let Some(g) = state.active_goal_mut() {
            g.status = GoalStatus::InProgress;
        }
        turn.started = true;
        turn.need_question = true;
        turn.restart = Some(Snapshot::take(state));
    }

    fn integrate_answer(&self, state: &mut InformationState, answer: &Answer, turn: &mut Turn) {
        let Some(qud) = state.qud.clone().filter(|q| resolves(answer, q)) else {
            // Not an answer to the current question: try it as a revision.
            let revised = self
                .answer_as_proposition(state, answer)
                .ok_or(EngineError::NoActiveGoal)
                .and_then(|p| self.revise_inner(state, &p, turn));
            if revised.is_err() {
                turn.push(SystemAction::NotUnderstood);
            }
            return;
        };

        if qud.predicate().sort == Sort::GoalReference {
            match combine(answer, &qud) {
                Ok(Some(p)) => self.start_goal(state, &p.value().to_string(), turn),
                _ => turn.push(SystemAction::NotUnderstood),
            }
            return;
        }

        match (&qud, answer) {
            (Question::Kpq(embedded), Answer::Yes) => {
                // Knows the answer but did not give it: ask the embedded question.
                turn.ack();
                self.raise(state, Question::Wh(embedded.clone()), turn);
            }
            (Question::Kpq(_) | Question::Wh(_), Answer::No | Answer::DontKnow) => {
                turn.ack();
                state.declined.insert(qud.predicate().name.clone());
                state.qud = None;
                turn.need_question = true;
            }
            (Question::Kpq(_) | Question::Wh(_), _) => match combine(answer, &qud) {
                Ok(Some(prop)) => {
                    turn.ack();
                    self.add_constraint(state, &prop, turn);
                }
                _ => turn.push(SystemAction::NotUnderstood),
            },
            (Question::YesNo(_), _) => turn.push(SystemAction::NotUnderstood),
        }
    }

    /// Reads a content answer that does not address the QUD as a
    /// proposition. A bare individual is attributed to the unique searchable
    /// predicate of its sort.
    fn answer_as_proposition(&self, state: &InformationState, answer: &Answer) -> Option<Proposition> {
        match answer {
            Answer::Prop(p) => Some(p.clone()),
            Answer::Short(ind) => {
                let preferred: Vec<&str> = state
                    .active_goal()
                    .and_then(|g| match g.goal.plan.first() {
                        Some(PlanItem::Findout(QuestionSpec::Wh(p))) => self.domain.lookup_parameters(p),
                        _ => None,
                    })
                    .map(|params| params.ask_features.iter().map(|f| f.predicate.as_str()).collect())
                    .unwrap_or_default();
                let fits = |names: &mut dyn Iterator<Item = &str>| -> Option<String> {
                    let found: Vec<&str> = names
                        .filter(|p| directory::is_queryable(p) && self.sorts.get(*p) == Some(&ind.sort()))
                        .collect();
                    match found.as_slice() {
                        [one] => Some((*one).to_owned()),
                        _ => None,
                    }
                };
                let name = fits(&mut preferred.iter().copied())
                    .or_else(|| fits(&mut self.sorts.keys().map(String::as_str)))?;
                Proposition::positive(self.predicate(&name), ind.clone()).ok()
            }
            _ => None,
        }
    }

    fn add_constraint(&self, state: &mut InformationState, prop: &Proposition, turn: &mut Turn) {
        let name = &prop.predicate().name;
        state.constraints.insert(name.clone(), prop.value().clone());
        state.declined.remove(name);
        state.qud = None;
        turn.changed = true;
    }

    fn revise_inner(
        &self,
        state: &mut InformationState,
        prop: &Proposition,
        turn: &mut Turn,
    ) -> Result<(), EngineError> {
        let name = &prop.predicate().name;
        if !directory::is_queryable(name) {
            return Err(EngineError::UnknownPredicate(name.clone()));
        }
        if prop.polarity() == Polarity::Negative {
            return Err(EngineError::NegativeConstraint);
        }
        let goal = state.active_goal_mut().ok_or(EngineError::NoActiveGoal)?;
        if goal.status == GoalStatus::Resolved {
            goal.status = GoalStatus::InProgress;
            goal.cursor = 0;
        } else {
            turn.ack();
        }
        self.add_constraint(state, prop, turn);
        Ok(())
    }

    fn yields_to_alternatives(&self, subject: &str, count: usize) -> bool {
        count > 1
            && self
                .domain
                .goals
                .iter()
                .filter_map(|g| g.alternatives())
                .any(|(max, p)| p == subject && count <= max as usize)
    }

    fn refine_inner(&self, state: &mut InformationState, turn: &mut Turn, snapshot: Snapshot) {
        let rs = match self.kb.search(&state.constraints) {
            Ok(rs) => rs,
            Err(_) => {
                snapshot.restore(state);
                turn.push(SystemAction::NotUnderstood);
                return;
            }
        };
        let n = rs.count();
        if n == 0 {
            // Retract this turn's constraints and keep the dialogue going.
            snapshot.restore(state);
            if turn.acknowledged {
                turn.actions.retain(|a| *a != SystemAction::Acknowledge);
            }
            turn.push(SystemAction::ReportNoMatches);
            if let Some(q) = self.select_next_question(state) {
                self.raise(state, q, turn);
            }
            return;
        }
        let count_changed = state.last_count != Some(n);
        state.last_count = Some(n);
        state.alternatives = Some(rs);

        let params = state.active_goal().and_then(|g| match g.current() {
            Some(PlanItem::Findout(QuestionSpec::Wh(p))) => self.domain.lookup_parameters(p),
            _ => None,
        });
        let Some(params) = params else {
            self.advance(state, turn);
            return;
        };
        let more_to_ask = self.select_next_question(state).is_some();
        if n == 1 && (params.incremental || !more_to_ask) || !params.incremental && more_to_ask {
            self.advance(state, turn);
            return;
        }
        if count_changed {
            turn.push(SystemAction::ReportCount(n));
        }
        if self.yields_to_alternatives(&params.subject_predicate, n) {
            // Few enough candidates to compare: leave the floor to the user.
            state.qud = None;
            return;
        }
        self.advance(state, turn);
    }

    fn alternatives_inner(
        &self,
        state: &mut InformationState,
        question: &WhQuestion,
        turn: &mut Turn,
    ) -> Result<(), EngineError> {
        let name = &question.predicate.name;
        let goal =
            self.domain.alternatives_goal(name).ok_or_else(|| EngineError::NotAnAlternativesQuestion(name.clone()))?;
        let (max, _) = goal.alternatives().expect("alternatives goal");
        let alts = state.alternatives.clone().ok_or(EngineError::NoAlternativesEstablished)?;

        if alts.count() <= max as usize {
            let values = project(&alts, name).map_err(|_| EngineError::MissingServiceFeature(name.clone()))?;
            let mut inner = ActiveGoal::new(goal.clone());
            inner.status = GoalStatus::Resolved;
            inner.cursor = goal.plan.len();
            state.goal_stack.push(inner);
            turn.push(SystemAction::ReportAlternativeValues { predicate: name.clone(), values });
            state.goal_stack.pop();
            self.resume_inner(state, turn);
        } else {
            turn.push(SystemAction::ReportCount(alts.count()));
            if let Some(q) = self.select_next_question(state) {
                self.raise(state, q, turn);
            }
        }
        Ok(())
    }
}
