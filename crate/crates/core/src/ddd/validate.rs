use std::collections::HashSet;

use super::*;

fn goal_path(i: usize) -> String {
    format!("/domain/goal[{}]", i + 1)
}

fn item_path(goal: usize, plan: &[PlanItem], pos: usize) -> String {
    let tag = |item: &PlanItem| match item {
        PlanItem::ForgetAll => "forget_all",
        PlanItem::Findout(_) => "findout",
        PlanItem::InvokeServiceQuery(_) => "invoke_service_query",
    };
    let name = tag(&plan[pos]);
    let nth = plan[..=pos].iter().filter(|i| tag(i) == name).count();
    format!("{}/plan[1]/{name}[{nth}]", goal_path(goal))
}

/// Checks every structural invariant of a parsed domain. An empty result
/// means the domain can be run.
pub fn validate(domain: &Domain) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let tops: Vec<usize> = domain.goals.iter().enumerate().filter(|(_, g)| g.is_top()).map(|(i, _)| i).collect();
    match tops.as_slice() {
        [] => out.push(Diagnostic::error("MISSING_TOP", "/domain", "no perform goal with action \"top\"")),
        [_] => {}
        [_, rest @ ..] => {
            for &i in rest {
                out.push(Diagnostic::error(
                    "DUPLICATE_TOP",
                    goal_path(i),
                    "more than one perform goal with action \"top\"",
                ));
            }
        }
    }

    let subjects: HashSet<&str> = domain.parameters.iter().map(|p| p.subject_predicate.as_str()).collect();
    let declared: HashSet<&str> = domain.parameter_predicates().collect();

    let mut seen_goals = HashSet::new();
    for (i, goal) in domain.goals.iter().enumerate() {
        let path = goal_path(i);
        if !goal.is_top() && !seen_goals.insert(goal.name()) {
            out.push(Diagnostic::error(
                "DUPLICATE_GOAL",
                path.clone(),
                format!("goal `{}` is declared more than once", goal.name()),
            ));
        }
        if goal.plan.is_empty() {
            out.push(Diagnostic::error("EMPTY_PLAN", format!("{path}/plan[1]"), "plan has no items"));
        }
        match (&goal.max_answers, &goal.alternatives_predicate) {
            (Some(_), None) | (None, Some(_)) => out.push(Diagnostic::error(
                "ALTERNATIVES_PAIRING",
                path.clone(),
                "max_answers and alternatives_predicate must be given together",
            )),
            _ => {}
        }
        if let Some(p) = &goal.alternatives_predicate {
            if !subjects.contains(p.as_str()) {
                out.push(Diagnostic::error(
                    "UNKNOWN_PREDICATE",
                    path.clone(),
                    format!("alternatives_predicate `{p}` has no <parameters> declaration"),
                ));
            }
        }
        for (pos, item) in goal.plan.iter().enumerate() {
            match item {
                PlanItem::Findout(QuestionSpec::Wh(p)) if !declared.contains(p.as_str()) => {
                    out.push(Diagnostic::error(
                        "UNKNOWN_PREDICATE",
                        item_path(i, &goal.plan, pos),
                        format!("findout predicate `{p}` is not declared by any <parameters>"),
                    ));
                }
                PlanItem::InvokeServiceQuery(QuestionSpec::Wh(p)) if goal.resolved_predicate() != Some(p) => {
                    out.push(Diagnostic::error(
                        "UNKNOWN_PREDICATE",
                        item_path(i, &goal.plan, pos),
                        format!("service query for `{p}` does not match the goal it belongs to"),
                    ));
                }
                _ => {}
            }
        }
    }

    let mut seen_subjects = HashSet::new();
    for (j, params) in domain.parameters.iter().enumerate() {
        let path = format!("/domain/parameters[{}]", j + 1);
        if !seen_subjects.insert(params.subject_predicate.as_str()) {
            out.push(Diagnostic::error(
                "DUPLICATE_PARAMETERS",
                path.clone(),
                format!("parameters for `{}` declared more than once", params.subject_predicate),
            ));
        }
        if params.ask_features.is_empty() {
            out.push(Diagnostic::error("EMPTY_FEATURES", path.clone(), "parameters declare no ask_feature"));
        }
        let mut seen = HashSet::new();
        for (k, f) in params.ask_features.iter().enumerate() {
            if !seen.insert(f.predicate.as_str()) {
                out.push(Diagnostic::error(
                    "DUPLICATE_FEATURE",
                    format!("{path}/ask_feature[{}]", k + 1),
                    format!("ask_feature `{}` listed twice", f.predicate),
                ));
            }
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::super::tests::FIGURE_1;
    use super::*;

    fn figure() -> Domain {
        parse_ddd(FIGURE_1).unwrap()
    }

    fn codes(d: &Domain) -> Vec<&'static str> {
        validate(d).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn figure_one_is_valid() {
        assert_eq!(validate(&figure()), vec![]);
    }

    #[test]
    fn unknown_alternatives_predicate() {
        let mut d = figure();
        d.goals[2].alternatives_predicate = Some("pet".into());
        let diags = validate(&d);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "UNKNOWN_PREDICATE");
        assert_eq!(diags[0].severity, Severity::Error);
        assert_eq!(diags[0].location, "/domain/goal[3]");
    }

    #[test]
    fn duplicate_top() {
        let mut d = figure();
        d.goals.push(d.goals[0].clone());
        assert_eq!(codes(&d), ["DUPLICATE_TOP"]);
    }

    #[test]
    fn missing_top() {
        let mut d = figure();
        d.goals.remove(0);
        assert_eq!(codes(&d), ["MISSING_TOP"]);
    }

    #[test]
    fn alternatives_attributes_come_in_pairs() {
        let mut d = figure();
        d.goals[2].alternatives_predicate = None;
        assert_eq!(codes(&d), ["ALTERNATIVES_PAIRING"]);
        let mut d = figure();
        d.goals[2].max_answers = None;
        assert_eq!(codes(&d), ["ALTERNATIVES_PAIRING"]);
    }

    #[test]
    fn empty_plan_and_features() {
        let mut d = figure();
        d.goals[1].plan.clear();
        d.parameters[0].ask_features.clear();
        assert_eq!(codes(&d), ["EMPTY_PLAN", "EMPTY_FEATURES"]);
    }

    #[test]
    fn duplicate_feature_location() {
        let mut d = figure();
        let f = d.parameters[0].ask_features[1].clone();
        d.parameters[0].ask_features.push(f);
        let diags = validate(&d);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "DUPLICATE_FEATURE");
        assert_eq!(diags[0].location, "/domain/parameters[1]/ask_feature[4]");
    }

    #[test]
    fn unresolvable_findout() {
        let mut d = figure();
        d.goals[1].plan[0] = PlanItem::Findout(QuestionSpec::Wh("pet".into()));
        let diags = validate(&d);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "UNKNOWN_PREDICATE");
        assert_eq!(diags[0].location, "/domain/goal[2]/plan[1]/findout[1]");
    }

    #[test]
    fn mismatched_service_query() {
        let mut d = figure();
        d.goals[1].plan[1] = PlanItem::InvokeServiceQuery(QuestionSpec::Wh("age".into()));
        assert_eq!(codes(&d), ["UNKNOWN_PREDICATE"]);
    }
}
