use super::{Lexicon, NlError};
use crate::engine::SystemAction;
use crate::semantics::{Individual, Question};

pub(super) use crate::directory::ENTITY_FIELDS;

/// Slots each template may use.
pub(super) const TEMPLATE_SLOTS: [(&str, &[&str]); 13] = [
    ("acknowledge", &[]),
    ("count_one", &["count"]),
    ("count_many", &["count"]),
    ("ack_count_one", &["count"]),
    ("ack_count_many", &["count"]),
    ("ask_kpq", &["noun"]),
    ("report_value", &["noun", "short_noun", "value"]),
    ("report_value_repeated", &["noun", "short_noun", "value"]),
    ("alternative_value", &["entity", "noun", "value"]),
    ("resume_goal", &["noun"]),
    ("no_matches", &[]),
    ("not_understood", &[]),
    ("goodbye", &[]),
];

/// Substitutes `{slot}` occurrences using `lookup`.
pub fn fill_template(template: &str, lookup: impl Fn(&str) -> Option<String>) -> Result<String, NlError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| NlError::UnboundSlot { template: template.to_owned(), slot: after.to_owned() })?;
        let slot = &after[..close];
        let value = lookup(slot)
            .ok_or_else(|| NlError::UnboundSlot { template: template.to_owned(), slot: slot.to_owned() })?;
        out.push_str(&value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

pub(super) fn check_template(template: &str, slots: &[&str]) -> Result<(), NlError> {
    fill_template(template, |s| slots.contains(&s).then(String::new)).map(drop)
}

fn noun<'a>(lex: &'a Lexicon, predicate: &str) -> Result<&'a str, NlError> {
    lex.forms(predicate)
        .and_then(|f| f.noun.as_deref())
        .ok_or_else(|| NlError::MissingTemplate(format!("noun for `{predicate}`")))
}

fn spoken_value(lex: &Lexicon, predicate: &str, value: &Individual) -> Result<String, NlError> {
    let raw = value.to_string();
    match lex.forms(predicate).and_then(|f| f.value.as_deref()) {
        Some(t) => fill_template(t, |s| (s == "value").then(|| raw.clone())),
        None => Ok(raw),
    }
}

fn count(lex: &Lexicon, n: usize, acknowledged: bool) -> Result<String, NlError> {
    let key = match (acknowledged, n == 1) {
        (false, true) => "count_one",
        (false, false) => "count_many",
        (true, true) => "ack_count_one",
        (true, false) => "ack_count_many",
    };
    let word = lex.render_number(n);
    fill_template(lex.template(key)?, |s| (s == "count").then(|| word.clone()))
}

/// Text of a question the system asks.
pub fn render_question(q: &Question, lex: &Lexicon) -> Result<String, NlError> {
    match q {
        Question::Wh(wh) => {
            let p = &wh.predicate.name;
            lex.forms(p)
                .and_then(|f| f.wh.clone())
                .ok_or_else(|| NlError::MissingTemplate(format!("question for `{p}`")))
        }
        Question::Kpq(wh) => {
            let n = noun(lex, &wh.predicate.name)?;
            fill_template(lex.template("ask_kpq")?, |s| (s == "noun").then(|| n.to_owned()))
        }
        Question::YesNo(_) => Err(NlError::MissingTemplate("yes/no question".into())),
    }
}

fn report_value(lex: &Lexicon, predicate: &str, value: &Individual, repeated: bool) -> Result<String, NlError> {
    let noun = noun(lex, predicate)?.to_owned();
    let short = lex.forms(predicate).and_then(|f| f.short_noun.clone()).unwrap_or_else(|| noun.clone());
    let value = spoken_value(lex, predicate, value)?;
    let key = if repeated { "report_value_repeated" } else { "report_value" };
    fill_template(lex.template(key)?, |s| match s {
        "noun" => Some(noun.clone()),
        "short_noun" => Some(short.clone()),
        "value" => Some(value.clone()),
        _ => None,
    })
}

/// Realizes actions in order as sentences joined by single spaces. An
/// acknowledgement directly followed by a count report merges into one
/// sentence.
pub(super) fn generate(actions: &[SystemAction], lex: &Lexicon) -> Result<String, NlError> {
    let mut out = Vec::with_capacity(actions.len());
    let mut i = 0;
    while i < actions.len() {
        let action = &actions[i];
        i += 1;
        let text = match action {
            SystemAction::Acknowledge => match actions.get(i) {
                Some(SystemAction::ReportCount(n)) => {
                    i += 1;
                    count(lex, *n, true)?
                }
                _ => lex.template("acknowledge")?.to_owned(),
            },
            SystemAction::ReportCount(n) => count(lex, *n, false)?,
            SystemAction::AskQuestion(q) => render_question(q, lex)?,
            SystemAction::ReportValue { predicate, value, repeated, .. } => {
                report_value(lex, predicate, value, *repeated)?
            }
            SystemAction::ReportAlternativeValues { predicate, values } => {
                let noun = noun(lex, predicate)?.to_owned();
                let template = lex.template("alternative_value")?;
                let entity_template = lex.template("entity")?;
                let mut sentences = Vec::with_capacity(values.len());
                for (entity, value) in values {
                    let description = fill_template(entity_template, |f| entity.field_text(f))?;
                    let value = spoken_value(lex, predicate, value)?;
                    sentences.push(fill_template(template, |s| match s {
                        "entity" => Some(description.clone()),
                        "noun" => Some(noun.clone()),
                        "value" => Some(value.clone()),
                        _ => None,
                    })?);
                }
                sentences.join(" ")
            }
            SystemAction::ResumeGoal(goal) => {
                let n = noun(lex, goal)?;
                fill_template(lex.template("resume_goal")?, |s| (s == "noun").then(|| n.to_owned()))?
            }
            SystemAction::ReportNoMatches => lex.template("no_matches")?.to_owned(),
            SystemAction::NotUnderstood => lex.template("not_understood")?.to_owned(),
        };
        out.push(text);
    }
    Ok(out.join(" "))
}
