use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::*;

/// Minimal element tree; the DDD format carries no text content.
#[derive(Debug)]
struct Node {
    name: String,
    path: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
}

impl Node {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str, DddError> {
        self.attr(key).ok_or_else(|| {
            schema("MISSING_ATTRIBUTE", &self.path, format!("<{}> requires attribute `{key}`", self.name))
        })
    }

    fn only_attrs(&self, allowed: &[&str]) -> Result<(), DddError> {
        match self.attrs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(schema(
                "UNKNOWN_ATTRIBUTE",
                &self.path,
                format!("attribute `{k}` is not allowed on <{}>", self.name),
            )),
            None => Ok(()),
        }
    }

    fn no_children(&self) -> Result<(), DddError> {
        match self.children.first() {
            Some(c) => Err(unexpected(c, &self.name)),
            None => Ok(()),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, DddError> {
        match self.attr(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => Err(schema(
                "INVALID_BOOLEAN",
                &self.path,
                format!("`{key}` must be \"true\" or \"false\", got {other:?}"),
            )),
        }
    }
}

fn schema(code: &'static str, path: &str, message: String) -> DddError {
    DddError::Schema(Diagnostic::error(code, path, message))
}

fn unexpected(child: &Node, parent: &str) -> DddError {
    schema("UNKNOWN_ELEMENT", &child.path, format!("<{}> is not allowed inside <{parent}>", child.name))
}

fn syntax(reader: &Reader<&[u8]>, message: impl ToString) -> DddError {
    DddError::XmlSyntax { position: reader.error_position(), message: message.to_string() }
}

/// Parses DDD XML text into a [`Domain`].
///
/// Unknown elements and attributes are rejected. Attribute defaults are
/// `kpq="false"` and `incremental="false"`; document order is preserved.
pub fn parse_ddd(xml_text: &str) -> Result<Domain, DddError> {
    let root = read_tree(xml_text)?;
    build_domain(&root)
}

fn read_tree(xml_text: &str) -> Result<Node, DddError> {
    let mut reader = Reader::from_str(xml_text);
    reader.config_mut().trim_text(true);

    let mut stack: Vec<Node> = Vec::new();
    let mut root: Option<Node> = None;

    let open = |stack: &Vec<Node>, root: &Option<Node>, e: &BytesStart, reader: &Reader<&[u8]>| {
        let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
        let path = match stack.last() {
            None => {
                if root.is_some() {
                    return Err(syntax(reader, "multiple root elements"));
                }
                format!("/{name}")
            }
            Some(parent) => {
                let nth = parent.children.iter().filter(|c| c.name == name).count() + 1;
                format!("{}/{name}[{nth}]", parent.path)
            }
        };
        let mut attrs = Vec::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| syntax(reader, err))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr.unescape_value().map_err(|err| syntax(reader, err))?.into_owned();
            attrs.push((key, value));
        }
        Ok(Node { name, path, attrs, children: Vec::new() })
    };

    loop {
        let event = reader.read_event().map_err(|e| syntax(&reader, e))?;
        match event {
            Event::Start(e) => {
                let node = open(&stack, &root, &e, &reader)?;
                stack.push(node);
            }
            Event::Empty(e) => {
                let node = open(&stack, &root, &e, &reader)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => root = Some(node),
                }
            }
            Event::End(_) => {
                let node = stack.pop().ok_or_else(|| syntax(&reader, "unbalanced end tag"))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => root = Some(node),
                }
            }
            Event::Text(t) => {
                let text = t.unescape().map_err(|e| syntax(&reader, e))?;
                if !text.trim().is_empty() {
                    let path = stack.last().map(|n| n.path.as_str()).unwrap_or("/");
                    return Err(schema("UNEXPECTED_TEXT", path, format!("unexpected text {:?}", text.trim())));
                }
            }
            Event::CData(_) => {
                let path = stack.last().map(|n| n.path.as_str()).unwrap_or("/");
                return Err(schema("UNEXPECTED_TEXT", path, "CDATA is not allowed".into()));
            }
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }
    if !stack.is_empty() {
        return Err(syntax(&reader, "unexpected end of document: unclosed element"));
    }
    root.ok_or_else(|| syntax(&reader, "document has no root element"))
}

fn build_domain(root: &Node) -> Result<Domain, DddError> {
    if root.name != "domain" {
        return Err(schema(
            "UNKNOWN_ELEMENT",
            &root.path,
            format!("root element must be <domain>, got <{}>", root.name),
        ));
    }
    root.only_attrs(&["name"])?;
    let name = root.required("name")?.to_owned();

    let mut goals = Vec::new();
    let mut parameters = Vec::new();
    for child in &root.children {
        match child.name.as_str() {
            "goal" => goals.push(build_goal(child)?),
            "parameters" => parameters.push(build_parameters(child)?),
            _ => return Err(unexpected(child, "domain")),
        }
    }
    Ok(Domain { name, goals, parameters })
}

fn build_goal(node: &Node) -> Result<Goal, DddError> {
    let goal_type = node.required("type")?;
    let (goal_type, target) = match goal_type {
        "perform" => {
            node.only_attrs(&["type", "action"])?;
            (GoalType::Perform, GoalTarget::Action(node.required("action")?.to_owned()))
        }
        "resolve" => {
            node.only_attrs(&["type", "question_type", "predicate", "max_answers", "alternatives_predicate"])?;
            let question_type = node.required("question_type")?;
            if question_type != "wh_question" {
                return Err(schema(
                    "INVALID_VALUE",
                    &node.path,
                    format!("resolve goals take question_type=\"wh_question\", got {question_type:?}"),
                ));
            }
            (GoalType::Resolve, GoalTarget::Question(QuestionSpec::Wh(node.required("predicate")?.to_owned())))
        }
        other => {
            return Err(schema(
                "INVALID_VALUE",
                &node.path,
                format!("goal type must be \"perform\" or \"resolve\", got {other:?}"),
            ))
        }
    };

    let max_answers = match node.attr("max_answers") {
        None => None,
        Some(raw) => match raw.parse::<u32>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                return Err(schema(
                    "INVALID_VALUE",
                    &node.path,
                    format!("max_answers must be a positive integer, got {raw:?}"),
                ))
            }
        },
    };
    let alternatives_predicate = node.attr("alternatives_predicate").map(str::to_owned);

    let mut plan = None;
    for child in &node.children {
        match child.name.as_str() {
            "plan" if plan.is_none() => plan = Some(build_plan(child)?),
            "plan" => return Err(schema("DUPLICATE_PLAN", &child.path, "a goal carries exactly one <plan>".into())),
            _ => return Err(unexpected(child, "goal")),
        }
    }
    let plan = plan.ok_or_else(|| schema("MISSING_PLAN", &node.path, "<goal> requires a <plan>".into()))?;

    Ok(Goal { goal_type, target, plan, max_answers, alternatives_predicate })
}

fn build_plan(node: &Node) -> Result<Vec<PlanItem>, DddError> {
    node.only_attrs(&[])?;
    node.children
        .iter()
        .map(|child| {
            let item = match child.name.as_str() {
                "forget_all" => {
                    child.only_attrs(&[])?;
                    PlanItem::ForgetAll
                }
                "findout" => PlanItem::Findout(question_spec(child, true)?),
                "invoke_service_query" => PlanItem::InvokeServiceQuery(question_spec(child, false)?),
                _ => return Err(unexpected(child, "plan")),
            };
            child.no_children()?;
            Ok(item)
        })
        .collect()
}

fn question_spec(node: &Node, allow_goal: bool) -> Result<QuestionSpec, DddError> {
    match node.required("type")? {
        "goal" if allow_goal => {
            node.only_attrs(&["type"])?;
            Ok(QuestionSpec::Goal)
        }
        "wh_question" => {
            node.only_attrs(&["type", "predicate"])?;
            Ok(QuestionSpec::Wh(node.required("predicate")?.to_owned()))
        }
        other => {
            Err(schema("INVALID_VALUE", &node.path, format!("unsupported question type {other:?} on <{}>", node.name)))
        }
    }
}

fn build_parameters(node: &Node) -> Result<ParametersSpec, DddError> {
    node.only_attrs(&["question_type", "predicate", "source", "incremental"])?;
    let question_type = node.required("question_type")?;
    if question_type != "wh_question" {
        return Err(schema(
            "INVALID_VALUE",
            &node.path,
            format!("parameters take question_type=\"wh_question\", got {question_type:?}"),
        ));
    }
    let subject_predicate = node.required("predicate")?.to_owned();
    let source = match node.required("source")? {
        "service" => ParameterSource::Service,
        other => {
            return Err(schema(
                "INVALID_VALUE",
                &node.path,
                format!("only source=\"service\" is supported, got {other:?}"),
            ))
        }
    };
    let incremental = node.flag("incremental")?;

    let ask_features = node
        .children
        .iter()
        .map(|child| {
            if child.name != "ask_feature" {
                return Err(unexpected(child, "parameters"));
            }
            child.only_attrs(&["predicate", "kpq"])?;
            child.no_children()?;
            Ok(AskFeature { predicate: child.required("predicate")?.to_owned(), kpq: child.flag("kpq")? })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ParametersSpec { subject_predicate, source, incremental, ask_features })
}

#[cfg(test)]
mod tests {
    use super::super::tests::FIGURE_1;
    use super::*;

    fn wh(p: &str) -> QuestionSpec {
        QuestionSpec::Wh(p.into())
    }

    #[test]
    fn figure_one_structure() {
        let d = parse_ddd(FIGURE_1).unwrap();
        assert_eq!(d.name, "PhoneDirectoryDomain");
        assert_eq!(d.goals.len(), 3);

        let top = &d.goals[0];
        assert_eq!(top.goal_type, GoalType::Perform);
        assert_eq!(top.target, GoalTarget::Action("top".into()));
        assert_eq!(top.plan, vec![PlanItem::ForgetAll, PlanItem::Findout(QuestionSpec::Goal)]);

        let phone = &d.goals[1];
        assert_eq!(phone.target, GoalTarget::Question(wh("phonenumber")));
        assert_eq!(phone.plan, vec![PlanItem::Findout(wh("person")), PlanItem::InvokeServiceQuery(wh("phonenumber"))]);
        assert_eq!(phone.max_answers, None);

        let age = &d.goals[2];
        assert_eq!(age.goal_type, GoalType::Resolve);
        assert_eq!(age.max_answers, Some(3));
        assert_eq!(age.alternatives_predicate.as_deref(), Some("person"));
        assert_eq!(age.plan, vec![PlanItem::Findout(wh("person")), PlanItem::InvokeServiceQuery(wh("age"))]);

        assert_eq!(d.parameters.len(), 1);
        let params = &d.parameters[0];
        assert_eq!(params.subject_predicate, "person");
        assert_eq!(params.source, ParameterSource::Service);
        assert!(params.incremental);
        let features: Vec<_> = params.ask_features.iter().map(|f| (f.predicate.as_str(), f.kpq)).collect();
        assert_eq!(features, [("person_name", false), ("person_city", true), ("person_street_name", true)]);
    }

    #[test]
    fn minimal_domain() {
        let d = parse_ddd(
            r#"<domain name="D"><goal type="perform" action="top"><plan><forget_all/><findout type="goal"/></plan></goal></domain>"#,
        )
        .unwrap();
        assert_eq!(d.goals.len(), 1);
        assert_eq!(d.goals[0].plan, vec![PlanItem::ForgetAll, PlanItem::Findout(QuestionSpec::Goal)]);
        assert!(d.parameters.is_empty());
    }

    #[test]
    fn deleting_alternatives_line_only_changes_age_goal() {
        let edited: String = FIGURE_1.replace("\n        max_answers=\"3\" alternatives_predicate=\"person\">", ">");
        assert_ne!(edited, FIGURE_1);
        let full = parse_ddd(FIGURE_1).unwrap();
        let cut = parse_ddd(&edited).unwrap();

        // Structural diff: every field equal except the age goal's two attributes.
        assert_eq!(full.name, cut.name);
        assert_eq!(full.parameters, cut.parameters);
        assert_eq!(full.goals.len(), cut.goals.len());
        for (i, (a, b)) in full.goals.iter().zip(&cut.goals).enumerate() {
            if i == 2 {
                assert_eq!(b.max_answers, None);
                assert_eq!(b.alternatives_predicate, None);
                let mut a = a.clone();
                a.max_answers = None;
                a.alternatives_predicate = None;
                assert_eq!(&a, b);
            } else {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn defaults_applied() {
        let d = parse_ddd(
            r#"<domain name="D">
                 <goal type="perform" action="top"><plan><findout type="goal"/></plan></goal>
                 <parameters question_type="wh_question" predicate="x" source="service">
                   <ask_feature predicate="y"/>
                 </parameters>
               </domain>"#,
        )
        .unwrap();
        assert!(!d.parameters[0].incremental);
        assert!(!d.parameters[0].ask_features[0].kpq);
    }

    #[test]
    fn parsing_is_deterministic() {
        assert_eq!(parse_ddd(FIGURE_1).unwrap(), parse_ddd(FIGURE_1).unwrap());
    }

    fn schema_err(xml: &str) -> Diagnostic {
        match parse_ddd(xml) {
            Err(DddError::Schema(d)) => d,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_element_names_its_path() {
        let d = schema_err(
            r#"<domain name="D"><goal type="perform" action="top"><plan><forget_all/><jump/></plan></goal></domain>"#,
        );
        assert_eq!(d.code, "UNKNOWN_ELEMENT");
        assert_eq!(d.location, "/domain/goal[1]/plan[1]/jump[1]");
    }

    #[test]
    fn unknown_attribute_is_an_error() {
        let d = schema_err(
            r#"<domain name="D"><goal type="perform" action="top" colour="red"><plan><forget_all/></plan></goal></domain>"#,
        );
        assert_eq!(d.code, "UNKNOWN_ATTRIBUTE");
        assert_eq!(d.location, "/domain/goal[1]");
    }

    #[test]
    fn missing_required_attribute() {
        let d = schema_err(
            r#"<domain name="D"><goal type="perform" action="top"><plan><findout type="wh_question"/></plan></goal></domain>"#,
        );
        assert_eq!(d.code, "MISSING_ATTRIBUTE");
        assert_eq!(d.location, "/domain/goal[1]/plan[1]/findout[1]");

        let d = schema_err(r#"<domain><goal type="perform" action="top"><plan/></goal></domain>"#);
        assert_eq!(d.location, "/domain");
    }

    #[test]
    fn findout_goal_with_predicate_rejected() {
        let d = schema_err(
            r#"<domain name="D"><goal type="perform" action="top"><plan><findout type="goal" predicate="x"/></plan></goal></domain>"#,
        );
        assert_eq!(d.code, "UNKNOWN_ATTRIBUTE");
    }

    #[test]
    fn bad_boolean_and_bad_max_answers() {
        let d = schema_err(
            r#"<domain name="D"><parameters question_type="wh_question" predicate="p" source="service" incremental="yes"/></domain>"#,
        );
        assert_eq!(d.code, "INVALID_BOOLEAN");
        let d = schema_err(
            r#"<domain name="D"><goal type="resolve" question_type="wh_question" predicate="a" max_answers="0" alternatives_predicate="p"><plan/></goal></domain>"#,
        );
        assert_eq!(d.code, "INVALID_VALUE");
        assert_eq!(d.location, "/domain/goal[1]");
    }

    #[test]
    fn malformed_xml() {
        for bad in [
            "<domain name=\"D\"><goal></domain>",
            "<domain name=\"D\">",
            "",
            "<domain name=\"D\"/><domain name=\"E\"/>",
        ] {
            assert!(matches!(parse_ddd(bad), Err(DddError::XmlSyntax { .. })), "{bad:?}");
        }
    }

    #[test]
    fn text_content_rejected() {
        let d = schema_err(r#"<domain name="D">hello</domain>"#);
        assert_eq!(d.code, "UNEXPECTED_TEXT");
    }
}
