mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use negotia_core::session::DomainBundle;
use negotia_dm::http::router;
use negotia_dm::repl::{run, system_turns};
use serde_json::{json, Value};
use tower::ServiceExt;

fn bundle(fixture: &str) -> Arc<DomainBundle> {
    Arc::new(DomainBundle::load(&common::ddd(), &common::fixture(fixture)).unwrap())
}

fn repl(fixture: &str, input: &str) -> String {
    let mut out = Vec::new();
    run(bundle(fixture), input.as_bytes(), &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

const T3_TURNS: [&str; 4] = [
    "I want the number for Anna Andersson in Gothenburg",
    "How old are they?",
    "Hm, I think she is 42 years old.",
    "What is the phone number for the one who is 31 years old, just in case I'm wrong?",
];

#[test]
fn typing_t3_reproduces_its_system_turns() {
    let out = repl("f1_small.jsonl", &(T3_TURNS.join("\n") + "\n/quit\n"));
    let turns = system_turns(&out);
    assert_eq!(turns[0], "What can I do for you?");
    assert_eq!(turns[1], "There are three persons matching your description.");
    assert!(turns[2].ends_with(
        "Returning to the phone number. There are three persons matching your description. Do you know the street name?"
    ));
    assert_eq!(turns[3], "OK. The phone number is 031-118 42 02.");
    assert_eq!(turns[4], "The number is 031-710 31 03.");
}

#[test]
fn state_command_lists_constraints() {
    let out = repl("f1_small.jsonl", "I want the number for Anna Andersson in Gothenburg\n/state\n");
    let json_start = out.find('{').unwrap();
    let json_end = out.rfind('}').unwrap();
    let state: Value = serde_json::from_str(&out[json_start..=json_end]).unwrap();
    assert_eq!(state["constraints"], json!({"person_name": "Anna Andersson", "person_city": "Gothenburg"}));
    assert_eq!(state["last_count"], 3);
}

#[test]
fn empty_lines_reprompt_and_eof_exits() {
    let out = repl("f1_small.jsonl", "\n   \n");
    assert_eq!(out.matches("U: ").count(), 3);
    assert_eq!(system_turns(&out).len(), 1);
}

#[test]
fn unknown_commands_and_garbage_do_not_crash() {
    let out = repl("f1_small.jsonl", "/frobnicate\nblorp\n/help\nbye\nstill here?\n");
    assert!(out.contains("unknown command `/frobnicate`"));
    assert!(out.contains("S: Sorry, I didn't understand that."));
    assert!(out.contains("S: Goodbye."));
    assert!(!out.contains("still here"));
}

async fn http_texts(fixture: &str, turns: &[&str]) -> Vec<String> {
    let app = router(common::app_state());
    let send = |uri: String, body: Value| {
        let app = app.clone();
        async move {
            let req = Request::builder()
                .method(Method::POST)
                .uri(uri)
                .header("content-type", "application/json")
                .body(Body::from(body.to_string()))
                .unwrap();
            let bytes = app.oneshot(req).await.unwrap().into_body().collect().await.unwrap().to_bytes();
            serde_json::from_slice::<Value>(&bytes).unwrap()
        }
    };
    let created = send("/sessions".into(), json!({ "fixture": fixture })).await;
    let id = created["session_id"].as_str().unwrap().to_owned();
    let mut texts = vec![created["greeting"].as_str().unwrap().to_owned()];
    for t in turns {
        let reply = send(format!("/sessions/{id}/utterances"), json!({ "text": t })).await;
        texts.push(reply["system_text"].as_str().unwrap().to_owned());
    }
    texts
}

#[tokio::test]
async fn api_and_repl_agree() {
    let t2c = ["I need the phone number for Anna Andersson", "Yes", "Gothenburg", "No", "How old are they?"];
    for (fixture, turns) in [("f1_small", &T3_TURNS[..]), ("f2_large", &t2c[..])] {
        let via_http = http_texts(fixture, turns).await;
        let via_repl = system_turns(&repl(&format!("{fixture}.jsonl"), &turns.join("\n")));
        assert_eq!(via_http, via_repl);
    }
}
