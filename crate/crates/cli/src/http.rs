//! JSON chat API.
//!
//! | method | path                        | body              | reply                          |
//! |--------|-----------------------------|-------------------|--------------------------------|
//! | POST   | `/sessions`                 | `{domain, fixture}` | `{session_id, greeting}`     |
//! | POST   | `/sessions/{id}/utterances` | `{text}`          | `{system_text, state}`         |
//! | GET    | `/sessions/{id}`            |                   | transcript and state           |
//! | DELETE | `/sessions/{id}`            |                   | 204                            |
//!
//! Errors are `{"error": message}` with 404 for an unknown session, 409
//! when the session is busy and 400 for a bad body.

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use negotia_core::session::{Reply, SessionError, SessionStore, SessionView};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Registry;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub registry: Arc<Registry>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub domain: Option<String>,
    pub fixture: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
    pub greeting: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Utterance {
    pub text: String,
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::Busy(_) | SessionError::Ended => StatusCode::CONFLICT,
            SessionError::Generation(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

fn body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError(StatusCode::BAD_REQUEST, format!("invalid body: {e}")))
}

async fn create(State(app): State<AppState>, bytes: Bytes) -> Result<(StatusCode, Json<Created>), ApiError> {
    let req: CreateSession =
        if bytes.iter().all(u8::is_ascii_whitespace) { CreateSession::default() } else { body(&bytes)? };
    let bundle = app.registry.find(req.domain.as_deref(), req.fixture.as_deref()).ok_or_else(|| {
        ApiError(StatusCode::BAD_REQUEST, format!("no loaded domain {:?} with fixture {:?}", req.domain, req.fixture))
    })?;
    let (session_id, greeting) = app.store.create(bundle)?;
    Ok((StatusCode::CREATED, Json(Created { session_id, greeting })))
}

async fn utter(State(app): State<AppState>, Path(id): Path<String>, bytes: Bytes) -> Result<Json<Reply>, ApiError> {
    let req: Utterance = body(&bytes)?;
    Ok(Json(app.store.post_utterance(&id, &req.text)?))
}

async fn show(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(app.store.view(&id)?))
}

async fn remove(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    app.store.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(remove))
        .route("/sessions/{id}/utterances", post(utter))
        .with_state(app)
}

/// Periodically drops idle sessions.
pub async fn expire_sessions(store: Arc<SessionStore>, every: Duration) {
    let mut tick = tokio::time::interval(every);
    loop {
        tick.tick().await;
        store.purge_expired(Instant::now());
    }
}
