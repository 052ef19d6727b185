use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard, TryLockError};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{DomainBundle, Reply, Session, SessionError, StateSummary, TranscriptEntry};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub greeting: String,
    pub transcript: Vec<TranscriptEntry>,
    pub state: StateSummary,
    pub created_at: u64,
}

/// In-memory sessions. Requests for different sessions run in parallel;
/// a second request for a session that is mid-turn fails with
/// [`SessionError::Busy`].
#[derive(Debug)]
pub struct SessionStore {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    idle_timeout: Duration,
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new(DEFAULT_IDLE_TIMEOUT)
    }
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> Self {
        Self { sessions: Mutex::new(HashMap::new()), idle_timeout }
    }

    fn map(&self) -> MutexGuard<'_, HashMap<String, Arc<Mutex<Session>>>> {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub(super) fn lookup(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.map().get(id).cloned().ok_or_else(|| SessionError::UnknownSession(id.to_owned()))
    }

    fn lock<'a>(&self, id: &str, cell: &'a Mutex<Session>) -> Result<MutexGuard<'a, Session>, SessionError> {
        match cell.try_lock() {
            Ok(guard) => Ok(guard),
            Err(TryLockError::Poisoned(p)) => Ok(p.into_inner()),
            Err(TryLockError::WouldBlock) => Err(SessionError::Busy(id.to_owned())),
        }
    }

    /// Creates a session and returns its id and opening prompt.
    pub fn create(&self, bundle: Arc<DomainBundle>) -> Result<(String, String), SessionError> {
        self.purge_expired(Instant::now());
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::new(id.clone(), bundle)?;
        let greeting = session.greeting().to_owned();
        self.map().insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok((id, greeting))
    }

    pub fn post_utterance(&self, id: &str, text: &str) -> Result<Reply, SessionError> {
        let cell = self.lookup(id)?;
        let mut session = self.lock(id, &cell)?;
        session.post_utterance(text)
    }

    /// Runs `f` on the session while holding it, so concurrent turns on
    /// the same session fail with [`SessionError::Busy`].
    pub fn with_session<R>(&self, id: &str, f: impl FnOnce(&mut Session) -> R) -> Result<R, SessionError> {
        let cell = self.lookup(id)?;
        let mut session = self.lock(id, &cell)?;
        Ok(f(&mut session))
    }

    pub fn view(&self, id: &str) -> Result<SessionView, SessionError> {
        let cell = self.lookup(id)?;
        let session = self.lock(id, &cell)?;
        Ok(SessionView {
            session_id: session.id().to_owned(),
            greeting: session.greeting().to_owned(),
            transcript: session.transcript().to_vec(),
            state: session.summary(),
            created_at: session.created_at_unix(),
        })
    }

    pub fn delete(&self, id: &str) -> Result<(), SessionError> {
        self.map().remove(id).map(drop).ok_or_else(|| SessionError::UnknownSession(id.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.map().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for longer than the timeout as of `now`. Sessions
    /// in the middle of a turn are kept. Returns how many were dropped.
    pub fn purge_expired(&self, now: Instant) -> usize {
        let mut map = self.map();
        let before = map.len();
        map.retain(|_, cell| match cell.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_active()) <= self.idle_timeout,
            Err(_) => true,
        });
        before - map.len()
    }
}
