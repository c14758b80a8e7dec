//! Local HTTP service driving live typing sessions.
//!
//! Each session owns its [`Session`] state; sessions of the same user on
//! the same corpus share one [`Engine`] (and so one profile). Locks are
//! always taken session first, then engine, which serializes events per
//! session and profile writes per user.

use std::collections::{BTreeMap, HashMap};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde_json::Value;
use wordpred_core::session::{Event, FlipDirection, Separator, Session, SessionError};
use wordpred_core::{CorpusTag, Engine, EngineConfig, Lexicon, LexiconError, UserProfile};

use crate::api::*;
use crate::files::{profile_file_name, read_profile, write_profile};

pub const DEFAULT_PORT: u16 = 7457;
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub engine: EngineConfig,
    /// Where profiles persist; `None` keeps them in memory only.
    pub profile_dir: Option<PathBuf>,
    pub idle_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { engine: EngineConfig::default(), profile_dir: None, idle_timeout: DEFAULT_IDLE_TIMEOUT }
    }
}

type EngineKey = (String, CorpusTag);

struct LiveSession {
    handle: SessionHandle,
    session: Session,
    engine: Arc<Mutex<Engine>>,
    last_active: Instant,
}

pub struct AppState {
    corpora: BTreeMap<String, Arc<Lexicon>>,
    config: ServiceConfig,
    engines: Mutex<HashMap<EngineKey, Arc<Mutex<Engine>>>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<LiveSession>>>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_request", message)
    }

    fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no live session {id:?}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error_code: self.code.to_string(), message: self.message };
        (self.status, Json(body)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = match e {
            SessionError::InvalidChar(_) => "invalid_char",
            SessionError::SlotOutOfRange { .. } => "slot_out_of_range",
            SessionError::PageOutOfRange(_) => "page_out_of_range",
            SessionError::NothingToDelete => "nothing_to_delete",
        };
        let status = match e {
            SessionError::InvalidChar(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::CONFLICT,
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<LexiconError> for ApiError {
    fn from(e: LexiconError) -> Self {
        let code = match e {
            LexiconError::InvalidWord { .. } => "invalid_word",
            LexiconError::InvalidUsername(_) => "invalid_username",
            LexiconError::InvalidCorpusTag(_) => "unknown_corpus",
            _ => "profile_error",
        };
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
    }
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(format!("invalid JSON body: {e}")))
}

fn payload_str<'a>(payload: &'a Value, field: &str) -> Result<&'a str, ApiError> {
    payload
        .get(field)
        .and_then(Value::as_str)
        .ok_or_else(|| ApiError::malformed(format!("payload.{field} must be a string")))
}

/// Decode an `{type, payload}` event body.
pub fn parse_event(req: &EventRequest) -> Result<Event, ApiError> {
    let payload = &req.payload;
    match req.kind.as_str() {
        "key_char" => {
            let s = payload_str(payload, "char")?;
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(Event::Char(c)),
                _ => Err(ApiError::malformed("payload.char must be exactly one character")),
            }
        }
        "key_separator" => {
            if payload.is_null() || payload.get("separator").is_none() {
                return Ok(Event::Separator(Separator::Space));
            }
            match payload_str(payload, "separator")? {
                "space" | " " => Ok(Event::Separator(Separator::Space)),
                "newline" | "\n" => Ok(Event::Separator(Separator::Newline)),
                other => Err(ApiError::malformed(format!("unknown separator {other:?}"))),
            }
        }
        "select" => payload
            .get("slot")
            .and_then(Value::as_u64)
            .map(|slot| Event::Select(usize::try_from(slot).unwrap_or(usize::MAX)))
            .ok_or_else(|| ApiError::malformed("payload.slot must be a non-negative integer")),
        "flip_page" => match payload_str(payload, "direction")? {
            "next" => Ok(Event::Flip(FlipDirection::Next)),
            "prev" => Ok(Event::Flip(FlipDirection::Prev)),
            other => Err(ApiError::malformed(format!("unknown direction {other:?}"))),
        },
        "backspace" => Ok(Event::Backspace),
        other => Err(ApiError::malformed(format!("unknown event type {other:?}"))),
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl AppState {
    pub fn new(corpora: Vec<Lexicon>, config: ServiceConfig) -> Arc<Self> {
        let corpora = corpora
            .into_iter()
            .map(|lex| (lex.tag().as_str().to_string(), Arc::new(lex)))
            .collect();
        Arc::new(AppState {
            corpora,
            config,
            engines: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn live_sessions(&self) -> usize {
        lock(&self.sessions).len()
    }

    fn profile_path(&self, profile: &UserProfile) -> Option<PathBuf> {
        let dir = self.config.profile_dir.as_ref()?;
        Some(dir.join(profile_file_name(profile.username(), profile.corpus_tag())))
    }

    fn persist(&self, engine: &Engine) {
        if let Some(path) = self.profile_path(engine.profile()) {
            if let Err(e) = write_profile(&path, engine.profile()) {
                eprintln!("wordpred: failed to save profile: {e}");
            }
        }
    }

    fn engine_for(&self, username: &str, lexicon: &Arc<Lexicon>) -> Result<Arc<Mutex<Engine>>, ApiError> {
        let key = (username.to_string(), lexicon.tag().clone());
        let mut engines = lock(&self.engines);
        if let Some(engine) = engines.get(&key) {
            return Ok(engine.clone());
        }
        let mut profile = UserProfile::new(username, lexicon.tag().clone())?;
        if let Some(path) = self.profile_path(&profile).filter(|p| p.exists()) {
            profile = read_profile(&path).map_err(|e| {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "profile_error", e.to_string())
            })?;
        }
        let engine = Arc::new(Mutex::new(Engine::new(lexicon.clone(), profile, self.config.engine)));
        engines.insert(key, engine.clone());
        Ok(engine)
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<LiveSession>>, ApiError> {
        lock(&self.sessions).get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }

    /// Drop sessions idle longer than the timeout, saving their profiles,
    /// and forget engines no session uses any more.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let expired: Vec<Arc<Mutex<LiveSession>>> = {
            let mut sessions = lock(&self.sessions);
            let ids: Vec<String> = sessions
                .iter()
                .filter(|(_, s)| now.saturating_duration_since(lock(s).last_active) >= self.config.idle_timeout)
                .map(|(id, _)| id.clone())
                .collect();
            ids.iter().filter_map(|id| sessions.remove(id)).collect()
        };
        let count = expired.len();
        for live in expired {
            let engine = lock(&live).engine.clone();
            self.persist(&lock(&engine));
        }
        lock(&self.engines).retain(|_, e| Arc::strong_count(e) > 1);
        count
    }
}

async fn list_corpora(State(app): State<Arc<AppState>>) -> Json<CorporaResponse> {
    let corpora = app
        .corpora
        .iter()
        .map(|(tag, lex)| CorpusInfo { tag: tag.clone(), words: lex.len() })
        .collect();
    Json(CorporaResponse { corpora })
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> Result<Json<SessionResponse>, ApiError> {
    let req: CreateSessionRequest = parse_json(&body)?;
    let lexicon = app.corpora.get(&req.corpus_tag).ok_or_else(|| {
        ApiError::new(StatusCode::NOT_FOUND, "unknown_corpus", format!("no corpus tagged {:?}", req.corpus_tag))
    })?;
    let engine = app.engine_for(&req.username, lexicon)?;
    let session = Session::new(&lock(&engine));
    let handle = SessionHandle {
        session_id: uuid::Uuid::new_v4().simple().to_string(),
        username: req.username,
        corpus_tag: req.corpus_tag,
        created_at: unix_now(),
    };
    let view = View::from(session.state());
    let live = LiveSession { handle: handle.clone(), session, engine, last_active: Instant::now() };
    lock(&app.sessions).insert(handle.session_id.clone(), Arc::new(Mutex::new(live)));
    Ok(Json(SessionResponse { handle, view }))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionResponse>, ApiError> {
    let live = app.session(&id)?;
    let mut live = lock(&live);
    live.last_active = Instant::now();
    let engine = live.engine.clone();
    live.session.resync(&lock(&engine));
    Ok(Json(SessionResponse { handle: live.handle.clone(), view: View::from(live.session.state()) }))
}

async fn end_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<EndSessionResponse>, ApiError> {
    let live = lock(&app.sessions).remove(&id).ok_or_else(|| ApiError::unknown_session(&id))?;
    let engine = lock(&live).engine.clone();
    app.persist(&lock(&engine));
    drop(live);
    lock(&app.engines).retain(|_, e| Arc::strong_count(e) > 1);
    Ok(Json(EndSessionResponse { session_id: id, ended: true }))
}

async fn post_event(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<View>, ApiError> {
    let live = app.session(&id)?;
    let req: EventRequest = parse_json(&body)?;
    let event = parse_event(&req)?;
    let mut live = lock(&live);
    live.last_active = Instant::now();
    let engine = live.engine.clone();
    let mut engine = lock(&engine);
    live.session.apply(&mut engine, event)?;
    if matches!(event, Event::Select(_)) && engine.config().adaptive {
        app.persist(&engine);
    }
    live.session.resync(&engine);
    Ok(Json(View::from(live.session.state())))
}

async fn add_word(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<AddWordResponse>, ApiError> {
    let live = app.session(&id)?;
    let req: AddWordRequest = parse_json(&body)?;
    let mut live = lock(&live);
    live.last_active = Instant::now();
    let engine = live.engine.clone();
    let mut engine = lock(&engine);
    let added = engine.add_word(&req.word)?;
    if added {
        app.persist(&engine);
    }
    live.session.resync(&engine);
    let word = Engine::normalize(&req.word);
    Ok(Json(AddWordResponse {
        effective_frequency: engine.effective_frequency(&word),
        word,
        added,
        view: View::from(live.session.state()),
    }))
}

async fn get_stats(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Stats>, ApiError> {
    let live = app.session(&id)?;
    let mut live = lock(&live);
    live.last_active = Instant::now();
    Ok(Json(Stats::from(live.session.counters())))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/corpora", get(list_corpora))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(end_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/words", post(add_word))
        .route("/sessions/{id}/stats", get(get_stats))
        .fallback(not_found)
        .with_state(app)
}

/// Periodically expire idle sessions.
pub fn spawn_expiry(app: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    let period = (app.config.idle_timeout / 4).clamp(Duration::from_millis(50), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            app.expire_idle(Instant::now());
        }
    })
}

/// Bind `127.0.0.1:port` (0 picks a free port).
pub async fn bind(port: u16) -> std::io::Result<tokio::net::TcpListener> {
    tokio::net::TcpListener::bind(SocketAddr::from((Ipv4Addr::LOCALHOST, port))).await
}

/// Serve until `shutdown` resolves, then save every live profile.
pub async fn serve(
    app: Arc<AppState>,
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let expiry = spawn_expiry(app.clone());
    let result = axum::serve(listener, router(app.clone())).with_graceful_shutdown(shutdown).await;
    expiry.abort();
    let engines: Vec<_> = lock(&app.engines).values().cloned().collect();
    for engine in engines {
        app.persist(&lock(&engine));
    }
    result
}
