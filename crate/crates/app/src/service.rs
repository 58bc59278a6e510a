//! JSON-over-HTTP sessions under `/v1`.
//!
//! Each session sits behind its own lock, so requests to one session are
//! serialized while different sessions proceed independently. Sessions idle
//! for longer than the configured timeout are dropped and answer 404.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use riodbg_core::session::{SessionStatus, SessionTrace};
use riodbg_core::{parse_dpi, Answer, CautiousnessState, FaultPriors, QueryOptions, Session, SessionConfig, SessionError, StrategyKind};
use serde::{Deserialize, Serialize};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(3600);

struct Entry {
    session: Session,
    last_access: Instant,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Entry>>>>>,
    idle_timeout: Duration,
}

impl AppState {
    pub fn new(idle_timeout: Duration) -> Self {
        AppState { sessions: Arc::default(), idle_timeout }
    }

    fn lookup(&self, id: &str) -> Option<Arc<Mutex<Entry>>> {
        let mut sessions = self.sessions.lock().expect("session table lock");
        let now = Instant::now();
        sessions.retain(|_, entry| {
            // A session busy in another request is in use, not idle.
            entry.try_lock().map_or(true, |e| now.duration_since(e.last_access) < self.idle_timeout)
        });
        sessions.get(id).cloned()
    }

    fn insert(&self, session: Session) -> (String, Arc<Mutex<Entry>>) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let entry = Arc::new(Mutex::new(Entry { session, last_access: Instant::now() }));
        self.sessions.lock().expect("session table lock").insert(id.clone(), entry.clone());
        (id, entry)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/sessions", post(create))
        .route("/v1/sessions/{id}", get(show))
        .route("/v1/sessions/{id}/answer", post(answer))
        .route("/v1/sessions/{id}/trace", get(trace))
        .with_state(state)
}

/// Session settings; omitted fields take the session defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigRequest {
    pub strategy: Option<StrategyKind>,
    pub n: Option<usize>,
    pub sigma: Option<f64>,
    pub c: Option<f64>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub priors: Option<FaultPriors>,
    pub implications: Option<bool>,
}

impl ConfigRequest {
    pub fn into_config(self) -> Result<SessionConfig, String> {
        let priors = self.priors.unwrap_or(FaultPriors::Axiom { probs: Default::default(), default: Some(0.01) });
        let mut config = SessionConfig::new(self.strategy.unwrap_or(StrategyKind::Rio), priors);
        let base = config.cautiousness;
        config.cautiousness = CautiousnessState::new(
            self.c.unwrap_or(base.c),
            self.c_min.unwrap_or(base.c_min),
            self.c_max.unwrap_or(base.c_max),
            self.epsilon.unwrap_or(base.epsilon),
        )
        .map_err(|e| e.to_string())?;
        config.n = self.n.unwrap_or(config.n);
        config.sigma = self.sigma.unwrap_or(config.sigma);
        config.seed = self.seed.unwrap_or(config.seed);
        config.query_options = QueryOptions { implications: self.implications.unwrap_or(false) };
        Ok(config)
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    /// DPI in the text format.
    pub dpi: String,
    #[serde(default)]
    pub config: ConfigRequest,
}

#[derive(Debug, Deserialize)]
pub struct AnswerRequest {
    pub query_id: u64,
    pub answer: Answer,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct QueryView {
    pub id: u64,
    pub axioms: Vec<String>,
    /// `[|DX|, |DNX|, |D∅|]`
    pub partition: [usize; 3],
    pub catalog_size: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct DiagnosisView {
    pub diagnosis: Vec<String>,
    pub p: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SessionView {
    pub id: String,
    pub status: SessionStatus,
    pub strategy: StrategyKind,
    pub pending_query: Option<QueryView>,
    pub diagnoses: Vec<DiagnosisView>,
    pub cautiousness: CautiousnessState,
    pub rounds: usize,
    pub accepted: Option<Vec<String>>,
    pub error: Option<String>,
}

impl SessionView {
    fn of(id: &str, s: &Session) -> Self {
        let o = &s.dpi().o;
        let owned = |ids: Vec<&str>| ids.into_iter().map(str::to_owned).collect::<Vec<_>>();
        SessionView {
            id: id.to_owned(),
            status: s.status().clone(),
            strategy: s.config().strategy,
            pending_query: s.pending().map(|p| {
                let (dx, dnx, dz) = p.query.partition.sizes();
                QueryView { id: p.id, axioms: p.query.rendered(), partition: [dx, dnx, dz], catalog_size: p.catalog_size }
            }),
            diagnoses: s
                .diagnoses()
                .iter()
                .zip(s.probabilities())
                .map(|(d, &p)| DiagnosisView { diagnosis: owned(d.ids(o)), p })
                .collect(),
            cautiousness: *s.cautiousness(),
            rounds: s.trace().queries(),
            accepted: s.result().map(|d| owned(d.ids(o))),
            error: s.error().map(ToString::to_string),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(ErrorBody { error: message.into() })).into_response()
}

fn not_found(id: &str) -> Response {
    error(StatusCode::NOT_FOUND, format!("unknown session `{id}`"))
}

async fn create(State(state): State<AppState>, body: Result<Json<CreateRequest>, JsonRejection>) -> Response {
    let Json(req) = match body {
        Ok(body) => body,
        Err(rejection) => return error(StatusCode::UNPROCESSABLE_ENTITY, rejection.body_text()),
    };
    let dpi = match parse_dpi(&req.dpi) {
        Ok(dpi) => dpi,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("invalid DPI: {e}")),
    };
    let config = match req.config.into_config() {
        Ok(config) => config,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("invalid configuration: {e}")),
    };
    let started = tokio::task::spawn_blocking(move || Session::start(dpi, config)).await.expect("session start task");
    match started {
        Ok(session) => {
            let (id, entry) = state.insert(session);
            let view = SessionView::of(&id, &entry.lock().expect("session lock").session);
            (StatusCode::CREATED, Json(view)).into_response()
        }
        Err(failure) => error(StatusCode::UNPROCESSABLE_ENTITY, failure.error.to_string()),
    }
}

async fn show(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    let Some(entry) = state.lookup(&id) else { return not_found(&id) };
    let mut entry = entry.lock().expect("session lock");
    entry.last_access = Instant::now();
    Json(SessionView::of(&id, &entry.session)).into_response()
}

async fn answer(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<AnswerRequest>, JsonRejection>,
) -> Response {
    let Some(entry) = state.lookup(&id) else { return not_found(&id) };
    let Json(req) = match body {
        Ok(body) => body,
        Err(rejection) => return error(StatusCode::UNPROCESSABLE_ENTITY, rejection.body_text()),
    };
    tokio::task::spawn_blocking(move || {
        let mut entry = entry.lock().expect("session lock");
        entry.last_access = Instant::now();
        match entry.session.step(req.query_id, req.answer) {
            Ok(_) => Json(SessionView::of(&id, &entry.session)).into_response(),
            Err(e @ (SessionError::StaleQuery { .. } | SessionError::NoPendingQuery)) => {
                error(StatusCode::CONFLICT, e.to_string())
            }
            // Any other failure ends the session; the view reports it.
            Err(_) => Json(SessionView::of(&id, &entry.session)).into_response(),
        }
    })
    .await
    .expect("answer task")
}

async fn trace(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    let Some(entry) = state.lookup(&id) else { return not_found(&id) };
    let mut entry = entry.lock().expect("session lock");
    entry.last_access = Instant::now();
    let trace: &SessionTrace = entry.session.trace();
    Json(trace.clone()).into_response()
}

pub async fn serve(addr: std::net::SocketAddr, idle_timeout: Duration) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}/v1", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(idle_timeout))).await
}
