//! HTTP service for live games between a human and an agent.
//!
//! Routes:
//! - `POST /sessions` creates a game
//! - `GET /sessions/{id}` returns the human's view
//! - `POST /sessions/{id}/actions` plays a human action and the agent's reply
//! - `GET /sessions/{id}/events?cursor=N` streams events as SSE
//! - `GET /sessions/{id}/beliefs` returns the agent's belief (debug sessions)

pub mod error;
pub mod session;

use std::collections::HashMap;
use std::convert::Infallible;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use jigsaw_core::agent::{Agent, PolicySpec};
use jigsaw_core::baselines::greedy_posterior;
use jigsaw_core::belief::{belief_marginals, BeliefMarginals};
use jigsaw_core::game::check_action;
use jigsaw_core::scenario_gen;
use jigsaw_core::{Action, Cell, Message, PipConfig, Role, Scenario, Semantics};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tokio::sync::Notify;

pub use error::ApiError;
pub use session::{Event, EventBody, ReplyMode, Scoreboard, Session, SessionView, Status};

#[derive(Clone, Debug, Default)]
pub struct ServiceOptions {
    /// Finished games are appended here as transcript JSONL.
    pub export: Option<PathBuf>,
}

struct AgentSlot {
    agent: Agent,
    rng: ChaCha8Rng,
}

struct Entry {
    session: Mutex<Session>,
    agent: Arc<Mutex<AgentSlot>>,
    /// Serializes state-changing requests on one session.
    turn: tokio::sync::Mutex<()>,
    notify: Notify,
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Arc<Entry>>>>,
    export_lock: Arc<Mutex<()>>,
    opts: Arc<ServiceOptions>,
}

impl AppState {
    pub fn new(opts: ServiceOptions) -> Self {
        AppState { opts: Arc::new(opts), ..Default::default() }
    }

    fn entry(&self, id: &str) -> Result<Arc<Entry>, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    /// Full scenario of a session, partner symbols included. Not exposed
    /// over HTTP.
    pub fn scenario_of(&self, id: &str) -> Option<Scenario> {
        let e = self.entry(id).ok()?;
        let s = e.session.lock().expect("session lock");
        Some(s.scenario().clone())
    }

    fn export(&self, session: &Session) {
        let Some(path) = &self.opts.export else { return };
        let _guard = self.export_lock.lock().expect("export lock");
        let line = serde_json::to_string(&session.transcript()).expect("transcripts serialize");
        let res = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| writeln!(f, "{line}"));
        if let Err(e) = res {
            tracing::warn!("could not export session {}: {e}", session.id);
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/actions", post(post_action))
        .route("/sessions/{id}/events", get(stream_events))
        .route("/sessions/{id}/beliefs", get(debug_beliefs))
        .with_state(state)
}

/// Binds `0.0.0.0:port` and serves until the process ends.
pub async fn serve(port: u16, opts: ServiceOptions) -> std::io::Result<()> {
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(opts))).await
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let msg = if path == "." { e.inner().to_string() } else { format!("{path}: {}", e.inner()) };
        ApiError::bad_request("invalid_request", msg)
    })
}

fn default_agent() -> String {
    "pip".into()
}

fn default_role() -> Role {
    Role::Letters
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default)]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_role")]
    pub human_role: Role,
    #[serde(default = "default_agent")]
    pub agent: String,
    #[serde(default)]
    pub config: PipConfig,
    #[serde(default)]
    pub debug: bool,
    #[serde(default)]
    pub mode: ReplyMode,
    /// Seed for the agent's sampling; derived from the session id if absent.
    #[serde(default)]
    pub agent_seed: Option<u64>,
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    req.config.validate().map_err(|e| match e {
        jigsaw_core::PlanError::InvalidConfig { field, message } => {
            ApiError::bad_request("invalid_config", format!("config.{field}: {message}"))
        }
        other => other.into(),
    })?;
    let spec = PolicySpec::parse(&req.agent, &req.config)?;
    let id = uuid::Uuid::new_v4();
    let scenario = match (req.scenario, req.seed) {
        (Some(s), _) => s.validate()?,
        (None, Some(seed)) => scenario_gen::generate(seed)?,
        (None, None) => scenario_gen::generate(id.as_u64_pair().0)?,
    };
    let sem = Arc::new(Semantics::new(scenario));
    let agent = Agent::new(spec, sem.clone())?;
    let agent_seed = req.agent_seed.unwrap_or(id.as_u64_pair().1);
    let first = sem.scenario().first_player;
    let status =
        if first == req.human_role { Status::AwaitingHuman } else { Status::AwaitingAgent };
    let session = Session {
        id: id.to_string(),
        sem,
        human_role: req.human_role,
        agent_name: spec.to_string(),
        config: req.config,
        history: jigsaw_core::History::new(first),
        status,
        scoreboard: Scoreboard::default(),
        events: Vec::new(),
        outcome: None,
        debug: req.debug,
        mode: req.mode,
    };
    let entry = Arc::new(Entry {
        session: Mutex::new(session),
        agent: Arc::new(Mutex::new(AgentSlot { agent, rng: ChaCha8Rng::seed_from_u64(agent_seed) })),
        turn: tokio::sync::Mutex::new(()),
        notify: Notify::new(),
    });
    let _turn = entry.turn.lock().await;
    state.sessions.write().expect("session map lock").insert(id.to_string(), entry.clone());
    agent_turns(&state, &entry).await?;
    let view = entry.session.lock().expect("session lock").view();
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionView>, ApiError> {
    let e = state.entry(&id)?;
    let view = e.session.lock().expect("session lock").view();
    Ok(Json(view))
}

/// Human action: `{"type":"message","text":"blue top"}`,
/// `{"type":"message","words":["blue","top"]}` or
/// `{"type":"click","row":1,"col":2}`.
#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ActionRequest {
    Message {
        #[serde(default)]
        text: Option<String>,
        #[serde(default)]
        words: Option<Vec<String>>,
    },
    Click {
        row: u8,
        col: u8,
    },
}

impl ActionRequest {
    fn to_action(&self, sem: &Semantics) -> Result<Action, ApiError> {
        match self {
            ActionRequest::Click { row, col } => Ok(Action::Click(Cell::new(*row, *col))),
            ActionRequest::Message { text, words } => {
                let words: Vec<String> = match (text, words) {
                    (Some(t), _) => t.split_whitespace().map(str::to_lowercase).collect(),
                    (None, Some(w)) => w.iter().map(|s| s.trim().to_lowercase()).collect(),
                    (None, None) => Vec::new(),
                };
                Ok(Action::Message(Message::from_words(&words, sem.vocabulary())?))
            }
        }
    }
}

async fn post_action(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    let entry = state.entry(&id)?;
    let req: ActionRequest = parse_body(&body)?;
    let _turn = entry.turn.lock().await;
    {
        let mut s = entry.session.lock().expect("session lock");
        match s.status {
            Status::AwaitingHuman => {}
            Status::Finished => return Err(jigsaw_core::Rule::GameOver.into()),
            Status::AwaitingAgent => return Err(ApiError::wrong_turn("it is the agent's turn")),
        }
        let action = req.to_action(&s.sem)?;
        let own = s.scenario().private_state(s.human_role);
        check_action(&s.sem, &s.history, own, &action)?;
        s.record(action, session::Actor::Human);
        if s.status == Status::Finished {
            state.export(&s);
        }
    }
    entry.notify.notify_waiters();
    agent_turns(&state, &entry).await?;
    let view = entry.session.lock().expect("session lock").view();
    Ok(Json(view))
}

/// Plays agent moves until it is the human's turn or the game ends.
async fn agent_turns(state: &AppState, entry: &Arc<Entry>) -> Result<(), ApiError> {
    loop {
        let (history, sem, role, mode) = {
            let s = entry.session.lock().expect("session lock");
            if s.status != Status::AwaitingAgent {
                return Ok(());
            }
            (s.history.clone(), s.sem.clone(), s.agent_role(), s.mode)
        };
        let slot = entry.agent.clone();
        let own = sem.scenario().private_state(role);
        let action = tokio::task::spawn_blocking(move || {
            let mut slot = slot.lock().expect("agent lock");
            let dist = slot.agent.policy(own, &history)?;
            Ok::<_, jigsaw_core::PlanError>(match mode {
                ReplyMode::Sample => dist.sample(&mut slot.rng),
                ReplyMode::Argmax => dist.argmax().expect("nonempty policy"),
            })
        })
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
        {
            let mut s = entry.session.lock().expect("session lock");
            let own = s.scenario().private_state(role);
            check_action(&s.sem, &s.history, own, &action)
                .map_err(|r| ApiError::internal(format!("agent chose an illegal action: {r}")))?;
            s.record(action, session::Actor::Agent);
            if s.status == Status::Finished {
                state.export(&s);
            }
        }
        entry.notify.notify_waiters();
    }
}

#[derive(Debug, Deserialize)]
struct EventsQuery {
    #[serde(default)]
    cursor: Option<usize>,
}

/// Server-sent events from `cursor` (or `Last-Event-ID` + 1) onward. The
/// stream closes after the outcome event.
async fn stream_events(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<EventsQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ApiError> {
    let entry = state.entry(&id)?;
    let resume = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<usize>().ok())
        .map(|n| n + 1);
    let cursor = q.cursor.or(resume).unwrap_or(0);
    let stream = futures::stream::unfold((entry, cursor), |(entry, cursor)| async move {
        loop {
            // `None`: wait for more; `Some(None)`: stream finished.
            let step: Option<Option<SseEvent>> = {
                let notified = entry.notify.notified();
                futures::pin_mut!(notified);
                notified.as_mut().enable();
                let (next, done) = {
                    let s = entry.session.lock().expect("session lock");
                    let done = s.status == Status::Finished && cursor >= s.events.len();
                    (s.events.get(cursor).cloned(), done)
                };
                match next {
                    Some(ev) => Some(Some(
                        SseEvent::default()
                            .id(ev.seq.to_string())
                            .event(ev.kind())
                            .json_data(&ev)
                            .expect("events serialize"),
                    )),
                    None if done => Some(None),
                    None => {
                        notified.await;
                        None
                    }
                }
            };
            match step {
                Some(Some(sse)) => return Some((Ok(sse), (entry, cursor + 1))),
                Some(None) => return None,
                None => continue,
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

#[derive(Debug, Serialize)]
pub struct BeliefsView {
    /// The agent's role.
    pub viewer: Role,
    pub level: usize,
    /// Number of actions the belief conditions on.
    pub t: usize,
    pub marginals: BeliefMarginals,
}

async fn debug_beliefs(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<BeliefsView>, ApiError> {
    let entry = state.entry(&id)?;
    let (mut history, sem, viewer, debug) = {
        let s = entry.session.lock().expect("session lock");
        (s.history.clone(), s.sem.clone(), s.agent_role(), s.debug)
    };
    if !debug {
        return Err(ApiError::new(
            StatusCode::FORBIDDEN,
            "debug_disabled",
            "create the session with \"debug\": true to inspect beliefs",
        ));
    }
    if history.is_terminal() {
        history = history.prefix(history.len() - 1);
    }
    let slot = entry.agent.clone();
    let view = tokio::task::spawn_blocking(move || {
        let mut slot = slot.lock().expect("agent lock");
        let own = sem.scenario().private_state(viewer);
        let (post, level) = match slot.agent.planner_mut() {
            Some(p) => {
                let k = p.config().k;
                (p.posterior(viewer, own, &history, k)?, k)
            }
            None => (greedy_posterior(&sem, own, &history), 0),
        };
        let scen = sem.scenario();
        Ok::<_, jigsaw_core::PlanError>(BeliefsView {
            viewer,
            level,
            t: history.len(),
            marginals: belief_marginals(&post, scen.rows, scen.cols),
        })
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(view))
}
