//! Live game sessions over HTTP.
//!
//! | method | path                   |                                   |
//! |--------|------------------------|-----------------------------------|
//! | POST   | `/sessions`            | config keys plus `human`, `disclose_winner` |
//! | GET    | `/sessions/{id}`       | current state                     |
//! | GET    | `/sessions/{id}/hints` | annotated options for the mover   |
//! | POST   | `/sessions/{id}/move`  | a move, or `{"type":"engine"}`    |
//! | DELETE | `/sessions/{id}`       |                                   |
//! | POST   | `/solve`               | stateless solve of a config       |
//!
//! Errors are `{"code": <status>, "reason": <text>}`.

mod view;

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use efd_core::game::{Game, GameConfig, GameState, Move, Player, StrategyCertificate, TRANSCRIPT_SCHEMA};
use serde_json::{json, Value};

pub use view::{hints_view, state_view};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub reason: String,
}

impl ApiError {
    fn new(status: StatusCode, reason: impl Into<String>) -> Self {
        ApiError { status, reason: reason.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"code": self.status.as_u16(), "reason": self.reason}))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn bad_request(e: impl ToString) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, e.to_string())
}

pub struct Session {
    pub game: Game,
    pub state: GameState,
    pub human: Player,
    /// Present when the engine's side wins.
    pub certificate: Option<StrategyCertificate>,
    pub winner: Player,
    pub disclose_winner: bool,
    pub moves: Vec<Move>,
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    /// Directory for append-only JSON-lines transcripts, one file per session.
    transcripts: Option<PathBuf>,
}

impl AppState {
    pub fn new(transcripts: Option<PathBuf>) -> Self {
        AppState { transcripts, ..Default::default() }
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id}")))
    }

    fn log(&self, id: &str, line: Value) {
        let Some(dir) = &self.transcripts else { return };
        let file = OpenOptions::new().create(true).append(true).open(dir.join(format!("{id}.jsonl")));
        if let Ok(mut f) = file {
            let _ = writeln!(f, "{line}");
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/hints", get(get_hints))
        .route("/sessions/{id}/move", post(post_move))
        .route("/solve", post(solve))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

fn parse_body(body: &Bytes) -> ApiResult<Value> {
    serde_json::from_slice(body).map_err(bad_request)
}

fn session_json(id: &str, s: &Session) -> Value {
    let mut v = json!({
        "id": id,
        "human": s.human,
        "state": state_view(&s.game, &s.state),
    });
    if s.disclose_winner {
        v["winner_with_best_play"] = json!(s.winner);
    }
    v
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let mut v = parse_body(&body)?;
    let obj = v.as_object_mut().ok_or_else(|| bad_request("request must be an object"))?;
    let human: Player = match obj.remove("human") {
        Some(h) => serde_json::from_value(h).map_err(|e| bad_request(format!("human: {e}")))?,
        None => return Err(bad_request("missing human side")),
    };
    let disclose_winner = match obj.remove("disclose_winner") {
        Some(Value::Bool(b)) => b,
        None => false,
        Some(_) => return Err(bad_request("disclose_winner must be a boolean")),
    };
    let config = GameConfig::from_value(&v, None).map_err(bad_request)?;
    let logged = config.to_value();
    let session = tokio::task::spawn_blocking(move || -> efd_core::Result<Session> {
        let game = Game::new(config)?;
        let solved = game.solve()?;
        let engine = human.other();
        let certificate = (solved.winner == engine).then_some(solved.certificate);
        let state = game.new_game();
        Ok(Session { game, state, human, certificate, winner: solved.winner, disclose_winner, moves: Vec::new() })
    })
    .await
    .expect("solver task")
    .map_err(bad_request)?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::SeqCst) + 1);
    app.log(&id, json!({"schema": TRANSCRIPT_SCHEMA, "config": logged, "human": human}));
    let body = session_json(&id, &session);
    app.sessions.write().expect("session table").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(body)))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session");
    Ok(Json(session_json(&id, &s)))
}

async fn delete_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    match app.sessions.write().expect("session table").remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id}"))),
    }
}

async fn get_hints(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session");
    let hints = s.game.hint(&s.state).map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    Ok(Json(json!({"to_move": s.state.to_move(), "hints": hints_view(&hints)})))
}

fn conflict(reason: impl Into<String>) -> ApiError {
    ApiError::new(StatusCode::CONFLICT, reason)
}

fn advance(s: &mut Session, mv: Move) -> ApiResult<()> {
    let next = s.game.apply_move(&s.state, &mv).map_err(|e| match e {
        efd_core::Error::IllegalMove(reason) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, reason),
        other => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, other.to_string()),
    })?;
    s.state = next;
    s.moves.push(mv);
    Ok(())
}

fn engine_turn(s: &mut Session) -> ApiResult<Option<Move>> {
    if s.state.to_move() != Some(s.human.other()) {
        return Ok(None);
    }
    let mv = s
        .game
        .reply(&s.state, s.certificate.as_ref())
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    advance(s, mv.clone())?;
    Ok(Some(mv))
}

/// Applies the human's move and the engine's reply. `{"type": "engine"}`
/// asks the engine to move when it is its turn, as at the start of a game
/// where the human plays II.
async fn post_move(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let v = parse_body(&body)?;
    let session = app.session(&id)?;
    let mut s = session.lock().expect("session");
    let Some(mover) = s.state.to_move() else {
        return Err(conflict("the game is over"));
    };
    let engine_requested = v.get("type").and_then(Value::as_str) == Some("engine");
    let mut played = Vec::new();
    if engine_requested {
        if mover == s.human {
            return Err(conflict(format!("it is your turn (player {mover})")));
        }
    } else {
        if mover != s.human {
            return Err(conflict(format!("it is player {mover}'s turn")));
        }
        let mv: Move = serde_json::from_value(v).map_err(bad_request)?;
        advance(&mut s, mv.clone())?;
        played.push(json!({"by": "human", "move": mv}));
    }
    let engine_move = engine_turn(&mut s)?;
    if let Some(mv) = &engine_move {
        played.push(json!({"by": "engine", "move": mv}));
    }
    for line in played {
        app.log(&id, line);
    }
    let mut out = session_json(&id, &s);
    out["engine_move"] = json!(engine_move);
    Ok(Json(out))
}

/// Body: a game config, optionally with `"strategy": true` to include the
/// winner's certificate.
async fn solve(body: Bytes) -> ApiResult<Json<Value>> {
    let mut v = parse_body(&body)?;
    let obj = v.as_object_mut().ok_or_else(|| bad_request("request must be an object"))?;
    let with_strategy = matches!(obj.remove("strategy"), Some(Value::Bool(true)));
    let config = GameConfig::from_value(&v, None).map_err(bad_request)?;
    let out = tokio::task::spawn_blocking(move || -> efd_core::Result<Value> {
        let game = Game::new(config)?;
        let r = game.solve()?;
        let mut out = json!({
            "schema": TRANSCRIPT_SCHEMA,
            "winner": r.winner,
            "deciding_value": r.deciding_value,
            "stabilization_rank": r.stabilization_rank,
        });
        if with_strategy {
            out["certificate"] = serde_json::from_str(&r.certificate.to_json())?;
        }
        Ok(out)
    })
    .await
    .expect("solver task")
    .map_err(bad_request)?;
    Ok(Json(out))
}
