use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use efd_core::clocks::ClockOrder;
use efd_core::game::{Game, GameConfig};
use efd_core::structure::two_point;
use efd_core::Rational;
use efd_server::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn config(d_b: Rational, clock: &str, eps: Rational) -> Value {
    let a = two_point(Rational::one(), "a");
    let b = two_point(d_b, "b");
    GameConfig::new(a, b, ClockOrder::parse(clock).unwrap(), eps).to_value()
}

fn two_pt(clock: &str, eps: Rational) -> Value {
    config(Rational::new(3, 2), clock, eps)
}

fn with(mut v: Value, key: &str, val: Value) -> Value {
    v[key] = val;
    v
}

struct Client {
    app: Arc<AppState>,
}

impl Client {
    fn new() -> Self {
        Client { app: Arc::new(AppState::default()) }
    }

    async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
        let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
        let resp = router(self.app.clone()).oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn create(&self, body: Value) -> String {
        let (status, v) = self.call("POST", "/sessions", Some(body)).await;
        assert_eq!(status, StatusCode::CREATED, "{v}");
        v["id"].as_str().unwrap().to_string()
    }

    async fn play(&self, id: &str, mv: Value) -> (StatusCode, Value) {
        self.call("POST", &format!("/sessions/{id}/move"), Some(mv)).await
    }
}

fn challenge(clock: &str, side: &str, element: &str) -> Value {
    json!({"type": "challenge", "clock": clock, "side": side, "element": element})
}

#[tokio::test]
async fn create_and_fetch() {
    let c = Client::new();
    let (status, v) = c.call("POST", "/sessions", Some(with(two_pt("2", Rational::new(3, 5)), "human", json!("I")))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["state"]["status"], "in_progress");
    assert_eq!(v["state"]["to_move"], "I");
    assert_eq!(v["state"]["legal"]["kind"], "challenge");
    assert!(v.get("winner_with_best_play").is_none());
    let id = v["id"].as_str().unwrap();
    let (status, got) = c.call("GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(got, v);
}

#[tokio::test]
async fn validation_failures_are_400() {
    let c = Client::new();
    let zero = with(two_pt("2", Rational::zero()), "human", json!("I"));
    let (status, v) = c.call("POST", "/sessions", Some(zero)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], 400);
    assert!(v["reason"].as_str().unwrap().contains("epsilon"));
    let (status, _) = c.call("POST", "/sessions", Some(two_pt("2", Rational::one()))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = c.call("POST", "/sessions", Some(json!("nope"))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn engine_copycats_on_identical_structures() {
    let c = Client::new();
    let body = with(config(Rational::one(), "w*", Rational::new(1, 4)), "human", json!("I"));
    let id = c.create(with(body, "disclose_winner", json!(true))).await;
    let (_, v) = c.call("GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(v["winner_with_best_play"], "II");
    for (clock, side, e) in [("0", "A", "a2"), ("1", "B", "b2"), ("3", "A", "a1"), ("7", "B", "b1")] {
        let (status, v) = c.play(&id, challenge(clock, side, e)).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        assert_eq!(v["engine_move"]["type"], "response");
        assert_eq!(v["state"]["r0"], "0/1");
        assert_eq!(v["state"]["status"], "in_progress");
    }
}

#[tokio::test]
async fn engine_reply_minimizes_hint_values() {
    for eps in [Rational::new(3, 5), Rational::new(2, 5)] {
        let c = Client::new();
        let cfg = two_pt("2", eps);
        let id = c.create(with(cfg.clone(), "human", json!("I"))).await;
        let (status, v) = c.play(&id, challenge("1", "A", "a2")).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        assert_eq!(v["state"]["rounds"][0]["spoiler"], "a2");

        let game = Game::new(GameConfig::from_value(&cfg, None).unwrap()).unwrap();
        let mid = game.apply_move(&game.new_game(), &serde_json::from_value(challenge("1", "A", "a2")).unwrap()).unwrap();
        let hints = game.hint(&mid).unwrap();
        let best = hints.iter().map(|h| h.value.clone()).min().unwrap();
        let reply = v["engine_move"]["element"].as_str().unwrap();
        let chosen = hints.iter().find(|h| h.element == reply).unwrap();
        assert_eq!(chosen.value, best);
        assert_eq!(v["state"]["to_move"], "I");
    }
}

#[tokio::test]
async fn illegal_moves_and_turn_errors() {
    let c = Client::new();
    let id = c.create(with(two_pt("3", Rational::new(3, 5)), "human", json!("I"))).await;
    c.play(&id, challenge("1", "A", "a1")).await;
    let (status, v) = c.play(&id, challenge("1", "A", "a2")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v, json!({"code": 422, "reason": "clock must strictly decrease"}));
    let (status, _) = c.play(&id, challenge("0", "A", "zz")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = c.play(&id, json!({"type": "response", "element": "b1"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = c.play(&id, json!({"type": "engine"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = c.play(&id, json!({"type": "teleport"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, v) = c.play(&id, challenge("0", "B", "b2")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["state"]["status"], "finished");
    assert_eq!(v["state"]["winner"], "II");
    assert!(v["state"]["r0"].is_string());
    let (status, _) = c.play(&id, challenge("0", "A", "a1")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = c.call("GET", &format!("/sessions/{id}/hints"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let id = c.create(with(two_pt("2", Rational::new(3, 5)), "human", json!("II"))).await;
    let (status, v) = c.play(&id, challenge("1", "A", "a1")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["code"], 409);
}

#[tokio::test]
async fn hints_for_a_fresh_duplicator_game() {
    let c = Client::new();
    let id = c.create(with(two_pt("2", Rational::new(2, 5)), "human", json!("II"))).await;
    let (status, v) = c.call("GET", &format!("/sessions/{id}/hints"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["to_move"], "I");
    let hints = v["hints"].as_array().unwrap();
    // Two clock values times four elements.
    assert_eq!(hints.len(), 8);
    assert!(hints.iter().any(|h| h["value"] == "1/2" && h["winning"] == true));
    assert!(hints.iter().all(|h| h["clock"].is_string()));

    let (_, v) = c.play(&id, json!({"type": "engine"})).await;
    assert_eq!(v["engine_move"]["type"], "challenge");
    assert_eq!(v["state"]["to_move"], "II");
}

#[tokio::test]
async fn copycat_hint_is_zero_and_winning() {
    let c = Client::new();
    let id = c.create(with(config(Rational::one(), "2", Rational::new(1, 4)), "human", json!("II"))).await;
    let (_, v) = c.play(&id, json!({"type": "engine"})).await;
    let spoiler = v["state"]["pending"]["element"].as_str().unwrap();
    let mirror = spoiler.replace('a', "B").replace('b', "a").replace('B', "b");
    let (_, h) = c.call("GET", &format!("/sessions/{id}/hints"), None).await;
    let hint = h["hints"].as_array().unwrap().iter().find(|x| x["element"] == mirror.as_str()).unwrap().clone();
    assert_eq!(hint["value"], "0/1");
    assert_eq!(hint["winning"], true);
}

#[tokio::test]
async fn delete_and_unknown_sessions() {
    let c = Client::new();
    let id = c.create(with(two_pt("1", Rational::new(1, 2)), "human", json!("I"))).await;
    let (status, _) = c.call("DELETE", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    for (m, uri) in [("GET", format!("/sessions/{id}")), ("GET", format!("/sessions/{id}/hints")), ("DELETE", format!("/sessions/{id}"))] {
        let (status, v) = c.call(m, &uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(v["code"], 404);
    }
    let (status, _) = c.play("nope", challenge("0", "A", "a1")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stateless_solve() {
    let c = Client::new();
    let (status, v) = c.call("POST", "/solve", Some(two_pt("2", Rational::new(3, 5)))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["winner"], "II");
    assert_eq!(v["schema"], "efd/1");
    assert!(v.get("certificate").is_none());
    let (_, v) = c.call("POST", "/solve", Some(with(two_pt("w*", Rational::new(2, 5)), "strategy", json!(true)))).await;
    assert_eq!(v["winner"], "I");
    assert_eq!(v["deciding_value"], "1/2");
    assert_eq!(v["stabilization_rank"], 2);
    assert!(v["certificate"].is_object());
    let (status, _) = c.call("POST", "/solve", Some(json!({"clock": "2"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn identical_requests_give_identical_states() {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let c = Client::new();
        let id = c.create(with(two_pt("3", Rational::new(2, 5)), "human", json!("II"))).await;
        let mut seen = Vec::new();
        for mv in [json!({"type": "engine"}), json!({"type": "response", "element": "b1"}), json!({"type": "response", "element": "a2"})] {
            seen.push(c.play(&id, mv).await);
        }
        runs.push(seen);
    }
    assert_eq!(runs[0], runs[1]);
}

#[tokio::test]
async fn transcripts_are_appended() {
    let dir = tempfile::tempdir().unwrap();
    let c = Client { app: Arc::new(AppState::new(Some(dir.path().to_path_buf()))) };
    let id = c.create(with(two_pt("2", Rational::new(3, 5)), "human", json!("I"))).await;
    c.play(&id, challenge("1", "A", "a2")).await;
    let text = std::fs::read_to_string(dir.path().join(format!("{id}.jsonl"))).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["schema"], "efd/1");
    assert_eq!(lines[1]["by"], "human");
    assert_eq!(lines[2]["by"], "engine");
}
