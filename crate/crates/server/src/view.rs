use efd_core::game::{Game, GameState, Hint, LegalMoves};
use serde_json::{json, Value};

/// The session state with element ids and "p/q" values.
pub fn state_view(game: &Game, state: &GameState) -> Value {
    let cfg = game.config();
    let rounds: Vec<Value> = state
        .rounds
        .iter()
        .map(|r| {
            let spoiler = cfg.structure(r.side);
            let duplicator = cfg.structure(r.side.other());
            json!({
                "clock": r.clock.to_string(),
                "side": r.side,
                "spoiler": spoiler.universe(r.sort)[r.spoiler],
                "duplicator": duplicator.universe(r.sort)[r.duplicator],
            })
        })
        .collect();
    let pending = state.pending.as_ref().map(|p| {
        json!({
            "clock": p.clock.to_string(),
            "side": p.side,
            "element": cfg.structure(p.side).universe(p.sort)[p.elem],
        })
    });
    let legal = match game.legal_moves(state) {
        LegalMoves::GameOver => json!({"kind": "game_over"}),
        LegalMoves::Challenge { below, a, b } => json!({"kind": "challenge", "below": below.to_string(), "a": a, "b": b}),
        LegalMoves::Response { side, elements } => json!({"kind": "response", "side": side, "elements": elements}),
    };
    let verdict = efd_core::game::Verdict::of(game, state);
    json!({
        "status": verdict.status,
        "winner": verdict.winner,
        "to_move": state.to_move(),
        "clock": state.clock.to_string(),
        "rounds": rounds,
        "pending": pending,
        "r0": verdict.r0,
        "survived": verdict.survived,
        "legal": legal,
    })
}

pub fn hints_view(hints: &[Hint]) -> Value {
    serde_json::to_value(hints).expect("hints serialize")
}
