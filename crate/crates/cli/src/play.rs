//! Line-oriented play against the engine used by the session server.

use std::io::{BufRead, Write};
use std::path::Path;

use efd_core::bnf::Side;
use efd_core::game::{Game, GameConfig, GameState, Move, Player, Status, Transcript, Verdict, TRANSCRIPT_SCHEMA};
use efd_core::Error;
use serde_json::json;

use crate::Outcome;

const HELP: &str = "moves: `CLOCK SIDE ELEMENT` to challenge (e.g. `1 A a2`), `ELEMENT` to respond; also `hint`, `help`, `quit`";

fn describe(mv: &Move) -> String {
    match mv {
        Move::Challenge { clock, side, element } => format!("challenge {element} in {side} at clock {clock}"),
        Move::Response { element } => format!("respond {element}"),
    }
}

fn parse_move(line: &str) -> Option<Move> {
    let words: Vec<&str> = line.split_whitespace().collect();
    match words.as_slice() {
        [element] => Some(Move::Response { element: element.to_string() }),
        [clock, side, element] => {
            let side = match *side {
                "A" | "a" => Side::A,
                "B" | "b" => Side::B,
                _ => return None,
            };
            Some(Move::Challenge { clock: clock.to_string(), side, element: element.to_string() })
        }
        _ => None,
    }
}

fn show(game: &Game, state: &GameState, out: &mut impl Write) -> std::io::Result<()> {
    let cfg = game.config();
    let rounds: Vec<String> = state
        .rounds
        .iter()
        .map(|r| {
            let p = r.pair();
            format!("{}~{}", cfg.a.universe(p.sort)[p.a], cfg.b.universe(p.sort)[p.b])
        })
        .collect();
    let pending = state
        .pending
        .as_ref()
        .map(|p| format!(" | challenged {} in {} at clock {}", cfg.structure(p.side).universe(p.sort)[p.elem], p.side, p.clock))
        .unwrap_or_default();
    writeln!(out, "clock {} | pledged [{}] | r0 = {}{pending}", state.clock, rounds.join(", "), game.current_r0(state))
}

pub fn run(
    cfg: GameConfig,
    human: Player,
    input: &mut impl BufRead,
    out: &mut impl Write,
    transcript: Option<&Path>,
) -> Result<Outcome, Error> {
    let game = Game::new(cfg.clone())?;
    let solved = game.solve()?;
    let certificate = (solved.winner == human.other()).then_some(&solved.certificate);
    let mut state = game.new_game();
    let mut moves = Vec::new();
    writeln!(out, "you are player {human}; {HELP}")?;
    let mut line = String::new();
    while state.status == Status::InProgress {
        show(&game, &state, out)?;
        if state.to_move() != Some(human) {
            let mv = game.reply(&state, certificate)?;
            writeln!(out, "engine: {}", describe(&mv))?;
            state = game.apply_move(&state, &mv)?;
            moves.push(mv);
            continue;
        }
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        match line.trim() {
            "" => continue,
            "quit" => break,
            "help" => writeln!(out, "{HELP}")?,
            "hint" => {
                for h in game.hint(&state)? {
                    let clock = h.clock.map(|c| format!("clock {c}, ")).unwrap_or_default();
                    let mark = if h.winning { " (winning)" } else { "" };
                    writeln!(out, "  {clock}{} {}: {}{mark}", h.side, h.element, h.value)?;
                }
            }
            text => match parse_move(text) {
                None => writeln!(out, "cannot read {text:?}; {HELP}")?,
                Some(mv) => match game.apply_move(&state, &mv) {
                    Ok(next) => {
                        state = next;
                        moves.push(mv);
                    }
                    Err(e) => writeln!(out, "{e}")?,
                },
            },
        }
    }
    show(&game, &state, out)?;
    let verdict = Verdict::of(&game, &state);
    let summary = match state.status {
        Status::Finished(w) => format!("winner: {w}"),
        Status::InProgress if state.survived => "stopped; II has survived every round".to_string(),
        Status::InProgress => "stopped".to_string(),
    };
    if let Some(path) = transcript {
        let t = Transcript { config: cfg, moves, verdict: Some(verdict.clone()) };
        std::fs::write(path, t.to_json() + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(Outcome {
        text: summary,
        json: json!({"schema": TRANSCRIPT_SCHEMA, "verdict": verdict}),
        positive: state.status == Status::Finished(human),
    })
}
