use super::*;
use crate::clocks::Cnf;
use crate::structure::{chain, two_point};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn two_pt(eps: Rational, clock: &str) -> Game {
    let a = two_point(q(1, 1), "a");
    let b = two_point(q(3, 2), "b");
    Game::new(GameConfig::new(a, b, ClockOrder::parse(clock).unwrap(), eps)).unwrap()
}

fn chains(m: usize, n: usize, clock: &str, eps: Rational) -> Game {
    Game::new(GameConfig::new(chain(m, "a"), chain(n, "b"), ClockOrder::parse(clock).unwrap(), eps)).unwrap()
}

fn challenge(clock: &str, side: Side, element: &str) -> Move {
    Move::Challenge { clock: clock.into(), side, element: element.into() }
}

fn respond(element: &str) -> Move {
    Move::Response { element: element.into() }
}

#[test]
fn fresh_state_and_config_errors() {
    let g = two_pt(q(1, 2), "2");
    let s = g.new_game();
    assert_eq!(s.clock, ClockValue::Top);
    assert!(s.position().is_empty());
    assert_eq!(s.status, Status::InProgress);

    let mut cfg = g.config().clone();
    cfg.epsilon = Rational::zero();
    assert!(matches!(new_game(&cfg), Err(Error::Invalid(_))));
    cfg.epsilon = q(1, 2);
    cfg.b = chain(2, "b");
    assert!(matches!(new_game(&cfg), Err(Error::Invalid(_))));
}

#[test]
fn legal_move_descriptors() {
    let g = two_pt(q(1, 2), "w");
    let s = g.new_game();
    match g.legal_moves(&s) {
        LegalMoves::Challenge { below, a, b } => {
            assert_eq!(below, ClockValue::Top);
            assert_eq!(a, ["a1", "a2"]);
            assert_eq!(b, ["b1", "b2"]);
        }
        other => panic!("{other:?}"),
    }
    let s = g.apply_move(&s, &challenge("5", Side::A, "a2")).unwrap();
    assert_eq!(g.legal_moves(&s), LegalMoves::Response { side: Side::B, elements: vec!["b1".into(), "b2".into()] });

    let empty = two_pt(q(1, 2), "0");
    assert_eq!(empty.legal_moves(&empty.new_game()), LegalMoves::GameOver);
}

#[test]
fn illegal_moves_are_rejected() {
    let g = two_pt(q(1, 2), "3");
    let s = g.new_game();
    assert!(g.apply_move(&s, &respond("b1")).is_err());
    assert!(g.apply_move(&s, &challenge("3", Side::A, "a1")).is_err());
    assert!(g.apply_move(&s, &challenge("1", Side::A, "b1")).is_err());
    let s = g.apply_move(&s, &challenge("1", Side::A, "a1")).unwrap();
    assert!(g.apply_move(&s, &respond("a2")).is_err());
    let s = g.apply_move(&s, &respond("b1")).unwrap();
    let err = g.apply_move(&s, &challenge("1", Side::B, "b2")).unwrap_err();
    assert!(err.to_string().contains("clock must strictly decrease"), "{err}");
}

#[test]
fn spoiler_wins_chains_two_three() {
    let g = chains(2, 3, "2", q(1, 2));
    let s = g.new_game();
    let s = g.apply_move(&s, &challenge("1", Side::B, "b2")).unwrap();
    for d in ["a1", "a2"] {
        let t = g.apply_move(&s, &respond(d)).unwrap();
        assert_eq!(t.status, Status::InProgress);
        let exposing = if d == "a1" { "b1" } else { "b3" };
        let t = g.apply_move(&t, &challenge("0", Side::B, exposing)).unwrap();
        for e in ["a1", "a2"] {
            let u = g.apply_move(&t, &respond(e)).unwrap();
            assert_eq!(u.status, Status::Finished(Player::I));
            assert_eq!(g.current_r0(&u), Rational::one());
        }
    }
}

#[test]
fn copycat_survives_to_the_minimum() {
    let g = Game::new(GameConfig::new(chain(3, "a"), chain(3, "b"), ClockOrder::Finite(2), q(1, 10))).unwrap();
    let cert = g.copycat_certificate().unwrap();
    let mut s = g.new_game();
    s = g.apply_move(&s, &challenge("1", Side::A, "a3")).unwrap();
    s = g.apply_move(&s, &g.engine_move(&s, &cert).unwrap()).unwrap();
    assert_eq!(s.rounds[0].duplicator, 2);
    s = g.apply_move(&s, &challenge("0", Side::B, "b1")).unwrap();
    s = g.apply_move(&s, &g.engine_move(&s, &cert).unwrap()).unwrap();
    assert_eq!(s.status, Status::Finished(Player::II));
    assert!(g.current_r0(&s).is_zero());
}

#[test]
fn solve_examples() {
    let r = two_pt(q(2, 5), "2").solve().unwrap();
    assert_eq!(r.winner, Player::I);
    assert_eq!(r.deciding_value, q(1, 2));
    let r = two_pt(q(3, 5), "2").solve().unwrap();
    assert_eq!(r.winner, Player::II);
    assert_eq!(r.deciding_value, q(1, 2));

    for clock in ["1", "3", "w", "w*", "0"] {
        let a = two_point(q(1, 1), "a");
        let cfg = GameConfig::new(a.clone(), a, ClockOrder::parse(clock).unwrap(), q(1, 100));
        assert_eq!(solve(&cfg).unwrap().winner, Player::II, "{clock}");
    }

    let r = chains(2, 3, "w*", q(1, 2)).solve().unwrap();
    assert_eq!(r.winner, Player::I);
    assert_eq!(r.deciding_value, Rational::one());
    assert_eq!(r.stabilization_rank, Some(2));
}

#[test]
fn spoiler_certificate_opens_in_the_middle() {
    let g = chains(2, 3, "2", q(1, 2));
    assert!(matches!(g.extract_strategy(Player::II), Err(Error::NotWinner(_))));
    let cert = g.extract_strategy(Player::I).unwrap();
    let first = cert.challenge(Room::Rank(2), &CanonicalPosition::empty()).unwrap();
    assert_eq!((first.side, first.elem, first.rank), (Side::B, 1, 1));
    assert_eq!(g.engine_move(&g.new_game(), &cert).unwrap(), challenge("1", Side::B, "b2"));
    assert!(g.verify_strategy(&cert, 4).ok);
}

#[test]
fn duplicator_certificates_verify() {
    let g = two_pt(q(3, 5), "2");
    let cert = g.extract_strategy(Player::II).unwrap();
    let v = g.verify_strategy(&cert, 4);
    assert!(v.ok, "{v:?}");
    assert!(v.positions_checked > 1);
    for (_, &d) in &cert.responses {
        assert!(d < 2);
    }
}

#[test]
fn copycat_with_a_deleted_response_fails() {
    let a = two_point(q(1, 1), "a");
    let b = two_point(q(1, 1), "b");
    let g = Game::new(GameConfig::new(a, b, ClockOrder::Finite(2), q(1, 4))).unwrap();
    let mut cert = g.copycat_certificate().unwrap();
    assert!(g.verify_strategy(&cert, 3).ok);
    let key = (Room::Rank(1), CanonicalPosition::empty(), Side::A, 0, 1);
    assert!(cert.responses.remove(&key).is_some());
    let v = g.verify_strategy(&cert, 3);
    assert!(!v.ok);
    assert_eq!(v.violation.as_deref(), Some("missing response at (1, a2)"));
}

#[test]
fn certificate_json_round_trip() {
    let g = chains(2, 3, "w*", q(1, 2));
    let cert = g.extract_strategy(Player::I).unwrap();
    let text = cert.to_json();
    let back = StrategyCertificate::from_json(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(back.to_json(), text);
    assert!(g.verify_strategy(&back, 6).ok);
}

#[test]
fn engine_turn_errors() {
    let a = two_point(q(1, 1), "a");
    let b = two_point(q(1, 1), "b");
    let g = Game::new(GameConfig::new(a, b, ClockOrder::Finite(2), q(1, 4))).unwrap();
    let cert = g.copycat_certificate().unwrap();
    let s = g.new_game();
    assert!(matches!(g.engine_move(&s, &cert), Err(Error::IllegalMove(_))));
    let s = g.apply_move(&s, &challenge("1", Side::A, "a2")).unwrap();
    assert_eq!(g.engine_move(&s, &cert).unwrap(), respond("b2"));
    let mut forged = s.clone();
    forged.rounds.push(Round { clock: ClockValue::Finite(1), side: Side::A, sort: 0, spoiler: 0, duplicator: 1 });
    assert!(matches!(g.engine_move(&forged, &cert), Err(Error::OutsideCertificate(_))));
}

#[test]
fn hints() {
    let a = two_point(q(1, 1), "a");
    let b = two_point(q(1, 1), "b");
    let g = Game::new(GameConfig::new(a, b, ClockOrder::Finite(2), q(1, 4))).unwrap();
    let s = g.new_game();
    let fresh = g.hint(&s).unwrap();
    assert_eq!(fresh.len(), 2 * 4);
    assert!(fresh.iter().all(|h| !h.winning));
    let s = g.apply_move(&s, &challenge("1", Side::A, "a2")).unwrap();
    let h = g.hint(&s).unwrap();
    let mirror = h.iter().find(|h| h.element == "b2").unwrap();
    assert!(mirror.value.is_zero() && mirror.winning);

    let g = two_pt(q(2, 5), "2");
    let s = g.apply_move(&g.new_game(), &challenge("1", Side::A, "a2")).unwrap();
    let h = g.hint(&s).unwrap();
    assert_eq!(h.len(), 2);
    assert!(h.iter().all(|h| h.value == q(1, 2) && !h.winning));
}

#[test]
fn greedy_duplicator_minimizes() {
    let g = two_pt(q(2, 5), "3");
    let s = g.apply_move(&g.new_game(), &challenge("0", Side::B, "b1")).unwrap();
    assert!(matches!(g.greedy_move(&s).unwrap(), Move::Response { .. }));
    let t = g.new_game();
    match g.greedy_move(&t).unwrap() {
        Move::Challenge { clock, .. } => assert_eq!(clock, "1"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn reply_uses_the_certificate_only_on_its_turn() {
    let g = chains(2, 3, "2", q(1, 2));
    let cert = g.extract_strategy(Player::I).unwrap();
    let s = g.new_game();
    assert_eq!(g.reply(&s, Some(&cert)).unwrap(), g.engine_move(&s, &cert).unwrap());
    let s = g.apply_move(&s, &g.reply(&s, Some(&cert)).unwrap()).unwrap();
    assert_eq!(g.reply(&s, Some(&cert)).unwrap(), g.greedy_move(&s).unwrap());
    assert_eq!(g.reply(&s, None).unwrap(), g.greedy_move(&s).unwrap());
}

#[test]
fn ordinal_clock_options_include_an_infinite_value() {
    let g = two_pt(q(2, 5), "w*2");
    let opts = g.clock_options(&ClockValue::Top).unwrap();
    assert!(opts.iter().any(|(v, _)| *v == ClockValue::Ordinal(Cnf::omega_power(1))));
    let r = g.solve().unwrap();
    assert_eq!(r.winner, Player::I);
    assert!(g.verify_strategy(&r.certificate, 5).ok);
    let s = g.apply_move(&g.new_game(), &challenge("w+3", Side::A, "a1")).unwrap();
    assert_eq!(g.room(&s.pending.as_ref().unwrap().clock).unwrap(), Room::Rank(r.stabilization_rank.unwrap() + 1));
}

#[test]
fn transcript_replays_bit_exactly() {
    let g = chains(2, 3, "2", q(1, 2));
    let cert = g.extract_strategy(Player::I).unwrap();
    let mut t = Transcript::new(g.config().clone());
    let mut s = g.new_game();
    while s.status == Status::InProgress {
        let mv = match s.to_move() {
            Some(Player::I) => g.engine_move(&s, &cert).unwrap(),
            _ => g.greedy_move(&s).unwrap(),
        };
        s = g.apply_move(&s, &mv).unwrap();
        t.moves.push(mv);
    }
    t.verdict = Some(Verdict::of(&g, &s));
    let text = t.to_json();
    assert!(text.contains(r#""type": "challenge""#));
    let back = Transcript::from_json(&text, None).unwrap();
    assert_eq!(back.to_json(), text);
    let (state, verdict) = replay(&back).unwrap();
    assert_eq!(state, s);
    assert_eq!(Some(verdict), t.verdict);
    assert_eq!(t.verdict.unwrap().winner, Some(Player::I));
}
