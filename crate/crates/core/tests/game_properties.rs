mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use common::*;
use efd_core::clocks::{ClockOrder, Rank};
use efd_core::game::{Game, GameConfig, GameState, Move, Player, Status, StrategyCertificate};
use efd_core::lang::WeakModulus;
use efd_core::structure::FiniteStructure;
use efd_core::Rational;

const EPS: [(i64, i64); 4] = [(1, 4), (1, 2), (3, 5), (1, 1)];

fn pairs() -> &'static [(String, FiniteStructure, FiniteStructure)] {
    static PAIRS: OnceLock<Vec<(String, FiniteStructure, FiniteStructure)>> = OnceLock::new();
    PAIRS.get_or_init(pool_pairs)
}

fn game(i: usize, clock: ClockOrder, eps: usize) -> Game {
    let (_, a, b) = &pairs()[i];
    let (n, d) = EPS[eps];
    Game::new(GameConfig::new(a.clone(), b.clone(), clock, q(n, d))).unwrap()
}

fn raw_position(state: &GameState) -> Vec<RawPair> {
    state.rounds.iter().map(|r| r.pair()).map(|p| (p.sort, p.a, p.b)).collect()
}

/// Plays hinted moves chosen by `picks` until the game ends or picks run out.
fn random_play(g: &Game, picks: &[usize], mut visit: impl FnMut(&GameState)) -> GameState {
    let mut state = g.new_game();
    visit(&state);
    for &pick in picks {
        if state.status != Status::InProgress {
            break;
        }
        let hints = g.hint(&state).unwrap();
        let h = &hints[pick % hints.len()];
        let mv = match &h.clock {
            Some(clock) => Move::Challenge { clock: clock.clone(), side: h.side, element: h.element.clone() },
            None => Move::Response { element: h.element.clone() },
        };
        state = g.apply_move(&state, &mv).unwrap();
        visit(&state);
    }
    state
}

fn pair_index() -> impl Strategy<Value = usize> {
    0..pairs().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn duplicator_wins_are_inherited_by_shorter_clocks(i in pair_index(), eps in 0..EPS.len(), k in 1u64..4) {
        let longer = game(i, ClockOrder::Finite(k + 1), eps).solve().unwrap().winner;
        let shorter = game(i, ClockOrder::Finite(k), eps).solve().unwrap().winner;
        if longer == Player::II {
            prop_assert_eq!(shorter, Player::II);
        }
        if game(i, ClockOrder::OmegaStar, eps).solve().unwrap().winner == Player::II {
            prop_assert_eq!(longer, Player::II);
        }
    }

    #[test]
    fn early_loss_only_on_an_exposed_gap(i in pair_index(), eps in 0..EPS.len(), k in 1u64..4, picks in prop::collection::vec(any::<usize>(), 8)) {
        let g = game(i, ClockOrder::Finite(k), eps);
        let (_, a, b) = &pairs()[i];
        let eps = g.config().epsilon.clone();
        let end = random_play(&g, &picks, |state| {
            if state.pending.is_some() {
                return;
            }
            let r0 = raw_r0(a, b, &WeakModulus::default(), &raw_position(state));
            // Checked after each completed round only.
            assert_eq!(state.status == Status::Finished(Player::I), r0 >= eps, "at {:?}", state.rounds);
        });
        if end.status == Status::Finished(Player::II) {
            prop_assert!(end.rounds.len() as u64 <= k);
        }
    }

    #[test]
    fn hints_report_true_distances(i in pair_index(), eps in 0..EPS.len(), k in 1u64..4, picks in prop::collection::vec(any::<usize>(), 0..5)) {
        let g = game(i, ClockOrder::Finite(k), eps);
        let (_, a, b) = &pairs()[i];
        let omega = WeakModulus::default();
        let state = random_play(&g, &picks, |_| {});
        prop_assume!(state.status == Status::InProgress);
        let eps = &g.config().epsilon;
        let order = &g.config().clock;
        for h in g.hint(&state).unwrap() {
            let mut t = raw_position(&state);
            let value = match (&h.clock, &state.pending) {
                (None, Some(p)) => {
                    let d = g.config().structure(h.side).universe(p.sort).iter().position(|e| *e == h.element).unwrap();
                    t.push(if h.side == efd_core::bnf::Side::B { (p.sort, p.elem, d) } else { (p.sort, d, p.elem) });
                    let Rank::Finite(j) = order.remaining(&p.clock) else { unreachable!() };
                    raw_minimax(a, b, &omega, j, &mut t)
                }
                (Some(clock), None) => {
                    let Rank::Finite(j) = order.remaining(&order.parse_value(clock).unwrap()) else { unreachable!() };
                    let s = g.config().structure(h.side);
                    let e = s.universe(0).iter().position(|e| *e == h.element).unwrap();
                    let other = g.config().structure(h.side.other());
                    (0..other.size(0))
                        .map(|d| {
                            let mut t = t.clone();
                            t.push(if h.side == efd_core::bnf::Side::A { (0, e, d) } else { (0, d, e) });
                            raw_minimax(a, b, &omega, j, &mut t)
                        })
                        .min()
                        .unwrap()
                }
                _ => unreachable!(),
            };
            prop_assert_eq!(&h.value, &value);
            let winning = if h.clock.is_some() { &value >= eps } else { &value < eps };
            prop_assert_eq!(h.winning, winning);
        }
    }

    #[test]
    fn exactly_one_player_holds_a_verified_certificate(i in pair_index(), eps in 0..EPS.len(), clock in prop::sample::select(vec!["0", "1", "2", "3", "w", "w*"])) {
        let g = game(i, ClockOrder::parse(clock).unwrap(), eps);
        let solved = g.solve().unwrap();
        prop_assert!(g.extract_strategy(solved.winner.other()).is_err());
        let cert = g.extract_strategy(solved.winner).unwrap();
        let back = StrategyCertificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        let v = g.verify_strategy(&back, 6);
        prop_assert!(v.ok, "{:?}", v.violation);
    }

    #[test]
    fn certificate_play_beats_random_opponents(i in pair_index(), eps in 0..EPS.len(), k in 1u64..4, picks in prop::collection::vec(any::<usize>(), 8)) {
        let g = game(i, ClockOrder::Finite(k), eps);
        let solved = g.solve().unwrap();
        let cert = &solved.certificate;
        let mut state = g.new_game();
        let mut picks = picks.into_iter();
        while state.status == Status::InProgress {
            let mv = if state.to_move() == Some(cert.player) {
                g.engine_move(&state, cert).unwrap()
            } else {
                let hints = g.hint(&state).unwrap();
                let h = &hints[picks.next().unwrap_or(0) % hints.len()];
                match &h.clock {
                    Some(clock) => Move::Challenge { clock: clock.clone(), side: h.side, element: h.element.clone() },
                    None => Move::Response { element: h.element.clone() },
                }
            };
            state = g.apply_move(&state, &mv).unwrap();
        }
        prop_assert_eq!(state.status, Status::Finished(solved.winner));
    }
}

#[test]
fn epsilon_must_be_positive() {
    let mut cfg = game(0, ClockOrder::Finite(1), 0).config().clone();
    cfg.epsilon = Rational::zero();
    assert!(Game::new(cfg).is_err());
}
