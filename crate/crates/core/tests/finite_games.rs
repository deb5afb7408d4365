use clopenmu::algebra::{LimitParams, Point, SetDescriptor};
use clopenmu::formula::{Formula, Polarity};
use clopenmu::game_build::{
    build_clopen_game_i, build_clopen_game_ii, build_eval_game, build_tarski_game,
    c_map, check_isomorphism_by_tags, EvalPosition, MuDepthStrategy, OperatorSpec,
};
use clopenmu::game_core::{solve_parity, verify_strategy, Arena, Player};
use clopenmu::oracle::brute_eval;
use clopenmu::semantics::{eval_den, Env};
use clopenmu::space::ModalSpaceModel;

fn chain3() -> ModalSpaceModel {
    ModalSpaceModel::finite(3, &[(2, 1), (1, 0)], &[("p", &[0])]).unwrap()
}

fn mask(m: &ModalSpaceModel, bits: u64) -> SetDescriptor {
    SetDescriptor::from_mask(m.carrier(), bits).unwrap()
}

#[test]
fn every_game_agrees_on_reachability() {
    let m = chain3();
    let binder = Formula::parse("mu q. (p \\/ <> q)").unwrap();
    let (pol, op) = OperatorSpec::from_binder(m.clone(), &binder, LimitParams::default()).unwrap();
    for build in [build_tarski_game, build_clopen_game_i, build_clopen_game_ii] {
        let game = build(&op, pol).unwrap();
        assert_eq!(game.winning_states(&solve_parity(game.arena())), mask(&m, 0b111));
    }
    let eval = build_eval_game(&binder, &m).unwrap();
    let solved = solve_parity(eval.arena());
    assert_eq!(eval.winning_points(&solved, eval.analysis().root()), mask(&m, 0b111));
    assert_eq!(brute_eval(&m, &binder), 0b111);
}

#[test]
fn the_mu_depth_strategy_is_winning_on_the_arena() {
    let m = chain3();
    let binder = Formula::parse("mu q. (p \\/ <> q)").unwrap();
    let (pol, op) = OperatorSpec::from_binder(m, &binder, LimitParams::default()).unwrap();
    let game = build_clopen_game_ii(&op, pol).unwrap();
    let s = MuDepthStrategy::new(&op).unwrap();
    let strategy = s.to_arena_strategy(&game).unwrap();
    let solved = solve_parity(game.arena());
    let states: std::collections::BTreeSet<_> = (0..3)
        .map(|x| game.id_of(&EvalPosition::State(Point::Nat(x))).unwrap())
        .collect();
    assert!(verify_strategy(game.arena(), &strategy, &states, Player::Exists));
    for id in states {
        assert!(solved.win_exists().contains(&id));
    }
}

#[test]
fn tarski_and_first_clopen_game_coincide_on_finite_carriers() {
    let m = ModalSpaceModel::finite(4, &[(0, 1), (1, 2), (2, 0), (3, 3)], &[("p", &[1, 3])])
        .unwrap();
    for text in ["mu q. (p /\\ <> q)", "nu q. (p \\/ [] q)", "nu q. <> <> q"] {
        let binder = Formula::parse(text).unwrap();
        let (pol, op) =
            OperatorSpec::from_binder(m.clone(), &binder, LimitParams::default()).unwrap();
        let a = build_tarski_game(&op, pol).unwrap();
        let b = build_clopen_game_i(&op, pol).unwrap();
        check_isomorphism_by_tags(a.arena(), b.arena()).unwrap();
    }
}

#[test]
fn exported_arenas_round_trip() {
    let m = chain3();
    let phi = Formula::parse("nu x. (mu y. ((p /\\ <> x) \\/ <> y))").unwrap();
    let game = build_eval_game(&phi, &m).unwrap();
    let text = game.arena().export();
    let back = Arena::parse_export(&text).unwrap();
    assert_eq!(back.export(), text);
    assert_eq!(solve_parity(&back).win_exists(), solve_parity(game.arena()).win_exists());
}

#[test]
fn alternation_on_a_lasso() {
    // 0 → 1 → 2 → 1, p at 2: p holds infinitely often on the only path
    let m = ModalSpaceModel::finite(3, &[(0, 1), (1, 2), (2, 1)], &[("p", &[2])]).unwrap();
    let inf_often = Formula::parse("nu x. (mu y. ((p /\\ <> x) \\/ <> y))").unwrap();
    let fin_often = Formula::parse("mu x. (nu y. ((p /\\ <> x) \\/ (~p /\\ <> y)))").unwrap();
    let params = LimitParams::default();
    let den = |phi: &Formula| eval_den(&m, phi, &Env::new(), &params).unwrap().value;
    assert_eq!(den(&inf_often), mask(&m, 0b111));
    assert_eq!(brute_eval(&m, &inf_often), 0b111);
    assert_eq!(den(&fin_often), mask(&m, 0));
    assert_eq!(brute_eval(&m, &fin_often), 0);
    for phi in [&inf_often, &fin_often] {
        let game = build_eval_game(phi, &m).unwrap();
        let solved = solve_parity(game.arena());
        assert_eq!(game.winning_points(&solved, 0), den(phi));
    }
}

#[test]
fn unfolding_sets_are_winning_for_the_reachability_formula() {
    let m = chain3();
    let phi = Formula::parse("mu q. (p \\/ <> q)").unwrap();
    let game = build_eval_game(&phi, &m).unwrap();
    let solved = solve_parity(game.arena());
    let c = c_map(&game, &solved, &LimitParams::default()).unwrap();
    let keys: Vec<Point> = c.keys().copied().collect();
    assert_eq!(keys, vec![Point::Nat(0), Point::Nat(1), Point::Nat(2)]);
    assert!(c[&Point::Nat(0)].is_empty());
    let polarity = game.analysis().polarity("q");
    assert_eq!(polarity, Some(Polarity::Mu));
}
