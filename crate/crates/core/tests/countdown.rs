use clopenmu::algebra::{LimitParams, Point, SetDescriptor};
use clopenmu::formula::{Formula, Polarity};
use clopenmu::game_build::{check_forall_reply, MuDepthStrategy, NuGreedyStrategy, OperatorSpec};
use clopenmu::semantics::{eval_den, eval_standard, Env, Ordinal};
use clopenmu::space::ModalSpaceModel;
use proptest::prelude::*;

fn both(formula: &str) -> (SetDescriptor, SetDescriptor) {
    let m = ModalSpaceModel::countdown();
    let phi = Formula::parse(formula).unwrap();
    let params = LimitParams::default();
    (
        eval_den(&m, &phi, &Env::new(), &params).unwrap().value,
        eval_standard(&m, &phi, &Env::new(), &params).unwrap(),
    )
}

fn nat(xs: &[u64]) -> SetDescriptor {
    SetDescriptor::finite_nat(xs.iter().copied(), false)
}

#[test]
fn bundled_model_file_is_the_countdown_frame() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/countdown.model");
    let m = ModalSpaceModel::from_file(path.as_ref()).unwrap();
    let phi = Formula::parse("mu q. (p \\/ <> q)").unwrap();
    let params = LimitParams::default();
    let a = eval_den(&m, &phi, &Env::new(), &params).unwrap().value;
    let b = eval_den(&ModalSpaceModel::countdown(), &phi, &Env::new(), &params)
        .unwrap()
        .value;
    assert_eq!(a, b);
}

#[test]
fn the_two_semantics_on_the_countdown_frame() {
    let all = SetDescriptor::full(ModalSpaceModel::countdown().carrier());
    let naturals = SetDescriptor::cofinite_nat([], false);
    let inf_only = SetDescriptor::finite_nat([], true);
    let none = nat(&[]);
    // reachability of p: the limit stage is the closure of ℕ
    assert_eq!(both("mu q. (p \\/ <> q)"), (all.clone(), naturals.clone()));
    // well-foundedness: ∞ loops, yet ∞ is a limit of well-founded points
    assert_eq!(both("mu q. [] q"), (all.clone(), naturals.clone()));
    // an infinite path exists only from ∞, but {∞} is not open
    assert_eq!(both("nu q. <> q"), (none.clone(), inf_only));
    assert_eq!(both("mu q. <> q"), (none.clone(), none));
    assert_eq!(both("nu q. (p \\/ <> q)"), (all.clone(), all));
    assert_eq!(both("p \\/ <> p"), (nat(&[0, 1]), nat(&[0, 1])));
}

#[test]
fn approximants_and_depths() {
    let m = ModalSpaceModel::countdown();
    let phi = Formula::parse("mu q. (p \\/ <> q)").unwrap();
    let den = eval_den(&m, &phi, &Env::new(), &LimitParams::default()).unwrap();
    let trace = den.trace_of("q").unwrap();
    assert_eq!(trace.limit_count(), 1);
    assert_eq!(trace.closure_ordinal(), Ordinal { limits: 1, offset: 0 });
    for n in 0..20u64 {
        assert_eq!(
            trace.stage(Ordinal::finite(n as usize)).unwrap(),
            SetDescriptor::finite_nat(0..n, false)
        );
        assert_eq!(trace.mu_depth(Point::Nat(n)), Some(Ordinal::finite(n as usize + 1)));
    }
    assert_eq!(trace.mu_depth(Point::Inf), Some(Ordinal { limits: 1, offset: 0 }));
}

fn reach_operator() -> OperatorSpec {
    let binder = Formula::parse("mu q. (p \\/ <> q)").unwrap();
    let (polarity, op) =
        OperatorSpec::from_binder(ModalSpaceModel::countdown(), &binder, LimitParams::default())
            .unwrap();
    assert_eq!(polarity, Polarity::Mu);
    op
}

#[test]
fn mu_depth_moves_on_the_countdown_frame() {
    let s = MuDepthStrategy::new(&reach_operator()).unwrap();
    let all = SetDescriptor::full(ModalSpaceModel::countdown().carrier());
    assert_eq!(s.state_move(Point::Inf).unwrap(), all);
    assert_eq!(s.state_move(Point::Nat(4)).unwrap(), nat(&[0, 1, 2, 3]));
    assert_eq!(s.state_move(Point::Nat(0)).unwrap(), nat(&[]));
    assert_eq!(s.pick(&SetDescriptor::cofinite_nat(0..10, true)), Some(Point::Nat(10)));
    assert_eq!(s.pick(&SetDescriptor::finite_nat([], true)), Some(Point::Inf));
    assert_eq!(s.pick(&nat(&[42, 17])), Some(Point::Nat(17)));
}

#[test]
fn nu_greedy_on_the_countdown_frame_has_nothing_to_play() {
    let binder = Formula::parse("nu q. <> q").unwrap();
    let (_, op) =
        OperatorSpec::from_binder(ModalSpaceModel::countdown(), &binder, LimitParams::default())
            .unwrap();
    let s = NuGreedyStrategy::new(&op).unwrap();
    assert!(s.gfp().is_empty());
    assert!(s.state_move(Point::Inf).is_err());
}

fn arb_reply() -> impl Strategy<Value = SetDescriptor> {
    // clopen sets: finite sets of naturals and cofinite sets with ∞
    (prop::collection::btree_set(0u64..40, 0..5), any::<bool>()).prop_map(|(xs, cofinite)| {
        if cofinite {
            SetDescriptor::cofinite_nat(xs, true)
        } else {
            SetDescriptor::finite_nat(xs, false)
        }
    })
}

proptest! {
    /// Against any sequence of legal replies the play from ∞ ends with ∀
    /// stuck, with the depth dropping at every round.
    #[test]
    fn mu_depth_wins_from_infinity(replies in prop::collection::vec(arb_reply(), 1..60)) {
        let s = MuDepthStrategy::new(&reach_operator()).unwrap();
        let mut x = Point::Inf;
        let mut depth = s.depth(x).unwrap();
        let mut replies = replies.into_iter().cycle();
        for _ in 0..200 {
            let offer = s.state_move(x).unwrap();
            if offer.is_empty() {
                return Ok(());
            }
            // the first legal reply in the script, else the offer itself
            let reply = (&mut replies)
                .take(60)
                .find(|r| check_forall_reply(&offer, r).is_ok())
                .unwrap_or(offer.clone());
            x = s.pick(&reply).unwrap();
            let next = s.depth(x).unwrap();
            prop_assert!(next < depth);
            depth = next;
        }
        prop_assert!(false, "the play did not end");
    }
}
