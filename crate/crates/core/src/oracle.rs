//! Seeded random cross-checks against brute-force computations.
//!
//! Every suite draws its instances from a ChaCha generator seeded by
//! [`OracleConfig::seed`], so a run is reproducible from its seed. The
//! brute-force evaluator [`brute_eval`] works on bitmasks and computes
//! fixpoints by the Knaster–Tarski characterisation (intersection of all
//! pre-fixpoints, union of all post-fixpoints) instead of by iteration, so
//! it shares no code with [`crate::semantics`].

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Carrier, LimitParams, Point, SetDescriptor};
use crate::bisim::{invariance_suite, largest_bisimulation, z_closure_violations};
use crate::formula::{Formula, Polarity};
use crate::game_build::{
    build_clopen_game_i, build_clopen_game_ii, build_eval_game, build_tarski_game,
    check_isomorphism_by_tags, EvalPosition, MuDepthStrategy, NuGreedyStrategy, OperatorSpec,
};
use crate::game_core::{play_match, solve_parity, Player, PlayStatus, Strategy};
use crate::semantics::{eval_den, Env};
use crate::space::ModalSpaceModel;

/// Sizes of the randomized suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub seed: u64,
    /// Random (model, formula) pairs for the adequacy suite.
    pub adequacy_cases: usize,
    /// Random monotone operators for the fixpoint-game suites.
    pub operators: usize,
    /// Random-adversary playouts against the `μ`-depth strategy.
    pub playouts: usize,
    /// Random model pairs for the bisimulation suite.
    pub bisim_pairs: usize,
    /// Random formulas checked on each model pair.
    pub bisim_formulas: usize,
    /// Random formulas for the print/parse round trip.
    pub round_trips: usize,
    /// Random descriptors per carrier for the algebra laws.
    pub descriptors: usize,
    /// Corrupts the brute-force oracle so that the suites must fail.
    #[doc(hidden)]
    pub inject_fault: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0,
            adequacy_cases: 200,
            operators: 50,
            playouts: 1000,
            bisim_pairs: 20,
            bisim_formulas: 100,
            round_trips: 500,
            descriptors: 1000,
            inject_fault: false,
        }
    }
}

impl OracleConfig {
    /// Every suite size set to `n`.
    pub fn uniform(seed: u64, n: usize) -> Self {
        OracleConfig {
            seed,
            adequacy_cases: n,
            operators: n,
            playouts: n,
            bisim_pairs: n,
            bisim_formulas: n,
            round_trips: n,
            descriptors: n,
            inject_fault: false,
        }
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn rng(config: &OracleConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn timed(name: &'static str, body: impl FnOnce() -> (usize, Vec<String>)) -> SuiteReport {
    let start = Instant::now();
    let (cases, failures) = body();
    SuiteReport {
        name,
        cases,
        failures,
        elapsed: start.elapsed(),
    }
}

/// A finite model with `1..=max_points` points, random edges and random
/// valuations of `p` and `r`.
pub fn random_finite_model(rng: &mut impl Rng, max_points: usize) -> ModalSpaceModel {
    let n = rng.gen_range(1..=max_points);
    let density = rng.gen_range(0.1..0.6);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    let mut subset = || -> Vec<usize> { (0..n).filter(|_| rng.gen_bool(0.5)).collect() };
    let (p, r) = (subset(), subset());
    ModalSpaceModel::finite(n, &edges, &[("p", &p), ("r", &r)]).expect("valid model")
}

/// A clean formula over the propositions `p` and `r` with at most
/// `max_binders` fixpoint binders and depth at most `max_depth`. Bound
/// variables occur only positively and only inside their binders.
pub fn random_formula(rng: &mut impl Rng, max_depth: usize, max_binders: usize) -> Formula {
    let mut binders = 0;
    gen_formula(rng, max_depth, max_binders, &mut binders, &mut Vec::new(), false)
}

fn gen_formula(
    rng: &mut impl Rng,
    depth: usize,
    max_binders: usize,
    binders: &mut usize,
    scope: &mut Vec<String>,
    leaf_ok: bool,
) -> Formula {
    if depth == 0 || (leaf_ok && rng.gen_bool(0.2)) {
        // bound variables make up half of the leaves in their scope
        if !scope.is_empty() && rng.gen_bool(0.5) {
            return Formula::prop(&scope[rng.gen_range(0..scope.len())]);
        }
        return match rng.gen_range(0..6) {
            0 => Formula::prop("p"),
            1 => Formula::neg("p"),
            2 => Formula::prop("r"),
            3 => Formula::neg("r"),
            4 => Formula::Top,
            _ => Formula::Bot,
        };
    }
    let choice = rng.gen_range(0..if *binders < max_binders { 7 } else { 4 });
    let sub = |rng: &mut _, binders: &mut usize, scope: &mut Vec<String>| {
        gen_formula(rng, depth - 1, max_binders, binders, scope, true)
    };
    match choice {
        0 => Formula::and(sub(rng, binders, scope), sub(rng, binders, scope)),
        1 => Formula::or(sub(rng, binders, scope), sub(rng, binders, scope)),
        2 => Formula::possibly(sub(rng, binders, scope)),
        3 => Formula::necessarily(sub(rng, binders, scope)),
        _ => {
            let var = format!("x{}", *binders);
            *binders += 1;
            scope.push(var.clone());
            let body = sub(rng, binders, scope);
            scope.pop();
            let polarity = if rng.gen_bool(0.5) { Polarity::Mu } else { Polarity::Nu };
            Formula::fixpoint(polarity, &var, body)
        }
    }
}

/// `F(S) = base ∪ ⋃ { b : a ⊆ S }` as a table over `n` points; monotone
/// for every choice of rules.
pub fn rule_table(n: usize, base: u64, rules: &[(u64, u64)]) -> Vec<u64> {
    let all = (1u64 << n) - 1;
    (0..1u64 << n)
        .map(|s| {
            rules
                .iter()
                .filter(|(a, _)| a & all & !s == 0)
                .fold(base & all, |acc, (_, b)| acc | (b & all))
        })
        .collect()
}

/// A random monotone operator on `1..=max_points` points.
pub fn random_operator(rng: &mut impl Rng, max_points: usize) -> OperatorSpec {
    let n = rng.gen_range(1..=max_points);
    let all = (1u64 << n) - 1;
    let base = if rng.gen_bool(0.3) { rng.gen::<u64>() & all } else { 0 };
    let rules: Vec<(u64, u64)> = (0..rng.gen_range(0..6))
        .map(|_| (rng.gen::<u64>() & all, rng.gen::<u64>() & all))
        .collect();
    OperatorSpec::table(n, rule_table(n, base, &rules)).expect("rule tables are monotone")
}

fn knaster_tarski(n: usize, polarity: Polarity, mut f: impl FnMut(u64) -> u64) -> u64 {
    let all = (1u64 << n) - 1;
    match polarity {
        Polarity::Mu => (0..=all).filter(|&s| f(s) & !s == 0).fold(all, |acc, s| acc & s),
        Polarity::Nu => (0..=all).filter(|&s| s & !f(s) == 0).fold(0, |acc, s| acc | s),
    }
}

/// `[[φ]]` as a bitmask on a finite model, by structural recursion with
/// Knaster–Tarski fixpoints over the full powerset.
pub fn brute_eval(model: &ModalSpaceModel, formula: &Formula) -> u64 {
    let n = model.carrier().size().expect("finite model");
    let succ: Vec<u64> = (0..n as u64)
        .map(|x| model.successors(Point::Nat(x)).unwrap().to_mask().unwrap())
        .collect();
    let mut env = Vec::new();
    brute(model, n, &succ, formula, &mut env)
}

fn brute(
    model: &ModalSpaceModel,
    n: usize,
    succ: &[u64],
    formula: &Formula,
    env: &mut Vec<(String, u64)>,
) -> u64 {
    let all = (1u64 << n) - 1;
    let lookup = |name: &str, env: &Vec<(String, u64)>| {
        env.iter()
            .rev()
            .find(|(v, _)| v == name)
            .map(|(_, s)| *s)
            .or_else(|| model.prop(name).and_then(|s| s.to_mask()))
            .unwrap_or(0)
    };
    match formula {
        Formula::Prop(p) => lookup(p, env),
        Formula::NegProp(p) => all & !lookup(p, env),
        Formula::Bot => 0,
        Formula::Top => all,
        Formula::And(l, r) => brute(model, n, succ, l, env) & brute(model, n, succ, r, env),
        Formula::Or(l, r) => brute(model, n, succ, l, env) | brute(model, n, succ, r, env),
        Formula::Possibly(g) => {
            let s = brute(model, n, succ, g, env);
            (0..n).filter(|&x| succ[x] & s != 0).fold(0, |acc, x| acc | 1 << x)
        }
        Formula::Necessarily(g) => {
            let s = brute(model, n, succ, g, env);
            (0..n).filter(|&x| succ[x] & !s == 0).fold(0, |acc, x| acc | 1 << x)
        }
        Formula::Mu(var, body) | Formula::Nu(var, body) => {
            let polarity = if matches!(formula, Formula::Mu(..)) {
                Polarity::Mu
            } else {
                Polarity::Nu
            };
            knaster_tarski(n, polarity, |s| {
                env.push((var.clone(), s));
                let v = brute(model, n, succ, body, env);
                env.pop();
                v
            })
        }
    }
}

/// Criterion: evaluation-game winning region = clopen denotation =
/// brute-force denotation.
pub fn adequacy_suite(config: &OracleConfig) -> SuiteReport {
    timed("adequacy", || {
        let mut rng = rng(config, 1);
        let params = LimitParams::default();
        let mut failures = Vec::new();
        for case in 0..config.adequacy_cases {
            let model = random_finite_model(&mut rng, 5);
            let phi = random_formula(&mut rng, 4, 2);
            let mut brute = brute_eval(&model, &phi);
            if config.inject_fault && case == 0 {
                brute ^= 1;
            }
            let den = match eval_den(&model, &phi, &Env::new(), &params) {
                Ok(d) => d.value.to_mask().expect("finite model"),
                Err(e) => {
                    failures.push(format!("case {case}: {phi}: {e}"));
                    continue;
                }
            };
            let game = match build_eval_game(&phi, &model) {
                Ok(g) => g,
                Err(e) => {
                    failures.push(format!("case {case}: {phi}: {e}"));
                    continue;
                }
            };
            let solved = solve_parity(game.arena());
            let won = game.winning_points(&solved, 0).to_mask().expect("finite model");
            if den != brute || won != brute {
                failures.push(format!(
                    "case {case}: {phi} on\n{model}denotation {den:#b}, game {won:#b}, brute force {brute:#b}"
                ));
            }
        }
        (config.adequacy_cases, failures)
    })
}

fn brute_fixpoint(table: &[u64], polarity: Polarity) -> u64 {
    let n = table.len().trailing_zeros() as usize;
    knaster_tarski(n, polarity, |s| table[s as usize])
}

/// Criterion: winning states of Tarski's game, 𝒢ᴵ and 𝒢ᴵᴵ are the fixpoints.
pub fn fixpoint_game_suite(config: &OracleConfig) -> SuiteReport {
    timed("fixpoint-games", || {
        let mut rng = rng(config, 2);
        let mut failures = Vec::new();
        for case in 0..config.operators {
            let op = random_operator(&mut rng, 4);
            let table = op.tabulate().expect("finite operator");
            for polarity in [Polarity::Mu, Polarity::Nu] {
                let mut expected = brute_fixpoint(&table, polarity);
                if config.inject_fault && case == 0 {
                    expected ^= 1;
                }
                let builders: [(&str, fn(&OperatorSpec, Polarity) -> _); 3] = [
                    ("Tarski", build_tarski_game),
                    ("G1", build_clopen_game_i),
                    ("G2", build_clopen_game_ii),
                ];
                for (name, build) in builders {
                    let game = build(&op, polarity).expect("finite operator");
                    let won = game.winning_states(&solve_parity(game.arena()));
                    let won = won.to_mask().expect("finite");
                    if won != expected {
                        failures.push(format!(
                            "case {case}: {name} {polarity} wins {won:#b}, fixpoint {expected:#b}, table {table:?}"
                        ));
                    }
                }
            }
        }
        (config.operators, failures)
    })
}

/// Criterion: the Tarski arena and the 𝒢ᴵ arena are isomorphic.
pub fn collapse_suite(config: &OracleConfig) -> SuiteReport {
    timed("tarski-g1-collapse", || {
        let mut rng = rng(config, 2);
        let mut failures = Vec::new();
        for case in 0..config.operators {
            let op = random_operator(&mut rng, 4);
            for polarity in [Polarity::Mu, Polarity::Nu] {
                let tarski = build_tarski_game(&op, polarity).expect("finite operator");
                let g1 = build_clopen_game_i(&op, polarity).expect("finite operator");
                if let Err(e) = check_isomorphism_by_tags(tarski.arena(), g1.arena()) {
                    failures.push(format!("case {case} {polarity}: {e}"));
                }
            }
        }
        (config.operators, failures)
    })
}

fn random_positional(arena: &crate::game_core::Arena, player: Player, rng: &mut impl Rng) -> Strategy {
    (0..arena.len())
        .filter(|&v| arena.owner(v) == player && !arena.is_dead_end(v))
        .map(|v| (v, *arena.successors(v).choose(rng).expect("not a dead end")))
        .collect()
}

/// Criterion: the `μ`-depth strategy wins every random-adversary playout
/// within `|X| + 2` rounds; the greedy `ν` strategy only produces infinite
/// plays from points of `νF`.
pub fn strategy_suite(config: &OracleConfig) -> SuiteReport {
    timed("canonical-strategies", || {
        let mut rng = rng(config, 3);
        let mut failures = Vec::new();
        let mut done = 0;
        while done < config.playouts {
            let op = random_operator(&mut rng, 4);
            let n = op.carrier().size().expect("finite operator");
            let mu = MuDepthStrategy::new(&op).expect("finite operator");
            let game = build_clopen_game_ii(&op, Polarity::Mu).expect("finite operator");
            let arena = game.arena();
            let strategy = mu.to_arena_strategy(&game).expect("finite operator");
            let lfp = mu.lfp().finite_members().expect("finite");
            for &x in &lfp {
                for _ in 0..10 {
                    if done == config.playouts {
                        break;
                    }
                    done += 1;
                    // the adversary moves at random at every step
                    let mut at = game.id_of(&EvalPosition::State(x)).expect("state");
                    let mut rounds = 0;
                    let outcome = loop {
                        match arena.owner(at) {
                            Player::Exists => match strategy.get(at) {
                                Some(to) if arena.successors(at).contains(&to) => {
                                    if matches!(game.position(at), EvalPosition::State(_)) {
                                        rounds += 1;
                                    }
                                    at = to;
                                }
                                _ => break Err(format!("∃ has no move at {}", arena.tag(at))),
                            },
                            Player::Forall => match arena.successors(at).choose(&mut rng) {
                                Some(&to) => at = to,
                                None => break Ok(()),
                            },
                        }
                        if rounds > n + 2 {
                            break Err(format!("more than {} rounds", n + 2));
                        }
                    };
                    if let Err(e) = outcome {
                        failures.push(format!("μ-depth from {x}: {e}; table {:?}", op.tabulate()));
                    }
                }
            }
            let nu = NuGreedyStrategy::new(&op).expect("finite operator");
            let game = build_clopen_game_ii(&op, Polarity::Nu).expect("finite operator");
            let strategy = nu.to_arena_strategy(&game).expect("finite operator");
            let forall = random_positional(game.arena(), Player::Forall, &mut rng);
            for x in nu.gfp().finite_members().expect("finite") {
                let start = game.id_of(&EvalPosition::State(x)).expect("state");
                match play_match(game.arena(), &strategy, &forall, start, 4 * (n + 2)) {
                    Ok(play) if matches!(play.status, PlayStatus::InfiniteDetected { .. }) => {}
                    other => failures.push(format!("ν-greedy from {x}: {other:?}")),
                }
            }
        }
        (config.playouts, failures)
    })
}

/// A model bisimilar to `m` on the copied part: `m` with extra copies of
/// random points (same valuation, same successors), points relabelled.
pub fn random_expansion(rng: &mut impl Rng, m: &ModalSpaceModel) -> ModalSpaceModel {
    let n = m.carrier().size().expect("finite model");
    let extra = rng.gen_range(0..=2);
    let origin: Vec<usize> = (0..n).chain((0..extra).map(|_| rng.gen_range(0..n))).collect();
    let mut labels: Vec<usize> = (0..origin.len()).collect();
    labels.shuffle(rng);
    let succ = |x: usize| -> Vec<usize> {
        m.successors(Point::Nat(x as u64))
            .unwrap()
            .finite_members()
            .unwrap()
            .into_iter()
            .map(|p| p.index().unwrap())
            .collect()
    };
    let mut edges = Vec::new();
    for (i, &o) in origin.iter().enumerate() {
        for t in succ(o) {
            // a successor goes to the original or to one of its copies
            let targets: Vec<usize> = (0..origin.len()).filter(|&j| origin[j] == t).collect();
            let j = *targets.choose(rng).expect("the original");
            edges.push((labels[i], labels[j]));
        }
    }
    let val = |name: &str| -> Vec<usize> {
        let set = m.prop(name).cloned().unwrap_or_else(|| m.empty_set());
        (0..origin.len())
            .filter(|&i| set.contains(Point::Nat(origin[i] as u64)).unwrap())
            .map(|i| labels[i])
            .collect()
    };
    let (p, r) = (val("p"), val("r"));
    ModalSpaceModel::finite(origin.len(), &edges, &[("p", &p), ("r", &r)]).expect("valid model")
}

/// Criterion: related points agree on random formulas, and the winning
/// regions of the evaluation games are closed under the relation.
pub fn bisim_suite(config: &OracleConfig) -> SuiteReport {
    timed("bisimulation-invariance", || {
        let mut rng = rng(config, 4);
        let params = LimitParams::default();
        let mut failures = Vec::new();
        for case in 0..config.bisim_pairs {
            let m1 = random_finite_model(&mut rng, 4);
            let m2 = if case % 4 == 3 {
                random_finite_model(&mut rng, 4)
            } else {
                random_expansion(&mut rng, &m1)
            };
            let z = largest_bisimulation(&m1, &m2).expect("finite models");
            let formulas: Vec<Formula> = (0..config.bisim_formulas)
                .map(|_| random_formula(&mut rng, 4, 2))
                .collect();
            let report = invariance_suite(&m1, &m2, &z, &formulas, &params);
            for v in &report.violations {
                failures.push(format!("case {case}: {} at {:?}", v.formula, v.pair));
            }
            for (phi, e) in &report.errors {
                failures.push(format!("case {case}: {phi}: {e}"));
            }
            for phi in &formulas {
                match z_closure_violations(&m1, &m2, &z, phi) {
                    Ok(v) if v.is_empty() => {}
                    Ok(v) => failures.push(format!("case {case}: {phi} not Z-closed at {v:?}")),
                    Err(e) => failures.push(format!("case {case}: {phi}: {e}")),
                }
            }
        }
        (config.bisim_pairs, failures)
    })
}

/// Criterion: printing then parsing a random clean formula gives it back.
pub fn round_trip_suite(config: &OracleConfig) -> SuiteReport {
    timed("parse-print-round-trip", || {
        let mut rng = rng(config, 5);
        let mut failures = Vec::new();
        for case in 0..config.round_trips {
            let phi = random_formula(&mut rng, 6, 3);
            if !phi.is_clean() {
                failures.push(format!("case {case}: generated {phi} is not clean"));
            }
            match Formula::parse(&phi.to_string()) {
                Ok(back) if back == phi => {}
                other => failures.push(format!("case {case}: {phi} reparsed as {other:?}")),
            }
        }
        (config.round_trips, failures)
    })
}

fn random_descriptor(rng: &mut impl Rng, carrier: Carrier) -> SetDescriptor {
    match carrier.size() {
        Some(n) => SetDescriptor::from_mask(carrier, rng.gen::<u64>() & ((1 << n) - 1)).unwrap(),
        None => {
            let exceptions: Vec<u64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..12)).collect();
            let inf = rng.gen_bool(0.5);
            if rng.gen_bool(0.5) {
                SetDescriptor::cofinite_nat(exceptions, inf)
            } else {
                SetDescriptor::finite_nat(exceptions, inf)
            }
        }
    }
}

/// Criterion: Boolean and closure/interior laws on random descriptors.
pub fn algebra_law_suite(config: &OracleConfig) -> SuiteReport {
    timed("descriptor-laws", || {
        let mut rng = rng(config, 6);
        let mut failures = Vec::new();
        for carrier in [Carrier::finite(6).unwrap(), Carrier::omega()] {
            for case in 0..config.descriptors {
                let a = random_descriptor(&mut rng, carrier);
                let b = random_descriptor(&mut rng, carrier);
                let laws = [
                    (
                        "De Morgan ∪",
                        a.union(&b).unwrap().complement()
                            == a.complement().intersection(&b.complement()).unwrap(),
                    ),
                    (
                        "De Morgan ∩",
                        a.intersection(&b).unwrap().complement()
                            == a.complement().union(&b.complement()).unwrap(),
                    ),
                    ("double complement", a.complement().complement() == a),
                    ("Int = ¬Cl¬", a.interior() == a.complement().closure().complement()),
                    ("Cl idempotent", a.closure().closure() == a.closure()),
                    ("Int idempotent", a.interior().interior() == a.interior()),
                    ("A ⊆ Cl A", a.is_subset(&a.closure()).unwrap()),
                    ("Int A ⊆ A", a.interior().is_subset(&a).unwrap()),
                    (
                        "Cl additive",
                        a.union(&b).unwrap().closure() == a.closure().union(&b.closure()).unwrap(),
                    ),
                    (
                        "Int multiplicative",
                        a.intersection(&b).unwrap().interior()
                            == a.interior().intersection(&b.interior()).unwrap(),
                    ),
                    (
                        "clopen iff Cl A = A = Int A",
                        a.is_clopen() == (a.closure() == a && a.interior() == a),
                    ),
                ];
                for (law, holds) in laws {
                    if !holds {
                        failures.push(format!("{carrier} case {case}: {law} fails for {a}, {b}"));
                    }
                }
            }
        }
        (2 * config.descriptors, failures)
    })
}

/// All suites in order.
pub fn run_all(config: &OracleConfig) -> Vec<SuiteReport> {
    vec![
        adequacy_suite(config),
        fixpoint_game_suite(config),
        collapse_suite(config),
        strategy_suite(config),
        bisim_suite(config),
        round_trip_suite(config),
        algebra_law_suite(config),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_formulas_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let phi = random_formula(&mut rng, 4, 2);
            assert!(phi.depth() <= 4, "{phi}");
            assert!(phi.binder_count() <= 2, "{phi}");
            assert!(phi.is_clean(), "{phi}");
            assert!(phi.check_positive().is_ok(), "{phi}");
            assert!(phi.free_vars().iter().all(|v| v == "p" || v == "r"), "{phi}");
        }
    }

    #[test]
    fn brute_force_examples() {
        let chain = ModalSpaceModel::finite(3, &[(2, 1), (1, 0)], &[("p", &[0])]).unwrap();
        let f = |s| Formula::parse(s).unwrap();
        assert_eq!(brute_eval(&chain, &f("mu q. (p \\/ <> q)")), 0b111);
        assert_eq!(brute_eval(&chain, &f("nu q. <> q")), 0);
        let cycle = ModalSpaceModel::finite(3, &[(0, 1), (1, 2), (2, 0)], &[]).unwrap();
        assert_eq!(brute_eval(&cycle, &f("nu q. <> q")), 0b111);
        assert_eq!(brute_eval(&cycle, &f("mu q. <> q")), 0);
    }

    #[test]
    fn expansions_are_bisimilar_to_the_original() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_finite_model(&mut rng, 4);
            let e = random_expansion(&mut rng, &m);
            let z = largest_bisimulation(&m, &e).unwrap();
            for x in m.carrier().points().unwrap() {
                assert!(z.pairs.iter().any(|&(a, _)| a == x));
            }
        }
    }

    #[test]
    fn small_run_passes_and_fault_is_caught() {
        let config = OracleConfig::uniform(11, 5);
        for report in run_all(&config) {
            assert!(report.passed(), "{}: {:?}", report.name, report.failures);
        }
        let faulty = OracleConfig {
            inject_fault: true,
            ..config
        };
        let failed: Vec<&str> = run_all(&faulty)
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.name)
            .collect();
        assert_eq!(failed, ["adequacy", "fixpoint-games"]);
    }

    #[test]
    fn zero_cases_is_vacuous() {
        let reports = run_all(&OracleConfig::uniform(0, 0));
        assert!(reports.iter().all(|r| r.passed() && r.cases == 0));
    }
}
