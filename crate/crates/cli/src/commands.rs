use std::fs;
use std::path::Path;

use clopenmu::algebra::LimitParams;
use clopenmu::bisim::{
    invariance_suite, is_clopen_bisimulation, is_kripke_bisimulation, largest_bisimulation,
    z_closure_violations, BisimRelation,
};
use clopenmu::formula::{Formula, Polarity};
use clopenmu::game_build::{
    build_clopen_game_i, build_clopen_game_ii, build_eval_game, build_tarski_game, BuiltGame,
    OperatorSpec,
};
use clopenmu::game_core::{solve_parity, Arena, Player, SolveResult};
use clopenmu::oracle::{random_formula, run_all, OracleConfig};
use clopenmu::semantics::{eval_den, eval_standard, Env};
use clopenmu::space::ModalSpaceModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{load_model, BisimArgs, Failure, GameAction, GameKind};

fn clean(formula: &Formula) -> Formula {
    if formula.is_clean() {
        formula.clone()
    } else {
        formula.to_clean()
    }
}

fn polarity_word(p: Polarity) -> &'static str {
    match p {
        Polarity::Mu => "mu",
        Polarity::Nu => "nu",
    }
}

pub fn check(
    model: &ModalSpaceModel,
    formula: &Formula,
    standard: bool,
    params: &LimitParams,
    machine: bool,
) -> Result<(), Failure> {
    let formula = clean(formula);
    let env = Env::new();
    let clopen = eval_den(model, &formula, &env, params);
    match &clopen {
        Ok(den) => {
            if machine {
                println!("clopen {}", den.value);
            } else {
                println!("formula:  {formula}");
                println!("clopen:   {}", den.value);
            }
            for var in den.analysis.priority_order() {
                let trace = den.trace_of(var).expect("every bound variable has a trace");
                let pol = polarity_word(trace.polarity);
                if machine {
                    println!(
                        "fixpoint {var} {pol} stages={} limits={} closure={}",
                        trace.stage_count(),
                        trace.limit_count(),
                        trace.closure_ordinal()
                    );
                } else {
                    println!(
                        "  {pol} {var}: {} stages, {} limit stages, closes at {}",
                        trace.stage_count(),
                        trace.limit_count(),
                        trace.closure_ordinal()
                    );
                }
            }
        }
        Err(e) => {
            if machine {
                println!("clopen error {}", e.kind());
            } else {
                println!("formula:  {formula}");
                println!("clopen:   undefined ({e})");
            }
        }
    }
    let mut standard_result = Ok(());
    if standard {
        match eval_standard(model, &formula, &env, params) {
            Ok(value) => {
                if machine {
                    println!("standard {value}");
                } else {
                    println!("standard: {value}");
                }
                if let Ok(den) = &clopen {
                    let same = den.value.set_eq(&value).unwrap_or(false);
                    if machine {
                        println!("agree {same}");
                    } else if !same {
                        println!("the two semantics differ on this formula");
                    }
                }
            }
            Err(e) => {
                if machine {
                    println!("standard error {}", e.kind());
                } else {
                    println!("standard: undefined ({e})");
                }
                standard_result = Err(e);
            }
        }
    }
    clopen.map(|_| ()).and(standard_result).map_err(Failure::from)
}

pub fn validate(path: &Path, machine: bool) -> Result<(), Failure> {
    let model = ModalSpaceModel::from_file(path)?;
    let report = model.validate();
    if machine {
        for c in &report.checks {
            println!(
                "check {} {} {}",
                c.axiom,
                if c.passed { "pass" } else { "fail" },
                c.subject
            );
        }
        println!("valid {}", report.passed());
    } else {
        println!("carrier: {}", model.carrier());
        print!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::validation(
            "ValidationFailed",
            format!("{} violates the modal space axioms", path.display()),
        ))
    }
}

enum Built {
    Fixpoint(BuiltGame, String),
    Eval(clopenmu::game_build::EvalGame),
}

impl Built {
    fn arena(&self) -> &Arena {
        match self {
            Built::Fixpoint(g, _) => g.arena(),
            Built::Eval(g) => g.arena(),
        }
    }

    fn title(&self) -> String {
        match self {
            Built::Fixpoint(_, t) => t.clone(),
            Built::Eval(_) => "evaluation game".into(),
        }
    }

    fn winning(&self, solved: &SolveResult) -> clopenmu::algebra::SetDescriptor {
        match self {
            Built::Fixpoint(g, _) => g.winning_states(solved),
            Built::Eval(g) => g.winning_points(solved, g.analysis().root()),
        }
    }
}

fn build(
    kind: GameKind,
    model: &ModalSpaceModel,
    formula: &Formula,
    params: &LimitParams,
) -> Result<Built, Failure> {
    if kind == GameKind::Eval {
        return Ok(Built::Eval(build_eval_game(&clean(formula), model)?));
    }
    let (pol, op) = OperatorSpec::from_binder(model.clone(), formula, *params)?;
    let (game, name) = match kind {
        GameKind::Tarski => (build_tarski_game(&op, pol)?, "Tarski game"),
        GameKind::G1 => (build_clopen_game_i(&op, pol)?, "clopen game I"),
        GameKind::G2 => (build_clopen_game_ii(&op, pol)?, "clopen game II"),
        GameKind::Eval => unreachable!(),
    };
    Ok(Built::Fixpoint(game, format!("{name} ({})", polarity_word(pol))))
}

pub fn game(
    action: GameAction,
    kind: GameKind,
    model: &ModalSpaceModel,
    formula: &Formula,
    output: Option<&Path>,
    params: &LimitParams,
    machine: bool,
) -> Result<(), Failure> {
    let built = build(kind, model, formula, params)?;
    let arena = built.arena();
    if action == GameAction::Export {
        let text = arena.export();
        return match output {
            Some(path) => fs::write(path, text)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        };
    }
    if machine {
        println!("positions {}", arena.len());
        println!("moves {}", arena.move_count());
        println!("max-priority {}", arena.max_priority());
    } else {
        println!("game:         {}", built.title());
        println!("positions:    {}", arena.len());
        println!("moves:        {}", arena.move_count());
        println!("max priority: {}", arena.max_priority());
    }
    if action == GameAction::Solve {
        let solved = solve_parity(arena);
        let winning = built.winning(&solved);
        let (e, a) = (
            solved.region(Player::Exists).len(),
            solved.region(Player::Forall).len(),
        );
        if machine {
            println!("winning {winning}");
            println!("exists-region {e}");
            println!("forall-region {a}");
        } else {
            println!("∃ wins at:    {winning}");
            println!("regions:      ∃ {e}, ∀ {a} positions");
        }
    }
    Ok(())
}

pub fn oracle(
    seed: u64,
    iterations: Option<usize>,
    inject_fault: bool,
    machine: bool,
) -> Result<(), Failure> {
    let mut config = match iterations {
        Some(n) => OracleConfig::uniform(seed, n),
        None => OracleConfig {
            seed,
            ..OracleConfig::default()
        },
    };
    config.inject_fault = inject_fault;
    if iterations == Some(0) {
        eprintln!("warning: 0 iterations, every suite passes without checking anything");
    }
    let reports = run_all(&config);
    let mut failed = 0;
    for r in &reports {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        if machine {
            println!("suite {} {verdict} cases={} failures={}", r.name, r.cases, r.failures.len());
        } else {
            println!(
                "{verdict} {:<26} {:>5} cases  {:>8.2?}",
                r.name, r.cases, r.elapsed
            );
            for f in r.failures.iter().take(5) {
                println!("     {f}");
            }
            if r.failures.len() > 5 {
                println!("     ... {} more", r.failures.len() - 5);
            }
        }
        if !r.passed() {
            failed += 1;
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::semantic(
            "OracleFailed",
            format!("{failed} of {} suites failed (seed {seed})", reports.len()),
        ))
    }
}

/// Random formulas over the proposition letters shared by both models.
fn random_formulas(m1: &ModalSpaceModel, m2: &ModalSpaceModel, count: usize, seed: u64) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let usable = |f: &Formula| {
        f.free_vars()
            .iter()
            .all(|p| m1.prop(p).is_some() && m2.prop(p).is_some())
    };
    let mut out = Vec::new();
    for _ in 0..count.saturating_mul(50) {
        if out.len() == count {
            break;
        }
        let f = random_formula(&mut rng, 4, 2);
        if usable(&f) {
            out.push(f);
        }
    }
    out
}

pub fn bisim(args: &BisimArgs, params: &LimitParams, machine: bool) -> Result<(), Failure> {
    let m1 = load_model(&args.model)?;
    let m2 = load_model(&args.model2)?;
    let (z, source) = match &args.relation {
        Some(path) => (BisimRelation::from_file(path)?, "supplied"),
        None => (largest_bisimulation(&m1, &m2)?, "largest"),
    };
    let describe = |z: &BisimRelation| {
        let mut s = format!("{} pairs", z.pairs.len());
        if let Some(t) = z.tail {
            s.push_str(&format!(", tail shift {}", t.shift));
        }
        if z.inf_pair {
            s.push_str(", (inf, inf)");
        }
        s
    };
    if machine {
        println!("relation {source} pairs={}", z.pairs.len());
    } else {
        println!("relation: {source}, {}", describe(&z));
        if source == "largest" {
            for line in z.to_string().lines() {
                println!("  {line}");
            }
        }
    }
    let verdicts = [
        ("kripke", is_kripke_bisimulation(&z, &m1, &m2)),
        ("clopen", is_clopen_bisimulation(&z, &m1, &m2)),
    ];
    for (name, verdict) in &verdicts {
        match (verdict, machine) {
            (Ok(()), true) => println!("{name} yes"),
            (Ok(()), false) => println!("{name} bisimulation: yes"),
            (Err(v), true) => match v.pair {
                Some((a, b)) => println!("{name} no {a} {b}"),
                None => println!("{name} no"),
            },
            (Err(v), false) => println!("{name} bisimulation: no, {v}"),
        }
    }
    if let Some((_, Err(v))) = verdicts.iter().find(|(_, v)| v.is_err()) {
        return Err(Failure::validation("NotABisimulation", v.to_string()));
    }

    let formulas = if args.formula.is_empty() {
        random_formulas(&m1, &m2, args.formulas, args.seed)
    } else {
        args.formula
            .iter()
            .map(|t| Formula::parse(t).map(|f| clean(&f)))
            .collect::<Result<_, _>>()?
    };
    let report = invariance_suite(&m1, &m2, &z, &formulas, params);
    if machine {
        println!(
            "invariance formulas={} checked={} violations={} errors={}",
            formulas.len(),
            report.checked,
            report.violations.len(),
            report.errors.len()
        );
    } else {
        println!(
            "invariance: {} formulas, {} comparisons, {} violations, {} not evaluable",
            formulas.len(),
            report.checked,
            report.violations.len(),
            report.errors.len()
        );
    }
    for v in &report.violations {
        let (a, b) = v.pair;
        println!(
            "  {} holds at {a}: {}, at {b}: {}",
            v.formula, v.left, v.right
        );
    }
    let games_apply = m1.carrier().is_finite() && m2.carrier().is_finite();
    let mut disagreements = 0;
    if games_apply {
        for phi in &formulas {
            let bad = z_closure_violations(&m1, &m2, &z, phi)?;
            for (a, b) in &bad {
                println!("  evaluation games of {phi} disagree at ({a}, {b})");
            }
            disagreements += bad.len();
        }
        if machine {
            println!("games formulas={} disagreements={disagreements}", formulas.len());
        } else {
            println!(
                "evaluation games: {} formulas, {disagreements} disagreements",
                formulas.len()
            );
        }
    }
    if report.passed() && disagreements == 0 {
        Ok(())
    } else {
        Err(Failure::semantic(
            "InvarianceViolated",
            "related points disagree on a formula",
        ))
    }
}
