use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use clopenmu::game_core::Arena;

fn model(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "models", name]
        .iter()
        .collect();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    run_with_input(args, "")
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_clopenmu"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const REACH: &str = "mu q. (p \\/ <> q)";

#[test]
fn check_divergence_golden() {
    let o = run(&[
        "--machine", "check", "--model", &model("countdown.model"), "--formula", REACH, "--standard",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "clopen all\n\
         fixpoint q mu stages=66 limits=1 closure=ω\n\
         standard co{}\n\
         agree false\n"
    );
}

#[test]
fn check_true_is_full_carrier() {
    let o = run(&["--machine", "check", "--model", &model("chain3.model"), "--formula", "true"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "clopen all\n");
}

#[test]
fn check_names_limit_failures() {
    let o = run(&[
        "--machine",
        "check",
        "--model",
        &model("twoway.model"),
        "--formula",
        "mu q. (p \\/ <> <> q)",
        "--standard",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(
        stdout(&o),
        "clopen error JoinUndefined\nstandard error NotRepresentable\nerror JoinUndefined\n"
    );
}

#[test]
fn check_reads_formula_files() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "{REACH}").unwrap();
    let path = f.path().to_str().unwrap();
    let o = run(&["--machine", "check", "--model", &model("chain3.model"), "--formula-file", path]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("clopen all\n"));
}

#[test]
fn limit_budget_flags_are_honoured() {
    let o = run(&[
        "check", "--model", &model("countdown.model"), "--formula", REACH, "--limit-k", "0",
    ]);
    assert_eq!(code(&o), 1);
    let o = run(&[
        "--machine", "check", "--model", &model("countdown.model"), "--formula", REACH, "--budget", "8",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("clopen all\n"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["check", "--model", &model("chain3.model")])), 1);
    assert_eq!(
        code(&run(&["check", "--model", &model("chain3.model"), "--formula", "mu q. ("])),
        1
    );
    assert_eq!(code(&run(&["check", "--model", "/nonexistent", "--formula", "p"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn invalid_models_exit_three() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "carrier omega k=1\nshift -1\nedge inf 0\nval p {{0}}\n").unwrap();
    let path = f.path().to_str().unwrap();
    let o = run(&["--machine", "validate", "--model", path]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("check diamond-clopen fail"));
    assert!(stdout(&o).contains("valid false"));
    assert_eq!(code(&run(&["check", "--model", path, "--formula", "p"])), 3);

    let o = run(&["validate", "--model", &model("countdown.model")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn eval_game_wins_on_the_whole_chain() {
    let o = run(&[
        "--machine", "game", "solve", "--kind", "eval", "--model", &model("chain3.model"),
        "--formula", REACH,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("winning all\n"), "{}", stdout(&o));
}

#[test]
fn fixpoint_games_agree_on_winning_states() {
    for kind in ["tarski", "g1", "g2"] {
        let o = run(&[
            "--machine", "game", "solve", "--kind", kind, "--model", &model("chain3.model"),
            "--formula", "mu q. <> q",
        ]);
        assert_eq!(code(&o), 0, "{kind}: {}", stderr(&o));
        assert!(stdout(&o).contains("winning empty\n"), "{kind}: {}", stdout(&o));
        let o = run(&[
            "--machine", "game", "solve", "--kind", kind, "--model", &model("chain3.model"),
            "--formula", "nu q. q",
        ]);
        assert!(stdout(&o).contains("winning all\n"), "{kind}: {}", stdout(&o));
    }
}

#[test]
fn games_need_finite_models() {
    let o = run(&["game", "build", "--kind", "g2", "--model", &model("countdown.model"), "--formula", REACH]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("SymbolicNotSupported"));
    let o = run(&["game", "build", "--kind", "g2", "--model", &model("chain3.model"), "--formula", "p"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exported_arenas_reimport() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["tarski", "g1", "g2", "eval"] {
        let path = dir.path().join(format!("{kind}.arena"));
        let o = run(&[
            "game", "export", "--kind", kind, "--model", &model("cycle3.model"), "--formula",
            "nu q. (p /\\ [] [] [] q)", "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{kind}: {}", stderr(&o));
        let text = std::fs::read_to_string(&path).unwrap();
        let arena = Arena::parse_export(&text).unwrap();
        assert_eq!(arena.export(), text, "{kind}");

        let o = run(&[
            "--machine", "game", "build", "--kind", kind, "--model", &model("cycle3.model"),
            "--formula", "nu q. (p /\\ [] [] [] q)",
        ]);
        assert!(stdout(&o).starts_with(&format!("positions {}\n", arena.len())));
    }
}

#[test]
fn g2_session_from_infinity() {
    let args = [
        "play", "--kind", "g2", "--model", &model("countdown.model"), "--formula", REACH, "--from",
        "inf",
    ];
    let script = "co{0,1,2,3,4}+inf\n{2,9}\n{0,1}\n";
    let first = run_with_input(&args, script);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.contains("∃ at inf (depth ω) plays (∀, all)"), "{text}");
    assert!(text.contains("∃ picks 5 from co{0,1,2,3,4}+inf"), "{text}");
    assert!(text.contains("∃ picks 2 from {2,9}"), "{text}");
    assert!(text.trim_end().ends_with("∀ cannot move: ∃ wins"), "{text}");

    let second = run_with_input(&args, script);
    assert_eq!(stdout(&second), text);
}

#[test]
fn g2_session_rejects_illegal_replies() {
    let args = [
        "play", "--kind", "g2", "--model", &model("countdown.model"), "--formula", REACH, "--from",
        "3",
    ];
    let o = run_with_input(&args, "{5}\n{0}\n");
    let text = stdout(&o);
    assert!(text.contains("illegal: {5} does not meet {0,1,2}"), "{text}");
    // The offer is unchanged and the next reply is played against it.
    assert_eq!(text.matches("∃ at 3").count(), 1);
    assert!(text.contains("∃ picks 0 from {0}"), "{text}");
}

#[test]
fn nu_session_detects_repetition() {
    let args = [
        "play", "--kind", "g2", "--model", &model("twoway.model"), "--formula", "nu q. <> q",
        "--from", "2",
    ];
    let o = run_with_input(&args, "inf\nfoo\ninf\n");
    let text = stdout(&o);
    assert!(text.contains("illegal"), "{text}");
    assert!(text.contains("inf was visited before"), "{text}");
}

#[test]
fn eval_session_follows_the_solved_strategy() {
    let args = [
        "play", "--kind", "eval", "--model", &model("cycle3.model"), "--formula",
        "nu q. (p \\/ <> q)", "--from", "1",
    ];
    let o = run_with_input(&args, "7\n0\n0\n0\n");
    let text = stdout(&o);
    assert!(text.contains("illegal: `7`"), "{text}");
    assert!(text.contains("so ∃ wins"), "{text}");
    assert_eq!(stdout(&run_with_input(&args, "7\n0\n0\n0\n")), text);
}

#[test]
fn oracle_passes_and_fails_loudly() {
    let o = run(&["--machine", "oracle", "--seed", "3", "--iterations", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(" PASS ").count(), 7);

    let o = run(&["oracle", "--iterations", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));

    let o = run(&["--machine", "oracle", "--iterations", "4", "--inject-fault"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("suite adequacy FAIL"));
}

#[test]
fn bisim_reports() {
    let o = run(&[
        "--machine", "bisim", "--model", &model("cycle3.model"), "--model2",
        &model("cycle6.model"), "--formulas", "10",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(
        stdout(&o),
        "relation largest pairs=6\nkripke yes\nclopen yes\n\
         invariance formulas=10 checked=60 violations=0 errors=0\n\
         games formulas=10 disagreements=0\n"
    );

    let o = run(&[
        "bisim", "--model", &model("cycle3.model"), "--model2", &model("cycle6.model"),
        "--relation", &model("cycle-broken.rel"),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("at (0, 4)"), "{}", stdout(&o));

    for (m2, rel) in [("countdown.model", "countdown-identity.rel"), ("countdown-shifted.model", "countdown-shift.rel")] {
        let o = run(&[
            "bisim", "--model", &model("countdown.model"), "--model2", &model(m2), "--relation",
            &model(rel), "--formulas", "10",
        ]);
        assert_eq!(code(&o), 0, "{rel}: {}", stdout(&o));
    }
}

#[test]
fn bisim_accepts_explicit_formulas() {
    let o = run(&[
        "--machine", "bisim", "--model", &model("countdown.model"), "--model2",
        &model("countdown-shifted.model"), "--relation", &model("countdown-shift.rel"), "--formula", REACH,
        "--formula", "nu q. <> q",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("invariance formulas=2"));
}
