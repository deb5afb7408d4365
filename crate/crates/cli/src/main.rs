//! Command-line front end for `clopenmu`.
//!
//! Exit codes: 0 success, 1 usage error, 2 semantic error (no clopen
//! fixpoint, budget exhausted, failing oracle suite), 3 validation error
//! (bad model or relation, not a bisimulation, arena not buildable).

mod commands;
mod play;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clopenmu::algebra::LimitParams;
use clopenmu::bisim::BisimError;
use clopenmu::formula::{Formula, FormulaError};
use clopenmu::game_build::GameBuildError;
use clopenmu::semantics::SemanticsError;
use clopenmu::space::{ModalSpaceModel, ModelError};

#[derive(Parser, Debug)]
#[command(name = "clopenmu", version, about = "Clopen fixpoint semantics and games for the modal mu-calculus")]
struct Cli {
    /// Print stable, line-oriented output for scripts.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on a model.
    Check(CheckArgs),
    /// Check the modal-space axioms of a model.
    Validate(ModelArgs),
    /// Build, solve or export a game arena (finite models only).
    Game(GameArgs),
    /// Play a game against the machine, which plays ∃; ∀'s moves are read
    /// from standard input.
    Play(PlayArgs),
    /// Run the randomized cross-check suites.
    Oracle(OracleArgs),
    /// Check or compute a bisimulation and test formula invariance.
    Bisim(BisimArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Formula text, e.g. "mu q. (p \/ <> q)".
    #[arg(long, required_unless_present = "formula_file")]
    formula: Option<String>,
    /// File containing the formula.
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LimitArgs {
    /// Stages computed per chain before a limit is attempted.
    #[arg(long)]
    budget: Option<usize>,
    /// Maximum number of limit stages per fixpoint.
    #[arg(long = "limit-k")]
    limit_k: Option<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    formula: FormulaArgs,
    /// Also evaluate in the standard powerset semantics.
    #[arg(long)]
    standard: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GameAction {
    Build,
    Solve,
    Export,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GameKind {
    Tarski,
    G1,
    G2,
    Eval,
}

#[derive(Args, Debug)]
struct GameArgs {
    action: GameAction,
    /// The game. The fixpoint games use the operator of the formula, which
    /// must be a fixpoint `mu p. ...` or `nu p. ...`; its binder fixes the
    /// polarity.
    #[arg(long, value_enum)]
    kind: GameKind,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    formula: FormulaArgs,
    /// Write the exported arena here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PlayKind {
    G2,
    Eval,
}

#[derive(Args, Debug)]
struct PlayArgs {
    #[arg(long, value_enum)]
    kind: PlayKind,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    formula: FormulaArgs,
    /// Starting point, e.g. `3` or `inf`.
    #[arg(long)]
    from: String,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use this many cases in every suite instead of the defaults.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args, Debug)]
struct BisimArgs {
    /// Left model.
    #[arg(long)]
    model: PathBuf,
    /// Right model.
    #[arg(long)]
    model2: PathBuf,
    /// Relation file; without it the largest bisimulation is computed.
    #[arg(long)]
    relation: Option<PathBuf>,
    /// Formulas to compare; random ones are drawn when none is given.
    #[arg(long)]
    formula: Vec<String>,
    /// Number of random formulas.
    #[arg(long, default_value_t = 100)]
    formulas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    limits: LimitArgs,
}

/// An error with its exit code and the name printed in machine output.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "Usage".into(),
            message: message.into(),
        }
    }

    pub fn semantic(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: kind.into(),
            message: message.into(),
        }
    }

    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            kind: kind.into(),
            message: message.into(),
        }
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        match &e {
            SemanticsError::Model(m) => Failure::validation("ModelError", m.to_string()),
            SemanticsError::Formula(_) => Failure::usage(e.to_string()),
            _ => Failure::semantic(e.kind(), e.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io(m) => Failure::usage(m),
            other => Failure::validation("ModelError", other.to_string()),
        }
    }
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        Failure::usage(format!("formula: {e}"))
    }
}

impl From<GameBuildError> for Failure {
    fn from(e: GameBuildError) -> Self {
        let kind = format!("{e:?}");
        let kind = kind.split(['(', ' ', '{']).next().unwrap_or("GameError").to_string();
        match e {
            GameBuildError::Semantics(s) => s.into(),
            GameBuildError::SymbolicNotSupported(_) | GameBuildError::TooLarge { .. } => {
                Failure::validation(&kind, e.to_string())
            }
            other => Failure::semantic(&kind, other.to_string()),
        }
    }
}

impl From<BisimError> for Failure {
    fn from(e: BisimError) -> Self {
        match e {
            BisimError::Io(m) => Failure::usage(m),
            BisimError::Game(g) => g.into(),
            other => Failure::validation("RelationError", other.to_string()),
        }
    }
}

pub fn load_model(path: &Path) -> Result<ModalSpaceModel, Failure> {
    let model = ModalSpaceModel::from_file(path)?;
    let report = model.validate();
    if !report.passed() {
        return Err(Failure::validation(
            "ValidationFailed",
            format!("{} is not a modal space model:\n{report}", path.display()),
        ));
    }
    Ok(model)
}

fn load_formula(args: &FormulaArgs) -> Result<Formula, Failure> {
    let text = match (&args.formula, &args.formula_file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
        (None, None) => return Err(Failure::usage("a formula is required")),
    };
    Ok(Formula::parse(text.trim())?)
}

fn limit_params(args: &LimitArgs) -> Result<LimitParams, Failure> {
    let mut params = LimitParams::default();
    if let Some(b) = args.budget {
        params.finite_budget = b;
    }
    if let Some(k) = args.limit_k {
        params.limit_budget = k;
    }
    params
        .validate()
        .map_err(|e| Failure::usage(e.to_string()))?;
    Ok(params)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let machine = cli.machine;
    match cli.command {
        Command::Check(a) => commands::check(
            &load_model(&a.model.model)?,
            &load_formula(&a.formula)?,
            a.standard,
            &limit_params(&a.limits)?,
            machine,
        ),
        Command::Validate(a) => commands::validate(&a.model, machine),
        Command::Game(a) => commands::game(
            a.action,
            a.kind,
            &load_model(&a.model.model)?,
            &load_formula(&a.formula)?,
            a.output.as_deref(),
            &limit_params(&a.limits)?,
            machine,
        ),
        Command::Play(a) => {
            let model = load_model(&a.model.model)?;
            let formula = load_formula(&a.formula)?;
            let params = limit_params(&a.limits)?;
            let from = clopenmu::algebra::Point::parse(&a.from)
                .map_err(|e| Failure::usage(e.to_string()))?;
            model
                .carrier()
                .check(from)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            match a.kind {
                PlayKind::G2 => play::play_g2(&model, &formula, from, &params, &mut input),
                PlayKind::Eval => play::play_eval(&model, &formula, from, &mut input),
            }
        }
        Command::Oracle(a) => commands::oracle(a.seed, a.iterations, a.inject_fault, machine),
        Command::Bisim(a) => commands::bisim(&a, &limit_params(&a.limits)?, machine),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let machine = cli.machine;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if machine {
                println!("error {}", f.kind);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
