//! Interactive sessions. The machine plays ∃; ∀'s moves are read one per
//! line. When the input is not a terminal each line is echoed after the
//! prompt so that a piped session reads as a transcript.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, BufRead, IsTerminal, Write};

use clopenmu::algebra::{LimitParams, Point, SetDescriptor};
use clopenmu::formula::{Formula, Polarity};
use clopenmu::game_build::{
    build_eval_game, check_forall_reply, MuDepthStrategy, NuGreedyStrategy, OperatorSpec,
};
use clopenmu::game_core::{solve_parity, Player, PositionId};
use clopenmu::space::ModalSpaceModel;

use crate::Failure;

struct Console<'a, R: BufRead> {
    input: &'a mut R,
    echo: bool,
}

impl<'a, R: BufRead> Console<'a, R> {
    fn new(input: &'a mut R) -> Self {
        Console {
            input,
            echo: !io::stdin().is_terminal(),
        }
    }

    /// Prompts and reads one trimmed line; `None` at end of input.
    fn ask(&mut self, prompt: &str) -> Option<String> {
        print!("{prompt} ∀> ");
        let _ = io::stdout().flush();
        let mut line = String::new();
        match self.input.read_line(&mut line) {
            Ok(0) | Err(_) => {
                println!();
                println!("input ended, play abandoned");
                None
            }
            Ok(_) => {
                let line = line.trim().to_string();
                if self.echo {
                    println!("{line}");
                }
                Some(line)
            }
        }
    }
}

pub fn play_g2<R: BufRead>(
    model: &ModalSpaceModel,
    formula: &Formula,
    from: Point,
    params: &LimitParams,
    input: &mut R,
) -> Result<(), Failure> {
    let (polarity, op) = OperatorSpec::from_binder(model.clone(), formula, *params)?;
    let mut console = Console::new(input);
    println!("clopen game II for {formula}, starting at {from}");
    match polarity {
        Polarity::Mu => play_mu(&MuDepthStrategy::new(&op)?, from, model, &mut console),
        Polarity::Nu => play_nu(&NuGreedyStrategy::new(&op)?, from, &mut console),
    }
}

fn play_mu<R: BufRead>(
    strategy: &MuDepthStrategy,
    from: Point,
    model: &ModalSpaceModel,
    console: &mut Console<'_, R>,
) -> Result<(), Failure> {
    let mut x = from;
    loop {
        let u = strategy.state_move(x)?;
        let depth = strategy.depth(x).expect("state_move succeeded");
        println!("∃ at {x} (depth {depth}) plays (∀, {u})");
        if u.is_empty() {
            println!("∀ cannot move: ∃ wins");
            return Ok(());
        }
        let reply = loop {
            let Some(line) = console.ask("clopen set meeting the offer") else {
                return Ok(());
            };
            let reply = match SetDescriptor::parse(model.carrier(), &line) {
                Ok(r) => r,
                Err(e) => {
                    println!("illegal: {e}");
                    continue;
                }
            };
            match check_forall_reply(&u, &reply) {
                Ok(()) => break reply,
                Err(why) => println!("illegal: {why}"),
            }
        };
        let y = strategy
            .pick(&reply)
            .expect("a legal reply meets a stage of the least fixpoint");
        println!("∃ picks {y} from {reply}");
        x = y;
    }
}

fn play_nu<R: BufRead>(
    strategy: &NuGreedyStrategy,
    from: Point,
    console: &mut Console<'_, R>,
) -> Result<(), Failure> {
    let gfp = strategy.gfp().clone();
    let mut visited = BTreeSet::new();
    let mut x = from;
    loop {
        strategy.state_move(x)?;
        if !visited.insert(x) {
            println!("{x} was visited before; ∃ repeats the same moves forever and wins");
            return Ok(());
        }
        println!("∃ at {x} plays {gfp}");
        x = loop {
            let Some(line) = console.ask("point of the set") else {
                return Ok(());
            };
            match Point::parse(&line) {
                Ok(y) if gfp.contains(y).unwrap_or(false) => break y,
                Ok(y) => println!("illegal: {y} is not in {gfp}"),
                Err(e) => println!("illegal: {e}"),
            }
        };
    }
}

pub fn play_eval<R: BufRead>(
    model: &ModalSpaceModel,
    formula: &Formula,
    from: Point,
    input: &mut R,
) -> Result<(), Failure> {
    let formula = if formula.is_clean() {
        formula.clone()
    } else {
        formula.to_clean()
    };
    let game = build_eval_game(&formula, model)?;
    let arena = game.arena();
    let solved = solve_parity(arena);
    let root = game.analysis().root();
    let start = game.id_at(root, from).expect("root positions are built");
    let mut console = Console::new(input);
    println!("evaluation game for {formula}, starting at {from}");
    if !solved.win_exists().contains(&start) {
        println!("∀ can win from here");
    }
    let strategy = solved.strategy(Player::Exists);
    let mut seen: HashMap<PositionId, usize> = HashMap::new();
    let mut history: Vec<PositionId> = Vec::new();
    let mut at = start;
    loop {
        if let Some(&i) = seen.get(&at) {
            let top = history[i..].iter().map(|&v| arena.priority(v)).max().unwrap_or(0);
            let winner = Player::of_parity(top);
            println!(
                "{} repeats; the cycle has top priority {top}, so {winner} wins",
                arena.tag(at)
            );
            return Ok(());
        }
        seen.insert(at, history.len());
        history.push(at);
        let owner = arena.owner(at);
        let moves = arena.successors(at);
        println!(
            "at {} ({owner} to move, priority {})",
            arena.tag(at),
            arena.priority(at)
        );
        if moves.is_empty() {
            println!("{owner} cannot move: {} wins", owner.opponent());
            return Ok(());
        }
        at = match owner {
            Player::Exists => {
                let to = strategy.get(at).unwrap_or(moves[0]);
                println!("∃ moves to {}", arena.tag(to));
                to
            }
            Player::Forall => {
                for (i, &m) in moves.iter().enumerate() {
                    println!("  [{i}] {}", arena.tag(m));
                }
                loop {
                    let Some(line) = console.ask("move number or position") else {
                        return Ok(());
                    };
                    let chosen = match line.parse::<usize>() {
                        Ok(i) => moves.get(i).copied(),
                        Err(_) => moves.iter().copied().find(|&m| arena.tag(m) == line),
                    };
                    match chosen {
                        Some(m) => break m,
                        None => println!("illegal: `{line}` is not one of the listed moves"),
                    }
                }
            }
        };
    }
}
