//! Two-player graph games with parity winning conditions.
//!
//! A player who cannot move loses. An infinite play is won by `∃` iff the
//! highest priority occurring infinitely often is even.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("UndefinedStrategyAt: no strategy move at position {0}")]
    UndefinedStrategyAt(PositionId),
    #[error("IllegalMove: {from} -> {to} is not a move")]
    IllegalMove { from: PositionId, to: PositionId },
    #[error("arena line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The player who wins an infinite play whose top recurring priority is `p`.
    pub fn of_parity(p: u32) -> Player {
        if p.is_multiple_of(2) {
            Player::Exists
        } else {
            Player::Forall
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Player::Exists => "E",
            Player::Forall => "A",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Exists => "∃",
            Player::Forall => "∀",
        })
    }
}

pub type PositionId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub owner: Player,
    pub priority: u32,
    pub tag: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Arena {
    positions: Vec<Position>,
    successors: Vec<Vec<PositionId>>,
}

impl Arena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_position(&mut self, owner: Player, priority: u32, tag: impl Into<String>) -> PositionId {
        self.positions.push(Position {
            owner,
            priority,
            tag: tag.into(),
        });
        self.successors.push(Vec::new());
        self.positions.len() - 1
    }

    /// Adds a move; duplicates are ignored.
    pub fn add_move(&mut self, from: PositionId, to: PositionId) {
        assert!(to < self.positions.len(), "move target {to} does not exist");
        if !self.successors[from].contains(&to) {
            self.successors[from].push(to);
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, id: PositionId) -> &Position {
        &self.positions[id]
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn owner(&self, id: PositionId) -> Player {
        self.positions[id].owner
    }

    pub fn priority(&self, id: PositionId) -> u32 {
        self.positions[id].priority
    }

    pub fn tag(&self, id: PositionId) -> &str {
        &self.positions[id].tag
    }

    pub fn successors(&self, id: PositionId) -> &[PositionId] {
        &self.successors[id]
    }

    pub fn is_dead_end(&self, id: PositionId) -> bool {
        self.successors[id].is_empty()
    }

    pub fn move_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn max_priority(&self) -> u32 {
        self.positions.iter().map(|p| p.priority).max().unwrap_or(0)
    }

    pub fn find_tag(&self, tag: &str) -> Option<PositionId> {
        self.positions.iter().position(|p| p.tag == tag)
    }

    /// One line per position: `id owner priority tag -> succ,succ,...`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (id, p) in self.positions.iter().enumerate() {
            let succ: Vec<String> = self.successors[id].iter().map(|s| s.to_string()).collect();
            out.push_str(&format!(
                "{id} {} {} {} -> {}\n",
                p.owner.symbol(),
                p.priority,
                p.tag,
                succ.join(",")
            ));
        }
        out
    }

    /// Reads the format written by [`export`](Self::export).
    pub fn parse_export(text: &str) -> Result<Arena, GameError> {
        let mut arena = Arena::new();
        let mut pending = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: &str| GameError::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            let (head, succ) = match line.rfind(" -> ") {
                Some(at) => (&line[..at], &line[at + 4..]),
                None => match line.strip_suffix(" ->") {
                    Some(head) => (head, ""),
                    None => return Err(err("missing ` -> `")),
                },
            };
            let mut parts = head.splitn(4, ' ');
            let id: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad position id"))?;
            if id != arena.len() {
                return Err(err("position ids must be consecutive from 0"));
            }
            let owner = match parts.next() {
                Some("E") => Player::Exists,
                Some("A") => Player::Forall,
                _ => return Err(err("owner must be E or A")),
            };
            let priority: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad priority"))?;
            let tag = parts.next().unwrap_or("");
            arena.add_position(owner, priority, tag);
            let targets = succ
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>().map_err(|_| err("bad successor")))
                .collect::<Result<Vec<_>, _>>()?;
            pending.push((id, targets, i + 1));
        }
        for (id, targets, line) in pending {
            for t in targets {
                if t >= arena.len() {
                    return Err(GameError::Parse {
                        line,
                        message: format!("successor {t} does not exist"),
                    });
                }
                arena.add_move(id, t);
            }
        }
        Ok(arena)
    }
}

/// A history-free strategy: a partial map from positions to moves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Strategy {
    moves: BTreeMap<PositionId, PositionId>,
}

impl Strategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, from: PositionId, to: PositionId) {
        self.moves.insert(from, to);
    }

    pub fn get(&self, from: PositionId) -> Option<PositionId> {
        self.moves.get(&from).copied()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PositionId, PositionId)> + '_ {
        self.moves.iter().map(|(&a, &b)| (a, b))
    }
}

impl FromIterator<(PositionId, PositionId)> for Strategy {
    fn from_iter<I: IntoIterator<Item = (PositionId, PositionId)>>(iter: I) -> Self {
        Strategy {
            moves: iter.into_iter().collect(),
        }
    }
}

/// Winning regions and strategies. Each strategy is winning on its
/// player's region and defined (arbitrarily) on the rest of the player's
/// positions that have a move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// The winner of each position.
    pub winner: Vec<Player>,
    pub strategy_exists: Strategy,
    pub strategy_forall: Strategy,
}

impl SolveResult {
    pub fn win_exists(&self) -> BTreeSet<PositionId> {
        self.region(Player::Exists)
    }

    pub fn win_forall(&self) -> BTreeSet<PositionId> {
        self.region(Player::Forall)
    }

    pub fn region(&self, player: Player) -> BTreeSet<PositionId> {
        (0..self.winner.len())
            .filter(|&i| self.winner[i] == player)
            .collect()
    }

    pub fn strategy(&self, player: Player) -> &Strategy {
        match player {
            Player::Exists => &self.strategy_exists,
            Player::Forall => &self.strategy_forall,
        }
    }
}

/// Arena completed with two sinks so that nobody is ever stuck: an `∃` dead
/// end moves to the `∀`-winning sink and vice versa.
struct Total {
    owner: Vec<Player>,
    priority: Vec<u32>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Total {
    fn new(arena: &Arena) -> Self {
        let n = arena.len();
        let (sink_e, sink_a) = (n, n + 1);
        let mut owner: Vec<Player> = arena.positions.iter().map(|p| p.owner).collect();
        let mut priority: Vec<u32> = arena.positions.iter().map(|p| p.priority).collect();
        let mut succ = arena.successors.clone();
        owner.extend([Player::Exists, Player::Forall]);
        priority.extend([0, 1]);
        succ.push(vec![sink_e]);
        succ.push(vec![sink_a]);
        for (v, s) in succ.iter_mut().enumerate().take(n) {
            if s.is_empty() {
                s.push(match owner[v] {
                    Player::Exists => sink_a,
                    Player::Forall => sink_e,
                });
            }
        }
        let mut pred = vec![Vec::new(); n + 2];
        for (v, s) in succ.iter().enumerate() {
            for &w in s {
                pred[w].push(v);
            }
        }
        Total {
            owner,
            priority,
            succ,
            pred,
        }
    }

    /// Attractor of `target` for `player` inside `game`, with the
    /// attracting moves of `player`.
    fn attractor(
        &self,
        game: &[bool],
        target: &[usize],
        player: Player,
        strategy: &mut HashMap<usize, usize>,
    ) -> Vec<bool> {
        let mut attr = vec![false; game.len()];
        let mut remaining: Vec<usize> = (0..game.len())
            .map(|v| self.succ[v].iter().filter(|&&w| game[w]).count())
            .collect();
        let mut queue = Vec::new();
        for &t in target {
            if !attr[t] {
                attr[t] = true;
                queue.push(t);
            }
        }
        while let Some(w) = queue.pop() {
            for &v in &self.pred[w] {
                if !game[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == player {
                    attr[v] = true;
                    strategy.insert(v, w);
                    queue.push(v);
                } else {
                    remaining[v] -= 1;
                    if remaining[v] == 0 {
                        attr[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        attr
    }

    /// Zielonka's recursive algorithm on the subgame `game`. Returns the
    /// winner of each node in the subgame plus positional strategies.
    fn zielonka(&self, game: &[bool]) -> (Vec<Option<Player>>, HashMap<usize, usize>) {
        let nodes: Vec<usize> = (0..game.len()).filter(|&v| game[v]).collect();
        let mut winner = vec![None; game.len()];
        let mut strategy = HashMap::new();
        let Some(top) = nodes.iter().map(|&v| self.priority[v]).max() else {
            return (winner, strategy);
        };
        let i = Player::of_parity(top);
        let top_nodes: Vec<usize> = nodes.iter().copied().filter(|&v| self.priority[v] == top).collect();
        let mut attr_strategy = HashMap::new();
        let a = self.attractor(game, &top_nodes, i, &mut attr_strategy);
        let rest: Vec<bool> = (0..game.len()).map(|v| game[v] && !a[v]).collect();
        let (w1, s1) = self.zielonka(&rest);
        let opponent_region: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| w1[v] == Some(i.opponent()))
            .collect();
        if opponent_region.is_empty() {
            for &v in &nodes {
                winner[v] = Some(i);
                if self.owner[v] != i {
                    continue;
                }
                let m = if rest[v] {
                    s1[&v]
                } else if let Some(&m) = attr_strategy.get(&v) {
                    m
                } else {
                    *self.succ[v].iter().find(|&&w| game[w]).expect("subgame is total")
                };
                strategy.insert(v, m);
            }
            return (winner, strategy);
        }
        let mut b_strategy = HashMap::new();
        let b = self.attractor(game, &opponent_region, i.opponent(), &mut b_strategy);
        let rest2: Vec<bool> = (0..game.len()).map(|v| game[v] && !b[v]).collect();
        let (w2, s2) = self.zielonka(&rest2);
        for &v in &nodes {
            if b[v] {
                winner[v] = Some(i.opponent());
                if self.owner[v] == i.opponent() {
                    let m = if w1[v] == Some(i.opponent()) {
                        s1[&v]
                    } else {
                        b_strategy[&v]
                    };
                    strategy.insert(v, m);
                }
            } else {
                winner[v] = w2[v];
                if let Some(&m) = s2.get(&v) {
                    strategy.insert(v, m);
                }
            }
        }
        (winner, strategy)
    }
}

/// Solves a finite parity game.
pub fn solve_parity(arena: &Arena) -> SolveResult {
    let n = arena.len();
    let total = Total::new(arena);
    let (winner, strategy) = total.zielonka(&vec![true; n + 2]);
    let mut strategy_exists = Strategy::new();
    let mut strategy_forall = Strategy::new();
    for (v, m) in strategy {
        if v >= n || m >= n {
            continue;
        }
        match arena.owner(v) {
            Player::Exists => strategy_exists.set(v, m),
            Player::Forall => strategy_forall.set(v, m),
        }
    }
    // losing positions get the first legal move so that replays are defined
    for v in 0..n {
        let own = match arena.owner(v) {
            Player::Exists => &mut strategy_exists,
            Player::Forall => &mut strategy_forall,
        };
        if own.get(v).is_none() && !arena.is_dead_end(v) {
            own.set(v, arena.successors(v)[0]);
        }
    }
    SolveResult {
        winner: winner[..n].iter().map(|w| w.expect("every node solved")).collect(),
        strategy_exists,
        strategy_forall,
    }
}

/// Does `strategy` win every play for `player` from every position of
/// `region`? Checked on the graph of strategy-compliant moves: no reachable
/// dead end of `player`, and no reachable cycle whose top priority has the
/// opponent's parity.
pub fn verify_strategy(
    arena: &Arena,
    strategy: &Strategy,
    region: &BTreeSet<PositionId>,
    player: Player,
) -> bool {
    let mut reach = vec![false; arena.len()];
    let mut stack: Vec<PositionId> = region.iter().copied().collect();
    for &v in &stack {
        reach[v] = true;
    }
    let mut graph: DiGraph<PositionId, ()> = DiGraph::new();
    let mut index = HashMap::new();
    let mut edges = Vec::new();
    while let Some(v) = stack.pop() {
        let moves: Vec<PositionId> = if arena.owner(v) == player {
            if arena.is_dead_end(v) {
                return false;
            }
            match strategy.get(v) {
                Some(m) if arena.successors(v).contains(&m) => vec![m],
                _ => return false,
            }
        } else {
            arena.successors(v).to_vec()
        };
        for w in moves {
            edges.push((v, w));
            if !reach[w] {
                reach[w] = true;
                stack.push(w);
            }
        }
    }
    for v in (0..arena.len()).filter(|&v| reach[v]) {
        index.insert(v, graph.add_node(v));
    }
    let losing: BTreeSet<u32> = (0..arena.len())
        .filter(|&v| reach[v])
        .map(|v| arena.priority(v))
        .filter(|&p| Player::of_parity(p) != player)
        .collect();
    for q in losing {
        let mut sub: DiGraph<PositionId, ()> = DiGraph::new();
        let mut sub_index = HashMap::new();
        for (&v, _) in index.iter().filter(|(&v, _)| arena.priority(v) <= q) {
            sub_index.insert(v, sub.add_node(v));
        }
        let mut self_loop = BTreeSet::new();
        for &(a, b) in &edges {
            if let (Some(&x), Some(&y)) = (sub_index.get(&a), sub_index.get(&b)) {
                sub.add_edge(x, y, ());
                if a == b {
                    self_loop.insert(a);
                }
            }
        }
        for scc in tarjan_scc(&sub) {
            let cyclic = scc.len() > 1 || self_loop.contains(&sub[scc[0]]);
            if cyclic && scc.iter().any(|&n| arena.priority(sub[n]) == q) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayStatus {
    /// The owner of the last position cannot move and loses.
    Stuck(Player),
    /// The step bound was reached.
    Ongoing,
    /// The play revisited `positions[cycle_start]` and repeats from there.
    InfiniteDetected { cycle_start: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    pub positions: Vec<PositionId>,
    pub status: PlayStatus,
}

impl Play {
    /// The winner, if the play is decided.
    pub fn winner(&self, arena: &Arena) -> Option<Player> {
        match self.status {
            PlayStatus::Stuck(loser) => Some(loser.opponent()),
            PlayStatus::Ongoing => None,
            PlayStatus::InfiniteDetected { cycle_start } => {
                let top = self.positions[cycle_start..self.positions.len() - 1]
                    .iter()
                    .map(|&v| arena.priority(v))
                    .max()
                    .unwrap_or(0);
                Some(Player::of_parity(top))
            }
        }
    }
}

/// Replays positional strategies from `start`. A repeated position ends the
/// play as infinite; the repeated position is the last entry.
pub fn play_match(
    arena: &Arena,
    strategy_exists: &Strategy,
    strategy_forall: &Strategy,
    start: PositionId,
    max_steps: usize,
) -> Result<Play, GameError> {
    let mut positions = vec![start];
    let mut seen = HashMap::from([(start, 0usize)]);
    let mut current = start;
    for _ in 0..max_steps {
        if arena.is_dead_end(current) {
            return Ok(Play {
                positions,
                status: PlayStatus::Stuck(arena.owner(current)),
            });
        }
        let strategy = match arena.owner(current) {
            Player::Exists => strategy_exists,
            Player::Forall => strategy_forall,
        };
        let next = strategy
            .get(current)
            .ok_or(GameError::UndefinedStrategyAt(current))?;
        if !arena.successors(current).contains(&next) {
            return Err(GameError::IllegalMove {
                from: current,
                to: next,
            });
        }
        positions.push(next);
        if let Some(&first) = seen.get(&next) {
            return Ok(Play {
                positions,
                status: PlayStatus::InfiniteDetected { cycle_start: first },
            });
        }
        seen.insert(next, positions.len() - 1);
        current = next;
    }
    let status = if arena.is_dead_end(current) {
        PlayStatus::Stuck(arena.owner(current))
    } else {
        PlayStatus::Ongoing
    };
    Ok(Play { positions, status })
}
