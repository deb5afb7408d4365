//! Fixpoint games and evaluation games as arenas, plus the canonical
//! strategies for `∃`.
//!
//! Arenas are built only over finite carriers, where every set is clopen
//! and the boards are finite. Over `ℕ ∪ {∞}` a board has infinitely many
//! set positions; there the canonical strategies ([`MuDepthStrategy`],
//! [`NuGreedyStrategy`]) are available for step-by-step play and the
//! legality checks [`check_forall_reply`] and [`g1_move_legal`] validate
//! the opponent's moves.
//!
//! Boards of the fixpoint games for a monotone `F`:
//!
//! | game | position | owner | moves |
//! |------|----------|-------|-------|
//! | Tarski | `x` | ∃ | `C ⊆ X` with `x ∈ F(C)` |
//! | Tarski | `C` | ∀ | `y ∈ C` |
//! | 𝒢ᴵ | `x` | ∃ | `C` with `x ∈ F(U)` for all clopen `U ⊇ C` (`μ`) or `U ⊇ Int(C)` (`ν`) |
//! | 𝒢ᴵ | `C` | ∀ | `y ∈ C` |
//! | 𝒢ᴵᴵ_μ | `x` | ∃ | `(∀,U)` with `U` clopen, `x ∈ F(U)` |
//! | 𝒢ᴵᴵ_μ | `(∀,U)` | ∀ | `(∃,U')` with `U'` clopen, `U ∩ U' ≠ ∅` |
//! | 𝒢ᴵᴵ_μ | `(∃,U')` | ∃ | `y ∈ U'` |
//! | 𝒢ᴵᴵ_ν | `x` | ∃ | `U` clopen with `x ∈ F(U)` |
//! | 𝒢ᴵᴵ_ν | `U` | ∀ | `y ∈ U` |
//!
//! Infinite plays are won by `∀` in the `μ` games (every position has
//! priority 1) and by `∃` in the `ν` games (priority 0).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::algebra::{
    enumerate_clopens, AlgebraError, Carrier, LimitParams, Point, SetDescriptor,
};
use crate::formula::{Formula, FormulaAnalysis, Node, NodeId, Polarity};
use crate::game_core::{Arena, GameError, Player, PositionId, SolveResult, Strategy};
use crate::semantics::{approximate, eval_den, ApproxTrace, Env, Ordinal, SemanticsError};
use crate::space::ModalSpaceModel;

/// Largest carrier for which arenas are built; set positions range over
/// all `2^n` subsets.
pub const MAX_GAME_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameBuildError {
    #[error("SymbolicNotSupported: {0}")]
    SymbolicNotSupported(String),
    #[error("TooLarge: {points} points, arenas are built for at most {max}")]
    TooLarge { points: usize, max: usize },
    #[error("PointOutsideLfp: {0} is not in the least fixpoint")]
    PointOutsideLfp(Point),
    #[error("PointOutsideGfp: {0} is not in the greatest fixpoint")]
    PointOutsideGfp(Point),
    #[error("NotWinningAt: the start position at {0} is not won by ∃")]
    NotWinningAt(Point),
    #[error("NotAFixpoint: `{0}` is not of the form μp.ψ or νp.ψ")]
    NotAFixpoint(String),
    #[error("InvalidTable: {0}")]
    InvalidTable(String),
    #[error("PostconditionFailed: {0}")]
    PostconditionFailed(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl From<AlgebraError> for GameBuildError {
    fn from(e: AlgebraError) -> Self {
        GameBuildError::Semantics(e.into())
    }
}

/// A monotone operator on the sets of a carrier.
#[derive(Debug, Clone)]
pub enum OperatorSpec {
    /// `U ↦ [[body]]` with `var` interpreted as `U`.
    Formula {
        model: ModalSpaceModel,
        var: String,
        body: Formula,
        params: LimitParams,
    },
    /// `table[mask(U)]` is the mask of `F(U)` on a finite carrier.
    Table { carrier: Carrier, table: Vec<u64> },
}

impl OperatorSpec {
    pub fn formula(model: ModalSpaceModel, var: &str, body: Formula, params: LimitParams) -> Self {
        OperatorSpec::Formula {
            model,
            var: var.to_string(),
            body,
            params,
        }
    }

    /// The operator of a fixpoint formula `ηp.ψ`, with its polarity.
    pub fn from_binder(
        model: ModalSpaceModel,
        binder: &Formula,
        params: LimitParams,
    ) -> Result<(Polarity, Self), GameBuildError> {
        let (polarity, var, body) = binder
            .as_fixpoint()
            .ok_or_else(|| GameBuildError::NotAFixpoint(binder.to_string()))?;
        Ok((polarity, Self::formula(model, var, body.clone(), params)))
    }

    /// An explicit table on `n` points. Monotonicity is checked.
    pub fn table(n: usize, table: Vec<u64>) -> Result<Self, GameBuildError> {
        if n > MAX_GAME_POINTS {
            return Err(GameBuildError::TooLarge {
                points: n,
                max: MAX_GAME_POINTS,
            });
        }
        if table.len() != 1 << n {
            return Err(GameBuildError::InvalidTable(format!(
                "expected {} entries, found {}",
                1u64 << n,
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >> n != 0) {
            return Err(GameBuildError::InvalidTable(format!(
                "entry {v:#b} has points outside 0..{n}"
            )));
        }
        let spec = OperatorSpec::Table {
            carrier: Carrier::finite(n)?,
            table,
        };
        spec.tabulate()?;
        Ok(spec)
    }

    pub fn carrier(&self) -> Carrier {
        match self {
            OperatorSpec::Formula { model, .. } => model.carrier(),
            OperatorSpec::Table { carrier, .. } => *carrier,
        }
    }

    pub fn params(&self) -> LimitParams {
        match self {
            OperatorSpec::Formula { params, .. } => *params,
            OperatorSpec::Table { .. } => LimitParams::default(),
        }
    }

    pub fn apply(&self, u: &SetDescriptor) -> Result<SetDescriptor, SemanticsError> {
        match self {
            OperatorSpec::Formula {
                model,
                var,
                body,
                params,
            } => {
                let env: Env = [(var.clone(), u.clone())].into_iter().collect();
                Ok(eval_den(model, body, &env, params)?.value)
            }
            OperatorSpec::Table { carrier, table } => {
                if u.carrier() != *carrier {
                    return Err(AlgebraError::CarrierMismatch {
                        left: *carrier,
                        right: u.carrier(),
                    }
                    .into());
                }
                let mask = u.to_mask().expect("finite carrier");
                Ok(SetDescriptor::from_mask(*carrier, table[mask as usize])?)
            }
        }
    }

    /// `F` as a table of masks. Fails on infinite carriers and on
    /// operators that are not monotone.
    pub fn tabulate(&self) -> Result<Vec<u64>, GameBuildError> {
        let n = arena_points(self.carrier())?;
        let table: Vec<u64> = match self {
            OperatorSpec::Table { table, .. } => table.clone(),
            OperatorSpec::Formula { .. } => enumerate_clopens(self.carrier())?
                .map(|u| Ok(self.apply(&u)?.to_mask().expect("finite carrier")))
                .collect::<Result<_, GameBuildError>>()?,
        };
        for s in 0..table.len() {
            for i in 0..n {
                let t = s | 1 << i;
                if table[s] & !table[t] != 0 {
                    return Err(SemanticsError::MonotonicityViolation(format!(
                        "F({s:#b}) is not contained in F({t:#b})"
                    ))
                    .into());
                }
            }
        }
        Ok(table)
    }

    /// Approximants of `μF` or `νF` in the clopen algebra.
    pub fn fixpoint_trace(&self, polarity: Polarity) -> Result<ApproxTrace, SemanticsError> {
        approximate(
            self.carrier(),
            polarity,
            |u| self.apply(u),
            &self.params(),
            crate::algebra::LimitMode::Clopen,
        )
    }
}

/// A position of one of the boards.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EvalPosition {
    /// A point `x`.
    State(Point),
    /// A set chosen by `∃` in Tarski's game, 𝒢ᴵ and 𝒢ᴵᴵ_ν.
    Set(SetDescriptor),
    /// A set with a marker naming the player to move, in 𝒢ᴵᴵ_μ.
    Marked(Player, SetDescriptor),
    /// `(ψ, x)` for a subformula occurrence `ψ` that is not a bound variable.
    FormulaAt(NodeId, Point),
    /// `(p, x)` for a bound variable `p`: an element of `unfold_p`.
    UnfoldVar(String, Point),
    /// `(p, U)`: the unfolding set chosen for `p`.
    UnfoldSet(String, SetDescriptor),
}

fn members(set: &SetDescriptor) -> String {
    let items: Vec<String> = set
        .finite_members()
        .map(|v| v.iter().map(Point::to_string).collect())
        .unwrap_or_else(|| vec![set.to_string()]);
    format!("{{{}}}", items.join(","))
}

/// An arena together with the board position behind every arena position.
#[derive(Debug, Clone)]
pub struct BuiltGame {
    arena: Arena,
    carrier: Carrier,
    positions: Vec<EvalPosition>,
    index: HashMap<EvalPosition, PositionId>,
}

impl BuiltGame {
    fn new(carrier: Carrier) -> Self {
        BuiltGame {
            arena: Arena::new(),
            carrier,
            positions: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn add(&mut self, pos: EvalPosition, owner: Player, priority: u32, tag: String) -> PositionId {
        let id = self.arena.add_position(owner, priority, tag);
        self.positions.push(pos.clone());
        self.index.insert(pos, id);
        id
    }

    fn id(&self, pos: &EvalPosition) -> PositionId {
        self.index[pos]
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn id_of(&self, pos: &EvalPosition) -> Option<PositionId> {
        self.index.get(pos).copied()
    }

    pub fn position(&self, id: PositionId) -> &EvalPosition {
        &self.positions[id]
    }

    /// The points `x` whose position `at(x)` lies in `region`.
    pub fn region_points(
        &self,
        region: &BTreeSet<PositionId>,
        at: impl Fn(Point) -> EvalPosition,
    ) -> SetDescriptor {
        let points = self.carrier.points().expect("finite carrier");
        let inside = points
            .into_iter()
            .filter(|&x| self.id_of(&at(x)).is_some_and(|id| region.contains(&id)));
        SetDescriptor::from_points(self.carrier, inside).expect("points of the carrier")
    }

    /// Points whose state position is won by `∃`.
    pub fn winning_states(&self, solved: &SolveResult) -> SetDescriptor {
        self.region_points(&solved.win_exists(), EvalPosition::State)
    }
}

fn arena_points(carrier: Carrier) -> Result<usize, GameBuildError> {
    let n = carrier.size().ok_or_else(|| {
        GameBuildError::SymbolicNotSupported(
            "arenas over ℕ∪{∞} are infinite; use the canonical strategies instead".into(),
        )
    })?;
    if n > MAX_GAME_POINTS {
        return Err(GameBuildError::TooLarge {
            points: n,
            max: MAX_GAME_POINTS,
        });
    }
    Ok(n)
}

fn fix_priority(polarity: Polarity) -> u32 {
    match polarity {
        Polarity::Mu => 1,
        Polarity::Nu => 0,
    }
}

fn add_states(game: &mut BuiltGame, n: usize, priority: u32) {
    for i in 0..n as u64 {
        let x = Point::Nat(i);
        game.add(EvalPosition::State(x), Player::Exists, priority, format!("x={x}"));
    }
}

fn mask_set(carrier: Carrier, mask: u64) -> SetDescriptor {
    SetDescriptor::from_mask(carrier, mask).expect("mask within carrier")
}

/// A board where `∃` at `x` moves to the sets in `choices[x]` and `∀`
/// picks an element of the chosen set.
fn state_set_game(
    carrier: Carrier,
    polarity: Polarity,
    n: usize,
    allowed: impl Fn(usize, u64) -> bool,
) -> BuiltGame {
    let priority = fix_priority(polarity);
    let mut game = BuiltGame::new(carrier);
    add_states(&mut game, n, priority);
    for mask in 0..1u64 << n {
        let c = mask_set(carrier, mask);
        let tag = format!("C={}", members(&c));
        game.add(EvalPosition::Set(c), Player::Forall, priority, tag);
    }
    for mask in 0..1u64 << n {
        let c = game.id(&EvalPosition::Set(mask_set(carrier, mask)));
        for x in 0..n {
            if allowed(x, mask) {
                game.arena.add_move(x, c);
            }
            if mask >> x & 1 == 1 {
                game.arena.add_move(c, x);
            }
        }
    }
    game
}

/// Tarski's game for `μF` or `νF`.
pub fn build_tarski_game(f: &OperatorSpec, polarity: Polarity) -> Result<BuiltGame, GameBuildError> {
    let n = arena_points(f.carrier())?;
    let table = f.tabulate()?;
    Ok(state_set_game(f.carrier(), polarity, n, |x, c| {
        table[c as usize] >> x & 1 == 1
    }))
}

/// The game 𝒢ᴵ, with `∃`'s moves computed from the clopen-superset
/// condition as stated rather than from `x ∈ F(C)`.
pub fn build_clopen_game_i(f: &OperatorSpec, polarity: Polarity) -> Result<BuiltGame, GameBuildError> {
    let carrier = f.carrier();
    let n = arena_points(carrier)?;
    let table = f.tabulate()?;
    let clopens: Vec<u64> = enumerate_clopens(carrier)?
        .filter(|u| u.is_clopen())
        .map(|u| u.to_mask().expect("finite carrier"))
        .collect();
    let mut guaranteed = Vec::with_capacity(1 << n);
    for mask in 0..1u64 << n {
        let c = mask_set(carrier, mask);
        let lower = match polarity {
            Polarity::Mu => c,
            Polarity::Nu => c.interior(),
        }
        .to_mask()
        .expect("finite carrier");
        let all = (1u64 << n) - 1;
        let g = clopens
            .iter()
            .filter(|&&u| lower & !u == 0)
            .fold(all, |acc, &u| acc & table[u as usize]);
        guaranteed.push(g);
    }
    Ok(state_set_game(carrier, polarity, n, |x, c| {
        guaranteed[c as usize] >> x & 1 == 1
    }))
}

/// The game 𝒢ᴵᴵ_μ or 𝒢ᴵᴵ_ν.
pub fn build_clopen_game_ii(f: &OperatorSpec, polarity: Polarity) -> Result<BuiltGame, GameBuildError> {
    let carrier = f.carrier();
    let n = arena_points(carrier)?;
    let table = f.tabulate()?;
    if polarity == Polarity::Nu {
        return Ok(state_set_game(carrier, polarity, n, |x, u| {
            table[u as usize] >> x & 1 == 1
        }));
    }
    let priority = fix_priority(polarity);
    let mut game = BuiltGame::new(carrier);
    add_states(&mut game, n, priority);
    for marker in [Player::Forall, Player::Exists] {
        for mask in 0..1u64 << n {
            let u = mask_set(carrier, mask);
            let tag = format!("({},U={})", marker.symbol(), members(&u));
            game.add(EvalPosition::Marked(marker, u), marker, priority, tag);
        }
    }
    let marked = |game: &BuiltGame, marker, mask| {
        game.id(&EvalPosition::Marked(marker, mask_set(carrier, mask)))
    };
    for mask in 0..1u64 << n {
        let forall = marked(&game, Player::Forall, mask);
        let exists = marked(&game, Player::Exists, mask);
        for x in 0..n {
            if table[mask as usize] >> x & 1 == 1 {
                game.arena.add_move(x, forall);
            }
            if mask >> x & 1 == 1 {
                game.arena.add_move(exists, x);
            }
        }
        for other in 1..1u64 << n {
            if mask & other != 0 {
                let to = marked(&game, Player::Exists, other);
                game.arena.add_move(forall, to);
            }
        }
    }
    Ok(game)
}

/// Checks that the tag correspondence between two arenas is an
/// isomorphism: a bijection on positions preserving owners, priorities
/// and moves. Returns the map from positions of `a` to positions of `b`.
pub fn check_isomorphism_by_tags(a: &Arena, b: &Arena) -> Result<Vec<PositionId>, String> {
    if a.len() != b.len() {
        return Err(format!("{} positions against {}", a.len(), b.len()));
    }
    let index: HashMap<&str, PositionId> = b
        .positions()
        .iter()
        .enumerate()
        .map(|(i, p)| (p.tag.as_str(), i))
        .collect();
    if index.len() != b.len() {
        return Err("tags of the second arena are not unique".into());
    }
    let map: Vec<PositionId> = a
        .positions()
        .iter()
        .map(|p| index.get(p.tag.as_str()).copied().ok_or(format!("no position tagged {}", p.tag)))
        .collect::<Result<_, _>>()?;
    if map.iter().collect::<BTreeSet<_>>().len() != map.len() {
        return Err("tags of the first arena are not unique".into());
    }
    for (i, &j) in map.iter().enumerate() {
        let (p, q) = (a.position(i), b.position(j));
        if p.owner != q.owner || p.priority != q.priority {
            return Err(format!("{} differs in owner or priority", p.tag));
        }
        let image: BTreeSet<PositionId> = a.successors(i).iter().map(|&s| map[s]).collect();
        let target: BTreeSet<PositionId> = b.successors(j).iter().copied().collect();
        if image != target {
            return Err(format!("moves from {} differ", p.tag));
        }
    }
    Ok(map)
}

/// Whether `reply` is a legal answer of `∀` at `(∀,U)` in 𝒢ᴵᴵ_μ:
/// a clopen set meeting `U`.
pub fn check_forall_reply(u: &SetDescriptor, reply: &SetDescriptor) -> Result<(), String> {
    if !reply.is_clopen() {
        return Err(format!("{reply} is not clopen"));
    }
    if !u.intersects(reply).map_err(|e| e.to_string())? {
        return Err(format!("{reply} does not meet {u}"));
    }
    Ok(())
}

/// Legality of `∃`'s move `x → C` in 𝒢ᴵ, decided through the least clopen
/// superset of `C` (`μ`) or of `Int(C)` (`ν`). Sets without a least clopen
/// superset are rejected with `NoLeastClopenSuperset`.
pub fn g1_move_legal(
    f: &OperatorSpec,
    polarity: Polarity,
    x: Point,
    c: &SetDescriptor,
) -> Result<bool, GameBuildError> {
    let lower = match polarity {
        Polarity::Mu => c.clone(),
        Polarity::Nu => c.interior(),
    };
    let u = lower.least_clopen_superset()?;
    Ok(f.apply(&u)?.contains(x)?)
}

/// `∃`'s strategy in 𝒢ᴵᴵ_μ that decreases the `μ`-depth in every round.
///
/// At `x` of depth `β+1` ∃ plays `(∀, F_β)`; at `x` of limit depth `λ`
/// it plays `(∀, F_λ)`. At `(∃,U')` it picks a point of `U'` of least
/// depth, the lowest one among those.
#[derive(Debug, Clone)]
pub struct MuDepthStrategy {
    trace: ApproxTrace,
}

impl MuDepthStrategy {
    pub fn new(f: &OperatorSpec) -> Result<Self, GameBuildError> {
        Ok(Self::from_trace(f.fixpoint_trace(Polarity::Mu)?))
    }

    /// # Panics
    /// If `trace` approximates a greatest fixpoint.
    pub fn from_trace(trace: ApproxTrace) -> Self {
        assert_eq!(trace.polarity, Polarity::Mu, "a least fixpoint trace");
        MuDepthStrategy { trace }
    }

    pub fn trace(&self) -> &ApproxTrace {
        &self.trace
    }

    pub fn lfp(&self) -> &SetDescriptor {
        &self.trace.value
    }

    pub fn depth(&self, x: Point) -> Option<Ordinal> {
        self.trace.mu_depth(x)
    }

    /// The set `U` of the move `x → (∀,U)`.
    pub fn state_move(&self, x: Point) -> Result<SetDescriptor, GameBuildError> {
        let depth = self.depth(x).ok_or(GameBuildError::PointOutsideLfp(x))?;
        let stage = if depth.is_limit() {
            depth
        } else {
            depth.predecessor().expect("F_0 is empty")
        };
        Ok(self.trace.stage(stage).expect("stage below the closure ordinal"))
    }

    /// The point picked at `(∃,U')`; `None` if `U'` misses `μF`.
    pub fn pick(&self, u: &SetDescriptor) -> Option<Point> {
        self.trace.least_depth_point(u).map(|(_, p)| p)
    }

    /// The strategy as arena moves on a 𝒢ᴵᴵ_μ arena.
    pub fn to_arena_strategy(&self, game: &BuiltGame) -> Result<Strategy, GameBuildError> {
        let carrier = game.carrier();
        let mut strategy = Strategy::new();
        for x in carrier.points().expect("finite carrier") {
            if self.depth(x).is_none() {
                continue;
            }
            let u = self.state_move(x)?;
            let from = game.id(&EvalPosition::State(x));
            strategy.set(from, game.id(&EvalPosition::Marked(Player::Forall, u)));
        }
        for mask in 1..1u64 << carrier.size().expect("finite carrier") {
            let u = mask_set(carrier, mask);
            if let Some(y) = self.pick(&u) {
                let from = game.id(&EvalPosition::Marked(Player::Exists, u));
                strategy.set(from, game.id(&EvalPosition::State(y)));
            }
        }
        Ok(strategy)
    }
}

/// `∃`'s strategy in 𝒢ᴵ_ν and 𝒢ᴵᴵ_ν: always play `νF`.
#[derive(Debug, Clone)]
pub struct NuGreedyStrategy {
    gfp: SetDescriptor,
}

impl NuGreedyStrategy {
    pub fn new(f: &OperatorSpec) -> Result<Self, GameBuildError> {
        Ok(NuGreedyStrategy {
            gfp: f.fixpoint_trace(Polarity::Nu)?.value,
        })
    }

    pub fn gfp(&self) -> &SetDescriptor {
        &self.gfp
    }

    pub fn state_move(&self, x: Point) -> Result<SetDescriptor, GameBuildError> {
        if self.gfp.contains(x)? {
            Ok(self.gfp.clone())
        } else {
            Err(GameBuildError::PointOutsideGfp(x))
        }
    }

    /// The strategy as arena moves on a Tarski, 𝒢ᴵ_ν or 𝒢ᴵᴵ_ν arena.
    pub fn to_arena_strategy(&self, game: &BuiltGame) -> Result<Strategy, GameBuildError> {
        let to = game.id(&EvalPosition::Set(self.gfp.clone()));
        let mut strategy = Strategy::new();
        for x in self.gfp.finite_members().expect("finite carrier") {
            strategy.set(game.id(&EvalPosition::State(x)), to);
        }
        Ok(strategy)
    }
}

/// The evaluation game of a clean formula on a finite model.
///
/// Occurrences of the same subformula share their positions, so the
/// positions are pairs of a subformula and a point.
#[derive(Debug, Clone)]
pub struct EvalGame {
    game: BuiltGame,
    analysis: FormulaAnalysis,
    model: ModalSpaceModel,
    rep: Vec<NodeId>,
}

struct Described {
    owner: Player,
    priority: u32,
    tag: String,
    moves: Vec<EvalPosition>,
}

impl EvalGame {
    pub fn game(&self) -> &BuiltGame {
        &self.game
    }

    pub fn arena(&self) -> &Arena {
        &self.game.arena
    }

    pub fn analysis(&self) -> &FormulaAnalysis {
        &self.analysis
    }

    pub fn model(&self) -> &ModalSpaceModel {
        &self.model
    }

    /// The board position `(ψ, x)` for the subformula occurrence `node`.
    pub fn position_of(&self, node: NodeId, x: Point) -> EvalPosition {
        match self.analysis.node(node) {
            Node::Prop(p) if self.analysis.is_bound(p) => EvalPosition::UnfoldVar(p.clone(), x),
            _ => EvalPosition::FormulaAt(self.rep[node], x),
        }
    }

    pub fn id_at(&self, node: NodeId, x: Point) -> Option<PositionId> {
        self.game.id_of(&self.position_of(node, x))
    }

    /// The points `x` such that `(ψ, x)` is won by `∃`.
    pub fn winning_points(&self, solved: &SolveResult, node: NodeId) -> SetDescriptor {
        self.game
            .region_points(&solved.win_exists(), |x| self.position_of(node, x))
    }

    fn polarity(&self, var: &str) -> Polarity {
        self.analysis.polarity(var).expect("bound variable")
    }

    fn describe(&self, pos: &EvalPosition) -> Result<Described, GameBuildError> {
        let carrier = self.game.carrier;
        let all_points = carrier.points().expect("finite carrier");
        let d = |owner, moves| Described {
            owner,
            priority: 0,
            tag: String::new(),
            moves,
        };
        let mut out = match pos {
            EvalPosition::FormulaAt(id, x) => {
                let x = *x;
                let owner_if = |holds: bool| if holds { Player::Forall } else { Player::Exists };
                let prop = |p: &String| {
                    self.model
                        .prop(p)
                        .ok_or_else(|| SemanticsError::UnboundVariable(p.clone()))
                        .and_then(|v| Ok(v.contains(x)?))
                };
                let succ = || -> Result<Vec<Point>, GameBuildError> {
                    Ok(self
                        .model
                        .successors(x)
                        .map_err(SemanticsError::from)?
                        .finite_members()
                        .expect("finite carrier"))
                };
                let mut described = match self.analysis.node(*id) {
                    Node::Prop(p) => d(owner_if(prop(p)?), vec![]),
                    Node::NegProp(p) => d(owner_if(!prop(p)?), vec![]),
                    Node::Bot => d(Player::Exists, vec![]),
                    Node::Top => d(Player::Forall, vec![]),
                    Node::And(l, r) => d(
                        Player::Forall,
                        vec![self.position_of(*l, x), self.position_of(*r, x)],
                    ),
                    Node::Or(l, r) => d(
                        Player::Exists,
                        vec![self.position_of(*l, x), self.position_of(*r, x)],
                    ),
                    Node::Possibly(g) => d(
                        Player::Exists,
                        succ()?.into_iter().map(|y| self.position_of(*g, y)).collect(),
                    ),
                    Node::Necessarily(g) => d(
                        Player::Forall,
                        succ()?.into_iter().map(|y| self.position_of(*g, y)).collect(),
                    ),
                    Node::Fix(_, _, body) => d(Player::Exists, vec![self.position_of(*body, x)]),
                };
                described.tag = format!("({}, x={x})", self.analysis.subformula(*id));
                described
            }
            EvalPosition::UnfoldVar(p, x) => {
                let chooser = match self.polarity(p) {
                    Polarity::Mu => Player::Forall,
                    Polarity::Nu => Player::Exists,
                };
                let moves = enumerate_clopens(carrier)?
                    .filter(|u| u.contains(*x).unwrap_or(false))
                    .map(|u| EvalPosition::UnfoldSet(p.clone(), u))
                    .collect();
                let mut described = d(chooser, moves);
                described.tag = format!("({p}, x={x})");
                described
            }
            EvalPosition::UnfoldSet(p, u) => {
                let picker = match self.polarity(p) {
                    Polarity::Mu => Player::Exists,
                    Polarity::Nu => Player::Forall,
                };
                let body = self.analysis.body_of(p).expect("bound variable");
                let moves = all_points
                    .into_iter()
                    .filter(|&y| u.contains(y).unwrap_or(false))
                    .map(|y| self.position_of(body, y))
                    .collect();
                let mut described = d(picker, moves);
                described.tag = format!("({p}, U={})", members(u));
                described
            }
            other => unreachable!("not an evaluation position: {other:?}"),
        };
        if let EvalPosition::UnfoldVar(p, _) | EvalPosition::UnfoldSet(p, _) = pos {
            out.priority = self.analysis.priority(p).expect("bound variable");
        }
        Ok(out)
    }
}

/// The evaluation game `ℰ(φ, 𝕄)` on the positions reachable from the
/// `(φ, x)`.
///
/// Literals are dead ends for the player who is wrong about them, `⊥` is a
/// dead end for `∃` and `⊤` one for `∀`. Unfold positions carry the
/// priority of their variable; all other positions have priority 0.
pub fn build_eval_game(formula: &Formula, model: &ModalSpaceModel) -> Result<EvalGame, GameBuildError> {
    let carrier = model.carrier();
    arena_points(carrier)?;
    let analysis = FormulaAnalysis::new(formula).map_err(SemanticsError::from)?;
    let mut first: HashMap<String, NodeId> = HashMap::new();
    let rep = (0..analysis.len())
        .map(|id| *first.entry(analysis.subformula(id).to_string()).or_insert(id))
        .collect();
    let mut eval = EvalGame {
        game: BuiltGame::new(carrier),
        analysis,
        model: model.clone(),
        rep,
    };
    let mut queue = VecDeque::new();
    for x in carrier.points().expect("finite carrier") {
        let pos = eval.position_of(eval.analysis.root(), x);
        if eval.game.id_of(&pos).is_none() {
            let desc = eval.describe(&pos)?;
            let id = eval.game.add(pos, desc.owner, desc.priority, desc.tag);
            queue.push_back((id, desc.moves));
        }
    }
    while let Some((from, moves)) = queue.pop_front() {
        for pos in moves {
            let to = match eval.game.id_of(&pos) {
                Some(to) => to,
                None => {
                    let desc = eval.describe(&pos)?;
                    let to = eval.game.add(pos, desc.owner, desc.priority, desc.tag);
                    queue.push_back((to, desc.moves));
                    to
                }
            };
            eval.game.arena.add_move(from, to);
        }
    }
    Ok(eval)
}

/// Cuts a play after every visit to `unfold_p`. Each segment ends at a
/// position `(p, x)` except possibly the last; segments after the first
/// begin with the `(p, U)` position that followed the cut.
pub fn split_at_unfolds(game: &EvalGame, play: &[PositionId], var: &str) -> Vec<Vec<PositionId>> {
    let mut segments = Vec::new();
    let mut current = Vec::new();
    for &id in play {
        current.push(id);
        if matches!(game.game.position(id), EvalPosition::UnfoldVar(p, _) if p == var) {
            segments.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        segments.push(current);
    }
    segments
}

/// Checks that an `unfold_p`-full segment of a play of `ℰ(ηp.δ, 𝕄)` is a
/// play of `inner = ℰ(δ, 𝕄[p↦U])`: every move exists there, and a final
/// `(p, x)` is a dead end there. A leading `(p, U)` position is skipped.
pub fn check_unfold_segment(
    outer: &EvalGame,
    inner: &EvalGame,
    var: &str,
    segment: &[PositionId],
) -> Result<(), String> {
    let start = match segment.first().map(|&id| outer.game.position(id)) {
        Some(EvalPosition::UnfoldSet(p, _)) if p == var => 1,
        _ => 0,
    };
    let segment = &segment[start..];
    let (a, b) = (outer.arena(), inner.arena());
    let mapped: Vec<PositionId> = segment
        .iter()
        .map(|&id| {
            b.find_tag(a.tag(id))
                .ok_or_else(|| format!("{} is not a position of the inner game", a.tag(id)))
        })
        .collect::<Result<_, _>>()?;
    for (w, m) in segment.windows(2).zip(mapped.windows(2)) {
        if matches!(outer.game.position(w[0]), EvalPosition::UnfoldVar(p, _) if p == var) {
            return Err(format!("segment continues past {}", a.tag(w[0])));
        }
        if !b.successors(m[0]).contains(&m[1]) {
            return Err(format!("{} -> {} is not an inner move", a.tag(w[0]), a.tag(w[1])));
        }
    }
    if let (Some(&last), Some(&image)) = (segment.last(), mapped.last()) {
        if matches!(outer.game.position(last), EvalPosition::UnfoldVar(p, _) if p == var)
            && !b.is_dead_end(image)
        {
            return Err(format!("{} is not a dead end of the inner game", b.tag(image)));
        }
    }
    Ok(())
}

/// The set `C(x)` for the root formula `μp.δ` and `∃`'s strategy from
/// `solved`: the points `z` that the strategy answers at some `(p, U)`
/// reachable by an unfold-full play from `(δ, x)`.
///
/// Verifies that `x ∈ [[δ]]` with `p` interpreted as any `U ⊇ C(x)`.
pub fn compute_c_of_x(
    game: &EvalGame,
    solved: &SolveResult,
    x: Point,
    params: &LimitParams,
) -> Result<SetDescriptor, GameBuildError> {
    let analysis = &game.analysis;
    let root = analysis.root();
    let (var, body) = match analysis.node(root) {
        Node::Fix(Polarity::Mu, var, body) => (var.clone(), *body),
        _ => return Err(GameBuildError::NotAFixpoint(analysis.formula().to_string())),
    };
    let start = game.id_at(body, x).ok_or(GameBuildError::NotWinningAt(x))?;
    let winning = solved.win_exists();
    if !winning.contains(&start) {
        return Err(GameBuildError::NotWinningAt(x));
    }
    let f = solved.strategy(Player::Exists);
    let arena = game.arena();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    let mut chosen = BTreeSet::new();
    while let Some(id) = stack.pop() {
        if let EvalPosition::UnfoldVar(p, _) = game.game.position(id) {
            if *p == var {
                for &unfold in arena.successors(id) {
                    let reply = f.get(unfold).ok_or(GameError::UndefinedStrategyAt(unfold))?;
                    match game.game.position(reply) {
                        EvalPosition::FormulaAt(_, z) => chosen.insert(*z),
                        other => unreachable!("reply {other:?} at an unfold set"),
                    };
                }
                continue;
            }
        }
        let next: Vec<PositionId> = match arena.owner(id) {
            Player::Exists => f.get(id).into_iter().collect(),
            Player::Forall => arena.successors(id).to_vec(),
        };
        for n in next {
            if seen.insert(n) {
                stack.push(n);
            }
        }
    }
    let carrier = game.game.carrier;
    let c = SetDescriptor::from_points(carrier, chosen)?;
    let body_formula = analysis.subformula(body);
    for u in enumerate_clopens(carrier)?.filter(|u| c.is_subset(u).unwrap_or(false)) {
        let env: Env = [(var.clone(), u.clone())].into_iter().collect();
        if !eval_den(&game.model, body_formula, &env, params)?.value.contains(x)? {
            return Err(GameBuildError::PostconditionFailed(format!(
                "{x} is not in [[{body_formula}]] with {var} = {u}, although {c} ⊆ {u}"
            )));
        }
    }
    Ok(c)
}

/// `C(x)` for every point `x` at which `∃` wins `(δ, x)`.
pub fn c_map(
    game: &EvalGame,
    solved: &SolveResult,
    params: &LimitParams,
) -> Result<BTreeMap<Point, SetDescriptor>, GameBuildError> {
    let mut out = BTreeMap::new();
    for x in game.game.carrier.points().expect("finite carrier") {
        match compute_c_of_x(game, solved, x, params) {
            Ok(c) => {
                out.insert(x, c);
            }
            Err(GameBuildError::NotWinningAt(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::game_core::{play_match, solve_parity, verify_strategy, PlayStatus};
    use crate::oracle::rule_table;
    use crate::semantics::tests::{arb_formula, with_p};
    use crate::space::tests::arb_finite_model;
    use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest};
    use proptest::strategy::Strategy as _;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nat(i: u64) -> Point {
        Point::Nat(i)
    }

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    pub(crate) fn arb_table() -> impl proptest::strategy::Strategy<Value = (usize, Vec<u64>)> {
        (1usize..5).prop_flat_map(|n| {
            (any::<u64>(), prop::collection::vec((any::<u64>(), any::<u64>()), 0..6))
                .prop_map(move |(base, rules)| {
                    let base = if base % 3 == 0 { base } else { 0 };
                    (n, rule_table(n, base, &rules))
                })
        })
    }

    fn brute_lfp(table: &[u64]) -> u64 {
        let mut s = 0;
        loop {
            let t = table[s as usize];
            if t == s {
                return s;
            }
            s = t;
        }
    }

    fn brute_gfp(table: &[u64], n: usize) -> u64 {
        let mut s = (1u64 << n) - 1;
        loop {
            let t = table[s as usize];
            if t == s {
                return s;
            }
            s = t;
        }
    }

    fn states(game: &BuiltGame) -> u64 {
        let solved = solve_parity(game.arena());
        game.winning_states(&solved).to_mask().unwrap()
    }

    fn chain3() -> ModalSpaceModel {
        ModalSpaceModel::finite(3, &[(2, 1), (1, 0)], &[("p", &[0])]).unwrap()
    }

    #[test]
    fn tarski_identity() {
        let id = OperatorSpec::table(2, (0..4).collect()).unwrap();
        assert_eq!(states(&build_tarski_game(&id, Polarity::Mu).unwrap()), 0);
        assert_eq!(states(&build_tarski_game(&id, Polarity::Nu).unwrap()), 0b11);
    }

    #[test]
    fn tarski_chain_reachability() {
        let m = chain3();
        let spec = OperatorSpec::formula(m, "q", f("p \\/ <> q"), LimitParams::default());
        let table = spec.tabulate().unwrap();
        let game = build_tarski_game(&spec, Polarity::Mu).unwrap();
        assert_eq!(states(&game), brute_lfp(&table));
        assert_eq!(states(&game), 0b111);
        assert_eq!(game.arena().tag(0), "x=0");
        assert!(game.arena().find_tag("C={0,2}").is_some());
    }

    #[test]
    fn g1_constants() {
        let top = OperatorSpec::table(3, vec![0b111; 8]).unwrap();
        let bot = OperatorSpec::table(3, vec![0; 8]).unwrap();
        assert_eq!(states(&build_clopen_game_i(&top, Polarity::Mu).unwrap()), 0b111);
        assert_eq!(states(&build_clopen_game_i(&bot, Polarity::Mu).unwrap()), 0);
    }

    #[test]
    fn g2_identity() {
        let id = OperatorSpec::table(3, (0..8).collect()).unwrap();
        assert_eq!(states(&build_clopen_game_ii(&id, Polarity::Mu).unwrap()), 0);
        assert_eq!(states(&build_clopen_game_ii(&id, Polarity::Nu).unwrap()), 0b111);
    }

    #[test]
    fn arenas_need_finite_carriers() {
        let spec = OperatorSpec::formula(
            ModalSpaceModel::countdown(),
            "q",
            f("p \\/ <> q"),
            LimitParams::default(),
        );
        for build in [build_tarski_game, build_clopen_game_i, build_clopen_game_ii] {
            assert!(matches!(
                build(&spec, Polarity::Mu),
                Err(GameBuildError::SymbolicNotSupported(_))
            ));
        }
        assert!(matches!(
            build_eval_game(&f("p"), &ModalSpaceModel::countdown()),
            Err(GameBuildError::SymbolicNotSupported(_))
        ));
    }

    #[test]
    fn tables_are_checked() {
        assert!(matches!(
            OperatorSpec::table(2, vec![0, 0, 1]),
            Err(GameBuildError::InvalidTable(_))
        ));
        // F({0}) = {0} but F({0,1}) = ∅
        assert!(matches!(
            OperatorSpec::table(2, vec![0, 1, 0, 0]),
            Err(GameBuildError::Semantics(SemanticsError::MonotonicityViolation(_)))
        ));
    }

    #[test]
    fn mu_depth_on_countdown() {
        let spec = OperatorSpec::formula(
            ModalSpaceModel::countdown(),
            "q",
            f("p \\/ <> q"),
            LimitParams::default(),
        );
        let s = MuDepthStrategy::new(&spec).unwrap();
        let c = spec.carrier();
        assert_eq!(
            s.state_move(nat(3)).unwrap(),
            SetDescriptor::parse(c, "{0,1,2}").unwrap()
        );
        assert_eq!(s.depth(Point::Inf), Some(Ordinal { limits: 1, offset: 0 }));
        assert!(s.state_move(Point::Inf).unwrap().is_full());
        // any clopen reply to the move at ∞ contains a natural of finite depth
        let reply = SetDescriptor::parse(c, "co{0,1,2,3,4}+inf").unwrap();
        check_forall_reply(&s.state_move(Point::Inf).unwrap(), &reply).unwrap();
        assert_eq!(s.pick(&reply), Some(nat(5)));
        assert_eq!(s.depth(nat(5)), Some(Ordinal::finite(6)));
        // beyond the computed stages the depth comes from the pattern
        let far = SetDescriptor::parse(c, "{300,700}").unwrap();
        assert_eq!(s.pick(&far), Some(nat(300)));
        assert_eq!(s.state_move(nat(300)).unwrap(), SetDescriptor::finite_nat(0..300, false));
    }

    #[test]
    fn mu_depth_outside_lfp() {
        let spec = OperatorSpec::formula(
            ModalSpaceModel::countdown(),
            "q",
            f("<> q"),
            LimitParams::default(),
        );
        let s = MuDepthStrategy::new(&spec).unwrap();
        assert_eq!(s.state_move(nat(2)), Err(GameBuildError::PointOutsideLfp(nat(2))));
    }

    #[test]
    fn forall_replies_are_checked() {
        let c = Carrier::omega();
        let u = SetDescriptor::parse(c, "{0,1,2}").unwrap();
        assert!(check_forall_reply(&u, &SetDescriptor::parse(c, "{5}").unwrap()).is_err());
        assert!(check_forall_reply(&u, &SetDescriptor::parse(c, "{1,5}").unwrap()).is_ok());
        assert!(check_forall_reply(&u, &SetDescriptor::parse(c, "{1}+inf").unwrap()).is_err());
    }

    #[test]
    fn g1_symbolic_legality() {
        let spec = OperatorSpec::formula(
            ModalSpaceModel::countdown(),
            "q",
            f("p \\/ <> q"),
            LimitParams::default(),
        );
        let c = spec.carrier();
        let set = |s| SetDescriptor::parse(c, s).unwrap();
        assert!(g1_move_legal(&spec, Polarity::Mu, nat(3), &set("{2}")).unwrap());
        assert!(!g1_move_legal(&spec, Polarity::Mu, nat(3), &set("{5}")).unwrap());
        // ℕ has least clopen superset ℕ ∪ {∞}
        assert!(g1_move_legal(&spec, Polarity::Mu, Point::Inf, &set("co{}")).unwrap());
        assert!(matches!(
            g1_move_legal(&spec, Polarity::Mu, Point::Inf, &set("{3}+inf")),
            Err(GameBuildError::Semantics(SemanticsError::Algebra(
                AlgebraError::NoLeastClopenSuperset(_)
            )))
        ));
    }

    #[test]
    fn nu_greedy() {
        let cycle = ModalSpaceModel::finite(3, &[(0, 1), (1, 2), (2, 0)], &[]).unwrap();
        let spec = OperatorSpec::formula(cycle, "q", f("<> q"), LimitParams::default());
        let s = NuGreedyStrategy::new(&spec).unwrap();
        assert!(s.gfp().is_full());
        let game = build_clopen_game_ii(&spec, Polarity::Nu).unwrap();
        let strategy = s.to_arena_strategy(&game).unwrap();
        let region = (0..3).collect();
        assert!(verify_strategy(game.arena(), &strategy, &region, Player::Exists));

        let bot = OperatorSpec::table(2, vec![0; 4]).unwrap();
        let s = NuGreedyStrategy::new(&bot).unwrap();
        assert_eq!(s.state_move(nat(1)), Err(GameBuildError::PointOutsideGfp(nat(1))));
    }

    #[test]
    fn eval_literals_and_dead_ends() {
        let m = ModalSpaceModel::finite(2, &[(1, 0)], &[("p", &[0])]).unwrap();
        let game = build_eval_game(&f("p"), &m).unwrap();
        let a = game.arena();
        let at0 = game.id_at(0, nat(0)).unwrap();
        assert_eq!((a.owner(at0), a.is_dead_end(at0)), (Player::Forall, true));
        let game = build_eval_game(&f("<> p"), &m).unwrap();
        let at0 = game.id_at(0, nat(0)).unwrap();
        assert_eq!(game.arena().owner(at0), Player::Exists);
        assert!(game.arena().is_dead_end(at0));
        let solved = solve_parity(game.arena());
        assert_eq!(game.winning_points(&solved, 0).to_mask(), Some(0b10));
    }

    #[test]
    fn eval_chain_reachability() {
        let game = build_eval_game(&f("mu q. (p \\/ <> q)"), &chain3()).unwrap();
        let solved = solve_parity(game.arena());
        assert_eq!(game.winning_points(&solved, 0).to_mask(), Some(0b111));
        assert!(game.arena().find_tag("(q, U={0,1})").is_some());
        assert!(game.arena().find_tag("(mu q. (p \\/ <> q), x=2)").is_some());
        let q = game.arena().find_tag("(q, x=1)").unwrap();
        assert_eq!(game.arena().priority(q), 3);
        assert_eq!(game.arena().owner(q), Player::Forall);
    }

    #[test]
    fn split_examples() {
        let game = build_eval_game(&f("mu q. (p \\/ <> q)"), &chain3()).unwrap();
        let a = game.arena();
        let t = |s: &str| a.find_tag(s).unwrap();
        assert!(split_at_unfolds(&game, &[], "q").is_empty());
        let plain = vec![t("(p \\/ <> q, x=0)"), t("(p, x=0)")];
        assert_eq!(split_at_unfolds(&game, &plain, "q"), vec![plain.clone()]);
        let play = vec![
            t("(p \\/ <> q, x=2)"),
            t("(<> q, x=2)"),
            t("(q, x=1)"),
            t("(q, U={1})"),
            t("(p \\/ <> q, x=1)"),
            t("(<> q, x=1)"),
            t("(q, x=0)"),
            t("(q, U={0})"),
            t("(p \\/ <> q, x=0)"),
            t("(p, x=0)"),
        ];
        let parts = split_at_unfolds(&game, &play, "q");
        assert_eq!(parts.len(), 3);
        assert_eq!(parts.concat(), play);
    }

    #[test]
    fn c_of_x_on_chain() {
        let params = LimitParams::default();
        let game = build_eval_game(&f("mu q. (p \\/ <> q)"), &chain3()).unwrap();
        let solved = solve_parity(game.arena());
        let c2 = compute_c_of_x(&game, &solved, nat(2), &params).unwrap();
        assert!(c2.is_subset(&SetDescriptor::from_mask(Carrier::finite(3).unwrap(), 0b011).unwrap()).unwrap());
        assert!(!c2.is_empty());
        let c0 = compute_c_of_x(&game, &solved, nat(0), &params).unwrap();
        assert!(c0.is_empty());

        let game = build_eval_game(&f("mu q. p"), &chain3()).unwrap();
        let solved = solve_parity(game.arena());
        assert!(compute_c_of_x(&game, &solved, nat(0), &params).unwrap().is_empty());
        assert_eq!(
            compute_c_of_x(&game, &solved, nat(1), &params),
            Err(GameBuildError::NotWinningAt(nat(1)))
        );
    }

    fn random_forall(arena: &Arena, seed: u64) -> Strategy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..arena.len())
            .filter(|&v| arena.owner(v) == Player::Forall && !arena.is_dead_end(v))
            .map(|v| {
                let s = arena.successors(v);
                (v, s[rng.gen_range(0..s.len())])
            })
            .collect()
    }

    proptest! {
        #[test]
        fn fixpoint_games_match_iteration((n, table) in arb_table()) {
            let spec = OperatorSpec::table(n, table.clone()).unwrap();
            let (lfp, gfp) = (brute_lfp(&table), brute_gfp(&table, n));
            for (pol, expected) in [(Polarity::Mu, lfp), (Polarity::Nu, gfp)] {
                let tarski = build_tarski_game(&spec, pol).unwrap();
                let g1 = build_clopen_game_i(&spec, pol).unwrap();
                let g2 = build_clopen_game_ii(&spec, pol).unwrap();
                prop_assert_eq!(states(&tarski), expected);
                prop_assert_eq!(states(&g1), expected);
                prop_assert_eq!(states(&g2), expected);
                prop_assert!(check_isomorphism_by_tags(tarski.arena(), g1.arena()).is_ok());
            }
        }

        #[test]
        fn mu_depth_strategy_wins((n, table) in arb_table(), seed in any::<u64>()) {
            let spec = OperatorSpec::table(n, table.clone()).unwrap();
            let game = build_clopen_game_ii(&spec, Polarity::Mu).unwrap();
            let s = MuDepthStrategy::new(&spec).unwrap();
            let strategy = s.to_arena_strategy(&game).unwrap();
            let lfp: BTreeSet<PositionId> = (0..n).filter(|x| brute_lfp(&table) >> x & 1 == 1).collect();
            prop_assert!(verify_strategy(game.arena(), &strategy, &lfp, Player::Exists));
            for (k, &x) in lfp.iter().enumerate() {
                let forall = random_forall(game.arena(), seed.wrapping_add(k as u64));
                let play = play_match(game.arena(), &strategy, &forall, x, 3 * (n + 2)).unwrap();
                prop_assert_eq!(play.status, PlayStatus::Stuck(Player::Forall));
                // each round strictly lowers the depth
                let depths: Vec<Ordinal> = play.positions.iter()
                    .filter_map(|&v| match game.position(v) {
                        EvalPosition::State(y) => s.depth(*y),
                        _ => None,
                    })
                    .collect();
                prop_assert!(depths.windows(2).all(|w| w[1] < w[0]));
            }
        }

        #[test]
        fn adequacy(m in arb_finite_model(), mask in any::<u64>(), phi in arb_formula()) {
            let m = with_p(m, mask);
            let params = LimitParams::default();
            let game = build_eval_game(&phi, &m).unwrap();
            let solved = solve_parity(game.arena());
            let den = eval_den(&m, &phi, &Env::new(), &params).unwrap().value;
            prop_assert_eq!(game.winning_points(&solved, 0), den);
        }

        #[test]
        fn unfold_segments_are_inner_plays(
            m in arb_finite_model(),
            mask in any::<u64>(),
            body in prop::sample::select(vec![
                "p \\/ <> q", "p \\/ [] q", "(p /\\ <> q) \\/ [] false", "<> p \\/ (<> q /\\ [] q)",
            ]),
            nu in any::<bool>(),
            seed in any::<u64>(),
        ) {
            let m = with_p(m, mask);
            let params = LimitParams::default();
            let pol = if nu { Polarity::Nu } else { Polarity::Mu };
            let phi = Formula::fixpoint(pol, "q", f(body));
            let outer = build_eval_game(&phi, &m).unwrap();
            let value = eval_den(&m, &phi, &Env::new(), &params).unwrap().value;
            let inner_model = m.clone().with_valuation("q", value).unwrap();
            let inner = build_eval_game(&f(body), &inner_model).unwrap();
            let solved = solve_parity(outer.arena());
            let forall = random_forall(outer.arena(), seed);
            let exists = solved.strategy(Player::Exists);
            let n = m.carrier().size().unwrap() as u64;
            for x in 0..n {
                let start = outer.id_at(0, nat(x)).unwrap();
                let play = play_match(outer.arena(), exists, &forall, start, 60).unwrap();
                let segments = split_at_unfolds(&outer, &play.positions[1..], "q");
                prop_assert_eq!(segments.concat(), play.positions[1..].to_vec());
                for seg in &segments {
                    let r = check_unfold_segment(&outer, &inner, "q", seg);
                    prop_assert!(r.is_ok(), "{:?}", r);
                }
            }
        }

        #[test]
        fn c_of_x_postcondition(m in arb_finite_model(), mask in any::<u64>(),
                                body in prop::sample::select(vec!["p \\/ <> q", "p \\/ [] q", "<> p \\/ (<> q /\\ [] q)"])) {
            let m = with_p(m, mask);
            let phi = Formula::mu("q", f(body));
            let game = build_eval_game(&phi, &m).unwrap();
            let solved = solve_parity(game.arena());
            let map = c_map(&game, &solved, &LimitParams::default()).unwrap();
            let den = eval_den(&m, &phi, &Env::new(), &LimitParams::default()).unwrap().value;
            let keys: Vec<Point> = map.keys().copied().collect();
            prop_assert_eq!(keys, den.finite_members().unwrap());
        }
    }

    #[test]
    fn depth_strategy_is_deterministic() {
        let spec = OperatorSpec::table(3, rule_table(3, 0b001, &[(0b001, 0b010), (0b010, 0b100)])).unwrap();
        let a = MuDepthStrategy::new(&spec).unwrap();
        let b = MuDepthStrategy::new(&spec).unwrap();
        let game = build_clopen_game_ii(&spec, Polarity::Mu).unwrap();
        assert_eq!(a.to_arena_strategy(&game).unwrap(), b.to_arena_strategy(&game).unwrap());
        assert_eq!(a.pick(&SetDescriptor::from_mask(spec.carrier(), 0b110).unwrap()), Some(nat(1)));
    }
}
