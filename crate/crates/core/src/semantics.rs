//! Denotational semantics with transfinite fixpoint approximation.
//!
//! A fixpoint is computed in blocks. Block `b` starts at the stage
//! `F_{ω·b}` (`∅` or `X` for `b = 0`, otherwise the limit of block `b-1`)
//! and iterates `F` until the chain either stabilizes or its limit can be
//! taken (see [`crate::algebra::increasing_limit`]). At most
//! `limit_budget` limits are taken per fixpoint.
//!
//! The clopen semantics forms limits as `Cl(⋃)` and `Int(⋂)`; the
//! standard semantics uses plain unions and intersections and may leave the
//! clopen algebra.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{
    decreasing_limit, increasing_limit, AlgebraError, Carrier, IncrementPattern, LimitMode,
    LimitParams, Mode, Point, SetDescriptor,
};
use crate::formula::{Formula, FormulaAnalysis, FormulaError, Node, NodeId, Polarity};
use crate::space::{ModalSpaceModel, ModelError};

/// Values of fixpoint variables, overriding the model's valuation.
pub type Env = BTreeMap<String, SetDescriptor>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Algebra(AlgebraError),
    #[error(transparent)]
    Model(ModelError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("UnboundVariable: `{0}` is neither in the environment nor in the valuation")]
    UnboundVariable(String),
    #[error("BudgetExhausted: no fixpoint after {limits} limit stages")]
    BudgetExhausted { limits: usize },
    #[error("MonotonicityViolation: {0}")]
    MonotonicityViolation(String),
    #[error("NotClopen: {0}")]
    NotClopen(String),
}

impl From<AlgebraError> for SemanticsError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::NotMonotone { stage } => SemanticsError::MonotonicityViolation(
                format!("approximant {stage} does not contain its predecessor"),
            ),
            other => SemanticsError::Algebra(other),
        }
    }
}

impl From<ModelError> for SemanticsError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Algebra(a) => a.into(),
            other => SemanticsError::Model(other),
        }
    }
}

impl SemanticsError {
    /// The variant name, e.g. `JoinUndefined`.
    pub fn kind(&self) -> &'static str {
        match self {
            SemanticsError::Algebra(a) => match a {
                AlgebraError::JoinUndefined { .. } => "JoinUndefined",
                AlgebraError::MeetUndefined { .. } => "MeetUndefined",
                AlgebraError::PatternUndetected { .. } => "PatternUndetected",
                AlgebraError::NotRepresentable { .. } => "NotRepresentable",
                AlgebraError::CarrierMismatch { .. } => "CarrierMismatch",
                _ => "AlgebraError",
            },
            SemanticsError::Model(_) => "ModelError",
            SemanticsError::Formula(FormulaError::NotClean(_)) => "NotClean",
            SemanticsError::Formula(_) => "FormulaError",
            SemanticsError::UnboundVariable(_) => "UnboundVariable",
            SemanticsError::BudgetExhausted { .. } => "BudgetExhausted",
            SemanticsError::MonotonicityViolation(_) => "MonotonicityViolation",
            SemanticsError::NotClopen(_) => "NotClopen",
        }
    }
}

/// The ordinal `ω·limits + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    pub limits: usize,
    pub offset: usize,
}

impl Ordinal {
    pub fn finite(n: usize) -> Self {
        Ordinal {
            limits: 0,
            offset: n,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.limits > 0 && self.offset == 0
    }

    /// The predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Self> {
        (self.offset > 0).then(|| Ordinal {
            limits: self.limits,
            offset: self.offset - 1,
        })
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.limits, self.offset) {
            (0, n) => write!(f, "{n}"),
            (1, 0) => write!(f, "ω"),
            (1, n) => write!(f, "ω+{n}"),
            (b, 0) => write!(f, "ω·{b}"),
            (b, n) => write!(f, "ω·{b}+{n}"),
        }
    }
}

/// One block of approximants `F_{ω·b}, F_{ω·b+1}, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxBlock {
    pub stages: Vec<SetDescriptor>,
    /// The limit taken at the end of the block; `None` if it stabilized.
    pub limit: Option<SetDescriptor>,
    /// Increment pattern that justified the limit.
    pub pattern: Option<IncrementPattern>,
}

impl ApproxBlock {
    /// Increments of the increasing chain (complements for a `ν` block)
    /// between consecutive computed stages.
    fn up(&self, polarity: Polarity, i: usize) -> SetDescriptor {
        match polarity {
            Polarity::Mu => self.stages[i].clone(),
            Polarity::Nu => self.stages[i].complement(),
        }
    }

    fn base_increment(&self, polarity: Polarity) -> Option<(Vec<u64>, &IncrementPattern)> {
        let pattern = self.pattern.as_ref()?;
        let d = self
            .up(polarity, pattern.start + 1)
            .difference(&self.up(polarity, pattern.start))
            .ok()?;
        Some((d.finite_members()?.iter().filter_map(Point::index).map(|i| i as u64).collect(), pattern))
    }

    /// Stage `i` of the block, extrapolated along the increment pattern
    /// when `i` lies beyond the computed stages.
    fn stage(&self, polarity: Polarity, i: usize) -> Option<SetDescriptor> {
        if i < self.stages.len() {
            return Some(self.stages[i].clone());
        }
        let (base, pattern) = self.base_increment(polarity)?;
        let last = self.stages.len() - 1;
        let mut up = self.up(polarity, last);
        let extra = (last..i).flat_map(|n| {
            let shift = (n - pattern.start) as u64 * pattern.step;
            base.iter().map(move |a| a + shift).collect::<Vec<_>>()
        });
        up = up
            .union(&SetDescriptor::finite_nat(extra, false))
            .expect("same carrier");
        Some(match polarity {
            Polarity::Mu => up,
            Polarity::Nu => up.complement(),
        })
    }

    /// First index `i` with `x ∈ F_i` in an increasing block, using the
    /// pattern for points beyond the computed stages.
    fn first_containing(&self, x: Point) -> Option<usize> {
        if let Some(i) = self
            .stages
            .iter()
            .position(|s| s.contains(x).unwrap_or(false))
        {
            return Some(i);
        }
        let (base, pattern) = self.base_increment(Polarity::Mu)?;
        let m = match x {
            Point::Nat(m) => m,
            Point::Inf => return None,
        };
        base.iter()
            .filter(|&&a| a <= m && (m - a) % pattern.step == 0)
            .map(|&a| pattern.start + ((m - a) / pattern.step) as usize + 1)
            .min()
    }

    /// First index `i` with `F_i ∩ u ≠ ∅` in an increasing block, with the
    /// least point of that intersection.
    fn first_meeting(&self, u: &SetDescriptor) -> Option<(usize, Point)> {
        for (i, s) in self.stages.iter().enumerate() {
            if let Some(p) = s.intersection(u).ok()?.min_point() {
                return Some((i, p));
            }
        }
        self.limit.as_ref()?;
        let (base, pattern) = self.base_increment(Polarity::Mu)?;
        let lowest = *base.iter().min()?;
        let exceptions = u.exceptions()?;
        let bound = match u.mode()? {
            Mode::FiniteNat => *exceptions.last()?,
            Mode::CofiniteNat => exceptions.last().map_or(0, |m| m + 1),
        };
        let mut n = self.stages.len() - 1;
        loop {
            let shift = (n - pattern.start) as u64 * pattern.step;
            if lowest + shift > bound {
                return None;
            }
            let hit = base
                .iter()
                .map(|a| a + shift)
                .filter(|&m| u.contains(Point::Nat(m)).unwrap_or(false))
                .min();
            if let Some(m) = hit {
                return Some((n + 1, Point::Nat(m)));
            }
            n += 1;
        }
    }
}

/// The approximants of one fixpoint computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxTrace {
    pub polarity: Polarity,
    pub blocks: Vec<ApproxBlock>,
    /// The fixpoint: the last stage of the last block.
    pub value: SetDescriptor,
}

impl ApproxTrace {
    pub fn limit_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.limit.is_some()).count()
    }

    /// Number of explicitly computed stages across all blocks.
    pub fn stage_count(&self) -> usize {
        self.blocks.iter().map(|b| b.stages.len()).sum()
    }

    /// The ordinal at which the fixpoint was reached.
    pub fn closure_ordinal(&self) -> Ordinal {
        Ordinal {
            limits: self.blocks.len() - 1,
            offset: self.blocks.last().map_or(0, |b| b.stages.len() - 1),
        }
    }

    /// The approximant `F_α`; stages past the fixpoint equal the fixpoint.
    pub fn stage(&self, alpha: Ordinal) -> Option<SetDescriptor> {
        let block = self.blocks.get(alpha.limits)?;
        if alpha.limits + 1 == self.blocks.len() && alpha.offset >= block.stages.len() {
            return Some(self.value.clone());
        }
        block.stage(self.polarity, alpha.offset)
    }

    /// Least `α` with `x ∈ F^μ_α`, or `None` if `x` is not in the least
    /// fixpoint. Only meaningful for `μ` traces.
    pub fn mu_depth(&self, x: Point) -> Option<Ordinal> {
        if self.polarity != Polarity::Mu {
            return None;
        }
        self.blocks.iter().enumerate().find_map(|(b, block)| {
            block.first_containing(x).map(|i| Ordinal {
                limits: b,
                offset: i,
            })
        })
    }

    /// A point of `u` of least `μ`-depth, the lowest such point, together
    /// with its depth. `None` if `u` misses the least fixpoint.
    pub fn least_depth_point(&self, u: &SetDescriptor) -> Option<(Ordinal, Point)> {
        if self.polarity != Polarity::Mu {
            return None;
        }
        self.blocks.iter().enumerate().find_map(|(b, block)| {
            block.first_meeting(u).map(|(i, p)| {
                (
                    Ordinal {
                        limits: b,
                        offset: i,
                    },
                    p,
                )
            })
        })
    }
}

/// Computes a fixpoint of `f` by approximation from `∅` (`μ`) or `X` (`ν`).
pub fn approximate<F>(
    carrier: Carrier,
    polarity: Polarity,
    mut f: F,
    params: &LimitParams,
    mode: LimitMode,
) -> Result<ApproxTrace, SemanticsError>
where
    F: FnMut(&SetDescriptor) -> Result<SetDescriptor, SemanticsError>,
{
    params.validate()?;
    let mut seed = match polarity {
        Polarity::Mu => SetDescriptor::empty(carrier),
        Polarity::Nu => SetDescriptor::full(carrier),
    };
    let mut blocks = Vec::new();
    for b in 0..=params.limit_budget {
        let first = Some(Ok(seed.clone()));
        let chain = std::iter::successors(first, |prev: &Result<SetDescriptor, SemanticsError>| {
            prev.as_ref().ok().map(&mut f)
        });
        let limit = match polarity {
            Polarity::Mu => increasing_limit(chain, params, mode)?,
            Polarity::Nu => decreasing_limit(chain, params, mode)?,
        };
        if limit.stabilized {
            blocks.push(ApproxBlock {
                stages: limit.stages,
                limit: None,
                pattern: None,
            });
            return Ok(ApproxTrace {
                polarity,
                blocks,
                value: limit.value,
            });
        }
        if b == params.limit_budget {
            break;
        }
        seed = limit.value.clone();
        blocks.push(ApproxBlock {
            stages: limit.stages,
            limit: Some(limit.value),
            pattern: limit.pattern,
        });
    }
    Err(SemanticsError::BudgetExhausted {
        limits: params.limit_budget,
    })
}

/// Least fixpoint in the clopen algebra.
pub fn lfp_approx<F>(carrier: Carrier, f: F, params: &LimitParams) -> Result<ApproxTrace, SemanticsError>
where
    F: FnMut(&SetDescriptor) -> Result<SetDescriptor, SemanticsError>,
{
    approximate(carrier, Polarity::Mu, f, params, LimitMode::Clopen)
}

/// Greatest fixpoint in the clopen algebra.
pub fn gfp_approx<F>(carrier: Carrier, f: F, params: &LimitParams) -> Result<ApproxTrace, SemanticsError>
where
    F: FnMut(&SetDescriptor) -> Result<SetDescriptor, SemanticsError>,
{
    approximate(carrier, Polarity::Nu, f, params, LimitMode::Clopen)
}

/// The value of a formula with the traces of its fixpoint subformulas.
///
/// A nested fixpoint is recomputed for every approximant of the enclosing
/// one; its trace records the last of these computations.
#[derive(Debug, Clone)]
pub struct Denotation {
    pub value: SetDescriptor,
    pub traces: BTreeMap<NodeId, ApproxTrace>,
    pub analysis: FormulaAnalysis,
}

impl Denotation {
    /// Trace of the fixpoint binding `var`.
    pub fn trace_of(&self, var: &str) -> Option<&ApproxTrace> {
        self.traces.get(&self.analysis.binding_of(var)?)
    }
}

struct Evaluator<'a> {
    model: &'a ModalSpaceModel,
    analysis: &'a FormulaAnalysis,
    params: LimitParams,
    mode: LimitMode,
}

impl Evaluator<'_> {
    fn eval(
        &self,
        id: NodeId,
        env: &mut Env,
        traces: &mut BTreeMap<NodeId, ApproxTrace>,
    ) -> Result<SetDescriptor, SemanticsError> {
        let lookup = |p: &str, env: &Env| {
            env.get(p)
                .or_else(|| self.model.prop(p))
                .cloned()
                .ok_or_else(|| SemanticsError::UnboundVariable(p.to_string()))
        };
        Ok(match self.analysis.node(id) {
            Node::Prop(p) => lookup(p, env)?,
            Node::NegProp(p) => lookup(p, env)?.complement(),
            Node::Bot => self.model.empty_set(),
            Node::Top => self.model.full_set(),
            Node::And(l, r) => {
                let l = self.eval(*l, env, traces)?;
                l.intersection(&self.eval(*r, env, traces)?)?
            }
            Node::Or(l, r) => {
                let l = self.eval(*l, env, traces)?;
                l.union(&self.eval(*r, env, traces)?)?
            }
            Node::Possibly(g) => {
                let u = self.eval(*g, env, traces)?;
                self.model.diamond(&u)?
            }
            Node::Necessarily(g) => {
                let u = self.eval(*g, env, traces)?;
                self.model.boxed(&u)?
            }
            Node::Fix(polarity, var, body) => {
                let saved = env.remove(var);
                let trace = approximate(
                    self.model.carrier(),
                    *polarity,
                    |u| {
                        env.insert(var.clone(), u.clone());
                        self.eval(*body, env, traces)
                    },
                    &self.params,
                    self.mode,
                );
                env.remove(var);
                if let Some(old) = saved {
                    env.insert(var.clone(), old);
                }
                let trace = trace?;
                let value = trace.value.clone();
                traces.insert(id, trace);
                value
            }
        })
    }
}

fn evaluate(
    model: &ModalSpaceModel,
    formula: &Formula,
    env: &Env,
    params: &LimitParams,
    mode: LimitMode,
) -> Result<Denotation, SemanticsError> {
    let analysis = FormulaAnalysis::new(formula)?;
    for (var, set) in env {
        if set.carrier() != model.carrier() {
            return Err(AlgebraError::CarrierMismatch {
                left: model.carrier(),
                right: set.carrier(),
            }
            .into());
        }
        if mode == LimitMode::Clopen && !set.is_clopen() {
            return Err(SemanticsError::NotClopen(format!(
                "environment value {var} = {set}"
            )));
        }
    }
    let evaluator = Evaluator {
        model,
        analysis: &analysis,
        params: *params,
        mode,
    };
    let mut traces = BTreeMap::new();
    let value = evaluator.eval(analysis.root(), &mut env.clone(), &mut traces)?;
    if mode == LimitMode::Clopen && !value.is_clopen() {
        return Err(SemanticsError::NotClopen(format!("denotation {value}")));
    }
    Ok(Denotation {
        value,
        traces,
        analysis,
    })
}

/// `[[φ]]` in the clopen semantics.
pub fn eval_den(
    model: &ModalSpaceModel,
    formula: &Formula,
    env: &Env,
    params: &LimitParams,
) -> Result<Denotation, SemanticsError> {
    evaluate(model, formula, env, params, LimitMode::Clopen)
}

/// `[[φ]]` in the standard powerset semantics.
pub fn eval_standard(
    model: &ModalSpaceModel,
    formula: &Formula,
    env: &Env,
    params: &LimitParams,
) -> Result<SetDescriptor, SemanticsError> {
    Ok(evaluate(model, formula, env, params, LimitMode::Plain)?.value)
}
