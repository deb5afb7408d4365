//! Kripke and clopen bisimulations between modal space models.
//!
//! A relation is a set of explicit pairs, optionally extended on
//! `ℕ ∪ {∞}` by a tail rule pairing `n` with `n + d` for all `n` from a
//! start point on, and by the pair `(∞, ∞)`. The tail starts at the least
//! `T ≥ k₁` with `T + d ≥ k₂`, where `k₁, k₂` are the thresholds of the two
//! models, so both ends of a tail pair lie in the translation-invariant
//! parts of their models.
//!
//! Because successor sets are finite, the back and forth conditions are
//! checked pair by pair. For tail pairs only finitely many representatives
//! are checked: past a bound that exceeds all thresholds, valuation
//! exceptions, explicit pairs and shifts, the conditions for `(n, n+d)` do
//! not depend on `n`. The same bound limits the generators `{m}` and
//! `co{0..m-1}+inf` on which images are checked for clopenness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::algebra::{AlgebraError, LimitParams, Point, SetDescriptor};
use crate::formula::Formula;
use crate::game_build::{build_eval_game, GameBuildError};
use crate::game_core::solve_parity;
use crate::semantics::{eval_den, Env};
use crate::space::ModalSpaceModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("relation line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("SymbolicNotSupported: {0}")]
    SymbolicNotSupported(String),
    #[error("InvalidRelation: {0}")]
    Invalid(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Game(#[from] GameBuildError),
}

/// The pairing of tails: `n ↔ n + shift`. `shift = 0` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailRule {
    pub shift: i64,
}

/// A relation `Z ⊆ X₁ × X₂`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(Point, Point)>,
    pub tail: Option<TailRule>,
    pub inf_pair: bool,
}

/// A failed condition, with the pair at which it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimViolation {
    pub pair: Option<(Point, Point)>,
    pub reason: String,
}

impl fmt::Display for BisimViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pair {
            Some((a, b)) => write!(f, "at ({a}, {b}): {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

fn violation(pair: Option<(Point, Point)>, reason: String) -> BisimViolation {
    BisimViolation { pair, reason }
}

impl BisimRelation {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Point, Point)>) -> Self {
        BisimRelation {
            pairs: pairs.into_iter().collect(),
            ..Default::default()
        }
    }

    /// The identity on a model: all explicit points, and on `ℕ ∪ {∞}`
    /// the identity tail and `(∞, ∞)`.
    pub fn identity(m: &ModalSpaceModel) -> Self {
        let mut z = Self::from_pairs(m.explicit_points().into_iter().map(|x| (x, x)));
        if !m.carrier().is_finite() {
            z.tail = Some(TailRule { shift: 0 });
            z.inf_pair = true;
        }
        z
    }

    /// Parses `pair <a> <b>`, `tail identity`, `tail shift <d>` and
    /// `infpair` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BisimError> {
        let mut z = BisimRelation::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
            let perr = |message: String| BisimError::Parse { line, message };
            let point = |s: &str| Point::parse(s).map_err(|e| perr(e.to_string()));
            let set_tail = |z: &mut BisimRelation, shift| {
                if z.tail.replace(TailRule { shift }).is_some() {
                    return Err(perr("a second tail rule".into()));
                }
                Ok(())
            };
            match words.as_slice() {
                [] => {}
                ["pair", a, b] => {
                    z.pairs.insert((point(a)?, point(b)?));
                }
                ["tail", "identity"] => set_tail(&mut z, 0)?,
                ["tail", "shift", d] => {
                    let d = d.parse().map_err(|_| perr(format!("bad shift `{d}`")))?;
                    set_tail(&mut z, d)?
                }
                ["infpair"] => z.inf_pair = true,
                _ => {
                    return Err(perr(format!(
                        "expected `pair <a> <b>`, `tail identity`, `tail shift <d>` or `infpair`, found `{}`",
                        raw.trim()
                    )))
                }
            }
        }
        Ok(z)
    }

    pub fn from_file(path: &Path) -> Result<Self, BisimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BisimError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The first point of the tail on the left model.
    pub fn tail_start(&self, m1: &ModalSpaceModel, m2: &ModalSpaceModel) -> Option<u64> {
        let d = self.tail?.shift;
        let k1 = m1.relation().threshold() as i64;
        let k2 = m2.relation().threshold() as i64;
        Some(k1.max(k2 - d).max(0) as u64)
    }

    pub fn contains(&self, m1: &ModalSpaceModel, m2: &ModalSpaceModel, a: Point, b: Point) -> bool {
        if self.pairs.contains(&(a, b)) {
            return true;
        }
        match (a, b) {
            (Point::Inf, Point::Inf) => self.inf_pair,
            (Point::Nat(n), Point::Nat(m)) => match (self.tail, self.tail_start(m1, m2)) {
                (Some(rule), Some(t)) => n >= t && n as i64 + rule.shift == m as i64,
                _ => false,
            },
            _ => false,
        }
    }

    /// Points past which nothing about the two models and `Z` changes
    /// under translation.
    fn bound(&self, m1: &ModalSpaceModel, m2: &ModalSpaceModel) -> u64 {
        let exceptions = |m: &ModalSpaceModel| {
            m.valuation()
                .values()
                .filter_map(|s| s.exceptions().and_then(|e| e.last().copied()))
                .max()
                .unwrap_or(0)
        };
        let nat = |p: &Point| p.index().unwrap_or(0) as u64;
        let explicit = self.pairs.iter().map(|(a, b)| nat(a).max(nat(b))).max().unwrap_or(0);
        let shift = self.tail.map_or(0, |t| t.shift.unsigned_abs());
        let mut bound = [
            m1.relation().threshold(),
            m2.relation().threshold(),
            exceptions(m1),
            exceptions(m2),
            explicit,
            self.tail_start(m1, m2).unwrap_or(0),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
        bound += m1.relation().max_shift() + m2.relation().max_shift() + shift + 2;
        bound
    }

    /// The pairs on which the conditions are checked: the explicit pairs,
    /// `(∞, ∞)` and tail representatives up to the translation bound.
    pub fn representative_pairs(&self, m1: &ModalSpaceModel, m2: &ModalSpaceModel) -> Vec<(Point, Point)> {
        let mut out: BTreeSet<(Point, Point)> = self.pairs.clone();
        if self.inf_pair {
            out.insert((Point::Inf, Point::Inf));
        }
        if let (Some(rule), Some(t)) = (self.tail, self.tail_start(m1, m2)) {
            for n in t..=self.bound(m1, m2) {
                out.insert((Point::Nat(n), Point::Nat((n as i64 + rule.shift) as u64)));
            }
        }
        out.into_iter().collect()
    }

    /// `Z[U]` for `U ⊆ X₁`, or `Z⁻¹[U]` for `U ⊆ X₂` when `inverse`.
    pub fn image(
        &self,
        m1: &ModalSpaceModel,
        m2: &ModalSpaceModel,
        u: &SetDescriptor,
        inverse: bool,
    ) -> Result<SetDescriptor, AlgebraError> {
        let target = if inverse { m1.carrier() } else { m2.carrier() };
        let mut points = Vec::new();
        for &(a, b) in &self.pairs {
            let (from, to) = if inverse { (b, a) } else { (a, b) };
            if u.contains(from)? {
                points.push(to);
            }
        }
        if self.inf_pair && u.contains(Point::Inf)? {
            points.push(Point::Inf);
        }
        let mut image = SetDescriptor::from_points(target, points)?;
        if let (Some(rule), Some(t)) = (self.tail, self.tail_start(m1, m2)) {
            let (start, shift) = if inverse {
                ((t as i64 + rule.shift) as u64, -rule.shift)
            } else {
                (t, rule.shift)
            };
            let tail = u.intersection(&SetDescriptor::nat_tail(start))?;
            image = image.union(&tail.nat_shift_image(shift))?;
        }
        Ok(image)
    }

    fn check_endpoints(&self, m1: &ModalSpaceModel, m2: &ModalSpaceModel) -> Result<(), BisimViolation> {
        for &(a, b) in &self.pairs {
            if m1.carrier().check(a).is_err() || m2.carrier().check(b).is_err() {
                return Err(violation(Some((a, b)), "pair outside the carriers".into()));
            }
        }
        let omega = !m1.carrier().is_finite() && !m2.carrier().is_finite();
        if (self.tail.is_some() || self.inf_pair) && !omega {
            return Err(violation(
                None,
                "tail rules and infpair need ℕ∪{∞} on both sides".into(),
            ));
        }
        Ok(())
    }
}

fn props(m1: &ModalSpaceModel, m2: &ModalSpaceModel) -> BTreeSet<String> {
    m1.valuation().keys().chain(m2.valuation().keys()).cloned().collect()
}

fn holds(m: &ModalSpaceModel, prop: &str, x: Point) -> bool {
    m.prop(prop).is_some_and(|s| s.contains(x).unwrap_or(false))
}

fn successors(m: &ModalSpaceModel, x: Point) -> Vec<Point> {
    m.successors(x)
        .expect("point of the carrier")
        .finite_members()
        .expect("successor sets are finite")
}

/// Atom agreement and the back and forth conditions at one pair.
fn check_pair(
    m1: &ModalSpaceModel,
    m2: &ModalSpaceModel,
    related: impl Fn(Point, Point) -> bool,
    a: Point,
    b: Point,
) -> Result<(), String> {
    for p in props(m1, m2) {
        if holds(m1, &p, a) != holds(m2, &p, b) {
            return Err(format!("they disagree on `{p}`"));
        }
    }
    let (sa, sb) = (successors(m1, a), successors(m2, b));
    for &a2 in &sa {
        if !sb.iter().any(|&b2| related(a2, b2)) {
            return Err(format!("forth fails for the successor {a2} of {a}"));
        }
    }
    for &b2 in &sb {
        if !sa.iter().any(|&a2| related(a2, b2)) {
            return Err(format!("back fails for the successor {b2} of {b}"));
        }
    }
    Ok(())
}

/// Is `z` a Kripke bisimulation? Returns the first failing pair otherwise.
pub fn is_kripke_bisimulation(
    z: &BisimRelation,
    m1: &ModalSpaceModel,
    m2: &ModalSpaceModel,
) -> Result<(), BisimViolation> {
    z.check_endpoints(m1, m2)?;
    let related = |a, b| z.contains(m1, m2, a, b);
    for (a, b) in z.representative_pairs(m1, m2) {
        check_pair(m1, m2, related, a, b).map_err(|r| violation(Some((a, b)), r))?;
    }
    Ok(())
}

/// Is `z` a clopen bisimulation: a Kripke bisimulation whose forward and
/// backward images of clopen sets are clopen?
pub fn is_clopen_bisimulation(
    z: &BisimRelation,
    m1: &ModalSpaceModel,
    m2: &ModalSpaceModel,
) -> Result<(), BisimViolation> {
    is_kripke_bisimulation(z, m1, m2)?;
    let bound = z.bound(m1, m2);
    let generators = |m: &ModalSpaceModel| -> Vec<SetDescriptor> {
        let c = m.carrier();
        match c.points() {
            Some(points) => points
                .into_iter()
                .map(|p| SetDescriptor::singleton(c, p).expect("point of the carrier"))
                .collect(),
            None => (0..=bound)
                .flat_map(|k| {
                    [
                        SetDescriptor::finite_nat([k], false),
                        SetDescriptor::cofinite_nat(0..k, true),
                    ]
                })
                .collect(),
        }
    };
    for (inverse, m) in [(false, m1), (true, m2)] {
        for u in generators(m) {
            let image = z
                .image(m1, m2, &u, inverse)
                .map_err(|e| violation(None, e.to_string()))?;
            if !image.is_clopen() {
                let name = if inverse { "Z⁻¹" } else { "Z" };
                return Err(violation(None, format!("{name}[{u}] = {image} is not clopen")));
            }
        }
    }
    Ok(())
}

/// The greatest Kripke bisimulation between two finite models, by
/// removing violating pairs until none is left.
pub fn largest_bisimulation(
    m1: &ModalSpaceModel,
    m2: &ModalSpaceModel,
) -> Result<BisimRelation, BisimError> {
    let finite = |m: &ModalSpaceModel| {
        m.carrier().points().ok_or_else(|| {
            BisimError::SymbolicNotSupported(
                "the largest bisimulation is computed for finite models only".into(),
            )
        })
    };
    let (xs, ys) = (finite(m1)?, finite(m2)?);
    let props = props(m1, m2);
    let mut z: BTreeSet<(Point, Point)> = xs
        .iter()
        .flat_map(|&a| ys.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| props.iter().all(|p| holds(m1, p, a) == holds(m2, p, b)))
        .collect();
    loop {
        let current = z.clone();
        z.retain(|&(a, b)| check_pair(m1, m2, |x, y| current.contains(&(x, y)), a, b).is_ok());
        if z == current {
            return Ok(BisimRelation::from_pairs(z));
        }
    }
}

/// A disagreement between related points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceViolation {
    pub formula: String,
    pub pair: (Point, Point),
    pub left: bool,
    pub right: bool,
}

/// Outcome of [`invariance_suite`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvarianceReport {
    /// Number of (pair, formula) comparisons made.
    pub checked: usize,
    pub violations: Vec<InvarianceViolation>,
    /// Formulas that could not be evaluated on one of the models.
    pub errors: Vec<(String, String)>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares the denotations of `formulas` on both sides of every
/// representative pair of `z`.
pub fn invariance_suite(
    m1: &ModalSpaceModel,
    m2: &ModalSpaceModel,
    z: &BisimRelation,
    formulas: &[Formula],
    params: &LimitParams,
) -> InvarianceReport {
    let pairs = z.representative_pairs(m1, m2);
    let mut report = InvarianceReport::default();
    for phi in formulas {
        let left = eval_den(m1, phi, &Env::new(), params);
        let right = eval_den(m2, phi, &Env::new(), params);
        let (left, right) = match (left, right) {
            (Ok(l), Ok(r)) => (l.value, r.value),
            (Err(e), _) | (_, Err(e)) => {
                report.errors.push((phi.to_string(), e.to_string()));
                continue;
            }
        };
        for &(a, b) in &pairs {
            report.checked += 1;
            let (l, r) = (
                left.contains(a).unwrap_or(false),
                right.contains(b).unwrap_or(false),
            );
            if l != r {
                report.violations.push(InvarianceViolation {
                    formula: phi.to_string(),
                    pair: (a, b),
                    left: l,
                    right: r,
                });
            }
        }
    }
    report
}

/// Solves the evaluation games of `phi` on two finite models and returns
/// the pairs of `z` at which exactly one of `(φ, a)` and `(φ, b)` is won
/// by `∃`.
pub fn z_closure_violations(
    m1: &ModalSpaceModel,
    m2: &ModalSpaceModel,
    z: &BisimRelation,
    phi: &Formula,
) -> Result<Vec<(Point, Point)>, BisimError> {
    let winning = |m: &ModalSpaceModel| -> Result<SetDescriptor, BisimError> {
        let game = build_eval_game(phi, m)?;
        let solved = solve_parity(game.arena());
        Ok(game.winning_points(&solved, 0))
    };
    let (w1, w2) = (winning(m1)?, winning(m2)?);
    let mut out = Vec::new();
    for &(a, b) in &z.pairs {
        if w1.contains(a)? != w2.contains(b)? {
            out.push((a, b));
        }
    }
    Ok(out)
}

impl fmt::Display for BisimRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            writeln!(f, "pair {a} {b}")?;
        }
        match self.tail {
            Some(TailRule { shift: 0 }) => writeln!(f, "tail identity")?,
            Some(TailRule { shift }) => writeln!(f, "tail shift {shift}")?,
            None => {}
        }
        if self.inf_pair {
            writeln!(f, "infpair")?;
        }
        Ok(())
    }
}

/// Pairs grouped by left point, for reports.
pub fn pairs_by_left(z: &BisimRelation) -> BTreeMap<Point, Vec<Point>> {
    let mut out: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    for &(a, b) in &z.pairs {
        out.entry(a).or_default().push(b);
    }
    out
}
