//! Exact set descriptors over the two supported carriers.
//!
//! A [`Carrier`] is either a finite discrete space `{0, .., n-1}` or the
//! one-point compactification `ℕ ∪ {∞}` of the naturals. On the finite
//! carrier every subset is clopen and closure and interior are the identity.
//! On `ℕ ∪ {∞}` every natural is isolated and the neighbourhoods of `∞` are
//! the cofinite sets containing it. The descriptor class used there is the
//! Boolean algebra generated by finite and cofinite sets of naturals together
//! with a flag for `∞`; it is closed under complement, binary union and
//! intersection, closure and interior.
//!
//! The clopen sets of `ℕ ∪ {∞}` (finite sets of naturals, and cofinite sets
//! containing `∞`) do not form a complete lattice. Joins and meets of
//! increasing or decreasing chains are therefore computed by
//! [`join_of_chain`] and [`meet_of_chain`], which either return an exact
//! limit or fail with an explicit error.

use std::collections::BTreeSet;
use std::fmt;

use bitvec::prelude::*;
use thiserror::Error;

/// Largest finite carrier whose full powerset may be enumerated.
pub const MAX_ENUMERATION_POINTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("a finite carrier needs at least one point")]
    EmptyCarrier,
    #[error("carrier mismatch: {left} vs {right}")]
    CarrierMismatch { left: Carrier, right: Carrier },
    #[error("point {point} is not in carrier {carrier}")]
    PointOutOfRange { point: Point, carrier: Carrier },
    #[error("{0} has no least clopen superset")]
    NoLeastClopenSuperset(String),
    #[error("cannot enumerate the subsets of an infinite carrier")]
    InfiniteEnumeration,
    #[error("carrier with {points} points exceeds the enumeration limit of {max}")]
    TooLarge { points: usize, max: usize },
    #[error("JoinUndefined: the union {union} has no least clopen upper bound")]
    JoinUndefined { union: String },
    #[error("MeetUndefined: the intersection {intersection} has no greatest clopen lower bound")]
    MeetUndefined { intersection: String },
    #[error("PatternUndetected: no eventual translation pattern within {stages} stages")]
    PatternUndetected { stages: usize },
    #[error("NotMonotone: chain is not monotone at stage {stage}")]
    NotMonotone { stage: usize },
    #[error("NotRepresentable: the plain limit {limit} is neither finite nor cofinite")]
    NotRepresentable { limit: String },
    #[error("chain has no stages")]
    EmptyChain,
    #[error("invalid limit parameters: {0}")]
    InvalidParams(String),
    #[error("cannot parse {text:?}: {message}")]
    Syntax { text: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarrierKind {
    Finite(usize),
    OmegaPlus,
}

/// The underlying space of a model; the topology is implied by the kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Carrier {
    kind: CarrierKind,
}

impl Carrier {
    pub fn finite(points: usize) -> Result<Self, AlgebraError> {
        if points == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        Ok(Carrier {
            kind: CarrierKind::Finite(points),
        })
    }

    pub fn omega() -> Self {
        Carrier {
            kind: CarrierKind::OmegaPlus,
        }
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, CarrierKind::Finite(_))
    }

    /// Number of points for a finite carrier.
    pub fn size(&self) -> Option<usize> {
        match self.kind {
            CarrierKind::Finite(n) => Some(n),
            CarrierKind::OmegaPlus => None,
        }
    }

    pub fn contains(&self, point: Point) -> bool {
        match (self.kind, point) {
            (CarrierKind::Finite(n), Point::Nat(i)) => (i as u128) < n as u128,
            (CarrierKind::Finite(_), Point::Inf) => false,
            (CarrierKind::OmegaPlus, _) => true,
        }
    }

    pub fn check(&self, point: Point) -> Result<(), AlgebraError> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(AlgebraError::PointOutOfRange {
                point,
                carrier: *self,
            })
        }
    }

    /// All points of a finite carrier, in index order.
    pub fn points(&self) -> Option<Vec<Point>> {
        self.size()
            .map(|n| (0..n as u64).map(Point::Nat).collect())
    }

    fn same(&self, other: &Carrier) -> Result<(), AlgebraError> {
        if self == other {
            Ok(())
        } else {
            Err(AlgebraError::CarrierMismatch {
                left: *self,
                right: *other,
            })
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CarrierKind::Finite(n) => write!(f, "finite({n})"),
            CarrierKind::OmegaPlus => write!(f, "omega"),
        }
    }
}

/// A point of a carrier. Finite carriers use `Nat(i)` for index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Nat(u64),
    Inf,
}

impl Point {
    pub fn index(&self) -> Option<usize> {
        match self {
            Point::Nat(i) => Some(*i as usize),
            Point::Inf => None,
        }
    }

    pub fn parse(text: &str) -> Result<Point, AlgebraError> {
        let t = text.trim();
        if t == "inf" {
            return Ok(Point::Inf);
        }
        t.parse::<u64>().map(Point::Nat).map_err(|_| AlgebraError::Syntax {
            text: text.to_string(),
            message: "expected a natural number or `inf`".into(),
        })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(i) => write!(f, "{i}"),
            Point::Inf => write!(f, "inf"),
        }
    }
}

/// Shape of a descriptor over `ℕ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Finitely many naturals, listed as the exceptions.
    FiniteNat,
    /// All naturals except the listed exceptions.
    CofiniteNat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Finite(BitVec<u64, Lsb0>),
    Omega {
        mode: Mode,
        exceptions: BTreeSet<u64>,
        inf: bool,
    },
}

/// An exact, finitely presented subset of a carrier.
///
/// Descriptors are canonical: two descriptors are `==` exactly when they
/// denote the same set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetDescriptor {
    repr: Repr,
}

impl fmt::Debug for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetDescriptor({self})")
    }
}

impl SetDescriptor {
    pub fn empty(carrier: Carrier) -> Self {
        match carrier.kind {
            CarrierKind::Finite(n) => SetDescriptor {
                repr: Repr::Finite(bitvec![u64, Lsb0; 0; n]),
            },
            CarrierKind::OmegaPlus => Self::finite_nat([], false),
        }
    }

    pub fn full(carrier: Carrier) -> Self {
        Self::empty(carrier).complement()
    }

    /// `{members} (∪ {∞} if inf)` over `ℕ ∪ {∞}`.
    pub fn finite_nat(members: impl IntoIterator<Item = u64>, inf: bool) -> Self {
        SetDescriptor {
            repr: Repr::Omega {
                mode: Mode::FiniteNat,
                exceptions: members.into_iter().collect(),
                inf,
            },
        }
    }

    /// `ℕ \ {exceptions} (∪ {∞} if inf)` over `ℕ ∪ {∞}`.
    pub fn cofinite_nat(exceptions: impl IntoIterator<Item = u64>, inf: bool) -> Self {
        SetDescriptor {
            repr: Repr::Omega {
                mode: Mode::CofiniteNat,
                exceptions: exceptions.into_iter().collect(),
                inf,
            },
        }
    }

    /// Subset of a finite carrier given by the low `n` bits of `mask`.
    pub fn from_mask(carrier: Carrier, mask: u64) -> Result<Self, AlgebraError> {
        let n = match carrier.kind {
            CarrierKind::Finite(n) => n,
            CarrierKind::OmegaPlus => return Err(AlgebraError::InfiniteEnumeration),
        };
        if n > 64 {
            return Err(AlgebraError::TooLarge { points: n, max: 64 });
        }
        let mut bits = bitvec![u64, Lsb0; 0; n];
        for i in 0..n {
            bits.set(i, mask >> i & 1 == 1);
        }
        Ok(SetDescriptor {
            repr: Repr::Finite(bits),
        })
    }

    pub fn from_points(
        carrier: Carrier,
        points: impl IntoIterator<Item = Point>,
    ) -> Result<Self, AlgebraError> {
        let mut set = Self::empty(carrier);
        for p in points {
            carrier.check(p)?;
            set.insert(p);
        }
        Ok(set)
    }

    pub fn singleton(carrier: Carrier, point: Point) -> Result<Self, AlgebraError> {
        Self::from_points(carrier, [point])
    }

    fn insert(&mut self, point: Point) {
        match (&mut self.repr, point) {
            (Repr::Finite(bits), Point::Nat(i)) => bits.set(i as usize, true),
            (Repr::Finite(_), Point::Inf) => unreachable!("checked by carrier"),
            (Repr::Omega { inf, .. }, Point::Inf) => *inf = true,
            (Repr::Omega { mode, exceptions, .. }, Point::Nat(i)) => match mode {
                Mode::FiniteNat => {
                    exceptions.insert(i);
                }
                Mode::CofiniteNat => {
                    exceptions.remove(&i);
                }
            },
        }
    }

    pub fn carrier(&self) -> Carrier {
        match &self.repr {
            Repr::Finite(bits) => Carrier {
                kind: CarrierKind::Finite(bits.len()),
            },
            Repr::Omega { .. } => Carrier::omega(),
        }
    }

    /// Shape of an `ℕ ∪ {∞}` descriptor; `None` on finite carriers.
    pub fn mode(&self) -> Option<Mode> {
        match &self.repr {
            Repr::Omega { mode, .. } => Some(*mode),
            Repr::Finite(_) => None,
        }
    }

    /// Members (for `FiniteNat`) or natural non-members (for `CofiniteNat`).
    pub fn exceptions(&self) -> Option<&BTreeSet<u64>> {
        match &self.repr {
            Repr::Omega { exceptions, .. } => Some(exceptions),
            Repr::Finite(_) => None,
        }
    }

    pub fn has_inf(&self) -> bool {
        matches!(self.repr, Repr::Omega { inf: true, .. })
    }

    /// Membership bits of a finite-carrier descriptor with at most 64 points.
    pub fn to_mask(&self) -> Option<u64> {
        match &self.repr {
            Repr::Finite(bits) if bits.len() <= 64 => Some(
                bits.iter_ones()
                    .fold(0u64, |acc, i| acc | (1u64 << i)),
            ),
            _ => None,
        }
    }

    pub fn complement(&self) -> Self {
        let repr = match &self.repr {
            Repr::Finite(bits) => Repr::Finite(!bits.clone()),
            Repr::Omega {
                mode,
                exceptions,
                inf,
            } => Repr::Omega {
                mode: match mode {
                    Mode::FiniteNat => Mode::CofiniteNat,
                    Mode::CofiniteNat => Mode::FiniteNat,
                },
                exceptions: exceptions.clone(),
                inf: !inf,
            },
        };
        SetDescriptor { repr }
    }

    pub fn union(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.carrier().same(&other.carrier())?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Finite(a), Repr::Finite(b)) => Repr::Finite(a.clone() | b),
            (
                Repr::Omega {
                    mode: ma,
                    exceptions: ea,
                    inf: ia,
                },
                Repr::Omega {
                    mode: mb,
                    exceptions: eb,
                    inf: ib,
                },
            ) => {
                let inf = *ia || *ib;
                let (mode, exceptions) = match (ma, mb) {
                    (Mode::FiniteNat, Mode::FiniteNat) => {
                        (Mode::FiniteNat, ea.union(eb).copied().collect())
                    }
                    (Mode::FiniteNat, Mode::CofiniteNat) => {
                        (Mode::CofiniteNat, eb.difference(ea).copied().collect())
                    }
                    (Mode::CofiniteNat, Mode::FiniteNat) => {
                        (Mode::CofiniteNat, ea.difference(eb).copied().collect())
                    }
                    (Mode::CofiniteNat, Mode::CofiniteNat) => {
                        (Mode::CofiniteNat, ea.intersection(eb).copied().collect())
                    }
                };
                Repr::Omega {
                    mode,
                    exceptions,
                    inf,
                }
            }
            _ => unreachable!("carriers already compared"),
        };
        Ok(SetDescriptor { repr })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.complement().union(&other.complement())?.complement())
    }

    pub fn difference(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.intersection(&other.complement())
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Finite(bits) => bits.not_any(),
            Repr::Omega {
                mode,
                exceptions,
                inf,
            } => *mode == Mode::FiniteNat && exceptions.is_empty() && !inf,
        }
    }

    pub fn is_full(&self) -> bool {
        self.complement().is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, AlgebraError> {
        Ok(self.difference(other)?.is_empty())
    }

    /// Set equality with a carrier check (`==` compares without one).
    pub fn set_eq(&self, other: &Self) -> Result<bool, AlgebraError> {
        self.carrier().same(&other.carrier())?;
        Ok(self == other)
    }

    pub fn intersects(&self, other: &Self) -> Result<bool, AlgebraError> {
        Ok(!self.intersection(other)?.is_empty())
    }

    pub fn contains(&self, point: Point) -> Result<bool, AlgebraError> {
        self.carrier().check(point)?;
        Ok(match (&self.repr, point) {
            (Repr::Finite(bits), Point::Nat(i)) => bits[i as usize],
            (Repr::Omega { inf, .. }, Point::Inf) => *inf,
            (Repr::Omega { mode, exceptions, .. }, Point::Nat(i)) => {
                (*mode == Mode::FiniteNat) == exceptions.contains(&i)
            }
            (Repr::Finite(_), Point::Inf) => unreachable!("checked by carrier"),
        })
    }

    /// Topological closure. On `ℕ ∪ {∞}`, `∞` is a limit point exactly of
    /// the sets containing infinitely many naturals.
    pub fn closure(&self) -> Self {
        match &self.repr {
            Repr::Omega {
                mode: Mode::CofiniteNat,
                exceptions,
                ..
            } => Self::cofinite_nat(exceptions.iter().copied(), true),
            _ => self.clone(),
        }
    }

    /// Topological interior. `∞` is interior only to sets that contain a
    /// cofinite set of naturals.
    pub fn interior(&self) -> Self {
        match &self.repr {
            Repr::Omega {
                mode: Mode::FiniteNat,
                exceptions,
                ..
            } => Self::finite_nat(exceptions.iter().copied(), false),
            _ => self.clone(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closure() == *self
    }

    pub fn is_open(&self) -> bool {
        self.interior() == *self
    }

    pub fn is_clopen(&self) -> bool {
        match &self.repr {
            Repr::Finite(_) => true,
            Repr::Omega { mode, inf, .. } => (*mode == Mode::CofiniteNat) == *inf,
        }
    }

    /// The least clopen `T ⊇ self`, when the algebra has one.
    ///
    /// A finite set of naturals together with `∞` has no least clopen
    /// superset: its clopen supersets are the cofinite sets containing it,
    /// and any of them can be shrunk by removing one more natural.
    pub fn least_clopen_superset(&self) -> Result<Self, AlgebraError> {
        match &self.repr {
            Repr::Omega {
                mode: Mode::FiniteNat,
                inf: true,
                ..
            } => Err(AlgebraError::NoLeastClopenSuperset(self.to_string())),
            _ => Ok(self.closure()),
        }
    }

    /// Least member in the order `0 < 1 < … < ∞`.
    pub fn min_point(&self) -> Option<Point> {
        match &self.repr {
            Repr::Finite(bits) => bits.first_one().map(|i| Point::Nat(i as u64)),
            Repr::Omega {
                mode: Mode::FiniteNat,
                exceptions,
                inf,
            } => exceptions
                .iter()
                .next()
                .map(|&i| Point::Nat(i))
                .or(inf.then_some(Point::Inf)),
            Repr::Omega {
                mode: Mode::CofiniteNat,
                exceptions,
                ..
            } => (0..).find(|i| !exceptions.contains(i)).map(Point::Nat),
        }
    }

    /// Members of a set with finitely many points, in increasing order.
    /// `None` for sets containing infinitely many naturals.
    pub fn finite_members(&self) -> Option<Vec<Point>> {
        match &self.repr {
            Repr::Finite(bits) => Some(bits.iter_ones().map(|i| Point::Nat(i as u64)).collect()),
            Repr::Omega {
                mode: Mode::FiniteNat,
                exceptions,
                inf,
            } => {
                let mut v: Vec<Point> = exceptions.iter().map(|&i| Point::Nat(i)).collect();
                if *inf {
                    v.push(Point::Inf);
                }
                Some(v)
            }
            Repr::Omega { .. } => None,
        }
    }

    /// `{n ∈ ℕ : n + shift ≥ 0 and n + shift ∈ self}`, ignoring `∞`.
    /// Only meaningful on `ℕ ∪ {∞}`.
    pub(crate) fn nat_shift_preimage(&self, shift: i64) -> Self {
        let Repr::Omega {
            mode, exceptions, ..
        } = &self.repr
        else {
            unreachable!("omega only")
        };
        let moved = exceptions.iter().filter_map(|&e| {
            let n = e as i64 - shift;
            (n >= 0).then_some(n as u64)
        });
        match mode {
            Mode::FiniteNat => Self::finite_nat(moved, false),
            Mode::CofiniteNat => {
                // naturals with n + shift < 0 have no image and are excluded
                let below = if shift < 0 { 0..(-shift) as u64 } else { 0..0 };
                Self::cofinite_nat(moved.chain(below), false)
            }
        }
    }

    /// `{n ∈ ℕ : n + shift ∈ self}` seen as the forward image under
    /// `n ↦ n + shift` of the naturals of `self`. Only meaningful on `ℕ ∪ {∞}`.
    pub(crate) fn nat_shift_image(&self, shift: i64) -> Self {
        let Repr::Omega {
            mode, exceptions, ..
        } = &self.repr
        else {
            unreachable!("omega only")
        };
        match mode {
            Mode::FiniteNat => Self::finite_nat(
                exceptions.iter().filter_map(|&e| {
                    let n = e as i64 + shift;
                    (n >= 0).then_some(n as u64)
                }),
                false,
            ),
            Mode::CofiniteNat => {
                // image of co{E} is co{E + shift} minus the naturals below `shift`
                let moved = exceptions.iter().filter_map(|&e| {
                    let n = e as i64 + shift;
                    (n >= 0).then_some(n as u64)
                });
                let below = if shift > 0 { 0..shift as u64 } else { 0..0 };
                Self::cofinite_nat(moved.chain(below), false)
            }
        }
    }

    /// Naturals `≥ k` of the `ℕ ∪ {∞}` carrier.
    pub(crate) fn nat_tail(k: u64) -> Self {
        Self::cofinite_nat(0..k, false)
    }

    /// Parses the descriptor text syntax: `{0,1,2}`, `co{0,2}+inf`,
    /// `{}+inf`, `all`, `empty`.
    pub fn parse(carrier: Carrier, text: &str) -> Result<Self, AlgebraError> {
        let err = |message: &str| AlgebraError::Syntax {
            text: text.to_string(),
            message: message.to_string(),
        };
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "all" => return Ok(Self::full(carrier)),
            "empty" => return Ok(Self::empty(carrier)),
            _ => {}
        }
        let (co, rest) = match t.strip_prefix("co") {
            Some(rest) => (true, rest),
            None => (false, t.as_str()),
        };
        let (body, inf) = match rest.strip_suffix("+inf") {
            Some(body) => (body, true),
            None => (rest, false),
        };
        let inner = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| err("expected `{...}`, `co{...}`, `all` or `empty`"))?;
        let mut members = BTreeSet::new();
        for item in inner.split(',').filter(|s| !s.is_empty()) {
            let n = item
                .parse::<u64>()
                .map_err(|_| err("set elements must be natural numbers"))?;
            members.insert(n);
        }
        match carrier.kind {
            CarrierKind::OmegaPlus => Ok(if co {
                Self::cofinite_nat(members, inf)
            } else {
                Self::finite_nat(members, inf)
            }),
            CarrierKind::Finite(_) => {
                if inf {
                    return Err(err("`+inf` is only valid on the omega carrier"));
                }
                let set = Self::from_points(carrier, members.into_iter().map(Point::Nat))?;
                Ok(if co { set.complement() } else { set })
            }
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty");
        }
        if self.is_full() {
            return write!(f, "all");
        }
        let list = |items: &mut dyn Iterator<Item = u64>| {
            items.map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        };
        match &self.repr {
            Repr::Finite(bits) => {
                write!(f, "{{{}}}", list(&mut bits.iter_ones().map(|i| i as u64)))
            }
            Repr::Omega {
                mode,
                exceptions,
                inf,
            } => {
                if *mode == Mode::CofiniteNat {
                    write!(f, "co")?;
                }
                write!(f, "{{{}}}", list(&mut exceptions.iter().copied()))?;
                if *inf {
                    write!(f, "+inf")?;
                }
                Ok(())
            }
        }
    }
}

/// All subsets of a finite carrier, ordered by membership mask.
pub fn enumerate_clopens(
    carrier: Carrier,
) -> Result<impl Iterator<Item = SetDescriptor>, AlgebraError> {
    let n = carrier.size().ok_or(AlgebraError::InfiniteEnumeration)?;
    if n > MAX_ENUMERATION_POINTS {
        return Err(AlgebraError::TooLarge {
            points: n,
            max: MAX_ENUMERATION_POINTS,
        });
    }
    Ok((0..1u64 << n).map(move |mask| {
        SetDescriptor::from_mask(carrier, mask).expect("size checked")
    }))
}

/// Budgets for transfinite approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitParams {
    /// Stages computed per chain before a limit is attempted.
    pub finite_budget: usize,
    /// Maximum number of limit stages per fixpoint computation.
    pub limit_budget: usize,
    /// Latest stage at which an increment pattern may start.
    pub n0_max: usize,
    /// Largest translation step tried by pattern detection.
    pub d_max: usize,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams {
            finite_budget: 64,
            limit_budget: 4,
            n0_max: 16,
            d_max: 8,
        }
    }
}

impl LimitParams {
    pub fn validate(&self) -> Result<(), AlgebraError> {
        if self.finite_budget == 0 || self.limit_budget == 0 || self.n0_max == 0 || self.d_max == 0
        {
            return Err(AlgebraError::InvalidParams(format!(
                "all budgets must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// How a limit stage is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// Clopen join `Cl(⋃)` / meet `Int(⋂)`.
    Clopen,
    /// Plain union / intersection (standard powerset semantics).
    Plain,
}

/// Eventual translation pattern `Δ_{n+1} = Δ_n + step` for `n ≥ start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementPattern {
    pub start: usize,
    pub step: u64,
    pub residues: BTreeSet<u64>,
}

/// Result of taking the limit of a monotone chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLimit {
    /// The computed stages `F_0, F_1, …` (without a repeated final stage).
    pub stages: Vec<SetDescriptor>,
    /// The limit: the stable value, or the join/meet at the limit ordinal.
    pub value: SetDescriptor,
    /// `true` when the chain became constant within budget.
    pub stabilized: bool,
    pub pattern: Option<IncrementPattern>,
}

/// Join of an increasing chain in the clopen algebra (`Cl(⋃ F_k)`).
pub fn join_of_chain<E, I>(stages: I, params: &LimitParams) -> Result<ChainLimit, E>
where
    I: IntoIterator<Item = Result<SetDescriptor, E>>,
    E: From<AlgebraError>,
{
    increasing_limit(stages, params, LimitMode::Clopen)
}

/// Meet of a decreasing chain in the clopen algebra (`Int(⋂ F_k)`).
pub fn meet_of_chain<E, I>(stages: I, params: &LimitParams) -> Result<ChainLimit, E>
where
    I: IntoIterator<Item = Result<SetDescriptor, E>>,
    E: From<AlgebraError>,
{
    decreasing_limit(stages, params, LimitMode::Clopen)
}

/// Limit of an increasing chain: clopen join or plain union.
pub fn increasing_limit<E, I>(
    stages: I,
    params: &LimitParams,
    mode: LimitMode,
) -> Result<ChainLimit, E>
where
    I: IntoIterator<Item = Result<SetDescriptor, E>>,
    E: From<AlgebraError>,
{
    increasing_core(stages, params, mode).map_err(ChainFailure::into_stage_error)
}

/// Limit of a decreasing chain: clopen meet or plain intersection,
/// computed as the complement of the limit of the complements.
pub fn decreasing_limit<E, I>(
    stages: I,
    params: &LimitParams,
    mode: LimitMode,
) -> Result<ChainLimit, E>
where
    I: IntoIterator<Item = Result<SetDescriptor, E>>,
    E: From<AlgebraError>,
{
    let complemented = stages.into_iter().map(|s| s.map(|d| d.complement()));
    let up = increasing_core(complemented, params, mode).map_err(|failure| match failure {
        ChainFailure::Algebra(AlgebraError::JoinUndefined { union }) => {
            E::from(AlgebraError::MeetUndefined {
                intersection: format!("complement of {union}"),
            })
        }
        ChainFailure::Algebra(AlgebraError::NotRepresentable { limit }) => {
            E::from(AlgebraError::NotRepresentable {
                limit: format!("complement of {limit}"),
            })
        }
        other => other.into_stage_error(),
    })?;
    Ok(ChainLimit {
        stages: up.stages.iter().map(SetDescriptor::complement).collect(),
        value: up.value.complement(),
        stabilized: up.stabilized,
        pattern: up.pattern,
    })
}

enum ChainFailure<E> {
    Algebra(AlgebraError),
    Stage(E),
}

impl<E: From<AlgebraError>> ChainFailure<E> {
    fn into_stage_error(self) -> E {
        match self {
            ChainFailure::Algebra(e) => e.into(),
            ChainFailure::Stage(e) => e,
        }
    }
}

impl<E> From<AlgebraError> for ChainFailure<E> {
    fn from(e: AlgebraError) -> Self {
        ChainFailure::Algebra(e)
    }
}

fn increasing_core<E, I>(
    stages: I,
    params: &LimitParams,
    mode: LimitMode,
) -> Result<ChainLimit, ChainFailure<E>>
where
    I: IntoIterator<Item = Result<SetDescriptor, E>>,
{
    params.validate()?;
    let mut iter = stages.into_iter();
    let first = iter
        .next()
        .ok_or(AlgebraError::EmptyChain)?
        .map_err(ChainFailure::Stage)?;
    let carrier = first.carrier();
    // F_0 ..= F_N, with one extra stage on finite carriers to observe stability
    let max_stages = match carrier.kind {
        CarrierKind::Finite(n) => n + 2,
        CarrierKind::OmegaPlus => params.finite_budget + 1,
    };
    let mut computed = vec![first];
    while computed.len() < max_stages {
        let Some(next) = iter.next() else {
            let value = computed.last().cloned().expect("nonempty");
            return Ok(ChainLimit {
                stages: computed,
                value,
                stabilized: true,
                pattern: None,
            });
        };
        let next = next.map_err(ChainFailure::Stage)?;
        let prev = computed.last().expect("nonempty");
        if !prev.is_subset(&next)? {
            return Err(AlgebraError::NotMonotone {
                stage: computed.len(),
            }
            .into());
        }
        if *prev == next {
            return Ok(ChainLimit {
                stages: computed,
                value: next,
                stabilized: true,
                pattern: None,
            });
        }
        computed.push(next);
    }
    if carrier.is_finite() {
        // a strictly increasing chain on n points has at most n + 1 stages
        return Err(AlgebraError::NotMonotone {
            stage: computed.len(),
        }
        .into());
    }
    let undetected = AlgebraError::PatternUndetected {
        stages: computed.len(),
    };
    let (pattern, union) =
        detect_increment_pattern(&computed, params).ok_or(undetected.clone())?;
    let value = match (mode, union) {
        (LimitMode::Clopen, Some(u)) => u.closure(),
        (LimitMode::Plain, Some(u)) => u,
        (LimitMode::Clopen, None) => {
            return Err(AlgebraError::JoinUndefined {
                union: describe_partial_union(&computed, &pattern),
            }
            .into())
        }
        (LimitMode::Plain, None) => {
            return Err(AlgebraError::NotRepresentable {
                limit: describe_partial_union(&computed, &pattern),
            }
            .into())
        }
    };
    for stage in &computed {
        if !stage.is_subset(&value)? {
            return Err(undetected.into());
        }
    }
    if mode == LimitMode::Clopen && !value.is_clopen() {
        return Err(undetected.into());
    }
    Ok(ChainLimit {
        stages: computed,
        value,
        stabilized: false,
        pattern: Some(pattern),
    })
}

/// Finds `start ≤ n0_max` and `step ≤ d_max` with `Δ_{n+1} = Δ_n + step`
/// for every computed increment from `start` on. Returns the pattern and, if
/// the increments meet every residue class mod `step`, the (cofinite) union.
fn detect_increment_pattern(
    stages: &[SetDescriptor],
    params: &LimitParams,
) -> Option<(IncrementPattern, Option<SetDescriptor>)> {
    let deltas: Vec<Option<BTreeSet<u64>>> = stages
        .windows(2)
        .map(|w| {
            let d = w[1].difference(&w[0]).ok()?;
            match (d.mode(), d.has_inf()) {
                (Some(Mode::FiniteNat), false) if !d.is_empty() => d.exceptions().cloned(),
                _ => None,
            }
        })
        .collect();
    let count = deltas.len();
    for start in 0..=params.n0_max {
        // at least three consecutive translations must be observed
        if start + 3 >= count {
            break;
        }
        'step: for step in 1..=params.d_max as u64 {
            for n in start..count - 1 {
                let (Some(a), Some(b)) = (&deltas[n], &deltas[n + 1]) else {
                    continue 'step;
                };
                if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x + step != *y) {
                    continue 'step;
                }
            }
            let base = deltas[start].as_ref().expect("checked above");
            let residues: BTreeSet<u64> = base.iter().map(|a| a % step).collect();
            let pattern = IncrementPattern {
                start,
                step,
                residues: residues.clone(),
            };
            if residues.len() as u64 != step {
                return Some((pattern, None));
            }
            let seed = &stages[start];
            let top = *base.iter().next_back().expect("nonempty increment");
            let exceptions = (0..top).filter(|&m| {
                let in_seed = seed.contains(Point::Nat(m)).unwrap_or(false);
                let reached = base.iter().any(|&a| a <= m && (m - a) % step == 0);
                !in_seed && !reached
            });
            let union = SetDescriptor::cofinite_nat(exceptions, seed.has_inf());
            return Some((pattern, Some(union)));
        }
    }
    None
}

fn describe_partial_union(stages: &[SetDescriptor], pattern: &IncrementPattern) -> String {
    let residues = pattern
        .residues
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{} ∪ {{n ≡ {} mod {}}} (from stage {})",
        stages[pattern.start], residues, pattern.step, pattern.start
    )
}
