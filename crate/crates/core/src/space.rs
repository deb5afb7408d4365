//! Modal space models: a carrier, a point-closed relation and a clopen
//! valuation.
//!
//! On `ℕ ∪ {∞}` the relation is given by a threshold `k`, explicit edges
//! among `{0..k-1} ∪ {∞}` and translation rules for the tail `n ≥ k`:
//! `shift d` (edge `n → n+d` whenever `n+d ≥ 0`), `tailloop` (`n → n`) and
//! `infloop` (`∞ → ∞`). Every successor set is then finite and hence closed,
//! and `◇` acts on the tail by translation, which makes it computable in
//! closed form.
//!
//! The modal-space axiom "`◇U` is clopen for clopen `U`" is checked on a
//! generator family (singletons and tails `co{0..m-1}+inf` for small `m`,
//! plus `∅` and `X`). Because every rule beyond the threshold is a
//! translation, the behaviour of `◇` on larger generators repeats the
//! behaviour on the checked ones. Rules such as `∞ → n` for every tail `n`
//! are deliberately not expressible: with them `◇{m}` would contain `∞`
//! while staying finite, and no finite family of checks could rule that out
//! uniformly. As a second line of defence, [`ModalSpaceModel::diamond`]
//! fails if it ever maps a clopen set to a non-clopen one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::algebra::{AlgebraError, Carrier, CarrierKind, Point, SetDescriptor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("InvalidEdge: {0}")]
    InvalidEdge(String),
    #[error("NonClopenValuation: V({prop}) = {set} is not clopen")]
    NonClopenValuation { prop: String, set: String },
    #[error("ModalAxiomViolated: {0}")]
    ModalAxiomViolated(String),
    #[error("InvalidModel: {0}")]
    Invalid(String),
    #[error("I/O error: {0}")]
    Io(String),
}

/// The relation of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationPresentation {
    /// Adjacency lists over `0..n`.
    Finite { successors: Vec<BTreeSet<usize>> },
    /// Threshold, explicit edges below it and translation rules above it.
    Omega {
        threshold: u64,
        edges: BTreeMap<Point, BTreeSet<Point>>,
        shifts: BTreeSet<i64>,
        tail_loop: bool,
        inf_loop: bool,
    },
}

impl RelationPresentation {
    pub fn finite(
        points: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ModelError> {
        let mut successors = vec![BTreeSet::new(); points];
        for (a, b) in edges {
            if a >= points || b >= points {
                return Err(ModelError::InvalidEdge(format!(
                    "{a} -> {b} leaves the carrier of {points} points"
                )));
            }
            successors[a].insert(b);
        }
        Ok(RelationPresentation::Finite { successors })
    }

    /// The omega relation with threshold `k` and no edges yet.
    pub fn omega(threshold: u64) -> Self {
        RelationPresentation::Omega {
            threshold,
            edges: BTreeMap::new(),
            shifts: BTreeSet::new(),
            tail_loop: false,
            inf_loop: false,
        }
    }

    /// Adds an explicit edge. On the finite carrier both endpoints must be
    /// indices; on the omega carrier both must lie below the threshold or be
    /// `∞`.
    pub fn with_edge(mut self, a: Point, b: Point) -> Result<Self, ModelError> {
        match &mut self {
            RelationPresentation::Finite { successors } => {
                let n = successors.len();
                match (a.index(), b.index()) {
                    (Some(i), Some(j)) if i < n && j < n => {
                        successors[i].insert(j);
                    }
                    _ => {
                        return Err(ModelError::InvalidEdge(format!(
                            "{a} -> {b} leaves the carrier of {n} points"
                        )))
                    }
                }
            }
            RelationPresentation::Omega {
                threshold, edges, ..
            } => {
                let explicit = |p: Point| match p {
                    Point::Nat(n) => n < *threshold,
                    Point::Inf => true,
                };
                if !explicit(a) || !explicit(b) {
                    return Err(ModelError::InvalidEdge(format!(
                        "{a} -> {b}: explicit edges must stay below k={threshold} or use inf"
                    )));
                }
                edges.entry(a).or_default().insert(b);
            }
        }
        Ok(self)
    }

    fn omega_only(&mut self, rule: &str) -> Result<(&mut BTreeSet<i64>, &mut bool, &mut bool), ModelError> {
        match self {
            RelationPresentation::Omega {
                shifts,
                tail_loop,
                inf_loop,
                ..
            } => Ok((shifts, tail_loop, inf_loop)),
            RelationPresentation::Finite { .. } => Err(ModelError::InvalidEdge(format!(
                "`{rule}` is only available on the omega carrier"
            ))),
        }
    }

    pub fn with_shift(mut self, d: i64) -> Result<Self, ModelError> {
        self.omega_only("shift")?.0.insert(d);
        Ok(self)
    }

    pub fn with_tail_loop(mut self) -> Result<Self, ModelError> {
        *self.omega_only("tailloop")?.1 = true;
        Ok(self)
    }

    pub fn with_inf_loop(mut self) -> Result<Self, ModelError> {
        *self.omega_only("infloop")?.2 = true;
        Ok(self)
    }

    /// Largest absolute shift of a tail rule, `0` if there is none.
    pub fn max_shift(&self) -> u64 {
        match self {
            RelationPresentation::Omega { shifts, .. } => {
                shifts.iter().map(|d| d.unsigned_abs()).max().unwrap_or(0)
            }
            RelationPresentation::Finite { .. } => 0,
        }
    }

    /// The threshold `k` (`0` on finite carriers).
    pub fn threshold(&self) -> u64 {
        match self {
            RelationPresentation::Omega { threshold, .. } => *threshold,
            RelationPresentation::Finite { .. } => 0,
        }
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    /// The set or point the check was run on.
    pub subject: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    PointClosed,
    DiamondClopen,
    ValuationClopen,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::PointClosed => "point-closed",
            Axiom::DiamondClopen => "diamond-clopen",
            Axiom::ValuationClopen => "valuation-clopen",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Is every check of the given axiom passing?
    pub fn axiom_passed(&self, axiom: Axiom) -> bool {
        self.checks
            .iter()
            .filter(|c| c.axiom == axiom)
            .all(|c| c.passed)
    }

    fn push(&mut self, axiom: Axiom, subject: String, witness: Option<String>) {
        self.checks.push(AxiomCheck {
            axiom,
            subject,
            passed: witness.is_none(),
            witness,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axiom in [Axiom::PointClosed, Axiom::DiamondClopen, Axiom::ValuationClopen] {
            let checks: Vec<_> = self.checks.iter().filter(|c| c.axiom == axiom).collect();
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
            if failed.is_empty() {
                writeln!(f, "{axiom}: pass ({} checks)", checks.len())?;
            } else {
                writeln!(f, "{axiom}: FAIL ({} of {} checks)", failed.len(), checks.len())?;
                for c in failed {
                    writeln!(
                        f,
                        "  {}: {}",
                        c.subject,
                        c.witness.as_deref().unwrap_or("")
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// A carrier with a relation and a valuation of proposition letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalSpaceModel {
    carrier: Carrier,
    relation: RelationPresentation,
    valuation: BTreeMap<String, SetDescriptor>,
}

impl ModalSpaceModel {
    /// Builds a model. The relation must match the carrier and every
    /// valuation set must be clopen; the modal-space axioms are checked
    /// separately by [`validate`](Self::validate).
    pub fn new(
        carrier: Carrier,
        relation: RelationPresentation,
        valuation: BTreeMap<String, SetDescriptor>,
    ) -> Result<Self, ModelError> {
        match (carrier.kind(), &relation) {
            (CarrierKind::Finite(n), RelationPresentation::Finite { successors })
                if successors.len() == n => {}
            (CarrierKind::OmegaPlus, RelationPresentation::Omega { .. }) => {}
            _ => {
                return Err(ModelError::Invalid(format!(
                    "relation does not fit carrier {carrier}"
                )))
            }
        }
        for (prop, set) in &valuation {
            if set.carrier() != carrier {
                return Err(AlgebraError::CarrierMismatch {
                    left: carrier,
                    right: set.carrier(),
                }
                .into());
            }
            if !set.is_clopen() {
                return Err(ModelError::NonClopenValuation {
                    prop: prop.clone(),
                    set: set.to_string(),
                });
            }
        }
        Ok(ModalSpaceModel {
            carrier,
            relation,
            valuation,
        })
    }

    /// Finite model from an edge list and valuation masks.
    pub fn finite(
        points: usize,
        edges: &[(usize, usize)],
        valuation: &[(&str, &[usize])],
    ) -> Result<Self, ModelError> {
        let carrier = Carrier::finite(points)?;
        let relation = RelationPresentation::finite(points, edges.iter().copied())?;
        let mut val = BTreeMap::new();
        for (prop, members) in valuation {
            let set = SetDescriptor::from_points(
                carrier,
                members.iter().map(|&i| Point::Nat(i as u64)),
            )?;
            val.insert(prop.to_string(), set);
        }
        Self::new(carrier, relation, val)
    }

    /// `ℕ ∪ {∞}` with `n → n-1` for `n ≥ 1`, `∞ → ∞`, and `p = {0}`.
    pub fn countdown() -> Self {
        let relation = RelationPresentation::omega(1)
            .with_shift(-1)
            .and_then(|r| r.with_inf_loop())
            .expect("omega relation");
        let val = BTreeMap::from([("p".to_string(), SetDescriptor::finite_nat([0], false))]);
        Self::new(Carrier::omega(), relation, val).expect("valid model")
    }

    /// `ℕ ∪ {∞}` with `n → n±1`, `∞ → ∞`, and `p = {0}`.
    pub fn two_way_chain() -> Self {
        let relation = RelationPresentation::omega(0)
            .with_shift(1)
            .and_then(|r| r.with_shift(-1))
            .and_then(|r| r.with_inf_loop())
            .expect("omega relation");
        let val = BTreeMap::from([("p".to_string(), SetDescriptor::finite_nat([0], false))]);
        Self::new(Carrier::omega(), relation, val).expect("valid model")
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn relation(&self) -> &RelationPresentation {
        &self.relation
    }

    pub fn valuation(&self) -> &BTreeMap<String, SetDescriptor> {
        &self.valuation
    }

    pub fn prop(&self, name: &str) -> Option<&SetDescriptor> {
        self.valuation.get(name)
    }

    /// Returns the model with `V(prop)` replaced.
    pub fn with_valuation(mut self, prop: &str, set: SetDescriptor) -> Result<Self, ModelError> {
        let mut val = std::mem::take(&mut self.valuation);
        val.insert(prop.to_string(), set);
        Self::new(self.carrier, self.relation, val)
    }

    pub fn empty_set(&self) -> SetDescriptor {
        SetDescriptor::empty(self.carrier)
    }

    pub fn full_set(&self) -> SetDescriptor {
        SetDescriptor::full(self.carrier)
    }

    /// `R(x)`.
    pub fn successors(&self, x: Point) -> Result<SetDescriptor, ModelError> {
        self.carrier.check(x)?;
        Ok(match &self.relation {
            RelationPresentation::Finite { successors } => SetDescriptor::from_points(
                self.carrier,
                successors[x.index().expect("finite point")]
                    .iter()
                    .map(|&j| Point::Nat(j as u64)),
            )?,
            RelationPresentation::Omega {
                threshold,
                edges,
                shifts,
                tail_loop,
                inf_loop,
            } => {
                let mut nats = BTreeSet::new();
                let mut inf = false;
                for q in edges.get(&x).into_iter().flatten() {
                    match q {
                        Point::Nat(n) => {
                            nats.insert(*n);
                        }
                        Point::Inf => inf = true,
                    }
                }
                match x {
                    Point::Inf => inf |= *inf_loop,
                    Point::Nat(n) if n >= *threshold => {
                        for d in shifts {
                            let m = n as i64 + d;
                            if m >= 0 {
                                nats.insert(m as u64);
                            }
                        }
                        if *tail_loop {
                            nats.insert(n);
                        }
                    }
                    Point::Nat(_) => {}
                }
                SetDescriptor::finite_nat(nats, inf)
            }
        })
    }

    /// The explicitly presented points: all points of a finite carrier, or
    /// `{0..k-1} ∪ {∞}` on `ℕ ∪ {∞}`.
    pub fn explicit_points(&self) -> Vec<Point> {
        match (&self.relation, self.carrier.points()) {
            (_, Some(points)) => points,
            (RelationPresentation::Omega { threshold, .. }, None) => (0..*threshold)
                .map(Point::Nat)
                .chain(std::iter::once(Point::Inf))
                .collect(),
            (RelationPresentation::Finite { .. }, None) => unreachable!("checked in new"),
        }
    }

    /// `◇U = {x : R(x) ∩ U ≠ ∅}`, without the clopenness guard.
    pub fn diamond_unchecked(&self, u: &SetDescriptor) -> Result<SetDescriptor, ModelError> {
        if u.carrier() != self.carrier {
            return Err(AlgebraError::CarrierMismatch {
                left: self.carrier,
                right: u.carrier(),
            }
            .into());
        }
        match &self.relation {
            RelationPresentation::Finite { successors } => {
                let mut hits = Vec::new();
                for (x, succ) in successors.iter().enumerate() {
                    for &y in succ {
                        if u.contains(Point::Nat(y as u64))? {
                            hits.push(Point::Nat(x as u64));
                            break;
                        }
                    }
                }
                Ok(SetDescriptor::from_points(self.carrier, hits)?)
            }
            RelationPresentation::Omega {
                threshold,
                shifts,
                tail_loop,
                ..
            } => {
                let mut nats = Vec::new();
                let mut inf = false;
                for x in self.explicit_points() {
                    if self.successors(x)?.intersects(u)? {
                        match x {
                            Point::Nat(n) => nats.push(n),
                            Point::Inf => inf = true,
                        }
                    }
                }
                let tail = SetDescriptor::nat_tail(*threshold);
                let mut result = SetDescriptor::finite_nat(nats, inf);
                for &d in shifts {
                    let part = u.nat_shift_preimage(d).intersection(&tail)?;
                    result = result.union(&part)?;
                }
                if *tail_loop {
                    result = result.union(&u.intersection(&tail)?)?;
                }
                Ok(result)
            }
        }
    }

    /// `◇U`. Fails if a clopen `U` is sent to a non-clopen set, which can
    /// only happen on a model that does not pass validation.
    pub fn diamond(&self, u: &SetDescriptor) -> Result<SetDescriptor, ModelError> {
        let result = self.diamond_unchecked(u)?;
        if u.is_clopen() && !result.is_clopen() {
            return Err(ModelError::ModalAxiomViolated(format!(
                "diamond of clopen {u} is {result}, which is not clopen"
            )));
        }
        Ok(result)
    }

    /// `□U = ¬◇¬U`.
    pub fn boxed(&self, u: &SetDescriptor) -> Result<SetDescriptor, ModelError> {
        Ok(self.diamond(&u.complement())?.complement())
    }

    /// Clopen sets on which `◇` is checked during validation. On finite
    /// carriers these are the singletons plus `∅` and `X`.
    pub fn generator_family(&self) -> Vec<SetDescriptor> {
        let mut out = vec![self.empty_set(), self.full_set()];
        match self.carrier.size() {
            Some(n) => {
                for i in 0..n {
                    out.push(
                        SetDescriptor::singleton(self.carrier, Point::Nat(i as u64))
                            .expect("in range"),
                    );
                }
            }
            None => {
                let bound = self.relation.threshold() + 2 * self.relation.max_shift() + 2;
                for m in 0..=bound {
                    out.push(SetDescriptor::finite_nat([m], false));
                    out.push(SetDescriptor::cofinite_nat(0..m, true));
                }
            }
        }
        out
    }

    /// Points whose successor sets are checked: every explicit point, plus
    /// a tail representative on `ℕ ∪ {∞}`.
    pub fn representative_points(&self) -> Vec<Point> {
        let mut points = self.explicit_points();
        if !self.carrier.is_finite() {
            points.push(Point::Nat(self.relation.threshold()));
        }
        points
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for x in self.representative_points() {
            let witness = match self.successors(x) {
                Ok(r) if r.is_closed() => None,
                Ok(r) => Some(format!("R({x}) = {r} is not closed")),
                Err(e) => Some(e.to_string()),
            };
            report.push(Axiom::PointClosed, format!("R({x})"), witness);
        }
        for u in self.generator_family() {
            let witness = match self.diamond_unchecked(&u) {
                Ok(d) if d.is_clopen() => None,
                Ok(d) => Some(format!("<>{u} = {d} is not clopen")),
                Err(e) => Some(e.to_string()),
            };
            report.push(Axiom::DiamondClopen, format!("<>{u}"), witness);
        }
        for (prop, set) in &self.valuation {
            let witness = (!set.is_clopen()).then(|| format!("V({prop}) = {set} is not clopen"));
            report.push(Axiom::ValuationClopen, format!("V({prop})"), witness);
        }
        report
    }

    /// The model itself if it passes validation.
    pub fn validated(self) -> Result<Self, ModelError> {
        let report = self.validate();
        if report.passed() {
            Ok(self)
        } else {
            Err(ModelError::Invalid(report.to_string().trim_end().to_string()))
        }
    }

    /// Parses the model file format.
    ///
    /// ```text
    /// carrier omega k=1
    /// shift -1
    /// infloop
    /// val p {0}
    /// ```
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, message: String| ModelError::Parse { line, message };
        let (first, header) = lines
            .next()
            .ok_or_else(|| perr(1, "empty model file".into()))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        let (carrier, mut relation) = match words.as_slice() {
            ["carrier", "finite", n] => {
                let n: usize = n
                    .parse()
                    .map_err(|_| perr(first, format!("bad point count `{n}`")))?;
                let carrier = Carrier::finite(n).map_err(|e| perr(first, e.to_string()))?;
                (carrier, RelationPresentation::finite(n, [])?)
            }
            ["carrier", "omega", k] => {
                let k = k
                    .strip_prefix("k=")
                    .and_then(|k| k.parse::<u64>().ok())
                    .ok_or_else(|| perr(first, format!("expected `k=<n>`, found `{k}`")))?;
                (Carrier::omega(), RelationPresentation::omega(k))
            }
            _ => {
                return Err(perr(
                    first,
                    "expected `carrier finite <n>` or `carrier omega k=<k>`".into(),
                ))
            }
        };
        let mut valuation = BTreeMap::new();
        for (line, text) in lines {
            let words: Vec<&str> = text.split_whitespace().collect();
            let at = |e: ModelError| match e {
                ModelError::Parse { .. } => e,
                other => perr(line, other.to_string()),
            };
            relation = match words.as_slice() {
                ["edge", a, b] => {
                    let a = Point::parse(a).map_err(|e| perr(line, e.to_string()))?;
                    let b = Point::parse(b).map_err(|e| perr(line, e.to_string()))?;
                    relation.with_edge(a, b).map_err(at)?
                }
                ["shift", d] => {
                    let d: i64 = d
                        .parse()
                        .map_err(|_| perr(line, format!("bad shift `{d}`")))?;
                    relation.with_shift(d).map_err(at)?
                }
                ["tailloop"] => relation.with_tail_loop().map_err(at)?,
                ["infloop"] => relation.with_inf_loop().map_err(at)?,
                ["val", prop, rest @ ..] if !rest.is_empty() => {
                    let set = SetDescriptor::parse(carrier, &rest.join(" "))
                        .map_err(|e| perr(line, e.to_string()))?;
                    if valuation.insert(prop.to_string(), set).is_some() {
                        return Err(perr(line, format!("`{prop}` is assigned twice")));
                    }
                    relation
                }
                _ => return Err(perr(line, format!("unrecognised line `{text}`"))),
            };
        }
        Self::new(carrier, relation, valuation)
    }

    pub fn from_file(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Prints the model file format; [`ModalSpaceModel::parse`] reads it back.
impl fmt::Display for ModalSpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.relation {
            RelationPresentation::Finite { successors } => {
                writeln!(f, "carrier finite {}", successors.len())?;
                for (a, succ) in successors.iter().enumerate() {
                    for b in succ {
                        writeln!(f, "edge {a} {b}")?;
                    }
                }
            }
            RelationPresentation::Omega {
                threshold,
                edges,
                shifts,
                tail_loop,
                inf_loop,
            } => {
                writeln!(f, "carrier omega k={threshold}")?;
                for (a, succ) in edges {
                    for b in succ {
                        writeln!(f, "edge {a} {b}")?;
                    }
                }
                for d in shifts {
                    writeln!(f, "shift {d}")?;
                }
                if *tail_loop {
                    writeln!(f, "tailloop")?;
                }
                if *inf_loop {
                    writeln!(f, "infloop")?;
                }
            }
        }
        for (prop, set) in &self.valuation {
            writeln!(f, "val {prop} {set}")?;
        }
        Ok(())
    }
}
