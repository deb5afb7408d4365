//! Modal μ-calculus formulas in negation normal form.
//!
//! Concrete syntax:
//!
//! ```text
//! form  ::= "mu" ID "." form | "nu" ID "." form | disj
//! disj  ::= conj ("\/" conj)*
//! conj  ::= unary ("/\" unary)*
//! unary ::= "<>" unary | "[]" unary | "~" ID | ID | "true" | "false" | "(" form ")"
//! ```
//!
//! Binders extend as far to the right as possible. Negation is only
//! available on proposition names, so every parsed formula is in negation
//! normal form, and a fixpoint variable may not occur negated inside the
//! body of its binder.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("NegativeBoundVar: `{0}` occurs negated inside its own binder")]
    NegativeBoundVar(String),
    #[error("NotClean: {0}")]
    NotClean(String),
}

/// Least or greatest fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Mu,
    Nu,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Mu => "mu",
            Polarity::Nu => "nu",
        })
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mu" => Ok(Polarity::Mu),
            "nu" => Ok(Polarity::Nu),
            other => Err(format!("unknown polarity `{other}` (expected mu or nu)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    NegProp(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Bot,
    Top,
    /// `<> φ`
    Possibly(Box<Formula>),
    /// `[] φ`
    Necessarily(Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn prop(name: &str) -> Self {
        Formula::Prop(name.to_string())
    }

    pub fn neg(name: &str) -> Self {
        Formula::NegProp(name.to_string())
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn possibly(f: Formula) -> Self {
        Formula::Possibly(Box::new(f))
    }

    pub fn necessarily(f: Formula) -> Self {
        Formula::Necessarily(Box::new(f))
    }

    pub fn mu(var: &str, body: Formula) -> Self {
        Formula::Mu(var.to_string(), Box::new(body))
    }

    pub fn nu(var: &str, body: Formula) -> Self {
        Formula::Nu(var.to_string(), Box::new(body))
    }

    pub fn fixpoint(polarity: Polarity, var: &str, body: Formula) -> Self {
        match polarity {
            Polarity::Mu => Formula::mu(var, body),
            Polarity::Nu => Formula::nu(var, body),
        }
    }

    pub fn parse(text: &str) -> Result<Formula, FormulaError> {
        Parser::new(text)?.parse_top()
    }

    /// The binder of a fixpoint formula: `(polarity, variable, body)`.
    pub fn as_fixpoint(&self) -> Option<(Polarity, &str, &Formula)> {
        match self {
            Formula::Mu(v, b) => Some((Polarity::Mu, v, b)),
            Formula::Nu(v, b) => Some((Polarity::Nu, v, b)),
            _ => None,
        }
    }

    fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(l, r) | Formula::Or(l, r) => vec![l, r],
            Formula::Possibly(f) | Formula::Necessarily(f) => vec![f],
            Formula::Mu(_, b) | Formula::Nu(_, b) => vec![b],
            _ => vec![],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Height of the AST; atoms have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn binder_count(&self) -> usize {
        let own = usize::from(self.as_fixpoint().is_some());
        own + self.children().iter().map(|c| c.binder_count()).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prop(p) | Formula::NegProp(p) => {
                if !bound.contains(&p.as_str()) {
                    out.insert(p.clone());
                }
            }
            Formula::Mu(v, b) | Formula::Nu(v, b) => {
                bound.push(v);
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prop(p) | Formula::NegProp(p) => {
                out.insert(p.clone());
            }
            Formula::Mu(v, _) | Formula::Nu(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.all_names(out);
        }
    }

    /// Does `var` occur free under a negation?
    fn negated_free(&self, var: &str) -> bool {
        match self {
            Formula::NegProp(p) => p == var,
            Formula::Mu(v, _) | Formula::Nu(v, _) if v == var => false,
            _ => self.children().iter().any(|c| c.negated_free(var)),
        }
    }

    /// Checks that no fixpoint variable occurs negated in its binder's body.
    pub fn check_positive(&self) -> Result<(), FormulaError> {
        if let Some((_, v, b)) = self.as_fixpoint() {
            if b.negated_free(v) {
                return Err(FormulaError::NegativeBoundVar(v.to_string()));
            }
        }
        self.children().iter().try_for_each(|c| c.check_positive())
    }

    /// No two binders bind the same name and no name is both free and bound.
    pub fn is_clean(&self) -> bool {
        self.clean_violation().is_none()
    }

    fn clean_violation(&self) -> Option<String> {
        let mut binders = Vec::new();
        self.collect_binders(&mut binders);
        let mut seen = BTreeSet::new();
        for b in &binders {
            if !seen.insert(b.clone()) {
                return Some(format!("`{b}` is bound more than once"));
            }
        }
        let free = self.free_vars();
        binders
            .into_iter()
            .find(|b| free.contains(b))
            .map(|b| format!("`{b}` occurs both free and bound"))
    }

    fn collect_binders(&self, out: &mut Vec<String>) {
        if let Some((_, v, _)) = self.as_fixpoint() {
            out.push(v.to_string());
        }
        for c in self.children() {
            c.collect_binders(out);
        }
    }

    /// α-renames binders so that the result is clean. Fresh names append
    /// primes to the original name; binders that are already fresh keep
    /// their name, so a clean formula is returned unchanged.
    pub fn to_clean(&self) -> Formula {
        let mut taken = BTreeSet::new();
        self.all_names(&mut taken);
        let mut used = self.free_vars();
        self.clean_rec(&BTreeMap::new(), &mut used, &mut taken)
    }

    fn clean_rec(
        &self,
        renaming: &BTreeMap<String, String>,
        used: &mut BTreeSet<String>,
        taken: &mut BTreeSet<String>,
    ) -> Formula {
        let rename = |p: &String| renaming.get(p).cloned().unwrap_or_else(|| p.clone());
        match self {
            Formula::Prop(p) => Formula::Prop(rename(p)),
            Formula::NegProp(p) => Formula::NegProp(rename(p)),
            Formula::Bot => Formula::Bot,
            Formula::Top => Formula::Top,
            Formula::And(l, r) => Formula::and(
                l.clean_rec(renaming, used, taken),
                r.clean_rec(renaming, used, taken),
            ),
            Formula::Or(l, r) => Formula::or(
                l.clean_rec(renaming, used, taken),
                r.clean_rec(renaming, used, taken),
            ),
            Formula::Possibly(f) => Formula::possibly(f.clean_rec(renaming, used, taken)),
            Formula::Necessarily(f) => Formula::necessarily(f.clean_rec(renaming, used, taken)),
            Formula::Mu(v, b) | Formula::Nu(v, b) => {
                let fresh = if used.contains(v) {
                    let mut candidate = format!("{v}'");
                    while taken.contains(&candidate) || used.contains(&candidate) {
                        candidate.push('\'');
                    }
                    candidate
                } else {
                    v.clone()
                };
                used.insert(fresh.clone());
                taken.insert(fresh.clone());
                let mut inner = renaming.clone();
                inner.insert(v.clone(), fresh.clone());
                let body = b.clean_rec(&inner, used, taken);
                let polarity = self.as_fixpoint().expect("binder").0;
                Formula::fixpoint(polarity, &fresh, body)
            }
        }
    }

    /// Replaces free occurrences of `var` (positive and negated) by `value`
    /// and `dual` respectively.
    pub fn substitute(&self, var: &str, value: &Formula, dual: &Formula) -> Formula {
        match self {
            Formula::Prop(p) if p == var => value.clone(),
            Formula::NegProp(p) if p == var => dual.clone(),
            Formula::Prop(_) | Formula::NegProp(_) | Formula::Bot | Formula::Top => self.clone(),
            Formula::And(l, r) => Formula::and(
                l.substitute(var, value, dual),
                r.substitute(var, value, dual),
            ),
            Formula::Or(l, r) => Formula::or(
                l.substitute(var, value, dual),
                r.substitute(var, value, dual),
            ),
            Formula::Possibly(f) => Formula::possibly(f.substitute(var, value, dual)),
            Formula::Necessarily(f) => Formula::necessarily(f.substitute(var, value, dual)),
            Formula::Mu(v, _) | Formula::Nu(v, _) if v == var => self.clone(),
            Formula::Mu(v, b) => Formula::mu(v, b.substitute(var, value, dual)),
            Formula::Nu(v, b) => Formula::nu(v, b.substitute(var, value, dual)),
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(..) | Formula::Or(..) | Formula::Mu(..) | Formula::Nu(..) => {
                write!(f, "({self})")
            }
            _ => write!(f, "{self}"),
        }
    }
}

/// Canonical printing; `Formula::parse` inverts it exactly.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::NegProp(p) => write!(f, "~{p}"),
            Formula::Bot => write!(f, "false"),
            Formula::Top => write!(f, "true"),
            Formula::And(l, r) => {
                l.write_operand(f)?;
                write!(f, " /\\ ")?;
                r.write_operand(f)
            }
            Formula::Or(l, r) => {
                l.write_operand(f)?;
                write!(f, " \\/ ")?;
                r.write_operand(f)
            }
            Formula::Possibly(g) => {
                write!(f, "<> ")?;
                g.write_operand(f)
            }
            Formula::Necessarily(g) => {
                write!(f, "[] ")?;
                g.write_operand(f)
            }
            Formula::Mu(v, b) => write!(f, "mu {v}. ({b})"),
            Formula::Nu(v, b) => write!(f, "nu {v}. ({b})"),
        }
    }
}

impl FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Mu,
    Nu,
    Dot,
    Diamond,
    Box,
    And,
    Or,
    Not,
    True,
    False,
    LParen,
    RParen,
    Ident(String),
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Mu => write!(f, "`mu`"),
            Token::Nu => write!(f, "`nu`"),
            Token::Dot => write!(f, "`.`"),
            Token::Diamond => write!(f, "`<>`"),
            Token::Box => write!(f, "`[]`"),
            Token::And => write!(f, "`/\\`"),
            Token::Or => write!(f, "`\\/`"),
            Token::Not => write!(f, "`~`"),
            Token::True => write!(f, "`true`"),
            Token::False => write!(f, "`false`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::End => write!(f, "end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = text.get(i..i + 2);
        let (token, len) = match (c, two) {
            (_, Some("<>")) => (Token::Diamond, 2),
            (_, Some("[]")) => (Token::Box, 2),
            (_, Some("/\\")) => (Token::And, 2),
            (_, Some("\\/")) => (Token::Or, 2),
            ('~', _) => (Token::Not, 1),
            ('.', _) => (Token::Dot, 1),
            ('(', _) => (Token::LParen, 1),
            (')', _) => (Token::RParen, 1),
            (c, _) if c.is_ascii_alphabetic() || c == '_' => {
                let len = text[i..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '\''))
                    .unwrap_or(text.len() - i);
                let word = &text[i..i + len];
                let token = match word {
                    "mu" => Token::Mu,
                    "nu" => Token::Nu,
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word.to_string()),
                };
                (token, len)
            }
            _ => {
                return Err(FormulaError::SyntaxError {
                    position: i,
                    message: format!("unexpected character {c:?}"),
                })
            }
        };
        out.push((i, token));
        i += len;
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, FormulaError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at].1
    }

    fn position(&self) -> usize {
        self.tokens[self.at].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].1.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T, FormulaError> {
        Err(FormulaError::SyntaxError {
            position: self.position(),
            message,
        })
    }

    fn expect(&mut self, want: Token) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn parse_top(&mut self) -> Result<Formula, FormulaError> {
        let f = self.form()?;
        if *self.peek() != Token::End {
            return self.error(format!("unexpected {} after formula", self.peek()));
        }
        Ok(f)
    }

    fn form(&mut self) -> Result<Formula, FormulaError> {
        let polarity = match self.peek() {
            Token::Mu => Polarity::Mu,
            Token::Nu => Polarity::Nu,
            _ => return self.disj(),
        };
        self.bump();
        let var = self.ident()?;
        self.expect(Token::Dot)?;
        let body = self.form()?;
        if body.negated_free(&var) {
            return Err(FormulaError::NegativeBoundVar(var));
        }
        Ok(Formula::fixpoint(polarity, &var, body))
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.conj()?;
        while *self.peek() == Token::Or {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let start = self.position();
        match self.bump() {
            Token::Diamond => Ok(Formula::possibly(self.unary()?)),
            Token::Box => Ok(Formula::necessarily(self.unary()?)),
            Token::Not => match self.peek().clone() {
                Token::Ident(name) => {
                    self.bump();
                    Ok(Formula::NegProp(name))
                }
                other => self.error(format!(
                    "negation applies only to proposition names, found {other}"
                )),
            },
            Token::Ident(name) => Ok(Formula::Prop(name)),
            Token::True => Ok(Formula::Top),
            Token::False => Ok(Formula::Bot),
            Token::LParen => {
                let f = self.form()?;
                self.expect(Token::RParen)?;
                Ok(f)
            }
            other => Err(FormulaError::SyntaxError {
                position: start,
                message: format!("expected a formula, found {other}"),
            }),
        }
    }
}

/// Index of a subformula occurrence: its position in a preorder traversal.
pub type NodeId = usize;

/// One node of the flattened formula; children are referenced by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Prop(String),
    NegProp(String),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Bot,
    Top,
    Possibly(NodeId),
    Necessarily(NodeId),
    Fix(Polarity, String, NodeId),
}

/// Static analysis of a clean formula.
///
/// Subformula occurrences are numbered in preorder, so the root is node `0`
/// and the subtree of node `i` occupies ids `i..subtree_end(i)`.
#[derive(Debug, Clone)]
pub struct FormulaAnalysis {
    formula: Formula,
    nodes: Vec<Node>,
    subtrees: Vec<Formula>,
    subtree_end: Vec<NodeId>,
    free_vars: BTreeSet<String>,
    binding_of: BTreeMap<String, NodeId>,
    order: Vec<String>,
    priority: BTreeMap<String, u32>,
}

impl FormulaAnalysis {
    /// Analyzes a clean, positive formula.
    pub fn new(formula: &Formula) -> Result<Self, FormulaError> {
        if let Some(why) = formula.clean_violation() {
            return Err(FormulaError::NotClean(why));
        }
        formula.check_positive()?;
        let mut analysis = FormulaAnalysis {
            formula: formula.clone(),
            nodes: Vec::new(),
            subtrees: Vec::new(),
            subtree_end: Vec::new(),
            free_vars: formula.free_vars(),
            binding_of: BTreeMap::new(),
            order: Vec::new(),
            priority: BTreeMap::new(),
        };
        analysis.flatten(formula);
        // post-order of binders is a linear extension of the dependency order
        let k = analysis.order.len();
        for (i, var) in analysis.order.clone().into_iter().enumerate() {
            let floor = 2 * (i as u32 + 1);
            let priority = match analysis.polarity(&var).expect("bound") {
                Polarity::Nu => floor,
                Polarity::Mu => floor + 1,
            };
            analysis.priority.insert(var, priority);
        }
        debug_assert_eq!(k, analysis.binding_of.len());
        Ok(analysis)
    }

    fn flatten(&mut self, f: &Formula) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node::Bot);
        self.subtrees.push(f.clone());
        self.subtree_end.push(id);
        let node = match f {
            Formula::Prop(p) => Node::Prop(p.clone()),
            Formula::NegProp(p) => Node::NegProp(p.clone()),
            Formula::Bot => Node::Bot,
            Formula::Top => Node::Top,
            Formula::And(l, r) => {
                let l = self.flatten(l);
                Node::And(l, self.flatten(r))
            }
            Formula::Or(l, r) => {
                let l = self.flatten(l);
                Node::Or(l, self.flatten(r))
            }
            Formula::Possibly(g) => Node::Possibly(self.flatten(g)),
            Formula::Necessarily(g) => Node::Necessarily(self.flatten(g)),
            Formula::Mu(v, b) | Formula::Nu(v, b) => {
                self.binding_of.insert(v.clone(), id);
                let body = self.flatten(b);
                self.order.push(v.clone());
                Node::Fix(f.as_fixpoint().expect("binder").0, v.clone(), body)
            }
        };
        self.nodes[id] = node;
        self.subtree_end[id] = self.nodes.len();
        id
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// The subformula rooted at `id`.
    pub fn subformula(&self, id: NodeId) -> &Formula {
        &self.subtrees[id]
    }

    pub fn subtree_end(&self, id: NodeId) -> NodeId {
        self.subtree_end[id]
    }

    pub fn free_vars(&self) -> &BTreeSet<String> {
        &self.free_vars
    }

    pub fn bound_vars(&self) -> impl Iterator<Item = &str> {
        self.binding_of.keys().map(String::as_str)
    }

    pub fn is_bound(&self, var: &str) -> bool {
        self.binding_of.contains_key(var)
    }

    /// The node of `φ@var`, the fixpoint subformula binding `var`.
    pub fn binding_of(&self, var: &str) -> Option<NodeId> {
        self.binding_of.get(var).copied()
    }

    pub fn polarity(&self, var: &str) -> Option<Polarity> {
        match self.nodes[self.binding_of(var)?] {
            Node::Fix(polarity, ..) => Some(polarity),
            _ => None,
        }
    }

    /// Body of the binder of `var`.
    pub fn body_of(&self, var: &str) -> Option<NodeId> {
        match self.nodes[self.binding_of(var)?] {
            Node::Fix(_, _, body) => Some(body),
            _ => None,
        }
    }

    /// `p ≤ q` iff the binder of `p` lies inside the binder of `q`.
    pub fn depends_leq(&self, p: &str, q: &str) -> bool {
        match (self.binding_of(p), self.binding_of(q)) {
            (Some(a), Some(b)) => b <= a && a < self.subtree_end[b],
            _ => false,
        }
    }

    /// Bound variables in the linear extension used for priorities.
    pub fn priority_order(&self) -> &[String] {
        &self.order
    }

    /// Parity priority of a bound variable: odd for μ, even for ν, strictly
    /// increasing along the dependency order.
    pub fn priority(&self, var: &str) -> Option<u32> {
        self.priority.get(var).copied()
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.values().copied().max().unwrap_or(0)
    }

    /// Does node `id` refer to a bound variable (an unfold position)?
    pub fn bound_occurrence(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id] {
            Node::Prop(p) if self.is_bound(p) => Some(p),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn parses_reachability() {
        assert_eq!(
            p("mu q. (p \\/ <> q)"),
            Formula::mu("q", Formula::or(Formula::prop("p"), Formula::possibly(Formula::prop("q"))))
        );
    }

    #[test]
    fn parses_atomic_negation() {
        assert_eq!(p("~p"), Formula::neg("p"));
    }

    #[test]
    fn rejects_negated_bound_variable() {
        assert_eq!(
            Formula::parse("mu q. ~q"),
            Err(FormulaError::NegativeBoundVar("q".into()))
        );
        assert_eq!(
            Formula::parse("mu q. nu r. (r /\\ <> ~q)"),
            Err(FormulaError::NegativeBoundVar("q".into()))
        );
        // the inner binder owns `q` and sees it negated
        assert!(Formula::parse("mu q. mu q. ~q").is_err());
        // negation of a different name is fine
        assert!(Formula::parse("mu q. (~p \\/ q)").is_ok());
    }

    #[test]
    fn rejects_non_atomic_negation_and_junk() {
        assert!(matches!(
            Formula::parse("~(p /\\ q)"),
            Err(FormulaError::SyntaxError { position: 1, .. })
        ));
        assert!(matches!(Formula::parse("~true"), Err(FormulaError::SyntaxError { .. })));
        assert!(matches!(Formula::parse("p \\/"), Err(FormulaError::SyntaxError { position: 4, .. })));
        assert!(matches!(Formula::parse("p q"), Err(FormulaError::SyntaxError { .. })));
        assert!(matches!(Formula::parse("mu . p"), Err(FormulaError::SyntaxError { .. })));
        assert!(matches!(Formula::parse("p & q"), Err(FormulaError::SyntaxError { position: 2, .. })));
        // binders must be parenthesized inside operators
        assert!(Formula::parse("p \\/ mu q. q").is_err());
        assert!(Formula::parse("p \\/ (mu q. q)").is_ok());
    }

    #[test]
    fn binders_extend_right() {
        assert_eq!(
            p("mu q. p \\/ q"),
            Formula::mu("q", Formula::or(Formula::prop("p"), Formula::prop("q")))
        );
    }

    #[test]
    fn canonical_printing() {
        let f = Formula::mu("q", Formula::or(Formula::prop("p"), Formula::possibly(Formula::prop("q"))));
        assert_eq!(f.to_string(), "mu q. (p \\/ <> q)");
        assert_eq!(Formula::Bot.to_string(), "false");
        assert_eq!(Formula::nu("q", Formula::necessarily(Formula::prop("q"))).to_string(), "nu q. ([] q)");
        let nested = p("(a \\/ b) \\/ (c /\\ <> (mu x. x))");
        assert_eq!(nested.to_string(), "(a \\/ b) \\/ (c /\\ <> (mu x. (x)))");
        assert_eq!(p(&nested.to_string()), nested);
    }

    #[test]
    fn to_clean_renames_duplicate_binders() {
        let f = p("(mu p. <> p) /\\ (mu p. [] p)");
        assert_eq!(f.to_clean(), p("(mu p. <> p) /\\ (mu p'. [] p')"));
        let g = p("p /\\ (mu p. <> p)");
        assert_eq!(g.to_clean(), p("p /\\ (mu p'. <> p')"));
        let clean = p("nu y. mu x. (<> x \\/ [] y)");
        assert_eq!(clean.to_clean(), clean);
        // a prime that is already in use is skipped
        let h = p("p' /\\ (mu p. p) /\\ (nu p. p)");
        let c = h.to_clean();
        assert!(c.is_clean());
        assert_eq!(c, p("p' /\\ (mu p. p) /\\ (nu p''. p'')"));
    }

    #[test]
    fn analysis_of_single_binder() {
        let a = FormulaAnalysis::new(&p("mu q. (p \\/ <> q)")).unwrap();
        assert_eq!(a.binding_of("q"), Some(0));
        assert_eq!(a.priority("q").unwrap() % 2, 1);
        assert_eq!(a.free_vars().iter().collect::<Vec<_>>(), ["p"]);
    }

    /// Brute force: p ≤ q iff the subformula binding p occurs among the
    /// subformulas of the one binding q.
    fn all_subformulas(f: &Formula, out: &mut Vec<Formula>) {
        out.push(f.clone());
        for c in f.children() {
            all_subformulas(c, out);
        }
    }

    #[test]
    fn dependency_order_and_priorities() {
        let f = p("nu y. mu x. (<> x \\/ [] y)");
        let a = FormulaAnalysis::new(&f).unwrap();
        let at_x = a.subformula(a.binding_of("x").unwrap()).clone();
        let at_y = a.subformula(a.binding_of("y").unwrap()).clone();
        let mut subs = Vec::new();
        all_subformulas(&at_y, &mut subs);
        assert!(subs.contains(&at_x));
        assert!(a.depends_leq("x", "y"));
        assert!(!a.depends_leq("y", "x"));
        let (px, py) = (a.priority("x").unwrap(), a.priority("y").unwrap());
        assert!(px < py && px % 2 == 1 && py % 2 == 0);

        let g = p("(mu x. <> x) \\/ (mu y. <> y)");
        let b = FormulaAnalysis::new(&g).unwrap();
        assert!(!b.depends_leq("x", "y") && !b.depends_leq("y", "x"));
    }

    #[test]
    fn analysis_requires_clean_input() {
        assert!(matches!(
            FormulaAnalysis::new(&p("(mu p. <> p) /\\ (mu p. [] p)")),
            Err(FormulaError::NotClean(_))
        ));
        assert!(matches!(
            FormulaAnalysis::new(&p("p /\\ (mu p. p)")),
            Err(FormulaError::NotClean(_))
        ));
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::prop),
            prop::sample::select(vec!["p", "q"]).prop_map(Formula::neg),
            Just(Formula::Top),
            Just(Formula::Bot),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                inner.clone().prop_map(Formula::possibly),
                inner.clone().prop_map(Formula::necessarily),
                (prop::sample::select(vec!["x", "y", "r"]), inner.clone())
                    .prop_map(|(v, b)| Formula::mu(v, b)),
                (prop::sample::select(vec!["x", "y", "r"]), inner)
                    .prop_map(|(v, b)| Formula::nu(v, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            prop_assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn to_clean_is_clean_and_idempotent(f in arb_formula()) {
            let c = f.to_clean();
            prop_assert!(c.is_clean());
            prop_assert_eq!(c.to_clean(), c.clone());
            prop_assert_eq!(c.free_vars(), f.free_vars());
            prop_assert_eq!(c.size(), f.size());
        }

        #[test]
        fn priorities_respect_dependency(f in arb_formula()) {
            let c = f.to_clean();
            if c.check_positive().is_ok() {
                let a = FormulaAnalysis::new(&c).unwrap();
                let vars: Vec<String> = a.bound_vars().map(String::from).collect();
                for x in &vars {
                    let px = a.priority(x).unwrap();
                    prop_assert_eq!(px % 2 == 1, a.polarity(x) == Some(Polarity::Mu));
                    for y in &vars {
                        if x != y && a.depends_leq(x, y) {
                            prop_assert!(px < a.priority(y).unwrap());
                        }
                    }
                }
            }
        }
    }
}
