//! Linear formulas over the integers with congruence atoms and quantifiers
//! bounded to a sparse predicate `P`.
//!
//! Atoms are kept in the normal shape `t = 0`, `t != 0`, `t ≡_n 0`; a parsed
//! `a ≡_n b` becomes `(a - b) ≡_n 0`.

mod dnf;
mod eval;
mod parser;

pub use dnf::{evaluate_clauses, to_dnf, DnfError};
pub use eval::{evaluate, EvalError, EvalOptions, EvalReport, Truth};
pub use parser::{parse_formula, ParseError};

use num_bigint::BigInt;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A linear term `c1*x1 + ... + ck*xk + d` with arbitrary-precision
/// coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinearTerm {
    coeffs: BTreeMap<String, BigInt>,
    constant: BigInt,
}

impl LinearTerm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        LinearTerm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut t = Self::zero();
        t.add_coeff(name.into(), BigInt::from(1));
        t
    }

    /// Adds `c * name` to the term, dropping the entry if it cancels.
    pub fn add_coeff(&mut self, name: String, c: BigInt) {
        assert!(!name.is_empty(), "variable names must be nonempty");
        let entry = self.coeffs.entry(name.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&name);
        }
    }

    pub fn add_constant(&mut self, c: BigInt) {
        self.constant += c;
    }

    pub fn add(&self, other: &LinearTerm) -> LinearTerm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_coeff(v.clone(), c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn negate(&self) -> LinearTerm {
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
            constant: -&self.constant,
        }
    }

    pub fn sub(&self, other: &LinearTerm) -> LinearTerm {
        self.add(&other.negate())
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&String, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, name: &str) -> BigInt {
        self.coeffs.get(name).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_part(&self) -> &BigInt {
        &self.constant
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Some((name, coeff))` when exactly one variable occurs.
    pub fn as_univariate(&self) -> Option<(&String, &BigInt)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next()
        } else {
            None
        }
    }

    /// Exact value under a full assignment.
    pub fn eval(&self, env: &BTreeMap<String, BigInt>) -> Result<BigInt, EvalError> {
        let mut v = self.constant.clone();
        for (name, c) in &self.coeffs {
            let x = env
                .get(name)
                .ok_or_else(|| EvalError::UnassignedVariable(name.clone()))?;
            v += c * x;
        }
        Ok(v)
    }

    /// Replaces every assigned variable by its value; unassigned ones remain.
    pub fn substitute(&self, env: &BTreeMap<String, BigInt>) -> LinearTerm {
        let mut out = LinearTerm::constant(self.constant.clone());
        for (name, c) in &self.coeffs {
            match env.get(name) {
                Some(x) => out.constant += c * x,
                None => out.add_coeff(name.clone(), c.clone()),
            }
        }
        out
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = BigInt::from(1);
        let minus_one = BigInt::from(-1);
        let mut first = true;
        for (name, c) in &self.coeffs {
            if first {
                if *c == one {
                    write!(f, "{name}")?;
                } else if *c == minus_one {
                    write!(f, "-{name}")?;
                } else {
                    write!(f, "{c}{name}")?;
                }
                first = false;
            } else if c.sign() == num_bigint::Sign::Minus {
                let mag = -c;
                if mag == one {
                    write!(f, " - {name}")?;
                } else {
                    write!(f, " - {mag}{name}")?;
                }
            } else if *c == one {
                write!(f, " + {name}")?;
            } else {
                write!(f, " + {c}{name}")?;
            }
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant.sign() == num_bigint::Sign::Minus {
            write!(f, " - {}", -&self.constant)?;
        } else if !self.constant.is_zero() {
            write!(f, " + {}", self.constant)?;
        }
        Ok(())
    }
}

/// Atom kinds of the normal form: equality with zero, disequality with zero,
/// and congruence to zero for a modulus of at least 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Eq0,
    Neq0,
    CongruenceZero(BigUint),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub kind: AtomKind,
    pub term: LinearTerm,
}

impl Atom {
    pub fn eq0(term: LinearTerm) -> Self {
        Atom { kind: AtomKind::Eq0, term }
    }
    pub fn neq0(term: LinearTerm) -> Self {
        Atom { kind: AtomKind::Neq0, term }
    }
    pub fn congruence(term: LinearTerm, modulus: BigUint) -> Self {
        assert!(modulus >= BigUint::from(2u32), "congruence modulus must be >= 2");
        Atom { kind: AtomKind::CongruenceZero(modulus), term }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AtomKind::Eq0 => write!(f, "{} = 0", self.term),
            AtomKind::Neq0 => write!(f, "{} != 0", self.term),
            AtomKind::CongruenceZero(n) => write!(f, "{} ≡_{} 0", self.term, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Exists,
}

/// Formula tree over atoms; quantifiers are either unrestricted integer
/// quantifiers or bounded to the predicate `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Quant {
        quantifier: Quantifier,
        var: String,
        in_p: bool,
        body: Box<Formula>,
    },
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            Formula::Quant { .. } => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(a) => {
                    for v in a.term.variables() {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.clone());
                        }
                    }
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::And(l, r) | Formula::Or(l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
                Formula::Quant { var, body, .. } => {
                    bound.push(var.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Replaces assigned free variables by constants.
    pub fn substitute(&self, env: &BTreeMap<String, BigInt>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                kind: a.kind.clone(),
                term: a.term.substitute(env),
            }),
            Formula::Not(f) => Formula::not(f.substitute(env)),
            Formula::And(l, r) => Formula::and(l.substitute(env), r.substitute(env)),
            Formula::Or(l, r) => Formula::or(l.substitute(env), r.substitute(env)),
            Formula::Quant { quantifier, var, in_p, body } => {
                // Bound variables shadow the environment.
                let mut inner = env.clone();
                inner.remove(var);
                Formula::Quant {
                    quantifier: *quantifier,
                    var: var.clone(),
                    in_p: *in_p,
                    body: Box::new(body.substitute(&inner)),
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "NOT ({g})"),
            Formula::And(l, r) => write!(f, "({l} AND {r})"),
            Formula::Or(l, r) => write!(f, "({l} OR {r})"),
            Formula::Quant { quantifier, var, in_p, body } => {
                let q = match quantifier {
                    Quantifier::All => "ALL",
                    Quantifier::Exists => "EXISTS",
                };
                if *in_p {
                    write!(f, "{q} {var} IN P. ")?;
                } else {
                    write!(f, "{q} {var}. ")?;
                }
                match body.as_ref() {
                    Formula::Atom(_) | Formula::Quant { .. } => write!(f, "{body}"),
                    _ => write!(f, "({body})"),
                }
            }
        }
    }
}

/// One disjunct of the disjunctive normal form: conjunctions of equalities,
/// disequalities, and congruences, each normalized against zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DNFClause {
    pub equalities: Vec<LinearTerm>,
    pub disequalities: Vec<LinearTerm>,
    pub congruences: Vec<(LinearTerm, BigUint)>,
}

impl DNFClause {
    pub(crate) fn from_atoms(atoms: Vec<Atom>) -> DNFClause {
        let mut clause = DNFClause::default();
        for a in atoms {
            match a.kind {
                AtomKind::Eq0 => clause.equalities.push(a.term),
                AtomKind::Neq0 => clause.disequalities.push(a.term),
                AtomKind::CongruenceZero(n) => clause.congruences.push((a.term, n)),
            }
        }
        clause.equalities.sort();
        clause.equalities.dedup();
        clause.disequalities.sort();
        clause.disequalities.dedup();
        clause.congruences.sort();
        clause.congruences.dedup();
        clause
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self.equalities.iter().cloned().map(Atom::eq0).collect();
        out.extend(self.disequalities.iter().cloned().map(Atom::neq0));
        out.extend(
            self.congruences
                .iter()
                .map(|(t, n)| Atom::congruence(t.clone(), n.clone())),
        );
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.atoms()
            .iter()
            .flat_map(|a| a.term.variables().cloned().collect::<Vec<_>>())
            .collect()
    }
}

impl fmt::Display for DNFClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms().iter().map(|a| a.to_string()).collect();
        if parts.is_empty() {
            write!(f, "true")
        } else {
            write!(f, "{}", parts.join(" AND "))
        }
    }
}
