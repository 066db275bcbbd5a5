//! The structure induced on exponents: naturals (from 1) with successor,
//! a floored predecessor, the constant 1, and residue predicates `Q[k,n]`.
//!
//! Formulas here describe subsets of `Powers(q)` through the exponent map
//! `q^m -> m`. The module provides translation of equation and congruence
//! predicates into this language, quantifier elimination, a finite-model
//! evaluator, and the complete-type counter.

mod eval;
mod parser;
mod qe;
mod translate;

pub use eval::{n_evaluate, NEvalError, NEvalReport};
pub use parser::{parse_nformula, NParseError};
pub use qe::{qe, QeError};
pub use translate::{translate_congruence, translate_equation, TranslateError};

use crate::formula::Quantifier;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use std::collections::BTreeSet;
use std::fmt;

/// A term `s^m(x)` or `s^m(1)`: a base with an integer shift count
/// (negative shifts compose the floored predecessor, `s^-1(1) = 1`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NTerm {
    pub base: NBase,
    pub shift: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NBase {
    Var(String),
    One,
}

impl NTerm {
    pub fn var(name: impl Into<String>) -> Self {
        NTerm { base: NBase::Var(name.into()), shift: 0 }
    }

    pub fn shifted(name: impl Into<String>, shift: i64) -> Self {
        NTerm { base: NBase::Var(name.into()), shift }
    }

    /// The constant `c >= 1` as `s^(c-1)(1)`.
    pub fn constant(c: u64) -> Self {
        assert!(c >= 1, "domain starts at 1");
        NTerm { base: NBase::One, shift: (c - 1) as i64 }
    }

    pub fn var_name(&self) -> Option<&str> {
        match &self.base {
            NBase::Var(v) => Some(v),
            NBase::One => None,
        }
    }

    /// Constant value when the term has no variable.
    pub fn const_value(&self) -> Option<u64> {
        match self.base {
            NBase::One => Some(1i64.saturating_add(self.shift).max(1) as u64),
            NBase::Var(_) => None,
        }
    }
}

impl fmt::Display for NTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.base, self.shift) {
            (NBase::One, _) => write!(f, "{}", self.const_value().expect("constant")),
            (NBase::Var(v), 0) => write!(f, "{v}"),
            (NBase::Var(v), 1) => write!(f, "s({v})"),
            (NBase::Var(v), m) => write!(f, "s^{m}({v})"),
        }
    }
}

/// Atoms: term equations, disequations, and residue predicates with their
/// negations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NAtom {
    Eq(NTerm, NTerm),
    Neq(NTerm, NTerm),
    Q { k: u64, n: u64, term: NTerm },
    NotQ { k: u64, n: u64, term: NTerm },
}

impl NAtom {
    pub fn q(k: u64, n: u64, term: NTerm) -> Self {
        assert!(n >= 2 && k < n, "Q[k,n] needs 0 <= k < n and n >= 2");
        NAtom::Q { k, n, term }
    }

    pub fn not_q(k: u64, n: u64, term: NTerm) -> Self {
        assert!(n >= 2 && k < n, "Q[k,n] needs 0 <= k < n and n >= 2");
        NAtom::NotQ { k, n, term }
    }

    fn terms(&self) -> Vec<&NTerm> {
        match self {
            NAtom::Eq(a, b) | NAtom::Neq(a, b) => vec![a, b],
            NAtom::Q { term, .. } | NAtom::NotQ { term, .. } => vec![term],
        }
    }
}

impl fmt::Display for NAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NAtom::Eq(a, b) => write!(f, "{a} = {b}"),
            NAtom::Neq(a, b) => write!(f, "{a} != {b}"),
            NAtom::Q { k, n, term } => write!(f, "Q[{k},{n}]({term})"),
            NAtom::NotQ { k, n, term } => write!(f, "!Q[{k},{n}]({term})"),
        }
    }
}

/// Quantified boolean combinations over [`NAtom`]; quantifiers range over
/// the naturals from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NFormula {
    True,
    False,
    Atom(NAtom),
    Not(Box<NFormula>),
    And(Box<NFormula>, Box<NFormula>),
    Or(Box<NFormula>, Box<NFormula>),
    Quant {
        quantifier: Quantifier,
        var: String,
        body: Box<NFormula>,
    },
}

impl NFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: NFormula) -> NFormula {
        NFormula::Not(Box::new(f))
    }
    pub fn and(l: NFormula, r: NFormula) -> NFormula {
        NFormula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: NFormula, r: NFormula) -> NFormula {
        NFormula::Or(Box::new(l), Box::new(r))
    }

    /// Left-leaning conjunction of a list; empty list is `true`.
    pub fn conjunction(parts: Vec<NFormula>) -> NFormula {
        let mut it = parts.into_iter();
        match it.next() {
            None => NFormula::True,
            Some(first) => it.fold(first, NFormula::and),
        }
    }

    /// Left-leaning disjunction of a list; empty list is `false`.
    pub fn disjunction(parts: Vec<NFormula>) -> NFormula {
        let mut it = parts.into_iter();
        match it.next() {
            None => NFormula::False,
            Some(first) => it.fold(first, NFormula::or),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            NFormula::True | NFormula::False | NFormula::Atom(_) => true,
            NFormula::Not(f) => f.is_quantifier_free(),
            NFormula::And(l, r) | NFormula::Or(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            NFormula::Quant { .. } => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &NFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                NFormula::True | NFormula::False => {}
                NFormula::Atom(a) => {
                    for t in a.terms() {
                        if let Some(v) = t.var_name() {
                            if !bound.iter().any(|b| b == v) {
                                out.insert(v.to_string());
                            }
                        }
                    }
                }
                NFormula::Not(g) => walk(g, bound, out),
                NFormula::And(l, r) | NFormula::Or(l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
                NFormula::Quant { var, body, .. } => {
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
}

impl fmt::Display for NFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NFormula::True => write!(f, "true"),
            NFormula::False => write!(f, "false"),
            NFormula::Atom(a) => write!(f, "{a}"),
            NFormula::Not(g) => write!(f, "NOT ({g})"),
            NFormula::And(l, r) => write!(f, "({l} AND {r})"),
            NFormula::Or(l, r) => write!(f, "({l} OR {r})"),
            NFormula::Quant { quantifier, var, body } => {
                let q = match quantifier {
                    Quantifier::All => "ALL",
                    Quantifier::Exists => "EXISTS",
                };
                write!(f, "{q} {var}. ")?;
                match body.as_ref() {
                    NFormula::Atom(_)
                    | NFormula::Quant { .. }
                    | NFormula::True
                    | NFormula::False => write!(f, "{body}"),
                    _ => write!(f, "({body})"),
                }
            }
        }
    }
}

/// Number of maximal consistent selections of one residue per modulus.
///
/// Selections `(k_i mod n_i)` are consistent exactly when they agree on the
/// pairwise gcds; merging moduli one at a time, each new modulus `n`
/// contributes `n / gcd(L, n)` choices independently of the residues fixed
/// so far, so the count telescopes to `lcm(moduli)`.
pub fn count_types(moduli: &[u64]) -> BigUint {
    let mut count = BigUint::one();
    let mut l = BigUint::one();
    for &n in moduli {
        assert!(n >= 2, "moduli must be at least 2");
        let n = BigUint::from(n);
        let g = l.gcd(&n);
        count *= &n / &g;
        l = l * &n / g;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_types_spec_examples() {
        assert_eq!(count_types(&[2]), BigUint::from(2u32));
        assert_eq!(count_types(&[2, 4, 8]), BigUint::from(8u32));
        assert_eq!(count_types(&[2, 3]), BigUint::from(6u32));
    }

    #[test]
    fn count_types_doubling_chain() {
        for d in 1..=10u32 {
            let moduli: Vec<u64> = (1..=d).map(|i| 1u64 << i).collect();
            assert_eq!(count_types(&moduli), BigUint::from(2u64.pow(d)));
        }
    }

    #[test]
    fn count_types_matches_exhaustive_selection_count() {
        // Oracle: enumerate one residue per modulus and check joint
        // solvability by scanning a full period.
        fn brute(moduli: &[u64]) -> u64 {
            let l: u64 = moduli.iter().fold(1, |l, &n| l.lcm(&n));
            let mut count = 0;
            let mut pick = vec![0u64; moduli.len()];
            'outer: loop {
                let consistent =
                    (0..l).any(|x| pick.iter().zip(moduli).all(|(&k, &n)| x % n == k));
                if consistent {
                    count += 1;
                }
                let mut i = moduli.len();
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    if pick[i] + 1 < moduli[i] {
                        pick[i] += 1;
                        continue 'outer;
                    }
                    pick[i] = 0;
                }
            }
            count
        }
        for moduli in [&[2u64, 4][..], &[2, 3], &[4, 6], &[2, 4, 8], &[6, 10], &[3, 5, 9]] {
            assert_eq!(
                count_types(moduli),
                BigUint::from(brute(moduli)),
                "moduli {moduli:?}"
            );
        }
    }

    #[test]
    fn term_display() {
        assert_eq!(NTerm::var("x").to_string(), "x");
        assert_eq!(NTerm::shifted("x", 1).to_string(), "s(x)");
        assert_eq!(NTerm::shifted("x", 4).to_string(), "s^4(x)");
        assert_eq!(NTerm::shifted("x", -2).to_string(), "s^-2(x)");
        assert_eq!(NTerm::constant(1).to_string(), "1");
        assert_eq!(NTerm::constant(7).to_string(), "7");
    }
}
