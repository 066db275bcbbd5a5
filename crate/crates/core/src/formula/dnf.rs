//! Disjunctive normal form for quantifier-free formulas.
//!
//! Negations are pushed to the atoms; a negated congruence `t ≢_n 0` expands
//! into the disjunction of `t - i ≡_n 0` for `i = 1..n-1`, disequalities stay
//! atomic.

use super::{Atom, AtomKind, DNFClause, Formula};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Expanding a negated congruence needs one disjunct per nonzero residue;
/// beyond this cap the expansion is refused rather than allowed to explode.
const NEGATED_MODULUS_CAP: u64 = 65_536;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DnfError {
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("negated congruence modulus {modulus} exceeds the expansion cap {cap}")]
    NegatedModulusTooLarge { modulus: BigUint, cap: u64 },
}

/// Converts a quantifier-free formula to a list of clauses whose disjunction
/// is equivalent to the input on every integer assignment.
pub fn to_dnf(f: &Formula) -> Result<Vec<DNFClause>, DnfError> {
    if !f.is_quantifier_free() {
        return Err(DnfError::NotQuantifierFree);
    }
    let nnf = push_negations(f, false)?;
    let clauses = distribute(&nnf);
    Ok(clauses.into_iter().map(DNFClause::from_atoms).collect())
}

/// NNF tree: atoms under conjunction/disjunction only.
enum Nnf {
    Leaf(Atom),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn push_negations(f: &Formula, negated: bool) -> Result<Nnf, DnfError> {
    match f {
        Formula::Atom(a) => {
            if !negated {
                return Ok(Nnf::Leaf(a.clone()));
            }
            match &a.kind {
                AtomKind::Eq0 => Ok(Nnf::Leaf(Atom::neq0(a.term.clone()))),
                AtomKind::Neq0 => Ok(Nnf::Leaf(Atom::eq0(a.term.clone()))),
                AtomKind::CongruenceZero(n) => {
                    if *n > BigUint::from(NEGATED_MODULUS_CAP) {
                        return Err(DnfError::NegatedModulusTooLarge {
                            modulus: n.clone(),
                            cap: NEGATED_MODULUS_CAP,
                        });
                    }
                    // t ≢_n 0  <=>  t ≡_n 1 ∨ ... ∨ t ≡_n n-1
                    let mut disjuncts = Vec::new();
                    let mut i = BigInt::one();
                    let n_int = BigInt::from(n.clone());
                    while i < n_int {
                        let mut term = a.term.clone();
                        term.add_constant(-&i);
                        disjuncts.push(Nnf::Leaf(Atom::congruence(term, n.clone())));
                        i += 1;
                    }
                    Ok(Nnf::Or(disjuncts))
                }
            }
        }
        Formula::Not(g) => push_negations(g, !negated),
        Formula::And(l, r) => {
            let (l, r) = (push_negations(l, negated)?, push_negations(r, negated)?);
            Ok(if negated { Nnf::Or(vec![l, r]) } else { Nnf::And(vec![l, r]) })
        }
        Formula::Or(l, r) => {
            let (l, r) = (push_negations(l, negated)?, push_negations(r, negated)?);
            Ok(if negated { Nnf::And(vec![l, r]) } else { Nnf::Or(vec![l, r]) })
        }
        Formula::Quant { .. } => Err(DnfError::NotQuantifierFree),
    }
}

fn distribute(n: &Nnf) -> Vec<Vec<Atom>> {
    match n {
        Nnf::Leaf(a) => vec![vec![a.clone()]],
        Nnf::Or(parts) => parts.iter().flat_map(distribute).collect(),
        Nnf::And(parts) => {
            let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
            for p in parts {
                let rhs = distribute(p);
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for left in &acc {
                    for right in &rhs {
                        let mut clause = left.clone();
                        clause.extend(right.iter().cloned());
                        next.push(clause);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

/// Exact truth of a clause list (a disjunction) under a full assignment.
pub fn evaluate_clauses(
    clauses: &[DNFClause],
    env: &BTreeMap<String, BigInt>,
) -> Result<bool, super::EvalError> {
    'clause: for c in clauses {
        for t in &c.equalities {
            if !t.eval(env)?.is_zero() {
                continue 'clause;
            }
        }
        for t in &c.disequalities {
            if t.eval(env)?.is_zero() {
                continue 'clause;
            }
        }
        for (t, n) in &c.congruences {
            if !t.eval(env)?.mod_floor(&BigInt::from(n.clone())).is_zero() {
                continue 'clause;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

pub(crate) fn atom_truth(atom: &Atom, value: &BigInt) -> bool {
    match &atom.kind {
        AtomKind::Eq0 => value.is_zero(),
        AtomKind::Neq0 => !value.is_zero(),
        AtomKind::CongruenceZero(n) => value.mod_floor(&BigInt::from(n.clone())).is_zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{evaluate, parse_formula, EvalOptions, Truth};
    use super::*;
    use crate::sparse::SparseSetDescriptor;

    fn dnf_of(text: &str) -> Vec<DNFClause> {
        to_dnf(&parse_formula(text).unwrap()).unwrap()
    }

    #[test]
    fn negated_congruence_expands() {
        let clauses = dnf_of("NOT (x ≡_3 0)");
        assert_eq!(clauses.len(), 2);
        let printed: Vec<String> = clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(printed, vec!["x - 1 ≡_3 0", "x - 2 ≡_3 0"]);
    }

    #[test]
    fn already_normal_single_clause() {
        let clauses = dnf_of("x = 0");
        assert_eq!(clauses.len(), 1);
        assert_eq!(clauses[0].to_string(), "x = 0");
    }

    #[test]
    fn negated_conjunction() {
        // NOT (x = 0 AND y ≡_2 0) -> (x != 0) OR (y - 1 ≡_2 0)
        let clauses = dnf_of("NOT (x = 0 AND y ≡_2 0)");
        let printed: Vec<String> = clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(printed, vec!["x != 0", "y - 1 ≡_2 0"]);
        // Truth-table check over x, y in {-2..2}.
        let f = parse_formula("NOT (x = 0 AND y ≡_2 0)").unwrap();
        let p = SparseSetDescriptor::powers(2u32.into()).unwrap();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                let env: BTreeMap<String, BigInt> = BTreeMap::from([
                    ("x".to_string(), BigInt::from(x)),
                    ("y".to_string(), BigInt::from(y)),
                ]);
                let direct = evaluate(&f, &env, &p, &EvalOptions::default()).unwrap();
                let via_dnf = evaluate_clauses(&clauses, &env).unwrap();
                assert_eq!(direct.value, Truth::from(via_dnf), "x={x} y={y}");
            }
        }
    }

    #[test]
    fn quantified_input_rejected() {
        let f = parse_formula("EXISTS x. x = 0").unwrap();
        assert_eq!(to_dnf(&f).unwrap_err(), DnfError::NotQuantifierFree);
    }

    #[test]
    fn double_negation() {
        let clauses = dnf_of("NOT (NOT (x = 0))");
        assert_eq!(clauses.len(), 1);
        assert_eq!(clauses[0].to_string(), "x = 0");
    }
}
