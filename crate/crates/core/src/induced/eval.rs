//! Finite-model evaluation of exponent-structure formulas: quantifiers are
//! scanned over `[1, domain_bound]`, quantifier-free parts are exact.

use super::{NAtom, NBase, NFormula, NTerm};
use crate::formula::{Quantifier, Truth};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NEvalError {
    #[error("unassigned free variable '{0}'")]
    UnassignedVariable(String),
    #[error("assignment for '{0}' must be at least 1")]
    BelowDomain(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NEvalReport {
    pub value: Truth,
    pub notes: Vec<String>,
}

pub(crate) fn nterm_value(t: &NTerm, env: &BTreeMap<String, u64>) -> Result<u64, NEvalError> {
    let base = match &t.base {
        NBase::One => 1,
        NBase::Var(v) => *env
            .get(v)
            .ok_or_else(|| NEvalError::UnassignedVariable(v.clone()))?,
    };
    // Floored composition: negative shifts never descend below 1.
    let v = base as i128 + t.shift as i128;
    Ok(v.max(1) as u64)
}

pub(crate) fn natom_truth(a: &NAtom, env: &BTreeMap<String, u64>) -> Result<bool, NEvalError> {
    Ok(match a {
        NAtom::Eq(s, t) => nterm_value(s, env)? == nterm_value(t, env)?,
        NAtom::Neq(s, t) => nterm_value(s, env)? != nterm_value(t, env)?,
        NAtom::Q { k, n, term } => nterm_value(term, env)? % n == *k,
        NAtom::NotQ { k, n, term } => nterm_value(term, env)? % n != *k,
    })
}

/// Three-valued evaluation with quantifier witnesses confined to
/// `[1, domain_bound]`; exact on quantifier-free formulas.
pub fn n_evaluate(
    f: &NFormula,
    env: &BTreeMap<String, u64>,
    domain_bound: u64,
) -> Result<NEvalReport, NEvalError> {
    for v in f.free_vars() {
        match env.get(&v) {
            None => return Err(NEvalError::UnassignedVariable(v)),
            Some(0) => return Err(NEvalError::BelowDomain(v)),
            Some(_) => {}
        }
    }
    let mut notes = Vec::new();
    let value = rec(f, &mut env.clone(), domain_bound, &mut notes)?;
    Ok(NEvalReport { value, notes })
}

fn rec(
    f: &NFormula,
    env: &mut BTreeMap<String, u64>,
    bound: u64,
    notes: &mut Vec<String>,
) -> Result<Truth, NEvalError> {
    match f {
        NFormula::True => Ok(Truth::True),
        NFormula::False => Ok(Truth::False),
        NFormula::Atom(a) => Ok(natom_truth(a, env)?.into()),
        NFormula::Not(g) => Ok(rec(g, env, bound, notes)?.negate()),
        NFormula::And(l, r) => {
            let lv = rec(l, env, bound, notes)?;
            if lv == Truth::False {
                return Ok(Truth::False);
            }
            Ok(lv.and(rec(r, env, bound, notes)?))
        }
        NFormula::Or(l, r) => {
            let lv = rec(l, env, bound, notes)?;
            if lv == Truth::True {
                return Ok(Truth::True);
            }
            Ok(lv.or(rec(r, env, bound, notes)?))
        }
        NFormula::Quant { quantifier, var, body } => {
            let saved = env.remove(var);
            let mut saw_unknown = false;
            let mut verdict = None;
            for v in 1..=bound {
                env.insert(var.clone(), v);
                let t = rec(body, env, bound, notes)?;
                match (quantifier, t) {
                    (Quantifier::Exists, Truth::True) => {
                        verdict = Some(Truth::True);
                        break;
                    }
                    (Quantifier::All, Truth::False) => {
                        verdict = Some(Truth::False);
                        break;
                    }
                    (_, Truth::Unknown) => saw_unknown = true,
                    _ => {}
                }
            }
            env.remove(var);
            if let Some(old) = saved {
                env.insert(var.clone(), old);
            }
            let _ = saw_unknown;
            match verdict {
                Some(v) => Ok(v),
                None => {
                    let q = match quantifier {
                        Quantifier::All => "ALL",
                        Quantifier::Exists => "EXISTS",
                    };
                    notes.push(format!(
                        "{q} {var} undecided after scanning [1, {bound}]; \
                         the verdict could flip at greater depth"
                    ));
                    Ok(Truth::Unknown)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_nformula;
    use super::*;

    fn env(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn eval(text: &str, e: &[(&str, u64)], bound: u64) -> Truth {
        n_evaluate(&parse_nformula(text).unwrap(), &env(e), bound)
            .unwrap()
            .value
    }

    #[test]
    fn spec_examples() {
        assert_eq!(eval("Q[1,2](x)", &[("x", 7)], 10), Truth::True);
        assert_eq!(eval("x = s(y)", &[("x", 5), ("y", 4)], 10), Truth::True);
        assert_eq!(
            eval("EXISTS y. (y != x AND Q[1,2](y))", &[("x", 3)], 10),
            Truth::True
        );
    }

    #[test]
    fn floored_predecessor() {
        assert_eq!(eval("s^-1(x) = 1", &[("x", 1)], 5), Truth::True);
        assert_eq!(eval("s^-1(x) = 1", &[("x", 2)], 5), Truth::True);
        assert_eq!(eval("s^-1(x) = 1", &[("x", 3)], 5), Truth::False);
        assert_eq!(eval("s^-3(x) = s^-2(x)", &[("x", 2)], 5), Truth::True);
    }

    #[test]
    fn unresolved_quantifier_is_unknown() {
        let f = parse_nformula("EXISTS y. y = s^4(x)").unwrap();
        // Witness would be x+4 = 9, beyond bound 5.
        let r = n_evaluate(&f, &env(&[("x", 5)]), 5).unwrap();
        assert_eq!(r.value, Truth::Unknown);
        assert!(!r.notes.is_empty());
        let r = n_evaluate(&f, &env(&[("x", 5)]), 20).unwrap();
        assert_eq!(r.value, Truth::True);
    }

    #[test]
    fn errors() {
        let f = parse_nformula("Q[0,2](x)").unwrap();
        assert_eq!(
            n_evaluate(&f, &BTreeMap::new(), 5).unwrap_err(),
            NEvalError::UnassignedVariable("x".into())
        );
        assert_eq!(
            n_evaluate(&f, &env(&[("x", 0)]), 5).unwrap_err(),
            NEvalError::BelowDomain("x".into())
        );
    }
}
