//! Translation of equation and congruence predicates on `Powers(q)` into the
//! exponent structure, through the map `q^m -> m`.

use super::{NAtom, NFormula, NTerm};
use crate::equations::{solve_powers, EquationError, EquationSpec};
use crate::exponent::{power_residue_class, ExponentClassSet, ExponentError};
use crate::formula::LinearTerm;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("congruence translation needs exactly one variable, got {0}")]
    NotUnivariate(usize),
    #[error("modulus {0} too large for exact translation")]
    ModulusTooLarge(BigUint),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

/// The solution set of a homogeneous equation over `Powers(q)^n`, expressed
/// on exponents: each scale orbit with base `(e1,...,en)` becomes
/// `x_i = s^(e_i - e_1)(x_1)` for all `i`, with `x_1 != 1, ..., e_1 - 1`
/// keeping the base coordinate at or above its base exponent (this also
/// keeps every shift clear of the predecessor floor).
pub fn translate_equation(eq: &EquationSpec, q: &BigUint) -> Result<NFormula, TranslateError> {
    let families = solve_powers(eq, q)?;
    let vars = eq.variables();
    let mut disjuncts = Vec::new();
    for fam in &families {
        let exps = &fam.base_exponents;
        let e1 = exps[0];
        let mut parts = Vec::new();
        for (i, &ei) in exps.iter().enumerate().skip(1) {
            let shift = ei as i64 - e1 as i64;
            parts.push(NFormula::Atom(NAtom::Eq(
                NTerm::var(vars[i].clone()),
                NTerm::shifted(vars[0].clone(), shift),
            )));
        }
        for j in 1..e1 {
            parts.push(NFormula::Atom(NAtom::Neq(
                NTerm::var(vars[0].clone()),
                NTerm::constant(j),
            )));
        }
        disjuncts.push(NFormula::conjunction(parts));
    }
    Ok(NFormula::disjunction(disjuncts))
}

/// Residue loops are attempted only below this modulus.
const TRANSLATE_MODULUS_CAP: u64 = 1_000_000;

/// The set `{x ∈ Powers(q) : c*x + d ≡ 0 (mod l)}` on exponents: a finite
/// disjunction of residue predicates and explicit equalities/disequalities.
pub fn translate_congruence(
    term: &LinearTerm,
    modulus: &BigUint,
    q: &BigUint,
) -> Result<NFormula, TranslateError> {
    let var_count = term.variables().count();
    let (var, coeff) = term
        .as_univariate()
        .ok_or(TranslateError::NotUnivariate(var_count))?;
    let n64 = modulus
        .to_u64()
        .filter(|n| *n <= TRANSLATE_MODULUS_CAP)
        .ok_or_else(|| TranslateError::ModulusTooLarge(modulus.clone()))?;
    let n_int = BigInt::from(n64);
    let mut class = ExponentClassSet::empty();
    for r in 0..n64 {
        let value = coeff * BigInt::from(r) + term.constant_part();
        if value.mod_floor(&n_int).is_zero() {
            class = class.union(&power_residue_class(q, &BigUint::from(r), modulus)?);
        }
    }
    Ok(exponent_class_to_nformula(&class, var))
}

/// Renders an exponent set as a formula in one variable.
pub fn exponent_class_to_nformula(class: &ExponentClassSet, var: &str) -> NFormula {
    let mut disjuncts = Vec::new();
    for &e in &class.exceptional {
        disjuncts.push(NFormula::Atom(NAtom::Eq(NTerm::var(var), NTerm::constant(e))));
    }
    for p in &class.progressions {
        let mut parts = Vec::new();
        if p.step > 1 {
            parts.push(NFormula::Atom(NAtom::q(p.start % p.step, p.step, NTerm::var(var))));
        }
        // Class members below the start are excluded explicitly.
        let mut j = p.start % p.step;
        if j == 0 {
            j = p.step;
        }
        while j < p.start {
            parts.push(NFormula::Atom(NAtom::Neq(NTerm::var(var), NTerm::constant(j))));
            j += p.step;
        }
        disjuncts.push(NFormula::conjunction(parts));
    }
    NFormula::disjunction(disjuncts)
}

#[cfg(test)]
mod tests {
    use super::super::n_evaluate;
    use super::*;
    use crate::equations::brute_force_solutions;
    use crate::formula::Truth;
    use crate::sparse::SparseSetDescriptor;
    use std::collections::BTreeMap;

    fn eq(coeffs: &[i64]) -> EquationSpec {
        EquationSpec::new(coeffs.iter().map(|&k| BigInt::from(k)).collect()).unwrap()
    }

    fn term(c: i64, d: i64) -> LinearTerm {
        let mut t = LinearTerm::zero();
        t.add_coeff("x".into(), BigInt::from(c));
        t.add_constant(BigInt::from(d));
        t
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn equation_spec_examples() {
        let f = translate_equation(&eq(&[1, 1, -1]), &big(2)).unwrap();
        assert_eq!(f.to_string(), "(x2 = x1 AND x3 = s(x1))");

        let f = translate_equation(&eq(&[2, -3]), &big(5)).unwrap();
        assert_eq!(f, NFormula::False);

        let f = translate_equation(&eq(&[1, -1]), &big(3)).unwrap();
        assert_eq!(f.to_string(), "x2 = x1");
    }

    #[test]
    fn congruence_spec_examples() {
        // x ≡ 1 (mod 5) over powers of 2: exponents ≡ 0 (mod 4).
        let f = translate_congruence(&term(1, -1), &big(5), &big(2)).unwrap();
        assert_eq!(f.to_string(), "Q[0,4](x)");

        // x ≡ 0 (mod 4) over powers of 2: every exponent but 1.
        let f = translate_congruence(&term(1, 0), &big(4), &big(2)).unwrap();
        assert_eq!(f.to_string(), "x != 1");

        // x ≡ 3 (mod 6) over powers of 2: empty.
        let f = translate_congruence(&term(1, -3), &big(6), &big(2)).unwrap();
        assert_eq!(f, NFormula::False);
    }

    #[test]
    fn congruence_matches_scan() {
        for (c, d, n, q) in [
            (1i64, -1i64, 5u64, 2u64),
            (1, 0, 4, 2),
            (1, -3, 6, 2),
            (3, -1, 7, 2),
            (1, -2, 12, 10),
            (5, 0, 9, 3),
        ] {
            let f = translate_congruence(&term(c, d), &big(n), &big(q)).unwrap();
            let mut env = BTreeMap::new();
            let mut power = BigInt::from(q);
            for m in 1..=500u64 {
                let val = BigInt::from(c) * &power + BigInt::from(d);
                let want = val.mod_floor(&BigInt::from(n)).is_zero();
                env.insert("x".to_string(), m);
                let got = n_evaluate(&f, &env, 10).unwrap().value;
                assert_eq!(got, Truth::from(want), "c={c} d={d} n={n} q={q} m={m}");
                power *= q as i64;
            }
        }
    }

    #[test]
    fn equation_translation_matches_brute_force() {
        for coeffs in [&[1i64, 1, -1][..], &[3, -1], &[1, -3], &[2, 2, -1]] {
            for q in [2u64, 3] {
                let e = eq(coeffs);
                let f = translate_equation(&e, &big(q)).unwrap();
                let s = SparseSetDescriptor::powers(big(q)).unwrap();
                let brute = brute_force_solutions(&e, &s, 12).unwrap();
                let solutions: std::collections::BTreeSet<Vec<u64>> = brute
                    .iter()
                    .map(|tuple| {
                        tuple
                            .iter()
                            .map(|v| s.index_of(v).expect("grid element") + 1)
                            .collect()
                    })
                    .collect();
                // check every exponent tuple in [1,12]^n
                let n = e.arity();
                let mut idx = vec![1u64; n];
                loop {
                    let mut env = BTreeMap::new();
                    for (i, &m) in idx.iter().enumerate() {
                        env.insert(format!("x{}", i + 1), m);
                    }
                    let got = n_evaluate(&f, &env, 5).unwrap().value;
                    let want = solutions.contains(&idx);
                    assert_eq!(
                        got,
                        Truth::from(want),
                        "coeffs={coeffs:?} q={q} exponents={idx:?} formula={f}"
                    );
                    let mut i = n;
                    let mut done = false;
                    loop {
                        if i == 0 {
                            done = true;
                            break;
                        }
                        i -= 1;
                        if idx[i] < 12 {
                            idx[i] += 1;
                            break;
                        }
                        idx[i] = 1;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn multivariate_congruence_rejected() {
        let mut t = LinearTerm::zero();
        t.add_coeff("x".into(), BigInt::from(1));
        t.add_coeff("y".into(), BigInt::from(1));
        assert_eq!(
            translate_congruence(&t, &big(5), &big(2)).unwrap_err(),
            TranslateError::NotUnivariate(2)
        );
    }
}
