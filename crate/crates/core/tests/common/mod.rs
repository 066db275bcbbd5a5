//! Shared seeded generators for the oracle-driven suites.

use num_bigint::BigInt;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use sparith::formula::{Atom, Formula, LinearTerm, Quantifier};
use sparith::induced::{NAtom, NFormula, NTerm};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random quantifier-free formula over up to `max_vars` variables with
/// congruence moduli up to 12 and a bounded atom count.
pub fn random_qf_formula(rng: &mut ChaCha8Rng, max_vars: usize) -> Formula {
    const VARS: [&str; 4] = ["x", "y", "z", "w"];
    let vars = &VARS[..max_vars.clamp(1, 4)];
    gen_qf(rng, vars, 3)
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[&str]) -> LinearTerm {
    let mut t = LinearTerm::zero();
    let n_terms = rng.gen_range(1..=3usize);
    for _ in 0..n_terms {
        let v = vars[rng.gen_range(0..vars.len())];
        let mut c = rng.gen_range(-5i64..=5);
        if c == 0 {
            c = 1;
        }
        t.add_coeff(v.to_string(), BigInt::from(c));
    }
    t.add_constant(BigInt::from(rng.gen_range(-6i64..=6)));
    t
}

fn random_atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> Formula {
    let term = random_term(rng, vars);
    let atom = match rng.gen_range(0..3u8) {
        0 => Atom::eq0(term),
        1 => Atom::neq0(term),
        _ => Atom::congruence(term, rng.gen_range(2u32..=12).into()),
    };
    Formula::Atom(atom)
}

fn gen_qf(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 {
        return random_atom(rng, vars);
    }
    match rng.gen_range(0..100u8) {
        0..=49 => random_atom(rng, vars),
        50..=64 => Formula::not(gen_qf(rng, vars, depth - 1)),
        65..=82 => Formula::and(gen_qf(rng, vars, depth - 1), gen_qf(rng, vars, depth - 1)),
        _ => Formula::or(gen_qf(rng, vars, depth - 1), gen_qf(rng, vars, depth - 1)),
    }
}

/// Random exponent-structure formula with at most `quant_quota` quantifiers,
/// free variables among `x, y, z`, shifts within ±3, moduli up to 12.
pub fn random_nformula(rng: &mut ChaCha8Rng, quant_quota: usize) -> NFormula {
    let mut scope: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
    let mut quota = quant_quota;
    let mut fresh = 0usize;
    gen_n(rng, &mut scope, &mut quota, &mut fresh, 3)
}

fn random_nterm(rng: &mut ChaCha8Rng, scope: &[String]) -> NTerm {
    if rng.gen_bool(0.2) {
        NTerm::constant(rng.gen_range(1u64..=12))
    } else {
        let v = scope[rng.gen_range(0..scope.len())].clone();
        NTerm::shifted(v, rng.gen_range(-3i64..=3))
    }
}

fn random_natom(rng: &mut ChaCha8Rng, scope: &[String]) -> NFormula {
    let atom = match rng.gen_range(0..4u8) {
        0 => NAtom::Eq(random_nterm(rng, scope), random_nterm(rng, scope)),
        1 => NAtom::Neq(random_nterm(rng, scope), random_nterm(rng, scope)),
        k => {
            let n = rng.gen_range(2u64..=12);
            let r = rng.gen_range(0..n);
            if k == 2 {
                NAtom::q(r, n, random_nterm(rng, scope))
            } else {
                NAtom::not_q(r, n, random_nterm(rng, scope))
            }
        }
    };
    NFormula::Atom(atom)
}

fn gen_n(
    rng: &mut ChaCha8Rng,
    scope: &mut Vec<String>,
    quota: &mut usize,
    fresh: &mut usize,
    depth: usize,
) -> NFormula {
    if depth == 0 {
        return random_natom(rng, scope);
    }
    let roll = rng.gen_range(0..100u8);
    if roll < 40 {
        random_natom(rng, scope)
    } else if roll < 55 {
        NFormula::not(gen_n(rng, scope, quota, fresh, depth - 1))
    } else if roll < 80 || *quota == 0 {
        let l = gen_n(rng, scope, quota, fresh, depth - 1);
        let r = gen_n(rng, scope, quota, fresh, depth - 1);
        if roll % 2 == 0 {
            NFormula::and(l, r)
        } else {
            NFormula::or(l, r)
        }
    } else {
        *quota -= 1;
        let var = format!("w{fresh}");
        *fresh += 1;
        scope.push(var.clone());
        let body = gen_n(rng, scope, quota, fresh, depth - 1);
        scope.pop();
        let quantifier = if rng.gen_bool(0.5) {
            Quantifier::Exists
        } else {
            Quantifier::All
        };
        NFormula::Quant { quantifier, var, body: Box::new(body) }
    }
}
