//! Quantifier elimination for the exponent structure.
//!
//! The procedure works innermost-first on `EXISTS y` over a quantifier-free
//! body (`ALL` goes through negation). The body is normalized to a
//! disjunction of conjunctions of integer-linear literals: floored
//! predecessors are compiled away by case-splitting the affected variable on
//! its small values, so every remaining literal reads exactly over the
//! integers with all variables at least 1.
//!
//! Per clause: an equation pinning `y` is substituted away (with domain
//! guards keeping the witness at 1 or above); otherwise the residue
//! constraints on `y` merge by the Chinese remainder theorem — an
//! inconsistent merge kills the clause, and a consistent one leaves an
//! infinite class from which finitely many disequations cannot bar a
//! witness, so the `y`-part drops.

use super::{NAtom, NBase, NFormula, NTerm};
use crate::formula::Quantifier;
use num_integer::Integer;
use std::collections::BTreeSet;
use thiserror::Error;

/// Caps mirroring desk scale: negated residues expand one disjunct per
/// residue, and a deeply floored term guards one disequation per small value.
const EXPANSION_CAP: u64 = 65_536;
const GUARD_CAP: u64 = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QeError {
    #[error("negated residue predicate modulo {modulus} exceeds the expansion cap {cap}")]
    ExpansionTooLarge { modulus: u64, cap: u64 },
    #[error("merged modulus exceeds the machine range")]
    ModulusOverflow,
    #[error("term shift out of range")]
    ShiftOverflow,
    #[error("floor guard for '{var}' would need {bound} disequations (cap {cap})")]
    GuardBlowup { var: String, bound: u64, cap: u64 },
    #[error("normal form exceeds {cap} clauses")]
    ClauseBlowup { cap: usize },
}

/// Equivalent quantifier-free formula over the same free variables.
pub fn qe(f: &NFormula) -> Result<NFormula, QeError> {
    let g = rec(f)?;
    Ok(simplify(g))
}

fn rec(f: &NFormula) -> Result<NFormula, QeError> {
    match f {
        NFormula::True | NFormula::False | NFormula::Atom(_) => Ok(f.clone()),
        NFormula::Not(g) => Ok(NFormula::not(rec(g)?)),
        NFormula::And(l, r) => Ok(NFormula::and(rec(l)?, rec(r)?)),
        NFormula::Or(l, r) => Ok(NFormula::or(rec(l)?, rec(r)?)),
        NFormula::Quant { quantifier, var, body } => {
            let inner = rec(body)?;
            match quantifier {
                Quantifier::Exists => project_exists(var, &inner),
                Quantifier::All => {
                    let negated = project_exists(var, &NFormula::not(inner))?;
                    Ok(NFormula::not(negated))
                }
            }
        }
    }
}

/// Boolean-constant folding; keeps atoms untouched.
fn simplify(f: NFormula) -> NFormula {
    match f {
        NFormula::Not(g) => match simplify(*g) {
            NFormula::True => NFormula::False,
            NFormula::False => NFormula::True,
            NFormula::Not(h) => *h,
            h => NFormula::not(h),
        },
        NFormula::And(l, r) => match (simplify(*l), simplify(*r)) {
            (NFormula::False, _) | (_, NFormula::False) => NFormula::False,
            (NFormula::True, h) | (h, NFormula::True) => h,
            (a, b) => NFormula::and(a, b),
        },
        NFormula::Or(l, r) => match (simplify(*l), simplify(*r)) {
            (NFormula::True, _) | (_, NFormula::True) => NFormula::True,
            (NFormula::False, h) | (h, NFormula::False) => h,
            (a, b) => NFormula::or(a, b),
        },
        NFormula::Quant { quantifier, var, body } => NFormula::Quant {
            quantifier,
            var,
            body: Box::new(simplify(*body)),
        },
        other => other,
    }
}

/// Integer-linear literals over variables valued in `{1, 2, ...}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum IntAtom {
    T,
    F,
    /// value(a) = value(b) + d, with a < b lexicographically.
    VarEq { a: String, b: String, d: i64 },
    VarNeq { a: String, b: String, d: i64 },
    /// value(x) = c (c >= 1).
    ConstEq { x: String, c: u64 },
    ConstNeq { x: String, c: u64 },
    /// value(x) ≡ k (mod n).
    Q { x: String, k: u64, n: u64 },
}

impl IntAtom {
    fn mentions(&self, v: &str) -> bool {
        match self {
            IntAtom::T | IntAtom::F => false,
            IntAtom::VarEq { a, b, .. } | IntAtom::VarNeq { a, b, .. } => a == v || b == v,
            IntAtom::ConstEq { x, .. } | IntAtom::ConstNeq { x, .. } | IntAtom::Q { x, .. } => {
                x == v
            }
        }
    }
}

fn checked_i64(v: i128) -> Result<i64, QeError> {
    i64::try_from(v).map_err(|_| QeError::ShiftOverflow)
}

/// `a + da = b + db` (or its negation), normalized.
fn var_rel(a: &str, da: i64, b: &str, db: i64, eq: bool) -> Result<IntAtom, QeError> {
    if a == b {
        let holds = da == db;
        return Ok(if holds == eq { IntAtom::T } else { IntAtom::F });
    }
    let (first, second, d) = if a < b {
        (a, b, (db as i128) - (da as i128))
    } else {
        (b, a, (da as i128) - (db as i128))
    };
    let d = checked_i64(d)?;
    Ok(if eq {
        IntAtom::VarEq { a: first.to_string(), b: second.to_string(), d }
    } else {
        IntAtom::VarNeq { a: first.to_string(), b: second.to_string(), d }
    })
}

/// `x + dx = c` (or its negation), normalized; `x >= 1` resolves the
/// out-of-domain cases.
fn const_rel(x: &str, dx: i64, c: i128, eq: bool) -> IntAtom {
    let target = c - dx as i128;
    if target < 1 {
        return if eq { IntAtom::F } else { IntAtom::T };
    }
    match u64::try_from(target) {
        Ok(c) => {
            if eq {
                IntAtom::ConstEq { x: x.to_string(), c }
            } else {
                IntAtom::ConstNeq { x: x.to_string(), c }
            }
        }
        // Beyond u64: no machine-representable value can equal it.
        Err(_) => {
            if eq { IntAtom::F } else { IntAtom::T }
        }
    }
}

/// `x + dx ≡ k (mod n)`, normalized onto the bare variable.
fn q_rel(x: &str, dx: i64, k: u64, n: u64) -> IntAtom {
    let k = (k as i128 - dx as i128).rem_euclid(n as i128) as u64;
    IntAtom::Q { x: x.to_string(), k, n }
}

/// NNF tree over positive atoms (negations resolved, `Q`-negations expanded).
enum Nnf {
    True,
    False,
    Leaf(NAtom),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn expand_not_q(k: u64, n: u64, term: &NTerm) -> Result<Nnf, QeError> {
    if n > EXPANSION_CAP {
        return Err(QeError::ExpansionTooLarge { modulus: n, cap: EXPANSION_CAP });
    }
    Ok(Nnf::Or(
        (0..n)
            .filter(|l| *l != k)
            .map(|l| Nnf::Leaf(NAtom::Q { k: l, n, term: term.clone() }))
            .collect(),
    ))
}

fn nnf(f: &NFormula, negated: bool) -> Result<Nnf, QeError> {
    match f {
        NFormula::True => Ok(if negated { Nnf::False } else { Nnf::True }),
        NFormula::False => Ok(if negated { Nnf::True } else { Nnf::False }),
        NFormula::Atom(a) => match (a, negated) {
            (NAtom::Eq(s, t), false) | (NAtom::Neq(s, t), true) => {
                Ok(Nnf::Leaf(NAtom::Eq(s.clone(), t.clone())))
            }
            (NAtom::Eq(s, t), true) | (NAtom::Neq(s, t), false) => {
                Ok(Nnf::Leaf(NAtom::Neq(s.clone(), t.clone())))
            }
            (NAtom::Q { k, n, term }, false) | (NAtom::NotQ { k, n, term }, true) => {
                Ok(Nnf::Leaf(NAtom::Q { k: *k, n: *n, term: term.clone() }))
            }
            (NAtom::Q { k, n, term }, true) | (NAtom::NotQ { k, n, term }, false) => {
                expand_not_q(*k, *n, term)
            }
        },
        NFormula::Not(g) => nnf(g, !negated),
        NFormula::And(l, r) => {
            let (l, r) = (nnf(l, negated)?, nnf(r, negated)?);
            Ok(if negated { Nnf::Or(vec![l, r]) } else { Nnf::And(vec![l, r]) })
        }
        NFormula::Or(l, r) => {
            let (l, r) = (nnf(l, negated)?, nnf(r, negated)?);
            Ok(if negated { Nnf::And(vec![l, r]) } else { Nnf::Or(vec![l, r]) })
        }
        NFormula::Quant { .. } => unreachable!("projection input is quantifier-free"),
    }
}

/// Variable value substituted into a term: exact, including floors.
fn subst_nterm(t: &NTerm, var: &str, value: u64) -> NTerm {
    match &t.base {
        NBase::Var(v) if v == var => {
            let val = (value as i128 + t.shift as i128).max(1);
            NTerm::constant(u64::try_from(val).unwrap_or(u64::MAX))
        }
        _ => t.clone(),
    }
}

fn subst_natom(a: &NAtom, var: &str, value: u64) -> NAtom {
    match a {
        NAtom::Eq(s, t) => NAtom::Eq(subst_nterm(s, var, value), subst_nterm(t, var, value)),
        NAtom::Neq(s, t) => NAtom::Neq(subst_nterm(s, var, value), subst_nterm(t, var, value)),
        NAtom::Q { k, n, term } => NAtom::Q { k: *k, n: *n, term: subst_nterm(term, var, value) },
        NAtom::NotQ { k, n, term } => {
            NAtom::NotQ { k: *k, n: *n, term: subst_nterm(term, var, value) }
        }
    }
}

/// Most negative shift of any floored occurrence of a variable not yet
/// guarded, lexicographically first such variable.
fn find_floored(a: &NAtom, guarded: &BTreeSet<String>) -> Option<(String, i64)> {
    let mut best: Option<(String, i64)> = None;
    for t in a.terms() {
        if let NBase::Var(v) = &t.base {
            if t.shift < 0 && !guarded.contains(v) {
                best = match best {
                    None => Some((v.clone(), t.shift)),
                    Some((bv, bs)) => {
                        if *v < bv || (*v == bv && t.shift < bs) {
                            Some((v.clone(), t.shift))
                        } else {
                            Some((bv, bs))
                        }
                    }
                };
            }
        }
    }
    best
}

/// Compiles a conjunction of atoms into a disjunction of guarded
/// integer-linear conjunctions. The case split on a floored variable is done
/// once per clause (on its most negative shift anywhere in the clause), so
/// the branch count is bounded by the variables, not the atoms. Guarded
/// variables are known to clear every floor, so their shifted occurrences
/// read as plain integer offsets.
fn defloor_clause(
    atoms: &[NAtom],
    guarded: &BTreeSet<String>,
) -> Result<Vec<Vec<IntAtom>>, QeError> {
    let floored = atoms
        .iter()
        .filter_map(|a| find_floored(a, guarded))
        .min_by(|l, r| l.0.cmp(&r.0).then(l.1.cmp(&r.1)));
    let Some((x, _)) = floored else {
        let mut clause = Vec::with_capacity(atoms.len());
        for a in atoms {
            clause.push(linear_atom(a)?);
        }
        return Ok(vec![clause]);
    };
    // Deepest floor of x across the whole clause.
    let min_shift = atoms
        .iter()
        .flat_map(|a| a.terms())
        .filter(|t| t.var_name() == Some(x.as_str()))
        .map(|t| t.shift)
        .min()
        .expect("x occurs");
    let bound = min_shift.unsigned_abs();
    if bound > GUARD_CAP {
        return Err(QeError::GuardBlowup { var: x, bound, cap: GUARD_CAP });
    }
    let mut out = Vec::new();
    // Small cases: x = j fixes every occurrence numerically.
    for j in 1..=bound {
        let pinned: Vec<NAtom> = atoms.iter().map(|a| subst_natom(a, &x, j)).collect();
        for mut clause in defloor_clause(&pinned, guarded)? {
            clause.insert(0, IntAtom::ConstEq { x: x.clone(), c: j });
            out.push(clause);
        }
    }
    // Large case: x > bound clears the deepest floor.
    let mut next_guarded = guarded.clone();
    next_guarded.insert(x.clone());
    let guards: Vec<IntAtom> = (1..=bound)
        .map(|j| IntAtom::ConstNeq { x: x.clone(), c: j })
        .collect();
    for clause in defloor_clause(atoms, &next_guarded)? {
        let mut with_guards = guards.clone();
        with_guards.extend(clause);
        out.push(with_guards);
    }
    Ok(out)
}

/// A floor-free atom as an integer-linear literal.
fn linear_atom(a: &NAtom) -> Result<IntAtom, QeError> {
    // (variable, offset) or constant value of a term
    fn side(t: &NTerm) -> (Option<String>, i128) {
        match &t.base {
            NBase::Var(v) => (Some(v.clone()), t.shift as i128),
            NBase::One => (None, t.const_value().expect("constant") as i128),
        }
    }
    let rel = |s: &NTerm, t: &NTerm, eq: bool| -> Result<IntAtom, QeError> {
        match (side(s), side(t)) {
            ((Some(a), da), (Some(b), db)) => {
                var_rel(&a, checked_i64(da)?, &b, checked_i64(db)?, eq)
            }
            ((Some(a), da), (None, c)) | ((None, c), (Some(a), da)) => {
                Ok(const_rel(&a, checked_i64(da)?, c, eq))
            }
            ((None, c1), (None, c2)) => Ok(if (c1 == c2) == eq { IntAtom::T } else { IntAtom::F }),
        }
    };
    match a {
        NAtom::Eq(s, t) => rel(s, t, true),
        NAtom::Neq(s, t) => rel(s, t, false),
        NAtom::Q { k, n, term } => match side(term) {
            (Some(x), dx) => Ok(q_rel(&x, checked_i64(dx)?, *k, *n)),
            (None, c) => Ok(if c.rem_euclid(*n as i128) as u64 == *k {
                IntAtom::T
            } else {
                IntAtom::F
            }),
        },
        NAtom::NotQ { .. } => unreachable!("NotQ is expanded during NNF"),
    }
}

/// Two residue predicates on the same term with the same modulus but
/// different residues cannot hold together; pruning them early keeps the
/// clause count from the negated-residue expansions under control.
fn clause_contradicts(atoms: &[NAtom]) -> bool {
    let mut seen: Vec<(&NTerm, u64, u64)> = Vec::new();
    for a in atoms {
        if let NAtom::Q { k, n, term } = a {
            if seen.iter().any(|&(t, sn, sk)| t == term && sn == *n && sk != *k) {
                return true;
            }
            seen.push((term, *n, *k));
        }
    }
    false
}

const CLAUSE_CAP: usize = 2_000_000;

fn nnf_to_natom_clauses(n: &Nnf) -> Result<Vec<Vec<NAtom>>, QeError> {
    match n {
        Nnf::True => Ok(vec![vec![]]),
        Nnf::False => Ok(vec![]),
        Nnf::Leaf(a) => Ok(vec![vec![a.clone()]]),
        Nnf::Or(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(nnf_to_natom_clauses(p)?);
                if out.len() > CLAUSE_CAP {
                    return Err(QeError::ClauseBlowup { cap: CLAUSE_CAP });
                }
            }
            Ok(out)
        }
        Nnf::And(parts) => {
            let mut acc: Vec<Vec<NAtom>> = vec![vec![]];
            for p in parts {
                let rhs = nnf_to_natom_clauses(p)?;
                let mut next = Vec::new();
                for left in &acc {
                    for right in &rhs {
                        let mut clause = left.clone();
                        clause.extend(right.iter().cloned());
                        if !clause_contradicts(&clause) {
                            next.push(clause);
                        }
                        if next.len() > CLAUSE_CAP {
                            return Err(QeError::ClauseBlowup { cap: CLAUSE_CAP });
                        }
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

/// Substitution target for an eliminated variable.
enum Subst {
    Const(u64),
    /// value(y) = value(var) + off
    Shifted { var: String, off: i64 },
}

fn apply_subst(atom: &IntAtom, y: &str, s: &Subst) -> Result<IntAtom, QeError> {
    if !atom.mentions(y) {
        return Ok(atom.clone());
    }
    match (atom, s) {
        (IntAtom::VarEq { a, b, d }, Subst::Const(c)) => {
            // a = b + d
            if a == y {
                Ok(const_rel(b, *d, *c as i128, true))
            } else {
                Ok(const_rel(a, 0, *c as i128 + *d as i128, true))
            }
        }
        (IntAtom::VarNeq { a, b, d }, Subst::Const(c)) => {
            if a == y {
                Ok(const_rel(b, *d, *c as i128, false))
            } else {
                Ok(const_rel(a, 0, *c as i128 + *d as i128, false))
            }
        }
        (IntAtom::VarEq { a, b, d }, Subst::Shifted { var, off }) => {
            if a == y {
                var_rel(var, *off, b, *d, true)
            } else {
                var_rel(a, 0, var, checked_i64(*off as i128 + *d as i128)?, true)
            }
        }
        (IntAtom::VarNeq { a, b, d }, Subst::Shifted { var, off }) => {
            if a == y {
                var_rel(var, *off, b, *d, false)
            } else {
                var_rel(a, 0, var, checked_i64(*off as i128 + *d as i128)?, false)
            }
        }
        (IntAtom::ConstEq { c, .. }, Subst::Const(v)) => {
            Ok(if c == v { IntAtom::T } else { IntAtom::F })
        }
        (IntAtom::ConstNeq { c, .. }, Subst::Const(v)) => {
            Ok(if c == v { IntAtom::F } else { IntAtom::T })
        }
        (IntAtom::ConstEq { c, .. }, Subst::Shifted { var, off }) => {
            Ok(const_rel(var, *off, *c as i128, true))
        }
        (IntAtom::ConstNeq { c, .. }, Subst::Shifted { var, off }) => {
            Ok(const_rel(var, *off, *c as i128, false))
        }
        (IntAtom::Q { k, n, .. }, Subst::Const(v)) => {
            Ok(if v % n == *k { IntAtom::T } else { IntAtom::F })
        }
        (IntAtom::Q { k, n, .. }, Subst::Shifted { var, off }) => Ok(q_rel(var, *off, *k, *n)),
        (IntAtom::T | IntAtom::F, _) => Ok(atom.clone()),
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

/// CRT merge of `x ≡ k1 (n1)` and `x ≡ k2 (n2)`: `Ok(None)` when
/// inconsistent.
fn merge_classes(k1: u64, n1: u64, k2: u64, n2: u64) -> Result<Option<(u64, u64)>, QeError> {
    let g = n1.gcd(&n2);
    if (k1 as i128 - k2 as i128).rem_euclid(g as i128) != 0 {
        return Ok(None);
    }
    let l = (n1 as u128 / g as u128) * n2 as u128;
    let l = u64::try_from(l).map_err(|_| QeError::ModulusOverflow)?;
    let (n1g, n2g) = ((n1 / g) as i128, (n2 / g) as i128);
    let (_, inv, _) = ext_gcd(n1g.rem_euclid(n2g), n2g);
    let t = ((k2 as i128 - k1 as i128) / g as i128 * inv).rem_euclid(n2g.max(1));
    let x = (k1 as i128 + n1 as i128 * t).rem_euclid(l as i128) as u64;
    Ok(Some((x, l)))
}

/// Eliminates `y` from one conjunction of literals; yields the clause's
/// `y`-free equivalent, or nothing when the clause is unsatisfiable.
fn project_clause(y: &str, mut clause: Vec<IntAtom>) -> Result<Option<Vec<IntAtom>>, QeError> {
    loop {
        clause.retain(|a| *a != IntAtom::T);
        if clause.contains(&IntAtom::F) {
            return Ok(None);
        }
        // An equality pinning y?
        let pin = clause.iter().position(|a| match a {
            IntAtom::ConstEq { x, .. } => x == y,
            IntAtom::VarEq { a, b, .. } => a == y || b == y,
            _ => false,
        });
        let Some(i) = pin else { break };
        let atom = clause.remove(i);
        let (subst, guards): (Subst, Vec<IntAtom>) = match atom {
            IntAtom::ConstEq { c, .. } => (Subst::Const(c), Vec::new()),
            IntAtom::VarEq { a, b, d } => {
                // a = b + d
                let (var, off) = if a == y { (b, d) } else { (a, -d) };
                // Witness must stay in the domain: var + off >= 1.
                let guards = if off < 0 {
                    (1..=off.unsigned_abs())
                        .map(|j| IntAtom::ConstNeq { x: var.clone(), c: j })
                        .collect()
                } else {
                    Vec::new()
                };
                (Subst::Shifted { var, off }, guards)
            }
            _ => unreachable!(),
        };
        let mut next = guards;
        for a in &clause {
            next.push(apply_subst(a, y, &subst)?);
        }
        clause = next;
        // y is gone; one more pass cleans constants.
    }
    // No equality on y: merge its residue constraints, drop its
    // disequations — an infinite class always clears finitely many holes.
    let mut merged: Option<(u64, u64)> = None;
    let mut rest = Vec::new();
    for a in clause {
        if !a.mentions(y) {
            rest.push(a);
            continue;
        }
        match a {
            IntAtom::Q { k, n, .. } => {
                merged = match merged {
                    None => Some((k, n)),
                    Some((mk, mn)) => match merge_classes(mk, mn, k, n)? {
                        Some(kn) => Some(kn),
                        None => return Ok(None),
                    },
                };
            }
            IntAtom::VarNeq { .. } | IntAtom::ConstNeq { .. } => {}
            _ => unreachable!("equalities on y were eliminated above"),
        }
    }
    rest.sort();
    rest.dedup();
    Ok(Some(rest))
}

fn int_atom_to_natom(a: &IntAtom) -> NAtom {
    match a {
        IntAtom::VarEq { a, b, d } => {
            if *d >= 0 {
                NAtom::Eq(NTerm::var(a.clone()), NTerm::shifted(b.clone(), *d))
            } else {
                NAtom::Eq(NTerm::var(b.clone()), NTerm::shifted(a.clone(), -*d))
            }
        }
        IntAtom::VarNeq { a, b, d } => {
            if *d >= 0 {
                NAtom::Neq(NTerm::var(a.clone()), NTerm::shifted(b.clone(), *d))
            } else {
                NAtom::Neq(NTerm::var(b.clone()), NTerm::shifted(a.clone(), -*d))
            }
        }
        IntAtom::ConstEq { x, c } => NAtom::Eq(NTerm::var(x.clone()), NTerm::constant(*c)),
        IntAtom::ConstNeq { x, c } => NAtom::Neq(NTerm::var(x.clone()), NTerm::constant(*c)),
        IntAtom::Q { x, k, n } => NAtom::q(*k, *n, NTerm::var(x.clone())),
        IntAtom::T | IntAtom::F => unreachable!("constants are filtered"),
    }
}

fn clauses_to_formula(clauses: Vec<Vec<IntAtom>>) -> NFormula {
    let mut disjuncts = Vec::new();
    for clause in clauses {
        if clause.is_empty() {
            return NFormula::True;
        }
        disjuncts.push(NFormula::conjunction(
            clause.iter().map(|a| NFormula::Atom(int_atom_to_natom(a))).collect(),
        ));
    }
    NFormula::disjunction(disjuncts)
}

fn project_exists(y: &str, body: &NFormula) -> Result<NFormula, QeError> {
    let n = nnf(body, false)?;
    let mut projected = Vec::new();
    for natom_clause in nnf_to_natom_clauses(&n)? {
        for clause in defloor_clause(&natom_clause, &BTreeSet::new())? {
            if let Some(c) = project_clause(y, clause)? {
                projected.push(c);
            }
        }
    }
    projected.sort();
    projected.dedup();
    Ok(clauses_to_formula(projected))
}

#[cfg(test)]
mod tests {
    use super::super::{n_evaluate, parse_nformula};
    use super::*;
    use crate::formula::Truth;
    use std::collections::BTreeMap;

    fn run(text: &str) -> NFormula {
        qe(&parse_nformula(text).unwrap()).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(run("EXISTS y. (y != x AND Q[1,2](y))"), NFormula::True);
        assert_eq!(run("EXISTS y. (Q[0,2](y) AND Q[1,2](y))"), NFormula::False);
        assert_eq!(
            run("EXISTS y. (y = s(x) AND Q[0,2](y))"),
            NFormula::Atom(NAtom::q(1, 2, NTerm::var("x")))
        );
    }

    #[test]
    fn substitution_with_constant() {
        // y = 4 and Q[0,2](y): witness exists; x plays no role.
        assert_eq!(run("EXISTS y. (y = 4 AND Q[0,2](y))"), NFormula::True);
        assert_eq!(run("EXISTS y. (y = 4 AND Q[1,2](y))"), NFormula::False);
    }

    #[test]
    fn domain_guard_on_negative_offset() {
        // y = s^-0 .. y = x - 2 needs x >= 3.
        let f = run("EXISTS y. s(s(y)) = x");
        // Equivalent to x >= 3, i.e. x != 1 and x != 2.
        let mut env = BTreeMap::new();
        for x in 1..=10u64 {
            env.insert("x".to_string(), x);
            let got = n_evaluate(&f, &env, 60).unwrap().value;
            assert_eq!(got, Truth::from(x >= 3), "x={x} via {f}");
        }
    }

    #[test]
    fn universal_quantifier() {
        // ALL y: y ≡ 0 or y ≡ 1 mod 2 — a tautology.
        assert_eq!(run("ALL y. (Q[0,2](y) OR Q[1,2](y))"), NFormula::True);
        // ALL y: y ≡ 0 mod 2 — false.
        assert_eq!(run("ALL y. Q[0,2](y)"), NFormula::False);
        // ALL y: y != x — false (witness y = x).
        assert_eq!(run("ALL y. y != x"), NFormula::False);
    }

    #[test]
    fn output_is_quantifier_free_and_equivalent_on_samples() {
        let texts = [
            "EXISTS y. (y = s(x) AND Q[0,2](y))",
            "EXISTS y. (y = s^-2(x) AND Q[1,3](y))",
            "EXISTS y. (Q[2,4](y) AND Q[0,2](y) AND y != x)",
            "ALL y. (y != s(x) OR Q[1,2](y))",
            "EXISTS y. (y = x OR y = s(z))",
            "ALL y. EXISTS w. (w != y AND Q[1,4](w))",
            "EXISTS y. (s^-1(y) = x AND Q[0,3](y))",
        ];
        for text in texts {
            let f = parse_nformula(text).unwrap();
            let g = qe(&f).unwrap();
            assert!(g.is_quantifier_free(), "{text} -> {g}");
            let mut env = BTreeMap::new();
            for x in 1..=12u64 {
                for z in 1..=6u64 {
                    env.insert("x".to_string(), x);
                    env.insert("z".to_string(), z);
                    // Bound 200 provably covers witnesses for these shapes
                    // (shifts <= 2, moduli <= 4, at most 3 exclusions).
                    let direct = n_evaluate(&f, &env, 200).unwrap().value;
                    let elim = n_evaluate(&g, &env, 200).unwrap().value;
                    if direct.is_determinate() {
                        assert_eq!(direct, elim, "{text} at x={x} z={z}; qe={g}");
                    }
                }
            }
        }
    }

    #[test]
    fn crt_merge_cases() {
        assert_eq!(merge_classes(1, 2, 3, 4).unwrap(), Some((3, 4)));
        assert_eq!(merge_classes(0, 2, 1, 4).unwrap(), None);
        assert_eq!(merge_classes(2, 3, 3, 5).unwrap(), Some((8, 15)));
        assert_eq!(merge_classes(1, 6, 5, 10).unwrap(), Some((25, 30)));
        assert_eq!(merge_classes(1, 6, 2, 10).unwrap(), None);
    }

    #[test]
    fn floored_input_handled_by_case_split() {
        // EXISTS y (y = s^-1(x) ∧ Q[0,2](y)): for x = 1, y = 1 (odd) fails;
        // for x >= 2, y = x-1 must be even.
        let g = run("EXISTS y. (y = s^-1(x) AND Q[0,2](y))");
        let mut env = BTreeMap::new();
        for x in 1..=12u64 {
            env.insert("x".to_string(), x);
            let got = n_evaluate(&g, &env, 100).unwrap().value;
            let want = Truth::from(x >= 2 && (x - 1) % 2 == 0);
            assert_eq!(got, want, "x={x}, qe={g}");
        }
    }
}
