//! Three-valued evaluation of formulas against a sparse interpretation of `P`.
//!
//! Quantifier-free parts are exact. A quantifier bounded to `P` whose body is
//! quantifier-free in the bound variable alone is decided exactly by residue
//! analysis of the set; otherwise the first `p_depth` elements are scanned
//! and an undecided quantifier reports `Unknown` with a stabilization note.

use super::dnf::atom_truth;
use super::{Atom, AtomKind, Formula, Quantifier};
use crate::exponent::{fac_class_indices, power_residue_class, ExponentClassSet};
use crate::sparse::{SparseSetDescriptor, SparseSetError};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unassigned free variable '{0}'")]
    UnassignedVariable(String),
    #[error("unrestricted quantifier requires an explicit integer range")]
    UnboundedQuantifier,
    #[error(transparent)]
    Set(#[from] SparseSetError),
}

/// Kleene three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Truth {
        if b { Truth::True } else { Truth::False }
    }
}

impl Truth {
    pub fn negate(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    pub fn is_determinate(self) -> bool {
        self != Truth::Unknown
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// How many elements of `P` a bounded quantifier scans when no exact
    /// decision applies.
    pub p_depth: usize,
    /// Scan radius for unrestricted integer quantifiers (`0, 1, -1, ..`);
    /// without it an unrestricted quantifier is an error.
    pub int_range: Option<u64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { p_depth: 50, int_range: None }
    }
}

/// Evaluation result plus stabilization notes for quantifiers that were
/// decided exactly or left undecided at the inspected depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub value: Truth,
    pub notes: Vec<String>,
}

pub fn evaluate(
    f: &Formula,
    env: &BTreeMap<String, BigInt>,
    p: &SparseSetDescriptor,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    for v in f.free_vars() {
        if !env.contains_key(&v) {
            return Err(EvalError::UnassignedVariable(v));
        }
    }
    let mut notes = Vec::new();
    let value = eval_rec(f, env, p, opts, &mut notes)?;
    Ok(EvalReport { value, notes })
}

fn eval_rec(
    f: &Formula,
    env: &BTreeMap<String, BigInt>,
    p: &SparseSetDescriptor,
    opts: &EvalOptions,
    notes: &mut Vec<String>,
) -> Result<Truth, EvalError> {
    match f {
        Formula::Atom(a) => Ok(atom_truth(a, &a.term.eval(env)?).into()),
        Formula::Not(g) => Ok(eval_rec(g, env, p, opts, notes)?.negate()),
        Formula::And(l, r) => {
            let lv = eval_rec(l, env, p, opts, notes)?;
            if lv == Truth::False {
                return Ok(Truth::False);
            }
            Ok(lv.and(eval_rec(r, env, p, opts, notes)?))
        }
        Formula::Or(l, r) => {
            let lv = eval_rec(l, env, p, opts, notes)?;
            if lv == Truth::True {
                return Ok(Truth::True);
            }
            Ok(lv.or(eval_rec(r, env, p, opts, notes)?))
        }
        Formula::Quant { quantifier, var, in_p: true, body } => {
            let mut inner_env = env.clone();
            inner_env.remove(var);
            // Exact route: quantifier-free body over the bound variable alone.
            if body.is_quantifier_free() {
                let substituted = body.substitute(&inner_env);
                let frees = substituted.free_vars();
                if frees.iter().all(|v| v == var) {
                    if let Some(rep) = satisfier_rep(&substituted, var, p) {
                        let (value, how) = match quantifier {
                            Quantifier::Exists => (rep.any(), "some element satisfies the body"),
                            Quantifier::All => (rep.all(), "every element satisfies the body"),
                        };
                        let q = match quantifier {
                            Quantifier::All => "ALL",
                            Quantifier::Exists => "EXISTS",
                        };
                        notes.push(format!(
                            "{q} {var} IN P decided exactly by residue analysis of {p}: {}",
                            if value { how.to_string() } else { format!("not ({how})") }
                        ));
                        return Ok(value.into());
                    }
                }
            }
            // Depth-bounded scan.
            let elems = p.prefix_elements(opts.p_depth)?;
            let exhaustive = p.finite_len().is_some_and(|len| len <= elems.len());
            let mut saw_unknown = false;
            for e in &elems {
                inner_env.insert(var.clone(), BigInt::from(e.clone()));
                let t = eval_rec(body, &inner_env, p, opts, notes)?;
                match (quantifier, t) {
                    (Quantifier::Exists, Truth::True) => return Ok(Truth::True),
                    (Quantifier::All, Truth::False) => return Ok(Truth::False),
                    (_, Truth::Unknown) => saw_unknown = true,
                    _ => {}
                }
            }
            if exhaustive && !saw_unknown {
                return Ok(match quantifier {
                    Quantifier::Exists => Truth::False,
                    Quantifier::All => Truth::True,
                });
            }
            let q = match quantifier {
                Quantifier::All => "ALL",
                Quantifier::Exists => "EXISTS",
            };
            notes.push(format!(
                "{q} {var} IN P undecided after scanning the first {} elements of {p}; \
                 the verdict could flip at greater depth",
                elems.len()
            ));
            Ok(Truth::Unknown)
        }
        Formula::Quant { quantifier, var, in_p: false, body } => {
            let range = opts.int_range.ok_or(EvalError::UnboundedQuantifier)?;
            let mut inner_env = env.clone();
            inner_env.remove(var);
            let mut saw_unknown = false;
            for v in interleaved(range) {
                inner_env.insert(var.clone(), BigInt::from(v));
                let t = eval_rec(body, &inner_env, p, opts, notes)?;
                match (quantifier, t) {
                    (Quantifier::Exists, Truth::True) => return Ok(Truth::True),
                    (Quantifier::All, Truth::False) => return Ok(Truth::False),
                    (_, Truth::Unknown) => saw_unknown = true,
                    _ => {}
                }
            }
            let _ = saw_unknown;
            let q = match quantifier {
                Quantifier::All => "ALL",
                Quantifier::Exists => "EXISTS",
            };
            notes.push(format!(
                "{q} {var} undecided on the integer range [-{range}, {range}]"
            ));
            Ok(Truth::Unknown)
        }
    }
}

/// `0, 1, -1, 2, -2, ...` out to `range`.
fn interleaved(range: u64) -> impl Iterator<Item = i64> {
    (0..=range as i64).flat_map(|v| {
        if v == 0 { vec![0] } else { vec![v, -v] }
    })
}

/// Symbolic representation of `{a ∈ P : body(a)}` for exact decisions.
enum SatisfierRep {
    /// Exponent set for `Powers(q)`, addressing `q^m` by `m >= 1`.
    Powers(ExponentClassSet),
    /// Finite or cofinite index set for `Factorials`.
    Fac { cofinite: bool, exceptions: BTreeSet<u64> },
    /// Per-element truth over a finite explicit list.
    Explicit(Vec<bool>),
}

impl SatisfierRep {
    fn any(&self) -> bool {
        match self {
            SatisfierRep::Powers(s) => !s.is_empty(),
            SatisfierRep::Fac { cofinite, exceptions } => *cofinite || !exceptions.is_empty(),
            SatisfierRep::Explicit(bits) => bits.iter().any(|b| *b),
        }
    }

    fn all(&self) -> bool {
        match self {
            SatisfierRep::Powers(s) => s.is_universal(),
            SatisfierRep::Fac { cofinite, exceptions } => *cofinite && exceptions.is_empty(),
            SatisfierRep::Explicit(bits) => bits.iter().all(|b| *b),
        }
    }

    fn negate(self) -> SatisfierRep {
        match self {
            SatisfierRep::Powers(s) => SatisfierRep::Powers(s.complement()),
            SatisfierRep::Fac { cofinite, exceptions } => {
                SatisfierRep::Fac { cofinite: !cofinite, exceptions }
            }
            SatisfierRep::Explicit(bits) => {
                SatisfierRep::Explicit(bits.into_iter().map(|b| !b).collect())
            }
        }
    }

    fn combine(self, other: SatisfierRep, conj: bool) -> Option<SatisfierRep> {
        match (self, other) {
            (SatisfierRep::Powers(a), SatisfierRep::Powers(b)) => {
                // Guard the canonical-form period against blowup.
                if a.common_step().lcm(&b.common_step()) > 1_000_000 {
                    return None;
                }
                Some(SatisfierRep::Powers(if conj { a.intersect(&b) } else { a.union(&b) }))
            }
            (
                SatisfierRep::Fac { cofinite: ca, exceptions: ea },
                SatisfierRep::Fac { cofinite: cb, exceptions: eb },
            ) => {
                // mem(x) = cofinite ? x ∉ E : x ∈ E
                let (cofinite, exceptions) = match (conj, ca, cb) {
                    (true, true, true) => (true, &ea | &eb),
                    (true, true, false) => (false, &eb - &ea),
                    (true, false, true) => (false, &ea - &eb),
                    (true, false, false) => (false, &ea & &eb),
                    (false, true, true) => (true, &ea & &eb),
                    (false, true, false) => (true, &ea - &eb),
                    (false, false, true) => (true, &eb - &ea),
                    (false, false, false) => (false, &ea | &eb),
                };
                Some(SatisfierRep::Fac { cofinite, exceptions })
            }
            (SatisfierRep::Explicit(a), SatisfierRep::Explicit(b)) => Some(SatisfierRep::Explicit(
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| if conj { *x && *y } else { *x || *y })
                    .collect(),
            )),
            _ => None,
        }
    }
}

/// Builds the satisfier set of a quantifier-free single-variable body, when
/// the set kind admits an exact finite description.
fn satisfier_rep(f: &Formula, var: &str, p: &SparseSetDescriptor) -> Option<SatisfierRep> {
    match f {
        Formula::Atom(a) => atom_rep(a, var, p),
        Formula::Not(g) => Some(satisfier_rep(g, var, p)?.negate()),
        Formula::And(l, r) => {
            satisfier_rep(l, var, p)?.combine(satisfier_rep(r, var, p)?, true)
        }
        Formula::Or(l, r) => {
            satisfier_rep(l, var, p)?.combine(satisfier_rep(r, var, p)?, false)
        }
        Formula::Quant { .. } => None,
    }
}

/// Residue loops are only attempted below this modulus.
const EXACT_MODULUS_CAP: u64 = 100_000;

fn atom_rep(a: &Atom, var: &str, p: &SparseSetDescriptor) -> Option<SatisfierRep> {
    let c = a.term.coefficient(var);
    let d = a.term.constant_part().clone();
    match p {
        SparseSetDescriptor::Powers { base } => {
            let rep = if c.is_zero() {
                if atom_truth(a, &d) {
                    ExponentClassSet::all()
                } else {
                    ExponentClassSet::empty()
                }
            } else {
                match &a.kind {
                    AtomKind::Eq0 => equality_exponents(&c, &d, p),
                    AtomKind::Neq0 => equality_exponents(&c, &d, p).complement(),
                    AtomKind::CongruenceZero(n) => congruence_exponents(&c, &d, n, base)?,
                }
            };
            Some(SatisfierRep::Powers(rep))
        }
        SparseSetDescriptor::Factorials => {
            let rep = if c.is_zero() {
                SatisfierRep::Fac { cofinite: atom_truth(a, &d), exceptions: BTreeSet::new() }
            } else {
                match &a.kind {
                    AtomKind::Eq0 => SatisfierRep::Fac {
                        cofinite: false,
                        exceptions: equality_index(&c, &d, p).into_iter().collect(),
                    },
                    AtomKind::Neq0 => SatisfierRep::Fac {
                        cofinite: true,
                        exceptions: equality_index(&c, &d, p).into_iter().collect(),
                    },
                    AtomKind::CongruenceZero(n) => {
                        let mut acc = SatisfierRep::Fac {
                            cofinite: false,
                            exceptions: BTreeSet::new(),
                        };
                        for r in matching_residues(&c, &d, n)? {
                            let (cofinite, exceptions) = fac_class_indices(&r, n);
                            acc = acc
                                .combine(SatisfierRep::Fac { cofinite, exceptions }, false)?;
                        }
                        acc
                    }
                }
            };
            Some(rep)
        }
        SparseSetDescriptor::Explicit { elements } => {
            let bits = elements
                .iter()
                .map(|e| {
                    let v = &c * BigInt::from(e.clone()) + &d;
                    atom_truth(a, &v)
                })
                .collect();
            Some(SatisfierRep::Explicit(bits))
        }
        SparseSetDescriptor::IteratedPowers { .. } => None,
    }
}

/// Exponents (or indices) solving `c*x + d = 0` within the set: at most one.
fn solve_equality(c: &BigInt, d: &BigInt) -> Option<BigUint> {
    let num = -d;
    let (q, r) = num.div_rem(c);
    if !r.is_zero() || q.is_negative() || q.is_zero() {
        return None;
    }
    Some(q.magnitude().clone())
}

fn equality_exponents(c: &BigInt, d: &BigInt, p: &SparseSetDescriptor) -> ExponentClassSet {
    // x = -d/c must be a set element; its exponent is index + 1.
    let Some(v) = solve_equality(c, d) else {
        return ExponentClassSet::empty();
    };
    match p.index_of(&v) {
        Some(i) => ExponentClassSet {
            exceptional: BTreeSet::from([i + 1]),
            progressions: Vec::new(),
            pre_period: i + 1,
        },
        None => ExponentClassSet::empty(),
    }
}

fn equality_index(c: &BigInt, d: &BigInt, p: &SparseSetDescriptor) -> Option<u64> {
    let v = solve_equality(c, d).or_else(|| {
        // x = 0 is a set element for factorials.
        if d.is_zero() { Some(BigUint::zero()) } else { None }
    })?;
    p.index_of(&v)
}

/// Residues `r` modulo `n` with `c*r + d ≡ 0 (mod n)`.
fn matching_residues(c: &BigInt, d: &BigInt, n: &BigUint) -> Option<Vec<BigUint>> {
    let n64 = n.to_u64()?;
    if n64 > EXACT_MODULUS_CAP {
        return None;
    }
    let n_int = BigInt::from(n.clone());
    let mut out = Vec::new();
    let mut r = BigInt::zero();
    while r < n_int {
        if (c * &r + d).mod_floor(&n_int).is_zero() {
            out.push(r.magnitude().clone());
        }
        r += 1;
    }
    Some(out)
}

fn congruence_exponents(
    c: &BigInt,
    d: &BigInt,
    n: &BigUint,
    base: &BigUint,
) -> Option<ExponentClassSet> {
    let mut acc = ExponentClassSet::empty();
    for r in matching_residues(c, d, n)? {
        let class = power_residue_class(base, &r, n).ok()?;
        if acc.common_step().lcm(&class.common_step()) > 1_000_000 {
            return None;
        }
        acc = acc.union(&class);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> BTreeMap<String, BigInt> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), BigInt::from(*v)))
            .collect()
    }

    fn pow2() -> SparseSetDescriptor {
        SparseSetDescriptor::powers(2u32.into()).unwrap()
    }

    #[test]
    fn quantifier_free_exact() {
        let f = parse_formula("2x - y = 0").unwrap();
        let r = evaluate(&f, &env(&[("x", 3), ("y", 6)]), &pow2(), &EvalOptions::default())
            .unwrap();
        assert_eq!(r.value, Truth::True);
        assert!(r.notes.is_empty());
    }

    #[test]
    fn bounded_exists_finds_power() {
        let f = parse_formula("EXISTS a IN P. a - 8 = 0").unwrap();
        let opts = EvalOptions { p_depth: 5, ..Default::default() };
        let r = evaluate(&f, &BTreeMap::new(), &pow2(), &opts).unwrap();
        assert_eq!(r.value, Truth::True);
    }

    #[test]
    fn bounded_forall_even_powers_decided_exactly() {
        let f = parse_formula("ALL a IN P. a ≡_2 0").unwrap();
        let opts = EvalOptions { p_depth: 10, ..Default::default() };
        let r = evaluate(&f, &BTreeMap::new(), &pow2(), &opts).unwrap();
        assert_eq!(r.value, Truth::True);
        assert!(
            r.notes.iter().any(|n| n.contains("decided exactly")),
            "expected a stabilization note, got {:?}",
            r.notes
        );
    }

    #[test]
    fn bounded_forall_refuted_by_scan() {
        // 2 ≡ 2 mod 3 refutes at the first element.
        let f = parse_formula("ALL a IN P. a ≡_3 1").unwrap();
        let opts = EvalOptions { p_depth: 10, ..Default::default() };
        let r = evaluate(&f, &BTreeMap::new(), &pow2(), &opts).unwrap();
        assert_eq!(r.value, Truth::False);
    }

    #[test]
    fn undecidable_stays_unknown_with_note() {
        // Over iterated powers no exact route exists; an existential that
        // never fires within depth stays unknown.
        let s = SparseSetDescriptor::iterated_powers(vec![2u32.into(), 3u32.into()]).unwrap();
        let f = parse_formula("EXISTS a IN P. a - 7 = 0").unwrap();
        let opts = EvalOptions { p_depth: 4, ..Default::default() };
        let r = evaluate(&f, &BTreeMap::new(), &s, &opts).unwrap();
        assert_eq!(r.value, Truth::Unknown);
        assert!(r.notes.iter().any(|n| n.contains("undecided")));
    }

    #[test]
    fn explicit_sets_are_decided_exhaustively() {
        let s = SparseSetDescriptor::explicit(vec![1u32.into(), 4u32.into(), 9u32.into()])
            .unwrap();
        let f = parse_formula("EXISTS a IN P. a - 7 = 0").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &s, &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::False);
    }

    #[test]
    fn unassigned_variable_reported() {
        let f = parse_formula("x + y = 0").unwrap();
        let e = evaluate(&f, &env(&[("x", 1)]), &pow2(), &EvalOptions::default()).unwrap_err();
        assert_eq!(e, EvalError::UnassignedVariable("y".into()));
    }

    #[test]
    fn unrestricted_quantifier_needs_range() {
        let f = parse_formula("EXISTS y. y + y = x").unwrap();
        let e = evaluate(&f, &env(&[("x", 4)]), &pow2(), &EvalOptions::default()).unwrap_err();
        assert_eq!(e, EvalError::UnboundedQuantifier);
        let opts = EvalOptions { int_range: Some(10), ..Default::default() };
        let r = evaluate(&f, &env(&[("x", 4)]), &pow2(), &opts).unwrap();
        assert_eq!(r.value, Truth::True);
    }

    #[test]
    fn exists_monotone_in_depth() {
        let f = parse_formula("EXISTS a IN P. a ≡_7 4").unwrap();
        let mut last_true_at = None;
        for depth in 1..=12 {
            let opts = EvalOptions { p_depth: depth, ..Default::default() };
            let v = evaluate(&f, &BTreeMap::new(), &pow2(), &opts).unwrap().value;
            if v == Truth::True {
                last_true_at.get_or_insert(depth);
            }
            if let Some(d) = last_true_at {
                if depth >= d {
                    assert_eq!(v, Truth::True, "monotone at depth {depth}");
                }
            }
        }
        assert!(last_true_at.is_some(), "2^m ≡ 4 mod 7 has witnesses (m=2)");
    }

    #[test]
    fn exact_route_negation_and_booleans() {
        // Powers of 2 mod 3 alternate 2,1,2,1,...; "a ≡_3 0" is never true.
        let f = parse_formula("ALL a IN P. NOT (a ≡_3 0)").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &pow2(), &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::True);
        // Every power of 2 is ≡ 1 or ≡ 2 mod 3.
        let f = parse_formula("ALL a IN P. (a ≡_3 1 OR a ≡_3 2)").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &pow2(), &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::True);
        // But not every power is ≡ 1 mod 3.
        let f = parse_formula("ALL a IN P. a ≡_3 1").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &pow2(), &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::False);
    }

    #[test]
    fn factorial_congruence_exact() {
        // All factorial-set elements except 1 and 2 are ≡ 0 mod 3: the
        // universal fails, and the existential of the complement holds.
        let fac = SparseSetDescriptor::factorials();
        let f = parse_formula("ALL a IN P. a ≡_3 0").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &fac, &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::False);
        let f = parse_formula("EXISTS a IN P. NOT (a ≡_3 0)").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &fac, &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::True);
        // Equality against a non-factorial is exactly false.
        let f = parse_formula("EXISTS a IN P. a = 7").unwrap();
        let r = evaluate(&f, &BTreeMap::new(), &fac, &EvalOptions::default()).unwrap();
        assert_eq!(r.value, Truth::False);
    }
}
