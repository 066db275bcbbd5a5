//! Residue analysis of sparse sets: which powers of `q` land in a congruence
//! class `[k]_n`, described as exponent progressions, and the finite/cofinite
//! classification of factorials in a class.

use crate::sparse::SparseSetDescriptor;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExponentError {
    #[error("arguments must be coprime: gcd({q}, {n}) != 1")]
    NotCoprime { q: BigUint, n: BigUint },
    #[error("residue {k} is not below the modulus {n}")]
    ResidueOutOfRange { k: BigUint, n: BigUint },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(BigUint),
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(BigUint),
    #[error("argument must be at least 1")]
    ZeroArgument,
}

/// An arithmetic progression of exponents `{start + step*t : t >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
}

/// The set `{m >= 1 : q^m ≡ k (mod n)}`, as a finite exceptional part plus
/// arithmetic progressions of exponents.
///
/// Beyond `pre_period` the progressions alone describe the set; all listed
/// progressions share a common step (the period of the residue orbit) and
/// are sorted by start.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExponentClassSet {
    pub exceptional: BTreeSet<u64>,
    pub progressions: Vec<Progression>,
    pub pre_period: u64,
}

impl ExponentClassSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// All exponents `m >= 1`.
    pub fn all() -> Self {
        ExponentClassSet {
            exceptional: BTreeSet::new(),
            progressions: vec![Progression { start: 1, step: 1 }],
            pre_period: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.exceptional.is_empty() && self.progressions.is_empty()
    }

    pub fn contains(&self, m: u64) -> bool {
        if m == 0 {
            return false;
        }
        self.exceptional.contains(&m)
            || self
                .progressions
                .iter()
                .any(|p| m >= p.start && (m - p.start).is_multiple_of(p.step))
    }

    /// Every member up to and including `max`.
    pub fn materialize_up_to(&self, max: u64) -> BTreeSet<u64> {
        let mut out: BTreeSet<u64> = self
            .exceptional
            .iter()
            .copied()
            .filter(|m| *m <= max)
            .collect();
        for p in &self.progressions {
            let mut m = p.start;
            while m <= max {
                out.insert(m);
                m += p.step;
            }
        }
        out
    }

    /// Union with another set, in canonical form.
    pub fn union(&self, other: &Self) -> Self {
        Canon::from_class(self).combine(&Canon::from_class(other), |a, b| a || b).to_class()
    }

    /// Intersection with another set, in canonical form.
    pub fn intersect(&self, other: &Self) -> Self {
        Canon::from_class(self).combine(&Canon::from_class(other), |a, b| a && b).to_class()
    }

    /// Complement within `{m : m >= 1}`, in canonical form.
    pub fn complement(&self) -> Self {
        Canon::from_class(self).complement().to_class()
    }

    /// True when the set is all of `{m >= 1}`.
    pub fn is_universal(&self) -> bool {
        self.complement().is_empty()
    }

    /// Least common multiple of the progression steps (1 when none); a cheap
    /// size gauge for the canonical boolean operations.
    pub fn common_step(&self) -> u64 {
        self.progressions.iter().fold(1u64, |l, p| l.lcm(&p.step))
    }
}

/// Canonical eventually-periodic representation used for boolean algebra:
/// `explicit ∪ {m > cut : m mod period ∈ residues}`.
struct Canon {
    cut: u64,
    explicit: BTreeSet<u64>,
    period: u64,
    residues: BTreeSet<u64>,
}

impl Canon {
    fn from_class(c: &ExponentClassSet) -> Canon {
        let period = c
            .progressions
            .iter()
            .fold(1u64, |l, p| l.lcm(&p.step));
        let cut = c
            .progressions
            .iter()
            .map(|p| p.start.saturating_sub(1))
            .chain(std::iter::once(c.pre_period))
            .max()
            .unwrap_or(0);
        let mut explicit: BTreeSet<u64> = c.exceptional.iter().copied().filter(|m| *m <= cut).collect();
        let mut residues = BTreeSet::new();
        for p in &c.progressions {
            // Progression elements at or below the cut become explicit.
            let mut m = p.start;
            while m <= cut {
                explicit.insert(m);
                m += p.step;
            }
            let mut r = p.start % p.step;
            while r < period {
                residues.insert(r % period);
                r += p.step;
            }
        }
        // Exceptional elements above the cut (none in well-formed inputs).
        for &m in c.exceptional.iter().filter(|m| **m > cut) {
            explicit.insert(m);
        }
        let cut = cut.max(explicit.iter().max().copied().unwrap_or(0));
        Canon { cut, explicit, period, residues }
    }

    fn contains(&self, m: u64) -> bool {
        if m == 0 {
            return false;
        }
        if m <= self.cut {
            self.explicit.contains(&m)
        } else {
            self.residues.contains(&(m % self.period))
        }
    }

    fn combine(&self, other: &Canon, op: impl Fn(bool, bool) -> bool) -> Canon {
        let period = self.period.lcm(&other.period);
        let cut = self.cut.max(other.cut);
        let explicit = (1..=cut)
            .filter(|&m| op(self.contains(m), other.contains(m)))
            .collect();
        let residues = (0..period)
            .filter(|r| {
                // Pick a representative beyond both cuts.
                let m = cut + 1 + (r + period - (cut + 1) % period) % period;
                op(self.contains(m), other.contains(m))
            })
            .collect();
        Canon { cut, explicit, period, residues }
    }

    fn complement(&self) -> Canon {
        Canon {
            cut: self.cut,
            explicit: (1..=self.cut).filter(|m| !self.explicit.contains(m)).collect(),
            period: self.period,
            residues: (0..self.period).filter(|r| !self.residues.contains(r)).collect(),
        }
    }

    fn to_class(&self) -> ExponentClassSet {
        // Minimal period: smallest divisor leaving the residue set shift-invariant.
        let mut period = self.period;
        for d in sorted_divisors(&BigUint::from(self.period)) {
            let invariant = (0..self.period).all(|r| {
                self.residues.contains(&r) == self.residues.contains(&((r + d) % self.period))
            });
            if invariant {
                period = d;
                break;
            }
        }
        let residues: BTreeSet<u64> = self.residues.iter().map(|r| r % period).collect();
        // Minimal cut: absorb explicit elements that agree with the tail.
        let mut cut = self.cut;
        let mut explicit = self.explicit.clone();
        while cut >= 1 {
            let tail_pred = residues.contains(&(cut % period));
            if explicit.contains(&cut) == tail_pred {
                explicit.remove(&cut);
                cut -= 1;
            } else {
                break;
            }
        }
        let progressions = residues
            .iter()
            .map(|&r| {
                let next = cut + 1;
                let start = next + (r + period - next % period) % period;
                Progression { start, step: period }
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        ExponentClassSet {
            exceptional: explicit,
            progressions,
            pre_period: cut,
        }
    }
}

/// Classification of `Fac ∩ [k]_n`: the intersection is finite unless `k = 0`,
/// in which case it is cofinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FacClassResult {
    Finite { members: Vec<BigUint> },
    Cofinite {
        excluded: Vec<BigUint>,
        /// Smallest index into the sorted set `{0,1,2,6,24,...}` from which
        /// every element lies in the class.
        threshold_index: u64,
    },
}

/// Count of units modulo `n`, by trial-division factorization.
pub fn euler_phi(n: &BigUint) -> Result<BigUint, ExponentError> {
    if n.is_zero() {
        return Err(ExponentError::ZeroArgument);
    }
    Ok(euler_phi_nat(n))
}

pub(crate) fn euler_phi_nat(n: &BigUint) -> BigUint {
    let mut n = n.clone();
    let mut phi = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut pk = BigUint::one();
            while (&n % &p).is_zero() {
                n /= &p;
                pk *= &p;
            }
            phi *= &pk / &p * (&p - 1u32);
        }
        p += 1u32;
    }
    if n > BigUint::one() {
        phi *= &n - 1u32;
    }
    phi
}

/// Least `d >= 1` with `q^d ≡ 1 (mod n)`; divides `euler_phi(n)`.
pub fn mult_order(q: &BigUint, n: &BigUint) -> Result<u64, ExponentError> {
    if *q < BigUint::from(2u32) {
        return Err(ExponentError::BaseTooSmall(q.clone()));
    }
    if *n < BigUint::from(2u32) {
        return Err(ExponentError::ModulusTooSmall(n.clone()));
    }
    if !q.gcd(n).is_one() {
        return Err(ExponentError::NotCoprime { q: q.clone(), n: n.clone() });
    }
    let phi = euler_phi_nat(n);
    for d in sorted_divisors(&phi) {
        if q.modpow(&BigUint::from(d), n).is_one() {
            return Ok(d);
        }
    }
    unreachable!("Euler's theorem guarantees an order dividing phi(n)")
}

fn sorted_divisors(n: &BigUint) -> Vec<u64> {
    // Desk-scale orders only; the order itself always fits easily in u64.
    let n: u64 = n.to_u64_digits().first().copied().unwrap_or(0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Exact description of `{m >= 1 : q^m ≡ k (mod n)}`.
///
/// The residue orbit of `q` modulo `n` is eventually periodic; exponents
/// matching `k` before the orbit enters its cycle become exceptional, the
/// matches inside the cycle become progressions stepping by the orbit period.
/// The step thus equals the multiplicative order of `q` on the coprime part
/// of `n`, which may properly divide `euler_phi(n)`.
pub fn power_residue_class(
    q: &BigUint,
    k: &BigUint,
    n: &BigUint,
) -> Result<ExponentClassSet, ExponentError> {
    if *q < BigUint::from(2u32) {
        return Err(ExponentError::BaseTooSmall(q.clone()));
    }
    if *n < BigUint::from(2u32) {
        return Err(ExponentError::ModulusTooSmall(n.clone()));
    }
    if k >= n {
        return Err(ExponentError::ResidueOutOfRange { k: k.clone(), n: n.clone() });
    }
    // Iterate the orbit q^m mod n until a residue repeats.
    let mut first_seen: BTreeMap<BigUint, u64> = BTreeMap::new();
    let mut orbit: Vec<BigUint> = Vec::new(); // orbit[i] = q^(i+1) mod n
    let mut r = q % n;
    let (mu, lambda) = loop {
        if let Some(&j) = first_seen.get(&r) {
            break (j, orbit.len() as u64 + 1 - j);
        }
        let m = orbit.len() as u64 + 1;
        first_seen.insert(r.clone(), m);
        orbit.push(r.clone());
        r = (&r * q) % n;
    };
    let exceptional: BTreeSet<u64> = (1..mu)
        .filter(|&m| orbit[(m - 1) as usize] == *k)
        .collect();
    let progressions: Vec<Progression> = (mu..mu + lambda)
        .filter(|&m| orbit[(m - 1) as usize] == *k)
        .map(|start| Progression { start, step: lambda })
        .collect();
    Ok(ExponentClassSet {
        exceptional,
        progressions,
        pre_period: mu - 1,
    })
}

/// Index-level classification of `Fac ∩ [k]_n`: `(cofinite, exceptional
/// indices)`, where indices address the sorted set `{0,1,2,6,24,...}`.
pub(crate) fn fac_class_indices(k: &BigUint, n: &BigUint) -> (bool, BTreeSet<u64>) {
    let cofinite = k.is_zero();
    let mut exceptions = BTreeSet::new();
    // Element 0 at index 0, then m! at index m; m! mod n is eventually 0.
    let zero_in = k.is_zero();
    if zero_in != cofinite {
        exceptions.insert(0);
    }
    let mut fact_mod = BigUint::one();
    let mut m = 1u64;
    loop {
        fact_mod = (&fact_mod * BigUint::from(m)) % n;
        if fact_mod.is_zero() {
            // All later factorials are 0 mod n as well.
            break;
        }
        let in_class = fact_mod == *k;
        if in_class != cofinite {
            exceptions.insert(m);
        }
        m += 1;
    }
    if !cofinite {
        // Indices at and beyond m are all ≡ 0, hence outside the class.
        return (false, exceptions);
    }
    // Cofinite: indices m.. are all ≡ 0 ≡ k; exceptions recorded above.
    (true, exceptions)
}

/// Exact classification of `Fac ∩ [k]_n` with materialized elements.
pub fn fac_residue_class(k: &BigUint, n: &BigUint) -> Result<FacClassResult, ExponentError> {
    if *n < BigUint::from(2u32) {
        return Err(ExponentError::ModulusTooSmall(n.clone()));
    }
    if k >= n {
        return Err(ExponentError::ResidueOutOfRange { k: k.clone(), n: n.clone() });
    }
    let (cofinite, exceptions) = fac_class_indices(k, n);
    let fac = SparseSetDescriptor::factorials();
    let materialize = |idx: &BTreeSet<u64>| -> Vec<BigUint> {
        idx.iter()
            .map(|&i| fac.nth_element(i as usize).expect("factorial index"))
            .collect()
    };
    if cofinite {
        let threshold_index = exceptions.iter().max().map_or(0, |m| m + 1);
        Ok(FacClassResult::Cofinite {
            excluded: materialize(&exceptions),
            threshold_index,
        })
    } else {
        Ok(FacClassResult::Finite {
            members: materialize(&exceptions),
        })
    }
}

/// The exact set of residues `{a mod n : a ∈ s}` when finitely computable:
/// the full residue orbit for powers, the early-stopping factorial scan, and
/// all elements of an explicit list. `None` for iterated power towers.
pub fn sparse_residues(s: &SparseSetDescriptor, n: &BigUint) -> Option<BTreeSet<BigUint>> {
    if n.is_zero() {
        return None;
    }
    match s {
        SparseSetDescriptor::Powers { base } => {
            let mut seen = BTreeSet::new();
            let mut r = base % n;
            while seen.insert(r.clone()) {
                r = (&r * base) % n;
            }
            Some(seen)
        }
        SparseSetDescriptor::Factorials => {
            let mut seen = BTreeSet::new();
            seen.insert(BigUint::zero());
            let mut fact_mod = BigUint::one();
            let mut m = 1u64;
            loop {
                fact_mod = (&fact_mod * BigUint::from(m)) % n;
                if fact_mod.is_zero() {
                    break;
                }
                seen.insert(fact_mod.clone());
                m += 1;
            }
            Some(seen)
        }
        SparseSetDescriptor::Explicit { elements } => {
            Some(elements.iter().map(|e| e % n).collect())
        }
        SparseSetDescriptor::IteratedPowers { .. } => None,
    }
}
