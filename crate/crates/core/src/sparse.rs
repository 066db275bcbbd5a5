//! Sparse subsets of the naturals: powers, iterated power towers, factorials,
//! and user-supplied lists, with exact membership and enumeration.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

/// Default cap on the decimal-digit size of a materialized element.
///
/// Iterated power towers outgrow any machine quickly; exceeding the cap is a
/// reported error, never silent truncation.
pub const DEFAULT_DIGIT_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SparseSetError {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(BigUint),
    #[error("iterated powers need a nonempty list of bases")]
    EmptyBases,
    #[error("explicit sets must be strictly increasing, violated at position {0}")]
    NotIncreasing(usize),
    #[error("index {index} out of range for explicit set of {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("element exceeds the digit cap of {cap} decimal digits")]
    DigitCapExceeded { cap: usize },
    #[error("prefix length must be at least 3, got {0}")]
    PrefixTooShort(usize),
    #[error("unknown set descriptor {0:?}")]
    UnknownDescriptor(String),
    #[error("malformed integer in descriptor: {0:?}")]
    BadInteger(String),
}

/// A strictly-gap-increasing subset of the naturals, given by a generator rule.
///
/// The denoted sets are `Powers(q) = {q^n : n >= 1}`,
/// `IteratedPowers([k1,..,km]) = {k1^(k2^(..^(km^n))) : n >= 1}` (evaluated
/// right to left), `Factorials = {n! : n} ∪ {0} = {0,1,2,6,24,...}` as a set,
/// and explicit sorted lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparseSetDescriptor {
    Powers { base: BigUint },
    IteratedPowers { bases: Vec<BigUint> },
    Factorials,
    Explicit { elements: Vec<BigUint> },
}

/// Consecutive-difference profile of a finite prefix of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapProfile {
    /// Differences `a_{i+1} - a_i` over the inspected prefix.
    pub gaps: Vec<BigUint>,
    /// Smallest index from which the gaps are strictly increasing across the
    /// whole remaining prefix, or `None` when no such tail (of at least two
    /// gaps) exists within the prefix.
    pub threshold_index: Option<usize>,
}

impl GapProfile {
    /// Sparse on the inspected prefix: some witnessed threshold exists.
    pub fn sparse_on_prefix(&self) -> bool {
        self.threshold_index.is_some()
    }
}

impl SparseSetDescriptor {
    pub fn powers(base: BigUint) -> Result<Self, SparseSetError> {
        if base < BigUint::from(2u32) {
            return Err(SparseSetError::BaseTooSmall(base));
        }
        Ok(SparseSetDescriptor::Powers { base })
    }

    pub fn iterated_powers(bases: Vec<BigUint>) -> Result<Self, SparseSetError> {
        if bases.is_empty() {
            return Err(SparseSetError::EmptyBases);
        }
        for b in &bases {
            if *b < BigUint::from(2u32) {
                return Err(SparseSetError::BaseTooSmall(b.clone()));
            }
        }
        Ok(SparseSetDescriptor::IteratedPowers { bases })
    }

    pub fn factorials() -> Self {
        SparseSetDescriptor::Factorials
    }

    pub fn explicit(elements: Vec<BigUint>) -> Result<Self, SparseSetError> {
        for i in 1..elements.len() {
            if elements[i] <= elements[i - 1] {
                return Err(SparseSetError::NotIncreasing(i));
            }
        }
        Ok(SparseSetDescriptor::Explicit { elements })
    }

    /// Parses the CLI descriptor syntax: `powers:2`, `iter:2,3`,
    /// `factorials`, `explicit:1,4,9,16`.
    pub fn parse(text: &str) -> Result<Self, SparseSetError> {
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (text, None),
        };
        let parse_list = |s: &str| -> Result<Vec<BigUint>, SparseSetError> {
            s.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<BigUint>()
                        .map_err(|_| SparseSetError::BadInteger(p.to_string()))
                })
                .collect()
        };
        match (kind, rest) {
            ("powers", Some(r)) => {
                let q = r
                    .trim()
                    .parse::<BigUint>()
                    .map_err(|_| SparseSetError::BadInteger(r.to_string()))?;
                Self::powers(q)
            }
            ("iter", Some(r)) => Self::iterated_powers(parse_list(r)?),
            ("factorials", None) => Ok(Self::factorials()),
            ("explicit", Some(r)) => Self::explicit(parse_list(r)?),
            _ => Err(SparseSetError::UnknownDescriptor(text.to_string())),
        }
    }

    /// Number of elements when the set is finite (explicit lists only).
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            SparseSetDescriptor::Explicit { elements } => Some(elements.len()),
            _ => None,
        }
    }

    /// Built-in kinds are sparse by construction; explicit lists are only
    /// certified on an inspected prefix.
    pub fn provably_sparse(&self) -> bool {
        !matches!(self, SparseSetDescriptor::Explicit { .. })
    }

    /// The `i`-th smallest element, 0-indexed, under the default digit cap.
    pub fn nth_element(&self, i: usize) -> Result<BigUint, SparseSetError> {
        self.nth_element_capped(i, DEFAULT_DIGIT_CAP)
    }

    /// The `i`-th smallest element with an explicit digit cap.
    pub fn nth_element_capped(&self, i: usize, cap: usize) -> Result<BigUint, SparseSetError> {
        match self {
            SparseSetDescriptor::Powers { base } => {
                checked_pow(base, (i as u64) + 1, cap)
            }
            SparseSetDescriptor::IteratedPowers { bases } => {
                tower_value(bases, (i as u64) + 1, cap)
            }
            SparseSetDescriptor::Factorials => Ok(factorial_element(i)),
            SparseSetDescriptor::Explicit { elements } => elements
                .get(i)
                .cloned()
                .ok_or(SparseSetError::IndexOutOfRange {
                    index: i,
                    len: elements.len(),
                }),
        }
    }

    /// Exact membership of an arbitrary integer.
    pub fn contains(&self, z: &BigInt) -> bool {
        if z.sign() == num_bigint::Sign::Minus {
            return false;
        }
        let z = z.magnitude().clone();
        self.contains_nat(&z)
    }

    /// Position of `z` in the increasing enumeration of the set, if present.
    pub fn index_of(&self, z: &BigUint) -> Option<u64> {
        match self {
            SparseSetDescriptor::Powers { base } => {
                if z < base {
                    return None;
                }
                let mut v = z.clone();
                let mut m = 0u64;
                while v > BigUint::one() {
                    let (quot, rem) = v.div_rem(base);
                    if !rem.is_zero() {
                        return None;
                    }
                    v = quot;
                    m += 1;
                }
                Some(m - 1) // exponent m corresponds to index m-1
            }
            SparseSetDescriptor::IteratedPowers { bases } => {
                let mut n = 1u64;
                loop {
                    match tower_capped(bases, n, z) {
                        Some(v) if &v == z => return Some(n - 1),
                        Some(_) => n += 1,
                        None => return None,
                    }
                }
            }
            SparseSetDescriptor::Factorials => {
                if z.is_zero() {
                    return Some(0);
                }
                let mut fact = BigUint::one();
                let mut m = 1u64;
                while fact < *z {
                    m += 1;
                    fact *= BigUint::from(m);
                }
                if fact == *z {
                    Some(m)
                } else {
                    None
                }
            }
            SparseSetDescriptor::Explicit { elements } => {
                elements.binary_search(z).ok().map(|i| i as u64)
            }
        }
    }

    /// Exact membership of a natural number.
    pub fn contains_nat(&self, z: &BigUint) -> bool {
        match self {
            SparseSetDescriptor::Powers { base } => {
                // Repeated exact division; q^0 = 1 is excluded (exponents start at 1).
                if z < base {
                    return false;
                }
                let mut v = z.clone();
                while v > BigUint::one() {
                    let (quot, rem) = v.div_rem(base);
                    if !rem.is_zero() {
                        return false;
                    }
                    v = quot;
                }
                true
            }
            SparseSetDescriptor::IteratedPowers { bases } => {
                // Towers grow so fast that only a handful of elements fit below z.
                let mut n = 1u64;
                loop {
                    match tower_capped(bases, n, z) {
                        Some(v) => {
                            if &v == z {
                                return true;
                            }
                            n += 1;
                        }
                        // Next element already exceeds z.
                        None => return false,
                    }
                }
            }
            SparseSetDescriptor::Factorials => {
                if z.is_zero() {
                    return true;
                }
                let mut fact = BigUint::one();
                let mut m = BigUint::one();
                while fact < *z {
                    m += 1u32;
                    fact *= &m;
                }
                fact == *z
            }
            SparseSetDescriptor::Explicit { elements } => {
                elements.binary_search(z).is_ok()
            }
        }
    }

    /// The first `count` elements in increasing order (fewer for a shorter
    /// explicit set).
    pub fn prefix_elements(&self, count: usize) -> Result<Vec<BigUint>, SparseSetError> {
        self.prefix_elements_capped(count, DEFAULT_DIGIT_CAP)
    }

    pub fn prefix_elements_capped(
        &self,
        count: usize,
        cap: usize,
    ) -> Result<Vec<BigUint>, SparseSetError> {
        match self {
            SparseSetDescriptor::Powers { base } => {
                let mut out = Vec::with_capacity(count);
                let mut v = base.clone();
                for _ in 0..count {
                    if decimal_digits_exceed(&v, cap) {
                        return Err(SparseSetError::DigitCapExceeded { cap });
                    }
                    out.push(v.clone());
                    v *= base;
                }
                Ok(out)
            }
            SparseSetDescriptor::IteratedPowers { bases } => (0..count)
                .map(|i| tower_value(bases, (i as u64) + 1, cap))
                .collect(),
            SparseSetDescriptor::Factorials => {
                Ok((0..count).map(factorial_element).collect())
            }
            SparseSetDescriptor::Explicit { elements } => {
                Ok(elements.iter().take(count).cloned().collect())
            }
        }
    }

    /// Residues of the first `count` elements modulo `n`, computed without
    /// materializing the elements (towers are reduced arithmetically).
    pub fn prefix_residues(&self, modulus: &BigUint, count: usize) -> Vec<BigUint> {
        assert!(!modulus.is_zero(), "modulus must be positive");
        match self {
            SparseSetDescriptor::Powers { base } => {
                let mut out = Vec::with_capacity(count);
                let mut r = base % modulus;
                for _ in 0..count {
                    out.push(r.clone());
                    r = (&r * base) % modulus;
                }
                out
            }
            SparseSetDescriptor::IteratedPowers { bases } => (0..count)
                .map(|i| tower_mod(bases, (i as u64) + 1, modulus))
                .collect(),
            SparseSetDescriptor::Factorials => {
                let mut out = Vec::with_capacity(count);
                if count > 0 {
                    out.push(BigUint::zero()); // the element 0
                }
                let mut fact = BigUint::one();
                let mut m = BigUint::one();
                while out.len() < count {
                    out.push(&fact % modulus);
                    m += 1u32;
                    fact *= &m;
                }
                out
            }
            SparseSetDescriptor::Explicit { elements } => elements
                .iter()
                .take(count)
                .map(|e| e % modulus)
                .collect(),
        }
    }

    /// Gap profile of the first `prefix_length` elements; the threshold is
    /// only a witness over the inspected prefix.
    pub fn sparseness_check(&self, prefix_length: usize) -> Result<GapProfile, SparseSetError> {
        if prefix_length < 3 {
            return Err(SparseSetError::PrefixTooShort(prefix_length));
        }
        let elems = self.prefix_elements(prefix_length)?;
        let gaps: Vec<BigUint> = elems.windows(2).map(|w| &w[1] - &w[0]).collect();
        Ok(GapProfile {
            threshold_index: gap_threshold(&gaps),
            gaps,
        })
    }
}

impl fmt::Display for SparseSetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SparseSetDescriptor::Powers { base } => write!(f, "powers:{base}"),
            SparseSetDescriptor::IteratedPowers { bases } => {
                let parts: Vec<String> = bases.iter().map(|b| b.to_string()).collect();
                write!(f, "iter:{}", parts.join(","))
            }
            SparseSetDescriptor::Factorials => write!(f, "factorials"),
            SparseSetDescriptor::Explicit { elements } => {
                let parts: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

/// Smallest index from which the gap sequence is strictly increasing through
/// the end of the prefix; requires at least one comparison in the tail.
fn gap_threshold(gaps: &[BigUint]) -> Option<usize> {
    if gaps.len() < 2 {
        return None;
    }
    // Walk backwards to find the start of the maximal strictly increasing tail.
    let mut start = gaps.len() - 1;
    while start > 0 && gaps[start - 1] < gaps[start] {
        start -= 1;
    }
    if start <= gaps.len() - 2 {
        Some(start)
    } else {
        None
    }
}

fn factorial_element(i: usize) -> BigUint {
    // The set {0,1,2,6,24,...}: index 0 is the element 0, index i >= 1 is i!.
    if i == 0 {
        return BigUint::zero();
    }
    let mut fact = BigUint::one();
    for m in 2..=i {
        fact *= BigUint::from(m);
    }
    fact
}

fn decimal_digits_exceed(v: &BigUint, cap: usize) -> bool {
    // bits/3 is a lower bound on decimal digits; only compute exactly near the cap.
    let bits = v.bits() as usize;
    if bits / 4 > cap {
        return true;
    }
    if bits <= 3 * cap {
        return false;
    }
    v.to_string().len() > cap
}

/// `base^exp` unless the result would exceed `cap` decimal digits.
fn checked_pow(base: &BigUint, exp: u64, cap: usize) -> Result<BigUint, SparseSetError> {
    // digits(base^exp) ~ exp * log10(base); bits give a cheap bound.
    let bits_bound = (base.bits() as u128) * (exp as u128);
    if bits_bound / 3 > cap as u128 {
        return Err(SparseSetError::DigitCapExceeded { cap });
    }
    let v = base.pow(exp as u32);
    if decimal_digits_exceed(&v, cap) {
        return Err(SparseSetError::DigitCapExceeded { cap });
    }
    Ok(v)
}

/// Tower value `k1^(k2^(..^(km^n)))`, or a digit-cap error.
fn tower_value(bases: &[BigUint], n: u64, cap: usize) -> Result<BigUint, SparseSetError> {
    let mut exp = BigUint::from(n);
    for b in bases.iter().rev() {
        let exp_u64 = exp
            .to_u64_digits()
            .first()
            .copied()
            .filter(|_| exp.bits() <= 64)
            .ok_or(SparseSetError::DigitCapExceeded { cap })?;
        exp = checked_pow(b, exp_u64, cap)?;
    }
    Ok(exp)
}

/// Tower value if it is `<= limit`, else `None`.
fn tower_capped(bases: &[BigUint], n: u64, limit: &BigUint) -> Option<BigUint> {
    let mut exp = BigUint::from(n);
    for b in bases.iter().rev() {
        // b^exp <= limit requires exp <= log_b(limit) <= bits(limit).
        if exp > BigUint::from(limit.bits() + 1) {
            return None;
        }
        let e = exp.to_u64_digits().first().copied().unwrap_or(0);
        let v = b.pow(e as u32);
        if &v > limit {
            return None;
        }
        exp = v;
    }
    Some(exp)
}

use crate::exponent::euler_phi_nat;

/// `k1^(k2^(..^(km^n))) mod modulus` without materializing the tower.
///
/// Uses the generalized Euler identity `a^e ≡ a^(φ(m) + e mod φ(m)) (mod m)`
/// for `e >= φ(m)`.
pub fn tower_mod(bases: &[BigUint], n: u64, modulus: &BigUint) -> BigUint {
    // Returns (value mod modulus, Some(value) when the value is <= SMALL).
    // A `None` smallness genuinely means value > SMALL, which licenses the
    // reduced-exponent form for every modulus below 2^SMALL.
    const SMALL: u64 = 4096;
    fn rec(bases: &[BigUint], n: u64, modulus: &BigUint) -> (BigUint, Option<BigUint>) {
        if bases.is_empty() {
            let v = BigUint::from(n);
            let small = if n <= SMALL { Some(v.clone()) } else { None };
            return (&v % modulus, small);
        }
        let b = &bases[0];
        let phi = euler_phi_nat(modulus);
        let (exp_mod_phi, exp_small) = rec(&bases[1..], n, &phi);
        let exponent = match &exp_small {
            Some(e) => e.clone(),
            None => &exp_mod_phi + &phi, // e > SMALL >= log2(modulus): reduction valid
        };
        let residue = b.modpow(&exponent, modulus);
        let small = exp_small.and_then(|e| {
            let e64 = e.to_u64_digits().first().copied().unwrap_or(0);
            if e64 == 0 {
                return Some(BigUint::one());
            }
            if b.bits().saturating_mul(e64) <= 64 {
                // Fits in a machine word: compute exactly and test.
                Some(b.pow(e64 as u32)).filter(|v| *v <= BigUint::from(SMALL))
            } else {
                // b >= 2 and bits(b)*e > 64 force the value above 2^32 > SMALL.
                None
            }
        });
        (residue, small)
    }
    if modulus.is_one() {
        return BigUint::zero();
    }
    rec(bases, n, modulus).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn nth_powers_of_two() {
        let s = SparseSetDescriptor::powers(big(2)).unwrap();
        assert_eq!(s.nth_element(2).unwrap(), big(8));
        assert_eq!(s.nth_element(0).unwrap(), big(2));
    }

    #[test]
    fn nth_factorials_includes_zero() {
        let s = SparseSetDescriptor::factorials();
        assert_eq!(s.nth_element(0).unwrap(), big(0));
        assert_eq!(s.nth_element(1).unwrap(), big(1));
        assert_eq!(s.nth_element(2).unwrap(), big(2));
        assert_eq!(s.nth_element(3).unwrap(), big(6));
        assert_eq!(s.nth_element(5).unwrap(), big(120));
    }

    #[test]
    fn nth_iterated_powers() {
        let s = SparseSetDescriptor::iterated_powers(vec![big(2), big(3)]).unwrap();
        // 2^(3^1) = 8, 2^(3^2) = 512
        assert_eq!(s.nth_element(0).unwrap(), big(8));
        assert_eq!(s.nth_element(1).unwrap(), big(512));
    }

    #[test]
    fn digit_cap_stops_runaway_towers() {
        let s = SparseSetDescriptor::iterated_powers(vec![big(2), big(3)]).unwrap();
        let err = s.nth_element_capped(6, 1000).unwrap_err();
        assert!(matches!(err, SparseSetError::DigitCapExceeded { .. }));
    }

    #[test]
    fn contains_powers() {
        let s = SparseSetDescriptor::powers(big(2)).unwrap();
        assert!(s.contains(&BigInt::from(8)));
        assert!(!s.contains(&BigInt::from(12)));
        assert!(!s.contains(&BigInt::from(1))); // exponents start at 1
        assert!(!s.contains(&BigInt::from(0)));
        assert!(!s.contains(&BigInt::from(-4)));
    }

    #[test]
    fn contains_factorials() {
        let s = SparseSetDescriptor::factorials();
        assert!(s.contains(&BigInt::from(0)));
        assert!(s.contains(&BigInt::from(1)));
        assert!(s.contains(&BigInt::from(720)));
        assert!(!s.contains(&BigInt::from(7)));
    }

    #[test]
    fn contains_iterated() {
        let s = SparseSetDescriptor::iterated_powers(vec![big(2), big(3)]).unwrap();
        assert!(s.contains(&BigInt::from(512)));
        assert!(!s.contains(&BigInt::from(511)));
        assert!(!s.contains(&BigInt::from(2)));
    }

    #[test]
    fn explicit_must_increase() {
        assert!(SparseSetDescriptor::explicit(vec![big(1), big(1)]).is_err());
        let s = SparseSetDescriptor::explicit(vec![big(1), big(4), big(9)]).unwrap();
        assert!(s.contains(&BigInt::from(4)));
        assert!(!s.contains(&BigInt::from(5)));
        assert!(matches!(
            s.nth_element(3),
            Err(SparseSetError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn gap_profile_powers_of_two() {
        let s = SparseSetDescriptor::powers(big(2)).unwrap();
        let p = s.sparseness_check(6).unwrap();
        assert_eq!(p.gaps, vec![big(2), big(4), big(8), big(16), big(32)]);
        assert_eq!(p.threshold_index, Some(0));
    }

    #[test]
    fn gap_profile_factorials() {
        let s = SparseSetDescriptor::factorials();
        let p = s.sparseness_check(6).unwrap();
        // elements 0,1,2,6,24,120
        assert_eq!(p.gaps, vec![big(1), big(1), big(4), big(18), big(96)]);
        assert_eq!(p.threshold_index, Some(1));
    }

    #[test]
    fn gap_profile_constant_gaps_never() {
        let s =
            SparseSetDescriptor::explicit(vec![big(1), big(2), big(3), big(4), big(5)]).unwrap();
        let p = s.sparseness_check(5).unwrap();
        assert_eq!(p.threshold_index, None);
    }

    #[test]
    fn prefix_too_short_rejected() {
        let s = SparseSetDescriptor::factorials();
        assert!(matches!(
            s.sparseness_check(2),
            Err(SparseSetError::PrefixTooShort(2))
        ));
    }

    #[test]
    fn parse_descriptors() {
        assert_eq!(
            SparseSetDescriptor::parse("powers:2").unwrap(),
            SparseSetDescriptor::powers(big(2)).unwrap()
        );
        assert_eq!(
            SparseSetDescriptor::parse("iter:2,3").unwrap(),
            SparseSetDescriptor::iterated_powers(vec![big(2), big(3)]).unwrap()
        );
        assert_eq!(
            SparseSetDescriptor::parse("factorials").unwrap(),
            SparseSetDescriptor::factorials()
        );
        assert!(SparseSetDescriptor::parse("powers:1").is_err());
        assert!(SparseSetDescriptor::parse("nonsense").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["powers:3", "iter:2,3", "factorials", "explicit:1,4,9"] {
            let s = SparseSetDescriptor::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
            assert_eq!(SparseSetDescriptor::parse(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn contains_nth_agree_on_prefix() {
        let sets = [
            SparseSetDescriptor::powers(big(2)).unwrap(),
            SparseSetDescriptor::powers(big(10)).unwrap(),
            SparseSetDescriptor::factorials(),
            SparseSetDescriptor::iterated_powers(vec![big(2), big(2)]).unwrap(),
        ];
        for s in &sets {
            let limit = match s {
                SparseSetDescriptor::IteratedPowers { .. } => 4,
                _ => 50,
            };
            for i in 0..=limit {
                let v = s.nth_element(i).unwrap();
                assert!(s.contains_nat(&v), "{s} should contain element {i} = {v}");
            }
        }
    }

    #[test]
    fn prefix_residues_match_materialized() {
        let sets = [
            SparseSetDescriptor::powers(big(3)).unwrap(),
            SparseSetDescriptor::factorials(),
            SparseSetDescriptor::iterated_powers(vec![big(2), big(3)]).unwrap(),
        ];
        for s in &sets {
            let count = match s {
                SparseSetDescriptor::IteratedPowers { .. } => 5,
                _ => 30,
            };
            for n in [2u64, 7, 12, 30] {
                let m = big(n);
                let rs = s.prefix_residues(&m, count);
                for (i, r) in rs.iter().enumerate() {
                    let v = s.nth_element(i).unwrap();
                    assert_eq!(*r, &v % &m, "{s} element {i} mod {n}");
                }
            }
        }
    }

    #[test]
    fn tower_mod_beyond_materializable() {
        // 2^(3^(4^n)) mod 1000 for n up to 6: compare small cases against
        // direct computation, then just exercise the big ones.
        let bases = vec![big(2), big(3), big(4)];
        let m = big(1000);
        let direct = tower_value(&bases, 1, DEFAULT_DIGIT_CAP).unwrap() % &m;
        assert_eq!(tower_mod(&bases, 1, &m), direct);
        let _ = tower_mod(&bases, 6, &m);
    }

    #[test]
    fn provably_sparse_flags() {
        assert!(SparseSetDescriptor::powers(big(2)).unwrap().provably_sparse());
        assert!(SparseSetDescriptor::factorials().provably_sparse());
        assert!(!SparseSetDescriptor::explicit(vec![big(1), big(2)])
            .unwrap()
            .provably_sparse());
    }
}
