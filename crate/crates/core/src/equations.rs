//! Complete solution descriptions of homogeneous linear equations restricted
//! to powers of `q` or to the factorial set, with a brute-force oracle.
//!
//! Power solutions come as scale orbits: a base exponent tuple shifted
//! uniformly, `{(q^{e1+t},...,q^{en+t}) : t >= 0}` — multiplying every
//! coordinate by `q^t` preserves a homogeneous equation. Coordinate-wise
//! powering does not: `(2,2,4)` solves `x + y - z = 0` but `(4,4,16)` does
//! not, so orbits of that shape are deliberately not used.

use crate::sparse::{SparseSetDescriptor, SparseSetError};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

/// Default cap on the number of grid tuples the brute-force oracle visits.
pub const DEFAULT_GRID_CAP: usize = 100_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquationError {
    #[error("an equation needs at least one variable")]
    Empty,
    #[error("coefficient {0} is zero; all coefficients must be nonzero")]
    ZeroCoefficient(usize),
    #[error("variable names must match the coefficient count")]
    NameMismatch,
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(BigUint),
    #[error("structured solvers handle homogeneous equations only (rhs = {0})")]
    Inhomogeneous(BigInt),
    #[error(
        "the zero-sum coordinate subset {subset:?} admits a free scale level; \
         the solution set is not a finite union of single-parameter scale orbits"
    )]
    UnboundedFamilyStructure { subset: Vec<usize> },
    #[error("brute-force grid of {size} tuples exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: usize },
    #[error("partition does not cover the coordinate indices exactly")]
    MalformedPartition,
    #[error(transparent)]
    Set(#[from] SparseSetError),
}

/// `k1*x1 + ... + kn*xn = rhs` with nonzero integer coefficients.
///
/// The structured solvers accept only the homogeneous case `rhs = 0`; an
/// inhomogeneous right-hand side is supported by the brute-force oracle
/// alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSpec {
    coefficients: Vec<BigInt>,
    variables: Vec<String>,
    rhs: BigInt,
}

impl EquationSpec {
    pub fn new(coefficients: Vec<BigInt>) -> Result<Self, EquationError> {
        let variables = (1..=coefficients.len()).map(|i| format!("x{i}")).collect();
        Self::with_variables(coefficients, variables)
    }

    pub fn with_variables(
        coefficients: Vec<BigInt>,
        variables: Vec<String>,
    ) -> Result<Self, EquationError> {
        if coefficients.is_empty() {
            return Err(EquationError::Empty);
        }
        if coefficients.len() != variables.len() {
            return Err(EquationError::NameMismatch);
        }
        for (i, c) in coefficients.iter().enumerate() {
            if c.is_zero() {
                return Err(EquationError::ZeroCoefficient(i));
            }
        }
        Ok(EquationSpec { coefficients, variables, rhs: BigInt::zero() })
    }

    /// Oracle-only form `k1*x1 + ... + kn*xn = rhs`.
    pub fn inhomogeneous(coefficients: Vec<BigInt>, rhs: BigInt) -> Result<Self, EquationError> {
        let mut eq = Self::new(coefficients)?;
        eq.rhs = rhs;
        Ok(eq)
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rhs(&self) -> &BigInt {
        &self.rhs
    }

    fn require_homogeneous(&self) -> Result<(), EquationError> {
        if self.rhs.is_zero() {
            Ok(())
        } else {
            Err(EquationError::Inhomogeneous(self.rhs.clone()))
        }
    }

    /// Exact check of a candidate tuple.
    pub fn satisfied_by(&self, tuple: &[BigUint]) -> bool {
        if tuple.len() != self.arity() {
            return false;
        }
        let sum: BigInt = self
            .coefficients
            .iter()
            .zip(tuple)
            .map(|(k, x)| k * BigInt::from(x.clone()))
            .sum();
        sum == self.rhs
    }
}

/// The single-parameter solution family `{(q^{e1+t},...,q^{en+t}) : t >= 0}`
/// with the base normalized to minimum exponent 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScaleOrbitFamily {
    pub base_exponents: Vec<u64>,
    pub base: BigUint,
}

impl ScaleOrbitFamily {
    fn new(base_exponents: Vec<u64>, base: BigUint) -> Self {
        debug_assert_eq!(base_exponents.iter().min(), Some(&1));
        ScaleOrbitFamily { base_exponents, base }
    }

    /// The member at shift `t`.
    pub fn member(&self, t: u64) -> Vec<BigUint> {
        self.base_exponents
            .iter()
            .map(|e| self.base.pow((e + t) as u32))
            .collect()
    }

    /// All members whose exponents stay at or below `exponent_bound`.
    pub fn members_below(&self, exponent_bound: u64) -> Vec<Vec<BigUint>> {
        let max_e = *self.base_exponents.iter().max().expect("nonempty base");
        if max_e > exponent_bound {
            return Vec::new();
        }
        (0..=exponent_bound - max_e).map(|t| self.member(t)).collect()
    }
}

/// Smallest `e` with `q^e >= target`.
fn ceil_log(q: &BigUint, target: &BigUint) -> u64 {
    let mut e = 0u64;
    let mut pw = BigUint::one();
    while pw < *target {
        pw *= q;
        e += 1;
    }
    e
}

/// Exponent-spread cap from the pigeonhole argument: distinct exponent levels
/// with nonzero coefficient sums can differ by at most `log_q(n * max|k|)`
/// per step, plus one for safety.
fn spread_bound(eq: &EquationSpec, q: &BigUint) -> u64 {
    let n = eq.arity() as u32;
    let max_k = eq
        .coefficients
        .iter()
        .map(|k| k.magnitude().clone())
        .max()
        .expect("nonempty");
    let target = (BigUint::from(n) * max_k).pow(n.saturating_sub(1));
    ceil_log(q, &target) + 1
}

/// All exponent tuples with entries in `[1, 1+bound]`, minimum exactly 1,
/// satisfying the equation.
fn bounded_exponent_shapes(eq: &EquationSpec, q: &BigUint, bound: u64) -> Vec<Vec<u64>> {
    let n = eq.arity();
    let hi = 1 + bound;
    let powers: Vec<BigInt> = (0..=hi)
        .map(|e| BigInt::from(q.pow(e as u32)))
        .collect();
    let mut out = Vec::new();
    let mut shape = vec![1u64; n];
    loop {
        if shape.contains(&1) {
            let sum: BigInt = eq
                .coefficients
                .iter()
                .zip(&shape)
                .map(|(k, &e)| k * &powers[e as usize])
                .sum();
            if sum.is_zero() {
                out.push(shape.clone());
            }
        }
        // Odometer.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if shape[i] < hi {
                shape[i] += 1;
                break;
            }
            shape[i] = 1;
        }
    }
}

/// Complete solution set of a homogeneous equation over `Powers(q)^n` as a
/// finite union of scale orbits.
///
/// A proper zero-sum coordinate subset whose complement is independently
/// solvable would put a freely movable scale level into the solutions; such
/// sets are multi-parameter families which this representation cannot carry,
/// and are reported as an error (reachable only for arity 4 and up).
pub fn solve_powers(
    eq: &EquationSpec,
    q: &BigUint,
) -> Result<Vec<ScaleOrbitFamily>, EquationError> {
    if *q < BigUint::from(2u32) {
        return Err(EquationError::BaseTooSmall(q.clone()));
    }
    eq.require_homogeneous()?;
    let n = eq.arity();
    // Hazard scan over proper nonempty zero-sum subsets.
    if n >= 2 {
        for mask in 1..((1u32 << n) - 1) {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sum: BigInt = subset.iter().map(|&i| &eq.coefficients[i]).sum();
            if !sum.is_zero() {
                continue;
            }
            let rest: Vec<BigInt> = (0..n)
                .filter(|i| mask >> i & 1 == 0)
                .map(|i| eq.coefficients[i].clone())
                .collect();
            let rest_eq = EquationSpec::new(rest).expect("nonzero coefficients");
            let bound = spread_bound(&rest_eq, q);
            if !bounded_exponent_shapes(&rest_eq, q, bound).is_empty() {
                return Err(EquationError::UnboundedFamilyStructure { subset });
            }
        }
    }
    let bound = spread_bound(eq, q);
    let mut families: Vec<ScaleOrbitFamily> = bounded_exponent_shapes(eq, q, bound)
        .into_iter()
        .map(|shape| ScaleOrbitFamily::new(shape, q.clone()))
        .collect();
    families.sort();
    Ok(families)
}

/// Per-block assignment inside a factorial solution family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockValue {
    /// A pinned set element (0 participates as an ordinary value).
    Fixed(BigUint),
    /// A parameter ranging over the whole factorial set.
    Free { param: usize },
}

/// One family of factorial solutions: a partition of the coordinates into
/// blocks of equal value, per-block values, and explicit distinctness
/// side-conditions between block values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactorialFamily {
    /// Blocks of 0-based coordinate indices, sorted by least member.
    pub partition: Vec<Vec<usize>>,
    /// Parallel to `partition`.
    pub values: Vec<BlockValue>,
    /// Pairs of block indices whose values must differ (every pair that
    /// involves a free parameter; pinned values are distinct by
    /// construction).
    pub distinct_pairs: Vec<(usize, usize)>,
}

/// Complete description of the solutions over `Fac^n`: parameterized
/// families plus a finite sporadic list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactorialSolutionDescription {
    pub arity: usize,
    pub families: Vec<FactorialFamily>,
    pub sporadic: Vec<Vec<BigUint>>,
}

impl FactorialFamily {
    /// Tuples of the family with every coordinate drawn from `pool`.
    pub fn materialize_within(&self, pool: &[BigUint]) -> BTreeSet<Vec<BigUint>> {
        let pool_set: BTreeSet<&BigUint> = pool.iter().collect();
        let n = self.partition.iter().map(|b| b.len()).sum();
        let free_blocks: Vec<usize> = self
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| matches!(v, BlockValue::Free { .. }).then_some(i))
            .collect();
        let mut out = BTreeSet::new();
        let mut choice = vec![0usize; free_blocks.len()];
        'outer: loop {
            let mut block_vals: Vec<Option<&BigUint>> = self
                .values
                .iter()
                .map(|v| match v {
                    BlockValue::Fixed(x) => pool_set.contains(x).then_some(x),
                    BlockValue::Free { .. } => None,
                })
                .collect();
            for (slot, &b) in free_blocks.iter().enumerate() {
                block_vals[b] = Some(&pool[choice[slot]]);
            }
            let ok = block_vals.iter().all(|v| v.is_some())
                && self
                    .distinct_pairs
                    .iter()
                    .all(|&(i, j)| block_vals[i] != block_vals[j]);
            if ok {
                let mut tuple = vec![BigUint::zero(); n];
                for (b, block) in self.partition.iter().enumerate() {
                    for &i in block {
                        tuple[i] = block_vals[b].expect("checked").clone();
                    }
                }
                out.insert(tuple);
            }
            // Odometer over the free-parameter choices.
            if free_blocks.is_empty() {
                break;
            }
            let mut i = choice.len();
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                if choice[i] + 1 < pool.len() {
                    choice[i] += 1;
                    break;
                }
                choice[i] = 0;
            }
        }
        out
    }
}

impl FactorialSolutionDescription {
    /// Every solution tuple whose coordinates all come from `pool`.
    pub fn materialize_within(&self, pool: &[BigUint]) -> BTreeSet<Vec<BigUint>> {
        let pool_set: BTreeSet<&BigUint> = pool.iter().collect();
        let mut out: BTreeSet<Vec<BigUint>> = self
            .sporadic
            .iter()
            .filter(|t| t.iter().all(|x| pool_set.contains(x)))
            .cloned()
            .collect();
        for f in &self.families {
            out.extend(f.materialize_within(pool));
        }
        out
    }
}

/// All set partitions of `{0..n-1}` via restricted growth strings; blocks
/// come out sorted by least member.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, assign: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            let mut partition = vec![Vec::new(); blocks];
            for (idx, &b) in assign.iter().enumerate() {
                partition[b].push(idx);
            }
            out.push(partition);
            return;
        }
        for b in 0..=blocks {
            assign.push(b);
            rec(i + 1, n, assign, blocks.max(b + 1), out);
            assign.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Complete description of `{x ∈ Fac^n : sum k_i x_i = 0}`.
///
/// Coordinates sharing a value are grouped by a set partition; zero-sum
/// blocks contribute a free parameter each, the remaining blocks satisfy a
/// residual equation over pairwise-distinct set values whose factorial
/// arguments the growth of `m!` bounds by the coefficient mass.
pub fn solve_factorials(
    eq: &EquationSpec,
) -> Result<FactorialSolutionDescription, EquationError> {
    eq.require_homogeneous()?;
    let n = eq.arity();
    let mut families = Vec::new();
    let mut sporadic: BTreeSet<Vec<BigUint>> = BTreeSet::new();
    for partition in set_partitions(n) {
        let sums: Vec<BigInt> = partition
            .iter()
            .map(|block| block.iter().map(|&i| &eq.coefficients[i]).sum())
            .collect();
        let pinned: Vec<usize> = (0..partition.len()).filter(|&j| !sums[j].is_zero()).collect();
        let free: Vec<usize> = (0..partition.len()).filter(|&j| sums[j].is_zero()).collect();
        // Candidate values for pinned blocks: 0 and m! for m up to the
        // coefficient mass of the residual equation.
        let mass: u64 = pinned
            .iter()
            .map(|&j| {
                let m = sums[j].magnitude();
                m.try_into().unwrap_or(u64::MAX)
            })
            .sum();
        let mut candidates: Vec<BigUint> = vec![BigUint::zero()];
        let mut fact = BigUint::one();
        for m in 1..=mass {
            fact *= BigUint::from(m);
            if candidates.last() != Some(&fact) {
                candidates.push(fact.clone());
            }
        }
        if mass >= 1 && !candidates.contains(&BigUint::one()) {
            candidates.insert(1, BigUint::one());
        }
        // Enumerate pairwise-distinct assignments to the pinned blocks.
        for assignment in distinct_assignments(&candidates, pinned.len()) {
            let total: BigInt = pinned
                .iter()
                .zip(&assignment)
                .map(|(&j, v)| &sums[j] * BigInt::from((*v).clone()))
                .sum();
            if !total.is_zero() {
                continue;
            }
            if free.is_empty() {
                let mut tuple = vec![BigUint::zero(); n];
                for (slot, &j) in pinned.iter().enumerate() {
                    for &i in &partition[j] {
                        tuple[i] = assignment[slot].clone();
                    }
                }
                sporadic.insert(tuple);
            } else {
                let mut values = vec![BlockValue::Free { param: 0 }; partition.len()];
                for (slot, &j) in pinned.iter().enumerate() {
                    values[j] = BlockValue::Fixed(assignment[slot].clone());
                }
                for (param, &j) in free.iter().enumerate() {
                    values[j] = BlockValue::Free { param };
                }
                let mut distinct_pairs = Vec::new();
                for a in 0..partition.len() {
                    for b in a + 1..partition.len() {
                        let involves_free = matches!(values[a], BlockValue::Free { .. })
                            || matches!(values[b], BlockValue::Free { .. });
                        if involves_free {
                            distinct_pairs.push((a, b));
                        }
                    }
                }
                families.push(FactorialFamily { partition: partition.clone(), values, distinct_pairs });
            }
        }
    }
    families.sort();
    families.dedup();
    Ok(FactorialSolutionDescription {
        arity: n,
        families,
        sporadic: sporadic.into_iter().collect(),
    })
}

/// Ordered selections of `r` pairwise-distinct values from `candidates`.
fn distinct_assignments(candidates: &[BigUint], r: usize) -> Vec<Vec<&BigUint>> {
    fn rec<'a>(
        candidates: &'a [BigUint],
        r: usize,
        acc: &mut Vec<&'a BigUint>,
        out: &mut Vec<Vec<&'a BigUint>>,
    ) {
        if acc.len() == r {
            out.push(acc.clone());
            return;
        }
        for v in candidates {
            if !acc.contains(&v) {
                acc.push(v);
                rec(candidates, r, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(candidates, r, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionClass {
    InfiniteProjection,
    FiniteProjection,
}

/// Marks each block of the partition by whether the projection of the
/// partition's solution set onto the block is infinite: exactly when the
/// block's coefficient sum vanishes.
pub fn block_sum_classify(
    eq: &EquationSpec,
    partition: &[Vec<usize>],
) -> Result<Vec<ProjectionClass>, EquationError> {
    let n = eq.arity();
    let mut seen = vec![false; n];
    for block in partition {
        for &i in block {
            if i >= n || seen[i] {
                return Err(EquationError::MalformedPartition);
            }
            seen[i] = true;
        }
    }
    if !seen.iter().all(|s| *s) {
        return Err(EquationError::MalformedPartition);
    }
    Ok(partition
        .iter()
        .map(|block| {
            let sum: BigInt = block.iter().map(|&i| &eq.coefficients[i]).sum();
            if sum.is_zero() {
                ProjectionClass::InfiniteProjection
            } else {
                ProjectionClass::FiniteProjection
            }
        })
        .collect())
}

/// Exhaustive solutions over the grid of the first `element_bound` set
/// elements, in lexicographic order of the index tuples.
pub fn brute_force_solutions(
    eq: &EquationSpec,
    s: &SparseSetDescriptor,
    element_bound: usize,
) -> Result<Vec<Vec<BigUint>>, EquationError> {
    brute_force_solutions_with(eq, s, element_bound, 1, DEFAULT_GRID_CAP)
}

/// Brute force with an explicit worker count and grid cap. Workers partition
/// the grid on the first coordinate and results are merged in index order,
/// so the output never depends on `jobs`.
pub fn brute_force_solutions_with(
    eq: &EquationSpec,
    s: &SparseSetDescriptor,
    element_bound: usize,
    jobs: usize,
    cap: usize,
) -> Result<Vec<Vec<BigUint>>, EquationError> {
    let n = eq.arity();
    let grid = s.prefix_elements(element_bound)?;
    let size = (grid.len() as u128).pow(n as u32);
    if size > cap as u128 {
        return Err(EquationError::GridTooLarge { size, cap });
    }
    let values: Vec<BigInt> = grid.iter().map(|v| BigInt::from(v.clone())).collect();
    let scan = |first_range: std::ops::Range<usize>| -> Vec<Vec<BigUint>> {
        let mut out = Vec::new();
        if n == 0 || grid.is_empty() {
            return out;
        }
        let mut idx = vec![0usize; n];
        for first in first_range {
            idx[0] = first;
            for slot in idx.iter_mut().skip(1) {
                *slot = 0;
            }
            loop {
                let sum: BigInt = eq
                    .coefficients
                    .iter()
                    .zip(&idx)
                    .map(|(k, &i)| k * &values[i])
                    .sum();
                if sum == eq.rhs {
                    out.push(idx.iter().map(|&i| grid[i].clone()).collect());
                }
                // Advance positions 1..n; position 0 is fixed per chunk.
                let mut j = n;
                let mut done = false;
                loop {
                    if j == 1 {
                        done = true;
                        break;
                    }
                    j -= 1;
                    if idx[j] + 1 < grid.len() {
                        idx[j] += 1;
                        break;
                    }
                    idx[j] = 0;
                }
                if done {
                    break;
                }
            }
        }
        out
    };
    let jobs = jobs.max(1).min(grid.len().max(1));
    if jobs == 1 || n == 0 || grid.is_empty() {
        return Ok(scan(0..grid.len()));
    }
    let chunk = grid.len().div_ceil(jobs);
    let ranges: Vec<std::ops::Range<usize>> = (0..jobs)
        .map(|w| (w * chunk).min(grid.len())..((w + 1) * chunk).min(grid.len()))
        .collect();
    let mut merged = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| scope.spawn(|| scan(r)))
            .collect();
        for h in handles {
            merged.extend(h.join().expect("worker panicked"));
        }
    });
    Ok(merged)
}
