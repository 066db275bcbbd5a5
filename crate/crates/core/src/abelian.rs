//! Subgroups of `Z^n`: Smith-adapted bases, membership, index, and the
//! automorphism-invariance check that refutes definability of subgroups like
//! `3Z ⊕ 2Z` in the pure group structure.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("ambient rank must be at least 1")]
    ZeroRank,
    #[error("generator {index} has length {got}, expected the ambient rank {rank}")]
    DimensionMismatch { index: usize, got: usize, rank: usize },
    #[error("vector has length {got}, expected the ambient rank {rank}")]
    BadVector { got: usize, rank: usize },
}

/// A subgroup of `Z^rank` given by (possibly redundant) generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    rank: usize,
    generators: Vec<Vec<BigInt>>,
}

/// A basis `z_1,...,z_n` of `Z^n` (unimodular column matrix) and divisors
/// `d_1 | d_2 | ... | d_k` such that `d_1 z_1,...,d_k z_k` generate the
/// lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBasis {
    /// Basis vectors (columns of the unimodular matrix).
    pub basis: Vec<Vec<BigInt>>,
    /// Cached inverse (row-major): coordinates of `v` are `basis_inv * v`.
    pub basis_inv: Vec<Vec<BigInt>>,
    pub divisors: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigUint),
    Infinite,
}

/// Outcome of the invariance check, with a refutation when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacteristicResult {
    Characteristic,
    Refuted {
        /// An automorphism (as a matrix) moving the lattice off itself.
        matrix: Vec<Vec<BigInt>>,
        generator: Vec<BigInt>,
        image: Vec<BigInt>,
    },
}

impl CharacteristicResult {
    pub fn is_characteristic(&self) -> bool {
        matches!(self, CharacteristicResult::Characteristic)
    }
}

impl IntegerLattice {
    pub fn new(rank: usize, generators: Vec<Vec<BigInt>>) -> Result<Self, AbelianError> {
        if rank == 0 {
            return Err(AbelianError::ZeroRank);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.len() != rank {
                return Err(AbelianError::DimensionMismatch { index, got: g.len(), rank });
            }
        }
        Ok(IntegerLattice { rank, generators })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Smith-adapted basis with a deterministic smallest-pivot reduction.
    pub fn smith_basis(&self) -> AdaptedBasis {
        let n = self.rank;
        let g = self.generators.len();
        // m: n x g generator matrix (columns are generators).
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..g).map(|j| self.generators[j][i].clone()).collect())
            .collect();
        // Row operations R (m -> R m C): basis = columns of R^-1,
        // coordinates come from R itself.
        let mut r = identity(n);
        let mut r_inv = identity(n);

        let steps = n.min(g);
        for t in 0..steps {
            loop {
                // Smallest nonzero entry in the remaining block, ties toward
                // the smallest row then column index.
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..g {
                        if m[i][j].is_zero() {
                            continue;
                        }
                        let better = match pivot {
                            None => true,
                            Some((pi, pj)) => m[i][j].magnitude() < m[pi][pj].magnitude(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = pivot else { break };
                if pi != t {
                    m.swap(pi, t);
                    r.swap(pi, t);
                    swap_cols(&mut r_inv, pi, t);
                }
                if pj != t {
                    for row in m.iter_mut() {
                        row.swap(pj, t);
                    }
                }
                if m[t][t].is_negative() {
                    negate_row(&mut m, t);
                    negate_row(&mut r, t);
                    negate_col(&mut r_inv, t);
                }
                let mut dirty = false;
                // Clear the pivot column by row operations.
                for i in t + 1..n {
                    if m[i][t].is_zero() {
                        continue;
                    }
                    let q = m[i][t].div_floor(&m[t][t]);
                    row_sub(&mut m, i, t, &q);
                    row_sub(&mut r, i, t, &q);
                    col_add(&mut r_inv, t, i, &q);
                    if !m[i][t].is_zero() {
                        dirty = true;
                    }
                }
                // Clear the pivot row by column operations (untracked).
                for j in t + 1..g {
                    if m[t][j].is_zero() {
                        continue;
                    }
                    let q = m[t][j].div_floor(&m[t][t]);
                    for row in m.iter_mut() {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                    }
                    if !m[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                // Pivot divides the rest of the block, or absorb a bad row.
                let offender = (t + 1..n)
                    .flat_map(|i| (t + 1..g).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
                match offender {
                    Some((i, _)) => {
                        let one = BigInt::from(-1);
                        row_sub(&mut m, t, i, &one);
                        row_sub(&mut r, t, i, &one);
                        col_add(&mut r_inv, i, t, &one);
                    }
                    None => break,
                }
            }
        }
        let divisors: Vec<BigUint> = (0..steps)
            .map(|t| m[t][t].magnitude().clone())
            .take_while(|d| !d.is_zero())
            .collect();
        let basis = (0..n)
            .map(|j| (0..n).map(|i| r_inv[i][j].clone()).collect())
            .collect();
        AdaptedBasis { basis, basis_inv: r, divisors }
    }

    /// Exact membership via the adapted basis: coordinates must be divisible
    /// by the matching divisors and vanish beyond the lattice rank.
    pub fn membership(&self, v: &[BigInt]) -> Result<bool, AbelianError> {
        if v.len() != self.rank {
            return Err(AbelianError::BadVector { got: v.len(), rank: self.rank });
        }
        Ok(self.smith_basis().contains(v))
    }

    /// `prod d_i` when the lattice has full rank, infinite otherwise.
    pub fn index(&self) -> LatticeIndex {
        let adapted = self.smith_basis();
        if adapted.divisors.len() == self.rank {
            LatticeIndex::Finite(adapted.divisors.iter().product())
        } else {
            LatticeIndex::Infinite
        }
    }

    /// Invariance under the generators of the automorphism group of `Z^n`
    /// (transvections in both signs, swaps, one reflection); sufficiency by
    /// generation, since an invariant full set of generators pins the image
    /// inside the lattice.
    pub fn is_characteristic(&self) -> CharacteristicResult {
        let adapted = self.smith_basis();
        for a in automorphism_generators(self.rank) {
            for g in &self.generators {
                let image = mat_vec(&a, g);
                if !adapted.contains(&image) {
                    return CharacteristicResult::Refuted {
                        matrix: a,
                        generator: g.clone(),
                        image,
                    };
                }
            }
        }
        CharacteristicResult::Characteristic
    }
}

impl AdaptedBasis {
    /// Membership against this decomposition.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        let n = self.basis.len();
        let coords = mat_vec(&self.basis_inv, v);
        coords.iter().enumerate().all(|(i, c)| {
            if i < self.divisors.len() {
                (c % BigInt::from(self.divisors[i].clone())).is_zero()
            } else {
                c.is_zero()
            }
        }) && v.len() == n
    }

    /// `|det|` of the basis matrix; 1 for every well-formed output.
    pub fn basis_det_abs(&self) -> BigUint {
        let n = self.basis.len();
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.basis[j][i].clone()).collect())
            .collect();
        determinant(m).magnitude().clone()
    }

    /// The lattice generated by `d_i z_i`.
    pub fn generated_lattice(&self) -> IntegerLattice {
        let n = self.basis.len();
        let gens: Vec<Vec<BigInt>> = self
            .divisors
            .iter()
            .enumerate()
            .map(|(i, d)| {
                self.basis[i]
                    .iter()
                    .map(|x| x * BigInt::from(d.clone()))
                    .collect()
            })
            .collect();
        IntegerLattice::new(n, gens).expect("well-formed by construction")
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn negate_row(m: &mut [Vec<BigInt>], i: usize) {
    for x in m[i].iter_mut() {
        *x = -&*x;
    }
}

fn negate_col(m: &mut [Vec<BigInt>], j: usize) {
    for row in m.iter_mut() {
        row[j] = -&row[j];
    }
}

/// row[i] -= q * row[t]
fn row_sub(m: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    for j in 0..m[i].len() {
        let sub = q * &m[t][j];
        m[i][j] -= sub;
    }
}

/// col[j] += q * col[i] (the inverse update of the row operation).
fn col_add(m: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let add = q * &row[j];
        row[i] += add;
    }
}

pub fn mat_vec(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let k = b[0].len();
    (0..n)
        .map(|i| {
            (0..k)
                .map(|j| (0..b.len()).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

/// Bareiss fraction-free determinant.
fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for t in 0..n - 1 {
        if m[t][t].is_zero() {
            let Some(swap) = (t + 1..n).find(|&i| !m[i][t].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(t, swap);
            sign = -sign;
        }
        for i in t + 1..n {
            for j in t + 1..n {
                let num = &m[i][j] * &m[t][t] - &m[i][t] * &m[t][j];
                m[i][j] = num / &prev;
            }
            m[i][t] = BigInt::zero();
        }
        prev = m[t][t].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Generators of `GL_n(Z)`: transvections `x_i += ±x_j`, swaps, and one
/// reflection. Inverses are included, so invariance extends to the group.
pub fn automorphism_generators(n: usize) -> Vec<Vec<Vec<BigInt>>> {
    let mut out = Vec::new();
    let mut reflection = identity(n);
    reflection[0][0] = -BigInt::one();
    out.push(reflection);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for sign in [1i32, -1] {
                let mut t = identity(n);
                t[i][j] = BigInt::from(sign);
                out.push(t);
            }
            if i < j {
                let mut s = identity(n);
                s[i][i] = BigInt::zero();
                s[j][j] = BigInt::zero();
                s[i][j] = BigInt::one();
                s[j][i] = BigInt::one();
                out.push(s);
            }
        }
    }
    out
}

/// Deterministic pseudo-random unimodular matrix: a seeded product of
/// elementary generators. Used by verification modes and tests.
pub fn unimodular_product(n: usize, steps: usize, seed: u64) -> Vec<Vec<BigInt>> {
    let gens = automorphism_generators(n);
    let mut state = seed;
    let mut next = || {
        // splitmix64
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut m = identity(n);
    for _ in 0..steps {
        let pick = (next() % gens.len() as u64) as usize;
        m = mat_mul(&gens[pick], &m);
    }
    m
}
