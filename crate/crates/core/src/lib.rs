//! Exact arithmetic over the integers expanded by a sparse predicate.
//!
//! The crate revolves around subsets of the naturals whose consecutive gaps
//! eventually grow strictly — powers of a base `q`, iterated power towers,
//! factorials — and the structure the ambient group `(Z,+,0)` induces on them:
//!
//! * [`sparse`] — descriptors for the supported sets with exact membership,
//!   enumeration, and the gap-growth check;
//! * [`formula`] — linear formulas with congruence atoms and quantifiers
//!   bounded to a predicate `P`, with parser, printer, disjunctive normal
//!   form, and a three-valued evaluator;
//! * [`exponent`] — residue analysis: which powers of `q` (or factorials)
//!   land in a fixed congruence class, described by exponent progressions;
//! * [`equations`] — complete solution descriptions of homogeneous linear
//!   equations restricted to powers or factorials, against a brute-force
//!   oracle;
//! * [`induced`] — the successor-plus-congruence structure on exponents:
//!   translation of equation/congruence predicates, quantifier elimination,
//!   and type counting;
//! * [`gamma`] — coset-covering impossibility and satisfiability of
//!   parameterized constraint schemes, with independently verified witnesses;
//! * [`abelian`] — adapted (Smith) bases of subgroups of `Z^n`, membership,
//!   index, and the characteristic-subgroup invariance check.
//!
//! All values are arbitrary precision and immutable; every operation is a
//! pure function, safe to call concurrently.

pub mod abelian;
pub mod equations;
pub mod exponent;
pub mod formula;
pub mod gamma;
pub mod induced;
pub mod sparse;
