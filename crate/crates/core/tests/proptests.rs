//! Property-based invariants: printer/parser round trips, DNF equivalence on
//! sampled assignments, evaluation monotonicity, and the exponent-set
//! boolean algebra.

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use sparith::exponent::power_residue_class;
use sparith::formula::{
    evaluate, evaluate_clauses, parse_formula, to_dnf, Atom, EvalOptions, Formula, LinearTerm,
    Quantifier, Truth,
};
use sparith::sparse::SparseSetDescriptor;
use std::collections::BTreeMap;

fn arb_term() -> impl Strategy<Value = LinearTerm> {
    (
        proptest::collection::vec(("[abc]", -5i64..=5), 0..3),
        -6i64..=6,
    )
        .prop_map(|(pairs, c)| {
            let mut t = LinearTerm::zero();
            for (v, k) in pairs {
                if k != 0 {
                    t.add_coeff(v, BigInt::from(k));
                }
            }
            t.add_constant(BigInt::from(c));
            t
        })
}

fn arb_atom() -> impl Strategy<Value = Formula> {
    (arb_term(), 0u8..3, 2u32..=12).prop_map(|(t, kind, n)| {
        Formula::Atom(match kind {
            0 => Atom::eq0(t),
            1 => Atom::neq0(t),
            _ => Atom::congruence(t, n.into()),
        })
    })
}

fn arb_qf_formula() -> impl Strategy<Value = Formula> {
    arb_atom().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::or(l, r)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printer_round_trips(f in arb_qf_formula()) {
        let printed = f.to_string();
        let reparsed = parse_formula(&printed).unwrap();
        prop_assert_eq!(f, reparsed, "through {}", printed);
    }

    #[test]
    fn dnf_preserves_truth_on_sampled_points(
        f in arb_qf_formula(),
        a in -6i64..=6,
        b in -6i64..=6,
        c in -6i64..=6,
    ) {
        let clauses = to_dnf(&f).unwrap();
        let env: BTreeMap<String, BigInt> = [("a", a), ("b", b), ("c", c)]
            .into_iter()
            .map(|(v, x)| (v.to_string(), BigInt::from(x)))
            .collect();
        let p = SparseSetDescriptor::powers(2u32.into()).unwrap();
        let direct = evaluate(&f, &env, &p, &EvalOptions::default()).unwrap().value;
        let via_dnf = evaluate_clauses(&clauses, &env).unwrap();
        prop_assert_eq!(direct, Truth::from(via_dnf));
    }

    #[test]
    fn exists_in_p_monotone_in_depth(f in arb_qf_formula(), depth in 1usize..12) {
        // Wrap each free variable in an existential bounded prefix; once the
        // scan proves it true, larger depths must agree.
        let mut wrapped = f;
        for v in wrapped.free_vars() {
            wrapped = Formula::Quant {
                quantifier: Quantifier::Exists,
                var: v,
                in_p: true,
                body: Box::new(wrapped),
            };
        }
        let p = SparseSetDescriptor::powers(2u32.into()).unwrap();
        let env = BTreeMap::new();
        let shallow = EvalOptions { p_depth: depth, ..Default::default() };
        let deep = EvalOptions { p_depth: depth + 7, ..Default::default() };
        let at_depth = evaluate(&wrapped, &env, &p, &shallow).unwrap().value;
        let at_deeper = evaluate(&wrapped, &env, &p, &deep).unwrap().value;
        if at_depth == Truth::True {
            prop_assert_eq!(at_deeper, Truth::True);
        }
    }

    #[test]
    fn exponent_set_boolean_algebra(
        q in 2u64..=5,
        n1 in 2u64..=20,
        n2 in 2u64..=20,
        k1 in 0u64..20,
        k2 in 0u64..20,
        probe in 1u64..200,
    ) {
        let (k1, k2) = (k1 % n1, k2 % n2);
        let a = power_residue_class(&BigUint::from(q), &BigUint::from(k1), &BigUint::from(n1))
            .unwrap();
        let b = power_residue_class(&BigUint::from(q), &BigUint::from(k2), &BigUint::from(n2))
            .unwrap();
        prop_assert_eq!(a.union(&b).contains(probe), a.contains(probe) || b.contains(probe));
        prop_assert_eq!(a.intersect(&b).contains(probe), a.contains(probe) && b.contains(probe));
        prop_assert_eq!(a.complement().contains(probe), !a.contains(probe));
    }

    #[test]
    fn nth_element_contained(kind in 0u8..3, i in 0usize..40) {
        let s = match kind {
            0 => SparseSetDescriptor::powers(2u32.into()).unwrap(),
            1 => SparseSetDescriptor::powers(7u32.into()).unwrap(),
            _ => SparseSetDescriptor::factorials(),
        };
        let v = s.nth_element(i).unwrap();
        prop_assert!(s.contains_nat(&v));
        prop_assert_eq!(s.index_of(&v), Some(i as u64));
    }
}
