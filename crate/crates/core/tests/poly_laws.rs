use dgtot_core::linalg::Mat;
use dgtot_core::{Field, Monomial, Poly, PolyRing, Ring};
use proptest::prelude::*;

fn ring(field: Field) -> Ring {
    PolyRing::new(field, vec!["x".into(), "y".into(), "z".into()]).unwrap()
}

fn terms() -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    proptest::collection::vec((proptest::collection::vec(0u32..3, 3), -5i64..=5), 0..5)
}

fn build(r: &Ring, terms: &[(Vec<u32>, i64)]) -> Poly {
    let f = r.field();
    Poly::from_terms(r, terms.iter().map(|(e, c)| (Monomial(e.clone()), f.from_i64(*c))))
}

proptest! {
    #[test]
    fn ring_axioms(a in terms(), b in terms(), c in terms()) {
        for field in [Field::Rationals, Field::Prime(7)] {
            let r = ring(field);
            let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }
    }

    #[test]
    fn products_of_homogeneous_are_homogeneous(a in terms(), b in terms()) {
        let r = ring(Field::Rationals);
        let (a, b) = (build(&r, &a), build(&r, &b));
        let comps_a = a.homogeneous_components();
        let comps_b = b.homogeneous_components();
        for (da, pa) in &comps_a {
            for (db, pb) in &comps_b {
                let p = pa * pb;
                prop_assert!(p.is_zero() || p.is_homogeneous_of((da + db) as i64));
            }
        }
    }

    #[test]
    fn rank_nullity(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 5), 1..6)) {
        for field in [Field::Rationals, Field::Prime(5)] {
            let m = Mat::from_rows(field, 5, rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect());
            let ker = m.kernel();
            prop_assert_eq!(m.rank() + ker.len(), 5);
            for v in &ker {
                prop_assert!(m.apply(v).iter().all(|c| c.is_zero()));
            }
            let b = m.apply(&(0..5).map(|i| field.from_i64(i)).collect::<Vec<_>>());
            let x = m.solve(&b).unwrap();
            prop_assert_eq!(m.apply(&x), b);
        }
    }
}
