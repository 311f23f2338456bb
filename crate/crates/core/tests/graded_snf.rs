use dgtot_core::graded::{GradedMatrix, TwistedFreeModule, Window};
use dgtot_core::linalg::Mat;
use dgtot_core::obstruction::{resolve_degreewise, resolve_univariate};
use dgtot_core::univariate::graded_diagonalize;
use dgtot_core::{Field, Monomial, Poly, PolyRing, Ring};
use proptest::prelude::*;

fn qx() -> Ring {
    PolyRing::new(Field::Rationals, vec!["x".to_string()]).unwrap()
}

#[derive(Clone, Debug)]
struct Data {
    rows: Vec<i64>,
    cols: Vec<i64>,
    coeffs: Vec<Vec<i64>>,
}

fn data() -> impl Strategy<Value = Data> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(nr, nc)| {
            (
                proptest::collection::vec(0i64..=4, nr),
                proptest::collection::vec(0i64..=7, nc),
                proptest::collection::vec(proptest::collection::vec(-2i64..=2, nc), nr),
            )
        })
        .prop_map(|(rows, cols, coeffs)| Data { rows, cols, coeffs })
}

fn build(r: &Ring, d: &Data) -> GradedMatrix {
    let f = r.field();
    let entries = d
        .rows
        .iter()
        .zip(&d.coeffs)
        .map(|(ri, row)| {
            row.iter()
                .zip(&d.cols)
                .map(|(&a, &c)| if c >= *ri { Poly::term(r, Monomial(vec![(c - ri) as u32]), f.from_i64(a)) } else { Poly::zero(r) })
                .collect()
        })
        .collect();
    GradedMatrix::new(TwistedFreeModule::new(r, d.cols.clone()), TwistedFreeModule::new(r, d.rows.clone()), entries).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Exponent of the k-th determinantal divisor. A homogeneous k-minor is `det(α) x^{Σc - Σr}`,
/// so the gcd of all k-minors is `x` to the least exponent among nonzero ones.
fn determinantal_exponent(p: &GradedMatrix, k: usize) -> Option<i64> {
    let f = p.ring().field();
    let mut best: Option<i64> = None;
    for rows in subsets(p.nrows(), k) {
        for cols in subsets(p.ncols(), k) {
            let m = Mat::from_rows(
                f,
                k,
                rows.iter()
                    .map(|&i| cols.iter().map(|&j| p.entry(i, j).terms().next().map(|t| t.1.clone()).unwrap_or_else(|| f.zero())).collect())
                    .collect(),
            );
            if m.rank() == k {
                let e = cols.iter().map(|&j| p.source().twists()[j]).sum::<i64>() - rows.iter().map(|&i| p.target().twists()[i]).sum::<i64>();
                best = Some(best.map_or(e, |b: i64| b.min(e)));
            }
        }
    }
    best
}

/// Unipotent automorphism of a twisted free module with random entries where degrees allow.
fn unipotent(r: &Ring, twists: &[i64], seed: &[i64]) -> GradedMatrix {
    let f = r.field();
    let m = TwistedFreeModule::new(r, twists.to_vec());
    let mut out = GradedMatrix::identity(&m);
    let mut s = seed.iter().cycle();
    for i in 0..twists.len() {
        for k in 0..twists.len() {
            if (twists[i], i) < (twists[k], k) {
                let a = *s.next().unwrap();
                out.set(i, k, Poly::term(r, Monomial(vec![(twists[k] - twists[i]) as u32]), f.from_i64(a)));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_form_matches_determinantal_divisors(d in data()) {
        let r = qx();
        let p = build(&r, &d);
        let snf = graded_diagonalize(&p).unwrap();
        snf.verify(&p).unwrap();
        let mut degs: Vec<i64> = snf.pairs.iter().map(|(r, c)| c - r).collect();
        degs.sort();
        let rank = (1..=p.nrows().min(p.ncols())).take_while(|&k| determinantal_exponent(&p, k).is_some()).count();
        prop_assert_eq!(degs.len(), rank);
        for k in 1..=rank {
            prop_assert_eq!(determinantal_exponent(&p, k), Some(degs[..k].iter().sum::<i64>()));
        }
        prop_assert_eq!(snf.free_rows.len(), p.nrows() - rank);
        prop_assert_eq!(snf.zero_columns.len(), p.ncols() - rank);
    }

    #[test]
    fn diagonal_form_is_invariant(d in data(), seed in proptest::collection::vec(-2i64..=2, 1..8)) {
        let r = qx();
        let p = build(&r, &d);
        let a = unipotent(&r, &d.rows, &seed);
        let b = unipotent(&r, &d.cols, &seed);
        let q = a.compose(&p).unwrap().compose(&b).unwrap();
        let s1 = graded_diagonalize(&p).unwrap();
        let s2 = graded_diagonalize(&q).unwrap();
        let sorted = |mut v: Vec<i64>| { v.sort(); v };
        prop_assert_eq!(&s1.pairs, &s2.pairs);
        prop_assert_eq!(sorted(s1.free_rows.clone()), sorted(s2.free_rows.clone()));
        prop_assert_eq!(sorted(s1.zero_columns.clone()), sorted(s2.zero_columns.clone()));
    }

    #[test]
    fn resolution_paths_agree(d in data()) {
        let r = qx();
        let p = build(&r, &d);
        let lo = *d.rows.iter().min().unwrap();
        let hi = 2 * d.cols.iter().max().unwrap() + 10;
        let w = Window::new(lo, hi);
        let a = resolve_degreewise(&p, w).unwrap();
        let b = resolve_univariate(&p, w).unwrap();
        prop_assert!(a.certified);
        prop_assert_eq!(a.betti_table(), b.betti_table());
        prop_assert!(a.is_minimal() && a.is_complex());
        prop_assert!(a.exactness_defects(w).is_empty());
    }
}

#[test]
fn rank_one_two_by_two() {
    let r = qx();
    let p = build(&r, &Data { rows: vec![0, 1], cols: vec![3, 2], coeffs: vec![vec![1, 1], vec![1, 1]] });
    let s = graded_diagonalize(&p).unwrap();
    assert_eq!(s.pairs, vec![(1, 2)]);
    assert_eq!(s.free_rows, vec![0]);
    assert_eq!(s.zero_columns, vec![3]);
    assert_eq!(determinantal_exponent(&p, 1), Some(1));
    assert_eq!(determinantal_exponent(&p, 2), None);
}
