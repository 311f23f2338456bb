//! Seeded random inputs. Differentials are built column by column, each new column a random
//! cycle of what is already built, so `∂² = 0` holds by construction.

use dgtot_core::complex::GradedComplex;
use dgtot_core::dg::{SemifreeDG, SignConvention};
use dgtot_core::graded::{GradedMatrix, TwistedFreeModule};
use dgtot_core::linalg::{Mat, Vector};
use dgtot_core::{Field, Monomial, Poly, PolyRing, Ring, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Independent stream for instance `index` of a suite run with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn ring(field: Field, vars: &[&str]) -> Ring {
    PolyRing::new(field, vars.iter().map(|v| v.to_string()).collect()).expect("valid ring")
}

fn small_scalar(rng: &mut SeededRng, field: Field) -> Scalar {
    let mut c = 0;
    while c == 0 {
        c = rng.random_range(-3i64..=3);
    }
    field.from_i64(c)
}

/// A sparse random combination of `basis`, or zero with probability `zero_prob`.
fn random_combination(rng: &mut SeededRng, field: Field, n: usize, basis: &[Vector], zero_prob: f64) -> Vector {
    let mut v = vec![field.zero(); n];
    if basis.is_empty() || rng.random_bool(zero_prob) {
        return v;
    }
    for b in basis {
        if rng.random_bool(0.6) {
            let c = small_scalar(rng, field);
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x + &(&c * y);
            }
        }
    }
    v
}

/// Kernel of `m` restricted to coordinates where `allowed` holds.
fn restricted_kernel(field: Field, m: &Mat, allowed: &[bool]) -> Vec<Vector> {
    let n = allowed.len();
    let mut rows: Vec<Vector> = (0..m.nrows()).map(|i| m.row(i).to_vec()).collect();
    for (k, ok) in allowed.iter().enumerate() {
        if !ok {
            let mut r = vec![field.zero(); n];
            r[k] = field.one();
            rows.push(r);
        }
    }
    Mat::from_rows(field, n, rows).kernel()
}

#[derive(Clone, Copy, Debug)]
pub struct ModuleShape {
    pub max_rank: usize,
    pub max_degree: i64,
    pub max_entry_degree: i64,
    /// Probability that a generator gets zero differential.
    pub zero_prob: f64,
}

/// A random semifree DG module with basis degrees in `0..=max_degree`.
pub fn semifree(rng: &mut SeededRng, ring: &Ring, shape: ModuleShape, conv: SignConvention) -> SemifreeDG {
    let field = ring.field();
    let rank = rng.random_range(1..=shape.max_rank);
    let mut degrees: Vec<i64> = (0..rank).map(|_| rng.random_range(0..=shape.max_degree)).collect();
    degrees.sort();
    let labels = (1..=rank).map(|i| format!("e{}", i)).collect();
    let mut m = SemifreeDG::new(ring, labels, degrees.clone(), conv).expect("valid module");
    for j in 0..rank {
        let d = degrees[j] - 1;
        let ambient = m.underlying();
        let allowed: Vec<bool> = ambient
            .piece_basis(d)
            .iter()
            .map(|(g, _)| *g < j && degrees[j] - degrees[*g] - 1 <= shape.max_entry_degree)
            .collect();
        if !allowed.iter().any(|a| *a) {
            continue;
        }
        let ker = restricted_kernel(field, &m.realize(d), &allowed);
        let v = random_combination(rng, field, allowed.len(), &ker, shape.zero_prob);
        let col = ambient.from_coords(d, &v);
        m.set_column(j, col).expect("homogeneous column");
    }
    m
}

#[derive(Clone, Copy, Debug)]
pub struct ComplexShape {
    pub max_rank: usize,
    pub max_positions: usize,
    pub max_twist_spread: i64,
}

/// A random bounded complex of free modules; position `p` has twists in
/// `p - lo .. p - lo + max_twist_spread`.
pub fn complex(rng: &mut SeededRng, ring: &Ring, shape: ComplexShape) -> GradedComplex {
    let field = ring.field();
    let lo = rng.random_range(-1i64..=1);
    let count = rng.random_range(1..=shape.max_positions) as i64;
    let mut x = GradedComplex::new(ring);
    for p in lo..lo + count {
        let rank = rng.random_range(if p == lo { 1 } else { 0 }..=shape.max_rank);
        let base = p - lo;
        let mut twists: Vec<i64> = (0..rank).map(|_| base + rng.random_range(0..=shape.max_twist_spread)).collect();
        twists.sort();
        x.set_module(p, twists, None).expect("fresh position");
    }
    for p in (lo + 1)..lo + count {
        let src = x.module(p);
        let tgt = x.module(p - 1);
        if src.rank() == 0 || tgt.rank() == 0 {
            continue;
        }
        let below = x.diff(p - 1);
        let mut cols: Vec<Vec<Poly>> = Vec::new();
        for &t in src.twists() {
            let n = tgt.piece_dim(t);
            let ker = if below.nrows() == 0 { Mat::identity(field, n).columns() } else { below.realize_degree(t).kernel() };
            let v = random_combination(rng, field, n, &ker, 0.2);
            cols.push(tgt.from_coords(t, &v));
        }
        let rows = (0..tgt.rank()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        x.set_diff_rows(p, rows).expect("homogeneous differential");
    }
    x
}

/// A random homogeneous matrix over a univariate ring.
pub fn univariate_presentation(rng: &mut SeededRng, ring: &Ring, max_rows: usize, max_cols: usize) -> GradedMatrix {
    let field = ring.field();
    let nr = rng.random_range(1..=max_rows);
    let nc = rng.random_range(1..=max_cols);
    let rows: Vec<i64> = (0..nr).map(|_| rng.random_range(0..=5)).collect();
    let cols: Vec<i64> = (0..nc).map(|_| rng.random_range(0..=8)).collect();
    let entries = rows
        .iter()
        .map(|&r| {
            cols.iter()
                .map(|&c| {
                    if c >= r && rng.random_bool(0.6) {
                        Poly::term(ring, Monomial(vec![(c - r) as u32]), small_scalar(rng, field))
                    } else {
                        Poly::zero(ring)
                    }
                })
                .collect()
        })
        .collect();
    GradedMatrix::new(TwistedFreeModule::new(ring, cols), TwistedFreeModule::new(ring, rows), entries).expect("homogeneous")
}

/// A random homogeneous matrix with entries of positive degree over any ring.
pub fn presentation(rng: &mut SeededRng, ring: &Ring, max_rows: usize, max_cols: usize) -> GradedMatrix {
    let field = ring.field();
    let nr = rng.random_range(1..=max_rows);
    let nc = rng.random_range(1..=max_cols);
    let rows: Vec<i64> = (0..nr).map(|_| rng.random_range(0..=1)).collect();
    let cols: Vec<i64> = (0..nc).map(|_| rng.random_range(2..=3)).collect();
    let src = TwistedFreeModule::new(ring, cols.clone());
    let tgt = TwistedFreeModule::new(ring, rows.clone());
    let mut m = GradedMatrix::zero(&src, &tgt);
    for (j, &c) in cols.iter().enumerate() {
        let n = tgt.piece_dim(c);
        let basis = Mat::identity(field, n).columns();
        let v = random_combination(rng, field, n, &basis, 0.0);
        for (i, p) in tgt.from_coords(c, &v).into_iter().enumerate() {
            m.set(i, j, p);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_modules_square_to_zero() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let shape = ModuleShape { max_rank: 4, max_degree: 6, max_entry_degree: 4, zero_prob: 0.2 };
        for i in 0..20 {
            for conv in [SignConvention::Even, SignConvention::Koszul] {
                let m = semifree(&mut instance_rng(7, i), &r, shape, conv);
                assert!(m.validate().is_ok());
            }
        }
    }

    #[test]
    fn generated_complexes_square_to_zero() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let shape = ComplexShape { max_rank: 3, max_positions: 3, max_twist_spread: 2 };
        for i in 0..20 {
            assert!(complex(&mut instance_rng(3, i), &r, shape).validate().is_ok());
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let r = ring(Field::Rationals, &["x"]);
        let shape = ModuleShape { max_rank: 5, max_degree: 10, max_entry_degree: 8, zero_prob: 0.2 };
        let a = semifree(&mut instance_rng(42, 3), &r, shape, SignConvention::Even);
        let b = semifree(&mut instance_rng(42, 3), &r, shape, SignConvention::Even);
        assert_eq!(a, b);
    }
}
