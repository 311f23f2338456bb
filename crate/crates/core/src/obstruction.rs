//! The rank-versus-Betti obstruction: a minimal semifree `M` whose homology is indecomposable
//! and whose rank differs from the total Betti number of `H(M)` is not quasi-isomorphic to the
//! totaling of any complex of graded free modules.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::dg::{certify, dg_homology, generator_map, preimage, HomologyPresentation, SemifreeDG};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::graded::{graded_min_gens, GradedMatrix, TwistedFreeModule, Window};
use crate::linalg::{is_zero_vector, zero_vector, Mat, Subspace, Vector};
use crate::poly::{Poly, Ring};
use crate::univariate::graded_diagonalize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionMethod {
    Degreewise,
    Univariate,
}

impl ResolutionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResolutionMethod::Degreewise => "degreewise",
            ResolutionMethod::Univariate => "univariate",
        }
    }
}

/// `0 <- G_0 <- G_1 <- ... ` with `G_i = ⊕ Σ^j A^{β_{i,j}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiResolution {
    pub window: Window,
    pub method: ResolutionMethod,
    /// Twists of `G_i`.
    pub twists: Vec<Vec<i64>>,
    /// `matrices[i - 1]: G_i -> G_{i-1}`.
    pub matrices: Vec<GradedMatrix>,
    /// Generators of `G_0` as elements of the presenting free module.
    pub augmentation: GradedMatrix,
    pub certified: bool,
    pub suggested_hi: Option<i64>,
}

impl BettiResolution {
    pub fn length(&self) -> usize {
        self.twists.len().saturating_sub(1)
    }

    pub fn betti(&self, i: usize) -> usize {
        self.twists.get(i).map_or(0, |t| t.len())
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.twists.iter().map(|t| t.len()).collect()
    }

    pub fn betti_sum(&self) -> usize {
        self.twists.iter().map(|t| t.len()).sum()
    }

    /// `β_{i,j}`.
    pub fn betti_table(&self) -> BTreeMap<(usize, i64), usize> {
        let mut out = BTreeMap::new();
        for (i, tw) in self.twists.iter().enumerate() {
            for &j in tw {
                *out.entry((i, j)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Multiset of `i + j` over the table: the basis degrees of the totaled resolution.
    pub fn total_degrees(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.twists.iter().enumerate().flat_map(|(i, tw)| tw.iter().map(move |j| j + i as i64)).collect();
        out.sort();
        out
    }

    /// Consecutive composites vanish.
    pub fn is_complex(&self) -> bool {
        self.matrices.windows(2).all(|w| w[0].compose(&w[1]).map(|c| c.is_zero()).unwrap_or(false))
    }

    /// No nonzero constant entries.
    pub fn is_minimal(&self) -> bool {
        self.matrices.iter().all(|m| {
            (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m.entry(i, j).is_zero() || m.entry_degree(i, j) > 0))
        })
    }

    /// `(i, d)` with `dim ker (G_i -> G_{i-1})_d ≠ dim im (G_{i+1} -> G_i)_d`, for `i ≥ 1`
    /// and `d` in `window`.
    pub fn exactness_defects(&self, window: Window) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for i in 1..self.twists.len() {
            let m = &self.matrices[i - 1];
            for d in window.degrees() {
                let dk = m.source().piece_dim(d) - m.realize_degree(d).rank();
                let im = self.matrices.get(i).map_or(0, |n| n.realize_degree(d).rank());
                if dk != im {
                    out.push((i, d));
                }
            }
        }
        out
    }
}

fn ambient_zero(field: Field, m: &TwistedFreeModule, d: i64) -> Subspace {
    Subspace::zero(field, m.piece_dim(d))
}

fn matrix_from_generators(ring: &Ring, gens: &[(i64, Vector)], target: &TwistedFreeModule) -> GradedMatrix {
    let src = TwistedFreeModule::new(ring, gens.iter().map(|g| g.0).collect());
    let mut out = GradedMatrix::zero(&src, target);
    for (c, (d, v)) in gens.iter().enumerate() {
        for (r, p) in target.from_coords(*d, v).into_iter().enumerate() {
            out.set(r, c, p);
        }
    }
    out
}

/// Minimal free resolution of `coker p` by degreewise kernels and minimal generators.
pub fn resolve_degreewise(p: &GradedMatrix, window: Window) -> Result<BettiResolution, Error> {
    p.validate_homogeneity()?;
    let ring = p.ring().clone();
    let field = ring.field();
    let f0 = p.target().clone();
    let images: Vec<Vec<Poly>> = (0..p.ncols()).map(|k| p.column(k)).collect();
    let image_of_p = |d: i64| generator_map(p.source(), &images, &f0, d).image();
    let gens0 = graded_min_gens(&f0, window, |d| Subspace::full(field, f0.piece_dim(d)), image_of_p);
    let augmentation = matrix_from_generators(&ring, &gens0, &f0);
    let g0 = augmentation.source().clone();
    let aug_images: Vec<Vec<Poly>> = (0..augmentation.ncols()).map(|k| augmentation.column(k)).collect();

    let mut twists = vec![g0.twists().to_vec()];
    let mut matrices: Vec<GradedMatrix> = Vec::new();
    // Step 1: kernel of G_0 -> coker p.
    let kernel1 = |d: i64| {
        let phi = generator_map(&g0, &aug_images, &f0, d);
        preimage(&phi, &image_of_p(d))
    };
    let gens1 = graded_min_gens(&g0, window, kernel1, |d| ambient_zero(field, &g0, d));
    let mut current = matrix_from_generators(&ring, &gens1, &g0);
    let mut all_degrees: Vec<i64> = twists[0].clone();
    let max_steps = ring.nvars() + 2;
    while current.ncols() > 0 && matrices.len() < max_steps {
        all_degrees.extend(current.source().twists().iter().copied());
        twists.push(current.source().twists().to_vec());
        let src = current.source().clone();
        let next_gens = {
            let m = current.clone();
            graded_min_gens(
                &src,
                window,
                |d| {
                    let real = m.realize_degree(d);
                    Subspace::span(field, src.piece_dim(d), real.kernel())
                },
                |d| ambient_zero(field, &src, d),
            )
        };
        matrices.push(current);
        current = matrix_from_generators(&ring, &next_gens, &src);
    }
    if current.ncols() > 0 {
        return Err(Error::Invalid(String::from("resolution did not terminate within the syzygy bound")));
    }
    let (certified, suggested_hi) = certify(window, all_degrees);
    Ok(BettiResolution { window, method: ResolutionMethod::Degreewise, twists, matrices, augmentation, certified, suggested_hi })
}

/// Minimal free resolution of `coker p` over `k[x]` read off a graded diagonal form.
pub fn resolve_univariate(p: &GradedMatrix, window: Window) -> Result<BettiResolution, Error> {
    let ring = p.ring().clone();
    let snf = graded_diagonalize(p)?;
    let torsion: Vec<(usize, (i64, i64))> = snf.pairs.iter().copied().enumerate().filter(|(_, (r, c))| c > r).collect();
    let mut g0: Vec<i64> = torsion.iter().map(|(_, (r, _))| *r).collect();
    g0.extend(snf.free_rows.iter().copied());
    let g1: Vec<i64> = torsion.iter().map(|(_, (_, c))| *c).collect();
    let m0 = TwistedFreeModule::new(&ring, g0.clone());
    let m1 = TwistedFreeModule::new(&ring, g1.clone());
    let mut d1 = GradedMatrix::zero(&m1, &m0);
    for (k, (r, c)) in torsion.iter().map(|t| t.1).enumerate() {
        d1.set(k, k, Poly::var_pow(&ring, 0, (c - r) as u32));
    }
    // Generator k of G_0 is column (pair index or free row) of U^{-1}.
    let cols: Vec<usize> = torsion.iter().map(|t| t.0).chain(snf.s()..snf.t()).collect();
    let mut augmentation = GradedMatrix::zero(&m0, p.target());
    for (k, &c) in cols.iter().enumerate() {
        for (r, q) in snf.u_inv.column(c).into_iter().enumerate() {
            augmentation.set(r, k, q);
        }
    }
    let mut twists = vec![g0];
    let mut matrices = Vec::new();
    if !g1.is_empty() {
        twists.push(g1);
        matrices.push(d1);
    }
    Ok(BettiResolution { window, method: ResolutionMethod::Univariate, twists, matrices, augmentation, certified: true, suggested_hi: None })
}

/// Minimal free resolution of `H(M)` from its presentation: graded diagonalization over `k[x]`,
/// degreewise kernels otherwise.
pub fn minimal_free_resolution(h: &HomologyPresentation, window: Window) -> Result<BettiResolution, Error> {
    if !h.certified {
        return Err(h.to_error());
    }
    if h.presentation.ring().nvars() == 1 {
        resolve_univariate(&h.presentation, window)
    } else {
        resolve_degreewise(&h.presentation, window)
    }
}

/// Degree-zero endomorphisms of `H = coker P`, as lifts `F_0 -> F_0` modulo those with image
/// in `im P`. The first basis element is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct End0Algebra {
    pub generators: TwistedFreeModule,
    pub basis: Vec<GradedMatrix>,
    /// `structure[a][b]` = coordinates of `basis[a] ∘ basis[b]`.
    pub structure: Vec<Vec<Vector>>,
    /// Columns: vectorized basis lifts followed by a basis of the null lifts.
    solver: Mat,
    offsets: Vec<usize>,
}

fn annihilator(s: &Subspace) -> Mat {
    let n = s.ambient();
    let field = s.field();
    if s.dim() == 0 {
        return Mat::identity(field, n);
    }
    let rows = Mat::from_rows(field, n, s.basis().to_vec()).kernel();
    Mat::from_rows(field, n, rows)
}

impl End0Algebra {
    pub fn field(&self) -> Field {
        self.generators.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn identity(&self) -> Vector {
        let mut v = zero_vector(self.field(), self.dim());
        if !v.is_empty() {
            v[0] = self.field().one();
        }
        v
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        let mut out = zero_vector(self.field(), self.dim());
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai * bj;
                crate::linalg::axpy(&mut out, &c, &self.structure[i][j]);
            }
        }
        out
    }

    /// A lift of the element with coordinates `v`.
    pub fn lift(&self, v: &[Scalar]) -> GradedMatrix {
        let mut out = GradedMatrix::zero(&self.generators, &self.generators);
        for (c, b) in v.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.try_add(&b.scale(c)).expect("same shape");
            }
        }
        out
    }

    fn vectorize(&self, m: &GradedMatrix) -> Result<Vector, Error> {
        vectorize(&self.generators, &self.offsets, m)
    }

    /// Coordinates of the class of a lift; fails when the lift does not preserve relations.
    pub fn coordinates(&self, m: &GradedMatrix) -> Result<Vector, Error> {
        let v = self.vectorize(m)?;
        let sol = self.solver.solve(&v).ok_or_else(|| Error::Invalid(String::from("map does not preserve the relations")))?;
        Ok(sol[..self.dim()].to_vec())
    }

    /// Matrix of left multiplication by `a` on the algebra.
    pub fn left_multiplication(&self, a: &[Scalar]) -> Mat {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n)
            .map(|j| {
                let mut e = zero_vector(self.field(), n);
                e[j] = self.field().one();
                self.mul(a, &e)
            })
            .collect();
        Mat::from_columns(self.field(), n, &cols)
    }

    pub fn is_idempotent(&self, e: &[Scalar]) -> bool {
        self.mul(e, e) == e
    }

    pub fn is_trivial(&self, e: &[Scalar]) -> bool {
        is_zero_vector(e) || e == self.identity()
    }
}

fn vectorize(gens: &TwistedFreeModule, offsets: &[usize], m: &GradedMatrix) -> Result<Vector, Error> {
    let total = *offsets.last().unwrap_or(&0);
    let mut out = zero_vector(gens.field(), total);
    for (j, &t) in gens.twists().iter().enumerate() {
        let c = gens.to_coords(t, &m.column(j))?;
        out[offsets[j]..offsets[j + 1]].clone_from_slice(&c);
    }
    Ok(out)
}

/// Degree-zero endomorphism algebra of the presented module, by exact linear solves.
pub fn end0(h: &HomologyPresentation) -> Result<End0Algebra, Error> {
    if !h.certified {
        return Err(h.to_error());
    }
    end0_of_presentation(&h.presentation)
}

pub fn end0_of_presentation(p: &GradedMatrix) -> Result<End0Algebra, Error> {
    let f0 = p.target().clone();
    let field = f0.field();
    let twists = f0.twists().to_vec();
    let mut offsets = vec![0usize];
    for &t in &twists {
        offsets.push(offsets.last().unwrap() + f0.piece_dim(t));
    }
    let nunk = *offsets.last().unwrap();
    let images: Vec<Vec<Poly>> = (0..p.ncols()).map(|k| p.column(k)).collect();
    let im_p = |d: i64| generator_map(p.source(), &images, &f0, d).image();

    // Elementary lifts: column j is the t-th basis element of (F_0)_{g_j}.
    let elementary = |u: usize| -> (usize, Vec<Poly>) {
        let j = offsets.partition_point(|&o| o <= u) - 1;
        let mut v = zero_vector(field, f0.piece_dim(twists[j]));
        v[u - offsets[j]] = field.one();
        (j, f0.from_coords(twists[j], &v))
    };

    // ψ preserves relations: Σ_j P_jk ψ(e_j) ∈ (im P)_{c_k}.
    let mut rows: Vec<Vector> = Vec::new();
    for k in 0..p.ncols() {
        let c = p.source().twists()[k];
        let ann = annihilator(&im_p(c));
        let cols: Vec<Vector> = (0..nunk)
            .map(|u| {
                let (j, col) = elementary(u);
                let el: Vec<Poly> = col.iter().map(|q| p.entry(j, k) * q).collect();
                ann.apply(&f0.to_coords(c, &el).expect("homogeneous"))
            })
            .collect();
        let block = Mat::from_columns(field, ann.nrows(), &cols);
        for i in 0..block.nrows() {
            rows.push(block.row(i).to_vec());
        }
    }
    let preserving = Mat::from_rows(field, nunk, rows).kernel();
    let l = Subspace::span(field, nunk, preserving);

    // Null lifts: every column lies in im P.
    let mut null_rows: Vec<Vector> = Vec::new();
    for (j, &t) in twists.iter().enumerate() {
        let ann = annihilator(&im_p(t));
        for i in 0..ann.nrows() {
            let mut r = zero_vector(field, nunk);
            r[offsets[j]..offsets[j + 1]].clone_from_slice(ann.row(i));
            null_rows.push(r);
        }
    }
    let null = Subspace::span(field, nunk, Mat::from_rows(field, nunk, null_rows).kernel());

    let id = GradedMatrix::identity(&f0);
    let idv = vectorize(&f0, &offsets, &id)?;
    let mut picks = Vec::new();
    if !null.contains(&idv) {
        picks.push(idv);
    }
    let mut acc = null.clone();
    for v in &picks {
        acc.insert(v);
    }
    picks.extend(acc.complement_from(l.basis().iter().cloned()));
    let to_matrix = |v: &[Scalar]| -> GradedMatrix {
        let mut m = GradedMatrix::zero(&f0, &f0);
        for (j, &t) in twists.iter().enumerate() {
            for (r, q) in f0.from_coords(t, &v[offsets[j]..offsets[j + 1]]).into_iter().enumerate() {
                m.set(r, j, q);
            }
        }
        m
    };
    let basis: Vec<GradedMatrix> = picks.iter().map(|v| to_matrix(v)).collect();
    let mut cols = picks.clone();
    cols.extend(null.basis().iter().cloned());
    let solver = Mat::from_columns(field, nunk, &cols);
    let mut alg = End0Algebra { generators: f0.clone(), basis, structure: Vec::new(), solver, offsets };
    let n = alg.dim();
    let mut structure = Vec::with_capacity(n);
    for a in 0..n {
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            let prod = alg.basis[a].compose(&alg.basis[b])?;
            row.push(alg.coordinates(&prod).map_err(|_| Error::Invalid(String::from("endomorphisms not closed under composition")))?);
        }
        structure.push(row);
    }
    alg.structure = structure;
    Ok(alg)
}

mod upoly {
    //! Dense univariate polynomials over a field, coefficients from the constant term up.

    use super::*;

    pub type UPoly = Vec<Scalar>;

    pub fn trim(mut p: UPoly) -> UPoly {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn deg(p: &UPoly) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    pub fn sub(a: &UPoly, b: &UPoly, field: Field) -> UPoly {
        let n = a.len().max(b.len());
        let z = field.zero();
        trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(a: &UPoly, b: &UPoly, field: Field) -> UPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![field.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        trim(out)
    }

    pub fn divrem(a: &UPoly, b: &UPoly, field: Field) -> (UPoly, UPoly) {
        let db = deg(b).expect("division by zero polynomial");
        let lead = b[db].inverse().expect("nonzero");
        let mut r = trim(a.clone());
        let mut q = vec![field.zero(); r.len().saturating_sub(db).max(1)];
        while let Some(dr) = deg(&r) {
            if dr < db {
                break;
            }
            let c = &r[dr] * &lead;
            let s = dr - db;
            for (i, bi) in b.iter().enumerate().take(db + 1) {
                r[s + i] = &r[s + i] - &(&c * bi);
            }
            q[s] = c;
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn monic(p: UPoly) -> UPoly {
        match deg(&p) {
            None => p,
            Some(d) => {
                let inv = p[d].inverse().expect("nonzero");
                p.iter().map(|c| c * &inv).collect()
            }
        }
    }

    /// `(g, u, v)` with `g = u a + v b` monic.
    pub fn ext_gcd(a: &UPoly, b: &UPoly, field: Field) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (trim(a.clone()), trim(b.clone()));
        let (mut s0, mut s1) = (vec![field.one()], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![field.one()]);
        while deg(&r1).is_some() {
            let (q, r) = divrem(&r0, &r1, field);
            let s = sub(&s0, &mul(&q, &s1, field), field);
            let t = sub(&t0, &mul(&q, &t1, field), field);
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s);
            t0 = core::mem::replace(&mut t1, t);
        }
        match deg(&r0) {
            None => (r0, s0, t0),
            Some(d) => {
                let inv = r0[d].inverse().expect("nonzero");
                let sc = |p: &UPoly| trim(p.iter().map(|c| c * &inv).collect());
                (sc(&r0), sc(&s0), sc(&t0))
            }
        }
    }

    pub fn gcd(a: &UPoly, b: &UPoly, field: Field) -> UPoly {
        ext_gcd(a, b, field).0
    }

    pub fn derivative(p: &UPoly, field: Field) -> UPoly {
        trim(p.iter().enumerate().skip(1).map(|(i, c)| &field.from_i64(i as i64) * c).collect())
    }

    pub fn powmod(base: &UPoly, mut e: u64, m: &UPoly, field: Field) -> UPoly {
        let mut result = vec![field.one()];
        let mut b = divrem(base, m, field).1;
        while e > 0 {
            if e & 1 == 1 {
                result = divrem(&mul(&result, &b, field), m, field).1;
            }
            b = divrem(&mul(&b, &b, field), m, field).1;
            e >>= 1;
        }
        divrem(&result, m, field).1
    }

    pub fn eval(p: &UPoly, x: &Scalar, field: Field) -> Scalar {
        let mut acc = field.zero();
        for c in p.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

use upoly::UPoly;

/// Minimal polynomial of `x` in the algebra, monic.
fn min_poly(alg: &End0Algebra, x: &[Scalar]) -> UPoly {
    let field = alg.field();
    let n = alg.dim();
    let mut powers: Vec<Vector> = vec![alg.identity()];
    loop {
        let next = alg.mul(powers.last().unwrap(), x);
        let m = Mat::from_columns(field, n, &powers);
        if let Some(c) = m.solve(&next) {
            let mut p: UPoly = c.iter().map(|s| -s).collect();
            p.push(field.one());
            return p;
        }
        powers.push(next);
    }
}

fn eval_in_algebra(alg: &End0Algebra, p: &UPoly, x: &[Scalar]) -> Vector {
    let mut acc = zero_vector(alg.field(), alg.dim());
    let id = alg.identity();
    for c in p.iter().rev() {
        acc = alg.mul(&acc, x);
        crate::linalg::axpy(&mut acc, c, &id);
    }
    acc
}

/// Squarefree part of a monic polynomial, or `None` when the derivative vanishes.
fn squarefree_part(m: &UPoly, field: Field) -> Option<UPoly> {
    let dm = upoly::derivative(m, field);
    upoly::deg(&dm)?;
    let g = upoly::gcd(m, &dm, field);
    Some(upoly::monic(upoly::divrem(m, &g, field).0))
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// A root of `s` in the field, when one is found by the rational root test or trial evaluation.
fn find_root(s: &UPoly, field: Field) -> Option<Scalar> {
    match field {
        Field::Rationals => {
            let qs: Vec<num_rational::BigRational> = s
                .iter()
                .map(|c| match c {
                    Scalar::Rational(q) => q.clone(),
                    _ => unreachable!("rational field"),
                })
                .collect();
            let lcm = qs.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
            let ints: Vec<BigInt> = qs.iter().map(|q| (q * num_rational::BigRational::from_integer(lcm.clone())).to_integer()).collect();
            if ints[0].is_zero() {
                return Some(field.zero());
            }
            let nums = divisors(&ints[0])?;
            let dens = divisors(ints.last().unwrap())?;
            for a in &nums {
                for b in &dens {
                    for sign in [1i64, -1] {
                        let cand = field.from_ratio(&(a * BigInt::from(sign)), b)?;
                        if upoly::eval(s, &cand, field).is_zero() {
                            return Some(cand);
                        }
                    }
                }
            }
            None
        }
        Field::Prime(p) if p <= 1 << 16 => (0..p as i64).map(|v| field.from_i64(v)).find(|c| upoly::eval(s, c, field).is_zero()),
        Field::Prime(_) => None,
    }
}

/// A nonconstant proper factor of the squarefree polynomial `s`, when one can be exhibited.
fn split_squarefree(s: &UPoly, field: Field) -> Option<UPoly> {
    let d = upoly::deg(s)?;
    if d < 2 {
        return None;
    }
    let proper = |g: UPoly| -> Option<UPoly> {
        let dg = upoly::deg(&g)?;
        (dg >= 1 && dg < d).then_some(g)
    };
    if let Field::Prime(p) = field {
        if p > 2 {
            let t = vec![field.zero(), field.one()];
            let tp = upoly::powmod(&t, p as u64, s, field);
            let g = upoly::gcd(s, &upoly::sub(&tp, &t, field), field);
            if let Some(f) = proper(g.clone()) {
                return Some(f);
            }
            if upoly::deg(&g) == Some(d) {
                // All roots are rational: split by quadratic residuosity of t + a.
                for a in 0..64i64 {
                    let base = vec![field.from_i64(a), field.one()];
                    let h = upoly::powmod(&base, (p as u64 - 1) / 2, s, field);
                    let g = upoly::gcd(s, &upoly::sub(&h, &vec![field.one()], field), field);
                    if let Some(f) = proper(g) {
                        return Some(f);
                    }
                }
            }
        }
    }
    let root = find_root(s, field)?;
    proper(vec![-&root, field.one()])
}

/// An idempotent in `k[x] ⊆ End_0` separating the coprime factor `f` of the minimal polynomial.
fn idempotent_from_factor(alg: &End0Algebra, x: &[Scalar], m: &UPoly, f: &UPoly) -> Option<Vector> {
    let field = alg.field();
    let dm = upoly::deg(m)? as u64;
    let fk = upoly::powmod(f, dm, m, field);
    let full = upoly::gcd(m, &fk, field);
    let (h, r) = upoly::divrem(m, &full, field);
    if upoly::deg(&r).is_some() || upoly::deg(&h).unwrap_or(0) == 0 || upoly::deg(&full).unwrap_or(0) == 0 {
        return None;
    }
    let (g, u, _) = upoly::ext_gcd(&full, &h, field);
    if upoly::deg(&g) != Some(0) {
        return None;
    }
    let e_poly = upoly::divrem(&upoly::mul(&u, &full, field), m, field).1;
    let e = eval_in_algebra(alg, &e_poly, x);
    (alg.is_idempotent(&e) && !alg.is_trivial(&e)).then_some(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndecomposableCriterion {
    /// No nontrivial idempotent among all elements of a small prime-field algebra.
    Enumeration,
    /// `dim End_0 = 1`.
    OneDimensional,
    /// `End_0 = k·id ⊕ N` with `N` a nilpotent subalgebra.
    LocalRing,
}

impl IndecomposableCriterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndecomposableCriterion::Enumeration => "enumeration",
            IndecomposableCriterion::OneDimensional => "one-dimensional",
            IndecomposableCriterion::LocalRing => "local-ring",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Indecomposability {
    Yes(IndecomposableCriterion),
    /// A nontrivial idempotent: coordinates in the algebra and a lift to the generators.
    No { coordinates: Vector, idempotent: GradedMatrix },
    Indeterminate(String),
}

impl Indecomposability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Indecomposability::Yes(_) => "YES",
            Indecomposability::No { .. } => "NO",
            Indecomposability::Indeterminate(_) => "INDETERMINATE",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Indecomposability::Yes(_))
    }
}

/// Checks that `span(gens)` is closed under multiplication and nilpotent.
fn is_nilpotent_subalgebra(alg: &End0Algebra, gens: &[Vector]) -> bool {
    let field = alg.field();
    let n = alg.dim();
    let base = Subspace::span(field, n, gens.iter().cloned());
    let mut power = base.clone();
    for _ in 0..=n {
        if power.dim() == 0 {
            return true;
        }
        let next = Subspace::span(field, n, power.basis().iter().flat_map(|a| base.basis().iter().map(move |b| alg.mul(a, b))));
        if !base.contains_subspace(&next) || next.dim() >= power.dim() {
            return false;
        }
        power = next;
    }
    false
}

fn local_ring_check(alg: &End0Algebra) -> bool {
    let field = alg.field();
    let n = alg.dim();
    let mut radical = Vec::new();
    for i in 1..n {
        let mut b = zero_vector(field, n);
        b[i] = field.one();
        let m = min_poly(alg, &b);
        let Some(s) = squarefree_part(&m, field) else { return false };
        if upoly::deg(&s) != Some(1) {
            return false;
        }
        let lambda = -&s[0];
        b[0] = &b[0] - &lambda;
        radical.push(b);
    }
    is_nilpotent_subalgebra(alg, &radical)
}

fn candidates(alg: &End0Algebra) -> Vec<Vector> {
    let field = alg.field();
    let n = alg.dim();
    let unit = |i: usize| {
        let mut v = zero_vector(field, n);
        v[i] = field.one();
        v
    };
    let mut out: Vec<Vector> = (1..n).map(unit).collect();
    for i in 1..n {
        for j in (i + 1)..n {
            let mut v = unit(i);
            v[j] = field.one();
            out.push(v);
        }
    }
    // A fixed generic-looking combination.
    out.push((0..n).map(|i| field.from_i64(((i * i + 3 * i + 7) % 31) as i64 + 1)).collect());
    out
}

fn search_idempotent(alg: &End0Algebra) -> Option<Vector> {
    let field = alg.field();
    for x in candidates(alg) {
        let m = min_poly(alg, &x);
        let s = match squarefree_part(&m, field) {
            Some(s) => s,
            None => continue,
        };
        if let Some(f) = split_squarefree(&s, field) {
            if let Some(e) = idempotent_from_factor(alg, &x, &m, &f) {
                return Some(e);
            }
        }
    }
    None
}

const ENUMERATION_LIMIT: u64 = 1_000_000;

fn enumerate_idempotents(alg: &End0Algebra, p: u32) -> Option<Vector> {
    let n = alg.dim() as u32;
    let total = (p as u64).pow(n);
    let field = alg.field();
    for code in 0..total {
        let mut c = code;
        let v: Vector = (0..n)
            .map(|_| {
                let d = c % p as u64;
                c /= p as u64;
                field.from_i64(d as i64)
            })
            .collect();
        if alg.is_idempotent(&v) && !alg.is_trivial(&v) {
            return Some(v);
        }
    }
    None
}

/// Decides indecomposability of `H` from its degree-zero endomorphisms.
pub fn is_indecomposable(alg: &End0Algebra) -> Indecomposability {
    let n = alg.dim();
    if n == 0 {
        return Indecomposability::Indeterminate(String::from("the module is zero"));
    }
    if n == 1 {
        return Indecomposability::Yes(IndecomposableCriterion::OneDimensional);
    }
    if local_ring_check(alg) {
        return Indecomposability::Yes(IndecomposableCriterion::LocalRing);
    }
    if let Some(e) = search_idempotent(alg) {
        return Indecomposability::No { idempotent: alg.lift(&e), coordinates: e };
    }
    if let Field::Prime(p) = alg.field() {
        if (p as u64).checked_pow(n as u32).is_some_and(|t| t <= ENUMERATION_LIMIT) {
            return match enumerate_idempotents(alg, p) {
                Some(e) => Indecomposability::No { idempotent: alg.lift(&e), coordinates: e },
                None => Indecomposability::Yes(IndecomposableCriterion::Enumeration),
            };
        }
    }
    Indecomposability::Indeterminate(format!(
        "End_0 has dimension {} and is not local by the nilpotency test; no idempotent was found",
        n
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Minimality,
    Indecomposability,
}

impl Hypothesis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Hypothesis::Minimality => "minimality",
            Hypothesis::Indecomposability => "indecomposability",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NotInTotImage,
    NoObstruction,
    Inconclusive(Hypothesis),
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NotInTotImage => "NOT_IN_TOT_IMAGE",
            Verdict::NoObstruction => "NO_OBSTRUCTION",
            Verdict::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub rank: usize,
    pub minimal: bool,
    pub homology: HomologyPresentation,
    pub resolution: BettiResolution,
    pub end0_dim: usize,
    pub indecomposable: Indecomposability,
    pub betti_sum: usize,
    /// When `rank = Σβ` and `M` is minimal: whether the basis degrees of `M` match the
    /// degrees `i + j` read off the Betti table.
    pub degree_profile_match: Option<bool>,
    pub verdict: Verdict,
}

/// Applies the rank-versus-Betti test to `M`.
pub fn tot_image_obstruction(m: &SemifreeDG, window: Window) -> Result<ObstructionReport, Error> {
    let homology = dg_homology(m, window)?;
    if !homology.certified {
        return Err(homology.to_error());
    }
    let resolution = minimal_free_resolution(&homology, window)?;
    if !resolution.certified {
        return Err(Error::WindowTooSmall { lo: window.lo, hi: window.hi, suggested_hi: resolution.suggested_hi.unwrap_or(window.hi) });
    }
    let alg = end0(&homology)?;
    let indecomposable = is_indecomposable(&alg);
    let rank = m.rank();
    let betti_sum = resolution.betti_sum();
    let minimal = m.is_minimal();
    let verdict = if rank == betti_sum {
        Verdict::NoObstruction
    } else if !minimal {
        Verdict::Inconclusive(Hypothesis::Minimality)
    } else if !indecomposable.is_yes() {
        Verdict::Inconclusive(Hypothesis::Indecomposability)
    } else {
        Verdict::NotInTotImage
    };
    let degree_profile_match = (rank == betti_sum && minimal).then(|| {
        let mut degs = m.degrees().to_vec();
        degs.sort();
        degs == resolution.total_degrees()
    });
    Ok(ObstructionReport {
        rank,
        minimal,
        homology,
        resolution,
        end0_dim: alg.dim(),
        indecomposable,
        betti_sum,
        degree_profile_match,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::tests::{e1, e3, ring};
    use crate::dg::SignConvention;
    use alloc::string::ToString;

    fn f101() -> Field {
        Field::prime(101).unwrap()
    }

    #[test]
    fn e1_resolution() {
        let m = e1(f101(), 1);
        let h = dg_homology(&m, Window::new(0, 20)).unwrap();
        let r = minimal_free_resolution(&h, Window::new(0, 20)).unwrap();
        assert_eq!(r.twists, vec![vec![0, 5], vec![2, 3, 7], vec![4]]);
        assert!(r.certified && r.is_complex() && r.is_minimal());
        assert!(r.exactness_defects(Window::new(0, 20)).is_empty());
    }

    #[test]
    fn e1_endomorphisms() {
        let m = e1(f101(), 1);
        let h = dg_homology(&m, Window::new(0, 20)).unwrap();
        let alg = end0(&h).unwrap();
        assert_eq!(alg.dim(), 2);
        // The second basis element is λ·id + ψ with ψ² = 0 and ψ(g2) a multiple of x1^5 g1.
        let b = vec![f101().zero(), f101().one()];
        let lambda = -&squarefree_part(&min_poly(&alg, &b), f101()).unwrap()[0];
        let psi = vec![-&lambda, f101().one()];
        assert!(alg.mul(&psi, &psi).iter().all(|c| c.is_zero()));
        let lift = alg.lift(&psi);
        assert_eq!(lift.entry(0, 1).to_string(), "x1^5");
        assert_eq!(is_indecomposable(&alg), Indecomposability::Yes(IndecomposableCriterion::LocalRing));
    }

    #[test]
    fn e1_verdict() {
        for field in [f101(), Field::Rationals] {
            let r = tot_image_obstruction(&e1(field, 1), Window::new(0, 20)).unwrap();
            assert_eq!((r.rank, r.betti_sum), (4, 6));
            assert_eq!(r.verdict, Verdict::NotInTotImage);
        }
    }

    #[test]
    fn e3_has_no_obstruction() {
        let m = e3();
        let h = dg_homology(&m, Window::new(0, 20)).unwrap();
        let r = minimal_free_resolution(&h, Window::new(0, 20)).unwrap();
        assert_eq!(r.betti_numbers(), vec![3, 2]);
        let alg = end0(&h).unwrap();
        assert_eq!(alg.dim(), 4);
        assert!(matches!(is_indecomposable(&alg), Indecomposability::No { .. }));
        let rep = tot_image_obstruction(&m, Window::new(0, 20)).unwrap();
        assert_eq!(rep.verdict, Verdict::NoObstruction);
        assert_eq!(rep.degree_profile_match, Some(true));
    }

    #[test]
    fn residue_field_is_indecomposable() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let f0 = TwistedFreeModule::new(&r, vec![0]);
        let f1 = TwistedFreeModule::new(&r, vec![1, 1]);
        let p = GradedMatrix::new(f1, f0, vec![vec![Poly::var(&r, 0), Poly::var(&r, 1)]]).unwrap();
        let alg = end0_of_presentation(&p).unwrap();
        assert_eq!(alg.dim(), 1);
        let res = resolve_degreewise(&p, Window::new(0, 15)).unwrap();
        assert_eq!(res.twists, vec![vec![0], vec![1, 1], vec![2]]);
    }

    #[test]
    fn split_free_module() {
        let r = ring(Field::Rationals, &["x"]);
        let f0 = TwistedFreeModule::new(&r, vec![0, 1]);
        let p = GradedMatrix::zero(&TwistedFreeModule::zero(&r), &f0);
        let alg = end0_of_presentation(&p).unwrap();
        assert_eq!(alg.dim(), 3);
        match is_indecomposable(&alg) {
            Indecomposability::No { coordinates, idempotent } => {
                assert!(alg.is_idempotent(&coordinates));
                assert_eq!(idempotent.compose(&idempotent).unwrap(), idempotent);
            }
            other => panic!("expected a projection, got {:?}", other),
        }
        let same = TwistedFreeModule::new(&r, vec![0, 0]);
        let alg = end0_of_presentation(&GradedMatrix::zero(&TwistedFreeModule::zero(&r), &same)).unwrap();
        assert_eq!(alg.dim(), 4);
        assert!(matches!(is_indecomposable(&alg), Indecomposability::No { .. }));
    }

    #[test]
    fn rank_one_free() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let m = SemifreeDG::new(&r, vec!["e1".to_string()], vec![0], SignConvention::Even).unwrap();
        let rep = tot_image_obstruction(&m, Window::new(0, 10)).unwrap();
        assert_eq!(rep.resolution.betti_numbers(), vec![1]);
        assert_eq!(rep.verdict, Verdict::NoObstruction);
    }

    #[test]
    fn degreewise_matches_univariate_on_e3() {
        let m = e3();
        let h = dg_homology(&m, Window::new(0, 20)).unwrap();
        let a = resolve_degreewise(&h.presentation, Window::new(0, 20)).unwrap();
        let b = resolve_univariate(&h.presentation, Window::new(0, 20)).unwrap();
        assert_eq!(a.betti_table(), b.betti_table());
    }

    #[test]
    fn polynomial_helpers() {
        let f = Field::Prime(7);
        let p: UPoly = [0i64, -1, 0, 1].iter().map(|&c| f.from_i64(c)).collect(); // t^3 - t
        let s = squarefree_part(&p, f).unwrap();
        assert_eq!(upoly::deg(&s), Some(3));
        let g = split_squarefree(&s, f).unwrap();
        assert!(upoly::deg(&g).is_some_and(|d| (1..3).contains(&d)));
        let q = Field::Rationals;
        let p: UPoly = [-6i64, 11, -6, 1].iter().map(|&c| q.from_i64(c)).collect();
        let root = find_root(&p, q).unwrap();
        assert!(upoly::eval(&p, &root, q).is_zero());
    }
}
