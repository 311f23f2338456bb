//! Twisted graded free modules `Σ^{a_1}A ⊕ ... ⊕ Σ^{a_n}A`, degree-zero homomorphisms between
//! them, and their realization as k-linear maps on a single graded piece.
//!
//! Twist convention: `(Σ^a A)_j = A_{j-a}`, so the generator of `Σ^a A` lives in degree `a`, and
//! a degree-zero map `Σ^c A -> Σ^r A` is multiplication by a form of degree `c - r`.
//!
//! Basis of a graded piece: generators in declaration order, and for each generator the
//! monomials of the matching degree in descending lexicographic order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::linalg::{zero_vector, Mat, Subspace, Vector};
use crate::poly::{monomial_rank, monomials_of_degree, piece_dim, same_ring, Monomial, Poly, Ring};

/// A closed interval of degrees on which degreewise claims are certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Window {
        Window { lo, hi }
    }

    pub fn contains(&self, d: i64) -> bool {
        self.lo <= d && d <= self.hi
    }

    pub fn degrees(&self) -> core::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedFreeModule {
    ring: Ring,
    twists: Vec<i64>,
}

impl TwistedFreeModule {
    pub fn new(ring: &Ring, twists: Vec<i64>) -> TwistedFreeModule {
        TwistedFreeModule { ring: ring.clone(), twists }
    }

    pub fn zero(ring: &Ring) -> TwistedFreeModule {
        TwistedFreeModule::new(ring, Vec::new())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn direct_sum(&self, other: &TwistedFreeModule) -> TwistedFreeModule {
        let mut t = self.twists.clone();
        t.extend_from_slice(&other.twists);
        TwistedFreeModule::new(&self.ring, t)
    }

    pub fn piece_dim(&self, j: i64) -> usize {
        let n = self.ring.nvars();
        self.twists.iter().map(|&a| piece_dim(n, j - a)).sum()
    }

    /// Offset of each generator's block inside the degree-`j` piece.
    pub fn piece_offsets(&self, j: i64) -> Vec<usize> {
        let n = self.ring.nvars();
        let mut off = Vec::with_capacity(self.rank());
        let mut acc = 0;
        for &a in &self.twists {
            off.push(acc);
            acc += piece_dim(n, j - a);
        }
        off
    }

    /// Labeled basis of the degree-`j` piece: (generator, monomial) pairs.
    pub fn piece_basis(&self, j: i64) -> Vec<(usize, Monomial)> {
        let n = self.ring.nvars();
        let mut out = Vec::new();
        for (g, &a) in self.twists.iter().enumerate() {
            for m in monomials_of_degree(n, j - a) {
                out.push((g, m));
            }
        }
        out
    }

    /// Coordinates of a homogeneous element of degree `j` given as one polynomial per generator.
    pub fn to_coords(&self, j: i64, element: &[Poly]) -> Result<Vector, Error> {
        if element.len() != self.rank() {
            return Err(Error::Shape(format!("element has {} components, module rank {}", element.len(), self.rank())));
        }
        let off = self.piece_offsets(j);
        let mut v = zero_vector(self.field(), self.piece_dim(j));
        for (g, p) in element.iter().enumerate() {
            if !p.is_homogeneous_of(j - self.twists[g]) {
                return Err(Error::Inhomogeneous {
                    context: String::from("of element"),
                    row: g,
                    col: 0,
                    expected: j - self.twists[g],
                    found: p.degree_label(),
                });
            }
            for (m, c) in p.terms() {
                v[off[g] + monomial_rank(m)] = c.clone();
            }
        }
        Ok(v)
    }

    pub fn from_coords(&self, j: i64, v: &[Scalar]) -> Vec<Poly> {
        let mut out: Vec<Poly> = (0..self.rank()).map(|_| Poly::zero(&self.ring)).collect();
        for ((g, m), c) in self.piece_basis(j).into_iter().zip(v) {
            out[g].add_term(m, c);
        }
        out
    }

    /// Multiplication by variable `var` from the degree-`j` piece to the degree-`j+1` piece.
    pub fn var_action(&self, var: usize, j: i64) -> Mat {
        let src = self.piece_basis(j);
        let off = self.piece_offsets(j + 1);
        let mut m = Mat::zeros(self.field(), self.piece_dim(j + 1), src.len());
        let x = Monomial::var(self.ring.nvars(), var);
        for (col, (g, mono)) in src.iter().enumerate() {
            m.set(off[*g] + monomial_rank(&mono.mul(&x)), col, self.field().one());
        }
        m
    }

    /// `Σ_v x_v V` for a subspace `V` of the degree-`j` piece, inside the degree-`j+1` piece.
    pub fn linear_span_up(&self, v: &Subspace, j: i64) -> Subspace {
        let mut out = Subspace::zero(self.field(), self.piece_dim(j + 1));
        if v.dim() == 0 {
            return out;
        }
        for var in 0..self.ring.nvars() {
            let a = self.var_action(var, j);
            for b in v.basis() {
                out.insert(&a.apply(b));
            }
        }
        out
    }
}

/// A degree-zero homomorphism `source -> target`, stored as a polynomial matrix whose rows
/// index target generators and columns index source generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMatrix {
    source: TwistedFreeModule,
    target: TwistedFreeModule,
    entries: Vec<Poly>,
}

impl GradedMatrix {
    /// Builds and validates shape and homogeneity.
    pub fn new(source: TwistedFreeModule, target: TwistedFreeModule, rows: Vec<Vec<Poly>>) -> Result<GradedMatrix, Error> {
        if rows.len() != target.rank() || rows.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::Shape(format!(
                "matrix must be {} x {} (target rank x source rank)",
                target.rank(),
                source.rank()
            )));
        }
        if !same_ring(source.ring(), target.ring()) {
            return Err(Error::RingMismatch);
        }
        let entries: Vec<Poly> = rows.into_iter().flatten().collect();
        if entries.iter().any(|p| !same_ring(p.ring(), source.ring())) {
            return Err(Error::RingMismatch);
        }
        let m = GradedMatrix { source, target, entries };
        m.validate_homogeneity()?;
        Ok(m)
    }

    pub fn zero(source: &TwistedFreeModule, target: &TwistedFreeModule) -> GradedMatrix {
        let ring = source.ring();
        GradedMatrix {
            source: source.clone(),
            target: target.clone(),
            entries: (0..source.rank() * target.rank()).map(|_| Poly::zero(ring)).collect(),
        }
    }

    pub fn identity(module: &TwistedFreeModule) -> GradedMatrix {
        let mut m = GradedMatrix::zero(module, module);
        for i in 0..module.rank() {
            m.set(i, i, Poly::one(module.ring()));
        }
        m
    }

    pub fn source(&self) -> &TwistedFreeModule {
        &self.source
    }

    pub fn target(&self) -> &TwistedFreeModule {
        &self.target
    }

    pub fn ring(&self) -> &Ring {
        self.source.ring()
    }

    pub fn nrows(&self) -> usize {
        self.target.rank()
    }

    pub fn ncols(&self) -> usize {
        self.source.rank()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.ncols() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        let n = self.ncols();
        self.entries[i * n + j] = p;
    }

    pub fn rows(&self) -> Vec<Vec<Poly>> {
        (0..self.nrows()).map(|i| (0..self.ncols()).map(|j| self.entry(i, j).clone()).collect()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.nrows()).map(|i| self.entry(i, j).clone()).collect()
    }

    /// Required degree of entry `(i, j)`: `c_j - r_i`.
    pub fn entry_degree(&self, i: usize, j: usize) -> i64 {
        self.source.twists()[j] - self.target.twists()[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Every nonzero entry `(i, j)` must be homogeneous of degree `c_j - r_i`.
    pub fn validate_homogeneity(&self) -> Result<(), Error> {
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                let e = self.entry(i, j);
                let want = self.entry_degree(i, j);
                if !e.is_homogeneous_of(want) {
                    return Err(Error::Inhomogeneous {
                        context: String::from("of graded matrix"),
                        row: i,
                        col: j,
                        expected: want,
                        found: e.degree_label(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `self ∘ rhs`
    pub fn compose(&self, rhs: &GradedMatrix) -> Result<GradedMatrix, Error> {
        if rhs.target.twists() != self.source.twists() {
            return Err(Error::Shape(String::from("composition: intermediate modules differ")));
        }
        let mut out = GradedMatrix::zero(&rhs.source, &self.target);
        for i in 0..self.nrows() {
            for j in 0..rhs.ncols() {
                let mut acc = Poly::zero(self.ring());
                for k in 0..self.ncols() {
                    let a = self.entry(i, k);
                    let b = rhs.entry(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &GradedMatrix) -> Result<GradedMatrix, Error> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape(String::from("sum of maps between different modules")));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = &*a + b;
        }
        Ok(out)
    }

    pub fn neg(&self) -> GradedMatrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = -&*a;
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> GradedMatrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.scale(c);
        }
        out
    }

    /// Image of an element given as one polynomial per source generator.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        (0..self.nrows())
            .map(|i| {
                let mut acc = Poly::zero(self.ring());
                for (j, p) in v.iter().enumerate() {
                    let e = self.entry(i, j);
                    if !e.is_zero() && !p.is_zero() {
                        acc = &acc + &(e * p);
                    }
                }
                acc
            })
            .collect()
    }

    /// The k-linear map on the degree-`j` pieces.
    pub fn realize_degree(&self, j: i64) -> Mat {
        self.realize_degree_signed(j, |_, _| false)
    }

    /// As [`GradedMatrix::realize_degree`], negating the column of basis vector
    /// `(generator g, monomial m)` whenever `negate(g, deg m)` holds.
    pub fn realize_degree_signed(&self, j: i64, negate: impl Fn(usize, u32) -> bool) -> Mat {
        let field = self.source.field();
        let src = self.source.piece_basis(j);
        let off = self.target.piece_offsets(j);
        let mut out = Mat::zeros(field, self.target.piece_dim(j), src.len());
        for (col, (g, m)) in src.iter().enumerate() {
            let flip = negate(*g, m.degree());
            for i in 0..self.nrows() {
                let e = self.entry(i, *g);
                for (t, c) in e.terms() {
                    let row = off[i] + monomial_rank(&t.mul(m));
                    let c = if flip { -c } else { c.clone() };
                    out.add_to(row, col, &c);
                }
            }
        }
        out
    }

    /// Kernel and image of the realization at every degree of `window`.
    pub fn kernel_image_degreewise(&self, window: Window) -> BTreeMap<i64, KernelImage> {
        window
            .degrees()
            .map(|j| {
                let m = self.realize_degree(j);
                let kernel = Subspace::span(m.field(), m.ncols(), m.kernel());
                let image = m.image();
                (j, KernelImage { kernel, image })
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct KernelImage {
    pub kernel: Subspace,
    pub image: Subspace,
}

/// Minimal homogeneous generators of a graded subquotient `V / U` of a free module.
///
/// `sub(d)` returns `V_d` and `base(d)` returns `U_d` as subspaces of the degree-`d` piece of
/// `ambient`; both must be closed under the variable action. In each degree `d` of `window`
/// the generators span a complement of `U_d + A_1 V_{d-1}` in `V_d`; representatives are the
/// reduced echelon basis vectors of `V_d` reduced modulo that sum.
pub fn graded_min_gens(
    ambient: &TwistedFreeModule,
    window: Window,
    mut sub: impl FnMut(i64) -> Subspace,
    mut base: impl FnMut(i64) -> Subspace,
) -> Vec<(i64, Vector)> {
    let mut out = Vec::new();
    let mut prev = sub(window.lo - 1);
    for d in window.degrees() {
        let v = sub(d);
        let s = ambient.linear_span_up(&prev, d - 1).sum(&base(d));
        for g in s.complement_from(v.basis().iter().cloned()) {
            out.push((d, g));
        }
        prev = v;
    }
    out
}
