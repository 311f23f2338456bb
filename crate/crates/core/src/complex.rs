//! Bounded complexes of twisted graded free modules and degree-zero chain maps.
//!
//! Positions are homological (`∂_i: X_i -> X_{i-1}`). Since `A` is commutative every complex
//! is a complex of bimodules, which is all the tensor product needs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::field::Field;
use crate::graded::{GradedMatrix, TwistedFreeModule, Window};
use crate::kchain::{DegreewiseComplex, DegreewiseMorphism, InducedRanks, KComplex, KMorphism};
use crate::linalg::Mat;
use crate::poly::{monomials_of_degree, Monomial, Poly, Ring};

/// Default label of generator `g` (0-based) at position `i`: `p0g1`, `pm1g2`, ...
pub fn default_label(i: i64, g: usize) -> String {
    if i < 0 {
        format!("pm{}g{}", -i, g + 1)
    } else {
        format!("p{}g{}", i, g + 1)
    }
}

pub(crate) fn sign_poly(p: &Poly, negate: bool) -> Poly {
    if negate {
        -p
    } else {
        p.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    ring: Ring,
    modules: BTreeMap<i64, TwistedFreeModule>,
    labels: BTreeMap<i64, Vec<String>>,
    diffs: BTreeMap<i64, GradedMatrix>,
}

impl GradedComplex {
    pub fn new(ring: &Ring) -> GradedComplex {
        GradedComplex { ring: ring.clone(), modules: BTreeMap::new(), labels: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// The complex with the single free module `⊕ Σ^{t} A` in position `i`.
    pub fn concentrated(ring: &Ring, i: i64, twists: Vec<i64>) -> GradedComplex {
        let mut c = GradedComplex::new(ring);
        c.set_module(i, twists, None).expect("fresh complex");
        c
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    /// Declares `X_i`; replaces any earlier declaration and drops the adjacent differentials.
    pub fn set_module(&mut self, i: i64, twists: Vec<i64>, labels: Option<Vec<String>>) -> Result<(), Error> {
        if let Some(l) = &labels {
            if l.len() != twists.len() {
                return Err(Error::Shape(format!("position {}: {} labels for {} generators", i, l.len(), twists.len())));
            }
        }
        self.diffs.remove(&i);
        self.diffs.remove(&(i + 1));
        if twists.is_empty() {
            self.modules.remove(&i);
            self.labels.remove(&i);
            return Ok(());
        }
        self.modules.insert(i, TwistedFreeModule::new(&self.ring, twists));
        match labels {
            Some(l) => {
                self.labels.insert(i, l);
            }
            None => {
                self.labels.remove(&i);
            }
        }
        Ok(())
    }

    /// Sets `∂_i: X_i -> X_{i-1}` given by rows indexed by the generators of `X_{i-1}`.
    pub fn set_diff_rows(&mut self, i: i64, rows: Vec<Vec<Poly>>) -> Result<(), Error> {
        let m = GradedMatrix::new(self.module(i), self.module(i - 1), rows).map_err(|e| at_position(i, e))?;
        self.set_diff(i, m)
    }

    pub fn set_diff(&mut self, i: i64, m: GradedMatrix) -> Result<(), Error> {
        if m.source() != &self.module(i) || m.target() != &self.module(i - 1) {
            return Err(Error::Shape(format!("position {}: differential does not match the declared modules", i)));
        }
        if m.is_zero() {
            self.diffs.remove(&i);
        } else {
            self.diffs.insert(i, m);
        }
        Ok(())
    }

    pub fn module(&self, i: i64) -> TwistedFreeModule {
        self.modules.get(&i).cloned().unwrap_or_else(|| TwistedFreeModule::zero(&self.ring))
    }

    pub fn rank(&self, i: i64) -> usize {
        self.modules.get(&i).map(TwistedFreeModule::rank).unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.modules.values().map(TwistedFreeModule::rank).sum()
    }

    pub fn diff(&self, i: i64) -> GradedMatrix {
        self.diffs.get(&i).cloned().unwrap_or_else(|| GradedMatrix::zero(&self.module(i), &self.module(i - 1)))
    }

    /// Lowest and highest positions carrying a nonzero module.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.modules.keys().next()?, *self.modules.keys().next_back()?))
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.modules.keys().copied()
    }

    pub fn has_explicit_labels(&self, i: i64) -> bool {
        self.labels.contains_key(&i)
    }

    pub fn labels(&self, i: i64) -> Vec<String> {
        match self.labels.get(&i) {
            Some(l) => l.clone(),
            None => (0..self.rank(i)).map(|g| default_label(i, g)).collect(),
        }
    }

    /// Checks homogeneity of every differential and `∂_{i-1} ∘ ∂_i = 0`, reporting the first
    /// offending position and entry.
    pub fn validate(&self) -> Result<(), Error> {
        for (&i, d) in &self.diffs {
            d.validate_homogeneity().map_err(|e| at_position(i, e))?;
        }
        for (&i, d) in &self.diffs {
            if let Some(next) = self.diffs.get(&(i - 1)) {
                let comp = next.compose(d)?;
                for r in 0..comp.nrows() {
                    for c in 0..comp.ncols() {
                        if !comp.entry(r, c).is_zero() {
                            return Err(Error::NotSquareZero(format!(
                                "position {}: entry ({}, {}) of the composite is {}",
                                i,
                                r,
                                c,
                                comp.entry(r, c)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `(Σ^d X)_i = X_{i-d}` with differential multiplied by `(-1)^d`.
    pub fn shift(&self, d: i64) -> GradedComplex {
        let mut out = GradedComplex::new(&self.ring);
        for (&i, m) in &self.modules {
            out.modules.insert(i + d, m.clone());
        }
        for (&i, l) in &self.labels {
            out.labels.insert(i + d, l.clone());
        }
        for (&i, m) in &self.diffs {
            out.diffs.insert(i + d, if d % 2 == 0 { m.clone() } else { m.neg() });
        }
        out
    }

    /// Generators of `(X ⊗ Y)_i` as `(j, g, h)` triples ordered by `j`, then `g`, then `h`.
    fn tensor_index(x: &GradedComplex, y: &GradedComplex, i: i64) -> Vec<(i64, usize, usize)> {
        let mut out = Vec::new();
        for (&j, xm) in &x.modules {
            let l = i - j;
            for g in 0..xm.rank() {
                for h in 0..y.rank(l) {
                    out.push((j, g, h));
                }
            }
        }
        out
    }

    /// `(X ⊗ Y)_i = ⊕_{j+l=i} X_j ⊗ Y_l` with `∂(g ⊗ h) = ∂g ⊗ h + (-1)^j g ⊗ ∂h`.
    pub fn tensor(&self, other: &GradedComplex) -> Result<GradedComplex, Error> {
        if !crate::poly::same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        let mut out = GradedComplex::new(&self.ring);
        let (Some((xa, xb)), Some((ya, yb))) = (self.support(), other.support()) else {
            return Ok(out);
        };
        for i in (xa + ya)..=(xb + yb) {
            let idx = Self::tensor_index(self, other, i);
            if idx.is_empty() {
                continue;
            }
            let twists = idx.iter().map(|&(j, g, h)| self.module(j).twists()[g] + other.module(i - j).twists()[h]).collect();
            let labels = idx
                .iter()
                .map(|&(j, g, h)| format!("{}_{}", self.labels(j)[g], other.labels(i - j)[h]))
                .collect();
            out.set_module(i, twists, Some(labels))?;
        }
        for i in (xa + ya + 1)..=(xb + yb) {
            let src = Self::tensor_index(self, other, i);
            let tgt = Self::tensor_index(self, other, i - 1);
            if src.is_empty() || tgt.is_empty() {
                continue;
            }
            let pos: BTreeMap<(i64, usize, usize), usize> = tgt.iter().enumerate().map(|(k, t)| (*t, k)).collect();
            let mut m = GradedMatrix::zero(&out.module(i), &out.module(i - 1));
            for (col, &(j, g, h)) in src.iter().enumerate() {
                let l = i - j;
                let dx = self.diff(j);
                for g2 in 0..dx.nrows() {
                    let e = dx.entry(g2, g);
                    if !e.is_zero() {
                        m.set(pos[&(j - 1, g2, h)], col, e.clone());
                    }
                }
                let dy = other.diff(l);
                for h2 in 0..dy.nrows() {
                    let e = dy.entry(h2, h);
                    if !e.is_zero() {
                        m.set(pos[&(j, g, h2)], col, sign_poly(e, j % 2 != 0));
                    }
                }
            }
            out.set_diff(i, m)?;
        }
        Ok(out)
    }

    /// The complex of vector spaces `(X_i)_j` for fixed internal degree `j`.
    pub fn realize_degree(&self, j: i64) -> KComplex {
        let mut c = KComplex::new(self.field());
        for (&i, m) in &self.modules {
            c.set_space(i, m.piece_dim(j));
        }
        for (&i, d) in &self.diffs {
            c.set_diff(i, d.realize_degree(j));
        }
        c
    }

    pub fn realize(&self, window: Window) -> DegreewiseComplex {
        DegreewiseComplex { window, pieces: window.degrees().map(|j| (j, self.realize_degree(j))).collect() }
    }

    /// `dim_k H_i(X)_j` for every position in the support and every `j` in the window.
    pub fn homology_truncated(&self, window: Window) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        let Some((a, b)) = self.support() else { return out };
        for j in window.degrees() {
            let c = self.realize_degree(j);
            for i in a..=b {
                out.insert((i, j), c.homology_dim(i));
            }
        }
        out
    }
}

fn at_position(i: i64, e: Error) -> Error {
    match e {
        Error::Inhomogeneous { context, row, col, expected, found } => Error::Inhomogeneous {
            context: format!("{} at position {}", context, i),
            row,
            col,
            expected,
            found,
        },
        Error::Shape(s) => Error::Shape(format!("position {}: {}", i, s)),
        other => other,
    }
}

/// A degree-zero chain map `μ: X -> Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMorphism {
    source: GradedComplex,
    target: GradedComplex,
    maps: BTreeMap<i64, GradedMatrix>,
}

impl ComplexMorphism {
    pub fn zero(source: &GradedComplex, target: &GradedComplex) -> ComplexMorphism {
        ComplexMorphism { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn identity(x: &GradedComplex) -> ComplexMorphism {
        let mut f = ComplexMorphism::zero(x, x);
        for (&i, m) in &x.modules {
            f.maps.insert(i, GradedMatrix::identity(m));
        }
        f
    }

    pub fn source(&self) -> &GradedComplex {
        &self.source
    }

    pub fn target(&self) -> &GradedComplex {
        &self.target
    }

    /// Sets `μ_i: X_i -> Y_i` from rows indexed by the generators of `Y_i`.
    pub fn set_rows(&mut self, i: i64, rows: Vec<Vec<Poly>>) -> Result<(), Error> {
        let m = GradedMatrix::new(self.source.module(i), self.target.module(i), rows).map_err(|e| at_position(i, e))?;
        self.set(i, m)
    }

    pub fn set(&mut self, i: i64, m: GradedMatrix) -> Result<(), Error> {
        if m.source() != &self.source.module(i) || m.target() != &self.target.module(i) {
            return Err(Error::Shape(format!("position {}: component does not match the complexes", i)));
        }
        if m.is_zero() {
            self.maps.remove(&i);
        } else {
            self.maps.insert(i, m);
        }
        Ok(())
    }

    pub fn component(&self, i: i64) -> GradedMatrix {
        self.maps.get(&i).cloned().unwrap_or_else(|| GradedMatrix::zero(&self.source.module(i), &self.target.module(i)))
    }

    pub fn positions(&self) -> Vec<i64> {
        let mut p: Vec<i64> = self.source.positions().chain(self.target.positions()).collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// Homogeneity of each component and `∂^Y ∘ μ = μ ∘ ∂^X`.
    pub fn validate(&self) -> Result<(), Error> {
        for (&i, m) in &self.maps {
            m.validate_homogeneity().map_err(|e| at_position(i, e))?;
        }
        for i in self.positions().into_iter().chain(self.positions().into_iter().map(|i| i + 1)) {
            let lhs = self.target.diff(i).compose(&self.component(i))?;
            let rhs = self.component(i - 1).compose(&self.source.diff(i))?;
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("commutation with the differential fails at position {}", i)));
            }
        }
        Ok(())
    }

    pub fn try_sub(&self, other: &ComplexMorphism) -> Result<ComplexMorphism, Error> {
        let mut out = ComplexMorphism::zero(&self.source, &self.target);
        for i in self.positions() {
            out.set(i, self.component(i).try_add(&other.component(i).neg())?)?;
        }
        Ok(out)
    }

    pub fn realize_degree(&self, j: i64) -> KMorphism {
        let mut f = KMorphism::new();
        for (&i, m) in &self.maps {
            f.set(i, m.realize_degree(j));
        }
        f
    }

    pub fn realize(&self, window: Window) -> DegreewiseMorphism {
        DegreewiseMorphism { pieces: window.degrees().map(|j| (j, self.realize_degree(j))).collect() }
    }

    /// Compares induced maps on every `H_i(-)_j` of the window.
    pub fn is_quasiiso(&self, window: Window) -> QuasiIsoReport {
        let positions = span(self.source.support(), self.target.support());
        let mut ranks = Vec::new();
        if let Some((a, b)) = positions {
            for j in window.degrees() {
                let (s, t) = (self.source.realize_degree(j), self.target.realize_degree(j));
                for r in self.realize_degree(j).induced_ranks(&s, &t, a..=b) {
                    ranks.push((j, r));
                }
            }
        }
        QuasiIsoReport::new(ranks)
    }
}

pub(crate) fn span(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
    }
}

/// Per-degree induced ranks; `(internal degree, ranks at one position)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIsoReport {
    pub ranks: Vec<(i64, InducedRanks)>,
    pub certified: bool,
}

impl QuasiIsoReport {
    pub fn new(ranks: Vec<(i64, InducedRanks)>) -> QuasiIsoReport {
        let certified = ranks.iter().all(|(_, r)| r.is_iso());
        QuasiIsoReport { ranks, certified }
    }

    /// First degree and position where the induced map is not bijective.
    pub fn first_failure(&self) -> Option<&(i64, InducedRanks)> {
        self.ranks.iter().find(|(_, r)| !r.is_iso())
    }
}

/// A family `σ_i: X_i -> Y_{i+1}` of degree-zero A-linear maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub maps: BTreeMap<i64, GradedMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyResult {
    Found(Homotopy),
    NoneFound,
}

/// Searches for `σ` with `∂σ + σ∂ = μ - λ`.
///
/// The unknowns are the coefficients of every entry of every `σ_i`. An unknown of `σ_i` enters
/// the equations at positions `i` and `i + 1`, so the system is solved jointly; it is finite
/// because each entry is a form of fixed degree. `NoneFound` therefore means no A-linear
/// degree-zero homotopy exists at all.
pub fn homotopy_between(mu: &ComplexMorphism, lambda: &ComplexMorphism) -> Result<HomotopyResult, Error> {
    if mu.source != lambda.source || mu.target != lambda.target {
        return Err(Error::Shape(String::from("homotopy between morphisms with different endpoints")));
    }
    let x = &mu.source;
    let y = &mu.target;
    let ring = x.ring.clone();
    let field = ring.field();
    let nvars = ring.nvars();
    let diff = mu.try_sub(lambda)?;
    let positions = mu.positions();

    // Unknowns: (i, r, c, monomial) for σ_i entry (r, c), r indexing Y_{i+1}.
    let mut unknowns = Vec::new();
    for &i in &positions {
        let (xs, ys) = (x.module(i), y.module(i + 1));
        for r in 0..ys.rank() {
            for c in 0..xs.rank() {
                for m in monomials_of_degree(nvars, xs.twists()[c] - ys.twists()[r]) {
                    unknowns.push((i, r, c, m));
                }
            }
        }
    }
    if unknowns.is_empty() && positions.iter().all(|&i| diff.component(i).is_zero()) {
        return Ok(HomotopyResult::Found(Homotopy { maps: BTreeMap::new() }));
    }

    // Equations: coefficient of monomial m in entry (r, c) of the position-i identity.
    type EqKey = (i64, usize, usize, Monomial);
    fn next_eq(key: EqKey, idx: &mut BTreeMap<EqKey, usize>) -> usize {
        let n = idx.len();
        *idx.entry(key).or_insert(n)
    }
    let mut eq_index: BTreeMap<EqKey, usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, crate::field::Scalar)>> = Vec::with_capacity(unknowns.len());
    for (i, r, c, m) in &unknowns {
        let mut col = Vec::new();
        // ∂^Y_{i+1} σ_i contributes at position i: entry (r2, c) += ∂^Y[r2, r] * x^m.
        let dy = y.diff(i + 1);
        for r2 in 0..dy.nrows() {
            for (t, s) in dy.entry(r2, *r).terms() {
                col.push((next_eq((*i, r2, *c, t.mul(m)), &mut eq_index), s.clone()));
            }
        }
        // σ_i ∂^X_{i+1} contributes at position i+1: entry (r, c2) += x^m * ∂^X[c, c2].
        let dx = x.diff(i + 1);
        for c2 in 0..dx.ncols() {
            for (t, s) in dx.entry(*c, c2).terms() {
                col.push((next_eq((*i + 1, *r, c2, t.mul(m)), &mut eq_index), s.clone()));
            }
        }
        columns.push(col);
    }
    let mut rhs_terms = Vec::new();
    for &i in &positions {
        let d = diff.component(i);
        for r in 0..d.nrows() {
            for c in 0..d.ncols() {
                for (t, s) in d.entry(r, c).terms() {
                    rhs_terms.push((next_eq((i, r, c, t.clone()), &mut eq_index), s.clone()));
                }
            }
        }
    }
    let neq = eq_index.len();
    let mut a = Mat::zeros(field, neq, unknowns.len());
    for (k, col) in columns.iter().enumerate() {
        for (e, s) in col {
            a.add_to(*e, k, s);
        }
    }
    let mut b = crate::linalg::zero_vector(field, neq);
    for (e, s) in rhs_terms {
        b[e] = &b[e] + &s;
    }
    let Some(sol) = a.solve(&b) else { return Ok(HomotopyResult::NoneFound) };

    let mut maps: BTreeMap<i64, GradedMatrix> = BTreeMap::new();
    for ((i, r, c, m), v) in unknowns.iter().zip(sol) {
        if v.is_zero() {
            continue;
        }
        let entry = maps.entry(*i).or_insert_with(|| GradedMatrix::zero(&x.module(*i), &y.module(*i + 1)));
        let mut p = entry.entry(*r, *c).clone();
        p.add_term(m.clone(), &v);
        entry.set(*r, *c, p);
    }
    let h = Homotopy { maps };
    verify_homotopy(mu, lambda, &h)?;
    Ok(HomotopyResult::Found(h))
}

/// Checks `∂σ + σ∂ = μ - λ` as a polynomial identity at every position.
pub fn verify_homotopy(mu: &ComplexMorphism, lambda: &ComplexMorphism, h: &Homotopy) -> Result<(), Error> {
    let x = &mu.source;
    let y = &mu.target;
    let sigma = |i: i64| h.maps.get(&i).cloned().unwrap_or_else(|| GradedMatrix::zero(&x.module(i), &y.module(i + 1)));
    let diff = mu.try_sub(lambda)?;
    for i in mu.positions() {
        let lhs = y.diff(i + 1).compose(&sigma(i))?.try_add(&sigma(i - 1).compose(&x.diff(i))?)?;
        if lhs != diff.component(i) {
            return Err(Error::NotChainMap(format!("homotopy identity fails at position {}", i)));
        }
    }
    Ok(())
}

/// The zig-zag `X <-ι- T -π-> H` for a complex whose homology sits in one position `n`,
/// realized degree by degree. `T` agrees with `X` above `n`, is `Z_n(X)` at `n` and vanishes
/// below; `H` is `H_n(X)` in position `n`.
#[derive(Clone, Debug)]
pub struct ConcentratedReplacement {
    pub position: i64,
    pub x: DegreewiseComplex,
    pub t: DegreewiseComplex,
    pub h: DegreewiseComplex,
    pub iota: DegreewiseMorphism,
    pub pi: DegreewiseMorphism,
    pub iota_report: QuasiIsoReport,
    pub pi_report: QuasiIsoReport,
    pub positions: (i64, i64),
}

impl ConcentratedReplacement {
    /// Quasi-isomorphism reports for the totaled maps `Tot ι` and `Tot π`.
    pub fn total_reports(&self) -> (QuasiIsoReport, QuasiIsoReport, Window) {
        let p = self.positions;
        let (tt, tw) = self.t.total(p);
        let (tx, _) = self.x.total(p);
        let (th, _) = self.h.total(p);
        let ti = self.iota.total(&self.t, &self.x, p);
        let tp = self.pi.total(&self.t, &self.h, p);
        let degrees = || tw.degrees();
        let ir = ti.induced_ranks(&tt, &tx, degrees()).into_iter().map(|r| (r.position, r)).collect();
        let pr = tp.induced_ranks(&tt, &th, degrees()).into_iter().map(|r| (r.position, r)).collect();
        (QuasiIsoReport::new(ir), QuasiIsoReport::new(pr), tw)
    }
}

pub fn concentrated_replacement(x: &GradedComplex, n: i64, window: Window) -> Result<ConcentratedReplacement, Error> {
    x.validate()?;
    let field = x.field();
    let (a, b) = x.support().unwrap_or((n, n));
    let positions = (a.min(n), b.max(n));
    for ((i, _), dim) in x.homology_truncated(window) {
        if i != n && dim != 0 {
            return Err(Error::NotConcentrated(i));
        }
    }
    let xr = x.realize(window);
    let mut t = DegreewiseComplex { window, pieces: BTreeMap::new() };
    let mut h = DegreewiseComplex { window, pieces: BTreeMap::new() };
    let mut iota = DegreewiseMorphism { pieces: BTreeMap::new() };
    let mut pi = DegreewiseMorphism { pieces: BTreeMap::new() };
    for j in window.degrees() {
        let c = xr.piece(j);
        let z = c.cycles(n);
        let bnd = c.boundaries(n);
        let mut tc = KComplex::new(field);
        let mut ic = KMorphism::new();
        for i in (n + 1)..=positions.1 {
            tc.set_space(i, c.dim(i));
            ic.set(i, Mat::identity(field, c.dim(i)));
        }
        tc.set_space(n, z.dim());
        for i in (n + 2)..=positions.1 {
            tc.set_diff(i, c.diff(i));
        }
        // ∂_{n+1} lands in Z_n; rewrite it in the echelon basis of Z_n.
        let d = c.diff(n + 1);
        let cols: Vec<_> = d.columns().iter().map(|v| z.coordinates(v).expect("boundaries are cycles")).collect();
        tc.set_diff(n + 1, Mat::from_columns(field, z.dim(), &cols));
        ic.set(n, Mat::from_columns(field, c.dim(n), z.basis()));

        let reps = bnd.complement_from(z.basis().iter().cloned());
        let mut hc = KComplex::new(field);
        hc.set_space(n, reps.len());
        let mut joint: Vec<_> = bnd.basis().to_vec();
        joint.extend(reps.iter().cloned());
        let basis_mat = Mat::from_columns(field, c.dim(n), &joint);
        let pcols: Vec<_> = z
            .basis()
            .iter()
            .map(|v| {
                let s = basis_mat.solve(v).expect("cycle lies in B + span(reps)");
                s[bnd.dim()..].to_vec()
            })
            .collect();
        let mut pc = KMorphism::new();
        pc.set(n, Mat::from_columns(field, reps.len(), &pcols));
        t.pieces.insert(j, tc);
        h.pieces.insert(j, hc);
        iota.pieces.insert(j, ic);
        pi.pieces.insert(j, pc);
    }
    iota.check_chain_map(&t, &xr)?;
    pi.check_chain_map(&t, &h)?;
    let iota_report = QuasiIsoReport::new(iota.induced_ranks(&t, &xr, positions));
    let pi_report = QuasiIsoReport::new(pi.induced_ranks(&t, &h, positions));
    Ok(ConcentratedReplacement { position: n, x: xr, t, h, iota, pi, iota_report, pi_report, positions })
}

/// `0 -> Σ^1 A -x_v-> A -> 0` in positions 1, 0.
pub fn koszul_one(ring: &Ring, var: usize) -> GradedComplex {
    let mut k = GradedComplex::new(ring);
    k.set_module(0, vec![0], None).expect("fresh");
    k.set_module(1, vec![1], None).expect("fresh");
    k.set_diff_rows(1, vec![vec![Poly::var(ring, var)]]).expect("homogeneous");
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyRing;
    use alloc::string::ToString;

    fn ring(vars: &[&str]) -> Ring {
        PolyRing::new(Field::Rationals, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn detotaled_example(r: &Ring, flip: bool) -> GradedComplex {
        let x = Poly::var(r, 0);
        let yz = &Poly::var(r, 1) * &Poly::var(r, 2);
        let mut c = GradedComplex::new(r);
        c.set_module(0, vec![0], None).unwrap();
        c.set_module(1, vec![1, 2], None).unwrap();
        c.set_module(2, vec![3], None).unwrap();
        c.set_diff_rows(1, vec![vec![x.clone(), yz.clone()]]).unwrap();
        let lower = if flip { x.clone() } else { -&x };
        c.set_diff_rows(2, vec![vec![yz], vec![lower]]).unwrap();
        c
    }

    #[test]
    fn validates_koszul_and_detotaled_example() {
        let r = ring(&["x"]);
        koszul_one(&r, 0).validate().unwrap();
        let r3 = ring(&["x", "y", "z"]);
        detotaled_example(&r3, false).validate().unwrap();
        let err = detotaled_example(&r3, true).validate().unwrap_err();
        assert!(matches!(err, Error::NotSquareZero(ref s) if s.starts_with("position 2")), "{err}");
    }

    #[test]
    fn shift_signs() {
        let r = ring(&["x"]);
        let k = koszul_one(&r, 0);
        assert_eq!(k.shift(0), k);
        let s = k.shift(1);
        assert_eq!(s.diff(2).entry(0, 0), &-&Poly::var(&r, 0));
        assert_eq!(s.shift(1), k.shift(2));
        assert_eq!(k.shift(2).diff(3), k.diff(1));
    }

    #[test]
    fn koszul_square() {
        let r = ring(&["x"]);
        let k = koszul_one(&r, 0);
        let kk = k.tensor(&k).unwrap();
        assert_eq!((kk.rank(0), kk.rank(1), kk.rank(2)), (1, 2, 1));
        kk.validate().unwrap();
        let unit = GradedComplex::concentrated(&r, 0, vec![0]);
        let ku = k.tensor(&unit).unwrap();
        assert_eq!(ku.diff(1).rows(), k.diff(1).rows());
    }

    #[test]
    fn homology_of_koszul_resolution() {
        let r = ring(&["x"]);
        let h = koszul_one(&r, 0).homology_truncated(Window::new(-1, 5));
        for ((i, j), d) in h {
            assert_eq!(d, usize::from(i == 0 && j == 0), "H_{i} in degree {j}");
        }
    }

    #[test]
    fn identity_and_zero_quasi_iso() {
        let r = ring(&["x"]);
        let k = koszul_one(&r, 0);
        assert!(ComplexMorphism::identity(&k).is_quasiiso(Window::new(0, 4)).certified);
        assert!(!ComplexMorphism::zero(&k, &k).is_quasiiso(Window::new(0, 4)).certified);
    }

    #[test]
    fn homotopies() {
        let r = ring(&["x"]);
        let k = koszul_one(&r, 0);
        let id = ComplexMorphism::identity(&k);
        assert_eq!(homotopy_between(&id, &id).unwrap(), HomotopyResult::Found(Homotopy { maps: BTreeMap::new() }));
        let zero = ComplexMorphism::zero(&k, &k);
        assert_eq!(homotopy_between(&id, &zero).unwrap(), HomotopyResult::NoneFound);
    }

    #[test]
    fn replacement_of_koszul_resolution() {
        let r = ring(&["x"]);
        let k = koszul_one(&r, 0);
        let rep = concentrated_replacement(&k, 0, Window::new(-1, 6)).unwrap();
        assert!(rep.iota_report.certified && rep.pi_report.certified);
        assert_eq!(rep.h.piece(0).dim(0), 1);
        assert_eq!(rep.h.piece(1).dim(0), 0);
        let (ti, tp, _) = rep.total_reports();
        assert!(ti.certified && tp.certified);
        assert!(matches!(concentrated_replacement(&k, 1, Window::new(0, 3)), Err(Error::NotConcentrated(0))));
    }
}
