//! Finite-rank semifree DG modules over a standard-graded polynomial ring.
//!
//! A module has basis `e_1, ..., e_n` in homological degrees `n_1, ..., n_n`; as a graded
//! A-module it is `⊕ Σ^{n_j} A`, so its homological degree `d` piece is the internal degree `d`
//! piece of that free module. The differential is `∂e_j = Σ_i D_ij e_i` with `D_ij` a form of
//! degree `n_j - n_i - 1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::complex::QuasiIsoReport;
use crate::error::Error;
use crate::field::Field;
use crate::graded::{graded_min_gens, GradedMatrix, TwistedFreeModule, Window};
use crate::kchain::{KComplex, KMorphism};
use crate::linalg::{Mat, Subspace, Vector};
use crate::poly::{same_ring, Poly, Ring};

/// How the A-action interacts with the differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SignConvention {
    /// `∂(a m) = a ∂(m)`
    #[default]
    Even,
    /// `∂(a m) = (-1)^{|a|} a ∂(m)`
    Koszul,
}

impl SignConvention {
    pub fn parse(s: &str) -> Option<SignConvention> {
        match s {
            "even" => Some(SignConvention::Even),
            "koszul" => Some(SignConvention::Koszul),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SignConvention::Even => "even",
            SignConvention::Koszul => "koszul",
        }
    }

    /// Whether multiplying by a form of degree `deg` past the differential flips the sign.
    pub fn flips(&self, deg: i64) -> bool {
        matches!(self, SignConvention::Koszul) && deg.rem_euclid(2) == 1
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemifreeDG {
    ring: Ring,
    labels: Vec<String>,
    degrees: Vec<i64>,
    d: Vec<Poly>,
    convention: SignConvention,
}

impl SemifreeDG {
    /// A module with the given basis and zero differential.
    pub fn new(ring: &Ring, labels: Vec<String>, degrees: Vec<i64>, convention: SignConvention) -> Result<SemifreeDG, Error> {
        if labels.len() != degrees.len() {
            return Err(Error::Shape(format!("{} labels for {} degrees", labels.len(), degrees.len())));
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::Invalid(format!("duplicate basis label {}", l)));
            }
        }
        let n = labels.len();
        Ok(SemifreeDG { ring: ring.clone(), labels, degrees, d: (0..n * n).map(|_| Poly::zero(ring)).collect(), convention })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    pub fn with_convention(&self, convention: SignConvention) -> SemifreeDG {
        SemifreeDG { convention, ..self.clone() }
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Coefficient of `e_i` in `∂e_j`.
    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.d[i * self.rank() + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, p: Poly) -> Result<(), Error> {
        if !same_ring(p.ring(), &self.ring) {
            return Err(Error::RingMismatch);
        }
        let n = self.rank();
        self.d[i * n + j] = p;
        Ok(())
    }

    /// Coefficients of `∂e_j`.
    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.rank()).map(|i| self.entry(i, j).clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, col: Vec<Poly>) -> Result<(), Error> {
        if col.len() != self.rank() {
            return Err(Error::Shape(format!("differential of {} has {} coefficients", self.labels[j], col.len())));
        }
        for (i, p) in col.into_iter().enumerate() {
            self.set_entry(i, j, p)?;
        }
        Ok(())
    }

    /// Required degree of the coefficient of `e_i` in `∂e_j`.
    pub fn entry_degree(&self, i: usize, j: usize) -> i64 {
        self.degrees[j] - self.degrees[i] - 1
    }

    /// `M^♮ = ⊕ Σ^{n_j} A`.
    pub fn underlying(&self) -> TwistedFreeModule {
        TwistedFreeModule::new(&self.ring, self.degrees.clone())
    }

    /// `∂` as a degree-zero map `⊕ Σ^{n_j} A -> ⊕ Σ^{n_i + 1} A`.
    pub fn differential_matrix(&self) -> GradedMatrix {
        let src = self.underlying();
        let tgt = TwistedFreeModule::new(&self.ring, self.degrees.iter().map(|n| n + 1).collect());
        let mut m = GradedMatrix::zero(&src, &tgt);
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                m.set(i, j, self.entry(i, j).clone());
            }
        }
        m
    }

    pub fn is_zero_differential(&self) -> bool {
        self.d.iter().all(Poly::is_zero)
    }

    /// Basis indices sorted by degree, ties by declaration order. Every differential only
    /// involves strictly earlier elements of this order.
    pub fn well_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.sort_by_key(|&j| (self.degrees[j], j));
        order
    }

    /// `∂` applied to `Σ_j a_j e_j`.
    pub fn apply_differential(&self, element: &[Poly]) -> Vec<Poly> {
        let mut out: Vec<Poly> = (0..self.rank()).map(|_| Poly::zero(&self.ring)).collect();
        for (j, a) in element.iter().enumerate() {
            for (m, c) in a.terms() {
                let c = if self.convention.flips(m.degree() as i64) { -c } else { c.clone() };
                let t = Poly::term(&self.ring, m.clone(), c);
                for (i, o) in out.iter_mut().enumerate() {
                    let e = self.entry(i, j);
                    if !e.is_zero() {
                        *o = &*o + &(&t * e);
                    }
                }
            }
        }
        out
    }

    /// Coefficients of `∂²e_j`.
    pub fn square(&self, j: usize) -> Vec<Poly> {
        self.apply_differential(&self.column(j))
    }

    /// Checks coefficient degrees and `∂² = 0` under the active convention and returns the
    /// well-order.
    pub fn validate(&self) -> Result<Vec<usize>, Error> {
        for j in 0..self.rank() {
            for i in 0..self.rank() {
                let e = self.entry(i, j);
                let want = self.entry_degree(i, j);
                if !e.is_homogeneous_of(want) {
                    return Err(Error::Inhomogeneous {
                        context: format!("in d {} (coefficient of {})", self.labels[j], self.labels[i]),
                        row: i,
                        col: j,
                        expected: want,
                        found: e.degree_label(),
                    });
                }
            }
        }
        for j in self.well_order() {
            let sq = self.square(j);
            if sq.iter().any(|p| !p.is_zero()) {
                return Err(Error::NotSquareZero(format!("d(d {}) = {}", self.labels[j], self.format_element(&sq))));
            }
        }
        Ok(self.well_order())
    }

    /// `a_1*e_1 + ...` with the conventions of the text format; `0` for the zero element.
    pub fn format_element(&self, element: &[Poly]) -> String {
        format_combination(&self.labels, element)
    }

    /// True iff every differential coefficient lies in the augmentation ideal.
    pub fn is_minimal(&self) -> bool {
        self.d.iter().all(|p| p.is_zero() || p.homogeneous_degree().is_some_and(|d| d >= 1))
    }

    /// The k-linear differential `M_d -> M_{d-1}`.
    pub fn realize(&self, d: i64) -> Mat {
        let conv = self.convention;
        self.differential_matrix().realize_degree_signed(d, |_, deg| conv.flips(deg as i64))
    }

    /// The chain complex of vector spaces `M_{lo-1} <- ... <- M_{hi+1}`.
    pub fn realize_window(&self, window: Window) -> KComplex {
        let mut c = KComplex::new(self.field());
        let m = self.underlying();
        for d in (window.lo - 1)..=(window.hi + 1) {
            c.set_space(d, m.piece_dim(d));
        }
        for d in window.lo..=(window.hi + 1) {
            if c.dim(d) > 0 && c.dim(d - 1) > 0 {
                c.set_diff(d, self.realize(d));
            }
        }
        c
    }

    /// `[min n_j, 2 (max n_j + max coefficient degree) + 4]`.
    pub fn default_window(&self) -> Window {
        let lo = self.degrees.iter().copied().min().unwrap_or(0);
        let top = self.degrees.iter().copied().max().unwrap_or(0);
        let entry = self.d.iter().filter_map(Poly::degree).max().unwrap_or(0) as i64;
        Window::new(lo, 2 * (top + entry) + 4)
    }

    pub fn dims_in_window(&self, window: Window) -> BTreeMap<i64, usize> {
        let m = self.underlying();
        window.degrees().map(|d| (d, m.piece_dim(d))).collect()
    }
}

pub(crate) fn format_combination(labels: &[String], element: &[Poly]) -> String {
    let mut out = String::new();
    for (p, l) in element.iter().zip(labels) {
        if p.is_zero() {
            continue;
        }
        let body = if p.num_terms() == 1 {
            let s = p.to_string();
            if s == "1" {
                l.clone()
            } else if s == "-1" {
                format!("-{}", l)
            } else {
                format!("{}*{}", s, l)
            }
        } else {
            format!("({})*{}", p, l)
        };
        if out.is_empty() {
            out = body;
        } else if let Some(rest) = body.strip_prefix('-') {
            out = format!("{} - {}", out, rest);
        } else {
            out = format!("{} + {}", out, body);
        }
    }
    if out.is_empty() {
        String::from("0")
    } else {
        out
    }
}

/// Smallest number of top window degrees that must be free of new generators and relations
/// before a degreewise result is trusted.
pub fn certification_slack(window: Window) -> i64 {
    let len = window.hi - window.lo + 1;
    (len + 4) / 5
}

/// Minimal homogeneous presentation `F_1 -> F_0 -> H(M) -> 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyPresentation {
    pub window: Window,
    /// `dim_k H_d(M)` for every `d` in the window.
    pub dims: BTreeMap<i64, usize>,
    pub generator_degrees: Vec<i64>,
    /// Cycle representative of each generator, one coefficient per basis element of `M`.
    pub cycles: Vec<Vec<Poly>>,
    pub relation_degrees: Vec<i64>,
    /// Columns are relations, rows are generators.
    pub presentation: GradedMatrix,
    pub certified: bool,
    pub suggested_hi: Option<i64>,
}

impl HomologyPresentation {
    pub fn generators_module(&self) -> &TwistedFreeModule {
        self.presentation.target()
    }

    /// `dim_k (coker presentation)_d`.
    pub fn presented_dim(&self, d: i64) -> usize {
        let m = self.presentation.realize_degree(d);
        self.generators_module().piece_dim(d) - m.rank()
    }

    pub fn to_error(&self) -> Error {
        Error::WindowTooSmall { lo: self.window.lo, hi: self.window.hi, suggested_hi: self.suggested_hi.unwrap_or(self.window.hi) }
    }
}

/// Degrees found in the top `slack` degrees of `window` make the window suspect.
pub(crate) fn certify(window: Window, degrees: impl IntoIterator<Item = i64>) -> (bool, Option<i64>) {
    let slack = certification_slack(window);
    let top = degrees.into_iter().max();
    match top {
        Some(t) if t > window.hi - slack => (false, Some(t + 2 * slack)),
        _ => (true, None),
    }
}

/// Homology of `M` in `window`, with a minimal presentation of `H(M)` as an A-module.
///
/// Generators in degree `d` span a complement of `B_d + A_1 Z_{d-1}` in `Z_d`; relations are
/// minimal generators of the kernel of `F_0 -> H(M)`. The result is flagged uncertified when a
/// generator or relation appears within [`certification_slack`] of the top of the window.
pub fn dg_homology(m: &SemifreeDG, window: Window) -> Result<HomologyPresentation, Error> {
    m.validate()?;
    let lo_needed = m.degrees.iter().copied().min().unwrap_or(window.lo);
    if window.lo > lo_needed {
        return Err(Error::Invalid(format!("window must start at or below the lowest basis degree {}", lo_needed)));
    }
    let field = m.field();
    let k = m.realize_window(window);
    let ambient = m.underlying();
    let mut z: BTreeMap<i64, Subspace> = BTreeMap::new();
    let mut b: BTreeMap<i64, Subspace> = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for d in (window.lo - 1)..=window.hi {
        z.insert(d, k.cycles(d));
        b.insert(d, k.boundaries(d));
    }
    for d in window.degrees() {
        dims.insert(d, z[&d].dim() - b[&d].dim());
    }
    let gens = graded_min_gens(&ambient, window, |d| z[&d].clone(), |d| b[&d].clone());
    let generator_degrees: Vec<i64> = gens.iter().map(|(d, _)| *d).collect();
    let cycles: Vec<Vec<Poly>> = gens.iter().map(|(d, v)| ambient.from_coords(*d, v)).collect();
    let f0 = TwistedFreeModule::new(m.ring(), generator_degrees.clone());

    // Kernel of F_0 -> M / B in each degree.
    let mut kernels: BTreeMap<i64, Subspace> = BTreeMap::new();
    for d in (window.lo - 1)..=window.hi {
        let phi = generator_map(&f0, &cycles, &ambient, d);
        let bd = b.get(&d).cloned().unwrap_or_else(|| Subspace::zero(field, ambient.piece_dim(d)));
        kernels.insert(d, preimage(&phi, &bd));
    }
    let rels = graded_min_gens(&f0, window, |d| kernels[&d].clone(), |d| Subspace::zero(field, f0.piece_dim(d)));
    let relation_degrees: Vec<i64> = rels.iter().map(|(d, _)| *d).collect();
    let f1 = TwistedFreeModule::new(m.ring(), relation_degrees.clone());
    let mut pres = GradedMatrix::zero(&f1, &f0);
    for (c, (d, v)) in rels.iter().enumerate() {
        for (r, p) in f0.from_coords(*d, v).into_iter().enumerate() {
            pres.set(r, c, p);
        }
    }
    let (certified, suggested_hi) = certify(window, generator_degrees.iter().chain(&relation_degrees).copied());
    Ok(HomologyPresentation {
        window,
        dims,
        generator_degrees,
        cycles,
        relation_degrees,
        presentation: pres,
        certified,
        suggested_hi,
    })
}

/// The k-linear map `(F_0)_d -> M_d` sending `x^m g_i` to `x^m z_i`.
pub(crate) fn generator_map(f0: &TwistedFreeModule, images: &[Vec<Poly>], ambient: &TwistedFreeModule, d: i64) -> Mat {
    let field = ambient.field();
    let mut cols: Vec<Vector> = Vec::new();
    for (g, m) in f0.piece_basis(d) {
        let el: Vec<Poly> = images[g].iter().map(|p| p.mul_monomial(&m)).collect();
        cols.push(ambient.to_coords(d, &el).expect("homogeneous image"));
    }
    Mat::from_columns(field, ambient.piece_dim(d), &cols)
}

/// `{v : f(v) ∈ s}`.
pub(crate) fn preimage(f: &Mat, s: &Subspace) -> Subspace {
    let field = f.field();
    let n = f.ncols();
    if n == 0 {
        return Subspace::zero(field, 0);
    }
    let mut cols = f.columns();
    cols.extend(s.basis().iter().cloned());
    let joint = Mat::from_columns(field, f.nrows(), &cols);
    Subspace::span(field, n, joint.kernel().into_iter().map(|v| v[..n].to_vec()))
}

/// Some `m ∈ M_{d+1}` with `∂m = target`, where `target ∈ M_d`.
pub fn boundary_preimage(m: &SemifreeDG, target: &[Poly], d: i64) -> Result<Vec<Poly>, Error> {
    let ambient = m.underlying();
    let t = ambient.to_coords(d, target)?;
    let real = m.realize(d + 1);
    let sol = real.solve(&t).ok_or(Error::NotABoundary(d))?;
    let pre = ambient.from_coords(d + 1, &sol);
    if m.apply_differential(&pre) != target {
        return Err(Error::NotABoundary(d));
    }
    Ok(pre)
}

/// An A-linear degree-zero map between semifree modules: `μ(e_j) = Σ_i μ_ij f_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgMorphism {
    pub source: SemifreeDG,
    pub target: SemifreeDG,
    pub matrix: GradedMatrix,
}

impl DgMorphism {
    pub fn new(source: &SemifreeDG, target: &SemifreeDG, rows: Vec<Vec<Poly>>) -> Result<DgMorphism, Error> {
        let matrix = GradedMatrix::new(source.underlying(), target.underlying(), rows)?;
        Ok(DgMorphism { source: source.clone(), target: target.clone(), matrix })
    }

    pub fn zero(source: &SemifreeDG, target: &SemifreeDG) -> DgMorphism {
        DgMorphism { source: source.clone(), target: target.clone(), matrix: GradedMatrix::zero(&source.underlying(), &target.underlying()) }
    }

    pub fn identity(m: &SemifreeDG) -> DgMorphism {
        DgMorphism { source: m.clone(), target: m.clone(), matrix: GradedMatrix::identity(&m.underlying()) }
    }

    /// Image of basis element `e_j` of the source.
    pub fn image(&self, j: usize) -> Vec<Poly> {
        self.matrix.column(j)
    }

    /// Checks `∂μ = μ∂` on every source basis element.
    pub fn check_chain_map(&self) -> Result<(), Error> {
        if !same_ring(self.source.ring(), self.target.ring()) {
            return Err(Error::RingMismatch);
        }
        if self.source.convention() != self.target.convention() {
            return Err(Error::Invalid(String::from("source and target use different sign conventions")));
        }
        self.matrix.validate_homogeneity()?;
        for j in 0..self.source.rank() {
            let lhs = self.target.apply_differential(&self.image(j));
            let rhs = self.matrix.apply(&self.source.column(j));
            if lhs != rhs {
                return Err(Error::NotChainMap(format!(
                    "degree {}, basis element {}: d(mu({})) = {} but mu(d {}) = {}",
                    self.source.degrees()[j],
                    self.source.labels()[j],
                    self.source.labels()[j],
                    self.target.format_element(&lhs),
                    self.source.labels()[j],
                    self.target.format_element(&rhs)
                )));
            }
        }
        Ok(())
    }

    pub fn realize_window(&self, window: Window) -> KMorphism {
        let mut f = KMorphism::new();
        for d in (window.lo - 1)..=(window.hi + 1) {
            f.set(d, self.matrix.realize_degree(d));
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismCertificate {
    pub window: Window,
    /// Induced maps on `H_d` keyed by `d` (the position field of each entry is `d` as well).
    pub quasi_iso: QuasiIsoReport,
}

/// Verifies that `μ` is a chain map and compares `H_d(μ)` on every degree of the window.
pub fn dg_morphism_check(mu: &DgMorphism, window: Window) -> Result<MorphismCertificate, Error> {
    mu.source.validate()?;
    mu.target.validate()?;
    mu.check_chain_map()?;
    let s = mu.source.realize_window(window);
    let t = mu.target.realize_window(window);
    let f = mu.realize_window(window);
    f.check_chain_map(&s, &t)?;
    let ranks = f.induced_ranks(&s, &t, window.degrees()).into_iter().map(|r| (r.position, r)).collect();
    Ok(MorphismCertificate { window, quasi_iso: QuasiIsoReport::new(ranks) })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::poly::PolyRing;
    use alloc::vec;

    pub(crate) fn ring(field: Field, vars: &[&str]) -> Ring {
        PolyRing::new(field, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{}", i)).collect()
    }

    /// The rank-four module over `k[x1, x2]` with degrees (0, 3, 4, 8).
    pub(crate) fn e1(field: Field, middle_sign: i64) -> SemifreeDG {
        let r = ring(field, &["x1", "x2"]);
        let x1 = Poly::var(&r, 0);
        let x2 = Poly::var(&r, 1);
        let mut m = SemifreeDG::new(&r, labels(4), vec![0, 3, 4, 8], SignConvention::Even).unwrap();
        m.set_entry(0, 1, &x1 * &x2).unwrap();
        m.set_entry(0, 2, x2.pow(3)).unwrap();
        m.set_entry(0, 3, x1.pow(7)).unwrap();
        m.set_entry(1, 3, x2.pow(4).scale(&field.from_i64(-middle_sign))).unwrap();
        m.set_entry(2, 3, &x1 * &x2.pow(2)).unwrap();
        m
    }

    /// The rank-five module over `k[x]` with degrees (0, 2, 4, 8, 9).
    pub(crate) fn e3() -> SemifreeDG {
        let r = ring(Field::Rationals, &["x"]);
        let x = |e| Poly::var_pow(&r, 0, e);
        let mut m = SemifreeDG::new(&r, labels(5), vec![0, 2, 4, 8, 9], SignConvention::Even).unwrap();
        m.set_entry(0, 3, x(7)).unwrap();
        m.set_entry(1, 3, x(5)).unwrap();
        m.set_entry(2, 4, x(4)).unwrap();
        m
    }

    #[test]
    fn e1_validates_under_even_only() {
        let m = e1(Field::Rationals, 1);
        assert_eq!(m.validate().unwrap(), vec![0, 1, 2, 3]);
        let err = m.with_convention(SignConvention::Koszul).validate().unwrap_err();
        assert_eq!(err, Error::NotSquareZero(String::from("d(d e4) = -2*x1*x2^5*e1")));
    }

    #[test]
    fn e1_negated_middle_fails() {
        let m = e1(Field::Rationals, -1);
        let sq = m.square(3);
        assert!(!sq[0].is_zero());
        assert_eq!(sq[0].to_string(), "2*x1*x2^5");
        assert!(m.validate().is_err());
    }

    #[test]
    fn zero_differential_validates() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let m = SemifreeDG::new(&r, labels(3), vec![5, 0, 2], SignConvention::Koszul).unwrap();
        assert_eq!(m.validate().unwrap(), vec![1, 2, 0]);
        assert!(m.is_minimal());
    }

    #[test]
    fn realization_of_e3() {
        let m = e3();
        let real = m.realize(8);
        // Column of e4 (last basis vector of M_8) encodes x^7 e1 + x^5 e2.
        let col = real.column(real.ncols() - 1);
        let tgt = m.underlying().from_coords(7, &col);
        assert_eq!(tgt[0], Poly::var_pow(m.ring(), 0, 7));
        assert_eq!(tgt[1], Poly::var_pow(m.ring(), 0, 5));
        assert_eq!(m.realize(0).nrows(), m.underlying().piece_dim(-1));
        let e = e1(Field::Rationals, 1);
        assert!(e.realize(0).is_zero());
        assert_eq!(e.underlying().piece_dim(0), 1);
    }

    #[test]
    fn homology_of_e1() {
        let m = e1(Field::prime(101).unwrap(), 1);
        let h = dg_homology(&m, Window::new(0, 20)).unwrap();
        assert!(h.certified);
        assert_eq!(h.generator_degrees, vec![0, 5]);
        assert_eq!(m.format_element(&h.cycles[1]), "x2^2*e2 - x1*e3");
        assert_eq!(h.relation_degrees, vec![2, 3, 7]);
        let rows: Vec<Vec<String>> = h.presentation.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
        assert_eq!(rows, vec![vec!["x1*x2", "x2^3", "x1^7"], vec!["0", "0", "-x2^2"]]);
        for (&d, &dim) in &h.dims {
            assert_eq!(h.presented_dim(d), dim, "degree {d}");
        }
    }

    #[test]
    fn homology_of_e3() {
        let m = e3();
        let h = dg_homology(&m, Window::new(0, 20)).unwrap();
        assert_eq!(h.generator_degrees, vec![0, 2, 4]);
        assert_eq!(h.relation_degrees, vec![7, 8]);
        assert!(h.certified);
    }

    #[test]
    fn small_window_is_flagged() {
        let m = e1(Field::Rationals, 1);
        let h = dg_homology(&m, Window::new(0, 8)).unwrap();
        assert!(!h.certified);
        assert!(h.suggested_hi.unwrap() > 8);
    }

    #[test]
    fn minimality() {
        let r = ring(Field::Rationals, &["x"]);
        let mut m = SemifreeDG::new(&r, labels(2), vec![0, 1], SignConvention::Even).unwrap();
        m.set_entry(0, 1, Poly::one(&r)).unwrap();
        m.validate().unwrap();
        assert!(!m.is_minimal());
        assert!(e1(Field::Rationals, 1).is_minimal());
    }

    #[test]
    fn boundary_preimages_in_e3() {
        let m = e3();
        let x = |e| Poly::var_pow(m.ring(), 0, e);
        let z = Poly::zero(m.ring());
        let pre = boundary_preimage(&m, &[x(7), x(5), z.clone(), z.clone(), z.clone()], 7).unwrap();
        assert_eq!(m.format_element(&pre), "e4");
        let pre = boundary_preimage(&m, &[z.clone(), z.clone(), x(4), z.clone(), z.clone()], 8).unwrap();
        assert_eq!(m.format_element(&pre), "e5");
        assert!(matches!(boundary_preimage(&m, &[x(2), z.clone(), z.clone(), z.clone(), z.clone()], 2), Err(Error::NotABoundary(2))));
    }

    #[test]
    fn identity_and_zero_morphisms() {
        let m = e1(Field::Rationals, 1);
        let w = Window::new(0, 10);
        assert!(dg_morphism_check(&DgMorphism::identity(&m), w).unwrap().quasi_iso.certified);
        assert!(!dg_morphism_check(&DgMorphism::zero(&m, &m), w).unwrap().quasi_iso.certified);
    }
}
