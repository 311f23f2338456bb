//! Standard-graded sparse multivariate polynomials over an exact field.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;
use crate::field::{Field, Scalar};

/// `k[x_1, ..., x_d]` with every variable in degree one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: Field,
    vars: Vec<String>,
}

pub type Ring = Arc<PolyRing>;

impl PolyRing {
    pub fn new(field: Field, vars: Vec<String>) -> Result<Ring, Error> {
        if vars.is_empty() {
            return Err(Error::InvalidRing);
        }
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() || vars[..i].contains(v) {
                return Err(Error::InvalidRing);
            }
        }
        Ok(Arc::new(PolyRing { field, vars }))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Same variables over another field.
    pub fn with_field(&self, field: Field) -> Ring {
        Arc::new(PolyRing { field, vars: self.vars.clone() })
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Exponent vector. The derived order is ascending lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// `dim_k A_j` for the standard-graded ring in `nvars` variables.
pub fn piece_dim(nvars: usize, j: i64) -> usize {
    if j < 0 {
        return 0;
    }
    binomial(j as u64 + nvars as u64 - 1, nvars as u64 - 1) as usize
}

/// Position of `m` in [`graded_piece_basis`] for its degree.
pub fn monomial_rank(m: &Monomial) -> usize {
    let mut rank = 0usize;
    let mut remaining = m.degree() as i64;
    let n = m.0.len();
    for (k, &a) in m.0.iter().enumerate().take(n.saturating_sub(1)) {
        let rest = n - k - 1;
        // monomials whose k-th exponent exceeds a come first
        for e in (a as i64 + 1)..=remaining {
            rank += piece_dim(rest, remaining - e);
        }
        remaining -= a as i64;
    }
    rank
}

fn push_pieces(nvars: usize, j: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if prefix.len() + 1 == nvars {
        prefix.push(j);
        out.push(Monomial(prefix.clone()));
        prefix.pop();
        return;
    }
    for e in (0..=j).rev() {
        prefix.push(e);
        push_pieces(nvars, j - e, prefix, out);
        prefix.pop();
    }
}

/// Monomials of degree `j` in descending lexicographic order (`x1^j` first).
pub fn graded_piece_basis(ring: &PolyRing, j: i64) -> Vec<Monomial> {
    monomials_of_degree(ring.nvars(), j)
}

pub fn monomials_of_degree(nvars: usize, j: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if j >= 0 {
        push_pieces(nvars, j as u32, &mut Vec::with_capacity(nvars), &mut out);
    }
    out
}

#[derive(Clone, Debug)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ring: &Ring) -> Poly {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Ring, c: Scalar) -> Poly {
        Poly::term(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn one(ring: &Ring) -> Poly {
        Poly::constant(ring, ring.field().one())
    }

    pub fn from_i64(ring: &Ring, c: i64) -> Poly {
        Poly::constant(ring, ring.field().from_i64(c))
    }

    pub fn term(ring: &Ring, m: Monomial, c: Scalar) -> Poly {
        assert_eq!(m.0.len(), ring.nvars(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn monomial(ring: &Ring, m: Monomial) -> Poly {
        Poly::term(ring, m, ring.field().one())
    }

    pub fn var(ring: &Ring, i: usize) -> Poly {
        Poly::monomial(ring, Monomial::var(ring.nvars(), i))
    }

    /// `x_i^e`
    pub fn var_pow(ring: &Ring, i: usize, e: u32) -> Poly {
        let mut m = Monomial::one(ring.nvars());
        m.0[i] = e;
        Poly::monomial(ring, m)
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field().zero())
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The common degree of all terms, if nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Zero, or homogeneous of degree `d`.
    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        self.is_zero() || self.homogeneous_degree().map(|e| e as i64) == Some(d)
    }

    /// Degree description used in diagnostics.
    pub fn degree_label(&self) -> String {
        match (self.homogeneous_degree(), self.is_zero()) {
            (_, true) => String::from("zero"),
            (Some(d), _) => alloc::format!("{}", d),
            (None, _) => String::from("inhomogeneous"),
        }
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree()).or_insert_with(|| Poly::zero(&self.ring)).terms.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.clone())).collect(),
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, Error> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, Error> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, Error> {
        self.check_ring(other)?;
        let mut out = Poly::zero(&self.ring);
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                out.add_term(m.mul(n), &(a * b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(&self.ring);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Reinterprets the polynomial over `ring` (same variables, coefficients coerced).
    pub fn change_ring(&self, ring: &Ring) -> Option<Poly> {
        if ring.nvars() != self.ring.nvars() {
            return None;
        }
        let mut out = Poly::zero(ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &ring.field().coerce(c)?);
        }
        Some(out)
    }

    fn check_ring(&self, other: &Poly) -> Result<(), Error> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("polynomial ring mismatch")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("polynomial ring mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial ring mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

pub(crate) fn fmt_monomial(vars: &[String], m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (v, &e) in vars.iter().zip(&m.0) {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{}", v)?;
        } else {
            write!(f, "{}^{}", v, e)?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    /// Canonical form: terms in descending lexicographic order, ` + ` / ` - ` separators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let constant = m.degree() == 0;
            if constant {
                write!(f, "{}", abs)?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", abs)?;
                }
                fmt_monomial(&self.ring.vars, m, f)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ring(vars: &[&str]) -> Ring {
        PolyRing::new(Field::Rationals, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let r = ring(&["x", "y"]);
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        let p = &(&x + &y) * &(&x - &y);
        let expected = &(&x * &x) - &(&y * &y);
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "x^2 - y^2");
    }

    #[test]
    fn additive_identity() {
        let r = ring(&["x", "y", "z"]);
        let p = &Poly::var(&r, 0) * &Poly::var_pow(&r, 2, 3);
        assert_eq!(&p + &Poly::zero(&r), p);
        assert_eq!(p.to_string(), "x*z^3");
    }

    #[test]
    fn exponent_addition() {
        let r = ring(&["x1", "x2"]);
        let p = &Poly::var_pow(&r, 1, 4) * &Poly::var(&r, 1);
        // exponent-vector oracle: (0,4) + (0,1)
        let mut e = Monomial::one(2);
        for (k, v) in [(0usize, 0u32), (1, 4)] {
            e.0[k] += v;
        }
        e.0[1] += 1;
        assert_eq!(p, Poly::monomial(&r, e));
        assert_eq!(p.to_string(), "x2^5");
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Poly::var(&ring(&["x"]), 0);
        let b = Poly::var(&ring(&["y"]), 0);
        assert_eq!(a.try_add(&b), Err(Error::RingMismatch));
        assert_eq!(a.try_mul(&b), Err(Error::RingMismatch));
    }

    #[test]
    fn homogeneous_components_examples() {
        let r = ring(&["x"]);
        let x = Poly::var(&r, 0);
        let p = &(&x * &x) + &x;
        let comps = p.homogeneous_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&2], &x * &x);
        assert_eq!(comps[&1], x);
        assert!(Poly::zero(&r).homogeneous_components().is_empty());
        let r2 = ring(&["x1", "x2"]);
        let q = Poly::var_pow(&r2, 0, 7);
        let c = q.homogeneous_components();
        assert_eq!(c.len(), 1);
        assert_eq!(c[&7], q);
    }

    #[test]
    fn piece_basis_sizes() {
        assert_eq!(graded_piece_basis(&ring(&["x"]), 3), vec![Monomial(vec![3])]);
        assert_eq!(graded_piece_basis(&ring(&["x1", "x2"]), 5).len(), 6);
        assert_eq!(graded_piece_basis(&ring(&["x", "y", "z"]), 2).len(), 6);
        assert!(graded_piece_basis(&ring(&["x", "y"]), -1).is_empty());
    }

    #[test]
    fn piece_basis_is_descending_lex_and_ranked() {
        for n in 1..4 {
            for j in 0..6 {
                let b = monomials_of_degree(n, j);
                assert_eq!(b.len(), piece_dim(n, j));
                for w in b.windows(2) {
                    assert!(w[0] > w[1]);
                }
                for (i, m) in b.iter().enumerate() {
                    assert_eq!(monomial_rank(m), i);
                }
            }
        }
    }

    #[test]
    fn display_signs_and_rationals() {
        let r = ring(&["x", "y"]);
        let f = r.field();
        let q = f.from_ratio(&3.into(), &2.into()).unwrap();
        let p = &Poly::term(&r, Monomial(vec![1, 1]), q) - &Poly::from_i64(&r, 4);
        assert_eq!(p.to_string(), "3/2*x*y - 4");
        assert_eq!((-&Poly::var(&r, 1)).to_string(), "-y");
    }
}
