//! Dense exact linear algebra over a [`Field`].
//!
//! Matrices act on column vectors: an `m x n` matrix maps `k^n -> k^m`.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Field, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    ncols: usize,
    rows: Vec<Vector>,
}

pub fn zero_vector(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// `v += c * w`
pub fn axpy(v: &mut [Scalar], c: &Scalar, w: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in v.iter_mut().zip(w) {
        if !b.is_zero() {
            *a = &*a + &(c * b);
        }
    }
}

impl Mat {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Mat {
        Mat { field, ncols, rows: vec![zero_vector(field, ncols); nrows] }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.rows[i][i] = field.one();
        }
        m
    }

    pub fn from_rows(field: Field, ncols: usize, rows: Vec<Vector>) -> Mat {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        Mat { field, ncols, rows }
    }

    pub fn from_columns(field: Field, nrows: usize, cols: &[Vector]) -> Mat {
        let mut m = Mat::zeros(field, nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, s) in c.iter().enumerate() {
                m.rows[i][j] = s.clone();
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        self.rows[i][j] = s;
    }

    pub fn add_to(&mut self, i: usize, j: usize, s: &Scalar) {
        if !s.is_zero() {
            self.rows[i][j] = &self.rows[i][j] + s;
        }
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> Vector {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| is_zero_vector(r))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_columns(self.field, self.ncols, &self.rows)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.ncols, "vector length");
        let nz: Vec<usize> = (0..v.len()).filter(|&j| !v[j].is_zero()).collect();
        self.rows
            .iter()
            .map(|r| {
                let mut acc = self.field.zero();
                for &j in &nz {
                    if !r[j].is_zero() {
                        acc = &acc + &(&r[j] * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.nrows(), "matrix product shapes");
        let mut out = Mat::zeros(self.field, self.nrows(), other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for (k, a) in r.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                axpy(&mut out.rows[i], a, &other.rows[k]);
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.nrows(), self.ncols), (other.nrows(), other.ncols));
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            axpy(r, &self.field.one(), o);
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat {
            field: self.field,
            ncols: self.ncols,
            rows: self.rows.iter().map(|r| r.iter().map(|a| a * c).collect()).collect(),
        }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.nrows(), other.nrows());
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Mat { field: self.field, ncols: self.ncols + other.ncols, rows }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.ncols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Mat { field: self.field, ncols: self.ncols, rows }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut rows = self.rows.clone();
        let pivots = rref_in_place(&mut rows, self.ncols);
        (Mat { field: self.field, ncols: self.ncols, rows }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.ncols];
        for (i, &p) in pivots.iter().enumerate() {
            is_pivot[p] = Some(i);
        }
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if is_pivot[f].is_some() {
                continue;
            }
            let mut v = zero_vector(self.field, self.ncols);
            v[f] = self.field.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&r.rows[i][f];
            }
            out.push(v);
        }
        out
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.field, self.nrows(), self.columns())
    }

    /// A solution of `self * x = b` (free variables set to zero), if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(b.len(), self.nrows());
        let mut rows: Vec<Vector> = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut v = r.clone();
                v.push(bi.clone());
                v
            })
            .collect();
        let pivots = rref_in_place(&mut rows, self.ncols + 1);
        if pivots.last() == Some(&self.ncols) {
            return None;
        }
        let mut x = zero_vector(self.field, self.ncols);
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rows[i][self.ncols].clone();
        }
        Some(x)
    }
}

fn rref_in_place(rows: &mut [Vector], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("nonzero pivot");
        if !inv.is_one() {
            for a in rows[r][c..].iter_mut() {
                if !a.is_zero() {
                    *a = &*a * &inv;
                }
            }
        }
        let support: Vec<usize> = (c..ncols).filter(|&j| !rows[r][j].is_zero()).collect();
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = -&row[c];
            for &j in &support {
                row[j] = &row[j] + &(&f * &pivot_row[j]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A subspace of `k^n`, stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace { field, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        let id = Mat::identity(field, ambient);
        Subspace { field, ambient, rows: id.rows, pivots: (0..ambient).collect() }
    }

    pub fn span(field: Field, ambient: usize, vectors: impl IntoIterator<Item = Vector>) -> Subspace {
        let mut rows: Vec<Vector> = vectors.into_iter().collect();
        debug_assert!(rows.iter().all(|v| v.len() == ambient));
        let pivots = rref_in_place(&mut rows, ambient);
        rows.truncate(pivots.len());
        Subspace { field, ambient, rows, pivots }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The reduced echelon basis.
    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v` modulo the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = -&v[p];
                axpy(&mut v, &c, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|a| !a.is_zero()) else {
            return false;
        };
        let inv = w[p].inverse().expect("nonzero");
        for a in w.iter_mut() {
            *a = &*a * &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = -&row[p];
                axpy(row, &c, &w);
            }
        }
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut out = self.clone();
        for v in &other.rows {
            out.insert(v);
        }
        out
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` with respect to [`Subspace::basis`], if `v` lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Greedily picks vectors from `candidates` that are independent modulo `self`,
    /// returning them reduced modulo `self` and the earlier picks.
    pub fn complement_from(&self, candidates: impl IntoIterator<Item = Vector>) -> Vec<Vector> {
        let mut acc = self.clone();
        let mut picked = Vec::new();
        for c in candidates {
            let r = acc.reduce(&c);
            if is_zero_vector(&r) {
                continue;
            }
            acc.insert(&r);
            picked.push(r);
        }
        picked
    }

    /// Image of the subspace under `m`.
    pub fn map(&self, m: &Mat) -> Subspace {
        Subspace::span(self.field, m.nrows(), self.rows.iter().map(|v| m.apply(v)))
    }
}

/// Rank of the map induced by `f` from `z_src / b_src` to `z_tgt / b_tgt`, assuming
/// `f(z_src) ⊆ z_tgt` and `f(b_src) ⊆ b_tgt`.
pub fn induced_rank(f: &Mat, z_src: &Subspace, b_tgt: &Subspace) -> usize {
    let mut acc = b_tgt.clone();
    let before = acc.dim();
    for z in z_src.basis() {
        acc.insert(&f.apply(z));
    }
    acc.dim() - before
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> Mat {
        let f = Field::Rationals;
        let n = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(f, n, rows.iter().map(|r| r.iter().map(|&a| f.from_i64(a)).collect()).collect())
    }

    #[test]
    fn rank_nullity() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(is_zero_vector(&m.apply(&k[0])));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f = Field::Rationals;
        let m = q(&[&[1, 1], &[2, 2]]);
        let x = m.solve(&[f.from_i64(3), f.from_i64(6)]).unwrap();
        assert_eq!(m.apply(&x), vec![f.from_i64(3), f.from_i64(6)]);
        assert!(m.solve(&[f.from_i64(3), f.from_i64(7)]).is_none());
    }

    #[test]
    fn subspace_insert_matches_span() {
        let f = Field::prime(5).unwrap();
        let vs: Vec<Vector> = [[1, 2, 0, 4], [2, 4, 1, 3], [3, 1, 1, 2], [0, 0, 1, 0]]
            .iter()
            .map(|r| r.iter().map(|&a| f.from_i64(a)).collect())
            .collect();
        let s = Subspace::span(f, 4, vs.clone());
        let mut t = Subspace::zero(f, 4);
        for v in &vs {
            t.insert(v);
        }
        assert_eq!(s, t);
        for v in &vs {
            assert!(s.contains(v));
            let c = s.coordinates(v).unwrap();
            let mut back = zero_vector(f, 4);
            for (ci, b) in c.iter().zip(s.basis()) {
                axpy(&mut back, ci, b);
            }
            assert_eq!(&back, v);
        }
    }
}
