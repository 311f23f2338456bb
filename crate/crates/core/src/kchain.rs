//! Chain complexes of finite-dimensional vector spaces, chain maps between them, and
//! families of such complexes indexed by internal degree.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::field::Field;
use crate::graded::Window;
use crate::linalg::{induced_rank, Mat, Subspace};

/// `... -> V_i -> V_{i-1} -> ...` with `diff(i): V_i -> V_{i-1}`. Unset spaces are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KComplex {
    field: Field,
    dims: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, Mat>,
}

impl KComplex {
    pub fn new(field: Field) -> KComplex {
        KComplex { field, dims: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn set_space(&mut self, i: i64, dim: usize) {
        if dim == 0 {
            self.dims.remove(&i);
        } else {
            self.dims.insert(i, dim);
        }
    }

    /// Sets `diff(i)`; the matrix must be `dim(i-1) x dim(i)`.
    pub fn set_diff(&mut self, i: i64, m: Mat) {
        debug_assert_eq!((m.nrows(), m.ncols()), (self.dim(i - 1), self.dim(i)));
        self.diffs.insert(i, m);
    }

    pub fn dim(&self, i: i64) -> usize {
        self.dims.get(&i).copied().unwrap_or(0)
    }

    pub fn diff(&self, i: i64) -> Mat {
        match self.diffs.get(&i) {
            Some(m) => m.clone(),
            None => Mat::zeros(self.field, self.dim(i - 1), self.dim(i)),
        }
    }

    /// Smallest and largest positions with a nonzero space.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.dims.keys().next()?, *self.dims.keys().next_back()?))
    }

    pub fn check_square_zero(&self) -> Result<(), Error> {
        for (&i, m) in &self.diffs {
            if let Some(next) = self.diffs.get(&(i - 1)) {
                if !next.mul(m).is_zero() {
                    return Err(Error::NotSquareZero(format!("composite out of position {}", i)));
                }
            }
        }
        Ok(())
    }

    pub fn cycles(&self, i: i64) -> Subspace {
        Subspace::span(self.field, self.dim(i), self.diff(i).kernel())
    }

    pub fn boundaries(&self, i: i64) -> Subspace {
        self.diff(i + 1).image()
    }

    pub fn homology_dim(&self, i: i64) -> usize {
        if self.dim(i) == 0 {
            return 0;
        }
        self.dim(i) - self.diff(i).rank() - self.diff(i + 1).rank()
    }
}

/// Components `f_i: V_i -> W_i`; unset components are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KMorphism {
    maps: BTreeMap<i64, Mat>,
}

/// Per-position comparison of homology under a chain map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedRanks {
    pub position: i64,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

impl InducedRanks {
    pub fn is_iso(&self) -> bool {
        self.source_dim == self.rank && self.target_dim == self.rank
    }
}

impl KMorphism {
    pub fn new() -> KMorphism {
        KMorphism { maps: BTreeMap::new() }
    }

    pub fn identity(c: &KComplex) -> KMorphism {
        let mut f = KMorphism::new();
        for (&i, &d) in &c.dims {
            f.set(i, Mat::identity(c.field, d));
        }
        f
    }

    pub fn set(&mut self, i: i64, m: Mat) {
        self.maps.insert(i, m);
    }

    pub fn component(&self, i: i64, src: &KComplex, tgt: &KComplex) -> Mat {
        match self.maps.get(&i) {
            Some(m) => m.clone(),
            None => Mat::zeros(src.field, tgt.dim(i), src.dim(i)),
        }
    }

    pub fn check_chain_map(&self, src: &KComplex, tgt: &KComplex) -> Result<(), Error> {
        let mut positions: Vec<i64> = src.dims.keys().copied().collect();
        positions.extend(tgt.dims.keys().copied());
        positions.sort_unstable();
        positions.dedup();
        for i in positions {
            let lhs = tgt.diff(i).mul(&self.component(i, src, tgt));
            let rhs = self.component(i - 1, src, tgt).mul(&src.diff(i));
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("commutation fails at position {}", i)));
            }
        }
        Ok(())
    }

    pub fn induced_ranks(&self, src: &KComplex, tgt: &KComplex, positions: impl IntoIterator<Item = i64>) -> Vec<InducedRanks> {
        positions
            .into_iter()
            .map(|i| {
                let f = self.component(i, src, tgt);
                InducedRanks {
                    position: i,
                    source_dim: src.homology_dim(i),
                    target_dim: tgt.homology_dim(i),
                    rank: induced_rank(&f, &src.cycles(i), &tgt.boundaries(i)),
                }
            })
            .collect()
    }
}

impl Default for KMorphism {
    fn default() -> Self {
        KMorphism::new()
    }
}

/// A complex of graded modules realized piece by piece: one [`KComplex`] per internal degree
/// in `window`, all over the same homological positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreewiseComplex {
    pub window: Window,
    pub pieces: BTreeMap<i64, KComplex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreewiseMorphism {
    pub pieces: BTreeMap<i64, KMorphism>,
}

impl DegreewiseComplex {
    pub fn field(&self) -> Field {
        self.pieces.values().next().map(|c| c.field).unwrap_or(Field::Rationals)
    }

    pub fn piece(&self, j: i64) -> &KComplex {
        &self.pieces[&j]
    }

    /// Homological positions occurring in some piece.
    pub fn positions(&self) -> Option<(i64, i64)> {
        let mut out: Option<(i64, i64)> = None;
        for c in self.pieces.values() {
            if let Some((a, b)) = c.support() {
                out = Some(match out {
                    None => (a, b),
                    Some((x, y)) => (x.min(a), y.max(b)),
                });
            }
        }
        out
    }

    /// `dim H_i(-)_j` for every position `i` and internal degree `j` of the window.
    pub fn homology_table(&self) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        if let Some((a, b)) = self.positions() {
            for (&j, c) in &self.pieces {
                for i in a..=b {
                    out.insert((i, j), c.homology_dim(i));
                }
            }
        }
        out
    }

    /// Total degrees `d` for which every summand `(-)_{d-i}` of the totaling and of its two
    /// neighbours `d ± 1` lies in the window.
    pub fn total_window(&self, positions: (i64, i64)) -> Window {
        Window::new(self.window.lo + positions.1 + 1, self.window.hi + positions.0 - 1)
    }

    /// The totaling as a single complex indexed by total degree `d`, with
    /// `(Tot)_d = ⊕_i (piece_{d-i})_i` ordered by position. Only the degrees of
    /// [`DegreewiseComplex::total_window`] (widened by one on each side) are populated.
    pub fn total(&self, positions: (i64, i64)) -> (KComplex, Window) {
        let field = self.field();
        let tw = self.total_window(positions);
        let mut out = KComplex::new(field);
        let range = (tw.lo - 1)..=(tw.hi + 1);
        for d in range.clone() {
            out.set_space(d, self.total_dim(d, positions));
        }
        for d in range {
            if !out.dims.contains_key(&d) {
                continue;
            }
            let mut m = Mat::zeros(field, out.dim(d - 1), out.dim(d));
            let src_off = self.total_offsets(d, positions);
            let tgt_off = self.total_offsets(d - 1, positions);
            for i in positions.0..=positions.1 {
                let Some(piece) = self.pieces.get(&(d - i)) else { continue };
                if piece.dim(i) == 0 || piece.dim(i - 1) == 0 {
                    continue;
                }
                let block = piece.diff(i);
                let (so, to) = (src_off[&i], tgt_off[&(i - 1)]);
                for r in 0..block.nrows() {
                    for c in 0..block.ncols() {
                        let v = block.get(r, c);
                        if !v.is_zero() {
                            m.set(to + r, so + c, v.clone());
                        }
                    }
                }
            }
            out.set_diff(d, m);
        }
        (out, tw)
    }

    fn total_dim(&self, d: i64, positions: (i64, i64)) -> usize {
        (positions.0..=positions.1).map(|i| self.pieces.get(&(d - i)).map(|c| c.dim(i)).unwrap_or(0)).sum()
    }

    fn total_offsets(&self, d: i64, positions: (i64, i64)) -> BTreeMap<i64, usize> {
        let mut acc = 0;
        let mut out = BTreeMap::new();
        for i in positions.0..=positions.1 {
            out.insert(i, acc);
            acc += self.pieces.get(&(d - i)).map(|c| c.dim(i)).unwrap_or(0);
        }
        out
    }
}

impl DegreewiseMorphism {
    pub fn check_chain_map(&self, src: &DegreewiseComplex, tgt: &DegreewiseComplex) -> Result<(), Error> {
        for (j, f) in &self.pieces {
            f.check_chain_map(src.piece(*j), tgt.piece(*j))
                .map_err(|e| Error::NotChainMap(format!("internal degree {}: {}", j, e)))?;
        }
        Ok(())
    }

    /// Induced maps on every `H_i(-)_j`; the morphism is a quasi-isomorphism in the window iff
    /// every entry is an isomorphism.
    pub fn induced_ranks(&self, src: &DegreewiseComplex, tgt: &DegreewiseComplex, positions: (i64, i64)) -> Vec<(i64, InducedRanks)> {
        let mut out = Vec::new();
        for (&j, f) in &self.pieces {
            for r in f.induced_ranks(src.piece(j), tgt.piece(j), positions.0..=positions.1) {
                out.push((j, r));
            }
        }
        out
    }

    /// The totaled chain map between [`DegreewiseComplex::total`] outputs.
    pub fn total(&self, src: &DegreewiseComplex, tgt: &DegreewiseComplex, positions: (i64, i64)) -> KMorphism {
        let (ts, tw) = src.total(positions);
        let (tt, _) = tgt.total(positions);
        let mut out = KMorphism::new();
        for d in (tw.lo - 1)..=(tw.hi + 1) {
            let mut m = Mat::zeros(src.field(), tt.dim(d), ts.dim(d));
            let so = src.total_offsets(d, positions);
            let to = tgt.total_offsets(d, positions);
            for i in positions.0..=positions.1 {
                let j = d - i;
                let (Some(f), Some(a), Some(b)) = (self.pieces.get(&j), src.pieces.get(&j), tgt.pieces.get(&j)) else {
                    continue;
                };
                let block = f.component(i, a, b);
                for r in 0..block.nrows() {
                    for c in 0..block.ncols() {
                        let v = block.get(r, c);
                        if !v.is_zero() {
                            m.set(to[&i] + r, so[&i] + c, v.clone());
                        }
                    }
                }
            }
            out.set(d, m);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> crate::field::Scalar {
        Field::Rationals.from_i64(n)
    }

    #[test]
    fn homology_of_two_term_complex() {
        let f = Field::Rationals;
        let mut c = KComplex::new(f);
        c.set_space(0, 2);
        c.set_space(1, 1);
        c.set_diff(1, Mat::from_rows(f, 1, alloc::vec![alloc::vec![q(1)], alloc::vec![q(2)]]));
        assert_eq!(c.homology_dim(0), 1);
        assert_eq!(c.homology_dim(1), 0);
        c.check_square_zero().unwrap();
    }

    #[test]
    fn identity_is_quasi_iso() {
        let f = Field::Rationals;
        let mut c = KComplex::new(f);
        c.set_space(0, 2);
        c.set_space(1, 1);
        c.set_diff(1, Mat::from_rows(f, 1, alloc::vec![alloc::vec![q(1)], alloc::vec![q(0)]]));
        let id = KMorphism::identity(&c);
        id.check_chain_map(&c, &c).unwrap();
        assert!(id.induced_ranks(&c, &c, -1..=2).iter().all(InducedRanks::is_iso));
        let zero = KMorphism::new();
        assert!(!zero.induced_ranks(&c, &c, 0..=0)[0].is_iso());
    }
}
