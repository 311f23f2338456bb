//! Structure theory over `A = k[x]`: graded diagonalization of presentation matrices, the
//! resulting decomposition of `H(M)`, and an explicit quasi-isomorphism `Tot F -> M` from a
//! totaled free resolution of `H(M)`.
//!
//! Over `k[x]` every homogeneous entry of a degree-zero matrix is `α x^e`, so a graded
//! elimination step is ordinary scalar elimination on the coefficients `α` together with a
//! degree check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::GradedComplex;
use crate::dg::{boundary_preimage, dg_homology, dg_morphism_check, DgMorphism, HomologyPresentation, MorphismCertificate, SemifreeDG};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::graded::{GradedMatrix, TwistedFreeModule, Window};
use crate::poly::{Monomial, Poly, Ring};
use crate::totaling::tot;

/// Result of [`graded_diagonalize`]: `U · P · V = D` where `D` is diagonal in its first `s`
/// rows and columns with entries `x^{c_i - r_i}` and zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSNF {
    /// `(r_i, c_i)` for each diagonal entry, sorted.
    pub pairs: Vec<(i64, i64)>,
    /// Twists of the rows of `D` below the diagonal block.
    pub free_rows: Vec<i64>,
    /// Twists of the columns of `D` right of the diagonal block.
    pub zero_columns: Vec<i64>,
    pub u: GradedMatrix,
    pub u_inv: GradedMatrix,
    pub v: GradedMatrix,
    pub v_inv: GradedMatrix,
    pub diagonal: GradedMatrix,
}

impl GradedSNF {
    pub fn s(&self) -> usize {
        self.pairs.len()
    }

    pub fn t(&self) -> usize {
        self.pairs.len() + self.free_rows.len()
    }

    /// Whether every diagonal entry has positive degree.
    pub fn is_minimal(&self) -> bool {
        self.pairs.iter().all(|(r, c)| c > r)
    }

    /// Checks `U P V = D`, `U U^{-1} = 1` and `V V^{-1} = 1` as polynomial identities.
    pub fn verify(&self, p: &GradedMatrix) -> Result<(), Error> {
        let upv = self.u.compose(p)?.compose(&self.v)?;
        if upv != self.diagonal {
            return Err(Error::Invalid(String::from("U P V differs from the diagonal form")));
        }
        if self.u.compose(&self.u_inv)? != GradedMatrix::identity(self.u.target())
            || self.u_inv.compose(&self.u)? != GradedMatrix::identity(self.u.source())
        {
            return Err(Error::Invalid(String::from("row transformation is not invertible")));
        }
        if self.v.compose(&self.v_inv)? != GradedMatrix::identity(self.v.target())
            || self.v_inv.compose(&self.v)? != GradedMatrix::identity(self.v.source())
        {
            return Err(Error::Invalid(String::from("column transformation is not invertible")));
        }
        Ok(())
    }
}

fn require_univariate(ring: &Ring) -> Result<(), Error> {
    if ring.nvars() != 1 {
        return Err(Error::NotUnivariate(ring.nvars()));
    }
    Ok(())
}

/// Scalar coefficient matrix of a homogeneous univariate matrix.
fn coefficients(p: &GradedMatrix) -> Vec<Vec<Scalar>> {
    let f = p.ring().field();
    (0..p.nrows())
        .map(|i| {
            (0..p.ncols())
                .map(|j| p.entry(i, j).terms().next().map(|(_, c)| c.clone()).unwrap_or_else(|| f.zero()))
                .collect()
        })
        .collect()
}

/// `α x^e` as a polynomial; `e` must be nonnegative when `α ≠ 0`.
fn xpow(ring: &Ring, a: &Scalar, e: i64) -> Poly {
    if a.is_zero() {
        return Poly::zero(ring);
    }
    debug_assert!(e >= 0);
    Poly::term(ring, Monomial(vec![e as u32]), a.clone())
}

/// A square degree-zero matrix on `rows`-twisted generators from scalar coefficients:
/// entry `(i, k)` is `m[i][k] x^{tw_k - tw_i}`... read as a map from twists `src` to `tgt`.
fn from_coefficients(ring: &Ring, src: &[i64], tgt: &[i64], m: &[Vec<Scalar>]) -> GradedMatrix {
    let s = TwistedFreeModule::new(ring, src.to_vec());
    let t = TwistedFreeModule::new(ring, tgt.to_vec());
    let mut out = GradedMatrix::zero(&s, &t);
    for (i, row) in m.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            out.set(i, j, xpow(ring, a, src[j] - tgt[i]));
        }
    }
    out
}

fn identity(field: Field, n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
}

/// Diagonalizes a homogeneous matrix over `k[x]` by graded row and column operations.
///
/// The pivot is a nonzero entry of least degree among unprocessed rows and columns (ties by
/// row, then column). Every other entry of its row and column has degree at least the
/// pivot's, so it is cleared with a homogeneous multiple of the pivot row or column.
pub fn graded_diagonalize(p: &GradedMatrix) -> Result<GradedSNF, Error> {
    let ring = p.ring().clone();
    require_univariate(&ring)?;
    p.validate_homogeneity()?;
    let field = ring.field();
    let r: Vec<i64> = p.target().twists().to_vec();
    let c: Vec<i64> = p.source().twists().to_vec();
    let (nr, nc) = (r.len(), c.len());
    let mut a = coefficients(p);
    let mut u = identity(field, nr);
    let mut u_inv = identity(field, nr);
    let mut v = identity(field, nc);
    let mut v_inv = identity(field, nc);
    let mut row_done = vec![false; nr];
    let mut col_done = vec![false; nc];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in (0..nr).filter(|&i| !row_done[i]) {
            for j in (0..nc).filter(|&j| !col_done[j]) {
                if !a[i][j].is_zero() {
                    let d = c[j] - r[i];
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        let inv = a[pi][pj].inverse().expect("nonzero pivot");
        // Clear column pj: row_i -= (a_i / a_p) x^{r_pi - r_i} row_pi.
        for i in 0..nr {
            if i == pi || a[i][pj].is_zero() {
                continue;
            }
            let f = &a[i][pj] * &inv;
            for j in 0..nc {
                if !a[pi][j].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &a[pi][j]);
                }
            }
            for k in 0..nr {
                if !u[pi][k].is_zero() {
                    u[i][k] = &u[i][k] - &(&f * &u[pi][k]);
                }
            }
            // The inverse picks up the opposite operation on columns: col_pi += f col_i.
            for k in 0..nr {
                if !u_inv[k][i].is_zero() {
                    u_inv[k][pi] = &u_inv[k][pi] + &(&f * &u_inv[k][i]);
                }
            }
        }
        // Clear row pi: col_j -= (a_j / a_p) x^{c_j - c_pj} col_pj.
        for j in 0..nc {
            if j == pj || a[pi][j].is_zero() {
                continue;
            }
            let f = &a[pi][j] * &inv;
            for i in 0..nr {
                if !a[i][pj].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &a[i][pj]);
                }
            }
            for k in 0..nc {
                if !v[k][pj].is_zero() {
                    v[k][j] = &v[k][j] - &(&f * &v[k][pj]);
                }
            }
            for k in 0..nc {
                if !v_inv[j][k].is_zero() {
                    v_inv[pj][k] = &v_inv[pj][k] + &(&f * &v_inv[j][k]);
                }
            }
        }
        // Make the pivot monic by scaling its row.
        for j in 0..nc {
            a[pi][j] = &a[pi][j] * &inv;
        }
        for k in 0..nr {
            u[pi][k] = &u[pi][k] * &inv;
        }
        let piv = a[pi][pj].clone();
        let back = inv.inverse().expect("nonzero");
        for k in 0..nr {
            u_inv[k][pi] = &u_inv[k][pi] * &back;
        }
        debug_assert!(piv.is_one());
        row_done[pi] = true;
        col_done[pj] = true;
        pivots.push((pi, pj));
    }
    // Diagonal block sorted by (r, c); remaining rows and columns in index order.
    pivots.sort_by_key(|&(i, j)| (r[i], c[j], i, j));
    let row_perm: Vec<usize> = pivots.iter().map(|&(i, _)| i).chain((0..nr).filter(|&i| !row_done[i])).collect();
    let col_perm: Vec<usize> = pivots.iter().map(|&(_, j)| j).chain((0..nc).filter(|&j| !col_done[j])).collect();
    let r2: Vec<i64> = row_perm.iter().map(|&i| r[i]).collect();
    let c2: Vec<i64> = col_perm.iter().map(|&j| c[j]).collect();
    let u2: Vec<Vec<Scalar>> = row_perm.iter().map(|&i| u[i].clone()).collect();
    let u_inv2: Vec<Vec<Scalar>> = (0..nr).map(|k| row_perm.iter().map(|&i| u_inv[k][i].clone()).collect()).collect();
    let v2: Vec<Vec<Scalar>> = (0..nc).map(|k| col_perm.iter().map(|&j| v[k][j].clone()).collect()).collect();
    let v_inv2: Vec<Vec<Scalar>> = col_perm.iter().map(|&j| v_inv[j].clone()).collect();
    let d: Vec<Vec<Scalar>> = (0..nr)
        .map(|i| (0..nc).map(|j| if i == j && i < pivots.len() { field.one() } else { field.zero() }).collect())
        .collect();
    let snf = GradedSNF {
        pairs: pivots.iter().map(|&(i, j)| (r[i], c[j])).collect(),
        free_rows: r2[pivots.len()..].to_vec(),
        zero_columns: c2[pivots.len()..].to_vec(),
        u: from_coefficients(&ring, &r, &r2, &u2),
        u_inv: from_coefficients(&ring, &r2, &r, &u_inv2),
        v: from_coefficients(&ring, &c2, &c, &v2),
        v_inv: from_coefficients(&ring, &c, &c2, &v_inv2),
        diagonal: from_coefficients(&ring, &c2, &r2, &d),
    };
    snf.verify(p)?;
    Ok(snf)
}

/// `H(M) ≅ ⊕ Σ^{r_i}A / x^{c_i - r_i} ⊕ ⊕ Σ^{r_i}A` with cycle representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyDecomposition {
    pub presentation: HomologyPresentation,
    pub snf: GradedSNF,
    pub torsion: Vec<(i64, i64)>,
    pub free: Vec<i64>,
    /// Cycle representatives: torsion summands first, then free ones.
    pub cycles: Vec<Vec<Poly>>,
}

pub fn homology_decompose(m: &SemifreeDG, window: Window) -> Result<HomologyDecomposition, Error> {
    require_univariate(m.ring())?;
    let presentation = dg_homology(m, window)?;
    if !presentation.certified {
        return Err(presentation.to_error());
    }
    let snf = graded_diagonalize(&presentation.presentation)?;
    // New generators are the columns of U^{-1}; their images are the matching combinations
    // of the old cycle representatives.
    let ring = m.ring();
    let t = snf.t();
    let cycles = (0..t)
        .map(|k| {
            let col = snf.u_inv.column(k);
            let mut z = vec![Poly::zero(ring); m.rank()];
            for (g, coef) in col.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                for (e, p) in presentation.cycles[g].iter().enumerate() {
                    if !p.is_zero() {
                        z[e] = &z[e] + &(coef * p);
                    }
                }
            }
            z
        })
        .collect();
    Ok(HomologyDecomposition { torsion: snf.pairs.clone(), free: snf.free_rows.clone(), presentation, snf, cycles })
}

/// The minimal free resolution `F = ⊕ G_i` with `G_i: 0 -> Σ^{c_i}A -x^{c_i - r_i}-> Σ^{r_i}A`
/// for torsion summands and `G_i = Σ^{r_i}A` for free ones. Position-0 generators are labeled
/// `z1, z2, ...` and position-1 generators `m1, m2, ...`.
pub fn build_resolution_complex(ring: &Ring, d: &HomologyDecomposition) -> Result<GradedComplex, Error> {
    let mut f = GradedComplex::new(ring);
    let r: Vec<i64> = d.torsion.iter().map(|p| p.0).chain(d.free.iter().copied()).collect();
    let c: Vec<i64> = d.torsion.iter().map(|p| p.1).collect();
    f.set_module(0, r.clone(), Some((1..=r.len()).map(|k| format!("z{}", k)).collect()))?;
    f.set_module(1, c.clone(), Some((1..=c.len()).map(|k| format!("m{}", k)).collect()))?;
    let rows = (0..r.len())
        .map(|i| (0..c.len()).map(|j| if i == j { Poly::var_pow(ring, 0, (c[j] - r[i]) as u32) } else { Poly::zero(ring) }).collect())
        .collect();
    if !c.is_empty() {
        f.set_diff_rows(1, rows)?;
    }
    f.validate()?;
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedWitness {
    pub decomposition: HomologyDecomposition,
    pub resolution: GradedComplex,
    pub tot_resolution: SemifreeDG,
    /// `m_i` with `∂m_i = x^{c_i - r_i} z_i`, one per torsion summand.
    pub preimages: Vec<Vec<Poly>>,
    pub morphism: DgMorphism,
    pub certificate: MorphismCertificate,
}

/// `[min n_j, max(c_i, r_i) + max n_j + 4]`; above every torsion degree the induced map on
/// homology is multiplication-by-x equivariant and bijectivity propagates.
pub fn embed_window(m: &SemifreeDG, d: &HomologyDecomposition) -> Window {
    let lo = m.degrees().iter().copied().min().unwrap_or(0);
    let top = m.degrees().iter().copied().max().unwrap_or(0);
    let c = d.torsion.iter().map(|p| p.1).chain(d.free.iter().copied()).max().unwrap_or(0);
    Window::new(lo, c.max(top) + top + 4)
}

/// Builds `μ: Tot F -> M` sending `z_i ↦ z_i` and `m_i ↦ m_i` and certifies it.
///
/// `window` bounds the homology computation and the certificate; `None` uses the module's
/// default window for the homology and [`embed_window`] for the certificate.
pub fn embed(m: &SemifreeDG, window: Option<Window>) -> Result<EmbedWitness, Error> {
    require_univariate(m.ring())?;
    let hw = window.unwrap_or_else(|| m.default_window());
    let d = homology_decompose(m, hw)?;
    let ring = m.ring();
    let f = build_resolution_complex(ring, &d)?;
    let tf = tot(&f, m.convention())?;
    let mut preimages = Vec::new();
    for (i, &(r, c)) in d.torsion.iter().enumerate() {
        let target: Vec<Poly> = d.cycles[i].iter().map(|p| p * &Poly::var_pow(ring, 0, (c - r) as u32)).collect();
        preimages.push(boundary_preimage(m, &target, c)?);
    }
    // Tot F lists position 0 (all z_i) before position 1 (all m_i).
    let images: Vec<Vec<Poly>> = d.cycles.iter().cloned().chain(preimages.iter().cloned()).collect();
    let rows: Vec<Vec<Poly>> = (0..m.rank()).map(|e| images.iter().map(|img| img[e].clone()).collect()).collect();
    let mu = DgMorphism::new(&tf, m, rows)?;
    let cw = window.unwrap_or_else(|| embed_window(m, &d));
    let certificate = dg_morphism_check(&mu, cw)?;
    if !certificate.quasi_iso.certified {
        let (deg, r) = certificate.quasi_iso.first_failure().cloned().expect("failure recorded");
        return Err(Error::Invalid(format!(
            "induced map on homology is not bijective in degree {} (ranks {} -> {}, induced {})",
            deg, r.source_dim, r.target_dim, r.rank
        )));
    }
    Ok(EmbedWitness { decomposition: d, resolution: f, tot_resolution: tf, preimages, morphism: mu, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::tests::{e3, ring};
    use crate::dg::SignConvention;
    use alloc::string::ToString;

    fn mat(r: &Ring, rows: &[i64], cols: &[i64], entries: &[&[i64]]) -> GradedMatrix {
        let s = TwistedFreeModule::new(r, cols.to_vec());
        let t = TwistedFreeModule::new(r, rows.to_vec());
        let f = r.field();
        let e = entries
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, &a)| xpow(r, &f.from_i64(a), cols[j] - rows[i])).collect())
            .collect();
        GradedMatrix::new(s, t, e).unwrap()
    }

    #[test]
    fn already_diagonal() {
        let r = ring(Field::Rationals, &["x"]);
        let p = mat(&r, &[2, 4, 0], &[7, 8], &[&[1, 0], &[0, 1], &[0, 0]]);
        let s = graded_diagonalize(&p).unwrap();
        assert_eq!(s.pairs, vec![(2, 7), (4, 8)]);
        assert_eq!(s.free_rows, vec![0]);
        assert!(s.is_minimal());
    }

    #[test]
    fn zero_one_by_one() {
        let r = ring(Field::Rationals, &["x"]);
        let p = mat(&r, &[0], &[3], &[&[0]]);
        let s = graded_diagonalize(&p).unwrap();
        assert_eq!(s.s(), 0);
        assert_eq!(s.free_rows, vec![0]);
    }

    #[test]
    fn rank_one_two_by_two() {
        let r = ring(Field::Rationals, &["x"]);
        let p = mat(&r, &[0, 1], &[3, 2], &[&[1, 1], &[1, 1]]);
        let s = graded_diagonalize(&p).unwrap();
        assert_eq!(s.pairs, vec![(1, 2)]);
        assert_eq!(s.free_rows, vec![0]);
        assert_eq!(s.zero_columns, vec![3]);
    }

    #[test]
    fn rejects_multivariate() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let p = GradedMatrix::zero(&TwistedFreeModule::new(&r, vec![1]), &TwistedFreeModule::new(&r, vec![0]));
        assert_eq!(graded_diagonalize(&p), Err(Error::NotUnivariate(2)));
    }

    #[test]
    fn decomposition_of_e3() {
        let m = e3();
        let d = homology_decompose(&m, Window::new(0, 20)).unwrap();
        assert_eq!(d.torsion, vec![(2, 7), (4, 8)]);
        assert_eq!(d.free, vec![0]);
        let shown: Vec<String> = d.cycles.iter().map(|z| m.format_element(z)).collect();
        assert_eq!(shown, vec!["x^2*e1 + e2", "e3", "e1"]);
    }

    #[test]
    fn resolution_of_e3() {
        let m = e3();
        let d = homology_decompose(&m, Window::new(0, 20)).unwrap();
        let f = build_resolution_complex(m.ring(), &d).unwrap();
        assert_eq!(f.module(0).twists(), &[2, 4, 0]);
        assert_eq!(f.module(1).twists(), &[7, 8]);
        assert_eq!(f.diff(1).entry(0, 0).to_string(), "x^5");
        assert_eq!(f.diff(1).entry(1, 1).to_string(), "x^4");
        let t = tot(&f, SignConvention::Even).unwrap();
        let mut degs = t.degrees().to_vec();
        degs.sort();
        assert_eq!(degs, vec![0, 2, 4, 8, 9]);
    }

    #[test]
    fn embed_e3() {
        let m = e3();
        let w = embed(&m, Some(Window::new(0, 20))).unwrap();
        assert!(w.certificate.quasi_iso.certified);
        let img = |j| m.format_element(&w.morphism.image(j));
        assert_eq!(img(0), "x^2*e1 + e2");
        assert_eq!(img(3), "e4");
        assert_eq!(img(4), "e5");
        assert_eq!(img(2), "e1");
    }

    #[test]
    fn embed_zero_differential() {
        let r = ring(Field::Rationals, &["x"]);
        let m = SemifreeDG::new(&r, vec!["e1".to_string()], vec![3], SignConvention::Even).unwrap();
        let w = embed(&m, None).unwrap();
        assert_eq!(w.morphism.matrix, GradedMatrix::identity(&m.underlying()));
    }
}
