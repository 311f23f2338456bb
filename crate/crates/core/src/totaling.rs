//! The totaling functor from complexes of graded free modules to semifree DG modules.
//!
//! A generator `g` of `X_i` with twist `a` becomes a basis element of homological degree
//! `a + i`. A module element `x^m g` of `X_i` corresponds to `(-1)^{|m| i} x^m · e_g` in the
//! DG module under the Koszul convention, and to `x^m · e_g` under the even one; all signs
//! below come from this identification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::complex::{span, ComplexMorphism, GradedComplex};
use crate::dg::{dg_morphism_check, DgMorphism, MorphismCertificate, SemifreeDG, SignConvention};
use crate::error::Error;
use crate::graded::{GradedMatrix, Window};
use crate::poly::Poly;

/// Position and generator index of each basis element of `Tot X`, in basis order.
pub fn tot_index(x: &GradedComplex) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    for i in x.positions() {
        for g in 0..x.rank(i) {
            out.push((i, g));
        }
    }
    out
}

fn odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

fn entry_degree(p: &Poly) -> i64 {
    p.homogeneous_degree().map(|d| d as i64).unwrap_or(0)
}

pub fn tot(x: &GradedComplex, convention: SignConvention) -> Result<SemifreeDG, Error> {
    x.validate()?;
    let idx = tot_index(x);
    let labels = idx.iter().map(|&(i, g)| x.labels(i)[g].clone()).collect();
    let degrees = idx.iter().map(|&(i, g)| x.module(i).twists()[g] + i).collect();
    let mut m = SemifreeDG::new(x.ring(), labels, degrees, convention)?;
    let pos: BTreeMap<(i64, usize), usize> = idx.iter().enumerate().map(|(k, t)| (*t, k)).collect();
    for (col, &(i, g)) in idx.iter().enumerate() {
        let d = x.diff(i);
        for h in 0..d.nrows() {
            let e = d.entry(h, g);
            if e.is_zero() {
                continue;
            }
            let flip = convention == SignConvention::Koszul && odd(entry_degree(e) * (i - 1));
            m.set_entry(pos[&(i - 1, h)], col, if flip { -e } else { e.clone() })?;
        }
    }
    m.validate()?;
    Ok(m)
}

/// `Tot μ`, sending `e_g` to the image of `μ(g)`.
pub fn tot_morphism(mu: &ComplexMorphism, convention: SignConvention) -> Result<DgMorphism, Error> {
    mu.validate()?;
    let src = tot(mu.source(), convention)?;
    let tgt = tot(mu.target(), convention)?;
    let si = tot_index(mu.source());
    let ti: BTreeMap<(i64, usize), usize> = tot_index(mu.target()).into_iter().enumerate().map(|(k, t)| (t, k)).collect();
    let mut mat = GradedMatrix::zero(&src.underlying(), &tgt.underlying());
    for (col, &(i, g)) in si.iter().enumerate() {
        let c = mu.component(i);
        for h in 0..c.nrows() {
            let e = c.entry(h, g);
            if e.is_zero() {
                continue;
            }
            let flip = convention == SignConvention::Koszul && odd(entry_degree(e) * i);
            mat.set(ti[&(i, h)], col, if flip { -e } else { e.clone() });
        }
    }
    Ok(DgMorphism { source: src, target: tgt, matrix: mat })
}

/// Basis of `Tot X ⊗_A Tot Y`: pairs of `Tot` indices ordered by the first factor.
fn tensor_pairs(x: &GradedComplex, y: &GradedComplex) -> Vec<((i64, usize), (i64, usize))> {
    let (a, b) = (tot_index(x), tot_index(y));
    let mut out = Vec::new();
    for e in &a {
        for f in &b {
            out.push((*e, *f));
        }
    }
    out
}

/// `Tot X ⊗_A Tot Y` with `∂(e ⊗ f) = ∂e ⊗ f ± e ⊗ ∂f`.
///
/// Under the Koszul convention the sign is `(-1)^{|e|}`, and moving a coefficient `a` of `∂f`
/// across `e` costs `(-1)^{|a| p}` where `p` is the position `e` came from. Under the even
/// convention the A-action carries no homological degree, and the only well-defined sign is
/// the parity of the position of `e`.
pub fn tensor_tot(x: &GradedComplex, y: &GradedComplex, convention: SignConvention) -> Result<SemifreeDG, Error> {
    let tx = tot(x, convention)?;
    let ty = tot(y, convention)?;
    let pairs = tensor_pairs(x, y);
    let xi: BTreeMap<(i64, usize), usize> = tot_index(x).into_iter().enumerate().map(|(k, t)| (t, k)).collect();
    let yi: BTreeMap<(i64, usize), usize> = tot_index(y).into_iter().enumerate().map(|(k, t)| (t, k)).collect();
    let at: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, (e, f))| ((xi[e], yi[f]), k)).collect();
    let labels = pairs.iter().map(|(e, f)| format!("{}_{}", tx.labels()[xi[e]], ty.labels()[yi[f]])).collect();
    let degrees = pairs.iter().map(|(e, f)| tx.degrees()[xi[e]] + ty.degrees()[yi[f]]).collect();
    let mut m = SemifreeDG::new(x.ring(), labels, degrees, convention)?;
    for (col, (e, f)) in pairs.iter().enumerate() {
        let (ei, fi) = (xi[e], yi[f]);
        for k in 0..tx.rank() {
            let c = tx.entry(k, ei);
            if !c.is_zero() {
                let row = at[&(k, fi)];
                let cur = m.entry(row, col).clone();
                m.set_entry(row, col, &cur + c)?;
            }
        }
        for k in 0..ty.rank() {
            let c = ty.entry(k, fi);
            if c.is_zero() {
                continue;
            }
            let neg = match convention {
                SignConvention::Even => odd(e.0),
                SignConvention::Koszul => odd(tx.degrees()[ei] + entry_degree(c) * e.0),
            };
            let row = at[&(ei, k)];
            let cur = m.entry(row, col).clone();
            m.set_entry(row, col, if neg { &cur - c } else { &cur + c })?;
        }
    }
    m.validate()?;
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorCompatCertificate {
    pub rank: usize,
    pub morphism: MorphismCertificate,
    /// Whether `λ` is a signed bijection between the two bases.
    pub bijective: bool,
    pub certified: bool,
}

/// The isomorphism `λ: Tot(X ⊗ Y) -> Tot X ⊗ Tot Y`, `g ⊗ h ↦ ±e_g ⊗ f_h`.
pub fn tensor_lambda(x: &GradedComplex, y: &GradedComplex, convention: SignConvention) -> Result<DgMorphism, Error> {
    let xy = x.tensor(y)?;
    let left = tot(&xy, convention)?;
    let right = tensor_tot(x, y, convention)?;
    let pairs = tensor_pairs(x, y);
    let at: BTreeMap<((i64, usize), (i64, usize)), usize> = pairs.iter().enumerate().map(|(k, p)| (*p, k)).collect();
    let mut mat = GradedMatrix::zero(&left.underlying(), &right.underlying());
    // Generators of (X ⊗ Y)_i in the order used by `GradedComplex::tensor`.
    let mut col = 0;
    for i in xy.positions() {
        for j in x.positions() {
            let l = i - j;
            for g in 0..x.rank(j) {
                for h in 0..y.rank(l) {
                    let a_g = x.module(j).twists()[g];
                    let neg = convention == SignConvention::Koszul && odd(l * a_g);
                    let one = Poly::one(x.ring());
                    mat.set(at[&((j, g), (l, h))], col, if neg { -&one } else { one });
                    col += 1;
                }
            }
        }
    }
    debug_assert_eq!(col, left.rank());
    Ok(DgMorphism { source: left, target: right, matrix: mat })
}

/// Builds `λ` and certifies it as a chain map and a bijection, and that `λ∂ = ∂λ` holds for
/// the realized matrices in every degree of the window.
pub fn tensor_compat_check(x: &GradedComplex, y: &GradedComplex, convention: SignConvention, window: Window) -> Result<TensorCompatCertificate, Error> {
    let lambda = tensor_lambda(x, y, convention)?;
    let n = lambda.source.rank();
    let mut bijective = n == lambda.target.rank();
    if bijective {
        let mut hit = alloc::vec![false; n];
        for j in 0..n {
            let col = lambda.matrix.column(j);
            let nz: Vec<usize> = (0..n).filter(|&i| !col[i].is_zero()).collect();
            if nz.len() != 1 || hit[nz[0]] || lambda.source.degrees()[j] != lambda.target.degrees()[nz[0]] {
                bijective = false;
                break;
            }
            hit[nz[0]] = true;
        }
    }
    let morphism = dg_morphism_check(&lambda, window)?;
    let certified = bijective && morphism.quasi_iso.certified;
    Ok(TensorCompatCertificate { rank: n, morphism, bijective, certified })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorTables {
    pub window: Window,
    /// `d -> (dim H_d(Tot X ⊗ Tot Y), Σ_i dim H_i(X ⊗ Y)_{d-i})`
    pub rows: BTreeMap<i64, (usize, usize)>,
    pub agree: bool,
}

pub fn tor_decomposition_check(x: &GradedComplex, y: &GradedComplex, convention: SignConvention, window: Window) -> Result<TorTables, Error> {
    let dg = tensor_tot(x, y, convention)?;
    let k = dg.realize_window(window);
    let xy = x.tensor(y)?;
    let mut rows = BTreeMap::new();
    let right = match xy.support() {
        Some((a, b)) => xy.homology_truncated(Window::new(window.lo - b, window.hi - a)),
        None => BTreeMap::new(),
    };
    for d in window.degrees() {
        let left = k.homology_dim(d);
        let r: usize = right.iter().filter(|((i, j), _)| i + j == d).map(|(_, v)| *v).sum();
        rows.insert(d, (left, r));
    }
    let agree = rows.values().all(|(a, b)| a == b);
    Ok(TorTables { window, rows, agree })
}

/// `dim H_d(Tot X)` against `Σ_i dim H_i(X)_{d-i}` for every `d` in the window.
pub fn tot_homology_check(x: &GradedComplex, convention: SignConvention, window: Window) -> Result<BTreeMap<i64, (usize, usize)>, Error> {
    let m = tot(x, convention)?;
    let k = m.realize_window(window);
    let right = match x.support() {
        Some((a, b)) => x.homology_truncated(Window::new(window.lo - b, window.hi - a)),
        None => BTreeMap::new(),
    };
    Ok(window
        .degrees()
        .map(|d| {
            let r: usize = right.iter().filter(|((i, j), _)| i + j == d).map(|(_, v)| *v).sum();
            (d, (k.homology_dim(d), r))
        })
        .collect())
}

/// Whether `tot(x)` is the totaling window-consistent with the realization of `x`:
/// the DG piece `M_d` has dimension `Σ_i dim (X_i)_{d-i}`.
pub fn tot_dimensions_match(x: &GradedComplex, m: &SemifreeDG, window: Window) -> bool {
    let under = m.underlying();
    window.degrees().all(|d| {
        let want: usize = x.positions().map(|i| x.module(i).piece_dim(d - i)).sum();
        under.piece_dim(d) == want
    })
}

/// The support of `Tot X` in homological degrees.
pub fn tot_degree_span(x: &GradedComplex) -> Option<(i64, i64)> {
    let mut out = None;
    for i in x.positions() {
        for &a in x.module(i).twists() {
            out = span(out, Some((a + i, a + i)));
        }
    }
    out
}

/// Describes the first difference between two modules, comparing labels, degrees and
/// differentials literally.
pub fn literal_difference(a: &SemifreeDG, b: &SemifreeDG) -> Option<String> {
    if a.labels() != b.labels() {
        return Some(format!("labels differ: {:?} vs {:?}", a.labels(), b.labels()));
    }
    if a.degrees() != b.degrees() {
        return Some(format!("degrees differ: {:?} vs {:?}", a.degrees(), b.degrees()));
    }
    for j in 0..a.rank() {
        if a.column(j) != b.column(j) {
            return Some(format!(
                "d {} differs: {} vs {}",
                a.labels()[j],
                a.format_element(&a.column(j)),
                b.format_element(&b.column(j))
            ));
        }
    }
    if a.convention() != b.convention() {
        return Some(String::from("sign conventions differ"));
    }
    None
}
