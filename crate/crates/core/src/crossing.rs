//! Level partitions of a semibasis, crossing detection, de-totaling, and a search for
//! crossing-free semibases by unit-triangular changes of basis.
//!
//! Levels: `E_0` holds the cycles of the basis; `E_l` holds the basis elements with nonzero
//! differential supported entirely on `E_{l-1}`. A basis has crossing when some element lies
//! in no level.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::GradedComplex;
use crate::dg::{SemifreeDG, SignConvention};
use crate::error::Error;
use crate::graded::GradedMatrix;
use crate::linalg::Mat;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPartition {
    /// Level of each basis element in declaration order; `None` means unassigned.
    pub levels: Vec<Option<usize>>,
}

impl LevelPartition {
    pub fn level(&self, l: usize) -> Vec<usize> {
        (0..self.levels.len()).filter(|&j| self.levels[j] == Some(l)).collect()
    }

    pub fn unassigned(&self) -> Vec<usize> {
        (0..self.levels.len()).filter(|&j| self.levels[j].is_none()).collect()
    }

    pub fn max_level(&self) -> Option<usize> {
        self.levels.iter().flatten().copied().max()
    }

    pub fn has_crossing(&self) -> bool {
        self.levels.iter().any(Option::is_none)
    }
}

fn support(m: &SemifreeDG, j: usize) -> Vec<usize> {
    (0..m.rank()).filter(|&i| !m.entry(i, j).is_zero()).collect()
}

pub fn partition(m: &SemifreeDG) -> LevelPartition {
    let n = m.rank();
    let supports: Vec<Vec<usize>> = (0..n).map(|j| support(m, j)).collect();
    let mut levels: Vec<Option<usize>> = supports.iter().map(|s| if s.is_empty() { Some(0) } else { None }).collect();
    let mut l = 0;
    loop {
        let newly: Vec<usize> = (0..n)
            .filter(|&j| levels[j].is_none() && supports[j].iter().all(|&i| levels[i] == Some(l)))
            .collect();
        if newly.is_empty() {
            break;
        }
        for j in newly {
            levels[j] = Some(l + 1);
        }
        l += 1;
    }
    LevelPartition { levels }
}

pub fn has_crossing(m: &SemifreeDG) -> bool {
    partition(m).has_crossing()
}

/// The complex `... -> Σ^{-2} A E_2 -> Σ^{-1} A E_1 -> A E_0 -> 0` whose totaling is `M`.
/// Within a level generators keep their declaration order and labels.
pub fn detot(m: &SemifreeDG) -> Result<GradedComplex, Error> {
    m.validate()?;
    let p = partition(m);
    if p.has_crossing() {
        return Err(Error::CrossingPresent);
    }
    let mut x = GradedComplex::new(m.ring());
    let top = p.max_level().unwrap_or(0);
    let members: Vec<Vec<usize>> = (0..=top).map(|l| p.level(l)).collect();
    for (l, els) in members.iter().enumerate() {
        let twists = els.iter().map(|&e| m.degrees()[e] - l as i64).collect();
        let labels = els.iter().map(|&e| m.labels()[e].clone()).collect();
        x.set_module(l as i64, twists, Some(labels))?;
    }
    for l in 1..=top {
        let rows: Vec<Vec<Poly>> = members[l - 1]
            .iter()
            .map(|&i| {
                members[l]
                    .iter()
                    .map(|&j| {
                        let e = m.entry(i, j);
                        let deg = e.homogeneous_degree().unwrap_or(0) as usize;
                        // Undo the sign the Koszul totaling attaches to coefficients leaving position l.
                        if m.convention() == SignConvention::Koszul && (deg * (l - 1)) % 2 == 1 {
                            -e
                        } else {
                            e.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        x.set_diff_rows(l as i64, rows)?;
    }
    x.validate()?;
    Ok(x)
}

/// Compares two modules after matching basis elements by label.
pub fn equal_up_to_labels(a: &SemifreeDG, b: &SemifreeDG) -> bool {
    if a.rank() != b.rank() || a.convention() != b.convention() || a.ring() != b.ring() {
        return false;
    }
    let Some(perm) = a.labels().iter().map(|l| b.label_index(l)).collect::<Option<Vec<usize>>>() else {
        return false;
    };
    (0..a.rank()).all(|j| {
        a.degrees()[j] == b.degrees()[perm[j]] && (0..a.rank()).all(|i| a.entry(i, j) == b.entry(perm[i], perm[j]))
    })
}

/// Columns are the new basis elements written in the old basis; unit upper triangular in
/// the well-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    pub matrix: GradedMatrix,
}

impl BasisChange {
    pub fn identity(m: &SemifreeDG) -> BasisChange {
        BasisChange { matrix: GradedMatrix::identity(&m.underlying()) }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == GradedMatrix::identity(self.matrix.source())
    }

    /// `(label, new element in the old basis)` for every element that changed.
    pub fn substitutions(&self, m: &SemifreeDG) -> Vec<(String, String)> {
        (0..m.rank())
            .filter_map(|j| {
                let col = self.matrix.column(j);
                let mut unit = vec![Poly::zero(m.ring()); m.rank()];
                unit[j] = Poly::one(m.ring());
                if col == unit {
                    None
                } else {
                    Some((m.labels()[j].clone(), m.format_element(&col)))
                }
            })
            .collect()
    }

    /// Checks `∂_old(B e'_j) = B(∂_new e'_j)` for every `j`.
    pub fn verify(&self, old: &SemifreeDG, new: &SemifreeDG) -> bool {
        (0..old.rank()).all(|j| old.apply_differential(&self.matrix.column(j)) == self.matrix.apply(&new.column(j)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingElimination {
    pub change: BasisChange,
    pub module: SemifreeDG,
    pub partition: LevelPartition,
    pub passes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingFailure {
    pub module: SemifreeDG,
    pub partition: LevelPartition,
    /// `(label, homological degree)` of elements whose linear systems had no solution.
    pub failed: Vec<(String, i64)>,
    pub passes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EliminationOutcome {
    Success(CrossingElimination),
    Failure(CrossingFailure),
}

/// Tries to find `b`, supported on elements strictly before `e` in the well-order, such that
/// `∂(e - b)` is supported on `allowed` (or vanishes when `allowed` is `None`).
fn solve_substitution(m: &SemifreeDG, e: usize, earlier: &[usize], allowed: Option<&[usize]>) -> Option<Vec<Poly>> {
    let under = m.underlying();
    let d = m.degrees()[e];
    let real = m.realize(d);
    let src = under.piece_basis(d);
    let tgt = under.piece_basis(d - 1);
    let cols: Vec<usize> = (0..src.len()).filter(|&c| earlier.contains(&src[c].0)).collect();
    let rows: Vec<usize> = (0..tgt.len()).filter(|&r| allowed.is_none_or(|a| !a.contains(&tgt[r].0))).collect();
    let mut unit = vec![Poly::zero(m.ring()); m.rank()];
    unit[e] = Poly::one(m.ring());
    let de = under.to_coords(d - 1, &m.apply_differential(&unit)).ok()?;
    let field = m.field();
    let sub = Mat::from_rows(
        field,
        cols.len(),
        rows.iter().map(|&r| cols.iter().map(|&c| real.get(r, c).clone()).collect()).collect(),
    );
    let rhs: Vec<_> = rows.iter().map(|&r| de[r].clone()).collect();
    let sol = sub.solve(&rhs)?;
    let mut full = crate::linalg::zero_vector(field, src.len());
    for (k, &c) in cols.iter().enumerate() {
        full[c] = sol[k].clone();
    }
    Some(under.from_coords(d, &full))
}

/// Replaces `e` by `e' = e - b` and rewrites every differential in the new basis.
fn substitute(m: &mut SemifreeDG, change: &mut GradedMatrix, e: usize, b: &[Poly]) -> Result<(), Error> {
    let n = m.rank();
    let mut new_e = vec![Poly::zero(m.ring()); n];
    new_e[e] = Poly::one(m.ring());
    for (i, c) in b.iter().enumerate() {
        new_e[i] = &new_e[i] - c;
    }
    let de = m.apply_differential(&new_e);
    for f in 0..n {
        let a = m.entry(e, f).clone();
        if f == e || a.is_zero() {
            continue;
        }
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                let cur = m.entry(i, f).clone();
                m.set_entry(i, f, &cur + &(&a * c))?;
            }
        }
    }
    m.set_column(e, de)?;
    // Column e of the cumulative change becomes B(e - b).
    let old_cols: Vec<Vec<Poly>> = (0..n).map(|j| change.column(j)).collect();
    for r in 0..n {
        let mut acc = old_cols[e][r].clone();
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc - &(c * &old_cols[i][r]);
            }
        }
        change.set(r, e, acc);
    }
    Ok(())
}

/// Searches for a crossing-free semibasis. Elements are processed in the well-order; an
/// element `e` outside every level is replaced by `e - b` where `∂(e - b)` is supported on a
/// single level `E_{l-1}`, trying `l = 1 + (highest level in the support of ∂e)` first and then
/// lower levels down to `∂(e - b) = 0`. Failure is not a proof that no such basis exists.
pub fn eliminate_crossing(m: &SemifreeDG, max_passes: Option<usize>) -> Result<EliminationOutcome, Error> {
    let order = m.validate()?;
    let max_passes = max_passes.unwrap_or(m.rank().max(1));
    let mut work = m.clone();
    let mut change = GradedMatrix::identity(&m.underlying());
    let mut passes = 0;
    let mut failed = Vec::new();
    while passes < max_passes && partition(&work).has_crossing() {
        passes += 1;
        failed.clear();
        for (pos, &e) in order.iter().enumerate() {
            let p = partition(&work);
            if p.levels[e].is_some() {
                continue;
            }
            let earlier = &order[..pos];
            let top = support(&work, e).iter().filter_map(|&i| p.levels[i]).max().map_or(0, |l| l + 1);
            let highest = p.max_level().map_or(0, |l| l + 1);
            let mut targets: Vec<usize> = (0..=top).rev().collect();
            targets.extend((top + 1)..=highest);
            let mut done = false;
            for l in targets {
                let allowed = if l == 0 { None } else { Some(p.level(l - 1)) };
                if let Some(b) = solve_substitution(&work, e, earlier, allowed.as_deref()) {
                    let mut trial = work.clone();
                    let mut trial_change = change.clone();
                    substitute(&mut trial, &mut trial_change, e, &b)?;
                    if partition(&trial).levels[e].is_some() {
                        work = trial;
                        change = trial_change;
                        done = true;
                        break;
                    }
                }
            }
            if !done {
                failed.push((work.labels()[e].clone(), work.degrees()[e]));
            }
        }
    }
    let part = partition(&work);
    if part.has_crossing() {
        return Ok(EliminationOutcome::Failure(CrossingFailure { module: work, partition: part, failed, passes }));
    }
    work.validate()?;
    let change = BasisChange { matrix: change };
    if !change.verify(m, &work) {
        return Err(Error::Invalid(String::from("basis change does not conjugate the differential")));
    }
    Ok(EliminationOutcome::Success(CrossingElimination { change, module: work, partition: part, passes }))
}

/// The differential shapes a semibasis of rank at most three can take, in the well-order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank3Case {
    /// `∂e1 = 0`
    Rank1,
    /// `∂e1 = 0, ∂e2 = a12 e1`
    Rank2,
    /// `∂e1 = 0, ∂e2 = a12 e1, ∂e3 = a13 e1`
    Rank3Chain,
    /// `∂e1 = 0, ∂e2 = 0, ∂e3 = a13 e1 + a23 e2`
    Rank3Fork,
}

impl Rank3Case {
    pub fn describe(&self) -> &'static str {
        match self {
            Rank3Case::Rank1 => "d e1 = 0",
            Rank3Case::Rank2 => "d e1 = 0, d e2 = a12*e1",
            Rank3Case::Rank3Chain => "d e1 = 0, d e2 = a12*e1, d e3 = a13*e1",
            Rank3Case::Rank3Fork => "d e1 = 0, d e2 = 0, d e3 = a13*e1 + a23*e2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank3Classification {
    pub case: Rank3Case,
    /// Declaration indices of `e1, e2, e3` in the well-order.
    pub order: Vec<usize>,
    pub partition: LevelPartition,
    pub complex: GradedComplex,
}

pub fn rank3_classify(m: &SemifreeDG) -> Result<Rank3Classification, Error> {
    if m.rank() > 3 {
        return Err(Error::RankTooLarge(m.rank()));
    }
    let order = m.validate()?;
    let case = match order.len() {
        0 | 1 => Rank3Case::Rank1,
        2 => Rank3Case::Rank2,
        _ => {
            let (e2, e3) = (order[1], order[2]);
            if m.column(e2).iter().all(Poly::is_zero) {
                Rank3Case::Rank3Fork
            } else if m.entry(e2, e3).is_zero() {
                Rank3Case::Rank3Chain
            } else {
                return Err(Error::Invalid(String::from("rank-three differential outside the domain case table")));
            }
        }
    };
    let partition = partition(m);
    if partition.has_crossing() {
        return Err(Error::Invalid(String::from("rank at most three with crossing")));
    }
    let complex = detot(m)?;
    Ok(Rank3Classification { case, order, partition, complex })
}

/// `(label, level)` listing used by reports, with `None` for unassigned elements.
pub fn level_table(m: &SemifreeDG, p: &LevelPartition) -> BTreeMap<String, Option<usize>> {
    m.labels().iter().cloned().zip(p.levels.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::tests::{e1, ring};
    use crate::field::Field;
    use crate::totaling::tot;
    use alloc::format;
    use alloc::string::ToString;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{}", i)).collect()
    }

    fn example(rebased: bool) -> SemifreeDG {
        let r = ring(Field::Rationals, &["x", "y", "z"]);
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        let z = Poly::var(&r, 2);
        let mut m = SemifreeDG::new(&r, labels(4), vec![0, 2, 3, 5], SignConvention::Even).unwrap();
        m.set_entry(0, 1, x.clone()).unwrap();
        m.set_entry(0, 2, &y * &z).unwrap();
        if !rebased {
            m.set_entry(0, 3, &x * &z.pow(3)).unwrap();
        }
        m.set_entry(1, 3, &y * &z).unwrap();
        m.set_entry(2, 3, -&x).unwrap();
        m
    }

    #[test]
    fn partition_of_first_example() {
        let p = partition(&example(false));
        assert_eq!(p.levels, vec![Some(0), Some(1), Some(1), None]);
        assert!(p.has_crossing());
        let q = partition(&example(true));
        assert_eq!(q.levels, vec![Some(0), Some(1), Some(1), Some(2)]);
        assert!(!q.has_crossing());
    }

    #[test]
    fn zero_differential_is_level_zero() {
        let r = ring(Field::Rationals, &["x"]);
        let m = SemifreeDG::new(&r, labels(2), vec![0, 4], SignConvention::Even).unwrap();
        assert_eq!(partition(&m).levels, vec![Some(0), Some(0)]);
        let x = detot(&m).unwrap();
        assert_eq!(x.support(), Some((0, 0)));
        assert_eq!(x.module(0).twists(), &[0, 4]);
    }

    #[test]
    fn e1_has_crossing_and_elimination_fails() {
        let m = e1(Field::Rationals, 1);
        assert!(has_crossing(&m));
        match eliminate_crossing(&m, None).unwrap() {
            EliminationOutcome::Failure(f) => assert_eq!(f.failed, vec![("e4".to_string(), 8)]),
            EliminationOutcome::Success(_) => panic!("unexpected success"),
        }
    }

    #[test]
    fn elimination_reproduces_the_substitution() {
        let m = example(false);
        let EliminationOutcome::Success(s) = eliminate_crossing(&m, None).unwrap() else { panic!("failed") };
        assert_eq!(s.module, example(true));
        assert_eq!(s.change.substitutions(&m), vec![("e4".to_string(), "-z^3*e2 + e4".to_string())]);
        assert!(s.change.verify(&m, &s.module));
        let EliminationOutcome::Success(id) = eliminate_crossing(&example(true), None).unwrap() else { panic!() };
        assert!(id.change.is_identity());
    }

    #[test]
    fn detot_round_trip() {
        let m = example(true);
        let x = detot(&m).unwrap();
        assert_eq!(x.diff(1).rows()[0].iter().map(|p| p.to_string()).collect::<Vec<_>>(), vec!["x", "y*z"]);
        assert_eq!(x.diff(2).column(0).iter().map(|p| p.to_string()).collect::<Vec<_>>(), vec!["y*z", "-x"]);
        assert_eq!(tot(&x, SignConvention::Even).unwrap(), m);
        let k = m.with_convention(SignConvention::Koszul);
        if k.validate().is_ok() {
            assert_eq!(tot(&detot(&k).unwrap(), SignConvention::Koszul).unwrap(), k);
        }
    }

    #[test]
    fn detot_refuses_crossing() {
        assert_eq!(detot(&example(false)), Err(Error::CrossingPresent));
    }

    #[test]
    fn rank3_cases() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        let one = SemifreeDG::new(&r, labels(1), vec![0], SignConvention::Even).unwrap();
        assert_eq!(rank3_classify(&one).unwrap().case, Rank3Case::Rank1);
        let mut fork = SemifreeDG::new(&r, labels(3), vec![0, 0, 2], SignConvention::Even).unwrap();
        fork.set_entry(0, 2, x.clone()).unwrap();
        fork.set_entry(1, 2, y.clone()).unwrap();
        assert_eq!(rank3_classify(&fork).unwrap().case, Rank3Case::Rank3Fork);
        let two = SemifreeDG::new(&r, labels(2), vec![0, 1], SignConvention::Even).unwrap();
        let c = rank3_classify(&two).unwrap();
        assert!(!c.partition.has_crossing());
        assert!(matches!(rank3_classify(&example(true)), Err(Error::RankTooLarge(4))));
    }
}
