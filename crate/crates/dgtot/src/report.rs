//! Report payloads. JSON is `serde_json` compact output of these structs; field order is
//! declaration order and maps are `BTreeMap`, so output is byte-stable. The schema is
//! described in `docs/report-schema.md`.

use std::collections::BTreeMap;
use std::fmt::Write;

use dgtot_core::graded::Window;
use serde::Serialize;

use crate::suites::SuiteReport;

pub trait Render {
    fn text(&self) -> String;
}

pub fn window(w: Window) -> [i64; 2] {
    [w.lo, w.hi]
}

#[derive(Clone, Debug, Serialize)]
pub struct ObjectCheck {
    pub object: String,
    pub kind: String,
    pub valid: bool,
    pub error: Option<String>,
    /// Labels in a compatible well-order (DG modules only).
    pub well_order: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateReport {
    pub command: &'static str,
    pub valid: bool,
    pub objects: Vec<ObjectCheck>,
}

impl Render for ValidateReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for o in &self.objects {
            match &o.error {
                None => writeln!(out, "{} {}: ok", o.kind, o.object).unwrap(),
                Some(e) => writeln!(out, "{} {}: INVALID ({})", o.kind, o.object, e).unwrap(),
            }
            if let Some(w) = &o.well_order {
                writeln!(out, "  well-order: {}", w.join(" ")).unwrap();
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyGenerator {
    pub degree: i64,
    pub cycle: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DgHomologyReport {
    pub command: &'static str,
    pub object: String,
    pub window: [i64; 2],
    pub certified: bool,
    pub suggested_hi: Option<i64>,
    /// `d -> dim_k H_d` for every degree of the window.
    pub dims: BTreeMap<i64, usize>,
    pub generators: Vec<HomologyGenerator>,
    pub relation_degrees: Vec<i64>,
    pub presentation: String,
}

impl Render for DgHomologyReport {
    fn text(&self) -> String {
        let mut out = format!("homology of {} on [{}, {}]\n", self.object, self.window[0], self.window[1]);
        let dims: Vec<String> = self.dims.iter().filter(|(_, v)| **v > 0).map(|(d, v)| format!("H_{}={}", d, v)).collect();
        writeln!(out, "dimensions: {}", if dims.is_empty() { "all zero".to_string() } else { dims.join(" ") }).unwrap();
        for g in &self.generators {
            writeln!(out, "generator in degree {}: {}", g.degree, g.cycle).unwrap();
        }
        writeln!(out, "relation degrees: {:?}", self.relation_degrees).unwrap();
        writeln!(out, "presentation: {}", self.presentation).unwrap();
        if !self.certified {
            writeln!(out, "uncertified; suggested hi {}", self.suggested_hi.unwrap_or(self.window[1])).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexHomologyEntry {
    pub position: i64,
    pub degree: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexHomologyReport {
    pub command: &'static str,
    pub object: String,
    pub window: [i64; 2],
    pub nonzero: Vec<ComplexHomologyEntry>,
}

impl Render for ComplexHomologyReport {
    fn text(&self) -> String {
        let mut out = format!("homology of {} for internal degrees [{}, {}]\n", self.object, self.window[0], self.window[1]);
        if self.nonzero.is_empty() {
            out.push_str("all zero\n");
        }
        for e in &self.nonzero {
            writeln!(out, "H_{} in degree {}: {}", e.position, e.degree, e.dim).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Substitution {
    pub label: String,
    pub new: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Elimination {
    pub outcome: &'static str,
    pub passes: usize,
    pub substitutions: Vec<Substitution>,
    /// `label -> ∂ label` in the new basis, nonzero differentials only.
    pub differentials: BTreeMap<String, String>,
    pub levels: Vec<Vec<String>>,
    pub unassigned: Vec<String>,
    pub has_crossing: bool,
    pub conjugation_verified: bool,
    /// Elements whose linear systems had no solution on the last pass.
    pub failed: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingReport {
    pub command: &'static str,
    pub object: String,
    pub levels: Vec<Vec<String>>,
    pub unassigned: Vec<String>,
    pub has_crossing: bool,
    pub elimination: Option<Elimination>,
}

fn level_lines(out: &mut String, levels: &[Vec<String>], unassigned: &[String]) {
    for (l, ls) in levels.iter().enumerate() {
        writeln!(out, "E{} = {{{}}}", l, ls.join(", ")).unwrap();
    }
    if !unassigned.is_empty() {
        writeln!(out, "unassigned: {}", unassigned.join(", ")).unwrap();
    }
}

impl Render for CrossingReport {
    fn text(&self) -> String {
        let mut out = String::new();
        level_lines(&mut out, &self.levels, &self.unassigned);
        writeln!(out, "crossing: {}", if self.has_crossing { "yes" } else { "no" }).unwrap();
        if let Some(e) = &self.elimination {
            writeln!(out, "elimination: {} after {} pass(es)", e.outcome, e.passes).unwrap();
            for s in &e.substitutions {
                writeln!(out, "  {}' = {}", s.label, s.new).unwrap();
            }
            for (l, d) in &e.differentials {
                writeln!(out, "  d {} = {}", l, d).unwrap();
            }
            level_lines(&mut out, &e.levels, &e.unassigned);
            if !e.failed.is_empty() {
                writeln!(out, "no substitution found for: {}", e.failed.join(", ")).unwrap();
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WrittenReport {
    pub command: &'static str,
    pub object: String,
    pub output: String,
    pub summary: String,
}

impl Render for WrittenReport {
    fn text(&self) -> String {
        format!("{}\nwritten to {}\n", self.summary, self.output)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolveReport {
    pub command: &'static str,
    pub object: String,
    pub window: [i64; 2],
    /// `(r_i, c_i)` with `c_i > r_i`: summands `Σ^{r_i} A / x^{c_i - r_i}`.
    pub torsion: Vec<[i64; 2]>,
    pub free: Vec<i64>,
    pub cycles: Vec<String>,
    pub resolution: String,
}

impl Render for ResolveReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for t in &self.torsion {
            writeln!(out, "torsion: generator degree {}, relation degree {}", t[0], t[1]).unwrap();
        }
        for f in &self.free {
            writeln!(out, "free: generator degree {}", f).unwrap();
        }
        for (i, c) in self.cycles.iter().enumerate() {
            writeln!(out, "z{} = {}", i + 1, c).unwrap();
        }
        out.push_str(&self.resolution);
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbedImage {
    pub generator: String,
    pub degree: i64,
    pub image: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbedReport {
    pub command: &'static str,
    pub object: String,
    pub window: [i64; 2],
    pub chain_map: bool,
    pub quasi_isomorphism: bool,
    pub images: Vec<EmbedImage>,
    pub resolution: String,
}

impl Render for EmbedReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for i in &self.images {
            writeln!(out, "{} (degree {}) -> {}", i.generator, i.degree, i.image).unwrap();
        }
        writeln!(
            out,
            "chain map: {}; quasi-isomorphism on [{}, {}]: {}",
            self.chain_map, self.window[0], self.window[1], self.quasi_isomorphism
        )
        .unwrap();
        out.push_str(&self.resolution);
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructReport {
    pub command: &'static str,
    pub object: String,
    pub field: String,
    pub window: [i64; 2],
    pub rank: usize,
    pub minimal: bool,
    pub homology_generators: Vec<i64>,
    pub homology_relations: Vec<i64>,
    pub resolution_method: &'static str,
    /// Twists of `G_i` for each resolution position.
    pub betti: Vec<Vec<i64>>,
    pub betti_numbers: Vec<usize>,
    pub betti_sum: usize,
    pub end0_dim: usize,
    pub indecomposable: &'static str,
    pub indecomposable_detail: String,
    pub verdict: &'static str,
    pub hypothesis: Option<&'static str>,
    pub degree_profile_match: Option<bool>,
}

impl Render for ObstructReport {
    fn text(&self) -> String {
        let mut out = format!("rank {} ({})\n", self.rank, if self.minimal { "minimal" } else { "not minimal" });
        for (i, tw) in self.betti.iter().enumerate() {
            writeln!(out, "beta_{} = {} twists {:?}", i, tw.len(), tw).unwrap();
        }
        writeln!(out, "betti sum {}", self.betti_sum).unwrap();
        writeln!(out, "End0 dimension {}; indecomposable: {} ({})", self.end0_dim, self.indecomposable, self.indecomposable_detail).unwrap();
        match self.hypothesis {
            Some(h) => writeln!(out, "verdict: {} ({})", self.verdict, h).unwrap(),
            None => writeln!(out, "verdict: {}", self.verdict).unwrap(),
        }
        if let Some(m) = self.degree_profile_match {
            writeln!(out, "degree profile match: {}", m).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorReport {
    pub command: &'static str,
    pub convention: &'static str,
    pub window: [i64; 2],
    pub rank: usize,
    pub bijective: bool,
    pub quasi_isomorphism: bool,
    pub certified: bool,
}

impl Render for TensorReport {
    fn text(&self) -> String {
        format!(
            "Tot(X ⊗ Y) -> Tot X ⊗ Tot Y ({} signs), rank {}\nbijective on bases: {}\nquasi-isomorphism on [{}, {}]: {}\ncertified: {}\n",
            self.convention, self.rank, self.bijective, self.window[0], self.window[1], self.quasi_isomorphism, self.certified
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TorRow {
    pub degree: i64,
    pub tot: usize,
    pub sum: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorReport {
    pub command: &'static str,
    pub convention: &'static str,
    pub window: [i64; 2],
    pub rows: Vec<TorRow>,
    pub agree: bool,
}

impl Render for TorReport {
    fn text(&self) -> String {
        let mut out = String::from("degree  dim H(Tot X ⊗ Tot Y)  sum dim H(X ⊗ Y)\n");
        for r in &self.rows {
            writeln!(out, "{:>6}  {:>20}  {:>17}", r.degree, r.tot, r.sum).unwrap();
        }
        writeln!(out, "agree: {}", self.agree).unwrap();
        out
    }
}

impl Render for SuiteReport {
    fn text(&self) -> String {
        let mut out = format!("suite {} seed {}: {}/{} passed\n", self.suite, self.seed, self.passed, self.instances);
        for (k, v) in &self.counts {
            writeln!(out, "  {}: {}", k, v).unwrap();
        }
        for f in &self.failures {
            writeln!(out, "  instance {}: {}", f.instance, f.message).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub error: String,
    pub kind: &'static str,
    pub suggested_hi: Option<i64>,
}

impl Render for ErrorReport {
    fn text(&self) -> String {
        format!("error: {}\n", self.error)
    }
}
