//! Seeded randomized suites. Every instance draws from its own stream (see
//! [`random::instance_rng`]) so a failing instance can be replayed alone.

use std::collections::BTreeMap;

use dgtot_core::complex::{concentrated_replacement, GradedComplex};
use dgtot_core::crossing::{detot, eliminate_crossing, equal_up_to_labels, rank3_classify, EliminationOutcome, Rank3Case};
use dgtot_core::dg::{SemifreeDG, SignConvention};
use dgtot_core::graded::Window;
use dgtot_core::obstruction::{resolve_degreewise, resolve_univariate, tot_image_obstruction, Verdict};
use dgtot_core::totaling::{tensor_compat_check, tor_decomposition_check, tot, tot_degree_span};
use dgtot_core::univariate::embed;
use dgtot_core::{Error, Field};
use rand::Rng;
use serde::Serialize;

use crate::random::{self, instance_rng, ComplexShape, ModuleShape};

pub const NAMES: [&str; 4] = ["embed", "functorial", "rank3", "oracle"];

pub fn default_count(name: &str) -> usize {
    match name {
        "functorial" | "oracle" => 50,
        _ => 100,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteFailure {
    pub instance: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub passed: usize,
    pub failures: Vec<SuiteFailure>,
    /// Named counters, e.g. how many instances reached an optional check.
    pub counts: BTreeMap<String, usize>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> SuiteReport {
        SuiteReport { suite: suite.to_string(), seed, instances: 0, passed: 0, failures: Vec::new(), counts: BTreeMap::new() }
    }

    fn record(&mut self, instance: u64, outcome: Result<(), String>) {
        self.instances += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(message) => self.failures.push(SuiteFailure { instance, message }),
        }
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.instances
    }
}

pub fn run(name: &str, seed: u64, count: Option<usize>) -> Option<SuiteReport> {
    let n = count.unwrap_or_else(|| default_count(name));
    Some(match name {
        "embed" => embed_suite(seed, n),
        "functorial" => functorial_suite(seed, n),
        "rank3" => rank3_suite(seed, n),
        "oracle" => oracle_suite(seed, n),
        _ => return None,
    })
}

pub const EMBED_SHAPE: ModuleShape = ModuleShape { max_rank: 5, max_degree: 10, max_entry_degree: 8, zero_prob: 0.15 };
pub const RANK3_SHAPE: ModuleShape = ModuleShape { max_rank: 3, max_degree: 6, max_entry_degree: 4, zero_prob: 0.1 };
pub const COMPLEX_SHAPE: ComplexShape = ComplexShape { max_rank: 3, max_positions: 3, max_twist_spread: 2 };

/// Runs the obstruction on a module some construction has already placed in the image of
/// `Tot`; the verdict must not be `NOT_IN_TOT_IMAGE`.
fn soundness(m: &SemifreeDG, report: &mut SuiteReport) -> Result<(), String> {
    match tot_image_obstruction(m, m.default_window()) {
        Ok(r) if r.verdict == Verdict::NotInTotImage => Err("obstruction claims a constructed module is not in the image".into()),
        Ok(_) => {
            report.bump("soundness_checked");
            Ok(())
        }
        Err(Error::WindowTooSmall { .. }) => {
            report.bump("soundness_uncertified");
            Ok(())
        }
        Err(e) => Err(format!("obstruction: {}", e)),
    }
}

pub fn embed_suite(seed: u64, count: usize) -> SuiteReport {
    let ring = random::ring(Field::Rationals, &["x"]);
    let mut report = SuiteReport::new("embed", seed);
    for i in 0..count as u64 {
        let mut rng = instance_rng(seed, i);
        let m = random::semifree(&mut rng, &ring, EMBED_SHAPE, SignConvention::Even);
        let outcome = match embed(&m, None) {
            Ok(w) if w.certificate.quasi_iso.certified => soundness(&m, &mut report),
            Ok(_) => Err("embedding not certified".into()),
            Err(e) => Err(e.to_string()),
        };
        report.record(i, outcome);
    }
    report
}

pub fn tot_window(x: &GradedComplex) -> Window {
    let (lo, hi) = tot_degree_span(x).unwrap_or((0, 0));
    Window::new(lo, hi + 2)
}

pub fn internal_window(x: &GradedComplex) -> Window {
    let mut lo = 0;
    let mut hi = 0;
    for i in x.positions() {
        for &t in x.module(i).twists() {
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    Window::new(lo, hi + 3)
}

fn check_functorial(x: &GradedComplex, y: &GradedComplex, report: &mut SuiteReport) -> Result<(), String> {
    for conv in [SignConvention::Even, SignConvention::Koszul] {
        let t = tot(x, conv).map_err(|e| format!("tot ({}): {}", conv.as_str(), e))?;
        t.validate().map_err(|e| format!("tot ({}) invalid: {}", conv.as_str(), e))?;
        let xy = x.tensor(y).map_err(|e| e.to_string())?;
        let w = tot_window(&xy);
        let cert = tensor_compat_check(x, y, conv, w).map_err(|e| format!("tensor ({}): {}", conv.as_str(), e))?;
        if !cert.certified {
            return Err(format!("tensor compatibility not certified ({}) on {}", conv.as_str(), w));
        }
        let tor = tor_decomposition_check(x, y, conv, w).map_err(|e| format!("tor ({}): {}", conv.as_str(), e))?;
        if !tor.agree {
            return Err(format!("tor tables disagree ({}) on {}", conv.as_str(), w));
        }
    }
    let t = tot(x, SignConvention::Even).map_err(|e| e.to_string())?;
    if detot(&t).is_ok() {
        soundness(&t, report)?;
    }
    let w = internal_window(x);
    let table = x.homology_truncated(w);
    let mut carriers: Vec<i64> = table.iter().filter(|(_, d)| **d > 0).map(|((i, _), _)| *i).collect();
    carriers.dedup();
    if carriers.len() <= 1 {
        let n = carriers.first().copied().unwrap_or_else(|| x.support().map_or(0, |s| s.0));
        let rep = concentrated_replacement(x, n, w).map_err(|e| format!("replacement: {}", e))?;
        let (ti, tp, _) = rep.total_reports();
        if !(rep.iota_report.certified && rep.pi_report.certified && ti.certified && tp.certified) {
            return Err(format!("replacement maps are not quasi-isomorphisms on {}", w));
        }
        report.bump("concentrated");
    }
    Ok(())
}

pub fn functorial_suite(seed: u64, count: usize) -> SuiteReport {
    let rings = [random::ring(Field::Rationals, &["x"]), random::ring(Field::Rationals, &["x", "y"])];
    let mut report = SuiteReport::new("functorial", seed);
    for i in 0..count as u64 {
        let mut rng = instance_rng(seed, i);
        let ring = &rings[rng.random_range(0..2)];
        let x = random::complex(&mut rng, ring, COMPLEX_SHAPE);
        let y = random::complex(&mut rng, ring, COMPLEX_SHAPE);
        let outcome = check_functorial(&x, &y, &mut report);
        report.record(i, outcome);
    }
    report
}

fn check_rank3(m: &SemifreeDG, report: &mut SuiteReport) -> Result<(), String> {
    let e = match eliminate_crossing(m, None).map_err(|e| e.to_string())? {
        EliminationOutcome::Success(e) => e,
        EliminationOutcome::Failure(f) => return Err(format!("no crossing-free basis found; stuck at {:?}", f.failed)),
    };
    if !e.change.verify(m, &e.module) {
        return Err("basis change does not conjugate the differential".into());
    }
    let x = detot(&e.module).map_err(|e| format!("detot: {}", e))?;
    let back = tot(&x, m.convention()).map_err(|e| format!("tot: {}", e))?;
    if !equal_up_to_labels(&back, &e.module) {
        return Err("tot of the de-totaled complex differs from the rebased module".into());
    }
    if !e.change.is_identity() {
        report.bump("rebased");
    }
    let case = rank3_classify(&e.module).map_err(|e| format!("classification: {}", e))?.case;
    report.bump(match case {
        Rank3Case::Rank1 => "case_rank1",
        Rank3Case::Rank2 => "case_rank2",
        Rank3Case::Rank3Chain => "case_chain",
        Rank3Case::Rank3Fork => "case_fork",
    });
    soundness(m, report)
}

pub fn rank3_suite(seed: u64, count: usize) -> SuiteReport {
    let ring = random::ring(Field::Rationals, &["x", "y"]);
    let mut report = SuiteReport::new("rank3", seed);
    for i in 0..count as u64 {
        let mut rng = instance_rng(seed, i);
        let m = random::semifree(&mut rng, &ring, RANK3_SHAPE, SignConvention::Even);
        let outcome = check_rank3(&m, &mut report);
        report.record(i, outcome);
    }
    report
}

pub fn oracle_suite(seed: u64, count: usize) -> SuiteReport {
    let ring = random::ring(Field::Rationals, &["x"]);
    let mut report = SuiteReport::new("oracle", seed);
    for i in 0..count as u64 {
        let mut rng = instance_rng(seed, i);
        let p = random::univariate_presentation(&mut rng, &ring, 4, 4);
        let lo = p.target().twists().iter().copied().min().unwrap_or(0);
        let hi = 2 * p.source().twists().iter().copied().max().unwrap_or(0) + 10;
        let w = Window::new(lo, hi);
        let outcome = match (resolve_degreewise(&p, w), resolve_univariate(&p, w)) {
            (Ok(a), _) if !a.certified => Err(format!("degreewise resolution uncertified on {}", w)),
            (Ok(a), Ok(b)) if a.betti_table() == b.betti_table() => Ok(()),
            (Ok(a), Ok(b)) => Err(format!("betti tables differ: {:?} vs {:?}", a.betti_table(), b.betti_table())),
            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
        };
        report.record(i, outcome);
    }
    report
}
