//! The `dgtot` command line. [`run`] does all the work and returns the exit code with the
//! text to print, so tests can drive it in-process.
//!
//! Exit codes: 0 when a report (including a negative verdict or a failed validation) was
//! produced, 1 for input errors, 2 when the window is too small to certify the result.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dgtot_core::complex::GradedComplex;
use dgtot_core::crossing::{detot, eliminate_crossing, partition, EliminationOutcome, LevelPartition};
use dgtot_core::dg::{dg_homology, SemifreeDG, SignConvention};
use dgtot_core::graded::Window;
use dgtot_core::obstruction::{tot_image_obstruction, Indecomposability, Verdict};
use dgtot_core::totaling::{tensor_compat_check, tor_decomposition_check, tot};
use dgtot_core::univariate::{build_resolution_complex, embed, homology_decompose};
use dgtot_core::{Error, Field};
use serde::Serialize;

use crate::parse::{field_from_str, parse, Document, Object};
use crate::report::*;
use crate::serialize::{complex_text, dgmodule_text, ring_line};
use crate::suites;

#[derive(Parser, Debug)]
#[command(name = "dgtot", version, about = "Totaling of complexes over polynomial rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Degree window LO..HI; each command has its own default.
    #[arg(long, global = true, value_parser = parse_window)]
    pub window: Option<Window>,
    #[arg(long, global = true, value_enum, default_value_t = Convention::Even)]
    pub sign_convention: Convention,
    /// Coefficient field overriding the ring line: Q, F<p> or a prime.
    #[arg(long, global = true, value_parser = field_from_str)]
    pub field: Option<Field>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Name of the object to use when a file holds several.
    #[arg(long, global = true)]
    pub object: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check homogeneity and ∂² = 0 for every object in the file.
    Validate { file: PathBuf },
    /// Homology of a DG module (with a minimal presentation) or of a complex.
    Homology { file: PathBuf },
    /// Level partition of a DG module; optionally search for a crossing-free semibasis.
    Crossing {
        file: PathBuf,
        #[arg(long)]
        eliminate: bool,
        /// Write the rebased module here.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Write the complex whose totaling is the given crossing-free DG module.
    Detot {
        file: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Write the totaling of a complex.
    Tot {
        file: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Decompose the homology of a DG module over k[x] into cyclic summands.
    Resolve { file: PathBuf },
    /// Build and certify a quasi-isomorphism Tot F -> M over k[x].
    Embed { file: PathBuf },
    /// Compare rank with the Betti numbers of the homology.
    Obstruct { file: PathBuf },
    /// Certify Tot(X ⊗ Y) ≅ Tot X ⊗ Tot Y for complexes in two files.
    Tensorcheck { a: PathBuf, b: PathBuf },
    /// Compare homology of Tot X ⊗ Tot Y with the homology of X ⊗ Y.
    Torcheck { a: PathBuf, b: PathBuf },
    /// Run a seeded randomized suite: embed, functorial, rank3 or oracle.
    Suite {
        name: String,
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Even,
    Koszul,
}

impl From<Convention> for SignConvention {
    fn from(c: Convention) -> SignConvention {
        match c {
            Convention::Even => SignConvention::Even,
            Convention::Koszul => SignConvention::Koszul,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, found {:?}", s))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound {:?}", lo))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound {:?}", hi))?;
    if lo > hi {
        return Err(format!("empty window {}..{}", lo, hi));
    }
    Ok(Window::new(lo, hi))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    report: ErrorReport,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure { code: 1, report: ErrorReport { error: msg.into(), kind: "input", suggested_hi: None } }
    }

    fn certification(msg: impl Into<String>, suggested_hi: Option<i64>) -> Failure {
        Failure { code: 2, report: ErrorReport { error: msg.into(), kind: "certification", suggested_hi } }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::WindowTooSmall { suggested_hi, .. } => Failure::certification(e.to_string(), Some(suggested_hi)),
            e => Failure::input(e.to_string()),
        }
    }
}

fn render<R: Serialize + Render>(r: &R, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(r).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => r.text(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let format = cli.format;
    match execute(&cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(f) => {
            let text = render(&f.report, format);
            match format {
                Format::Json => Outcome { code: f.code, stdout: text, stderr: String::new() },
                Format::Text => Outcome { code: f.code, stdout: String::new(), stderr: text },
            }
        }
    }
}

fn load(path: &Path, cli: &Cli) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {}", path.display(), e)))?;
    let doc = parse(&text, cli.field).map_err(|e| Failure::input(format!("{}: {}", path.display(), e)))?;
    Ok(doc.with_convention(cli.sign_convention.into()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {}", path.display(), e)))
}

fn module<'a>(doc: &'a Document, cli: &Cli) -> Result<(&'a str, &'a SemifreeDG), Failure> {
    match doc.dgmodule(cli.object.as_deref()) {
        Some(m) => Ok((&m.name, &m.module)),
        None => Err(Failure::input(match &cli.object {
            Some(n) => format!("no dgmodule named {}", n),
            None => "the file has no dgmodule".to_string(),
        })),
    }
}

fn complex<'a>(doc: &'a Document, name: Option<&str>) -> Result<(&'a str, &'a GradedComplex), Failure> {
    match doc.complex(name) {
        Some(c) => Ok((&c.name, &c.complex)),
        None => Err(Failure::input(match name {
            Some(n) => format!("no complex named {}", n),
            None => "the file has no complex".to_string(),
        })),
    }
}

fn levels(m: &SemifreeDG, p: &LevelPartition) -> (Vec<Vec<String>>, Vec<String>) {
    let name = |is: Vec<usize>| is.into_iter().map(|i| m.labels()[i].clone()).collect::<Vec<_>>();
    let ls = match p.max_level() {
        Some(top) => (0..=top).map(|l| name(p.level(l))).collect(),
        None => Vec::new(),
    };
    (ls, name(p.unassigned()))
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let conv: SignConvention = cli.sign_convention.into();
    let f = cli.format;
    match &cli.command {
        Command::Validate { file } => {
            let doc = load(file, cli)?;
            let mut objects = Vec::new();
            for o in &doc.objects {
                if cli.object.as_deref().is_some_and(|n| n != o.name()) {
                    continue;
                }
                let (res, order) = match o {
                    Object::DgModule(m) => match m.module.validate() {
                        Ok(order) => (Ok(()), Some(order.iter().map(|&i| m.module.labels()[i].clone()).collect())),
                        Err(e) => (Err(e), None),
                    },
                    Object::Complex(c) => (c.complex.validate(), None),
                    Object::Morphism(m) => (m.morphism.validate(), None),
                };
                objects.push(ObjectCheck {
                    object: o.name().to_string(),
                    kind: o.kind().to_string(),
                    valid: res.is_ok(),
                    error: res.err().map(|e| e.to_string()),
                    well_order: order,
                });
            }
            if objects.is_empty() {
                return Err(Failure::input("nothing to validate"));
            }
            let valid = objects.iter().all(|o| o.valid);
            Ok(render(&ValidateReport { command: "validate", valid, objects }, f))
        }
        Command::Homology { file } => {
            let doc = load(file, cli)?;
            let first_is_complex = match &cli.object {
                Some(n) => matches!(doc.object(n), Some(Object::Complex(_))),
                None => matches!(doc.objects.first(), Some(Object::Complex(_))),
            };
            if first_is_complex {
                let (name, x) = complex(&doc, cli.object.as_deref())?;
                x.validate()?;
                let w = cli.window.unwrap_or_else(|| suites::internal_window(x));
                let nonzero = x
                    .homology_truncated(w)
                    .into_iter()
                    .filter(|(_, d)| *d > 0)
                    .map(|((position, degree), dim)| ComplexHomologyEntry { position, degree, dim })
                    .collect();
                return Ok(render(&ComplexHomologyReport { command: "homology", object: name.into(), window: window(w), nonzero }, f));
            }
            let (name, m) = module(&doc, cli)?;
            let w = cli.window.unwrap_or_else(|| m.default_window());
            let h = dg_homology(m, w)?;
            let generators = h
                .generator_degrees
                .iter()
                .zip(&h.cycles)
                .map(|(&degree, c)| HomologyGenerator { degree, cycle: m.format_element(c) })
                .collect();
            let r = DgHomologyReport {
                command: "homology",
                object: name.into(),
                window: window(w),
                certified: h.certified,
                suggested_hi: h.suggested_hi,
                dims: h.dims.clone(),
                generators,
                relation_degrees: h.relation_degrees.clone(),
                presentation: crate::serialize::matrix_text(&h.presentation),
            };
            if !h.certified {
                return Err(Failure::certification(h.to_error().to_string(), h.suggested_hi));
            }
            Ok(render(&r, f))
        }
        Command::Crossing { file, eliminate, o } => {
            let doc = load(file, cli)?;
            let (name, m) = module(&doc, cli)?;
            m.validate()?;
            let p = partition(m);
            let (ls, un) = levels(m, &p);
            let mut report = CrossingReport { command: "crossing", object: name.into(), levels: ls, unassigned: un, has_crossing: p.has_crossing(), elimination: None };
            if *eliminate {
                let (new, part, passes, failed, verified, subs) = match eliminate_crossing(m, None)? {
                    EliminationOutcome::Success(e) => {
                        let ok = e.change.verify(m, &e.module);
                        let subs = e.change.substitutions(m);
                        (e.module, e.partition, e.passes, Vec::new(), ok, subs)
                    }
                    EliminationOutcome::Failure(x) => {
                        let failed = x.failed.iter().map(|(l, _)| l.clone()).collect();
                        (x.module, x.partition, x.passes, failed, false, Vec::new())
                    }
                };
                let (nl, nu) = levels(&new, &part);
                let differentials = (0..new.rank())
                    .filter(|&j| !new.column(j).iter().all(|p| p.is_zero()))
                    .map(|j| (new.labels()[j].clone(), new.format_element(&new.column(j))))
                    .collect();
                if let Some(path) = o {
                    write_file(path, &format!("{}\n\n{}", ring_line(new.ring()), dgmodule_text(name, &new)))?;
                }
                report.elimination = Some(Elimination {
                    outcome: if part.has_crossing() { "FAILURE" } else { "SUCCESS" },
                    passes,
                    substitutions: subs.into_iter().map(|(label, new)| Substitution { label, new }).collect(),
                    differentials,
                    levels: nl,
                    unassigned: nu,
                    has_crossing: part.has_crossing(),
                    conjugation_verified: verified,
                    failed,
                });
            } else if o.is_some() {
                return Err(Failure::input("-o needs --eliminate"));
            }
            Ok(render(&report, f))
        }
        Command::Detot { file, o } => {
            let doc = load(file, cli)?;
            let (name, m) = module(&doc, cli)?;
            let x = detot(m)?;
            write_file(o, &format!("{}\n\n{}", ring_line(m.ring()), complex_text(name, &x)))?;
            let (lo, hi) = x.support().unwrap_or((0, 0));
            let summary = format!("complex {} in positions {}..{}", name, lo, hi);
            Ok(render(&WrittenReport { command: "detot", object: name.into(), output: o.display().to_string(), summary }, f))
        }
        Command::Tot { file, o } => {
            let doc = load(file, cli)?;
            let (name, x) = complex(&doc, cli.object.as_deref())?;
            let m = tot(x, conv)?;
            write_file(o, &format!("{}\n\n{}", ring_line(m.ring()), dgmodule_text(name, &m)))?;
            let summary = format!("dgmodule {} of rank {} ({} signs)", name, m.rank(), conv.as_str());
            Ok(render(&WrittenReport { command: "tot", object: name.into(), output: o.display().to_string(), summary }, f))
        }
        Command::Resolve { file } => {
            let doc = load(file, cli)?;
            let (name, m) = module(&doc, cli)?;
            let w = cli.window.unwrap_or_else(|| m.default_window());
            let d = homology_decompose(m, w)?;
            let res = build_resolution_complex(m.ring(), &d)?;
            let r = ResolveReport {
                command: "resolve",
                object: name.into(),
                window: window(w),
                torsion: d.torsion.iter().map(|&(r, c)| [r, c]).collect(),
                free: d.free.clone(),
                cycles: d.cycles.iter().map(|c| m.format_element(c)).collect(),
                resolution: complex_text("F", &res),
            };
            Ok(render(&r, f))
        }
        Command::Embed { file } => {
            let doc = load(file, cli)?;
            let (name, m) = module(&doc, cli)?;
            let wit = match embed(m, cli.window) {
                Ok(w) => w,
                Err(Error::Invalid(msg)) => return Err(Failure::certification(msg, None)),
                Err(e) => return Err(e.into()),
            };
            let src = &wit.tot_resolution;
            let images = (0..src.rank())
                .map(|j| EmbedImage { generator: src.labels()[j].clone(), degree: src.degrees()[j], image: m.format_element(&wit.morphism.image(j)) })
                .collect();
            let r = EmbedReport {
                command: "embed",
                object: name.into(),
                window: window(wit.certificate.window),
                chain_map: true,
                quasi_isomorphism: wit.certificate.quasi_iso.certified,
                images,
                resolution: complex_text("F", &wit.resolution),
            };
            Ok(render(&r, f))
        }
        Command::Obstruct { file } => {
            let doc = load(file, cli)?;
            let (name, m) = module(&doc, cli)?;
            let w = cli.window.unwrap_or_else(|| m.default_window());
            let o = tot_image_obstruction(m, w)?;
            let detail = match &o.indecomposable {
                Indecomposability::Yes(c) => c.as_str().to_string(),
                Indecomposability::No { .. } => "nontrivial idempotent".to_string(),
                Indecomposability::Indeterminate(why) => why.clone(),
            };
            let r = ObstructReport {
                command: "obstruct",
                object: name.into(),
                field: m.field().to_string(),
                window: window(w),
                rank: o.rank,
                minimal: o.minimal,
                homology_generators: o.homology.generator_degrees.clone(),
                homology_relations: o.homology.relation_degrees.clone(),
                resolution_method: o.resolution.method.as_str(),
                betti: o.resolution.twists.clone(),
                betti_numbers: o.resolution.betti_numbers(),
                betti_sum: o.betti_sum,
                end0_dim: o.end0_dim,
                indecomposable: o.indecomposable.as_str(),
                indecomposable_detail: detail,
                verdict: o.verdict.as_str(),
                hypothesis: match o.verdict {
                    Verdict::Inconclusive(h) => Some(h.as_str()),
                    _ => None,
                },
                degree_profile_match: o.degree_profile_match,
            };
            Ok(render(&r, f))
        }
        Command::Tensorcheck { a, b } => {
            let (x, y) = (load(a, cli)?, load(b, cli)?);
            let (_, x) = complex(&x, None)?;
            let (_, y) = complex(&y, None)?;
            let w = match cli.window {
                Some(w) => w,
                None => suites::tot_window(&x.tensor(y)?),
            };
            let c = tensor_compat_check(x, y, conv, w)?;
            let r = TensorReport {
                command: "tensorcheck",
                convention: conv.as_str(),
                window: window(w),
                rank: c.rank,
                bijective: c.bijective,
                quasi_isomorphism: c.morphism.quasi_iso.certified,
                certified: c.certified,
            };
            Ok(render(&r, f))
        }
        Command::Torcheck { a, b } => {
            let (x, y) = (load(a, cli)?, load(b, cli)?);
            let (_, x) = complex(&x, None)?;
            let (_, y) = complex(&y, None)?;
            let w = match cli.window {
                Some(w) => w,
                None => suites::tot_window(&x.tensor(y)?),
            };
            let t = tor_decomposition_check(x, y, conv, w)?;
            let rows = t.rows.iter().map(|(&degree, &(tot, sum))| TorRow { degree, tot, sum }).collect();
            Ok(render(&TorReport { command: "torcheck", convention: conv.as_str(), window: window(w), rows, agree: t.agree }, f))
        }
        Command::Suite { name, count } => match suites::run(name, cli.seed, *count) {
            Some(r) => Ok(render(&r, f)),
            None => Err(Failure::input(format!("unknown suite {:?}; expected one of {}", name, suites::NAMES.join(", ")))),
        },
    }
}
