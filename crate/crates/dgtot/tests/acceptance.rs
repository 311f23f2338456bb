//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if
//! any fails. Suites use pinned seeds.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dgtot::cli::{run, Outcome};
use dgtot::parse::parse;
use dgtot::suites::{self, SuiteReport};
use dgtot_core::crossing::{detot, eliminate_crossing, EliminationOutcome};
use dgtot_core::obstruction::{tot_image_obstruction, Verdict};
use dgtot_core::univariate::embed;
use serde_json::{json, Value};

const SEED: u64 = 20240601;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn scratch(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("dgtot-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).display().to_string()
}

fn dgtot(args: &[&str]) -> Outcome {
    run(std::iter::once("dgtot").chain(args.iter().copied()))
}

fn json_of(args: &[&str]) -> Result<Value, String> {
    let mut v = args.to_vec();
    v.extend(["--format", "json"]);
    let out = dgtot(&v);
    if out.code != 0 {
        return Err(format!("{:?} exited {}: {}{}", args, out.code, out.stdout, out.stderr));
    }
    serde_json::from_str(&out.stdout).map_err(|e| e.to_string())
}

fn expect(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn within(t: Instant, limit: u64) -> Result<(), String> {
    let e = t.elapsed();
    expect(e < Duration::from_secs(limit), &format!("took {:.2?}, limit {} s", e, limit))
}

fn counterexample() -> Result<String, String> {
    let t = Instant::now();
    let v = json_of(&["obstruct", &fixture("e1_example.dg"), "--window", "0..20", "--field", "F101"])?;
    expect(v["rank"] == 4, "rank")?;
    expect(v["betti"] == json!([[0, 5], [2, 3, 7], [4]]), "betti twists")?;
    expect(v["betti_sum"] == 6, "betti sum")?;
    expect(v["indecomposable"] == "YES", "indecomposability")?;
    expect(v["verdict"] == "NOT_IN_TOT_IMAGE", "verdict")?;
    within(t, 10)?;
    Ok(format!("rank 4, betti 2+3+1=6, End0 {} ({:.2?})", v["indecomposable_detail"], t.elapsed()))
}

fn crossing_example() -> Result<String, String> {
    let t = Instant::now();
    let v = json_of(&["crossing", &fixture("ex22.dg")])?;
    expect(v["levels"] == json!([["e1"], ["e2", "e3"]]), "levels before")?;
    expect(v["unassigned"] == json!(["e4"]), "e4 unassigned")?;
    expect(v["has_crossing"] == true, "crossing detected")?;
    let v = json_of(&["crossing", &fixture("ex22.dg"), "--eliminate"])?;
    let e = &v["elimination"];
    expect(e["outcome"] == "SUCCESS" && e["has_crossing"] == false, "elimination")?;
    expect(e["unassigned"] == json!([]), "partition covers the basis")?;
    let levels = e["levels"].as_array().ok_or("levels")?;
    expect(levels.len() >= 3 && !levels[2].as_array().unwrap().is_empty(), "E2 nonempty")?;
    expect(e["conjugation_verified"] == true, "conjugation identity")?;
    within(t, 1)?;
    Ok(format!("d e4' = {} ({:.2?})", e["differentials"]["e4"].as_str().unwrap_or("?"), t.elapsed()))
}

fn detot_round_trip() -> Result<String, String> {
    let (rebased, cx, back) = (scratch("rebased.dg"), scratch("cx.dg"), scratch("back.dg"));
    expect(dgtot(&["crossing", &fixture("ex22.dg"), "--eliminate", "-o", &rebased]).code == 0, "rebasing")?;
    let t = Instant::now();
    expect(dgtot(&["detot", &rebased, "-o", &cx]).code == 0, "detot")?;
    let text = std::fs::read_to_string(&cx).map_err(|e| e.to_string())?;
    let doc = parse(&text, None).map_err(|e| e.to_string())?;
    let x = &doc.complex(None).ok_or("no complex written")?.complex;
    expect(x.support() == Some((0, 2)), "three positions")?;
    let d1 = x.diff(1).rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>();
    let d2 = x.diff(2).rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>();
    expect(d1 == [["x", "y*z"]], "d1 = [x, yz]")?;
    expect(d2 == [["y*z"], ["-x"]], "d2 = [yz, -x]^T")?;
    expect(dgtot(&["tot", &cx, "-o", &back]).code == 0, "tot")?;
    let same = std::fs::read_to_string(&back).map_err(|e| e.to_string())? == std::fs::read_to_string(&rebased).map_err(|e| e.to_string())?;
    expect(same, "tot of detot equals the rebased module")?;
    within(t, 1)?;
    Ok(format!("d1 = [x, y*z], d2 = [y*z; -x] ({:.2?})", t.elapsed()))
}

fn univariate_fixture() -> Result<String, String> {
    let t = Instant::now();
    let v = json_of(&["resolve", &fixture("e3.dg"), "--window", "0..20"])?;
    expect(v["torsion"] == json!([[2, 7], [4, 8]]), "torsion pairs")?;
    expect(v["free"] == json!([0]), "free twist")?;
    for conv in ["even", "koszul"] {
        let e = json_of(&["embed", &fixture("e3.dg"), "--window", "0..20", "--sign-convention", conv])?;
        expect(e["chain_map"] == true && e["quasi_isomorphism"] == true, "certificate")?;
        expect(e["window"] == json!([0, 20]), "window")?;
        let image = |g: &str, d: i64| e["images"].as_array().unwrap().iter().find(|i| i["generator"] == g && i["degree"] == d).map(|i| i["image"].clone());
        expect(image("z1", 2) == Some(json!("x^2*e1 + e2")), "sigma^2 1 image")?;
        expect(image("m1", 8) == Some(json!("e4")), "sigma^8 1 image")?;
    }
    within(t, 5)?;
    Ok(format!("torsion (2,7),(4,8), free 0, both sign conventions ({:.2?})", t.elapsed()))
}

fn suite_line(r: &SuiteReport, t: Duration) -> String {
    let counts: Vec<String> = r.counts.iter().map(|(k, v)| format!("{} {}", k, v)).collect();
    format!("{}/{} instances [{}] ({:.2?})", r.passed, r.instances, counts.join(", "), t)
}

fn suite_result(r: &SuiteReport, count: usize, t: Duration, limit: Option<u64>) -> Result<String, String> {
    if let Some(f) = r.failures.first() {
        return Err(format!("instance {}: {} ({} failures)", f.instance, f.message, r.failures.len()));
    }
    expect(r.instances == count && r.ok(), "instance count")?;
    if let Some(l) = limit {
        expect(t < Duration::from_secs(l), &format!("took {:.2?}, limit {} s", t, l))?;
    }
    Ok(suite_line(r, t))
}

fn timed(name: &str, count: usize) -> (SuiteReport, Duration) {
    let t = Instant::now();
    let r = suites::run(name, SEED, Some(count)).expect("known suite");
    (r, t.elapsed())
}

fn soundness(reports: &[&SuiteReport]) -> Result<String, String> {
    let mut checked = 0;
    for name in ["e1_example.dg", "ex22.dg", "e3.dg", "residue_field.dg"] {
        let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        let doc = parse(&text, None).map_err(|e| e.to_string())?;
        let m = &doc.dgmodule(None).ok_or("fixture without module")?.module;
        let embeds = m.ring().nvars() == 1 && embed(m, None).is_ok();
        let detots = detot(m).is_ok()
            || matches!(eliminate_crossing(m, None), Ok(EliminationOutcome::Success(e)) if detot(&e.module).is_ok());
        if embeds || detots {
            let o = tot_image_obstruction(m, m.default_window()).map_err(|e| format!("{}: {}", name, e))?;
            expect(o.verdict != Verdict::NotInTotImage, &format!("{} is constructed yet obstructed", name))?;
            checked += 1;
        }
    }
    let mut uncertified = 0;
    for r in reports {
        if let Some(f) = r.failures.iter().find(|f| f.message.starts_with("obstruction")) {
            return Err(format!("suite {} instance {}: {}", r.suite, f.instance, f.message));
        }
        checked += r.counts.get("soundness_checked").copied().unwrap_or(0);
        uncertified += r.counts.get("soundness_uncertified").copied().unwrap_or(0);
    }
    expect(checked > 0, "nothing checked")?;
    Ok(format!("{} constructed modules checked, {} skipped for window", checked, uncertified))
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: usize, title: &str, r: Result<String, String>| {
        match r {
            Ok(detail) => println!("PASS {} {}: {}", n, title, detail),
            Err(why) => {
                all = false;
                println!("FAIL {} {}: {}", n, title, why)
            }
        }
    };
    report(1, "counterexample obstruction", counterexample());
    report(2, "crossing example", crossing_example());
    report(3, "de-totaling round trip", detot_round_trip());
    report(4, "one-variable fixture", univariate_fixture());
    let (embed_r, embed_t) = timed("embed", 100);
    report(5, "one-variable randomized", suite_result(&embed_r, 100, embed_t, Some(60)));
    let (fun_r, fun_t) = timed("functorial", 50);
    let fun = suite_result(&fun_r, 50, fun_t, Some(120)).and_then(|s| {
        expect(fun_r.counts.get("concentrated").copied().unwrap_or(0) > 0, "no concentrated instance").map(|_| s)
    });
    report(6, "functorial suites", fun);
    let (cor_r, cor_t) = timed("rank3", 100);
    report(7, "rank at most three", suite_result(&cor_r, 100, cor_t, None));
    report(8, "soundness", soundness(&[&embed_r, &fun_r, &cor_r]));
    let (orc_r, orc_t) = timed("oracle", 50);
    report(9, "resolution oracle", suite_result(&orc_r, 50, orc_t, None));
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
