use std::path::PathBuf;

use dgtot::cli::{run, Outcome};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn dgtot(args: &[&str]) -> Outcome {
    run(std::iter::once("dgtot").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut v = args.to_vec();
    v.extend(["--format", "json"]);
    let out = dgtot(&v);
    assert_eq!(out.code, 0, "{:?}", out);
    serde_json::from_str(&out.stdout).unwrap()
}

fn scratch(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("dgtot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).display().to_string()
}

#[test]
fn obstruct_json_carries_the_counterexample_numbers() {
    let out = dgtot(&["obstruct", &fixture("e1_example.dg"), "--format", "json"]);
    assert_eq!(out.code, 0);
    for needle in ["\"rank\":4", "\"betti_sum\":6", "\"verdict\":\"NOT_IN_TOT_IMAGE\""] {
        assert!(out.stdout.contains(needle), "{} missing from {}", needle, out.stdout);
    }
}

#[test]
fn json_reports_are_byte_stable() {
    let args = ["obstruct", &fixture("e1_example.dg"), "--field", "F101", "--format", "json"];
    assert_eq!(dgtot(&args), dgtot(&args));
    let suite = ["suite", "oracle", "--seed", "9", "--count", "5", "--format", "json"];
    assert_eq!(dgtot(&suite), dgtot(&suite));
}

#[test]
fn crossing_elimination_reports_the_new_differential() {
    let v = json(&["crossing", &fixture("ex22.dg"), "--eliminate"]);
    assert_eq!(v["has_crossing"], true);
    assert_eq!(v["unassigned"], serde_json::json!(["e4"]));
    let e = &v["elimination"];
    assert_eq!(e["outcome"], "SUCCESS");
    assert_eq!(e["differentials"]["e4"], "y*z*e2 - x*e3");
    assert_eq!(e["substitutions"][0]["new"], "-z^3*e2 + e4");
    assert_eq!(e["conjugation_verified"], true);
}

#[test]
fn validate_reports_nonzero_square_as_payload() {
    let out = dgtot(&["validate", &fixture("not_square_zero.dg")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("INVALID"));
    let v = json(&["validate", &fixture("not_square_zero.dg")]);
    assert_eq!(v["valid"], false);
    assert_eq!(v["objects"][0]["error"], "differential does not square to zero: d(d e3) = x*y*e1");
}

#[test]
fn exit_codes() {
    assert_eq!(dgtot(&["validate", &fixture("missing.dg")]).code, 1);
    assert_eq!(dgtot(&["obstruct", &fixture("koszul_x.dg")]).code, 1);
    assert_eq!(dgtot(&["embed", &fixture("e1_example.dg")]).code, 1);
    assert_eq!(dgtot(&["obstruct", &fixture("e1_example.dg"), "--window", "0..8"]).code, 2);
    assert_eq!(dgtot(&["suite", "nonsense"]).code, 1);
    assert_eq!(dgtot(&["frobnicate"]).code, 1);
    let bad = scratch("bad.dg");
    std::fs::write(&bad, "ring Q[x]\n\ndgmodule M\nbasis e1:0 e2:1\nd e2 = x*e1\n").unwrap();
    let out = dgtot(&["validate", &bad]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 5, column 8"), "{}", out.stderr);
    let v: Value = serde_json::from_str(&dgtot(&["obstruct", &fixture("e1_example.dg"), "--window", "0..8", "--format", "json"]).stdout).unwrap();
    assert_eq!(v["kind"], "certification");
    assert_eq!(v["suggested_hi"], 11);
}

#[test]
fn detot_then_tot_reproduces_the_rebased_module() {
    let rebased = scratch("rebased.dg");
    let cx = scratch("cx.dg");
    let back = scratch("back.dg");
    assert_eq!(dgtot(&["crossing", &fixture("ex22.dg"), "--eliminate", "-o", &rebased]).code, 0);
    assert_eq!(dgtot(&["detot", &rebased, "-o", &cx]).code, 0);
    let text = std::fs::read_to_string(&cx).unwrap();
    assert!(text.contains("d 1 = [x, y*z]\nd 2 = [y*z; -x]\n"), "{}", text);
    assert_eq!(dgtot(&["tot", &cx, "-o", &back]).code, 0);
    assert_eq!(std::fs::read_to_string(&back).unwrap(), std::fs::read_to_string(&rebased).unwrap());
    // A module with crossing cannot be de-totaled as given.
    assert_eq!(dgtot(&["detot", &fixture("ex22.dg"), "-o", &cx]).code, 1);
}

#[test]
fn univariate_commands() {
    let v = json(&["resolve", &fixture("e3.dg")]);
    assert_eq!(v["torsion"], serde_json::json!([[2, 7], [4, 8]]));
    assert_eq!(v["free"], serde_json::json!([0]));
    let v = json(&["embed", &fixture("e3.dg"), "--window", "0..20"]);
    assert_eq!(v["quasi_isomorphism"], true);
    assert_eq!(v["images"][0]["image"], "x^2*e1 + e2");
    assert_eq!(v["images"][3]["image"], "e4");
    let k = json(&["embed", &fixture("e3.dg"), "--window", "0..20", "--sign-convention", "koszul"]);
    assert_eq!(k["quasi_isomorphism"], true);
}

#[test]
fn complex_commands() {
    let (a, b) = (fixture("koszul_xy.dg"), fixture("koszul_x.dg"));
    for conv in ["even", "koszul"] {
        let v = json(&["tensorcheck", &a, &b, "--sign-convention", conv]);
        assert_eq!(v["certified"], true);
        let v = json(&["torcheck", &a, &b, "--sign-convention", conv]);
        assert_eq!(v["agree"], true);
    }
    let v = json(&["homology", &a]);
    assert_eq!(v["nonzero"], serde_json::json!([{"position": 0, "degree": 0, "dim": 1}]));
    let v = json(&["validate", &fixture("pair.dg")]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["objects"].as_array().unwrap().len(), 3);
}

#[test]
fn homology_of_e1_over_a_prime_field() {
    let v = json(&["homology", &fixture("e1_example.dg"), "--window", "0..20", "--field", "101"]);
    assert_eq!(v["certified"], true);
    assert_eq!(v["relation_degrees"], serde_json::json!([2, 3, 7]));
    assert_eq!(v["generators"][1]["cycle"], "x2^2*e2 - x1*e3");
}
