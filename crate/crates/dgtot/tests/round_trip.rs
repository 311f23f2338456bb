use std::path::PathBuf;

use dgtot::parse::parse;
use dgtot::random::{complex, instance_rng, ring, semifree, ComplexShape, ModuleShape};
use dgtot::serialize::{complex_text, dgmodule_text, ring_line, to_text};
use dgtot_core::dg::SignConvention;
use dgtot_core::Field;

#[test]
fn fixtures_normalize_idempotently() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let once = to_text(&parse(&text, None).unwrap());
        assert_eq!(to_text(&parse(&once, None).unwrap()), once, "{}", path.display());
    }
}

#[test]
fn canonical_fixture_is_byte_identical() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/e1_example.dg");
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(to_text(&parse(&text, None).unwrap()), text);
}

#[test]
fn random_objects_survive_serialization() {
    let shape = ModuleShape { max_rank: 5, max_degree: 8, max_entry_degree: 5, zero_prob: 0.1 };
    let cshape = ComplexShape { max_rank: 3, max_positions: 3, max_twist_spread: 2 };
    for field in [Field::Rationals, Field::prime(5).unwrap()] {
        let r = ring(field, &["x", "y"]);
        for i in 0..25 {
            let m = semifree(&mut instance_rng(5, i), &r, shape, SignConvention::Even);
            let text = format!("{}\n\n{}", ring_line(&r), dgmodule_text("M", &m));
            let doc = parse(&text, None).unwrap();
            assert_eq!(doc.dgmodule(None).unwrap().module, m, "{}", text);
            assert_eq!(to_text(&doc), text);

            let x = complex(&mut instance_rng(6, i), &r, cshape);
            let text = format!("{}\n\n{}", ring_line(&r), complex_text("X", &x));
            let doc = parse(&text, None).unwrap();
            assert_eq!(doc.complex(None).unwrap().complex, x, "{}", text);
        }
    }
}

#[test]
fn field_override_reduces_coefficients() {
    let text = "ring Q[x]\n\ndgmodule M\nbasis a:0 b:2\nd b = 7*x*a\n";
    let doc = parse(text, Some(Field::prime(7).unwrap())).unwrap();
    assert!(doc.dgmodule(None).unwrap().module.is_zero_differential());
    assert!(parse("ring Q[x]\n\ndgmodule M\nbasis a:0 b:2\nd b = 1/7*x*a\n", Some(Field::prime(7).unwrap())).is_err());
}
