//! Canonical text form: the ring line, then each object after a blank line. Polynomials print
//! with terms in descending lexicographic order.

use std::fmt::Write;

use dgtot_core::complex::{ComplexMorphism, GradedComplex};
use dgtot_core::dg::SemifreeDG;
use dgtot_core::graded::GradedMatrix;
use dgtot_core::Ring;

use crate::parse::{Document, Object};

pub fn ring_line(ring: &Ring) -> String {
    format!("ring {}[{}]", ring.field(), ring.vars().join(","))
}

pub fn matrix_text(m: &GradedMatrix) -> String {
    let rows: Vec<String> = m.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")).collect();
    format!("[{}]", rows.join("; "))
}

pub fn dgmodule_text(name: &str, m: &SemifreeDG) -> String {
    let mut out = format!("dgmodule {}\nbasis", name);
    for (l, d) in m.labels().iter().zip(m.degrees()) {
        write!(out, " {}:{}", l, d).unwrap();
    }
    out.push('\n');
    for j in 0..m.rank() {
        let col = m.column(j);
        if col.iter().all(|p| p.is_zero()) {
            continue;
        }
        writeln!(out, "d {} = {}", m.labels()[j], m.format_element(&col)).unwrap();
    }
    out
}

fn int_list(v: &[i64]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

pub fn complex_text(name: &str, x: &GradedComplex) -> String {
    let mut out = format!("complex {}\n", name);
    let positions: Vec<i64> = x.positions().collect();
    for &i in &positions {
        write!(out, "module {} twists {}", i, int_list(x.module(i).twists())).unwrap();
        if x.has_explicit_labels(i) {
            write!(out, " labels [{}]", x.labels(i).join(", ")).unwrap();
        }
        out.push('\n');
    }
    for &i in &positions {
        let d = x.diff(i);
        if !d.is_zero() {
            writeln!(out, "d {} = {}", i, matrix_text(&d)).unwrap();
        }
    }
    out
}

pub fn morphism_text(name: &str, source: &str, target: &str, mu: &ComplexMorphism) -> String {
    let mut out = format!("morphism {} {} -> {}\n", name, source, target);
    for i in mu.positions() {
        let m = mu.component(i);
        if !m.is_zero() {
            writeln!(out, "map {} = {}", i, matrix_text(&m)).unwrap();
        }
    }
    out
}

pub fn object_text(o: &Object) -> String {
    match o {
        Object::DgModule(m) => dgmodule_text(&m.name, &m.module),
        Object::Complex(c) => complex_text(&c.name, &c.complex),
        Object::Morphism(m) => morphism_text(&m.name, &m.source, &m.target, &m.morphism),
    }
}

pub fn to_text(doc: &Document) -> String {
    let mut out = ring_line(&doc.ring);
    out.push('\n');
    for o in &doc.objects {
        out.push('\n');
        out.push_str(&object_text(o));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn canonical_round_trip() {
        let text = "ring Q[x1,x2]\n\ndgmodule E1\nbasis e1:0 e2:3 e3:4 e4:8\nd e2 = x1*x2*e1\nd e3 = x2^3*e1\nd e4 = x1^7*e1 - x2^4*e2 + x1*x2^2*e3\n";
        assert_eq!(to_text(&parse(text, None).unwrap()), text);
        let cx = "ring F7[x,y]\n\ncomplex K\nmodule 0 twists [0]\nmodule 1 twists [1, 1] labels [a, b]\nd 1 = [x, -y]\n\n\
                  complex L\nmodule 0 twists [0]\n\nmorphism f K -> L\nmap 0 = [3]\n";
        assert_eq!(to_text(&parse(cx, None).unwrap()), cx);
    }

    #[test]
    fn normalizes_accepted_input() {
        let messy = "ring Q[x,y]\ndgmodule M\nbasis a:0 b:2 c:5\nd b = y a + x*a\nd c = (x+y)^2 b - 2 x y b\n";
        let once = to_text(&parse(messy, None).unwrap());
        assert_eq!(once, "ring Q[x,y]\n\ndgmodule M\nbasis a:0 b:2 c:5\nd b = (x + y)*a\nd c = (x^2 + y^2)*b\n");
        assert_eq!(to_text(&parse(&once, None).unwrap()), once);
    }
}
