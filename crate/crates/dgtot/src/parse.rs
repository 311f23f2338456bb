//! Reader for the text format describing DG modules, complexes and morphisms.
//!
//! ```text
//! ring Q[x1,x2]
//!
//! dgmodule E1
//! basis e1:0 e2:3 e3:4 e4:8
//! d e2 = x1*x2*e1
//! d e3 = x2^3*e1
//! d e4 = x1^7*e1 - x2^4*e2 + x1*x2^2*e3
//! ```
//!
//! A file declares one ring followed by any number of objects. Statements end at a newline
//! unless a `[` is still open; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use dgtot_core::complex::{ComplexMorphism, GradedComplex};
use dgtot_core::dg::{SemifreeDG, SignConvention};
use dgtot_core::{Error as CoreError, Field, Poly, PolyRing, Ring};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModule {
    pub name: String,
    pub module: SemifreeDG,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedComplex {
    pub name: String,
    pub complex: GradedComplex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMorphism {
    pub name: String,
    pub source: String,
    pub target: String,
    pub morphism: ComplexMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    DgModule(NamedModule),
    Complex(NamedComplex),
    Morphism(NamedMorphism),
}

impl Object {
    pub fn name(&self) -> &str {
        match self {
            Object::DgModule(m) => &m.name,
            Object::Complex(c) => &c.name,
            Object::Morphism(m) => &m.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Object::DgModule(_) => "dgmodule",
            Object::Complex(_) => "complex",
            Object::Morphism(_) => "morphism",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub ring: Ring,
    pub objects: Vec<Object>,
}

impl Document {
    pub fn new(ring: &Ring) -> Document {
        Document { ring: ring.clone(), objects: Vec::new() }
    }

    pub fn object(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|o| o.name() == name)
    }

    /// The named dgmodule, or the first one when `name` is `None`.
    pub fn dgmodule(&self, name: Option<&str>) -> Option<&NamedModule> {
        self.objects.iter().find_map(|o| match o {
            Object::DgModule(m) if name.is_none_or(|n| n == m.name) => Some(m),
            _ => None,
        })
    }

    pub fn complex(&self, name: Option<&str>) -> Option<&NamedComplex> {
        self.objects.iter().find_map(|o| match o {
            Object::Complex(c) if name.is_none_or(|n| n == c.name) => Some(c),
            _ => None,
        })
    }

    pub fn morphism(&self, name: Option<&str>) -> Option<&NamedMorphism> {
        self.objects.iter().find_map(|o| match o {
            Object::Morphism(m) if name.is_none_or(|n| n == m.name) => Some(m),
            _ => None,
        })
    }

    /// Applies a sign convention to every dgmodule.
    pub fn with_convention(mut self, conv: SignConvention) -> Document {
        for o in &mut self.objects {
            if let Object::DgModule(m) = o {
                m.module = m.module.with_convention(conv);
            }
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "'{}'", s),
            Tok::Sym(s) => write!(f, "'{}'", s),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

const SYMBOLS: [&str; 14] = ["->", "[", "]", ";", ",", ":", "=", "+", "-", "*", "^", "(", ")", "/"];

/// Splits the text into statements of tokens.
fn statements(text: &str) -> Result<Vec<Vec<Spanned>>, ParseError> {
    let mut out = Vec::new();
    let mut current: Vec<Spanned> = Vec::new();
    let mut depth = 0i64;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                current.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line, column });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                current.push(Spanned { tok: Tok::Num(chars[start..i].iter().collect()), line, column });
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                let sym = SYMBOLS.iter().find(|s| rest.starts_with(*s)).ok_or_else(|| err(line, column, format!("unexpected character '{}'", c)))?;
                match *sym {
                    "[" => depth += 1,
                    "]" => depth -= 1,
                    _ => {}
                }
                i += sym.len();
                current.push(Spanned { tok: Tok::Sym(sym), line, column });
            }
        }
        if depth <= 0 && !current.is_empty() {
            out.push(std::mem::take(&mut current));
            depth = 0;
        }
    }
    if !current.is_empty() {
        let s = &current[0];
        return Err(err(s.line, s.column, "unclosed '['"));
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Spanned]) -> Cursor<'a> {
        Cursor { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    /// Position used for errors: the next token, or just past the last one.
    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => self.toks.last().map_or((1, 1), |t| (t.line, t.column + tok_len(&t.tok))),
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(err(l, c, message))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Sym(t), .. }) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(format!("expected '{}'{}", s, self.found()))
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!(", found {}", t.tok),
            None => String::from(", found end of line"),
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a Spanned, ParseError> {
        match self.peek() {
            Some(t @ Spanned { tok: Tok::Ident(_), .. }) => {
                self.pos += 1;
                Ok(t)
            }
            _ => self.fail(format!("expected {}{}", what, self.found())),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_sym("-");
        match self.peek() {
            Some(Spanned { tok: Tok::Num(n), line, column }) => {
                self.pos += 1;
                let v: i64 = n.parse().map_err(|_| err(*line, *column, "integer out of range"))?;
                Ok(if neg { -v } else { v })
            }
            _ => self.fail(format!("expected an integer{}", self.found())),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail(format!("unexpected {} at end of statement", self.peek().unwrap().tok))
        }
    }
}

fn tok_len(t: &Tok) -> usize {
    match t {
        Tok::Ident(s) | Tok::Num(s) => s.chars().count(),
        Tok::Sym(s) => s.len(),
    }
}

fn ident_name(t: &Spanned) -> &str {
    match &t.tok {
        Tok::Ident(s) => s,
        _ => unreachable!("checked by Cursor::ident"),
    }
}

/// A linear combination `Σ p_i * label_i`, or a plain polynomial when `labels` is empty.
struct Combination {
    terms: Vec<(Poly, Option<usize>, (usize, usize))>,
}

struct ExprContext<'a> {
    ring: &'a Ring,
    labels: &'a [String],
}

impl ExprContext<'_> {
    fn sum(&self, c: &mut Cursor) -> Result<Combination, ParseError> {
        let mut terms = Vec::new();
        let mut negate = c.eat_sym("-");
        if !negate {
            c.eat_sym("+");
        }
        loop {
            let here = c.here();
            let (p, label) = self.term(c)?;
            terms.push((if negate { -&p } else { p }, label, here));
            if c.eat_sym("+") {
                negate = false;
            } else if c.eat_sym("-") {
                negate = true;
            } else {
                break;
            }
        }
        Ok(Combination { terms })
    }

    fn starts_factor(c: &Cursor) -> bool {
        matches!(c.peek(), Some(Spanned { tok: Tok::Ident(_) | Tok::Num(_), .. })) || c.is_sym("(")
    }

    fn term(&self, c: &mut Cursor) -> Result<(Poly, Option<usize>), ParseError> {
        let mut poly = Poly::one(self.ring);
        let mut label = None;
        loop {
            let here = c.here();
            match self.factor(c)? {
                Factor::Poly(p) => poly = &poly * &p,
                Factor::Label(l) => {
                    if label.is_some() {
                        return Err(err(here.0, here.1, "a term may contain only one basis element"));
                    }
                    label = Some(l);
                }
            }
            if c.eat_sym("*") || Self::starts_factor(c) {
                continue;
            }
            break;
        }
        Ok((poly, label))
    }

    fn exponent(&self, c: &mut Cursor) -> Result<u32, ParseError> {
        if !c.eat_sym("^") {
            return Ok(1);
        }
        match c.next() {
            Some(Spanned { tok: Tok::Num(n), line, column }) => n.parse().map_err(|_| err(*line, *column, "exponent out of range")),
            _ => {
                c.pos -= 1;
                c.fail(format!("expected an exponent{}", c.found()))
            }
        }
    }

    fn factor(&self, c: &mut Cursor) -> Result<Factor, ParseError> {
        let field = self.ring.field();
        let (line, column) = c.here();
        match c.next().map(|t| &t.tok) {
            Some(Tok::Num(n)) => {
                let num: BigInt = n.parse().expect("digits");
                let den = if c.eat_sym("/") {
                    match c.next() {
                        Some(Spanned { tok: Tok::Num(d), .. }) => d.parse().expect("digits"),
                        _ => {
                            c.pos -= 1;
                            return c.fail(format!("expected a denominator{}", c.found()));
                        }
                    }
                } else {
                    BigInt::from(1)
                };
                let s = field.from_ratio(&num, &den).ok_or_else(|| err(line, column, format!("denominator vanishes in {}", field)))?;
                let p = Poly::constant(self.ring, s);
                let e = self.exponent(c)?;
                Ok(Factor::Poly(p.pow(e)))
            }
            Some(Tok::Ident(name)) => {
                if let Some(v) = self.ring.var_index(name) {
                    let e = self.exponent(c)?;
                    Ok(Factor::Poly(Poly::var_pow(self.ring, v, e)))
                } else if let Some(l) = self.labels.iter().position(|x| x == name) {
                    if c.is_sym("^") {
                        return c.fail("basis elements cannot be raised to a power");
                    }
                    Ok(Factor::Label(l))
                } else if self.labels.is_empty() {
                    Err(err(line, column, format!("unknown variable '{}'", name)))
                } else {
                    Err(err(line, column, format!("'{}' is neither a variable nor a basis element", name)))
                }
            }
            Some(Tok::Sym("(")) => {
                let inner = ExprContext { ring: self.ring, labels: &[] };
                let comb = inner.sum(c)?;
                c.expect_sym(")")?;
                let p = comb.terms.into_iter().fold(Poly::zero(self.ring), |acc, (p, _, _)| &acc + &p);
                let e = self.exponent(c)?;
                Ok(Factor::Poly(p.pow(e)))
            }
            _ => {
                c.pos -= 1;
                c.fail(format!("expected a number, variable or '('{}", c.found()))
            }
        }
    }
}

enum Factor {
    Poly(Poly),
    Label(usize),
}

fn poly_expr(ring: &Ring, c: &mut Cursor) -> Result<Poly, ParseError> {
    let ctx = ExprContext { ring, labels: &[] };
    let comb = ctx.sum(c)?;
    Ok(comb.terms.into_iter().fold(Poly::zero(ring), |acc, (p, _, _)| &acc + &p))
}

fn parse_field(t: &Spanned) -> Result<Field, ParseError> {
    let name = ident_name(t);
    if name == "Q" {
        return Ok(Field::Rationals);
    }
    if let Some(p) = name.strip_prefix('F') {
        if let Ok(p) = p.parse::<u64>() {
            return Field::prime(p).map_err(|e| err(t.line, t.column, e.to_string()));
        }
    }
    Err(err(t.line, t.column, format!("unknown field '{}'; use Q or F<prime>", name)))
}

/// Parses a field name as written in the `ring` line (`Q`, `F101`) or a bare prime.
pub fn field_from_str(s: &str) -> Result<Field, String> {
    if s == "Q" {
        return Ok(Field::Rationals);
    }
    let digits = s.strip_prefix('F').unwrap_or(s);
    let p: u64 = digits.parse().map_err(|_| format!("unknown field '{}'; use Q, F<prime> or a prime", s))?;
    Field::prime(p).map_err(|e| e.to_string())
}

fn parse_ring(stmt: &[Spanned], field_override: Option<Field>) -> Result<Ring, ParseError> {
    let mut c = Cursor::new(stmt);
    let kw = c.ident("'ring'")?;
    if ident_name(kw) != "ring" {
        return Err(err(kw.line, kw.column, format!("expected 'ring', found '{}'", ident_name(kw))));
    }
    let ft = c.ident("a field")?;
    let declared = parse_field(ft)?;
    c.expect_sym("[")?;
    let mut vars = Vec::new();
    loop {
        let v = c.ident("a variable name")?;
        if vars.iter().any(|x| x == ident_name(v)) {
            return Err(err(v.line, v.column, format!("duplicate variable '{}'", ident_name(v))));
        }
        vars.push(ident_name(v).to_string());
        if !c.eat_sym(",") {
            break;
        }
    }
    c.expect_sym("]")?;
    c.end()?;
    PolyRing::new(field_override.unwrap_or(declared), vars).map_err(|e| err(kw.line, kw.column, e.to_string()))
}

fn matrix(ring: &Ring, c: &mut Cursor) -> Result<(Vec<Vec<Poly>>, (usize, usize)), ParseError> {
    let at = c.here();
    c.expect_sym("[")?;
    let mut rows = Vec::new();
    if c.eat_sym("]") {
        return Ok((rows, at));
    }
    loop {
        let mut row = Vec::new();
        loop {
            row.push(poly_expr(ring, c)?);
            if !c.eat_sym(",") {
                break;
            }
        }
        rows.push(row);
        if !c.eat_sym(";") {
            break;
        }
    }
    c.expect_sym("]")?;
    if let Some(w) = rows.first().map(|r| r.len()) {
        if let Some(bad) = rows.iter().position(|r| r.len() != w) {
            return Err(err(at.0, at.1, format!("row {} has {} entries, row 1 has {}", bad + 1, rows[bad].len(), w)));
        }
    }
    Ok((rows, at))
}

fn int_list(c: &mut Cursor) -> Result<Vec<i64>, ParseError> {
    c.expect_sym("[")?;
    let mut out = Vec::new();
    if c.eat_sym("]") {
        return Ok(out);
    }
    loop {
        out.push(c.int()?);
        if !c.eat_sym(",") {
            break;
        }
    }
    c.expect_sym("]")?;
    Ok(out)
}

fn ident_list(c: &mut Cursor) -> Result<Vec<String>, ParseError> {
    c.expect_sym("[")?;
    let mut out = Vec::new();
    if c.eat_sym("]") {
        return Ok(out);
    }
    loop {
        out.push(ident_name(c.ident("a label")?).to_string());
        if !c.eat_sym(",") {
            break;
        }
    }
    c.expect_sym("]")?;
    Ok(out)
}

fn semantic(at: (usize, usize), e: CoreError) -> ParseError {
    err(at.0, at.1, e.to_string())
}

/// Describes a degree problem of `p` against the expected internal degree.
fn degree_problem(p: &Poly, expected: i64) -> Option<String> {
    if p.is_zero() {
        return None;
    }
    match p.homogeneous_degree() {
        None => Some(String::from("is not homogeneous")),
        Some(d) if d as i64 != expected => Some(if expected < 0 {
            format!("has degree {}, but no nonzero entry is allowed (expected degree {})", d, expected)
        } else {
            format!("has degree {}, expected {}", d, expected)
        }),
        Some(_) => None,
    }
}

struct ModuleBuilder {
    name: String,
    at: (usize, usize),
    labels: Vec<String>,
    degrees: Vec<i64>,
    columns: BTreeMap<usize, Vec<Poly>>,
    has_basis: bool,
}

struct ComplexBuilder {
    name: String,
    complex: GradedComplex,
    diffs: Vec<(i64, Vec<Vec<Poly>>, (usize, usize))>,
}

struct MorphismBuilder {
    name: String,
    at: (usize, usize),
    source: String,
    target: String,
    maps: Vec<(i64, Vec<Vec<Poly>>, (usize, usize))>,
}

enum Builder {
    Module(ModuleBuilder),
    Complex(ComplexBuilder),
    Morphism(MorphismBuilder),
}

fn finish(doc: &mut Document, b: Builder, at: (usize, usize)) -> Result<(), ParseError> {
    let ring = doc.ring.clone();
    let obj = match b {
        Builder::Module(mb) => {
            if !mb.has_basis {
                return Err(err(mb.at.0, mb.at.1, format!("dgmodule {} has no basis line", mb.name)));
            }
            let mut m = SemifreeDG::new(&ring, mb.labels, mb.degrees, SignConvention::Even).map_err(|e| semantic(mb.at, e))?;
            for (j, col) in mb.columns {
                m.set_column(j, col).map_err(|e| semantic(mb.at, e))?;
            }
            Object::DgModule(NamedModule { name: mb.name, module: m })
        }
        Builder::Complex(mut cb) => {
            for (i, rows, at) in cb.diffs {
                let src = cb.complex.module(i);
                let tgt = cb.complex.module(i - 1);
                let (nr, nc) = (rows.len(), rows.first().map_or(0, |r| r.len()));
                if (nr, nc) != (tgt.rank(), src.rank()) && !(nr == 0 && (tgt.rank() == 0 || src.rank() == 0)) {
                    return Err(err(at.0, at.1, format!(
                        "d {} must be {}x{} (rows index position {}, columns position {}), found {}x{}",
                        i,
                        tgt.rank(),
                        src.rank(),
                        i - 1,
                        i,
                        nr,
                        nc
                    )));
                }
                for (r, row) in rows.iter().enumerate() {
                    for (c, p) in row.iter().enumerate() {
                        if let Some(problem) = degree_problem(p, src.twists()[c] - tgt.twists()[r]) {
                            return Err(err(at.0, at.1, format!("d {} entry ({}, {}) {}", i, r + 1, c + 1, problem)));
                        }
                    }
                }
                if nr > 0 {
                    cb.complex.set_diff_rows(i, rows).map_err(|e| semantic(at, e))?;
                }
            }
            Object::Complex(NamedComplex { name: cb.name, complex: cb.complex })
        }
        Builder::Morphism(mb) => {
            let find = |n: &str| doc.complex(Some(n)).map(|c| c.complex.clone());
            let src = find(&mb.source).ok_or_else(|| err(mb.at.0, mb.at.1, format!("unknown complex '{}'", mb.source)))?;
            let tgt = find(&mb.target).ok_or_else(|| err(mb.at.0, mb.at.1, format!("unknown complex '{}'", mb.target)))?;
            let mut mu = ComplexMorphism::zero(&src, &tgt);
            for (i, rows, at) in mb.maps {
                let (s, t) = (src.module(i), tgt.module(i));
                let (nr, nc) = (rows.len(), rows.first().map_or(0, |r| r.len()));
                if (nr, nc) != (t.rank(), s.rank()) {
                    return Err(err(at.0, at.1, format!("map {} must be {}x{}, found {}x{}", i, t.rank(), s.rank(), nr, nc)));
                }
                for (r, row) in rows.iter().enumerate() {
                    for (c, p) in row.iter().enumerate() {
                        if let Some(problem) = degree_problem(p, s.twists()[c] - t.twists()[r]) {
                            return Err(err(at.0, at.1, format!("map {} entry ({}, {}) {}", i, r + 1, c + 1, problem)));
                        }
                    }
                }
                if nr > 0 {
                    mu.set_rows(i, rows).map_err(|e| semantic(at, e))?;
                }
            }
            Object::Morphism(NamedMorphism { name: mb.name, source: mb.source, target: mb.target, morphism: mu })
        }
    };
    if doc.object(obj.name()).is_some() {
        return Err(err(at.0, at.1, format!("duplicate object name '{}'", obj.name())));
    }
    doc.objects.push(obj);
    Ok(())
}

/// Parses a document. `field_override` replaces the declared coefficient field.
pub fn parse(text: &str, field_override: Option<Field>) -> Result<Document, ParseError> {
    let stmts = statements(text)?;
    let Some((first, rest)) = stmts.split_first() else {
        return Err(err(1, 1, "empty input: expected a ring declaration"));
    };
    let ring = parse_ring(first, field_override)?;
    let mut doc = Document::new(&ring);
    let mut current: Option<(Builder, (usize, usize))> = None;
    for stmt in rest {
        let mut c = Cursor::new(stmt);
        let kw = c.ident("a keyword")?;
        let at = (kw.line, kw.column);
        match ident_name(kw) {
            "dgmodule" | "complex" | "morphism" => {
                if let Some((b, b_at)) = current.take() {
                    finish(&mut doc, b, b_at)?;
                }
                let name = ident_name(c.ident("an object name")?).to_string();
                let builder = match ident_name(kw) {
                    "dgmodule" => Builder::Module(ModuleBuilder {
                        name,
                        at,
                        labels: Vec::new(),
                        degrees: Vec::new(),
                        columns: BTreeMap::new(),
                        has_basis: false,
                    }),
                    "complex" => Builder::Complex(ComplexBuilder { name, complex: GradedComplex::new(&ring), diffs: Vec::new() }),
                    _ => {
                        let source = ident_name(c.ident("a source complex")?).to_string();
                        c.expect_sym("->")?;
                        let target = ident_name(c.ident("a target complex")?).to_string();
                        Builder::Morphism(MorphismBuilder { name, at, source, target, maps: Vec::new() })
                    }
                };
                current = Some((builder, at));
                c.end()?;
            }
            "basis" => {
                let Some(Builder::Module(mb)) = current.as_mut().map(|c| &mut c.0) else {
                    return Err(err(at.0, at.1, "'basis' outside a dgmodule"));
                };
                if mb.has_basis {
                    return Err(err(at.0, at.1, "second 'basis' line"));
                }
                if c.at_end() {
                    return c.fail("basis needs at least one generator");
                }
                while !c.at_end() {
                    let l = c.ident("a basis label")?;
                    let name = ident_name(l).to_string();
                    if ring.var_index(&name).is_some() {
                        return Err(err(l.line, l.column, format!("'{}' is a ring variable", name)));
                    }
                    if mb.labels.contains(&name) {
                        return Err(err(l.line, l.column, format!("duplicate basis element '{}'", name)));
                    }
                    c.expect_sym(":")?;
                    let d = c.int()?;
                    mb.labels.push(name);
                    mb.degrees.push(d);
                }
                mb.has_basis = true;
            }
            "d" => match current.as_mut().map(|c| &mut c.0) {
                Some(Builder::Module(mb)) => {
                    if !mb.has_basis {
                        return Err(err(at.0, at.1, "'d' before 'basis'"));
                    }
                    let lt = c.ident("a basis element")?;
                    let j = mb
                        .labels
                        .iter()
                        .position(|x| x == ident_name(lt))
                        .ok_or_else(|| err(lt.line, lt.column, format!("unknown basis element '{}'", ident_name(lt))))?;
                    if mb.columns.contains_key(&j) {
                        return Err(err(lt.line, lt.column, format!("second differential for '{}'", mb.labels[j])));
                    }
                    c.expect_sym("=")?;
                    let mut col = vec![Poly::zero(&ring); mb.labels.len()];
                    let zero_literal = matches!(stmt.get(c.pos), Some(Spanned { tok: Tok::Num(n), .. }) if n == "0") && c.pos + 1 == stmt.len();
                    if zero_literal {
                        c.pos += 1;
                    } else {
                        let ctx = ExprContext { ring: &ring, labels: &mb.labels };
                        let comb = ctx.sum(&mut c)?;
                        let mut first_at: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
                        for (p, l, here) in comb.terms {
                            let Some(i) = l else {
                                return Err(err(here.0, here.1, "term without a basis element"));
                            };
                            first_at.entry(i).or_insert(here);
                            col[i] = &col[i] + &p;
                        }
                        for (i, p) in col.iter().enumerate() {
                            let expected = mb.degrees[j] - mb.degrees[i] - 1;
                            if let Some(problem) = degree_problem(p, expected) {
                                let here = first_at[&i];
                                return Err(err(here.0, here.1, format!("coefficient of {} in d {} {}", mb.labels[i], mb.labels[j], problem)));
                            }
                        }
                    }
                    c.end()?;
                    mb.columns.insert(j, col);
                }
                Some(Builder::Complex(cb)) => {
                    let i = c.int()?;
                    c.expect_sym("=")?;
                    let (rows, mat_at) = matrix(&ring, &mut c)?;
                    c.end()?;
                    if cb.diffs.iter().any(|d| d.0 == i) {
                        return Err(err(at.0, at.1, format!("second differential at position {}", i)));
                    }
                    cb.diffs.push((i, rows, mat_at));
                }
                _ => return Err(err(at.0, at.1, "'d' outside a dgmodule or complex")),
            },
            "module" => {
                let Some(Builder::Complex(cb)) = current.as_mut().map(|c| &mut c.0) else {
                    return Err(err(at.0, at.1, "'module' outside a complex"));
                };
                let i = c.int()?;
                let kw2 = c.ident("'twists'")?;
                if ident_name(kw2) != "twists" {
                    return Err(err(kw2.line, kw2.column, format!("expected 'twists', found '{}'", ident_name(kw2))));
                }
                let twists = int_list(&mut c)?;
                let labels = if c.at_end() {
                    None
                } else {
                    let kw3 = c.ident("'labels'")?;
                    if ident_name(kw3) != "labels" {
                        return Err(err(kw3.line, kw3.column, format!("expected 'labels', found '{}'", ident_name(kw3))));
                    }
                    Some(ident_list(&mut c)?)
                };
                c.end()?;
                if !cb.complex.module(i).twists().is_empty() {
                    return Err(err(at.0, at.1, format!("position {} declared twice", i)));
                }
                if !cb.diffs.is_empty() {
                    return Err(err(at.0, at.1, "modules must be declared before differentials"));
                }
                cb.complex.set_module(i, twists, labels).map_err(|e| semantic(at, e))?;
            }
            "map" => {
                let Some(Builder::Morphism(mb)) = current.as_mut().map(|c| &mut c.0) else {
                    return Err(err(at.0, at.1, "'map' outside a morphism"));
                };
                let i = c.int()?;
                c.expect_sym("=")?;
                let (rows, mat_at) = matrix(&ring, &mut c)?;
                c.end()?;
                if mb.maps.iter().any(|d| d.0 == i) {
                    return Err(err(at.0, at.1, format!("second map at position {}", i)));
                }
                mb.maps.push((i, rows, mat_at));
            }
            "ring" => return Err(err(at.0, at.1, "only one ring declaration is allowed")),
            other => return Err(err(at.0, at.1, format!("unknown statement '{}'", other))),
        }
    }
    match current {
        Some((b, b_at)) => finish(&mut doc, b, b_at)?,
        None => {
            let (l, c) = rest.last().or(Some(first)).and_then(|s| s.last()).map_or((1, 1), |t| (t.line, t.column));
            return Err(err(l, c, "expected at least one dgmodule, complex or morphism"));
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const E1: &str = "ring Q[x1,x2]\n\ndgmodule E1\nbasis e1:0 e2:3 e3:4 e4:8\nd e2 = x1*x2*e1\nd e3 = x2^3*e1\nd e4 = x1^7*e1 - x2^4*e2 + x1*x2^2*e3\n";

    #[test]
    fn reads_e1() {
        let doc = parse(E1, None).unwrap();
        let m = &doc.dgmodule(None).unwrap().module;
        assert_eq!(m.degrees(), &[0, 3, 4, 8]);
        assert_eq!(m.entry(1, 3).to_string(), "-x2^4");
        assert!(m.validate().is_ok());
    }

    #[test]
    fn juxtaposition_and_parentheses() {
        let text = "ring Q[x,y]\ndgmodule M\nbasis a:0 b:2\nd b = (x + y)^2 a / 1\n";
        assert!(parse(text, None).is_err());
        let text = "ring Q[x,y]\ndgmodule M\nbasis a:0 b:3\nd b = 1/2 x y a - (x - y)*x*a\n";
        let doc = parse(text, None).unwrap();
        assert_eq!(doc.dgmodule(None).unwrap().module.entry(0, 1).to_string(), "-x^2 + 3/2*x*y");
    }

    #[test]
    fn degree_mismatch_is_reported_with_degrees() {
        let text = "ring Q[x]\ndgmodule M\nbasis e1:0 e2:1\nd e2 = x*e1\n";
        let e = parse(text, None).unwrap_err();
        assert_eq!((e.line, e.column), (4, 8));
        assert_eq!(e.message, "coefficient of e1 in d e2 has degree 1, expected 0");
    }

    #[test]
    fn empty_basis_is_a_syntax_error() {
        let e = parse("ring Q[x]\ndgmodule M\nbasis\n", None).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("at least one generator"));
    }

    #[test]
    fn complex_and_morphism() {
        let text = "ring F7[x,y]\ncomplex K\nmodule 0 twists [0]\nmodule 1 twists [1, 1]\nd 1 = [x, y]\n\
                    complex L\nmodule 0 twists [0]\nmorphism f K -> L\nmap 0 = [3]\n";
        let doc = parse(text, None).unwrap();
        assert_eq!(doc.objects.len(), 3);
        let f = doc.morphism(None).unwrap();
        assert_eq!(f.morphism.component(0).entry(0, 0).to_string(), "3");
        let bad = "ring Q[x]\ncomplex K\nmodule 0 twists [0]\nmodule 1 twists [1]\nd 1 = [x^2]\n";
        let e = parse(bad, None).unwrap_err();
        assert_eq!(e.message, "d 1 entry (1, 1) has degree 2, expected 1");
    }

    #[test]
    fn multiline_matrices_and_comments() {
        let text = "# header\nring Q[x]\ncomplex K  # trailing\nmodule 0 twists [0, 1]\nmodule 1 twists [2]\nd 1 = [x^2;\n  x]\n";
        let doc = parse(text, None).unwrap();
        assert_eq!(doc.complex(None).unwrap().complex.diff(1).entry(1, 0).to_string(), "x");
    }

    #[test]
    fn unknown_identifier_position() {
        let e = parse("ring Q[x]\ndgmodule M\nbasis e1:0 e2:2\nd e2 = z*e1\n", None).unwrap_err();
        assert_eq!((e.line, e.column), (4, 8));
    }

    #[test]
    fn field_override() {
        let doc = parse(E1, Some(Field::Prime(101))).unwrap();
        assert_eq!(doc.ring.field(), Field::Prime(101));
        assert_eq!(field_from_str("F101"), Ok(Field::Prime(101)));
        assert!(field_from_str("F100").is_err());
    }
}
