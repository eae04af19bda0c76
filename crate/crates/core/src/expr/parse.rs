//! Line-oriented text format for charts, polynomials, forms, multivectors,
//! distributions, cohomology data and scenario headers.
//!
//! ```text
//! chart R4 (x1 x2 x3 x4)
//! scalar f: x1^2 - 1/2*x3
//! form a: (-x2)*dx1 + (1)*dx3
//! bivector pi: (1)*e1^e2 + (x2)*e3^e4
//! distribution D: kernel a
//! ring CP5 (t) top 5
//! bundle nu: complex 1 chern (1 + 2*t)
//! ```
//!
//! `dx<i>` / `e<i>` address the i-th coordinate (1-based); `d<coord>` and
//! `e_<coord>` address a coordinate by name. Previously defined forms,
//! multivectors and scalars may be referenced by name. `#` starts a comment.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::num::fmt_rational;
use super::{Chart, Rational, Scalar};
use crate::cartan::{CartanError, DiffForm, Graded, Kind, Multivector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("`{name}` lives on chart {found}, expected {expected}")]
    ChartMismatch {
        name: String,
        expected: String,
        found: String,
    },
    #[error("degree {degree} exceeds chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("no chart declared before this definition")]
    NoChart,
    #[error("no cohomology ring declared before this bundle")]
    NoRing,
    #[error("`{0}` is already defined")]
    Duplicate(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

/// Model open manifolds known to the homotopy engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifoldSpec {
    Euclidean(usize),
    SphereMinusPoint(usize),
    Sphere(usize),
    ProductWithLine(Box<ManifoldSpec>),
}

impl ManifoldSpec {
    pub fn dim(&self) -> usize {
        match self {
            ManifoldSpec::Euclidean(n) | ManifoldSpec::SphereMinusPoint(n) | ManifoldSpec::Sphere(n) => *n,
            ManifoldSpec::ProductWithLine(b) => b.dim() + 1,
        }
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldSpec::Euclidean(n) => write!(f, "euclidean {n}"),
            ManifoldSpec::SphereMinusPoint(n) => write!(f, "sphere-minus-point {n}"),
            ManifoldSpec::Sphere(n) => write!(f, "sphere {n}"),
            ManifoldSpec::ProductWithLine(b) => write!(f, "product-line {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSpec {
    pub name: String,
    pub period: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioHeader {
    pub name: Option<String>,
    pub manifold: Option<ManifoldSpec>,
    pub rho: Option<Rational>,
    pub bbox: Option<(Rational, Rational)>,
    pub times: Option<Vec<Rational>>,
    pub cycles: Vec<CycleSpec>,
    pub epsilon: Option<Rational>,
    pub density: Option<String>,
    pub foliation: Option<String>,
    pub omega0: Option<String>,
    pub phi: Option<String>,
}

impl ScenarioHeader {
    pub fn is_empty(&self) -> bool {
        self == &ScenarioHeader::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    Kernel(Vec<DiffForm>),
    Span(Vec<Multivector>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionDecl {
    pub chart: Arc<Chart>,
    pub members: Vec<String>,
    pub presentation: Presentation,
}

/// `Q[gen]/(gen^{top+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingDecl {
    pub generator: String,
    pub top: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleKindDecl {
    Complex {
        chern: Vec<Rational>,
    },
    Real {
        pontryagin: Vec<Rational>,
        euler: Option<Vec<Rational>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleDecl {
    pub ring: String,
    pub rank: usize,
    pub kind: BundleKindDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItemValue {
    Scalar(Scalar),
    Form(DiffForm),
    Multivector(Multivector),
    Bivector(Multivector),
    Distribution(DistributionDecl),
    Ring(RingDecl),
    Bundle(BundleDecl),
}

impl ItemValue {
    /// DSL keyword that introduces this kind of item.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ItemValue::Scalar(_) => "scalar",
            ItemValue::Form(_) => "form",
            ItemValue::Multivector(_) => "multivector",
            ItemValue::Bivector(_) => "bivector",
            ItemValue::Distribution(_) => "distribution",
            ItemValue::Ring(_) => "ring",
            ItemValue::Bundle(_) => "bundle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub name: String,
    pub value: ItemValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Chart(Arc<Chart>),
    Item(Item),
}

/// Fully resolved contents of a DSL file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub statements: Vec<Statement>,
    pub header: ScenarioHeader,
}

impl Document {
    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Item(i) => Some(i),
            Statement::Chart(_) => None,
        })
    }

    pub fn charts(&self) -> impl Iterator<Item = &Arc<Chart>> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Chart(c) => Some(c),
            Statement::Item(_) => None,
        })
    }

    pub fn get(&self, name: &str) -> Option<&ItemValue> {
        self.items().find(|i| i.name == name).map(|i| &i.value)
    }

    pub fn form(&self, name: &str) -> Option<&DiffForm> {
        match self.get(name)? {
            ItemValue::Form(f) => Some(f),
            _ => None,
        }
    }

    /// First bivector (declared with `bivector`, or a degree-2 multivector).
    pub fn bivector(&self, name: Option<&str>) -> Option<(&str, &Multivector)> {
        self.items().find_map(|i| match &i.value {
            ItemValue::Bivector(m) | ItemValue::Multivector(m)
                if m.degree() == 2 && name.map_or(true, |n| n == i.name) =>
            {
                Some((i.name.as_str(), m))
            }
            _ => None,
        })
    }

    pub fn distribution(&self, name: Option<&str>) -> Option<(&str, &DistributionDecl)> {
        self.items().find_map(|i| match &i.value {
            ItemValue::Distribution(d) if name.map_or(true, |n| n == i.name) => Some((i.name.as_str(), d)),
            _ => None,
        })
    }

    /// First form of the given degree, or the named one.
    pub fn form_of_degree(&self, degree: usize, name: Option<&str>) -> Option<(&str, &DiffForm)> {
        self.items().find_map(|i| match &i.value {
            ItemValue::Form(f) if name.map_or(f.degree() == degree, |n| n == i.name) => {
                Some((i.name.as_str(), f))
            }
            _ => None,
        })
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                col,
            });
        } else if "()+-*/^:,=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(ParseError {
                line: line_no,
                col,
                kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        col: chars.len() + 1,
    });
    Ok(out)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of line".to_string(),
    }
}

// ---------------------------------------------------------------------------
// parser

struct Parser {
    statements: Vec<Statement>,
    names: HashMap<String, usize>,
    chart: Option<Arc<Chart>>,
    ring: Option<(String, RingDecl)>,
    header: ScenarioHeader,
    header_refs: Vec<(String, usize, usize)>,
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col(),
            kind,
        }
    }

    fn err_at(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            col,
            kind,
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        self.err(ParseErrorKind::Syntax(format!(
            "expected {what}, found {}",
            describe(self.peek())
        )))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, col))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn usize(&mut self, what: &str) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let col = self.col();
                self.bump();
                n.to_usize()
                    .ok_or_else(|| self.err_at(col, ParseErrorKind::InvalidValue(format!("{n} is too large"))))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.peek() == &Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }
}

fn map_cartan(e: CartanError) -> ParseErrorKind {
    match e {
        CartanError::ChartMismatch { left, right } => ParseErrorKind::ChartMismatch {
            name: right.clone(),
            expected: left,
            found: right,
        },
        CartanError::DegreeMismatch { expected, found } => ParseErrorKind::DegreeMismatch { expected, found },
        CartanError::IndexOutOfRange { index, dim } => {
            ParseErrorKind::InvalidValue(format!("index {index} out of range for dimension {dim}"))
        }
        other => ParseErrorKind::InvalidValue(other.to_string()),
    }
}

fn digits_index(rest: &str) -> Option<usize> {
    if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
        rest.parse().ok()
    } else {
        None
    }
}

impl Parser {
    fn new() -> Self {
        Parser {
            statements: Vec::new(),
            names: HashMap::new(),
            chart: None,
            ring: None,
            header: ScenarioHeader::default(),
            header_refs: Vec::new(),
        }
    }

    fn lookup(&self, name: &str) -> Option<&ItemValue> {
        self.names.get(name).map(|&i| match &self.statements[i] {
            Statement::Item(it) => &it.value,
            Statement::Chart(_) => unreachable!("names only index items"),
        })
    }

    fn define(&mut self, cur: &Cursor, col: usize, name: String, value: ItemValue) -> Result<(), ParseError> {
        if self.names.contains_key(&name) {
            return Err(cur.err_at(col, ParseErrorKind::Duplicate(name)));
        }
        self.names.insert(name.clone(), self.statements.len());
        self.statements.push(Statement::Item(Item { name, value }));
        Ok(())
    }

    fn current_chart(&self, cur: &Cursor) -> Result<Arc<Chart>, ParseError> {
        self.chart.clone().ok_or_else(|| cur.err(ParseErrorKind::NoChart))
    }

    fn line(&mut self, text: &str, line_no: usize) -> Result<(), ParseError> {
        let trimmed = text.split('#').next().unwrap_or("");
        if trimmed.trim().is_empty() {
            return Ok(());
        }
        let first = trimmed.split_whitespace().next().unwrap_or("");
        const HEADER: [&str; 11] = [
            "scenario", "manifold", "rho", "box", "times", "cycle", "epsilon", "density", "foliation",
            "omega0", "phi",
        ];
        if HEADER.contains(&first) {
            return self.header_line(trimmed, line_no);
        }
        let toks = lex(trimmed, line_no)?;
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: line_no,
        };
        let (kw, kw_col) = cur.ident("a statement keyword")?;
        match kw.as_str() {
            "chart" => self.chart_stmt(&mut cur),
            "scalar" => {
                let (name, col) = cur.ident("a name")?;
                cur.expect(':')?;
                let chart = self.current_chart(&cur)?;
                let p = self.poly(&mut cur, &chart)?;
                cur.end()?;
                self.define(&cur, col, name, ItemValue::Scalar(p))
            }
            "form" => {
                let (name, col) = cur.ident("a name")?;
                cur.expect(':')?;
                let chart = self.current_chart(&cur)?;
                let f = self.graded_sum(&mut cur, &chart, &|p: &Parser, id: &str, ch: &Arc<Chart>| {
                    p.resolve_form(id, ch)
                })?;
                cur.end()?;
                self.define(&cur, col, name, ItemValue::Form(f))
            }
            "multivector" | "bivector" => {
                let (name, col) = cur.ident("a name")?;
                cur.expect(':')?;
                let chart = self.current_chart(&cur)?;
                let start = cur.col();
                let m = self.graded_sum(&mut cur, &chart, &|p: &Parser, id: &str, ch: &Arc<Chart>| {
                    p.resolve_vector(id, ch)
                })?;
                cur.end()?;
                if kw == "bivector" {
                    if m.degree() != 2 {
                        return Err(cur.err_at(
                            start,
                            ParseErrorKind::DegreeMismatch {
                                expected: 2,
                                found: m.degree(),
                            },
                        ));
                    }
                    self.define(&cur, col, name, ItemValue::Bivector(m))
                } else {
                    self.define(&cur, col, name, ItemValue::Multivector(m))
                }
            }
            "distribution" => self.distribution_stmt(&mut cur),
            "ring" => self.ring_stmt(&mut cur),
            "bundle" => self.bundle_stmt(&mut cur),
            _ => Err(cur.err_at(kw_col, ParseErrorKind::Syntax(format!("unknown statement `{kw}`")))),
        }
    }

    fn chart_stmt(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (name, col) = cur.ident("a chart name")?;
        cur.expect('(')?;
        let mut coords = Vec::new();
        loop {
            if cur.eat(')') {
                break;
            }
            let (c, ccol) = cur.ident("a coordinate name or `)`")?;
            if coords.contains(&c) {
                return Err(cur.err_at(ccol, ParseErrorKind::Duplicate(c)));
            }
            coords.push(c);
            cur.eat(',');
        }
        cur.end()?;
        if self.statements.iter().any(|s| matches!(s, Statement::Chart(c) if c.name() == name)) {
            return Err(cur.err_at(col, ParseErrorKind::Duplicate(name)));
        }
        let chart = Chart::new(name, coords)
            .map_err(|e| cur.err_at(col, ParseErrorKind::InvalidValue(e.to_string())))?;
        self.chart = Some(chart.clone());
        self.statements.push(Statement::Chart(chart));
        Ok(())
    }

    fn distribution_stmt(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (name, col) = cur.ident("a name")?;
        cur.expect(':')?;
        let chart = self.current_chart(cur)?;
        let (mode, mode_col) = cur.ident("`kernel` or `span`")?;
        let mut members = Vec::new();
        let mut forms = Vec::new();
        let mut vectors = Vec::new();
        loop {
            let (m, mcol) = cur.ident("a form or vector field name")?;
            let value = self
                .lookup(&m)
                .ok_or_else(|| cur.err_at(mcol, ParseErrorKind::UnknownIdentifier(m.clone())))?;
            let (item_chart, degree) = match (mode.as_str(), value) {
                ("kernel", ItemValue::Form(f)) => {
                    forms.push(f.clone());
                    (f.chart().clone(), f.degree())
                }
                ("span", ItemValue::Multivector(v)) => {
                    vectors.push(v.clone());
                    (v.chart().clone(), v.degree())
                }
                ("kernel" | "span", _) => {
                    return Err(cur.err_at(
                        mcol,
                        ParseErrorKind::InvalidValue(format!("`{m}` has the wrong kind for `{mode}`")),
                    ))
                }
                _ => {
                    return Err(cur.err_at(
                        mode_col,
                        ParseErrorKind::Syntax(format!("expected `kernel` or `span`, found `{mode}`")),
                    ))
                }
            };
            if item_chart != chart {
                return Err(cur.err_at(
                    mcol,
                    ParseErrorKind::ChartMismatch {
                        name: m,
                        expected: chart.name().to_string(),
                        found: item_chart.name().to_string(),
                    },
                ));
            }
            if degree != 1 {
                return Err(cur.err_at(mcol, ParseErrorKind::DegreeMismatch { expected: 1, found: degree }));
            }
            members.push(m);
            if !cur.eat(',') {
                break;
            }
        }
        cur.end()?;
        let presentation = if mode == "kernel" {
            Presentation::Kernel(forms)
        } else {
            Presentation::Span(vectors)
        };
        self.define(
            cur,
            col,
            name,
            ItemValue::Distribution(DistributionDecl {
                chart,
                members,
                presentation,
            }),
        )
    }

    fn ring_stmt(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (name, col) = cur.ident("a ring name")?;
        cur.expect('(')?;
        let (generator, _) = cur.ident("a generator name")?;
        cur.expect(')')?;
        let (kw, kwcol) = cur.ident("`top`")?;
        if kw != "top" {
            return Err(cur.err_at(kwcol, ParseErrorKind::Syntax(format!("expected `top`, found `{kw}`"))));
        }
        let top = cur.usize("the top power")?;
        cur.end()?;
        let decl = RingDecl { generator, top };
        self.ring = Some((name.clone(), decl.clone()));
        self.define(cur, col, name, ItemValue::Ring(decl))
    }

    fn ring_poly(&self, cur: &mut Cursor, ring: &RingDecl) -> Result<Vec<Rational>, ParseError> {
        let chart = Chart::new("ring", vec![ring.generator.clone()]).expect("single coordinate");
        cur.expect('(')?;
        let p = self.poly(cur, &chart)?;
        cur.expect(')')?;
        let mut coeffs = vec![Rational::zero(); ring.top + 1];
        for (m, c) in p.terms() {
            let e = m.exponents()[0] as usize;
            if e <= ring.top {
                coeffs[e] = c.clone();
            }
        }
        Ok(coeffs)
    }

    fn bundle_stmt(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (name, col) = cur.ident("a bundle name")?;
        cur.expect(':')?;
        let (ring_name, ring) = self.ring.clone().ok_or_else(|| cur.err(ParseErrorKind::NoRing))?;
        let (kind, kcol) = cur.ident("`complex` or `real`")?;
        let rank = cur.usize("a rank")?;
        let kind = match kind.as_str() {
            "complex" => {
                let (kw, c) = cur.ident("`chern`")?;
                if kw != "chern" {
                    return Err(cur.err_at(c, ParseErrorKind::Syntax(format!("expected `chern`, found `{kw}`"))));
                }
                BundleKindDecl::Complex {
                    chern: self.ring_poly(cur, &ring)?,
                }
            }
            "real" => {
                let (kw, c) = cur.ident("`pontryagin`")?;
                if kw != "pontryagin" {
                    return Err(cur.err_at(
                        c,
                        ParseErrorKind::Syntax(format!("expected `pontryagin`, found `{kw}`")),
                    ));
                }
                let pontryagin = self.ring_poly(cur, &ring)?;
                let euler = if let Tok::Ident(s) = cur.peek() {
                    if s != "euler" {
                        return Err(cur.unexpected("`euler` or end of line"));
                    }
                    cur.bump();
                    Some(self.ring_poly(cur, &ring)?)
                } else {
                    None
                };
                BundleKindDecl::Real { pontryagin, euler }
            }
            _ => {
                return Err(cur.err_at(
                    kcol,
                    ParseErrorKind::Syntax(format!("expected `complex` or `real`, found `{kind}`")),
                ))
            }
        };
        cur.end()?;
        self.define(
            cur,
            col,
            name,
            ItemValue::Bundle(BundleDecl {
                ring: ring_name,
                rank,
                kind,
            }),
        )
    }

    // -- polynomials --------------------------------------------------------

    fn poly(&self, cur: &mut Cursor, chart: &Arc<Chart>) -> Result<Scalar, ParseError> {
        let mut acc = self.poly_term(cur, chart)?;
        loop {
            if cur.eat('+') {
                acc = &acc + &self.poly_term(cur, chart)?;
            } else if cur.eat('-') {
                acc = &acc - &self.poly_term(cur, chart)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn poly_term(&self, cur: &mut Cursor, chart: &Arc<Chart>) -> Result<Scalar, ParseError> {
        let mut acc = self.poly_unary(cur, chart)?;
        loop {
            if cur.eat('*') {
                acc = &acc * &self.poly_unary(cur, chart)?;
            } else if cur.peek() == &Tok::Sym('/') {
                cur.bump();
                let col = cur.col();
                let d = self.poly_unary(cur, chart)?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::from_integer(1.into()) / c)),
                    Some(_) => return Err(cur.err_at(col, ParseErrorKind::InvalidValue("division by zero".into()))),
                    None => {
                        return Err(cur.err_at(
                            col,
                            ParseErrorKind::InvalidValue("division by a non-constant polynomial".into()),
                        ))
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn poly_unary(&self, cur: &mut Cursor, chart: &Arc<Chart>) -> Result<Scalar, ParseError> {
        if cur.eat('-') {
            return Ok(-&self.poly_unary(cur, chart)?);
        }
        if cur.eat('+') {
            return self.poly_unary(cur, chart);
        }
        let base = self.poly_atom(cur, chart)?;
        if cur.eat('^') {
            let col = cur.col();
            let e = cur.usize("an exponent")?;
            let e = u32::try_from(e)
                .map_err(|_| cur.err_at(col, ParseErrorKind::InvalidValue("exponent too large".into())))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn poly_atom(&self, cur: &mut Cursor, chart: &Arc<Chart>) -> Result<Scalar, ParseError> {
        let col = cur.col();
        match cur.peek().clone() {
            Tok::Int(n) => {
                cur.bump();
                Ok(Scalar::constant(chart, Rational::from_integer(n)))
            }
            Tok::Ident(id) => {
                cur.bump();
                if let Some(i) = chart.index_of(&id) {
                    return Ok(Scalar::var(chart, i));
                }
                match self.lookup(&id) {
                    Some(ItemValue::Scalar(s)) if s.chart() == chart => Ok(s.clone()),
                    Some(ItemValue::Scalar(s)) => Err(cur.err_at(
                        col,
                        ParseErrorKind::ChartMismatch {
                            name: id,
                            expected: chart.name().to_string(),
                            found: s.chart().name().to_string(),
                        },
                    )),
                    _ => Err(cur.err_at(col, ParseErrorKind::UnknownIdentifier(id))),
                }
            }
            Tok::Sym('(') => {
                cur.bump();
                let p = self.poly(cur, chart)?;
                cur.expect(')')?;
                Ok(p)
            }
            _ => Err(cur.unexpected("a number, coordinate or `(`")),
        }
    }

    // -- forms and multivectors ----------------------------------------------

    fn resolve_form(&self, id: &str, chart: &Arc<Chart>) -> Result<DiffForm, ParseErrorKind> {
        if let Some(i) = id.strip_prefix("dx").and_then(digits_index) {
            return self.basis_index(i, chart);
        }
        if let Some(i) = id.strip_prefix('d').and_then(|c| chart.index_of(c)) {
            return Ok(DiffForm::basis(chart, &[i]).expect("in range"));
        }
        match self.lookup(id) {
            Some(ItemValue::Form(f)) => self.same_chart(id, f, chart),
            _ => Err(ParseErrorKind::UnknownIdentifier(id.to_string())),
        }
    }

    fn resolve_vector(&self, id: &str, chart: &Arc<Chart>) -> Result<Multivector, ParseErrorKind> {
        if let Some(i) = id.strip_prefix('e').and_then(digits_index) {
            return self.basis_index(i, chart);
        }
        if let Some(i) = id.strip_prefix("e_").and_then(|c| chart.index_of(c)) {
            return Ok(Multivector::basis(chart, &[i]).expect("in range"));
        }
        match self.lookup(id) {
            Some(ItemValue::Multivector(m)) | Some(ItemValue::Bivector(m)) => self.same_chart(id, m, chart),
            _ => Err(ParseErrorKind::UnknownIdentifier(id.to_string())),
        }
    }

    fn basis_index<K: Kind>(&self, i: usize, chart: &Arc<Chart>) -> Result<Graded<K>, ParseErrorKind> {
        if i == 0 || i > chart.dim() {
            return Err(ParseErrorKind::InvalidValue(format!(
                "basis index {i} out of range for chart {} of dimension {}",
                chart.name(),
                chart.dim()
            )));
        }
        Ok(Graded::basis(chart, &[i - 1]).expect("in range"))
    }

    fn same_chart<K: Kind>(&self, id: &str, g: &Graded<K>, chart: &Arc<Chart>) -> Result<Graded<K>, ParseErrorKind> {
        if g.chart() == chart {
            Ok(g.clone())
        } else {
            Err(ParseErrorKind::ChartMismatch {
                name: id.to_string(),
                expected: chart.name().to_string(),
                found: g.chart().name().to_string(),
            })
        }
    }

    fn graded_sum<K: Kind>(
        &self,
        cur: &mut Cursor,
        chart: &Arc<Chart>,
        resolve: &dyn Fn(&Parser, &str, &Arc<Chart>) -> Result<Graded<K>, ParseErrorKind>,
    ) -> Result<Graded<K>, ParseError> {
        let mut acc: Option<Graded<K>> = None;
        let mut negate = cur.eat('-');
        if !negate {
            cur.eat('+');
        }
        loop {
            let col = cur.col();
            let mut term = self.graded_term(cur, chart, resolve)?;
            if negate {
                term = term.neg();
            }
            acc = Some(match acc {
                None => term,
                Some(a) => a.checked_add(&term).map_err(|e| cur.err_at(col, map_cartan(e)))?,
            });
            if cur.eat('+') {
                negate = false;
            } else if cur.eat('-') {
                negate = true;
            } else {
                return Ok(acc.expect("at least one term"));
            }
        }
    }

    fn graded_term<K: Kind>(
        &self,
        cur: &mut Cursor,
        chart: &Arc<Chart>,
        resolve: &dyn Fn(&Parser, &str, &Arc<Chart>) -> Result<Graded<K>, ParseErrorKind>,
    ) -> Result<Graded<K>, ParseError> {
        let coeff = match cur.peek().clone() {
            Tok::Sym('(') => {
                cur.bump();
                let p = self.poly(cur, chart)?;
                cur.expect(')')?;
                Some(p)
            }
            Tok::Int(n) => {
                cur.bump();
                let mut c = Rational::from_integer(n);
                if cur.eat('/') {
                    let col = cur.col();
                    let d = cur.usize("a denominator")?;
                    if d == 0 {
                        return Err(cur.err_at(col, ParseErrorKind::InvalidValue("division by zero".into())));
                    }
                    c /= Rational::from_integer(d.into());
                }
                Some(Scalar::constant(chart, c))
            }
            _ => None,
        };
        let has_basis = match coeff {
            Some(_) => cur.eat('*'),
            None => true,
        };
        let coeff = coeff.unwrap_or_else(|| Scalar::one(chart));
        if !has_basis {
            return Ok(Graded::scalar(coeff));
        }
        let mut prod: Option<Graded<K>> = None;
        loop {
            let col = cur.col();
            let (id, _) = cur.ident(&format!("a basis element like `{}1`", K::BASIS))?;
            let factor = resolve(self, &id, chart).map_err(|k| cur.err_at(col, k))?;
            let next = match prod {
                None => factor,
                Some(p) => {
                    let deg = p.degree() + factor.degree();
                    if deg > chart.dim() {
                        return Err(cur.err_at(col, ParseErrorKind::DegreeOverflow { degree: deg, dim: chart.dim() }));
                    }
                    p.wedge(&factor).map_err(|e| cur.err_at(col, map_cartan(e)))?
                }
            };
            prod = Some(next);
            if !cur.eat('^') {
                break;
            }
        }
        prod.expect("one factor")
            .mul_scalar(&coeff)
            .map_err(|e| cur.err(map_cartan(e)))
    }

    // -- scenario headers -----------------------------------------------------

    fn header_line(&mut self, text: &str, line_no: usize) -> Result<(), ParseError> {
        // whitespace-separated words with 1-based columns
        let mut words: Vec<(String, usize)> = Vec::new();
        let mut col = 0;
        for (i, ch) in text.char_indices() {
            let c = text[..i].chars().count() + 1;
            if ch.is_whitespace() {
                if col != 0 {
                    col = 0;
                }
            } else if col == 0 {
                col = c;
                words.push((ch.to_string(), c));
            } else {
                words.last_mut().unwrap().0.push(ch);
            }
        }
        let end_col = text.chars().count() + 1;
        let err = |col: usize, kind: ParseErrorKind| ParseError { line: line_no, col, kind };
        let rational = |w: &(String, usize)| -> Result<Rational, ParseError> {
            parse_rational(&w.0).ok_or_else(|| err(w.1, ParseErrorKind::Syntax(format!("expected a rational, found `{}`", w.0))))
        };
        let arity = |n: usize| -> Result<(), ParseError> {
            if words.len() == n + 1 {
                Ok(())
            } else if words.len() < n + 1 {
                Err(err(end_col, ParseErrorKind::Syntax(format!("`{}` expects {n} argument(s)", words[0].0))))
            } else {
                Err(err(words[n + 1].1, ParseErrorKind::Syntax("expected end of line".into())))
            }
        };
        let kw = words[0].0.clone();
        let dup = |set: bool| -> Result<(), ParseError> {
            if set {
                Err(err(words[0].1, ParseErrorKind::Duplicate(kw.clone())))
            } else {
                Ok(())
            }
        };
        let h = &mut self.header;
        match kw.as_str() {
            "scenario" => {
                arity(1)?;
                dup(h.name.is_some())?;
                h.name = Some(words[1].0.clone());
            }
            "manifold" => {
                dup(h.manifold.is_some())?;
                let (spec, used) = parse_manifold(&words[1..]).map_err(|(c, m)| {
                    err(c.unwrap_or(end_col), ParseErrorKind::Syntax(m))
                })?;
                if used + 1 != words.len() {
                    return Err(err(words[used + 1].1, ParseErrorKind::Syntax("expected end of line".into())));
                }
                h.manifold = Some(spec);
            }
            "rho" | "epsilon" => {
                arity(1)?;
                let q = rational(&words[1])?;
                if q <= Rational::zero() {
                    return Err(err(words[1].1, ParseErrorKind::InvalidValue(format!("{kw} must be positive"))));
                }
                let slot = if kw == "rho" { &mut h.rho } else { &mut h.epsilon };
                if slot.is_some() {
                    return Err(err(words[0].1, ParseErrorKind::Duplicate(kw)));
                }
                *slot = Some(q);
            }
            "box" => {
                arity(2)?;
                dup(h.bbox.is_some())?;
                let lo = rational(&words[1])?;
                let hi = rational(&words[2])?;
                if lo >= hi {
                    return Err(err(words[2].1, ParseErrorKind::InvalidValue("box must have lo < hi".into())));
                }
                h.bbox = Some((lo, hi));
            }
            "times" => {
                dup(h.times.is_some())?;
                if words.len() < 2 {
                    return Err(err(end_col, ParseErrorKind::Syntax("`times` expects at least one value".into())));
                }
                let mut ts = Vec::new();
                for w in &words[1..] {
                    let t = rational(w)?;
                    if t < Rational::zero() || t > Rational::from_integer(1.into()) {
                        return Err(err(w.1, ParseErrorKind::InvalidValue("times must lie in [0, 1]".into())));
                    }
                    ts.push(t);
                }
                h.times = Some(ts);
            }
            "cycle" => {
                arity(3)?;
                if words[2].0 != "period" {
                    return Err(err(words[2].1, ParseErrorKind::Syntax(format!("expected `period`, found `{}`", words[2].0))));
                }
                let period = rational(&words[3])?;
                h.cycles.push(CycleSpec {
                    name: words[1].0.clone(),
                    period,
                });
            }
            "density" => {
                arity(1)?;
                dup(h.density.is_some())?;
                h.density = Some(words[1].0.clone());
            }
            "foliation" | "omega0" | "phi" => {
                arity(1)?;
                let slot = match kw.as_str() {
                    "foliation" => &mut h.foliation,
                    "omega0" => &mut h.omega0,
                    _ => &mut h.phi,
                };
                if slot.is_some() {
                    return Err(err(words[0].1, ParseErrorKind::Duplicate(kw)));
                }
                *slot = Some(words[1].0.clone());
                self.header_refs.push((words[1].0.clone(), line_no, words[1].1));
            }
            _ => unreachable!("dispatch only passes header keywords"),
        }
        Ok(())
    }
}

fn parse_manifold(words: &[(String, usize)]) -> Result<(ManifoldSpec, usize), (Option<usize>, String)> {
    let Some((kw, col)) = words.first() else {
        return Err((None, "expected a manifold id".into()));
    };
    let dim = |i: usize| -> Result<usize, (Option<usize>, String)> {
        let w = words.get(i).ok_or((None, "expected a dimension".to_string()))?;
        match w.0.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err((Some(w.1), format!("expected a positive dimension, found `{}`", w.0))),
        }
    };
    match kw.as_str() {
        "euclidean" => Ok((ManifoldSpec::Euclidean(dim(1)?), 2)),
        "sphere-minus-point" => Ok((ManifoldSpec::SphereMinusPoint(dim(1)?), 2)),
        "sphere" => Ok((ManifoldSpec::Sphere(dim(1)?), 2)),
        "product-line" => {
            let (base, used) = parse_manifold(&words[1..])?;
            Ok((ManifoldSpec::ProductWithLine(Box::new(base)), used + 1))
        }
        other => Err((Some(*col), format!("unknown manifold `{other}`"))),
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() || d < BigInt::zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Parses a document, resolving every name.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser::new();
    for (i, line) in text.lines().enumerate() {
        p.line(line, i + 1)?;
    }
    for (name, line, col) in &p.header_refs {
        if p.lookup(name).is_none() {
            return Err(ParseError {
                line: *line,
                col: *col,
                kind: ParseErrorKind::UnknownIdentifier(name.clone()),
            });
        }
    }
    Ok(Document {
        statements: p.statements,
        header: p.header,
    })
}

// ---------------------------------------------------------------------------
// printing

fn ring_poly_string(generator: &str, coeffs: &[Rational]) -> String {
    let chart = Chart::new("ring", vec![generator.to_string()]).expect("single coordinate");
    let p = Scalar::from_terms(
        &chart,
        coeffs.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())),
    )
    .expect("one exponent per term");
    p.to_string()
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rings: HashMap<&str, &RingDecl> = HashMap::new();
        for s in &self.statements {
            match s {
                Statement::Chart(c) => writeln!(f, "{c}")?,
                Statement::Item(Item { name, value }) => match value {
                    ItemValue::Scalar(s) => writeln!(f, "scalar {name}: {s}")?,
                    ItemValue::Form(g) => writeln!(f, "form {name}: {g}")?,
                    ItemValue::Multivector(g) => writeln!(f, "multivector {name}: {g}")?,
                    ItemValue::Bivector(g) => writeln!(f, "bivector {name}: {g}")?,
                    ItemValue::Distribution(d) => {
                        let mode = match d.presentation {
                            Presentation::Kernel(_) => "kernel",
                            Presentation::Span(_) => "span",
                        };
                        writeln!(f, "distribution {name}: {mode} {}", d.members.join(", "))?
                    }
                    ItemValue::Ring(r) => {
                        rings.insert(name, r);
                        writeln!(f, "ring {name} ({}) top {}", r.generator, r.top)?
                    }
                    ItemValue::Bundle(b) => {
                        let g = rings.get(b.ring.as_str()).map_or("t", |r| r.generator.as_str());
                        match &b.kind {
                            BundleKindDecl::Complex { chern } => writeln!(
                                f,
                                "bundle {name}: complex {} chern ({})",
                                b.rank,
                                ring_poly_string(g, chern)
                            )?,
                            BundleKindDecl::Real { pontryagin, euler } => {
                                write!(
                                    f,
                                    "bundle {name}: real {} pontryagin ({})",
                                    b.rank,
                                    ring_poly_string(g, pontryagin)
                                )?;
                                if let Some(e) = euler {
                                    write!(f, " euler ({})", ring_poly_string(g, e))?;
                                }
                                writeln!(f)?
                            }
                        }
                    }
                },
            }
        }
        let h = &self.header;
        if let Some(n) = &h.name {
            writeln!(f, "scenario {n}")?;
        }
        if let Some(m) = &h.manifold {
            writeln!(f, "manifold {m}")?;
        }
        if let Some(r) = &h.rho {
            writeln!(f, "rho {}", fmt_rational(r))?;
        }
        if let Some((lo, hi)) = &h.bbox {
            writeln!(f, "box {} {}", fmt_rational(lo), fmt_rational(hi))?;
        }
        if let Some(ts) = &h.times {
            let ts: Vec<String> = ts.iter().map(fmt_rational).collect();
            writeln!(f, "times {}", ts.join(" "))?;
        }
        for c in &h.cycles {
            writeln!(f, "cycle {} period {}", c.name, fmt_rational(&c.period))?;
        }
        if let Some(e) = &h.epsilon {
            writeln!(f, "epsilon {}", fmt_rational(e))?;
        }
        if let Some(d) = &h.density {
            writeln!(f, "density {d}")?;
        }
        if let Some(x) = &h.foliation {
            writeln!(f, "foliation {x}")?;
        }
        if let Some(x) = &h.omega0 {
            writeln!(f, "omega0 {x}")?;
        }
        if let Some(x) = &h.phi {
            writeln!(f, "phi {x}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::int;

    #[test]
    fn bivector_transcription() {
        let doc = parse_document("chart R4 (x1 x2 x3 x4)\nbivector pi: (1)*e1^e2 + (x2)*e3^e4\n").unwrap();
        let (_, pi) = doc.bivector(None).unwrap();
        let c = pi.chart().clone();
        assert_eq!(pi.component(&[0, 1]), Scalar::one(&c));
        assert_eq!(pi.component(&[2, 3]), Scalar::var(&c, 1));
        assert_eq!(pi.num_comps(), 2);
    }

    #[test]
    fn one_form_transcription() {
        let doc = parse_document("chart R4 (x1 x2 x3 x4)\nform a: (-1*x2)*dx1 + (1)*dx3").unwrap();
        let a = doc.form("a").unwrap();
        let c = a.chart().clone();
        assert_eq!(a.component(&[0]), -&Scalar::var(&c, 1));
        assert_eq!(a.component(&[2]), Scalar::one(&c));
    }

    #[test]
    fn double_caret_is_rejected_at_second_caret() {
        let err = parse_document("chart R2 (x1 x2)\nmultivector m: e1^^e2").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 19);
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn named_coordinates_and_references() {
        let doc = parse_document(
            "chart R3 (x y z)\nscalar f: 1/2*x^2 - y\nform a: dz - (y)*dx\nform b: (f)*a^dy\nmultivector v: e_x + (z)*e3",
        )
        .unwrap();
        let b = doc.form("b").unwrap();
        assert_eq!(b.degree(), 2);
        let c = b.chart().clone();
        let f = doc.get("f").unwrap();
        let ItemValue::Scalar(f) = f else { panic!() };
        // (dz - y dx)^dy * f = -f dy^dz ... component (1,2) is -f, (0,1) is -y f
        assert_eq!(b.component(&[1, 2]), -f);
        assert_eq!(b.component(&[0, 1]), -&(&Scalar::var(&c, 1) * f));
    }

    #[test]
    fn diagnostics() {
        let e = parse_document("form a: dx1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NoChart);
        let e = parse_document("chart R2 (x y)\nform a: (w)*dx").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!((e.line, e.col), (2, 10));
        let e = parse_document("chart R2 (x y)\nform a: dx^dy^dx").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DegreeOverflow { degree: 3, dim: 2 }));
        let e = parse_document("chart A (x y)\nform a: dx\nchart B (u v)\nform b: du^a").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ChartMismatch { .. }));
        let e = parse_document("chart R2 (x y)\nbivector p: e1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DegreeMismatch { expected: 2, found: 1 }));
        let e = parse_document("chart R2 (x y)\nform a: dx + dx^dy").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DegreeMismatch { .. }));
        let e = parse_document("chart R2 (x y)\nscalar s: x / y").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::InvalidValue(_)));
        let e = parse_document("chart R2 (x y)\nform a: dx3").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::InvalidValue(_)));
        let e = parse_document("phi nothing").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("nothing".into()));
    }

    #[test]
    fn rings_bundles_and_headers() {
        let text = "ring CP5 (t) top 5\nbundle nu: complex 1 chern (1 + 2*t)\nbundle r: real 2 pontryagin (1 + 4*t^2) euler (2*t)\n\
                    chart V (u v s)\nform w: (4 + s^2)*du^dv\nform a: ds\ndistribution F: kernel a\n\
                    scenario s2xr\nmanifold product-line sphere 2\nrho 1/4\nbox -1 1\ntimes 0 1/2 1\ncycle S2x0 period 4\n\
                    density sphere-area\nfoliation F\nomega0 w\nphi w\n";
        let doc = parse_document(text).unwrap();
        let ItemValue::Bundle(nu) = doc.get("nu").unwrap() else { panic!() };
        let BundleKindDecl::Complex { chern } = &nu.kind else { panic!() };
        assert_eq!(chern[1], int(2));
        let h = &doc.header;
        assert_eq!(h.manifold, Some(ManifoldSpec::ProductWithLine(Box::new(ManifoldSpec::Sphere(2)))));
        assert_eq!(h.bbox, Some((int(-1), int(1))));
        assert_eq!(h.cycles[0].period, int(4));
        let again = parse_document(&doc.to_string()).unwrap();
        assert_eq!(again, doc);
    }
}
