//! Parser for `.sq` Hamiltonian programs.
//!
//! ```text
//! program  := stmt*
//! stmt     := "sites" "[" site ("," site)* "]" ";"?
//!           | "const" IDENT "=" expr ";"?
//!           | "H" "=" expr ";"?
//!           | "simulate" "{" (IDENT "=" (expr | STRING) ";"?)* "}"
//! site     := ("fermion" | "qubit" | "boson" "(" INT ")") (("×" | "*") INT)?
//! expr     := mul (("+" | "-") mul)*
//! mul      := unary (("*" | "/" | "." | "(x)") unary)*
//! unary    := "-" unary | atom
//! atom     := NUMBER | "i" | "pi" | IDENT
//!           | OP "(" expr ")"           indexed operator, tensored with identities
//!           | OP "@" INT                single-site operator, no expansion
//!           | "dag" "(" expr ")"
//!           | "sum" IDENT "in" expr ".." expr "{" expr "}"
//!           | "(" expr ")"
//! OP       := "a" | "adag" | "n0" | "n1" | "I" | "X" | "Y" | "Z"
//! ```
//!
//! `sum` ranges include both ends. Scalars multiply operators by being pushed
//! into a ladder leaf, so the resulting [`Expr`] has no scalar nodes.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ir::{AlgoChoice, Expr, SiteType, TargetChoice};
use crate::scalar::{c_literal, conj, imag_unit, re, Scalar, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    Lexical(char),
    #[error("unterminated string")]
    UnterminatedString,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("site index {index} out of range for {len} sites")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("malformed sum range: {0}")]
    MalformedRange(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

fn err<X>(pos: Pos, kind: ParseErrorKind) -> Result<X, ParseError> {
    Err(ParseError { kind, pos })
}

/// Single-site operator keyword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteOp {
    A,
    Adag,
    N0,
    N1,
    I,
    X,
    Y,
    Z,
}

impl SiteOp {
    fn from_name(s: &str) -> Option<SiteOp> {
        Some(match s {
            "a" => SiteOp::A,
            "adag" => SiteOp::Adag,
            "n0" => SiteOp::N0,
            "n1" => SiteOp::N1,
            "I" => SiteOp::I,
            "X" => SiteOp::X,
            "Y" => SiteOp::Y,
            "Z" => SiteOp::Z,
            _ => return None,
        })
    }

    /// Ladder-only expansion on site `j`.
    pub fn local<T: Scalar>(self, j: usize) -> Expr<T> {
        let a = || Expr::a(j);
        let adag = || Expr::adag(j);
        match self {
            SiteOp::A => a(),
            SiteOp::Adag => adag(),
            SiteOp::N0 => Expr::compose(a(), adag()),
            SiteOp::N1 => Expr::compose(adag(), a()),
            SiteOp::I => Expr::id(j),
            SiteOp::X => Expr::sum(adag(), a()),
            SiteOp::Y => {
                // i·a† − i·a, the standard Pauli Y
                let m_i = -imag_unit::<T>();
                Expr::sum(Expr::dagger(Expr::scaled_a(m_i.clone(), j)), Expr::scaled_a(m_i, j))
            }
            SiteOp::Z => Expr::sum(
                Expr::compose(a(), adag()),
                Expr::compose(Expr::dagger(Expr::scaled_a(re(-T::one()), j)), a()),
            ),
        }
    }
}

/// Tensor chain over `shape` with `op` at site `j` and identities elsewhere.
pub fn desugar_indexed<T: Scalar>(op: SiteOp, j: usize, shape: &[SiteType]) -> Result<Expr<T>, ParseErrorKind> {
    if j >= shape.len() {
        return Err(ParseErrorKind::IndexOutOfRange { index: j as i64, len: shape.len() });
    }
    Ok(Expr::tensor_all((0..shape.len()).map(|k| if k == j { op.local(j) } else { Expr::id(k) }))
        .expect("shape is non-empty"))
}

/// Multiply `e` by `z`, pushing the factor into a ladder leaf.
pub fn scale<T: Scalar>(e: Expr<T>, z: &C<T>, shape: &[SiteType]) -> Result<Expr<T>, ParseErrorKind> {
    if *z == re(T::one()) {
        return Ok(e);
    }
    Ok(match e {
        Expr::Annihilate { amp, site } => Expr::Annihilate { amp: amp * z.clone(), site },
        Expr::Identity { site } => {
            if shape.get(site).map(|s| s.dim()) != Some(2) {
                return Err(ParseErrorKind::Type(format!(
                    "cannot scale a bare identity on site {site}; attach the scalar to a ladder factor"
                )));
            }
            // I = a∘a† + a†∘a on a two-level site
            Expr::sum(
                Expr::compose(Expr::scaled_a(z.clone(), site), Expr::adag(site)),
                Expr::compose(Expr::dagger(Expr::scaled_a(conj(z), site)), Expr::a(site)),
            )
        }
        Expr::Dagger(inner) => Expr::dagger(scale(*inner, &conj(z), shape)?),
        Expr::Sum(l, r) => Expr::sum(scale(*l, z, shape)?, scale(*r, z, shape)?),
        Expr::Compose(l, r) => {
            if l.has_ladder() || !r.has_ladder() {
                Expr::compose(scale(*l, z, shape)?, *r)
            } else {
                Expr::compose(*l, scale(*r, z, shape)?)
            }
        }
        Expr::Tensor(l, r) => {
            if l.has_ladder() || !r.has_ladder() {
                Expr::tensor(scale(*l, z, shape)?, *r)
            } else {
                Expr::tensor(*l, scale(*r, z, shape)?)
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Simulation {
    pub time: Option<f64>,
    pub algorithm: Option<AlgoChoice>,
    pub m: Option<usize>,
    pub samples: Option<usize>,
    pub epsilon: Option<f64>,
    pub target: Option<TargetChoice>,
    pub seed: Option<u64>,
    pub order: Option<Vec<String>>,
}

/// A parsed and fully desugared program.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramFile<T = f64> {
    pub shape: Vec<SiteType>,
    pub constants: Vec<(String, C<T>)>,
    pub hamiltonian: Expr<T>,
    pub simulation: Option<Simulation>,
}

impl<T: Scalar> fmt::Display for ProgramFile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sites: Vec<String> = self.shape.iter().map(|s| s.to_string()).collect();
        writeln!(f, "sites [{}];", sites.join(", "))?;
        for (name, v) in &self.constants {
            writeln!(f, "const {name} = {};", c_literal(v))?;
        }
        writeln!(f, "H = {};", self.hamiltonian)?;
        if let Some(sim) = &self.simulation {
            writeln!(f, "simulate {{")?;
            if let Some(t) = sim.time {
                writeln!(f, "  time = {t:?};")?;
            }
            if let Some(a) = sim.algorithm {
                writeln!(f, "  algorithm = {a};")?;
            }
            if let Some(m) = sim.m {
                writeln!(f, "  m = {m};")?;
            }
            if let Some(n) = sim.samples {
                writeln!(f, "  N = {n};")?;
            }
            if let Some(e) = sim.epsilon {
                writeln!(f, "  epsilon = {e:?};")?;
            }
            if let Some(t) = sim.target {
                writeln!(f, "  target = {t};")?;
            }
            if let Some(s) = sim.seed {
                writeln!(f, "  seed = {s};")?;
            }
            if let Some(o) = &sim.order {
                writeln!(f, "  order = \"{}\";", o.join(","))?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(s) => write!(f, "number {s}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const PUNCTS: [&str; 19] = [
    "(x)", "..", "[", "]", "(", ")", "{", "}", ",", ";", "=", "+", "-", "*", "/", ".", "@", ":", "×",
];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize, chars: &[char]| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1, &chars);
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '-' || chars[k] == '+') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let s: String = chars[start..j].iter().collect();
            advance(&mut i, &mut line, &mut col, j - start, &chars);
            out.push((Tok::Num(s), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') && chars[j] != '×' {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            advance(&mut i, &mut line, &mut col, j - start, &chars);
            out.push((Tok::Ident(s), pos));
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '"' {
                j += 1;
            }
            if j >= chars.len() {
                return err(pos, ParseErrorKind::UnterminatedString);
            }
            let s: String = chars[i + 1..j].iter().collect();
            let n = j + 1 - i;
            advance(&mut i, &mut line, &mut col, n, &chars);
            out.push((Tok::Str(s), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                advance(&mut i, &mut line, &mut col, p.chars().count(), &chars);
                out.push((Tok::Punct(p), pos));
            }
            None => return err(pos, ParseErrorKind::Lexical(c)),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

// ---------------------------------------------------------------- syntax tree

#[derive(Clone, Debug)]
enum Ast {
    Num(String),
    Imag,
    Pi,
    Var(String),
    Neg(Box<Node>),
    Bin(&'static str, Box<Node>, Box<Node>),
    Indexed(SiteOp, Box<Node>),
    Raw(SiteOp, usize),
    Dag(Box<Node>),
    Range { var: String, lo: Box<Node>, hi: Box<Node>, body: Box<Node> },
}

#[derive(Clone, Debug)]
struct Node {
    ast: Ast,
    pos: Pos,
}

#[derive(Clone, Debug)]
enum SimValue {
    Expr(Node),
    Str(String),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat(p) {
            Ok(pos)
        } else {
            err(pos, ParseErrorKind::Unexpected { expected: format!("`{p}`"), found: self.peek().to_string() })
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => err(p, ParseErrorKind::Unexpected { expected: "identifier".into(), found: t.to_string() }),
        }
    }

    fn int(&mut self) -> Result<(usize, Pos), ParseError> {
        match self.bump() {
            (Tok::Num(s), p) => s
                .parse::<usize>()
                .map(|n| (n, p))
                .map_err(|_| ParseError { kind: ParseErrorKind::Invalid(format!("expected an integer, found {s}")), pos: p }),
            (t, p) => err(p, ParseErrorKind::Unexpected { expected: "integer".into(), found: t.to_string() }),
        }
    }

    fn sites(&mut self) -> Result<Vec<SiteType>, ParseError> {
        self.expect("[")?;
        let mut out = Vec::new();
        loop {
            let (name, p) = self.ident()?;
            let site = match name.as_str() {
                "fermion" => SiteType::Fermion,
                "qubit" => SiteType::Boson(2),
                "boson" => {
                    self.expect("(")?;
                    let (m, mp) = self.int()?;
                    self.expect(")")?;
                    if m < 2 {
                        return err(mp, ParseErrorKind::Invalid(format!("boson dimension must be at least 2, got {m}")));
                    }
                    SiteType::Boson(m)
                }
                _ => return err(p, ParseErrorKind::Unexpected { expected: "site type".into(), found: format!("`{name}`") }),
            };
            let count = if self.eat("×") || self.eat("*") { self.int()?.0 } else { 1 };
            out.extend(std::iter::repeat_n(site, count));
            if !self.eat(",") {
                break;
            }
        }
        self.expect("]")?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.mul()?;
        loop {
            let pos = self.pos();
            let op = if self.eat("+") {
                "+"
            } else if self.eat("-") {
                "-"
            } else {
                return Ok(lhs);
            };
            let rhs = self.mul()?;
            lhs = Node { ast: Ast::Bin(op, Box::new(lhs), Box::new(rhs)), pos };
        }
    }

    fn mul(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let op = match self.peek() {
                Tok::Punct(p @ ("*" | "/" | "." | "(x)")) => *p,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node { ast: Ast::Bin(op, Box::new(lhs), Box::new(rhs)), pos };
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        if self.eat("-") {
            let inner = self.unary()?;
            return Ok(Node { ast: Ast::Neg(Box::new(inner)), pos });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                Ok(Node { ast: Ast::Num(s), pos })
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(op) = SiteOp::from_name(&name) {
                    if self.eat("@") {
                        let (j, _) = self.int()?;
                        return Ok(Node { ast: Ast::Raw(op, j), pos });
                    }
                    if self.is_punct("(") {
                        self.bump();
                        let idx = self.expr()?;
                        self.expect(")")?;
                        return Ok(Node { ast: Ast::Indexed(op, Box::new(idx)), pos });
                    }
                }
                match name.as_str() {
                    "i" => Ok(Node { ast: Ast::Imag, pos }),
                    "pi" => Ok(Node { ast: Ast::Pi, pos }),
                    "dag" => {
                        self.expect("(")?;
                        let e = self.expr()?;
                        self.expect(")")?;
                        Ok(Node { ast: Ast::Dag(Box::new(e)), pos })
                    }
                    "sum" => {
                        let (var, vp) = self.ident()?;
                        if var == "i" || var == "pi" || SiteOp::from_name(&var).is_some() {
                            return err(vp, ParseErrorKind::MalformedRange(format!("`{var}` is reserved")));
                        }
                        match self.bump() {
                            (Tok::Ident(k), _) if k == "in" => {}
                            (t, p) => {
                                return err(p, ParseErrorKind::Unexpected { expected: "`in`".into(), found: t.to_string() })
                            }
                        }
                        let lo = self.mul()?;
                        self.expect("..")?;
                        let hi = self.mul()?;
                        self.expect("{")?;
                        let body = self.expr()?;
                        self.expect("}")?;
                        Ok(Node { ast: Ast::Range { var, lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body) }, pos })
                    }
                    _ if self.is_punct("(") || self.is_punct("@") => err(pos, ParseErrorKind::UnknownIdentifier(name)),
                    _ => Ok(Node { ast: Ast::Var(name), pos }),
                }
            }
            t => err(pos, ParseErrorKind::Unexpected { expected: "expression".into(), found: t.to_string() }),
        }
    }

    fn end_stmt(&mut self) {
        self.eat(";");
    }
}

// ---------------------------------------------------------------- evaluation

#[derive(Clone, Debug)]
enum Value<T> {
    Scalar(C<T>),
    Op(Expr<T>),
}

struct Env<'a, T> {
    shape: &'a [SiteType],
    constants: &'a BTreeMap<String, C<T>>,
    loops: Vec<(String, i64)>,
}

fn as_int<T: Scalar>(v: &C<T>, pos: Pos) -> Result<i64, ParseError> {
    let x = v.re.as_f64();
    if !v.im.is_zero() || x.fract() != 0.0 || !x.is_finite() {
        return err(pos, ParseErrorKind::Type(format!("expected an integer, got {}", c_literal(v))));
    }
    Ok(x as i64)
}

fn eval<T: Scalar>(node: &Node, env: &mut Env<'_, T>) -> Result<Value<T>, ParseError> {
    let pos = node.pos;
    let type_err = |msg: &str| err(pos, ParseErrorKind::Type(msg.to_string()));
    let lift = |r: Result<Expr<T>, ParseErrorKind>| r.map(Value::Op).map_err(|kind| ParseError { kind, pos });
    match &node.ast {
        Ast::Num(s) => match T::parse_decimal(s) {
            Some(x) => Ok(Value::Scalar(re(x))),
            None => err(pos, ParseErrorKind::Invalid(format!("literal {s} is not representable"))),
        },
        Ast::Imag => Ok(Value::Scalar(imag_unit())),
        Ast::Pi => match T::pi() {
            Some(p) => Ok(Value::Scalar(re(p))),
            None => type_err("`pi` is not representable in exact arithmetic"),
        },
        Ast::Var(name) => {
            if let Some((_, v)) = env.loops.iter().rev().find(|(n, _)| n == name) {
                let v = *v;
                return Ok(Value::Scalar(re(int_scalar::<T>(v))));
            }
            match env.constants.get(name) {
                Some(v) => Ok(Value::Scalar(v.clone())),
                None => err(pos, ParseErrorKind::UnknownIdentifier(name.clone())),
            }
        }
        Ast::Neg(inner) => match eval(inner, env)? {
            Value::Scalar(z) => Ok(Value::Scalar(-z)),
            Value::Op(e) => lift(scale(e, &re(-T::one()), env.shape)),
        },
        Ast::Dag(inner) => match eval(inner, env)? {
            Value::Scalar(z) => Ok(Value::Scalar(conj(&z))),
            Value::Op(e) => Ok(Value::Op(Expr::dagger(e))),
        },
        Ast::Raw(op, j) => {
            if *j >= env.shape.len() {
                return err(pos, ParseErrorKind::IndexOutOfRange { index: *j as i64, len: env.shape.len() });
            }
            Ok(Value::Op(op.local(*j)))
        }
        Ast::Indexed(op, idx) => {
            let j = match eval(idx, env)? {
                Value::Scalar(z) => as_int(&z, idx.pos)?,
                Value::Op(_) => return type_err("site index must be an integer"),
            };
            if j < 0 || j as usize >= env.shape.len() {
                return err(idx.pos, ParseErrorKind::IndexOutOfRange { index: j, len: env.shape.len() });
            }
            lift(desugar_indexed(*op, j as usize, env.shape))
        }
        Ast::Range { var, lo, hi, body } => {
            let bound = |n: &Node, env: &mut Env<'_, T>| -> Result<i64, ParseError> {
                match eval(n, env)? {
                    Value::Scalar(z) => as_int(&z, n.pos).map_err(|e| ParseError {
                        kind: ParseErrorKind::MalformedRange(e.kind.to_string()),
                        pos: e.pos,
                    }),
                    Value::Op(_) => err(n.pos, ParseErrorKind::MalformedRange("bounds must be integers".into())),
                }
            };
            let (lo_v, hi_v) = (bound(lo, env)?, bound(hi, env)?);
            if lo_v > hi_v {
                return err(pos, ParseErrorKind::MalformedRange(format!("empty range {lo_v}..{hi_v}")));
            }
            let mut acc: Option<Value<T>> = None;
            for v in lo_v..=hi_v {
                env.loops.push((var.clone(), v));
                let item = eval(body, env);
                env.loops.pop();
                let item = item?;
                acc = Some(match (acc, item) {
                    (None, x) => x,
                    (Some(Value::Scalar(a)), Value::Scalar(b)) => Value::Scalar(a + b),
                    (Some(Value::Op(a)), Value::Op(b)) => Value::Op(Expr::sum(a, b)),
                    _ => return type_err("sum body mixes scalars and operators"),
                });
            }
            Ok(acc.expect("range is non-empty"))
        }
        Ast::Bin(op, l, r) => {
            let (a, b) = (eval(l, env)?, eval(r, env)?);
            match (*op, a, b) {
                ("+", Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
                ("-", Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x - y)),
                ("*", Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x * y)),
                ("/", Value::Scalar(x), Value::Scalar(y)) => {
                    if y.is_zero() {
                        type_err("division by zero")
                    } else {
                        Ok(Value::Scalar(x / y))
                    }
                }
                ("+", Value::Op(x), Value::Op(y)) => Ok(Value::Op(Expr::sum(x, y))),
                ("-", Value::Op(x), Value::Op(y)) => {
                    let y = scale(y, &re(-T::one()), env.shape).map_err(|kind| ParseError { kind, pos })?;
                    Ok(Value::Op(Expr::sum(x, y)))
                }
                ("*", Value::Scalar(z), Value::Op(e)) | ("*", Value::Op(e), Value::Scalar(z)) => lift(scale(e, &z, env.shape)),
                ("/", Value::Op(e), Value::Scalar(z)) => {
                    if z.is_zero() {
                        type_err("division by zero")
                    } else {
                        lift(scale(e, &(C::<T>::one() / z), env.shape))
                    }
                }
                (".", Value::Op(x), Value::Op(y)) => Ok(Value::Op(Expr::compose(x, y))),
                ("(x)", Value::Op(x), Value::Op(y)) => Ok(Value::Op(Expr::tensor(x, y))),
                ("*", Value::Op(_), Value::Op(_)) => type_err("use `.` to compose operators"),
                (o, _, _) => type_err(&format!("operator `{o}` does not apply to these operands")),
            }
        }
    }
}

fn int_scalar<T: Scalar>(v: i64) -> T {
    let m = T::from_usize(v.unsigned_abs() as usize);
    if v < 0 {
        -m
    } else {
        m
    }
}

/// Parse a program over scalar type `T`. The `simulate` block is always
/// evaluated in double precision.
pub fn parse<T: Scalar>(text: &str) -> Result<ProgramFile<T>, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut shape: Option<Vec<SiteType>> = None;
    let mut consts: Vec<(String, Node)> = Vec::new();
    let mut ham: Option<(Node, Pos)> = None;
    let mut sim: Option<Vec<(String, SimValue, Pos)>> = None;
    while *p.peek() != Tok::Eof {
        let (kw, pos) = p.ident()?;
        match kw.as_str() {
            "sites" => {
                if shape.is_some() {
                    return err(pos, ParseErrorKind::Invalid("duplicate `sites` declaration".into()));
                }
                shape = Some(p.sites()?);
            }
            "const" => {
                let (name, np) = p.ident()?;
                if name == "i" || name == "pi" || name == "H" || consts.iter().any(|(n, _)| *n == name) {
                    return err(np, ParseErrorKind::Invalid(format!("cannot define `{name}`")));
                }
                p.expect("=")?;
                consts.push((name, p.expr()?));
            }
            "H" => {
                if ham.is_some() {
                    return err(pos, ParseErrorKind::Invalid("duplicate Hamiltonian".into()));
                }
                p.expect("=")?;
                ham = Some((p.expr()?, pos));
            }
            "simulate" => {
                p.expect("{")?;
                let mut items = Vec::new();
                while !p.eat("}") {
                    let (key, kp) = p.ident()?;
                    if !p.eat("=") {
                        p.expect(":")?;
                    }
                    let value = match p.peek().clone() {
                        Tok::Str(s) => {
                            p.bump();
                            SimValue::Str(s)
                        }
                        Tok::Ident(s) if matches!(p.peek2(), Tok::Punct(";") | Tok::Punct("}")) && !matches!(s.as_str(), "pi" | "i") && !consts.iter().any(|(n, _)| *n == s) => {
                            p.bump();
                            SimValue::Str(s)
                        }
                        _ => SimValue::Expr(p.expr()?),
                    };
                    items.push((key, value, kp));
                    p.end_stmt();
                }
                sim = Some(items);
            }
            _ => return err(pos, ParseErrorKind::Unexpected { expected: "`sites`, `const`, `H` or `simulate`".into(), found: format!("`{kw}`") }),
        }
        p.end_stmt();
    }
    let shape = shape.ok_or(ParseError { kind: ParseErrorKind::Invalid("missing `sites` declaration".into()), pos: Pos { line: 1, col: 1 } })?;
    let (ham, _) = ham.ok_or(ParseError { kind: ParseErrorKind::Invalid("missing Hamiltonian `H = ...`".into()), pos: p.pos() })?;

    let const_values = fold_constants::<T>(&consts, &shape)?;
    let mut env = Env { shape: &shape, constants: &const_values, loops: Vec::new() };
    let hamiltonian = match eval(&ham, &mut env)? {
        Value::Op(e) => e,
        Value::Scalar(_) => return err(ham.pos, ParseErrorKind::Type("the Hamiltonian must be an operator".into())),
    };
    let simulation = match sim {
        None => None,
        Some(items) => Some(simulation_block(&items, &consts, &shape)?),
    };
    let constants = consts.iter().map(|(n, _)| (n.clone(), const_values[n].clone())).collect();
    Ok(ProgramFile { shape, constants, hamiltonian, simulation })
}

fn fold_constants<T: Scalar>(consts: &[(String, Node)], shape: &[SiteType]) -> Result<BTreeMap<String, C<T>>, ParseError> {
    let mut values = BTreeMap::new();
    for (name, node) in consts {
        let mut env = Env { shape, constants: &values, loops: Vec::new() };
        match eval(node, &mut env)? {
            Value::Scalar(z) => {
                values.insert(name.clone(), z);
            }
            Value::Op(_) => return err(node.pos, ParseErrorKind::Type(format!("constant `{name}` must be a scalar"))),
        }
    }
    Ok(values)
}

fn simulation_block(items: &[(String, SimValue, Pos)], consts: &[(String, Node)], shape: &[SiteType]) -> Result<Simulation, ParseError> {
    let values = fold_constants::<f64>(consts, shape)?;
    let real = |v: &SimValue, pos: Pos| -> Result<f64, ParseError> {
        match v {
            SimValue::Expr(n) => {
                let mut env = Env { shape, constants: &values, loops: Vec::new() };
                match eval(n, &mut env)? {
                    Value::Scalar(z) if z.im == 0.0 => Ok(z.re),
                    _ => err(pos, ParseErrorKind::Type("expected a real number".into())),
                }
            }
            SimValue::Str(s) => err(pos, ParseErrorKind::Type(format!("expected a number, found `{s}`"))),
        }
    };
    let count = |v: &SimValue, pos: Pos| -> Result<u64, ParseError> {
        let x = real(v, pos)?;
        if x < 0.0 || x.fract() != 0.0 {
            return err(pos, ParseErrorKind::Type(format!("expected a non-negative integer, got {x}")));
        }
        Ok(x as u64)
    };
    let word = |v: &SimValue, pos: Pos| -> Result<String, ParseError> {
        match v {
            SimValue::Str(s) => Ok(s.clone()),
            SimValue::Expr(_) => err(pos, ParseErrorKind::Type("expected a name".into())),
        }
    };
    let mut sim = Simulation::default();
    for (key, v, pos) in items {
        let pos = *pos;
        let bad = |e: String| ParseError { kind: ParseErrorKind::Invalid(e), pos };
        match key.as_str() {
            "time" | "r" => sim.time = Some(real(v, pos)?),
            "algorithm" => sim.algorithm = Some(word(v, pos)?.parse().map_err(bad)?),
            "m" | "steps" => sim.m = Some(count(v, pos)? as usize),
            "N" | "samples" => sim.samples = Some(count(v, pos)? as usize),
            "epsilon" => sim.epsilon = Some(real(v, pos)?),
            "target" => sim.target = Some(word(v, pos)?.parse().map_err(bad)?),
            "seed" => sim.seed = Some(count(v, pos)?),
            "order" => sim.order = Some(word(v, pos)?.split(',').map(|s| s.trim().to_string()).collect()),
            _ => return err(pos, ParseErrorKind::UnknownIdentifier(key.clone())),
        }
    }
    Ok(sim)
}
