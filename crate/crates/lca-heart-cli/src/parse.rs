//! Tokenizer and recursive-descent parser for the command language.
//!
//! ```text
//! group    := "0" | gterm ("+" gterm)*
//! gterm    := "R" ["^" int] | "Z" ["^" int | "/" int] | "T" ["^" int] | name
//! scalar   := ["-"] sterm (("+" | "-") sterm)*
//! sterm    := int ["/" int] ["*" symbol] | symbol
//! matrix   := "[" [row ("," row)*] "]"
//! row      := "[" [scalar ("," scalar)*] "]"
//! morlit   := group "->" group "=" matrix
//! ```

use std::collections::BTreeSet;
use std::fmt;

use lca_heart::elca::{ElcaGroup, ElcaMorphism};
use lca_heart::scalars::{Int, Rat, Scalar, SymbolTable};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Float(String),
    Punct(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) | Tok::Float(s) => write!(f, "`{s}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::End => f.write_str("end of line"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the line.
    pub pos: usize,
    pub expected: BTreeSet<String>,
    pub found: String,
    /// Set for errors found after the syntax was accepted, such as an
    /// unknown symbol or a matrix of the wrong shape.
    pub message: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: ", self.pos + 1)?;
        if let Some(m) = &self.message {
            return f.write_str(m);
        }
        let exp: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(f, "expected one of {}; found {}", exp.join(", "), self.found)
    }
}

impl std::error::Error for ParseError {}

const PUNCT: [&str; 15] = ["->", "<-", "+", "-", "*", "/", "^", "[", "]", "(", ")", ",", ":", "=", "#"];

pub fn tokenize(line: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'?' {
                i += 1;
            }
            out.push((Tok::Ident(line[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut float = false;
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    float = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = line[start..i].to_string();
            out.push((if float { Tok::Float(text) } else { Tok::Int(text) }, start));
            continue;
        }
        match PUNCT.iter().find(|p| line[i..].starts_with(**p)) {
            Some(&"#") => break,
            Some(p) => {
                out.push((Tok::Punct(p), start));
                i += p.len();
            }
            None => {
                let ch = line[i..].chars().next().unwrap();
                return Err(ParseError {
                    pos: start,
                    expected: BTreeSet::new(),
                    found: format!("`{ch}`"),
                    message: Some(format!("unexpected character `{ch}`")),
                });
            }
        }
    }
    out.push((Tok::End, line.len()));
    Ok(out)
}

/// What the parser needs from the session.
pub trait Env {
    fn symbols(&self) -> &SymbolTable;
    fn group(&self, name: &str) -> Option<ElcaGroup>;
    fn is_bound(&self, name: &str) -> bool;
}

/// An environment with only a symbol table.
pub struct Symbols<'a>(pub &'a SymbolTable);

impl Env for Symbols<'_> {
    fn symbols(&self) -> &SymbolTable {
        self.0
    }
    fn group(&self, _: &str) -> Option<ElcaGroup> {
        None
    }
    fn is_bound(&self, _: &str) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Kernel,
    Coker,
    Closure,
    Classify,
    Dual,
    Pullback,
    Bicartesian,
    Ghost,
    Decompose,
    Normalize,
    Theta,
    ThetaInv,
    Completion,
    Precompact,
    Isogeny,
    WeakDual,
    RoofZero,
    RoofEq,
    Show,
}

impl Op {
    pub const ALL: [Op; 19] = [
        Op::Kernel,
        Op::Coker,
        Op::Closure,
        Op::Classify,
        Op::Dual,
        Op::Pullback,
        Op::Bicartesian,
        Op::Ghost,
        Op::Decompose,
        Op::Normalize,
        Op::Theta,
        Op::ThetaInv,
        Op::Completion,
        Op::Precompact,
        Op::Isogeny,
        Op::WeakDual,
        Op::RoofZero,
        Op::RoofEq,
        Op::Show,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::Kernel => "kernel",
            Op::Coker => "coker",
            Op::Closure => "closure",
            Op::Classify => "classify",
            Op::Dual => "dual",
            Op::Pullback => "pullback",
            Op::Bicartesian => "bicartesian?",
            Op::Ghost => "ghost?",
            Op::Decompose => "decompose",
            Op::Normalize => "normalize",
            Op::Theta => "theta",
            Op::ThetaInv => "thetainv",
            Op::Completion => "completion",
            Op::Precompact => "precompact?",
            Op::Isogeny => "isogeny?",
            Op::WeakDual => "weakdual",
            Op::RoofZero => "roofzero?",
            Op::RoofEq => "roofeq?",
            Op::Show => "show",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Op::Pullback | Op::RoofEq => 2,
            Op::Bicartesian => 4,
            _ => 1,
        }
    }

    fn from_name(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|o| o.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    Finite,
    Shadow,
    Dual,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Name(String),
    Group(ElcaGroup),
    Morphism(ElcaMorphism),
    /// A heart object with the given differential.
    Object(Box<Expr>),
    Classical(ElcaGroup),
    Pga(Box<Expr>),
    PgaMap { source: String, target: String, matrix: Vec<Vec<Int>> },
    IdentityRoof(String),
    Roof { source: String, apex: String, target: String, legs: [String; 4] },
    Query(Op, Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Empty,
    Symbol { name: String, shadow: Option<f64> },
    Reciprocal { name: String, of: String },
    Let { name: String, expr: Expr },
    Query(Op, Vec<String>),
    Check { oracle: Oracle, target: String, trials: Option<usize> },
}

const KEYWORDS: [&str; 9] = ["symbol", "let", "mor", "obj", "pga", "pgamor", "roof", "check", "classical"];
const GROUP_LETTERS: [&str; 3] = ["R", "Z", "T"];

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    furthest: usize,
    expected: BTreeSet<String>,
    env: &'a dyn Env,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(line: &str, env: &'a dyn Env) -> PResult<Self> {
        Ok(Parser { toks: tokenize(line)?, at: 0, furthest: 0, expected: BTreeSet::new(), env })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn note(&mut self, what: &str) {
        let p = self.pos();
        if p > self.furthest {
            self.furthest = p;
            self.expected.clear();
        }
        if p == self.furthest {
            self.expected.insert(what.to_string());
        }
    }

    fn fail<T>(&self) -> PResult<T> {
        let found = self.toks.iter().find(|(_, p)| *p >= self.furthest).map(|(t, _)| t.to_string());
        Err(ParseError {
            pos: self.furthest,
            expected: self.expected.clone(),
            found: found.unwrap_or_else(|| Tok::End.to_string()),
            message: None,
        })
    }

    fn semantic<T>(&self, pos: usize, message: String) -> PResult<T> {
        Err(ParseError { pos, expected: BTreeSet::new(), found: String::new(), message: Some(message) })
    }

    fn eat(&mut self, p: &'static str) -> bool {
        if self.peek() == &Tok::Punct(p) {
            self.at += 1;
            true
        } else {
            self.note(&format!("`{p}`"));
            false
        }
    }

    fn expect(&mut self, p: &'static str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.fail()
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == w) {
            self.at += 1;
            true
        } else {
            self.note(&format!("`{w}`"));
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        if let Tok::Ident(s) = self.peek() {
            let s = s.clone();
            self.at += 1;
            Ok(s)
        } else {
            self.note(what);
            self.fail()
        }
    }

    fn binding_name(&mut self) -> PResult<String> {
        let pos = self.pos();
        let n = self.ident("name")?;
        let n_str = n.as_str();
        if GROUP_LETTERS.contains(&n_str) || KEYWORDS.contains(&n_str) || Op::from_name(n_str).is_some() || n.ends_with('?') {
            return self.semantic(pos, format!("`{n}` is reserved"));
        }
        Ok(n)
    }

    fn int(&mut self) -> PResult<Int> {
        if let Tok::Int(s) = self.peek() {
            let v = s.parse().expect("digits");
            self.at += 1;
            Ok(v)
        } else {
            self.note("integer");
            self.fail()
        }
    }

    fn small(&mut self) -> PResult<usize> {
        let pos = self.pos();
        let n = self.int()?;
        match usize::try_from(&n) {
            Ok(v) if v <= 64 => Ok(v),
            _ => self.semantic(pos, format!("exponent {n} is too large")),
        }
    }

    fn end(&mut self) -> PResult<()> {
        if self.peek() == &Tok::End {
            Ok(())
        } else {
            self.note("end of line");
            self.fail()
        }
    }

    pub fn group(&mut self) -> PResult<ElcaGroup> {
        if matches!(self.peek(), Tok::Int(s) if s == "0") {
            self.at += 1;
            return Ok(ElcaGroup::zero());
        }
        self.note("`0`");
        let (mut a, mut b, mut c) = (0, 0, 0);
        let mut orders: Vec<Int> = Vec::new();
        loop {
            let pos = self.pos();
            let name = self.ident("group term")?;
            match name.as_str() {
                "R" | "T" => {
                    let n = if self.eat("^") { self.small()? } else { 1 };
                    if name == "R" {
                        a += n;
                    } else {
                        c += n;
                    }
                }
                "Z" => {
                    if self.eat("^") {
                        b += self.small()?;
                    } else if self.eat("/") {
                        let p = self.pos();
                        let d = self.int()?;
                        if d.is_zero() {
                            return self.semantic(p, "cyclic order must be positive".into());
                        }
                        orders.push(d);
                    } else {
                        b += 1;
                    }
                }
                other => match self.env.group(other) {
                    Some(g) => {
                        a += g.vector_rank;
                        b += g.lattice_rank;
                        c += g.torus_rank;
                        orders.extend(g.torsion.iter().cloned());
                    }
                    None => return self.semantic(pos, format!("`{other}` is not a group")),
                },
            }
            if !self.eat("+") {
                break;
            }
        }
        Ok(ElcaGroup::with_orders(a, b, c, &orders))
    }

    fn rational(&mut self) -> PResult<Rat> {
        let n = self.int()?;
        if self.eat("/") {
            let p = self.pos();
            let d = self.int()?;
            if d.is_zero() {
                return self.semantic(p, "division by zero".into());
            }
            Ok(Rat::new(n, d))
        } else {
            Ok(Rat::from_integer(n))
        }
    }

    fn symbol(&mut self) -> PResult<Scalar> {
        let pos = self.pos();
        let name = self.ident("symbol")?;
        match self.env.symbols().lookup(&name) {
            Some(a) => Ok(Scalar::atom(a)),
            None => self.semantic(pos, format!("unknown symbol `{name}`")),
        }
    }

    fn sterm(&mut self) -> PResult<Scalar> {
        if matches!(self.peek(), Tok::Int(_)) {
            let q = self.rational()?;
            if self.eat("*") {
                Ok(self.symbol()?.scale(&q))
            } else {
                Ok(Scalar::from_rat(q))
            }
        } else {
            self.note("integer");
            self.symbol()
        }
    }

    pub fn scalar(&mut self) -> PResult<Scalar> {
        let neg = self.eat("-");
        let mut s = self.sterm()?;
        if neg {
            s = s.neg();
        }
        loop {
            if self.eat("+") {
                s = s.add(&self.sterm()?);
            } else if self.eat("-") {
                s = s.sub(&self.sterm()?);
            } else {
                return Ok(s);
            }
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat("]") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn matrix(&mut self) -> PResult<Vec<Vec<Scalar>>> {
        self.list(|p| p.list(Self::scalar))
    }

    fn int_matrix(&mut self) -> PResult<Vec<Vec<Int>>> {
        self.list(|p| {
            p.list(|q| {
                let neg = q.eat("-");
                let n = q.int()?;
                Ok(if neg { -n } else { n })
            })
        })
    }

    pub fn morphism_literal(&mut self) -> PResult<ElcaMorphism> {
        let g = self.group()?;
        self.expect("->")?;
        self.morphism_rest(g)
    }

    fn morphism_rest(&mut self, g: ElcaGroup) -> PResult<ElcaMorphism> {
        let h = self.group()?;
        self.expect("=")?;
        let pos = self.pos();
        let rows = self.matrix()?;
        if rows.len() != h.dim() || rows.iter().any(|r| r.len() != g.dim()) {
            return self.semantic(pos, format!("matrix must have {} rows of {} entries", h.dim(), g.dim()));
        }
        ElcaMorphism::from_rows(g, h, rows).or_else(|e| self.semantic(pos, e.to_string()))
    }

    fn query_args(&mut self, op: Op) -> PResult<Vec<String>> {
        let mut args = Vec::new();
        for _ in 0..op.arity() {
            args.push(self.ident("name")?);
        }
        Ok(args)
    }

    fn expr(&mut self) -> PResult<Expr> {
        if let Tok::Ident(w) = self.peek().clone() {
            if let Some(op) = Op::from_name(&w) {
                if op != Op::Show {
                    self.at += 1;
                    return Ok(Expr::Query(op, self.query_args(op)?));
                }
            }
            if self.env.group(&w).is_none() && self.env.is_bound(&w) && self.peek_at(1) == &Tok::End {
                self.at += 1;
                return Ok(Expr::Name(w));
            }
        }
        self.note("command");
        let g = self.group()?;
        if self.eat("->") {
            Ok(Expr::Morphism(self.morphism_rest(g)?))
        } else {
            Ok(Expr::Group(g))
        }
    }

    fn command(&mut self) -> PResult<Command> {
        if self.peek() == &Tok::End {
            return Ok(Command::Empty);
        }
        let word = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => {
                self.note("command");
                return self.fail();
            }
        };
        self.at += 1;
        let cmd = match word.as_str() {
            "symbol" => {
                let name = self.ident("symbol name")?;
                if self.eat("=") {
                    let pos = self.pos();
                    let one = self.int()?;
                    if !one.is_one() {
                        return self.semantic(pos, "a reciprocal is written `1/name`".into());
                    }
                    self.expect("/")?;
                    let of = self.ident("symbol")?;
                    Command::Reciprocal { name, of }
                } else {
                    let neg = self.eat("-");
                    let shadow = match self.peek().clone() {
                        Tok::Int(s) | Tok::Float(s) => {
                            self.at += 1;
                            let v: f64 = s.parse().expect("numeric literal");
                            Some(if neg { -v } else { v })
                        }
                        _ if neg => {
                            self.note("number");
                            return self.fail();
                        }
                        _ => {
                            self.note("number");
                            None
                        }
                    };
                    Command::Symbol { name, shadow }
                }
            }
            "let" => {
                let name = self.binding_name()?;
                self.expect("=")?;
                Command::Let { name, expr: self.expr()? }
            }
            "mor" => {
                let name = self.binding_name()?;
                self.expect(":")?;
                Command::Let { name, expr: Expr::Morphism(self.morphism_literal()?) }
            }
            "obj" => {
                let name = self.binding_name()?;
                let expr = if self.eat(":") {
                    Expr::Object(Box::new(Expr::Morphism(self.morphism_literal()?)))
                } else {
                    self.expect("=")?;
                    if self.eat_word("classical") {
                        Expr::Classical(self.group()?)
                    } else {
                        Expr::Object(Box::new(Expr::Name(self.ident("name")?)))
                    }
                };
                Command::Let { name, expr }
            }
            "pga" => {
                let name = self.binding_name()?;
                let expr = if self.eat(":") {
                    Expr::Pga(Box::new(Expr::Morphism(self.morphism_literal()?)))
                } else {
                    self.expect("=")?;
                    Expr::Pga(Box::new(Expr::Name(self.ident("name")?)))
                };
                Command::Let { name, expr }
            }
            "pgamor" => {
                let name = self.binding_name()?;
                self.expect(":")?;
                let source = self.ident("name")?;
                self.expect("->")?;
                let target = self.ident("name")?;
                self.expect("=")?;
                Command::Let { name, expr: Expr::PgaMap { source, target, matrix: self.int_matrix()? } }
            }
            "roof" => {
                let name = self.binding_name()?;
                if self.eat("=") {
                    if !self.eat_word("id") {
                        return self.fail();
                    }
                    Command::Let { name, expr: Expr::IdentityRoof(self.ident("name")?) }
                } else {
                    self.expect(":")?;
                    let source = self.ident("name")?;
                    self.expect("<-")?;
                    let apex = self.ident("name")?;
                    self.expect("->")?;
                    let target = self.ident("name")?;
                    self.expect("=")?;
                    let mut legs: [String; 4] = Default::default();
                    for k in 0..2 {
                        if k == 1 {
                            self.expect(",")?;
                        }
                        self.expect("(")?;
                        legs[2 * k] = self.ident("name")?;
                        self.expect(",")?;
                        legs[2 * k + 1] = self.ident("name")?;
                        self.expect(")")?;
                    }
                    Command::Let { name, expr: Expr::Roof { source, apex, target, legs } }
                }
            }
            "check" => {
                let oracle = match self.ident("oracle")?.as_str() {
                    "finite" => Oracle::Finite,
                    "shadow" => Oracle::Shadow,
                    "dual" => Oracle::Dual,
                    _ => {
                        self.at -= 1;
                        for o in ["`finite`", "`shadow`", "`dual`"] {
                            self.note(o);
                        }
                        self.at += 1;
                        return self.fail();
                    }
                };
                let target = self.ident("name")?;
                let trials = if matches!(self.peek(), Tok::Int(_)) {
                    let pos = self.pos();
                    let n = self.int()?;
                    Some(usize::try_from(&n).ok().filter(|&t| t <= 10_000).map_or_else(
                        || self.semantic(pos, "trial count must be at most 10000".into()),
                        Ok,
                    )?)
                } else {
                    self.note("integer");
                    None
                };
                Command::Check { oracle, target, trials }
            }
            w => match Op::from_name(w) {
                Some(op) => Command::Query(op, self.query_args(op)?),
                None => {
                    self.at -= 1;
                    self.note("command");
                    return self.fail();
                }
            },
        };
        self.end()?;
        Ok(cmd)
    }
}

pub fn parse_command(line: &str, env: &dyn Env) -> Result<Command, ParseError> {
    Parser::new(line, env)?.command()
}

fn whole<'e, T>(line: &str, env: &'e dyn Env, f: impl FnOnce(&mut Parser<'e>) -> PResult<T>) -> Result<T, ParseError> {
    let mut p = Parser::new(line, env)?;
    let v = f(&mut p)?;
    p.end()?;
    Ok(v)
}

pub fn parse_group(text: &str, env: &dyn Env) -> Result<ElcaGroup, ParseError> {
    whole(text, env, Parser::group)
}

pub fn parse_scalar(text: &str, env: &dyn Env) -> Result<Scalar, ParseError> {
    whole(text, env, Parser::scalar)
}

pub fn parse_morphism(text: &str, env: &dyn Env) -> Result<ElcaMorphism, ParseError> {
    whole(text, env, Parser::morphism_literal)
}
