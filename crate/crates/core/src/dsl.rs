//! Text syntax for SV expressions, space specs, couples and reiteration cases.
//!
//! ```text
//! classic(theta=1/2, b=l(-1), E=Lq(inf))
//! RL(theta0=1/4, theta1=3/4, a0=1, a1=1, b0=l(-2), b1=l(1,-2), E0=Lq(1), E1=Lq(1), F0=Lq(2), F1=Lq(2))
//! reit(couple=RR(...), theta=0, b=l(-2), E=Lq(1))
//! ```
//!
//! Every failure is an [`Error::Syntax`] carrying the byte span of the offending token.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::holmstedt::{CoupleCase, CoupleParams};
use crate::reiteration::ReiterationCase;
use crate::sampling::Domain;
use crate::scalar::{Lq, Scalar};
use crate::spaces::{ExtremeKind, SpaceSpec};
use crate::svcalc::SvExpr;

#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Space(SpaceSpec),
    Couple(CoupleCase),
    Reiteration(ReiterationCase),
}

impl fmt::Display for Parsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parsed::Space(s) => write!(f, "{s}"),
            Parsed::Couple(c) => write!(f, "{c}"),
            Parsed::Reiteration(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Display for CoupleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        write!(
            f,
            "{}(theta0={}, theta1={}, a0={}, a1={}, b0={}, b1={}, E0={}, E1={}, F0={}, F1={}, domain={})",
            self.kind.name(),
            p.theta0,
            p.theta1,
            p.a0,
            p.a1,
            p.b0,
            p.b1,
            p.e0,
            p.e1,
            p.f0,
            p.f1,
            self.domain.name()
        )
    }
}

impl fmt::Display for ReiterationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reit(couple={}, theta={}, b={}, E={})", self.couple, self.theta, self.b, self.e)
    }
}

pub fn parse_spec(src: &str) -> Result<Parsed> {
    let run = || {
        let mut p = Parser::new(src)?;
        let out = p.top()?;
        p.expect_eof()?;
        Ok(out)
    };
    run().map_err(|e| clamp(src, e))
}

pub fn parse_space(src: &str) -> Result<SpaceSpec> {
    match parse_spec(src)? {
        Parsed::Space(s) => Ok(s),
        _ => Err(syntax(0, src.len(), "expected a space spec")),
    }
}

pub fn parse_couple(src: &str) -> Result<CoupleCase> {
    match parse_spec(src)? {
        Parsed::Couple(c) => Ok(c),
        _ => Err(syntax(0, src.len(), "expected a couple (RR/LL/RL/LR with theta0, theta1)")),
    }
}

pub fn parse_reiteration(src: &str) -> Result<ReiterationCase> {
    match parse_spec(src)? {
        Parsed::Reiteration(r) => Ok(r),
        _ => Err(syntax(0, src.len(), "expected reit(...)")),
    }
}

pub fn parse_sv(src: &str) -> Result<SvExpr> {
    let run = || {
        let mut p = Parser::new(src)?;
        let e = p.expr()?;
        p.expect_eof()?;
        Ok(e)
    };
    run().map_err(|e| clamp(src, e))
}

/// Keeps spans inside the source; an error at end of input gets the empty span there.
fn clamp(src: &str, e: Error) -> Error {
    match e {
        Error::Syntax { start, end, msg } => {
            let start = start.min(src.len());
            Error::Syntax { start, end: end.clamp(start, src.len()), msg }
        }
        other => other,
    }
}

/// Source line with a caret marker under the span of a syntax error.
pub fn caret(src: &str, err: &Error) -> Option<String> {
    let Error::Syntax { start, end, .. } = err else { return None };
    let start = (*start).min(src.len());
    let line_start = src[..start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = src[start..].find('\n').map_or(src.len(), |i| start + i);
    let width = end.saturating_sub(start).clamp(1, line_end.saturating_sub(start).max(1));
    let pad = src[line_start..start].chars().count();
    Some(format!("{}\n{}{}", &src[line_start..line_end], " ".repeat(pad), "^".repeat(width)))
}

fn syntax(start: usize, end: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { start, end, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Star,
    Caret,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < b.len() {
        let c = b[i];
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'=' => Some(Tok::Eq),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Token { tok: t, start, end: i + 1 });
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), start, end: i });
            continue;
        }
        let signed = (c == b'-' || c == b'+') && i + 1 < b.len() && (b[i + 1].is_ascii_digit() || b[i + 1] == b'.');
        if c.is_ascii_digit() || c == b'.' || signed {
            if signed {
                i += 1;
            }
            let j = digits(i);
            let mut any = j > i;
            i = j;
            if i < b.len() && b[i] == b'.' {
                let j = digits(i + 1);
                any |= j > i + 1;
                i = j;
            }
            if !any {
                return Err(syntax(start, i.max(start + 1), "malformed number"));
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
                    j += 1;
                }
                let k = digits(j);
                if k == j {
                    return Err(syntax(start, k, "malformed exponent"));
                }
                i = k;
            }
            if i < b.len() && b[i] == b'/' {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
                    j += 1;
                }
                let k = digits(j);
                if k == j {
                    return Err(syntax(start, k.max(i + 1), "malformed denominator"));
                }
                i = k;
            }
            out.push(Token { tok: Tok::Num(src[start..i].to_string()), start, end: i });
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(syntax(start, start + ch.len_utf8(), format!("unexpected character '{ch}'")));
    }
    out.push(Token { tok: Tok::Eof, start: src.len(), end: src.len() });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Num,
    Sv,
    Lq,
    /// number or `inf`
    Exponent,
    Couple,
    Domain,
}

#[derive(Debug, Clone)]
enum Value {
    Num(Scalar),
    Sv(SvExpr),
    Lq(Lq),
    Couple(CoupleCase),
    Domain(Domain),
}

/// Parsed `key=value` arguments of one call, with value spans.
struct Args {
    call: (usize, usize),
    close: (usize, usize),
    map: BTreeMap<String, (Value, usize, usize)>,
}

impl Args {
    fn get(&self, k: &str) -> Result<&(Value, usize, usize)> {
        self.map
            .get(k)
            .ok_or_else(|| syntax(self.close.0, self.close.1, format!("missing argument '{k}'")))
    }

    fn num(&self, k: &str) -> Result<Scalar> {
        match self.get(k)?.0 {
            Value::Num(x) => Ok(x),
            _ => unreachable!(),
        }
    }

    fn sv(&self, k: &str) -> Result<SvExpr> {
        match &self.get(k)?.0 {
            Value::Sv(e) => Ok(e.clone()),
            _ => unreachable!(),
        }
    }

    fn lq(&self, k: &str) -> Result<Lq> {
        match self.get(k)?.0 {
            Value::Lq(q) => Ok(q),
            _ => unreachable!(),
        }
    }

    fn span(&self, k: &str) -> (usize, usize) {
        self.map.get(k).map_or(self.call, |v| (v.1, v.2))
    }

    /// Re-raise a validation error against the span of `key`, or the whole call.
    fn at(&self, key: Option<&str>, e: Error) -> Error {
        let (s, t) = key.map_or(self.call, |k| self.span(k));
        match e {
            Error::Syntax { .. } => e,
            other => syntax(s, t, other.to_string()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

const MAX_DEPTH: usize = 64;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        Ok(Parser { src, toks: lex(src)?, pos: 0, depth: 0 })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn describe(t: &Token, src: &str) -> String {
        match t.tok {
            Tok::Eof => "end of input".into(),
            _ => format!("'{}'", &src[t.start..t.end]),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(syntax(t.start, t.end.max(t.start + 1), format!("expected {what}, found {}", Self::describe(&t, self.src))))
        }
    }

    fn expect_eof(&mut self) -> Result<()> {
        let t = self.peek().clone();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(syntax(t.start, t.end, format!("trailing input {}", Self::describe(&t, self.src))))
        }
    }

    fn enter(&mut self, at: &Token) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(at.start, at.end, "nesting too deep"));
        }
        Ok(())
    }

    fn number(&mut self) -> Result<(Scalar, usize, usize)> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(s) => {
                let x = Scalar::parse(s).map_err(|e| syntax(t.start, t.end, e.to_string()))?;
                Ok((x, t.start, t.end))
            }
            _ => Err(syntax(t.start, t.end.max(t.start + 1), format!("expected a number, found {}", Self::describe(&t, self.src)))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token)> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            _ => Err(syntax(t.start, t.end.max(t.start + 1), format!("expected {what}, found {}", Self::describe(&t, self.src)))),
        }
    }

    /// expr = term ('*' term)*, nested products flattened
    fn expr(&mut self) -> Result<SvExpr> {
        let mut parts = Vec::new();
        loop {
            match self.term()? {
                SvExpr::Product(v) => parts.extend(v),
                e => parts.push(e),
            }
            if self.peek().tok == Tok::Star {
                self.bump();
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { SvExpr::Product(parts) })
    }

    /// term = atom ('^' number)*
    fn term(&mut self) -> Result<SvExpr> {
        let mut e = self.atom()?;
        while self.peek().tok == Tok::Caret {
            self.bump();
            let (r, _, _) = self.number()?;
            e = SvExpr::Power(Box::new(e), r);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<SvExpr> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(_) => {
                let (c, s, e) = self.number()?;
                SvExpr::constant(c).map_err(|err| syntax(s, e, err.to_string()))
            }
            Tok::LParen => {
                self.bump();
                self.enter(&t)?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.enter(&t)?;
                self.expect(Tok::LParen, "'('")?;
                let out = match name.as_str() {
                    "l" => {
                        let (a, _, _) = self.number()?;
                        let b = if self.peek().tok == Tok::Comma {
                            self.bump();
                            self.number()?.0
                        } else {
                            a
                        };
                        SvExpr::LogPow(a, b)
                    }
                    "bar" => SvExpr::Bar(Box::new(self.expr()?)),
                    "compose" => {
                        let outer = self.expr()?;
                        self.expect(Tok::Comma, "','")?;
                        let (gamma, gs, ge) = self.number()?;
                        if gamma.signum() <= 0 {
                            return Err(syntax(gs, ge, format!("compose exponent must be positive, got {gamma}")));
                        }
                        self.expect(Tok::Comma, "','")?;
                        let inner = self.expr()?;
                        SvExpr::Compose { outer: Box::new(outer), gamma, inner: Box::new(inner) }
                    }
                    "env" => {
                        return Err(syntax(t.start, t.end, "numeric envelopes cannot be written as text"));
                    }
                    other => {
                        return Err(syntax(t.start, t.end, format!("unknown function '{other}'; expected l, bar or compose")));
                    }
                };
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(out)
            }
            _ => Err(syntax(t.start, t.end.max(t.start + 1), format!("expected an expression, found {}", Self::describe(&t, self.src)))),
        }
    }

    fn lq(&mut self) -> Result<Lq> {
        let (name, t) = self.ident("Lq(...)")?;
        if name != "Lq" {
            return Err(syntax(t.start, t.end, format!("expected Lq(...), found '{name}'")));
        }
        self.expect(Tok::LParen, "'('")?;
        let q = if matches!(&self.peek().tok, Tok::Ident(s) if s == "inf") {
            self.bump();
            Lq::Inf
        } else {
            let (q, s, e) = self.number()?;
            Lq::new(q).map_err(|err| syntax(s, e, err.to_string()))?
        };
        self.expect(Tok::RParen, "')'")?;
        Ok(q)
    }

    fn exponent(&mut self) -> Result<Lq> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "inf") {
            self.bump();
            return Ok(Lq::Inf);
        }
        Ok(Lq::Finite(self.number()?.0))
    }

    fn value(&mut self, kind: Kind) -> Result<Value> {
        Ok(match kind {
            Kind::Num => Value::Num(self.number()?.0),
            Kind::Sv => Value::Sv(self.expr()?),
            Kind::Lq => Value::Lq(self.lq()?),
            Kind::Exponent => Value::Lq(self.exponent()?),
            Kind::Couple => {
                let t = self.peek().clone();
                match self.top()? {
                    Parsed::Couple(c) => Value::Couple(c),
                    _ => return Err(syntax(t.start, t.end, "expected a couple")),
                }
            }
            Kind::Domain => {
                let (name, t) = self.ident("unit or full")?;
                match name.as_str() {
                    "unit" => Value::Domain(Domain::Unit),
                    "full" => Value::Domain(Domain::Full),
                    _ => return Err(syntax(t.start, t.end, format!("unknown domain '{name}'; expected unit or full"))),
                }
            }
        })
    }

    /// `(k=v, ...)` after a call name; keys are checked against `schema`.
    fn args(&mut self, name_tok: &Token, schema: &[(&str, Kind)], optional: &[&str]) -> Result<Args> {
        self.expect(Tok::LParen, "'('")?;
        let mut map = BTreeMap::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let (key, kt) = self.ident("an argument name")?;
                let Some(&(_, kind)) = schema.iter().find(|(k, _)| *k == key) else {
                    let known: Vec<&str> = schema.iter().map(|(k, _)| *k).collect();
                    return Err(syntax(kt.start, kt.end, format!("unknown argument '{key}'; expected one of {}", known.join(", "))));
                };
                if map.contains_key(&key) {
                    return Err(syntax(kt.start, kt.end, format!("duplicate argument '{key}'")));
                }
                self.expect(Tok::Eq, "'='")?;
                let vs = self.peek().start;
                let v = self.value(kind)?;
                let ve = self.toks[self.pos.saturating_sub(1)].end;
                map.insert(key, (v, vs, ve));
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let close = self.expect(Tok::RParen, "',' or ')'")?;
        let args = Args { call: (name_tok.start, close.end), close: (close.start, close.end), map };
        for (k, _) in schema {
            if !optional.contains(k) {
                args.get(k)?;
            }
        }
        Ok(args)
    }

    /// RR/LL/RL/LR name both a couple and an extreme space; `theta0` picks the couple.
    fn is_couple_call(&self) -> bool {
        let mut depth = 0usize;
        for w in self.toks[self.pos..].windows(2) {
            match &w[0].tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    if depth <= 1 {
                        return false;
                    }
                    depth -= 1;
                }
                Tok::Ident(s) if depth == 1 && w[1].tok == Tok::Eq => {
                    if s == "theta0" || s == "theta1" {
                        return true;
                    }
                }
                Tok::Eof => return false,
                _ => {}
            }
        }
        false
    }

    fn top(&mut self) -> Result<Parsed> {
        let (name, nt) = self.ident("a space, couple or reit(...)")?;
        self.enter(&nt)?;
        let out = self.call(&name, &nt)?;
        self.depth -= 1;
        Ok(out)
    }

    fn call(&mut self, name: &str, nt: &Token) -> Result<Parsed> {
        use Kind::*;
        let space = |a: &Args, s: SpaceSpec| -> Result<Parsed> {
            s.validate().map_err(|e| {
                let key = ["theta", "p", "alpha", "q"]
                    .into_iter()
                    .find(|k| e.to_string().contains(&format!("{k} ")) && a.map.contains_key(*k));
                a.at(key, e)
            })?;
            Ok(Parsed::Space(s))
        };
        if let Some(kind) = ExtremeKind::parse(name) {
            if self.is_couple_call() {
                return self.couple(kind, nt);
            }
            let a = self.args(nt, &[("theta", Num), ("c", Sv), ("E", Lq), ("b", Sv), ("F", Lq), ("a", Sv), ("G", Lq)], &[])?;
            let s = SpaceSpec::Extreme {
                kind,
                theta: a.num("theta")?,
                c: a.sv("c")?,
                e: a.lq("E")?,
                b: a.sv("b")?,
                f: a.lq("F")?,
                a: a.sv("a")?,
                g: a.lq("G")?,
            };
            return space(&a, s);
        }
        match name {
            "classic" => {
                let a = self.args(nt, &[("theta", Num), ("b", Sv), ("E", Lq)], &[])?;
                let s = SpaceSpec::Classic { theta: a.num("theta")?, b: a.sv("b")?, e: a.lq("E")? };
                space(&a, s)
            }
            "R" | "L" => {
                let a = self.args(nt, &[("theta", Num), ("b", Sv), ("E", Lq), ("a", Sv), ("F", Lq)], &[])?;
                let (theta, b, e, av, f) = (a.num("theta")?, a.sv("b")?, a.lq("E")?, a.sv("a")?, a.lq("F")?);
                let s = if name == "R" {
                    SpaceSpec::R { theta, b, e, a: av, f }
                } else {
                    SpaceSpec::L { theta, b, e, a: av, f }
                };
                space(&a, s)
            }
            "grand" | "small" | "A" | "B" => {
                let with_e = matches!(name, "A" | "B");
                let schema: &[(&str, Kind)] = if with_e {
                    &[("p", Num), ("alpha", Num), ("E", Lq)]
                } else {
                    &[("p", Num), ("alpha", Num)]
                };
                let a = self.args(nt, schema, &[])?;
                let (p, alpha) = (a.num("p")?, a.num("alpha")?);
                let s = match name {
                    "grand" => SpaceSpec::Grand { p, alpha },
                    "small" => SpaceSpec::Small { p, alpha },
                    "A" => SpaceSpec::AType { p, alpha, e: a.lq("E")? },
                    _ => SpaceSpec::BType { p, alpha, e: a.lq("E")? },
                };
                space(&a, s)
            }
            "lk" => {
                let a = self.args(nt, &[("p", Exponent), ("b", Sv), ("E", Lq)], &[])?;
                let s = SpaceSpec::LorentzKaramata { p: a.lq("p")?, b: a.sv("b")?, e: a.lq("E")? };
                space(&a, s)
            }
            "gamma" => {
                let a = self.args(nt, &[("p", Num), ("q", Num), ("uw1", Sv), ("w2", Sv)], &[])?;
                let s = SpaceSpec::GammaDouble { p: a.num("p")?, q: a.num("q")?, uw1: a.sv("uw1")?, w2: a.sv("w2")? };
                space(&a, s)
            }
            "reit" => {
                let a = self.args(nt, &[("couple", Couple), ("theta", Num), ("b", Sv), ("E", Lq)], &[])?;
                let couple = match &a.get("couple")?.0 {
                    Value::Couple(c) => c.clone(),
                    _ => unreachable!(),
                };
                let theta = a.num("theta")?;
                if theta < Scalar::zero() || theta > Scalar::one() {
                    let (s, e) = a.span("theta");
                    return Err(syntax(s, e, format!("0 <= theta <= 1 required, got {theta}")));
                }
                let r = ReiterationCase::new(couple, theta, a.sv("b")?, a.lq("E")?).map_err(|e| a.at(Some("b"), e))?;
                Ok(Parsed::Reiteration(r))
            }
            _ => Err(syntax(
                nt.start,
                nt.end,
                format!("unknown spec '{name}'; expected classic, R, L, RR, LL, RL, LR, grand, small, lk, gamma, A, B or reit"),
            )),
        }
    }

    fn couple(&mut self, kind: ExtremeKind, nt: &Token) -> Result<Parsed> {
        use Kind::*;
        let schema = [
            ("theta0", Num),
            ("theta1", Num),
            ("a0", Sv),
            ("a1", Sv),
            ("b0", Sv),
            ("b1", Sv),
            ("E0", Lq),
            ("E1", Lq),
            ("F0", Lq),
            ("F1", Lq),
            ("domain", Domain),
        ];
        let a = self.args(nt, &schema, &["domain"])?;
        let (theta0, theta1) = (a.num("theta0")?, a.num("theta1")?);
        if theta0 <= Scalar::zero() {
            let (s, e) = a.span("theta0");
            return Err(syntax(s, e, format!("0 < theta0 required, got {theta0}")));
        }
        if theta1 >= Scalar::one() {
            let (s, e) = a.span("theta1");
            return Err(syntax(s, e, format!("theta1 < 1 required, got {theta1}")));
        }
        if theta0 >= theta1 {
            let (s, e) = a.span("theta1");
            return Err(syntax(s, e, format!("theta0 < theta1 required, got theta0={theta0}, theta1={theta1}")));
        }
        let domain = match a.map.get("domain") {
            Some((Value::Domain(d), _, _)) => *d,
            _ => crate::sampling::Domain::Unit,
        };
        let params = CoupleParams {
            theta0,
            theta1,
            a0: a.sv("a0")?,
            a1: a.sv("a1")?,
            b0: a.sv("b0")?,
            b1: a.sv("b1")?,
            e0: a.lq("E0")?,
            e1: a.lq("E1")?,
            f0: a.lq("F0")?,
            f1: a.lq("F1")?,
        };
        let c = CoupleCase::new(kind, params, domain).map_err(|e| {
            let key = if e.to_string().contains("b0") { "b0" } else { "b1" };
            a.at(Some(key), e)
        })?;
        Ok(Parsed::Couple(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(e: &Error) -> (usize, usize) {
        match e {
            Error::Syntax { start, end, .. } => (*start, *end),
            other => panic!("not a syntax error: {other}"),
        }
    }

    #[test]
    fn classic_example() {
        let p = parse_space("classic(theta=0.5, b=1, E=Lq(inf))").unwrap();
        assert_eq!(p, SpaceSpec::Classic { theta: Scalar::ratio(1, 2), b: SvExpr::Const(Scalar::one()), e: Lq::Inf });
        assert_eq!(p.to_string(), "classic(theta=1/2, b=1, E=Lq(inf))");
    }

    #[test]
    fn couple_example_maps_fields() {
        let src = "RR(theta0=0.25, theta1=0.75, a0=1, a1=1, b0=l(-2), b1=l(-2), E0=Lq(1), E1=Lq(1), F0=Lq(2), F1=Lq(2))";
        let c = parse_couple(src).unwrap();
        assert_eq!(c.kind, ExtremeKind::RR);
        assert_eq!(c.params.theta0, Scalar::ratio(1, 4));
        assert_eq!(c.params.b1, SvExpr::LogPow(Scalar::int(-2), Scalar::int(-2)));
        assert_eq!(c.params.f0, Lq::int(2));
        assert_eq!(c.domain, Domain::Unit);
        let again = parse_couple(&c.to_string()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn grand_canonical() {
        let s = parse_space("grand( p = 2 ,alpha=1 )").unwrap();
        assert_eq!(s.to_string(), "grand(p=2, alpha=1)");
    }

    #[test]
    fn theta_order_is_reported_on_theta1() {
        let src = "LL(theta0=3/4, theta1=1/4, a0=1, a1=1, b0=1, b1=1, E0=Lq(1), E1=Lq(1), F0=Lq(2), F1=Lq(2))";
        let e = parse_spec(src).unwrap_err();
        assert!(e.to_string().contains("theta0 < theta1 required"), "{e}");
        let (s, t) = span(&e);
        assert_eq!(&src[s..t], "1/4");
    }

    #[test]
    fn positioned_errors() {
        for (src, tok) in [
            ("classic(theta=1/2, b=1, E=Lq(0.5))", "0.5"),
            ("classic(theta=1/2, b=1, E=Lq(inf)", ""),
            ("classic(theta=1/2, b=foo(1), E=Lq(inf))", "foo"),
            ("classic(theta=1/2, b=1, b=1, E=Lq(inf))", "b"),
            ("classic(theta=2, b=1, E=Lq(inf))", "2"),
            ("wat(p=2)", "wat"),
            ("grand(p=2, alpha=1) x", "x"),
            ("grand(p=2, alpha=1e)", "1e"),
            ("classic(theta=1/2, b=-3, E=Lq(inf))", "-3"),
            ("classic(theta=1/2, b=1, E=Lq(inf)) $", "$"),
        ] {
            let e = parse_spec(src).unwrap_err();
            let (s, t) = span(&e);
            assert_eq!(&src[s.min(src.len())..t.min(src.len())], tok, "{src}: {e}");
            assert!(caret(src, &e).is_some());
        }
    }

    #[test]
    fn sv_round_trip_shapes() {
        for src in ["l(1)", "l(1,-2)*bar(l(1/2))", "(l(1)*l(2,0))^-1/2", "(l(1)^2)^3", "compose(l(-1),1/4,l(1)^-1/4)", "2*l(1)"] {
            let e = parse_sv(src).unwrap();
            assert_eq!(e.to_string(), src);
            assert_eq!(parse_sv(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse_sv("(l(1)*l(2))*l(3)").unwrap(), parse_sv("l(1)*l(2)*l(3)").unwrap());
    }

    #[test]
    fn deep_nesting_is_a_diagnostic() {
        let src = format!("{}l(1){}", "(".repeat(500), ")".repeat(500));
        assert!(matches!(parse_sv(&src), Err(Error::Syntax { .. })));
    }
}
