//! A small closed-form expression language with symbolic differentiation.
//!
//! Expressions are trees over numbered variables. They support evaluation,
//! partial derivatives, substitution of variables by expressions, a parser
//! for the usual infix notation and printing with variable names.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Powi(Arc<Expr>, i32),
    Exp(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Sqrt(Arc<Expr>),
}

use Expr::*;

pub fn c(v: f64) -> Expr {
    Const(v)
}

pub fn var(i: usize) -> Expr {
    Var(i)
}

impl Expr {
    pub fn zero() -> Self {
        Const(0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Const(v) if *v == 0.0)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn powi(self, n: i32) -> Expr {
        match (n, self.as_const()) {
            (0, _) => Const(1.0),
            (1, _) => self,
            (_, Some(v)) => Const(v.powi(n)),
            _ => Powi(Arc::new(self), n),
        }
    }

    pub fn exp(self) -> Expr {
        match self.as_const() {
            Some(v) => Const(v.exp()),
            None => Exp(Arc::new(self)),
        }
    }

    pub fn sin(self) -> Expr {
        match self.as_const() {
            Some(v) => Const(v.sin()),
            None => Sin(Arc::new(self)),
        }
    }

    pub fn cos(self) -> Expr {
        match self.as_const() {
            Some(v) => Const(v.cos()),
            None => Cos(Arc::new(self)),
        }
    }

    pub fn sqrt(self) -> Expr {
        match self.as_const() {
            Some(v) => Const(v.sqrt()),
            None => Sqrt(Arc::new(self)),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Const(v) => *v,
            Var(i) => x[*i],
            Add(a, b) => a.eval(x) + b.eval(x),
            Sub(a, b) => a.eval(x) - b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Div(a, b) => a.eval(x) / b.eval(x),
            Neg(a) => -a.eval(x),
            Powi(a, n) => a.eval(x).powi(*n),
            Exp(a) => a.eval(x).exp(),
            Sin(a) => a.eval(x).sin(),
            Cos(a) => a.eval(x).cos(),
            Sqrt(a) => a.eval(x).sqrt(),
        }
    }

    /// Largest variable index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Const(_) => 0,
            Var(i) => i + 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.arity().max(b.arity()),
            Neg(a) | Powi(a, _) | Exp(a) | Sin(a) | Cos(a) | Sqrt(a) => a.arity(),
        }
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Expr {
        match self {
            Const(_) => Expr::zero(),
            Var(j) => Const(if *j == i { 1.0 } else { 0.0 }),
            Add(a, b) => a.diff(i) + b.diff(i),
            Sub(a, b) => a.diff(i) - b.diff(i),
            Mul(a, b) => a.diff(i) * (**b).clone() + (**a).clone() * b.diff(i),
            Div(a, b) => {
                (a.diff(i) * (**b).clone() - (**a).clone() * b.diff(i)) / (**b).clone().powi(2)
            }
            Neg(a) => -a.diff(i),
            Powi(a, n) => Const(*n as f64) * (**a).clone().powi(n - 1) * a.diff(i),
            Exp(a) => self.clone() * a.diff(i),
            Sin(a) => (**a).clone().cos() * a.diff(i),
            Cos(a) => -((**a).clone().sin() * a.diff(i)),
            Sqrt(a) => a.diff(i) / (Const(2.0) * self.clone()),
        }
    }

    /// Replaces `Var(i)` by `subs[i]`.
    pub fn subst(&self, subs: &[Expr]) -> Expr {
        match self {
            Const(v) => Const(*v),
            Var(i) => subs[*i].clone(),
            Add(a, b) => a.subst(subs) + b.subst(subs),
            Sub(a, b) => a.subst(subs) - b.subst(subs),
            Mul(a, b) => a.subst(subs) * b.subst(subs),
            Div(a, b) => a.subst(subs) / b.subst(subs),
            Neg(a) => -a.subst(subs),
            Powi(a, n) => a.subst(subs).powi(*n),
            Exp(a) => a.subst(subs).exp(),
            Sin(a) => a.subst(subs).sin(),
            Cos(a) => a.subst(subs).cos(),
            Sqrt(a) => a.subst(subs).sqrt(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> Display<'a> {
        Display { e: self, names }
    }

    /// Parses infix notation over the given variable names. Recognizes
    /// `+ - * / ^`, `exp sin cos sqrt` and the constant `pi`.
    pub fn parse(src: &str, names: &[&str]) -> Result<Expr> {
        let mut p = Parser { toks: tokenize(src)?, pos: 0, names };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Expr(format!("unexpected trailing input in {src:?}")));
        }
        Ok(e)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Const(a + b),
            (Some(a), _) if a == 0.0 => rhs,
            (_, Some(b)) if b == 0.0 => self,
            _ => Add(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Const(a - b),
            (Some(a), _) if a == 0.0 => -rhs,
            (_, Some(b)) if b == 0.0 => self,
            _ => Sub(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Const(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Expr::zero(),
            (Some(a), _) if a == 1.0 => rhs,
            (_, Some(b)) if b == 1.0 => self,
            _ => Mul(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Const(a / b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 1.0 => self,
            _ => Div(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Const(v) => Const(-v),
            Neg(a) => (*a).clone(),
            e => Neg(Arc::new(e)),
        }
    }
}

pub struct Display<'a> {
    e: &'a Expr,
    names: &'a [&'a str],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.e, self.names, f)
    }
}

fn write_expr(e: &Expr, names: &[&str], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let w = |e: &Expr, f: &mut fmt::Formatter<'_>| write_expr(e, names, f);
    let unary = |name: &str, a: &Expr, f: &mut fmt::Formatter<'_>| {
        write!(f, "{name}(")?;
        write_expr(a, names, f)?;
        write!(f, ")")
    };
    let binary = |op: &str, a: &Expr, b: &Expr, f: &mut fmt::Formatter<'_>| {
        write!(f, "(")?;
        write_expr(a, names, f)?;
        write!(f, " {op} ")?;
        write_expr(b, names, f)?;
        write!(f, ")")
    };
    match e {
        Const(v) => write!(f, "{v}"),
        Var(i) => match names.get(*i) {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "x{i}"),
        },
        Add(a, b) => binary("+", a, b, f),
        Sub(a, b) => binary("-", a, b, f),
        Mul(a, b) => binary("*", a, b, f),
        Div(a, b) => binary("/", a, b, f),
        Neg(a) => unary("-", a, f),
        Powi(a, n) => {
            write!(f, "(")?;
            w(a, f)?;
            write!(f, ")^{n}")
        }
        Exp(a) => unary("exp", a, f),
        Sin(a) => unary("sin", a, f),
        Cos(a) => unary("cos", a, f),
        Sqrt(a) => unary("sqrt", a, f),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == 'e'
                || ((chars[i] == '-' || chars[i] == '+') && i > start && chars[i - 1] == 'e'))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            toks.push(Tok::Num(s.parse().map_err(|_| Error::Expr(format!("bad number {s:?}")))?));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            toks.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character {ch:?} at {i}")));
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn peek_op(&self, op: char) -> bool {
        self.toks.get(self.pos) == Some(&Tok::Op(op))
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.peek_op(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Expr(format!("expected {op:?} at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.peek_op('+') {
                self.pos += 1;
                e = e + self.term()?;
            } else if self.peek_op('-') {
                self.pos += 1;
                e = e - self.term()?;
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.peek_op('*') {
                self.pos += 1;
                e = e * self.unary()?;
            } else if self.peek_op('/') {
                self.pos += 1;
                e = e / self.unary()?;
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.peek_op('^') {
            self.pos += 1;
            let neg = self.peek_op('-');
            if neg {
                self.pos += 1;
            }
            match self.toks.get(self.pos) {
                Some(Tok::Num(n)) if n.fract() == 0.0 => {
                    self.pos += 1;
                    let n = *n as i32;
                    return Ok(base.powi(if neg { -n } else { n }));
                }
                _ => return Err(Error::Expr("exponents must be integer literals".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Const(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.names.iter().position(|n| *n == name) {
                    return Ok(Var(i));
                }
                if name == "pi" {
                    return Ok(Const(std::f64::consts::PI));
                }
                let f: fn(Expr) -> Expr = match name.as_str() {
                    "exp" => Expr::exp,
                    "sin" => Expr::sin,
                    "cos" => Expr::cos,
                    "sqrt" => Expr::sqrt,
                    _ => return Err(Error::Expr(format!("unknown name {name:?}"))),
                };
                self.expect_op('(')?;
                let arg = self.expr()?;
                self.expect_op(')')?;
                Ok(f(arg))
            }
            other => Err(Error::Expr(format!("unexpected token {other:?}"))),
        }
    }
}
