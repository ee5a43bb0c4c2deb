//! A minimal arithmetic expression language in one variable `x`.
//!
//! Grammar: `+ - * / ^`, the functions `exp`, `ln`, `sqrt`, the variable
//! `x`, the constant `pi` and numeric literals. Expressions can be
//! differentiated symbolically; sums of monomials c·x^k are kept in a
//! canonical form so that algebra on the closed-form models stays exact.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
}

use Expr::*;

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Num(v)
    }

    /// c · x^k
    pub fn monomial(c: f64, k: i32) -> Expr {
        match k {
            0 => Num(c),
            1 => Mul(bx(Num(c)), bx(X)),
            _ => Mul(bx(Num(c)), bx(Pow(bx(X), bx(Num(k as f64))))),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Add(bx(a), bx(b))
    }
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Sub(bx(a), bx(b))
    }
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Mul(bx(a), bx(b))
    }
    pub fn div(a: Expr, b: Expr) -> Expr {
        Div(bx(a), bx(b))
    }
    pub fn exp(a: Expr) -> Expr {
        Exp(bx(a))
    }
    pub fn ln(a: Expr) -> Expr {
        Ln(bx(a))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Num(c) => *c,
            X => x,
            Neg(a) => -a.eval(x),
            Add(a, b) => a.eval(x) + b.eval(x),
            Sub(a, b) => a.eval(x) - b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Div(a, b) => a.eval(x) / b.eval(x),
            Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Num(k) if k == k.trunc() && k.abs() < 64.0 => base.powi(k as i32),
                    _ => base.powf(b.eval(x)),
                }
            }
            Exp(a) => a.eval(x).exp(),
            Ln(a) => a.eval(x).ln(),
            Sqrt(a) => a.eval(x).sqrt(),
        }
    }

    /// Symbolic derivative with respect to x, simplified.
    pub fn deriv(&self) -> Expr {
        self.deriv_raw().simplify()
    }

    fn deriv_raw(&self) -> Expr {
        match self {
            Num(_) => Num(0.0),
            X => Num(1.0),
            Neg(a) => Neg(bx(a.deriv_raw())),
            Add(a, b) => Expr::add(a.deriv_raw(), b.deriv_raw()),
            Sub(a, b) => Expr::sub(a.deriv_raw(), b.deriv_raw()),
            Mul(a, b) => Expr::add(
                Expr::mul(a.deriv_raw(), (**b).clone()),
                Expr::mul((**a).clone(), b.deriv_raw()),
            ),
            Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.deriv_raw(), (**b).clone()),
                    Expr::mul((**a).clone(), b.deriv_raw()),
                ),
                Pow(b.clone(), bx(Num(2.0))),
            ),
            Pow(a, b) => {
                if let Some(k) = b.constant() {
                    // d(a^k) = k a^(k-1) a'
                    Expr::mul(
                        Expr::mul(Num(k), Pow(a.clone(), bx(Num(k - 1.0)))),
                        a.deriv_raw(),
                    )
                } else {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    Expr::mul(
                        self.clone(),
                        Expr::add(
                            Expr::mul(b.deriv_raw(), Ln(a.clone())),
                            Expr::div(Expr::mul((**b).clone(), a.deriv_raw()), (**a).clone()),
                        ),
                    )
                }
            }
            Exp(a) => Expr::mul(self.clone(), a.deriv_raw()),
            Ln(a) => Expr::div(a.deriv_raw(), (**a).clone()),
            Sqrt(a) => Expr::div(a.deriv_raw(), Expr::mul(Num(2.0), self.clone())),
        }
    }

    /// Value when the expression does not depend on x.
    pub fn constant(&self) -> Option<f64> {
        match self {
            Num(c) => Some(*c),
            X => None,
            Neg(a) => a.constant().map(|v| -v),
            Add(a, b) => Some(a.constant()? + b.constant()?),
            Sub(a, b) => Some(a.constant()? - b.constant()?),
            Mul(a, b) => {
                let (ca, cb) = (a.constant(), b.constant());
                if ca == Some(0.0) || cb == Some(0.0) {
                    return Some(0.0);
                }
                Some(ca? * cb?)
            }
            Div(a, b) => Some(a.constant()? / b.constant()?),
            Pow(a, b) => Some(a.constant()?.powf(b.constant()?)),
            Exp(a) => Some(a.constant()?.exp()),
            Ln(a) => Some(a.constant()?.ln()),
            Sqrt(a) => Some(a.constant()?.sqrt()),
        }
    }

    /// Coefficients {k: c_k} when the expression is a finite sum of c_k x^k
    /// with integer k.
    pub fn laurent(&self) -> Option<BTreeMap<i32, f64>> {
        fn single(k: i32, c: f64) -> BTreeMap<i32, f64> {
            let mut m = BTreeMap::new();
            if c != 0.0 {
                m.insert(k, c);
            }
            m
        }
        fn merge(mut a: BTreeMap<i32, f64>, b: BTreeMap<i32, f64>, sign: f64) -> BTreeMap<i32, f64> {
            for (k, c) in b {
                let e = a.entry(k).or_insert(0.0);
                *e += sign * c;
                if *e == 0.0 {
                    a.remove(&k);
                }
            }
            a
        }
        fn product(a: &BTreeMap<i32, f64>, b: &BTreeMap<i32, f64>) -> BTreeMap<i32, f64> {
            let mut out = BTreeMap::new();
            for (ka, ca) in a {
                for (kb, cb) in b {
                    let e = out.entry(ka + kb).or_insert(0.0);
                    *e += ca * cb;
                }
            }
            out.retain(|_, c| *c != 0.0);
            out
        }
        if let Some(c) = self.constant() {
            return c.is_finite().then(|| single(0, c));
        }
        match self {
            X => Some(single(1, 1.0)),
            Neg(a) => Some(merge(BTreeMap::new(), a.laurent()?, -1.0)),
            Add(a, b) => Some(merge(a.laurent()?, b.laurent()?, 1.0)),
            Sub(a, b) => Some(merge(a.laurent()?, b.laurent()?, -1.0)),
            Mul(a, b) => Some(product(&a.laurent()?, &b.laurent()?)),
            Div(a, b) => {
                let num = a.laurent()?;
                let den = b.laurent()?;
                if den.len() != 1 {
                    return None;
                }
                let (&kd, &cd) = den.iter().next()?;
                Some(num.into_iter().map(|(k, c)| (k - kd, c / cd)).collect())
            }
            Pow(a, b) => {
                let k = b.constant()?;
                if k != k.trunc() || k.abs() > 32.0 {
                    return None;
                }
                let base = a.laurent()?;
                let k = k as i32;
                if base.len() == 1 {
                    let (&kb, &cb) = base.iter().next()?;
                    return Some(single(kb * k, cb.powi(k)));
                }
                if k < 0 {
                    return None;
                }
                let mut acc = single(0, 1.0);
                for _ in 0..k {
                    acc = product(&acc, &base);
                }
                Some(acc)
            }
            _ => None,
        }
    }

    fn from_laurent(m: &BTreeMap<i32, f64>) -> Expr {
        let mut terms = m.iter().rev().filter(|(_, c)| **c != 0.0);
        let Some((&k0, &c0)) = terms.next() else {
            return Num(0.0);
        };
        let mut e = Expr::monomial(c0, k0);
        for (&k, &c) in terms {
            e = Expr::add(e, Expr::monomial(c, k));
        }
        e
    }

    /// Algebraic simplification: monomial sums are canonicalized, constants
    /// are folded and identity elements removed.
    pub fn simplify(&self) -> Expr {
        if let Some(m) = self.laurent() {
            return Expr::from_laurent(&m);
        }
        let s = match self {
            Num(_) | X => self.clone(),
            Neg(a) => Neg(bx(a.simplify())),
            Add(a, b) => Expr::add(a.simplify(), b.simplify()),
            Sub(a, b) => Expr::sub(a.simplify(), b.simplify()),
            Mul(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.constant(), b.constant()) {
                    (Some(c), _) if c == 1.0 => b,
                    (_, Some(c)) if c == 1.0 => a,
                    _ => Expr::mul(a, b),
                }
            }
            Div(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                if b.constant() == Some(1.0) {
                    a
                } else {
                    Expr::div(a, b)
                }
            }
            Pow(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                if b.constant() == Some(1.0) {
                    a
                } else {
                    Pow(bx(a), bx(b))
                }
            }
            Exp(a) => match a.simplify() {
                Ln(inner) => *inner,
                s => Exp(bx(s)),
            },
            Ln(a) => match a.simplify() {
                Exp(inner) => *inner,
                s => Ln(bx(s)),
            },
            Sqrt(a) => Sqrt(bx(a.simplify())),
        };
        if let Some(c) = s.constant() {
            if c.is_finite() {
                return Num(c);
            }
        }
        s
    }

    /// Antiderivative when the expression is a monomial sum.
    pub fn antiderivative(&self) -> Option<Expr> {
        let m = self.laurent()?;
        let mut out = BTreeMap::new();
        let mut log_coef = 0.0;
        for (&k, &c) in &m {
            if k == -1 {
                log_coef = c;
            } else {
                out.insert(k + 1, c / (k as f64 + 1.0));
            }
        }
        let poly = Expr::from_laurent(&out);
        if log_coef == 0.0 {
            Some(poly)
        } else {
            Some(Expr::add(poly, Expr::mul(Num(log_coef), Ln(bx(X)))).simplify())
        }
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Validation(format!(
                "unexpected trailing input in expression '{src}'"
            )));
        }
        Ok(e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(c) => {
                if *c < 0.0 {
                    write!(f, "({c:?})")
                } else {
                    write!(f, "{c:?}")
                }
            }
            X => write!(f, "x"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, b) => write!(f, "({a} ^ {b})"),
            Exp(a) => write!(f, "exp({a})"),
            Ln(a) => write!(f, "ln({a})"),
            Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("bad number '{s}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Validation(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat('-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat('/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Neg(bx(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Pow(bx(base), bx(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(X),
                    "pi" => Ok(Num(std::f64::consts::PI)),
                    "exp" | "ln" | "sqrt" => {
                        if !self.eat('(') {
                            return Err(Error::Validation(format!("expected '(' after {name}")));
                        }
                        let inner = self.expr()?;
                        if !self.eat(')') {
                            return Err(Error::Validation("expected ')'".into()));
                        }
                        Ok(match name.as_str() {
                            "exp" => Exp(bx(inner)),
                            "ln" => Ln(bx(inner)),
                            _ => Sqrt(bx(inner)),
                        })
                    }
                    _ => Err(Error::Validation(format!("unknown identifier '{name}'"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Validation("expected ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Validation(format!("unexpected token {other:?}"))),
        }
    }
}
