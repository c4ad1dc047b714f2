//! Polynomial text syntax.
//!
//! Integer coefficients, `+ - * / ^`, parentheses, and identifiers as
//! variables. `*` may be omitted between factors (`2x`, `x y`, `(x+1)(x-1)`).
//! Expressions are parsed into an [`Expr`] tree and evaluated afterwards in a
//! concrete [`ExprDomain`] (polynomials, fractions, rational functions).

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{Poly, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Num(text.parse().unwrap()), start + 1));
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start + 1));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i + 1));
            i += 1;
        } else {
            return Err(Error::ExpressionSyntax {
                col: i + 1,
                expected: format!("an expression character, found `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::ExpressionSyntax {
            col: self.col(),
            expected: expected.to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
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
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('('))) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let paren = self.eat('(');
            let neg = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Num(n)) => {
                    let n = n.clone();
                    self.pos += 1;
                    i64::try_from(n).or_else(|_| self.fail("a small exponent"))?
                }
                _ => return self.fail("an integer exponent"),
            };
            if paren && !self.eat(')') {
                return self.fail("`)`");
            }
            Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail("`)`");
                }
                Ok(e)
            }
            _ => self.fail("a number, variable or `(`"),
        }
    }
}

/// Parses a complete expression.
pub fn parse_expr(s: &str) -> Result<Expr> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: s.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.fail("an operator or end of expression");
    }
    Ok(e)
}

impl Expr {
    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(x) => {
                write!(f, "-")?;
                x.write_at(f, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "{}", if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                b.write_at(f, 3)
            }
            Expr::Pow(b, e) => {
                b.write_at(f, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// A place expressions can be evaluated in.
pub trait ExprDomain {
    type Value;
    fn number(&self, n: &BigInt) -> Result<Self::Value>;
    fn variable(&self, name: &str) -> Result<Self::Value>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: Self::Value) -> Result<Self::Value>;
    fn pow(&self, a: Self::Value, e: i64) -> Result<Self::Value>;
}

pub fn evaluate<D: ExprDomain>(e: &Expr, d: &D) -> Result<D::Value> {
    match e {
        Expr::Num(n) => d.number(n),
        Expr::Var(v) => d.variable(v),
        Expr::Neg(x) => {
            let x = evaluate(x, d)?;
            d.neg(x)
        }
        Expr::Add(a, b) => {
            let (a, b) = (evaluate(a, d)?, evaluate(b, d)?);
            d.add(a, b)
        }
        Expr::Sub(a, b) => {
            let (a, b) = (evaluate(a, d)?, evaluate(b, d)?);
            d.sub(a, b)
        }
        Expr::Mul(a, b) => {
            let (a, b) = (evaluate(a, d)?, evaluate(b, d)?);
            d.mul(a, b)
        }
        Expr::Div(a, b) => {
            let (a, b) = (evaluate(a, d)?, evaluate(b, d)?);
            d.div(a, b)
        }
        Expr::Pow(a, k) => {
            let a = evaluate(a, d)?;
            d.pow(a, *k)
        }
    }
}

/// Polynomials of a fixed ring; division only by nonzero constants.
pub struct PolyDomain<'a, F: Field>(pub &'a Ring<F>);

impl<F: Field> ExprDomain for PolyDomain<'_, F> {
    type Value = Poly<F>;
    fn number(&self, n: &BigInt) -> Result<Poly<F>> {
        Ok(self.0.constant(F::from_integer(self.0.desc(), n)))
    }
    fn variable(&self, name: &str) -> Result<Poly<F>> {
        self.0.var_named(name)
    }
    fn add(&self, a: Poly<F>, b: Poly<F>) -> Result<Poly<F>> {
        Ok(&a + &b)
    }
    fn sub(&self, a: Poly<F>, b: Poly<F>) -> Result<Poly<F>> {
        Ok(&a - &b)
    }
    fn mul(&self, a: Poly<F>, b: Poly<F>) -> Result<Poly<F>> {
        Ok(&a * &b)
    }
    fn div(&self, a: Poly<F>, b: Poly<F>) -> Result<Poly<F>> {
        if !b.is_constant() || b.is_zero() {
            return Err(Error::InvalidExpression(format!(
                "division by the non-constant `{b}`; use a fraction instead"
            )));
        }
        let inv = b
            .constant_term()
            .inv()
            .ok_or_else(|| Error::InvalidExpression("division by zero".into()))?;
        Ok(a.scale(&inv))
    }
    fn neg(&self, a: Poly<F>) -> Result<Poly<F>> {
        Ok(-&a)
    }
    fn pow(&self, a: Poly<F>, e: i64) -> Result<Poly<F>> {
        if e < 0 {
            return Err(Error::InvalidExpression("negative exponent in a polynomial".into()));
        }
        let e = u32::try_from(e).map_err(|_| Error::InvalidExpression("exponent too large".into()))?;
        Ok(a.pow(e))
    }
}

/// Fractions `num / den` of polynomials (not reduced).
pub struct FractionDomain<'a, F: Field>(pub &'a Ring<F>);

impl<F: Field> ExprDomain for FractionDomain<'_, F> {
    type Value = (Poly<F>, Poly<F>);
    fn number(&self, n: &BigInt) -> Result<Self::Value> {
        Ok((self.0.constant(F::from_integer(self.0.desc(), n)), self.0.one()))
    }
    fn variable(&self, name: &str) -> Result<Self::Value> {
        Ok((self.0.var_named(name)?, self.0.one()))
    }
    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value> {
        if a.1 == b.1 {
            return Ok((&a.0 + &b.0, a.1));
        }
        Ok((&(&a.0 * &b.1) + &(&b.0 * &a.1), &a.1 * &b.1))
    }
    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value> {
        Ok((&a.0 * &b.0, &a.1 * &b.1))
    }
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value> {
        if b.0.is_zero() {
            return Err(Error::InvalidExpression("division by zero".into()));
        }
        Ok((&a.0 * &b.1, &a.1 * &b.0))
    }
    fn neg(&self, a: Self::Value) -> Result<Self::Value> {
        Ok((-&a.0, a.1))
    }
    fn pow(&self, a: Self::Value, e: i64) -> Result<Self::Value> {
        let k = u32::try_from(e.unsigned_abs())
            .map_err(|_| Error::InvalidExpression("exponent too large".into()))?;
        if e < 0 {
            if a.0.is_zero() {
                return Err(Error::InvalidExpression("division by zero".into()));
            }
            Ok((a.1.pow(k), a.0.pow(k)))
        } else {
            Ok((a.0.pow(k), a.1.pow(k)))
        }
    }
}

/// Parses a polynomial in `ring`.
pub fn parse_poly<F: Field>(ring: &Ring<F>, s: &str) -> Result<Poly<F>> {
    evaluate(&parse_expr(s)?, &PolyDomain(ring))
}
