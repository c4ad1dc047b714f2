//! Rational functions in one variable `v`, used as coordinates of valued
//! points. The valuation is the `v`-adic order.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expr::{evaluate, parse_expr, ExprDomain};
use crate::field::Field;

/// Dense coefficients, lowest degree first, no trailing zeros.
type Dense<F> = Vec<F>;

fn trim<F: Field>(mut p: Dense<F>) -> Dense<F> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn add<F: Field>(a: &[F], b: &[F]) -> Dense<F> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(out)
}

fn scale<F: Field>(a: &[F], c: &F) -> Dense<F> {
    trim(a.iter().map(|x| x.mul(c)).collect())
}

fn mul<F: Field>(a: &[F], b: &[F]) -> Dense<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let zero = a[0].sub(&a[0]);
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` nonzero.
fn divrem<F: Field>(a: &[F], b: &[F]) -> (Dense<F>, Dense<F>) {
    let lead_inv = b.last().expect("nonzero divisor").inv().expect("nonzero");
    let mut rem: Dense<F> = a.to_vec();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let zero = b[0].sub(&b[0]);
    let mut quot = vec![zero; rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap().mul(&lead_inv);
        for (i, y) in b.iter().enumerate() {
            rem[shift + i] = rem[shift + i].sub(&c.mul(y));
        }
        quot[shift] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

fn monic<F: Field>(a: &[F]) -> Dense<F> {
    match a.last() {
        None => Vec::new(),
        Some(c) => scale(a, &c.inv().expect("nonzero")),
    }
}

fn gcd<F: Field>(a: &[F], b: &[F]) -> Dense<F> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(&a)
}

/// `v^shift * num / den` with `num(0) != 0`, `den(0) != 0`, `den` monic and
/// coprime to `num`; zero has an empty numerator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFun<F: Field> {
    desc: F::Desc,
    shift: i64,
    num: Dense<F>,
    den: Dense<F>,
}

impl<F: Field> RatFun<F> {
    pub fn zero(desc: &F::Desc) -> Self {
        RatFun {
            desc: desc.clone(),
            shift: 0,
            num: Vec::new(),
            den: vec![F::one(desc)],
        }
    }

    pub fn constant(desc: &F::Desc, c: F) -> Self {
        Self::build(desc, 0, vec![c], vec![F::one(desc)])
    }

    pub fn one(desc: &F::Desc) -> Self {
        Self::constant(desc, F::one(desc))
    }

    /// `v^k`.
    pub fn monomial(desc: &F::Desc, k: i64) -> Self {
        RatFun {
            desc: desc.clone(),
            shift: k,
            num: vec![F::one(desc)],
            den: vec![F::one(desc)],
        }
    }

    fn build(desc: &F::Desc, mut shift: i64, num: Dense<F>, den: Dense<F>) -> Self {
        let mut num = trim(num);
        let mut den = trim(den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return Self::zero(desc);
        }
        let lz = num.iter().take_while(|c| c.is_zero()).count();
        num.drain(..lz);
        shift += lz as i64;
        let lz = den.iter().take_while(|c| c.is_zero()).count();
        den.drain(..lz);
        shift -= lz as i64;
        let g = gcd(&num, &den);
        if g.len() > 1 {
            num = divrem(&num, &g).0;
            den = divrem(&den, &g).0;
        }
        let lc_inv = den.last().unwrap().inv().expect("nonzero");
        RatFun {
            desc: desc.clone(),
            shift,
            num: scale(&num, &lc_inv),
            den: scale(&den, &lc_inv),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// `v`-adic order; `None` for zero.
    pub fn order(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.shift)
        }
    }

    /// Order with zero counted as `+∞`, for comparisons.
    pub fn order_or_max(&self) -> i64 {
        self.order().unwrap_or(i64::MAX)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(other.shift);
        let lift = |r: &Self| {
            let mut p = vec![F::zero(&self.desc); (r.shift - s) as usize];
            p.extend(r.num.iter().cloned());
            p
        };
        let (a, b) = (lift(self), lift(other));
        let num = add(&mul(&a, &other.den), &mul(&b, &self.den));
        Self::build(&self.desc, s, num, mul(&self.den, &other.den))
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.num = out.num.iter().map(|c| c.neg()).collect();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.desc);
        }
        Self::build(
            &self.desc,
            self.shift + other.shift,
            mul(&self.num, &other.num),
            mul(&self.den, &other.den),
        )
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::build(&self.desc, -self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(&self.desc);
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Some(acc)
    }

    /// Parses an expression in the single variable `v`.
    pub fn parse(desc: &F::Desc, s: &str) -> Result<Self> {
        evaluate(&parse_expr(s)?, &RatFunDomain::<F>(desc.clone()))
    }
}

fn write_laurent<F: Field>(f: &mut fmt::Formatter<'_>, shift: i64, coeffs: &[F]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let e = shift + k as i64;
        let (neg, abs) = c.display_sign();
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        first = false;
        if e == 0 {
            write!(f, "{abs}")?;
            continue;
        }
        if !abs.is_one() {
            write!(f, "{abs}*")?;
        }
        match e {
            1 => write!(f, "v")?,
            _ => write!(f, "v^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<F: Field> fmt::Display for RatFun<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.len() == 1 {
            return write_laurent(f, self.shift, &self.num);
        }
        let num = Laurent(self.shift, &self.num).to_string();
        if num.contains(' ') {
            write!(f, "({num})")?;
        } else {
            write!(f, "{num}")?;
        }
        write!(f, "/(")?;
        write_laurent(f, 0, &self.den)?;
        write!(f, ")")
    }
}

struct Laurent<'a, F: Field>(i64, &'a [F]);

impl<F: Field> fmt::Display for Laurent<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_laurent(f, self.0, self.1)
    }
}

pub(crate) struct RatFunDomain<F: Field>(pub F::Desc);

impl<F: Field> ExprDomain for RatFunDomain<F> {
    type Value = RatFun<F>;
    fn number(&self, n: &BigInt) -> Result<RatFun<F>> {
        Ok(RatFun::constant(&self.0, F::from_integer(&self.0, n)))
    }
    fn variable(&self, name: &str) -> Result<RatFun<F>> {
        if name == "v" {
            Ok(RatFun::monomial(&self.0, 1))
        } else {
            Err(Error::UnknownVariable(name.to_string()))
        }
    }
    fn add(&self, a: RatFun<F>, b: RatFun<F>) -> Result<RatFun<F>> {
        Ok(a.add(&b))
    }
    fn sub(&self, a: RatFun<F>, b: RatFun<F>) -> Result<RatFun<F>> {
        Ok(a.sub(&b))
    }
    fn mul(&self, a: RatFun<F>, b: RatFun<F>) -> Result<RatFun<F>> {
        Ok(a.mul(&b))
    }
    fn div(&self, a: RatFun<F>, b: RatFun<F>) -> Result<RatFun<F>> {
        a.div(&b)
            .ok_or_else(|| Error::InvalidExpression("division by zero".into()))
    }
    fn neg(&self, a: RatFun<F>) -> Result<RatFun<F>> {
        Ok(a.neg())
    }
    fn pow(&self, a: RatFun<F>, e: i64) -> Result<RatFun<F>> {
        a.pow(e)
            .ok_or_else(|| Error::InvalidExpression("division by zero".into()))
    }
}
