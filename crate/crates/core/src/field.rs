//! Coefficient fields.
//!
//! Everything in the crate is generic over a [`Field`]. Two implementations
//! are provided: arbitrary-precision rationals and prime fields whose modulus
//! is chosen at runtime. The modulus travels inside a field *descriptor*
//! (`Field::Desc`), which polynomial rings carry so that constants can be
//! created without an existing element at hand.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact coefficient field.
pub trait Field: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync + 'static {
    /// Runtime data needed to build constants (the modulus for prime fields).
    type Desc: Clone + PartialEq + Eq + Hash + Debug + Send + Sync + 'static;

    fn zero(desc: &Self::Desc) -> Self;
    fn one(desc: &Self::Desc) -> Self;
    fn from_integer(desc: &Self::Desc, n: &BigInt) -> Self;
    /// `None` when the denominator vanishes in the field.
    fn from_ratio(desc: &Self::Desc, num: &BigInt, den: &BigInt) -> Option<Self>;

    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    /// Sign used when printing: `(true, |c|)` if `c` prints with a leading minus.
    fn display_sign(&self) -> (bool, Self);

    /// Human readable field name (`QQ`, `GF(7)`).
    fn describe(desc: &Self::Desc) -> String;
}

/// Rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

impl Field for BigRational {
    type Desc = ();

    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_integer(_: &(), n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn from_ratio(_: &(), num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num.clone(), den.clone()))
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn display_sign(&self) -> (bool, Self) {
        (self.is_negative(), self.abs())
    }
    fn describe(_: &()) -> String {
        "QQ".to_string()
    }
}

/// A validated prime modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Moduli are capped at 2^62 so that sums never overflow.
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 62 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of the prime field `GF(p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(p: Prime, value: i64) -> Self {
        let m = p.0 as i128;
        Fp {
            value: (value as i128).rem_euclid(m) as u64,
            modulus: p.0,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    fn with(self, value: u64) -> Self {
        Fp {
            value,
            modulus: self.modulus,
        }
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = self.with(1 % self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    n.mod_floor(&m).to_u64().expect("residue fits in u64")
}

impl Field for Fp {
    type Desc = Prime;

    fn zero(p: &Prime) -> Self {
        Fp {
            value: 0,
            modulus: p.0,
        }
    }
    fn one(p: &Prime) -> Self {
        Fp {
            value: 1,
            modulus: p.0,
        }
    }
    fn from_integer(p: &Prime, n: &BigInt) -> Self {
        Fp {
            value: reduce_bigint(n, p.0),
            modulus: p.0,
        }
    }
    fn from_ratio(p: &Prime, num: &BigInt, den: &BigInt) -> Option<Self> {
        let n = Self::from_integer(p, num);
        let d = Self::from_integer(p, den);
        n.div(&d)
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn is_one(&self) -> bool {
        self.value == 1
    }
    fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        let s = self.value + other.value;
        self.with(if s >= self.modulus { s - self.modulus } else { s })
    }
    fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        if self.value >= other.value {
            self.with(self.value - other.value)
        } else {
            self.with(self.value + self.modulus - other.value)
        }
    }
    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        let prod = (self.value as u128 * other.value as u128) % self.modulus as u128;
        self.with(prod as u64)
    }
    fn neg(&self) -> Self {
        if self.value == 0 {
            *self
        } else {
            self.with(self.modulus - self.value)
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus - 2))
        }
    }
    fn display_sign(&self) -> (bool, Self) {
        if self.value > self.modulus / 2 {
            (true, self.neg())
        } else {
            (false, *self)
        }
    }
    fn describe(p: &Prime) -> String {
        format!("GF({})", p.0)
    }
}

impl Display for Fp {
    /// Symmetric residues, so `-1` prints as `-1` rather than `p - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (neg, abs) = self.display_sign();
        if neg {
            write!(f, "-{}", abs.value)
        } else {
            write!(f, "{}", abs.value)
        }
    }
}

/// Runtime choice of coefficient field, as selected on the command line.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoeffField {
    Rationals,
    PrimeField(Prime),
}

impl CoeffField {
    /// Parses `q` or `fp:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "q" | "Q" | "QQ" => Ok(CoeffField::Rationals),
            _ => {
                let rest = s
                    .strip_prefix("fp:")
                    .ok_or_else(|| Error::InvalidField(s.to_string()))?;
                let p: u64 = rest
                    .parse()
                    .map_err(|_| Error::InvalidField(s.to_string()))?;
                Ok(CoeffField::PrimeField(Prime::new(p)?))
            }
        }
    }
}
