//! Exact multivariate polynomials and the Gröbner-basis engine.

mod groebner;
mod order;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::Field;

pub use groebner::{groebner, is_groebner_basis, normal_form};
pub use order::{MonomialOrder, OrderKind};

/// Exponent vector, one entry per ring variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn from_exps(e: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(e))
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| b - a).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    fn permuted(&self, perm: &[usize]) -> Self {
        Monomial(perm.iter().map(|&i| self.0[i]).collect())
    }

    fn unpermuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::one(self.0.len());
        for (k, &i) in perm.iter().enumerate() {
            out.0[i] = self.0[k];
        }
        out
    }
}

/// Variables and coefficient field of a polynomial ring.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyRing<F: Field> {
    vars: Vec<String>,
    desc: F::Desc,
}

/// Shared handle to a polynomial ring.
pub type Ring<F> = Arc<PolyRing<F>>;

impl<F: Field> PolyRing<F> {
    pub fn new(vars: Vec<String>, desc: F::Desc) -> Result<Ring<F>> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::VariableMismatch(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Arc::new(PolyRing { vars, desc }))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn desc(&self) -> &F::Desc {
        &self.desc
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// A name derived from `base` that is not yet a variable.
    pub fn fresh_name(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|n| self.index_of(n).is_none())
            .unwrap()
    }

    /// The ring with `extra` variables appended (names made fresh as needed).
    pub fn extended(&self, extra: &[&str]) -> Ring<F> {
        let mut vars = self.vars.clone();
        for base in extra {
            let tmp = PolyRing::<F> {
                vars: vars.clone(),
                desc: self.desc.clone(),
            };
            vars.push(tmp.fresh_name(base));
        }
        Arc::new(PolyRing {
            vars,
            desc: self.desc.clone(),
        })
    }

    pub fn zero(self: &Arc<Self>) -> Poly<F> {
        Poly {
            ring: self.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(self: &Arc<Self>) -> Poly<F> {
        self.constant(F::one(&self.desc))
    }

    pub fn constant(self: &Arc<Self>, c: F) -> Poly<F> {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(Monomial::one(self.nvars()), c)]
        };
        Poly {
            ring: self.clone(),
            terms,
        }
    }

    pub fn int(self: &Arc<Self>, n: i64) -> Poly<F> {
        self.constant(F::from_integer(&self.desc, &n.into()))
    }

    pub fn var(self: &Arc<Self>, i: usize) -> Poly<F> {
        assert!(i < self.nvars(), "variable index out of range");
        Poly {
            ring: self.clone(),
            terms: vec![(Monomial::var(self.nvars(), i, 1), F::one(&self.desc))],
        }
    }

    pub fn var_named(self: &Arc<Self>, name: &str) -> Result<Poly<F>> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.var(i))
    }
}

pub(crate) fn same_ring<F: Field>(a: &Ring<F>, b: &Ring<F>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_ring<F: Field>(a: &Ring<F>, b: &Ring<F>) -> Result<()> {
    if same_ring(a, b) {
        Ok(())
    } else {
        Err(Error::VariableMismatch(format!(
            "[{}] vs [{}]",
            a.vars.join(","),
            b.vars.join(",")
        )))
    }
}

/// A polynomial with nonzero coefficients, terms sorted descending under
/// grevlex in the ring's variable order.
#[derive(Clone, Debug)]
pub struct Poly<F: Field> {
    ring: Ring<F>,
    terms: Vec<(Monomial, F)>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl<F: Field> Eq for Poly<F> {}

fn canonical_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    order::compare_kind(&OrderKind::Grevlex, a.exps(), b.exps())
}

impl<F: Field> Poly<F> {
    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(ring: &Ring<F>, terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut acc: HashMap<Monomial, F> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars(), "monomial length");
            match acc.get_mut(&m) {
                Some(e) => *e = e.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| canonical_cmp(&b.0, &a.0));
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    /// Terms already sorted under grevlex (descending) with nonzero coefficients.
    fn from_sorted(ring: &Ring<F>, terms: Vec<(Monomial, F)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| canonical_cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, F)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> F {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| F::zero(self.ring.desc()))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exps()[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exps()[var] > 0)
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<&(Monomial, F)> {
        self.terms.iter().max_by(|a, b| order.compare(&a.0, &b.0))
    }

    /// The single term if this polynomial is `c * m`.
    pub fn as_term(&self) -> Option<&(Monomial, F)> {
        if self.terms.len() == 1 {
            Some(&self.terms[0])
        } else {
            None
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, d)| (m.clone(), d.mul(c))).collect();
        Poly::from_sorted(&self.ring, terms)
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &F) -> Self {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, d)| (m.mul(mono), d.mul(c))).collect();
        Poly::from_sorted(&self.ring, terms)
    }

    /// Divides by the leading coefficient under `order`.
    pub fn monic(&self, order: &MonomialOrder) -> Self {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `images[i]` for variable `i`; the images share a target ring.
    pub fn substitute(&self, target: &Ring<F>, images: &[Poly<F>]) -> Result<Self> {
        if images.len() != self.ring.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.ring.nvars()
            )));
        }
        for im in images {
            check_ring(im.ring(), target)?;
        }
        let mut cache: HashMap<(usize, u32), Poly<F>> = HashMap::new();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cache
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e))
                    .clone();
                t = &t * &p;
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Moves the polynomial to `target`, sending variable `i` to `map[i]`.
    pub fn embed(&self, target: &Ring<F>, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.ring.nvars());
        let n = target.nvars();
        Poly::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = Monomial::one(n);
                for (i, &x) in m.exps().iter().enumerate() {
                    e.0[map[i]] += x;
                }
                (e, c.clone())
            }),
        )
    }

    /// Embeds into a ring whose first variables are this ring's variables.
    pub fn extend_to(&self, target: &Ring<F>) -> Self {
        let map: Vec<usize> = (0..self.ring.nvars()).collect();
        self.embed(target, &map)
    }

    /// Restricts to a ring made of the first `target.nvars()` variables;
    /// `None` if a dropped variable occurs.
    pub fn restrict_to(&self, target: &Ring<F>) -> Option<Self> {
        let k = target.nvars();
        if self.terms.iter().any(|(m, _)| m.exps()[k..].iter().any(|&e| e > 0)) {
            return None;
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial::from_exps(&m.exps()[..k]), c.clone()))
            .collect();
        Some(Poly::from_sorted(target, terms))
    }

    /// Exact division in the polynomial ring, if `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly<F>) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        let (lm, lc) = divisor.terms[0].clone();
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = self.ring.zero();
        while let Some((m, c)) = rem.terms.first().cloned() {
            if !lm.divides(&m) {
                return None;
            }
            let q = lm.quotient_of(&m);
            let coeff = c.mul(&lc_inv);
            quot = &quot + &Poly::from_sorted(&self.ring, vec![(q.clone(), coeff.clone())]);
            rem = &rem - &divisor.mul_monomial(&q, &coeff);
        }
        Some(quot)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        assert!(same_ring(&self.ring, &other.ring), "polynomials from different rings");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match canonical_cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { b[j].1.neg() } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        a[i].1.sub(&b[j].1)
                    } else {
                        a[i].1.add(&b[j].1)
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| {
            (m.clone(), if negate { c.neg() } else { c.clone() })
        }));
        Poly::from_sorted(&self.ring, out)
    }
}

impl<F: Field> std::ops::Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: Self) -> Poly<F> {
        self.merge(rhs, false)
    }
}

impl<F: Field> std::ops::Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: Self) -> Poly<F> {
        self.merge(rhs, true)
    }
}

impl<F: Field> std::ops::Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        Poly::from_sorted(&self.ring, terms)
    }
}

impl<F: Field> std::ops::Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: Self) -> Poly<F> {
        assert!(same_ring(&self.ring, &rhs.ring), "polynomials from different rings");
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return rhs.mul_monomial(m, c);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = &rhs.terms[0];
            return self.mul_monomial(m, c);
        }
        Poly::from_terms(
            &self.ring,
            self.terms.iter().flat_map(|(m1, c1)| {
                rhs.terms.iter().map(move |(m2, c2)| (m1.mul(m2), c1.mul(c2)))
            }),
        )
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &[String], m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", vars[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, abs) = c.display_sign();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, &self.ring.vars, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn ring(vars: &[&str]) -> Ring<Rational> {
        PolyRing::new(vars.iter().map(|s| s.to_string()).collect(), ()).unwrap()
    }

    #[test]
    fn arithmetic_and_display() {
        let r = ring(&["w", "x"]);
        let w = r.var(0);
        let x = r.var(1);
        let p = &(&x * &x) - &w.pow(3);
        assert_eq!(p.to_string(), "-w^3 + x^2");
        let q = &(&x + &w) * &(&x - &w);
        assert_eq!(q.to_string(), "-w^2 + x^2");
        assert!((&q - &q).is_zero());
        assert_eq!(r.int(-3).to_string(), "-3");
    }

    #[test]
    fn substitution_and_exact_division() {
        let r = ring(&["w", "x"]);
        let (w, x) = (r.var(0), r.var(1));
        let p = &x.pow(2) - &w;
        let s = p.substitute(&r, &[w.clone(), w.pow(2)]).unwrap();
        assert_eq!(s, &w.pow(4) - &w);
        let prod = &p * &(&x + &r.one());
        assert_eq!(prod.div_exact(&p).unwrap(), &x + &r.one());
        assert!(p.div_exact(&x).is_none());
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let r = ring(&["w", "t", "t1"]);
        assert_eq!(r.fresh_name("t"), "t2");
        assert_eq!(r.fresh_name("u"), "u");
        let e = r.extended(&["t", "t"]);
        assert_eq!(e.vars(), &["w", "t", "t1", "t2", "t3"]);
    }
}
