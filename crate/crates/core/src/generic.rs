//! The generic fiber as a system of charts `B_n = A[f_1^n/w, .., f_r^n/w]`,
//! tube charts, valued points and specialization, lifting of points through
//! blow-ups, the empty-fiber criterion, and descent of generic-fiber maps.

use std::collections::HashMap;
use std::fmt;

use crate::blowup::AdmissibleIdeal;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fpalg::{divide, forced_map, ring_map, shared_base_images, Fraction, FpAlgebra, RingMap};
use crate::ideal::Ideal;
use crate::poly::{check_ring, Poly};
use crate::ratfun::RatFun;

/// `g = c w^k` with `k >= 1`: its powers over `w` already lie in `A`.
fn is_uniformizer_multiple<F: Field>(g: &Poly<F>) -> bool {
    match g.as_term() {
        Some((m, _)) => m.exps()[0] >= 1 && m.exps()[1..].iter().all(|&e| e == 0),
        None => false,
    }
}

/// `A[g_1^n/w, ..]` saturated at `w`, adjoining one variable per generator
/// that is not already a multiple of `w`. Returns the indices used.
fn rational_chart<F: Field>(
    a: &FpAlgebra<F>,
    gens: &[Poly<F>],
    n: u32,
) -> Result<(FpAlgebra<F>, RingMap<F>, Vec<usize>)> {
    let used: Vec<usize> = (0..gens.len())
        .filter(|&i| !gens[i].is_zero() && !is_uniformizer_multiple(&gens[i]))
        .collect();
    let names = vec!["t"; used.len()];
    let (ext, mut rels, idef, mut defs) = a.extend_vars(&names);
    let w = ext.var(0);
    let base = a.nvars();
    for (k, &i) in used.iter().enumerate() {
        let t = ext.var(base + k);
        let gn = gens[i].extend_to(&ext).pow(n);
        rels.push(&(&w * &t) - &gn);
        defs[base + k] = Some(Fraction::new(gn, w.clone()));
    }
    let sat = Ideal::new(&ext, rels)?.saturation(&w)?;
    let algebra = FpAlgebra::from_parts(&ext, sat, idef, defs);
    let _ = algebra.is_torsion_free();
    let map = ring_map(a, &algebra, (0..base).map(|v| ext.var(v)).collect())?;
    Ok((algebra, map, used))
}

/// The `n`-th chart of the generic fiber.
#[derive(Clone, Debug)]
pub struct GenericChart<F: Field> {
    pub n: u32,
    pub algebra: FpAlgebra<F>,
    pub map: RingMap<F>,
    /// Generators of the ideal of definition that received a variable.
    pub adjoined: Vec<usize>,
}

impl<F: Field> GenericChart<F> {
    /// `(w, f_1^n, .., f_r^n) B = w B`.
    pub fn satisfies_chart_relation(&self) -> Result<bool> {
        let b = &self.algebra;
        let mut gens = vec![b.w()];
        for f in self.map.source().idef() {
            gens.push(self.map.apply(&f.pow(self.n))?);
        }
        b.ideal(&gens)?.equals(&b.ideal(&[b.w()])?)
    }
}

pub fn generic_chart<F: Field>(a: &FpAlgebra<F>, n: u32) -> Result<GenericChart<F>> {
    if n == 0 {
        return Err(Error::InvalidArgument("chart index must be at least 1".into()));
    }
    let (algebra, map, adjoined) = rational_chart(a, a.idef(), n)?;
    Ok(GenericChart {
        n,
        algebra,
        map,
        adjoined,
    })
}

/// The map `B_m -> B_n` over `A`, for `m >= n`.
pub fn generic_transition_between<F: Field>(bm: &GenericChart<F>, bn: &GenericChart<F>) -> Result<RingMap<F>> {
    if bm.n < bn.n {
        return Err(Error::InvalidArgument(format!(
            "no transition from chart {} to chart {}",
            bm.n, bn.n
        )));
    }
    forced_map(&bm.algebra, &bn.algebra, &shared_base_images(&bm.algebra, &bn.algebra)?)
}

pub fn generic_transition<F: Field>(a: &FpAlgebra<F>, m: u32, n: u32) -> Result<RingMap<F>> {
    if m < n {
        return Err(Error::InvalidArgument(format!("no transition from chart {m} to chart {n}")));
    }
    generic_transition_between(&generic_chart(a, m)?, &generic_chart(a, n)?)
}

/// The `n`-th chart `A[g_1^n/w, .., g_s^n/w]` of the tube over `V(g_1, .., g_s)`.
pub fn tube_chart<F: Field>(a: &FpAlgebra<F>, z_gens: &[Poly<F>], n: u32) -> Result<FpAlgebra<F>> {
    if n == 0 {
        return Err(Error::InvalidArgument("chart index must be at least 1".into()));
    }
    for g in z_gens {
        check_ring(g.ring(), a.ring())?;
    }
    let z = a.ideal(z_gens)?;
    for f in a.idef() {
        if !z.radical_contains(f)? {
            return Err(Error::NotContainingIdealOfDefinition(format!(
                "`{f}` is not in the radical of the given ideal"
            )));
        }
    }
    Ok(rational_chart(a, z_gens, n)?.0)
}

/// A point with values in `k(v)`, the uniformizer going to `v^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point<F: Field> {
    pub e: u32,
    /// One value per variable; entry 0 is `v^e`.
    pub values: Vec<RatFun<F>>,
}

impl<F: Field> fmt::Display for Point<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e={}", self.e)?;
        for (i, v) in self.values.iter().enumerate().skip(1) {
            write!(f, "{}{v}", if i == 1 { " " } else { ", " })?;
        }
        Ok(())
    }
}

impl<F: Field> Point<F> {
    /// The point on `a` with the given values of the non-uniformizer variables.
    pub fn new(a: &FpAlgebra<F>, e: u32, values: Vec<RatFun<F>>) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidArgument("ramification index must be at least 1".into()));
        }
        if values.len() + 1 != a.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} values for {} variables besides the uniformizer",
                values.len(),
                a.nvars() - 1
            )));
        }
        let mut all = vec![RatFun::monomial(a.ring().desc(), e as i64)];
        all.extend(values);
        Ok(Point { e, values: all })
    }

    pub fn eval(&self, p: &Poly<F>) -> Result<RatFun<F>> {
        if p.ring().nvars() != self.values.len() {
            return Err(Error::VariableMismatch(format!(
                "point has {} coordinates, polynomial ring has {} variables",
                self.values.len(),
                p.ring().nvars()
            )));
        }
        let desc = p.ring().desc();
        let mut powers: HashMap<(usize, u32), RatFun<F>> = HashMap::new();
        let mut acc = RatFun::zero(desc);
        for (m, c) in p.terms() {
            let mut t = RatFun::constant(desc, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    let pw = powers
                        .entry((i, e))
                        .or_insert_with(|| self.values[i].pow(e as i64).expect("nonnegative power"));
                    t = t.mul(pw);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

/// Checks relations, integrality of coordinates and continuity, in that order.
pub fn point_validate<F: Field>(a: &FpAlgebra<F>, p: &Point<F>) -> Result<()> {
    if p.values.len() != a.nvars() {
        return Err(Error::VariableMismatch("point does not match the algebra".into()));
    }
    if p.values[0] != RatFun::monomial(a.ring().desc(), p.e as i64) {
        return Err(Error::InvalidArgument("the uniformizer must go to v^e".into()));
    }
    for r in a.relations().gens() {
        if !p.eval(r)?.is_zero() {
            return Err(Error::RelationViolated(r.to_string()));
        }
    }
    for (i, v) in p.values.iter().enumerate() {
        if v.order_or_max() < 0 {
            return Err(Error::PointNotIntegral(a.ring().vars()[i].clone()));
        }
    }
    for g in a.idef() {
        if p.eval(g)?.order_or_max() <= 0 {
            return Err(Error::NotContinuous(g.to_string()));
        }
    }
    Ok(())
}

/// `|f(P)| < 1`.
pub fn spc_contains<F: Field>(a: &FpAlgebra<F>, p: &Point<F>, f: &Poly<F>) -> Result<bool> {
    check_ring(f.ring(), a.ring())?;
    Ok(p.eval(f)?.order_or_max() > 0)
}

/// The chart receiving `P` (first generator of minimal order) and the point on
/// it; coordinates follow the chart's variable order.
pub fn lift_point<F: Field>(
    a: &FpAlgebra<F>,
    j: &AdmissibleIdeal<F>,
    p: &Point<F>,
) -> Result<(usize, Point<F>)> {
    check_ring(j.ambient().ring(), a.ring())?;
    let vals = j.gens().iter().map(|f| p.eval(f)).collect::<Result<Vec<_>>>()?;
    let (i, fi) = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .min_by_key(|(k, v)| (v.order_or_max(), *k))
        .ok_or(Error::NoFiniteOrder)?;
    let mut values = p.values.clone();
    for (k, fk) in vals.iter().enumerate() {
        if k != i {
            values.push(fk.div(fi).expect("nonzero"));
        }
    }
    Ok((i, Point { e: p.e, values }))
}

/// `w` is nilpotent.
pub fn is_generic_fiber_empty<F: Field>(a: &FpAlgebra<F>) -> Result<bool> {
    a.relations().radical_contains(&a.w())
}

/// Outcome of [`descend_morphism`].
#[derive(Clone, Debug)]
pub enum Descent<F: Field> {
    Map(RingMap<F>),
    /// Index (among the non-uniformizer variables) of the first image that is
    /// not in the model.
    NeedsBlowup(usize),
}

/// `r(c_1/w^{m_1}, ..)` with the common denominator cleared.
fn cleared_image<F: Field>(r: &Poly<F>, b: &FpAlgebra<F>, images: &[(Poly<F>, u32)]) -> Result<Poly<F>> {
    let denom = |exps: &[u32]| -> u64 {
        exps[1..]
            .iter()
            .zip(images)
            .map(|(&e, (_, m))| e as u64 * *m as u64)
            .sum()
    };
    let top = r.terms().iter().map(|(m, _)| denom(m.exps())).max().unwrap_or(0);
    let w = b.w();
    let mut acc = b.ring().zero();
    for (m, c) in r.terms() {
        let mut t = b.ring().constant(c.clone());
        t = &t * &w.pow(m.exps()[0] + (top - denom(m.exps())) as u32);
        for (&e, (ci, _)) in m.exps()[1..].iter().zip(images) {
            t = &t * &ci.pow(e);
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Turns a generic-fiber map `x_i -> c_i / w^{m_i}` into a model map `A -> B`
/// when every image lies in `B`.
pub fn descend_morphism<F: Field>(
    a: &FpAlgebra<F>,
    b: &FpAlgebra<F>,
    images: &[(Poly<F>, u32)],
) -> Result<Descent<F>> {
    b.require_torsion_free()?;
    if images.len() + 1 != a.nvars() {
        return Err(Error::VariableMismatch(format!(
            "{} images for {} variables besides the uniformizer",
            images.len(),
            a.nvars() - 1
        )));
    }
    for (c, _) in images {
        check_ring(c.ring(), b.ring())?;
    }
    for r in a.relations().gens() {
        if !b.is_zero_element(&cleared_image(r, b, images)?)? {
            return Err(Error::IllDefined(r.to_string()));
        }
    }
    let mut model = vec![b.w()];
    for (i, (c, m)) in images.iter().enumerate() {
        match divide(b, c, &b.w().pow(*m))? {
            Some(q) => model.push(q),
            None => return Ok(Descent::NeedsBlowup(i)),
        }
    }
    Ok(Descent::Map(ring_map(a, b, model)?))
}
