//! Ideals of polynomial rings: membership, equality, products, saturation,
//! elimination and radical membership.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{check_ring, groebner, normal_form, MonomialOrder, Poly, PolyRing, Ring};

type GbCache<F> = Arc<RwLock<HashMap<MonomialOrder, Arc<Vec<Poly<F>>>>>>;

/// A finitely generated ideal with a per-order cache of reduced Gröbner bases.
///
/// Equality and membership are decided against the grevlex basis.
#[derive(Clone)]
pub struct Ideal<F: Field> {
    ring: Ring<F>,
    gens: Vec<Poly<F>>,
    cache: GbCache<F>,
}

impl<F: Field> fmt::Debug for Ideal<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{self}")
    }
}

impl<F: Field> fmt::Display for Ideal<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

/// Elimination helper: the reduced basis of `(gens) ∩ k[vars \ elim]` in the
/// order that is lex on `priority` and grevlex on the remaining variables.
/// The result still lives in the ring of `gens`.
pub(crate) fn elimination_basis<F: Field>(
    nvars: usize,
    gens: &[Poly<F>],
    elim: &[usize],
    priority: &[usize],
) -> Result<Vec<Poly<F>>> {
    let mut first = elim.to_vec();
    first.extend_from_slice(priority);
    let order = MonomialOrder::eliminating(nvars, &first);
    let gb = groebner(gens, &order)?;
    Ok(gb
        .into_iter()
        .filter(|g| elim.iter().all(|&v| !g.uses_var(v)))
        .collect())
}

impl<F: Field> Ideal<F> {
    pub fn new(ring: &Ring<F>, gens: Vec<Poly<F>>) -> Result<Self> {
        for g in &gens {
            check_ring(g.ring(), ring)?;
        }
        Ok(Ideal {
            ring: ring.clone(),
            gens: gens.into_iter().filter(|g| !g.is_zero()).collect(),
            cache: Arc::default(),
        })
    }

    pub fn zero(ring: &Ring<F>) -> Self {
        Ideal {
            ring: ring.clone(),
            gens: Vec::new(),
            cache: Arc::default(),
        }
    }

    pub fn unit(ring: &Ring<F>) -> Self {
        Ideal {
            ring: ring.clone(),
            gens: vec![ring.one()],
            cache: Arc::default(),
        }
    }

    pub fn principal(p: &Poly<F>) -> Self {
        Ideal::new(p.ring(), vec![p.clone()]).expect("same ring")
    }

    /// An ideal whose generators are already the reduced grevlex basis.
    pub(crate) fn from_grevlex_basis(ring: &Ring<F>, basis: Vec<Poly<F>>) -> Self {
        let ideal = Ideal::new(ring, basis.clone()).expect("same ring");
        ideal
            .cache
            .write()
            .unwrap()
            .insert(MonomialOrder::grevlex(), Arc::new(basis));
        ideal
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly<F>] {
        &self.gens
    }

    /// Reduced Gröbner basis under `order`, computed once per order.
    pub fn gb(&self, order: &MonomialOrder) -> Result<Arc<Vec<Poly<F>>>> {
        if let Some(g) = self.cache.read().unwrap().get(order) {
            return Ok(g.clone());
        }
        let basis = Arc::new(groebner(&self.gens, order)?);
        self.cache
            .write()
            .unwrap()
            .insert(order.clone(), basis.clone());
        Ok(basis)
    }

    /// The reduced grevlex basis.
    pub fn basis(&self) -> Result<Arc<Vec<Poly<F>>>> {
        self.gb(&MonomialOrder::grevlex())
    }

    /// Canonical representative of `p` modulo the ideal (grevlex normal form).
    pub fn reduce(&self, p: &Poly<F>) -> Result<Poly<F>> {
        check_ring(p.ring(), &self.ring)?;
        normal_form(p, &self.basis()?, &MonomialOrder::grevlex())
    }

    pub fn contains(&self, p: &Poly<F>) -> Result<bool> {
        Ok(self.reduce(p)?.is_zero())
    }

    pub fn contains_all(&self, ps: &[Poly<F>]) -> Result<bool> {
        for p in ps {
            if !self.contains(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_unit(&self) -> Result<bool> {
        let b = self.basis()?;
        Ok(b.len() == 1 && b[0].is_constant())
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Equality of ideals: identical reduced grevlex bases.
    pub fn equals(&self, other: &Ideal<F>) -> Result<bool> {
        check_ring(&self.ring, &other.ring)?;
        Ok(*self.basis()? == *other.basis()?)
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Ideal<F>) -> Result<bool> {
        check_ring(&self.ring, &other.ring)?;
        other.contains_all(&self.gens)
    }

    pub fn sum(&self, other: &Ideal<F>) -> Result<Ideal<F>> {
        check_ring(&self.ring, &other.ring)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    pub fn with_gens(&self, extra: &[Poly<F>]) -> Result<Ideal<F>> {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    /// Generated by the pairwise products of generators.
    pub fn product(&self, other: &Ideal<F>) -> Result<Ideal<F>> {
        check_ring(&self.ring, &other.ring)?;
        let gens = self
            .gens
            .iter()
            .flat_map(|a| other.gens.iter().map(move |b| a * b))
            .collect();
        Ideal::new(&self.ring, gens)
    }

    pub fn power(&self, k: u32) -> Result<Ideal<F>> {
        let mut acc = Ideal::unit(&self.ring);
        for _ in 0..k {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// `I : g^∞`, via an auxiliary variable `y`, the relation `1 - y g`, and
    /// elimination of `y`.
    pub fn saturation(&self, g: &Poly<F>) -> Result<Ideal<F>> {
        check_ring(g.ring(), &self.ring)?;
        if g.is_zero() {
            return Ok(Ideal::unit(&self.ring));
        }
        if g.is_constant() {
            return Ok(self.clone());
        }
        let ext = self.ring.extended(&["sat_y"]);
        let y = ext.var(self.ring.nvars());
        let mut gens: Vec<Poly<F>> = self.gens.iter().map(|p| p.extend_to(&ext)).collect();
        gens.push(&ext.one() - &(&y * &g.extend_to(&ext)));
        let basis = elimination_basis(ext.nvars(), &gens, &[self.ring.nvars()], &[])?;
        let basis = basis
            .into_iter()
            .map(|p| p.restrict_to(&self.ring).expect("eliminated variable absent"))
            .collect();
        Ok(Ideal::from_grevlex_basis(&self.ring, basis))
    }

    /// `I ∩ k[remaining variables]`, returned in the ring of the remaining
    /// variables (original order).
    pub fn eliminate(&self, vars: &[usize]) -> Result<Ideal<F>> {
        if let Some(&v) = vars.iter().find(|&&v| v >= self.ring.nvars()) {
            return Err(Error::InvalidArgument(format!("no variable with index {v}")));
        }
        let keep: Vec<usize> = (0..self.ring.nvars()).filter(|v| !vars.contains(v)).collect();
        let sub = PolyRing::new(
            keep.iter().map(|&i| self.ring.vars()[i].clone()).collect(),
            self.ring.desc().clone(),
        )?;
        let mut map = vec![0; self.ring.nvars()];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        if vars.is_empty() {
            return Ideal::new(&sub, self.gens.iter().map(|g| g.embed(&sub, &map)).collect());
        }
        let basis = elimination_basis(self.ring.nvars(), &self.gens, vars, &[])?;
        let basis = basis.iter().map(|p| p.embed(&sub, &map)).collect();
        Ok(Ideal::from_grevlex_basis(&sub, basis))
    }

    /// `p ∈ √I`, by testing whether `I + (1 - y p)` is the unit ideal.
    pub fn radical_contains(&self, p: &Poly<F>) -> Result<bool> {
        check_ring(p.ring(), &self.ring)?;
        if self.contains(p)? {
            return Ok(true);
        }
        let ext = self.ring.extended(&["rad_y"]);
        let y = ext.var(self.ring.nvars());
        let mut gens: Vec<Poly<F>> = self.gens.iter().map(|q| q.extend_to(&ext)).collect();
        gens.push(&ext.one() - &(&y * &p.extend_to(&ext)));
        Ideal::new(&ext, gens)?.is_unit()
    }
}
