//! Buchberger's algorithm with the Gebauer–Möller installation of the
//! product and chain criteria. Pairs are selected by the normal strategy
//! (smallest lcm by total degree, then by the order).

use std::cmp::Ordering;
use std::marker::PhantomData;

use super::order::{compare_kind, OrderKind};
use super::{check_ring, Monomial, MonomialOrder, Poly, Ring};
use crate::error::Result;
use crate::field::Field;

/// Terms sorted descending under `kind`, exponents in permuted positions.
type Terms<F> = Vec<(Monomial, F)>;

struct Engine<'a, F: Field> {
    kind: &'a OrderKind,
    _field: PhantomData<F>,
}

impl<F: Field> Engine<'_, F> {
    fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        compare_kind(self.kind, a.exps(), b.exps())
    }

    fn import(&self, p: &Poly<F>, perm: &[usize]) -> Terms<F> {
        let mut t: Terms<F> = p
            .terms()
            .iter()
            .map(|(m, c)| (m.permuted(perm), c.clone()))
            .collect();
        t.sort_by(|a, b| self.cmp(&b.0, &a.0));
        t
    }

    fn export(&self, ring: &Ring<F>, t: &Terms<F>, perm: &[usize]) -> Poly<F> {
        Poly::from_terms(ring, t.iter().map(|(m, c)| (m.unpermuted(perm), c.clone())))
    }

    /// `a - c * m * b` for sorted term lists.
    fn sub_scaled(&self, a: Terms<F>, c: &F, m: &Monomial, b: &Terms<F>) -> Terms<F> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut ai = a.into_iter().peekable();
        let mut bi = b.iter().map(|(bm, bc)| (bm.mul(m), bc.mul(c))).peekable();
        loop {
            match (ai.peek(), bi.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(ai.next().unwrap()),
                (None, Some(_)) => {
                    let (m, c) = bi.next().unwrap();
                    out.push((m, c.neg()));
                }
                (Some(x), Some(y)) => match self.cmp(&x.0, &y.0) {
                    Ordering::Greater => out.push(ai.next().unwrap()),
                    Ordering::Less => {
                        let (m, c) = bi.next().unwrap();
                        out.push((m, c.neg()));
                    }
                    Ordering::Equal => {
                        let (m, c1) = ai.next().unwrap();
                        let (_, c2) = bi.next().unwrap();
                        let c = c1.sub(&c2);
                        if !c.is_zero() {
                            out.push((m, c));
                        }
                    }
                },
            }
        }
        out
    }

    /// Full reduction of `p` by the monic polynomials `basis`.
    fn reduce(&self, mut p: Terms<F>, basis: &[&Terms<F>]) -> Terms<F> {
        let mut i = 0;
        while i < p.len() {
            let divisor = basis
                .iter()
                .find(|g| !g.is_empty() && g[0].0.divides(&p[i].0));
            match divisor {
                Some(g) => {
                    let q = g[0].0.quotient_of(&p[i].0);
                    let c = p[i].1.clone();
                    let tail = p.split_off(i);
                    let reduced = self.sub_scaled(tail, &c, &q, g);
                    p.extend(reduced);
                }
                None => i += 1,
            }
        }
        p
    }

    fn make_monic(&self, mut p: Terms<F>) -> Terms<F> {
        if let Some((_, lc)) = p.first() {
            if !lc.is_one() {
                let inv = lc.inv().expect("nonzero leading coefficient");
                for t in p.iter_mut() {
                    t.1 = t.1.mul(&inv);
                }
            }
        }
        p
    }

    fn s_poly(&self, f: &Terms<F>, g: &Terms<F>) -> Terms<F> {
        let l = f[0].0.lcm(&g[0].0);
        let mf = f[0].0.quotient_of(&l);
        let mg = g[0].0.quotient_of(&l);
        let lhs: Terms<F> = f[1..].iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect();
        let one = f[0].1.clone();
        self.sub_scaled(lhs, &one, &mg, &g[1..].to_vec())
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Buchberger<'a, F: Field> {
    engine: Engine<'a, F>,
    polys: Vec<Terms<F>>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl<F: Field> Buchberger<'_, F> {
    fn active_basis(&self) -> Vec<&Terms<F>> {
        self.polys
            .iter()
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|(p, _)| p)
            .collect()
    }

    fn lm(&self, i: usize) -> &Monomial {
        &self.polys[i][0].0
    }

    fn update(&mut self, h: Terms<F>) {
        let hl = h[0].0.clone();
        let hi = self.polys.len();
        self.polys.push(h);
        self.active.push(false);

        let mut candidates: Vec<usize> = (0..hi).filter(|&g| self.active[g]).collect();
        candidates.reverse();
        let mut kept: Vec<usize> = Vec::new();
        while let Some(g1) = candidates.pop() {
            let l1 = hl.lcm(self.lm(g1));
            let coprime = hl.coprime(self.lm(g1));
            let dominated = candidates
                .iter()
                .chain(kept.iter())
                .any(|&g2| hl.lcm(self.lm(g2)).divides(&l1));
            if coprime || !dominated {
                kept.push(g1);
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|&g| !hl.coprime(self.lm(g)))
            .map(|g| Pair {
                i: g,
                j: hi,
                lcm: hl.lcm(self.lm(g)),
            })
            .collect();

        let polys = &self.polys;
        self.pairs.retain(|p| {
            let lm_i = &polys[p.i][0].0;
            let lm_j = &polys[p.j][0].0;
            !(hl.divides(&p.lcm) && hl.lcm(lm_i) != p.lcm && hl.lcm(lm_j) != p.lcm)
        });
        self.pairs.extend(new_pairs);

        for g in 0..hi {
            if self.active[g] && hl.divides(&self.polys[g][0].0) {
                self.active[g] = false;
            }
        }
        self.active[hi] = true;
    }

    fn select_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let engine = &self.engine;
        let best = (0..self.pairs.len())
            .min_by(|&a, &b| {
                let (la, lb) = (&self.pairs[a].lcm, &self.pairs[b].lcm);
                la.degree()
                    .cmp(&lb.degree())
                    .then_with(|| engine.cmp(la, lb))
                    .then_with(|| (self.pairs[a].j, self.pairs[a].i).cmp(&(self.pairs[b].j, self.pairs[b].i)))
            })
            .unwrap();
        Some(self.pairs.swap_remove(best))
    }

    fn add_input(&mut self, f: Terms<F>) {
        let h = self.engine.reduce(f, &self.active_basis());
        if !h.is_empty() {
            let h = self.engine.make_monic(h);
            self.update(h);
        }
    }

    fn run(&mut self) {
        while let Some(pair) = self.select_pair() {
            let s = self.engine.s_poly(&self.polys[pair.i], &self.polys[pair.j]);
            let h = self.engine.reduce(s, &self.active_basis());
            if !h.is_empty() {
                let h = self.engine.make_monic(h);
                self.update(h);
            }
        }
    }

    /// Interreduces the active set into the reduced basis, sorted descending
    /// by leading monomial.
    fn finish(self) -> Vec<Terms<F>> {
        let engine = self.engine;
        let mut basis: Vec<Terms<F>> = self
            .polys
            .into_iter()
            .zip(self.active)
            .filter(|(_, a)| *a)
            .map(|(p, _)| p)
            .collect();
        basis.sort_by(|a, b| engine.cmp(&a[0].0, &b[0].0));
        for k in 0..basis.len() {
            let g = std::mem::take(&mut basis[k]);
            let others: Vec<&Terms<F>> = basis.iter().filter(|p| !p.is_empty()).collect();
            let head = g[0].clone();
            let tail = engine.reduce(g[1..].to_vec(), &others);
            let mut reduced = vec![head];
            reduced.extend(tail);
            basis[k] = reduced;
        }
        basis.sort_by(|a, b| engine.cmp(&b[0].0, &a[0].0));
        basis
    }
}

/// The reduced Gröbner basis of the ideal generated by `gens` under `order`:
/// monic, sorted by leading monomial, largest first. Empty for the zero ideal.
pub fn groebner<F: Field>(gens: &[Poly<F>], order: &MonomialOrder) -> Result<Vec<Poly<F>>> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    for g in gens {
        check_ring(g.ring(), &ring)?;
    }
    let perm = order.permutation(ring.nvars());
    let mut bb = Buchberger {
        engine: Engine { kind: &order.kind, _field: PhantomData },
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };
    for g in gens {
        let t = bb.engine.import(g, &perm);
        bb.add_input(t);
    }
    bb.run();
    let engine = Engine::<F> { kind: &order.kind, _field: PhantomData };
    Ok(bb
        .finish()
        .iter()
        .map(|t| engine.export(&ring, t, &perm))
        .collect())
}

/// The remainder of `p` under full multivariate division by `basis`. When
/// `basis` is a Gröbner basis under `order` this is the unique normal form.
pub fn normal_form<F: Field>(p: &Poly<F>, basis: &[Poly<F>], order: &MonomialOrder) -> Result<Poly<F>> {
    let ring = p.ring().clone();
    for g in basis {
        check_ring(g.ring(), &ring)?;
    }
    let perm = order.permutation(ring.nvars());
    let engine = Engine::<F> { kind: &order.kind, _field: PhantomData };
    let gs: Vec<Terms<F>> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| engine.make_monic(engine.import(g, &perm)))
        .collect();
    let refs: Vec<&Terms<F>> = gs.iter().collect();
    let r = engine.reduce(engine.import(p, &perm), &refs);
    Ok(engine.export(&ring, &r, &perm))
}

/// Buchberger's criterion: every S-polynomial reduces to zero.
pub fn is_groebner_basis<F: Field>(basis: &[Poly<F>], order: &MonomialOrder) -> Result<bool> {
    let Some(first) = basis.first() else {
        return Ok(true);
    };
    let ring = first.ring().clone();
    let perm = order.permutation(ring.nvars());
    let engine = Engine::<F> { kind: &order.kind, _field: PhantomData };
    let gs: Vec<Terms<F>> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| engine.make_monic(engine.import(g, &perm)))
        .collect();
    let refs: Vec<&Terms<F>> = gs.iter().collect();
    for i in 0..gs.len() {
        for j in 0..i {
            let s = engine.s_poly(&gs[i], &gs[j]);
            if !engine.reduce(s, &refs).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
