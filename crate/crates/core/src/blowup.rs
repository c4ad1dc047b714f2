//! Admissible blow-ups of affine models: affine blow-up algebras, chart
//! atlases and their transitions, products of centers, extension of ideals
//! from basic opens, and finite modifications presented as blow-ups.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fpalg::{
    forced_iso, forced_map, integral_relation, is_open_ideal, localize, ring_map,
    shared_base_images, Fraction, FpAlgebra, RingIso, RingMap,
};
use crate::ideal::Ideal;
use crate::poly::{check_ring, Poly};

/// Finitely many elements of an algebra generating an open ideal.
#[derive(Clone, Debug)]
pub struct AdmissibleIdeal<F: Field> {
    ambient: FpAlgebra<F>,
    gens: Vec<Poly<F>>,
}

impl<F: Field> fmt::Display for AdmissibleIdeal<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", gens.join(", "))
    }
}

impl<F: Field> AdmissibleIdeal<F> {
    pub fn new(ambient: &FpAlgebra<F>, gens: Vec<Poly<F>>) -> Result<Self> {
        for g in &gens {
            check_ring(g.ring(), ambient.ring())?;
        }
        if !is_open_ideal(ambient, &gens)? {
            let shown: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
            return Err(Error::NotAdmissible(format!(
                "({}) does not contain a power of the ideal of definition",
                shown.join(", ")
            )));
        }
        Ok(AdmissibleIdeal {
            ambient: ambient.clone(),
            gens,
        })
    }

    pub fn ambient(&self) -> &FpAlgebra<F> {
        &self.ambient
    }

    pub fn gens(&self) -> &[Poly<F>] {
        &self.gens
    }

    /// The ideal of the polynomial ring generated by the generators and the
    /// relations of the ambient algebra.
    pub fn ideal(&self) -> Result<Ideal<F>> {
        self.ambient.ideal(&self.gens)
    }

    /// Generators `f g`, ordered with the first factor varying slowest.
    pub fn product(&self, other: &AdmissibleIdeal<F>) -> Result<Self> {
        check_ring(self.ambient.ring(), other.ambient.ring())?;
        let gens = self
            .gens
            .iter()
            .flat_map(|f| other.gens.iter().map(move |g| f * g))
            .collect();
        AdmissibleIdeal::new(&self.ambient, gens)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Plain,
    Normalized,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Plain => "plain",
            Provenance::Normalized => "normalized",
        })
    }
}

/// The chart of the blow-up where the generator `f_i` generates the ideal.
#[derive(Clone, Debug)]
pub struct Chart<F: Field> {
    pub algebra: FpAlgebra<F>,
    /// Structure map from the base.
    pub map: RingMap<F>,
    /// Image of `f_i`.
    pub element: Poly<F>,
    /// Images of `f_j / f_i` for every generator (`1` at position `i`).
    pub rees: Vec<Poly<F>>,
    /// The chart algebra is the zero ring.
    pub empty: bool,
}

#[derive(Clone, Debug)]
pub struct ChartAtlas<F: Field> {
    pub base: FpAlgebra<F>,
    pub ideal: AdmissibleIdeal<F>,
    pub charts: Vec<Chart<F>>,
    pub provenance: Provenance,
}

fn build_chart<F: Field>(a: &FpAlgebra<F>, j: &AdmissibleIdeal<F>, i: usize) -> Result<Chart<F>> {
    check_ring(j.ambient().ring(), a.ring())?;
    let gens = j.gens();
    if i >= gens.len() {
        return Err(Error::NotAGenerator(i));
    }
    let n = a.nvars();
    let names = vec!["t"; gens.len() - 1];
    let (ext, mut rels, idef, mut defs) = a.extend_vars(&names);
    let emb: Vec<Poly<F>> = gens.iter().map(|g| g.extend_to(&ext)).collect();
    let fi = &emb[i];
    let mut rees = Vec::with_capacity(gens.len());
    let mut k = n;
    for (jdx, fj) in emb.iter().enumerate() {
        if jdx == i {
            rees.push(ext.one());
            continue;
        }
        let t = ext.var(k);
        rels.push(&(fi * &t) - fj);
        defs[k] = Some(Fraction::new(fj.clone(), fi.clone()));
        rees.push(t);
        k += 1;
    }
    let sat = Ideal::new(&ext, rels)?.saturation(&(fi * &ext.var(0)))?;
    let algebra = FpAlgebra::from_parts(&ext, sat, idef, defs);
    let _ = algebra.is_torsion_free();
    let map = ring_map(a, &algebra, (0..n).map(|v| ext.var(v)).collect())?;
    let element = algebra.reduce(fi)?;
    let rees = rees
        .iter()
        .map(|p| algebra.reduce(p))
        .collect::<Result<Vec<_>>>()?;
    let empty = algebra.is_zero_ring()?;
    Ok(Chart {
        algebra,
        map,
        element,
        rees,
        empty,
    })
}

/// `A[J/f_i]`: the Rees relations `f_i t_j - f_j` saturated at `f_i` and `w`.
pub fn affine_blowup_algebra<F: Field>(
    a: &FpAlgebra<F>,
    j: &AdmissibleIdeal<F>,
    i: usize,
) -> Result<(FpAlgebra<F>, RingMap<F>)> {
    let chart = build_chart(a, j, i)?;
    Ok((chart.algebra, chart.map))
}

/// One chart per generator, in generator order.
pub fn blowup_charts<F: Field>(a: &FpAlgebra<F>, j: &AdmissibleIdeal<F>) -> Result<ChartAtlas<F>> {
    let charts = (0..j.gens().len())
        .map(|i| build_chart(a, j, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartAtlas {
        base: a.clone(),
        ideal: j.clone(),
        charts,
        provenance: Provenance::Plain,
    })
}

impl<F: Field> ChartAtlas<F> {
    fn chart(&self, i: usize) -> Result<&Chart<F>> {
        self.charts.get(i).ok_or(Error::NotAGenerator(i))
    }

    /// `J B_i = (f_i)` in chart `i`.
    pub fn is_principal_on(&self, i: usize) -> Result<bool> {
        let c = self.chart(i)?;
        let gens = self
            .ideal
            .gens()
            .iter()
            .map(|g| c.map.apply(g))
            .collect::<Result<Vec<_>>>()?;
        c.algebra
            .ideal(&gens)?
            .equals(&c.algebra.ideal(std::slice::from_ref(&c.element))?)
    }

    /// Chart `i` localized at the image of `f_j / f_i`.
    pub fn overlap(&self, i: usize, j: usize) -> Result<FpAlgebra<F>> {
        let c = self.chart(i)?;
        self.chart(j)?;
        Ok(localize(&c.algebra, &c.rees[j])?.0)
    }

    fn triple_overlap(&self, i: usize, j: usize, k: usize) -> Result<FpAlgebra<F>> {
        let c = self.chart(i)?;
        Ok(localize(&c.algebra, &(&c.rees[j] * &c.rees[k]))?.0)
    }
}

/// The gluing isomorphism between chart `i` with `f_j/f_i` inverted and chart
/// `j` with `f_i/f_j` inverted.
pub fn chart_transition<F: Field>(atlas: &ChartAtlas<F>, i: usize, j: usize) -> Result<RingIso<F>> {
    if i == j {
        return Ok(RingIso::identity(&atlas.chart(i)?.algebra));
    }
    if atlas.chart(i)?.empty || atlas.chart(j)?.empty {
        return Err(Error::EmptyOverlap(i, j));
    }
    let lij = atlas.overlap(i, j)?;
    let lji = atlas.overlap(j, i)?;
    if lij.is_zero_ring()? || lji.is_zero_ring()? {
        return Err(Error::EmptyOverlap(i, j));
    }
    forced_iso(&lij, &lji)
}

/// On the triple overlap of charts `i, j, k`, going `i -> j -> k` agrees with
/// going `i -> k`. Vacuously true when the triple overlap is empty.
pub fn check_cocycle<F: Field>(atlas: &ChartAtlas<F>, i: usize, j: usize, k: usize) -> Result<bool> {
    let ti = atlas.triple_overlap(i, j, k)?;
    let tj = atlas.triple_overlap(j, i, k)?;
    let tk = atlas.triple_overlap(k, i, j)?;
    if ti.is_zero_ring()? || tj.is_zero_ring()? || tk.is_zero_ring()? {
        return Ok(true);
    }
    let ij = forced_map(&ti, &tj, &shared_base_images(&ti, &tj)?)?;
    let jk = forced_map(&tj, &tk, &shared_base_images(&tj, &tk)?)?;
    let ik = forced_map(&ti, &tk, &shared_base_images(&ti, &tk)?)?;
    ij.then(&jk)?.agrees_with(&ik)
}

/// The blow-up in `J1 J2` together with, for every product chart, the map
/// from the `J1`-chart it lies over.
#[derive(Clone, Debug)]
pub struct Composition<F: Field> {
    pub atlas: ChartAtlas<F>,
    pub first: ChartAtlas<F>,
    /// `(index of the J1 chart, map from that chart to the product chart)`.
    pub factors: Vec<(usize, RingMap<F>)>,
}

pub fn compose_blowups<F: Field>(
    a: &FpAlgebra<F>,
    j1: &AdmissibleIdeal<F>,
    j2: &AdmissibleIdeal<F>,
) -> Result<Composition<F>> {
    let product = j1.product(j2)?;
    let atlas = blowup_charts(a, &product)?;
    let first = blowup_charts(a, j1)?;
    let per = j2.gens().len();
    let factors = atlas
        .charts
        .iter()
        .enumerate()
        .map(|(k, chart)| {
            let src = &first.charts[k / per].algebra;
            let map = forced_map(src, &chart.algebra, &shared_base_images(src, &chart.algebra)?)?;
            Ok((k / per, map))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Composition {
        atlas,
        first,
        factors,
    })
}

/// Exponent search bound used by [`extend_admissible_ideal`] by default.
pub const DEFAULT_EXTENSION_BOUND: u32 = 16;

fn idef_power<F: Field>(a: &FpAlgebra<F>, k: u32) -> Vec<Poly<F>> {
    let mut acc = vec![a.ring().one()];
    for _ in 0..k {
        let mut next: Vec<Poly<F>> = Vec::new();
        for p in &acc {
            for g in a.idef() {
                let q = p * g;
                if !next.contains(&q) {
                    next.push(q);
                }
            }
        }
        acc = next;
    }
    acc
}

/// An admissible ideal of `A` restricting on `D(g)` to the ideal generated by
/// the fractions `p_i / g^{m_i}`: the cleared numerators plus the smallest
/// power of the ideal of definition that keeps the restriction unchanged.
pub fn extend_admissible_ideal<F: Field>(
    a: &FpAlgebra<F>,
    g: &Poly<F>,
    local: &[(Poly<F>, u32)],
    k_max: u32,
) -> Result<AdmissibleIdeal<F>> {
    check_ring(g.ring(), a.ring())?;
    let (loc, inc) = localize(a, g)?;
    let u = loc.var(a.nvars());
    let lgens = local
        .iter()
        .map(|(p, m)| Ok(&inc.apply(p)? * &u.pow(*m)))
        .collect::<Result<Vec<_>>>()?;
    if !is_open_ideal(&loc, &lgens)? {
        return Err(Error::NotOpenLocally);
    }
    let target = loc.ideal(&lgens)?;
    let m = local.iter().map(|(_, m)| *m).max().unwrap_or(0);
    let cleared: Vec<Poly<F>> = local.iter().map(|(p, mi)| p * &g.pow(m - mi)).collect();
    for k in 0..=k_max {
        let mut gens = cleared.clone();
        for q in idef_power(a, k) {
            if !a.ideal(&gens)?.contains(&q)? {
                gens.push(q);
            }
        }
        let images = gens.iter().map(|p| inc.apply(p)).collect::<Result<Vec<_>>>()?;
        if loc.ideal(&images)?.equals(&target)? && is_open_ideal(a, &gens)? {
            return AdmissibleIdeal::new(a, gens);
        }
    }
    Err(Error::ExtensionBoundExceeded(k_max))
}

/// A finite modification `A[c_1/w^r, .., c_n/w^r]` realized as a chart of the
/// blow-up in `(w^r, c_1, .., c_n)`.
#[derive(Clone, Debug)]
pub struct FiniteModification<F: Field> {
    pub ideal: AdmissibleIdeal<F>,
    /// Index of the `w^r` chart.
    pub chart: usize,
    /// The presented modification `A[z]/(w^r z_i - c_i, integrality relations)`.
    pub modification: FpAlgebra<F>,
    /// From the chart to the presented modification.
    pub iso: RingIso<F>,
}

pub fn finite_modification_to_blowup<F: Field>(
    a: &FpAlgebra<F>,
    elems: &[(Poly<F>, u32)],
) -> Result<FiniteModification<F>> {
    a.require_torsion_free()?;
    let r = elems.iter().map(|(_, m)| *m).max().unwrap_or(0);
    let w = a.w();
    let cs: Vec<Poly<F>> = elems.iter().map(|(c, m)| c * &w.pow(r - m)).collect();
    let mut relations = Vec::with_capacity(cs.len());
    for (i, c) in cs.iter().enumerate() {
        check_ring(c.ring(), a.ring())?;
        relations.push(integral_relation(a, c, r)?.ok_or(Error::NotIntegral(i))?);
    }
    let mut gens = vec![w.pow(r)];
    gens.extend(cs.iter().cloned());
    let ideal = AdmissibleIdeal::new(a, gens)?;
    let chart = build_chart(a, &ideal, 0)?;

    let n = a.nvars();
    let names = vec!["z"; cs.len()];
    let (ext, mut rels, idef, mut defs) = a.extend_vars(&names);
    let wr = ext.var(0).pow(r);
    for (i, (c, rel)) in cs.iter().zip(&relations).enumerate() {
        let ce = c.extend_to(&ext);
        rels.push(&(&wr * &ext.var(n + i)) - &ce);
        let mut map: Vec<usize> = (0..n).collect();
        map.push(n + i);
        rels.push(rel.embed(&ext, &map));
        defs[n + i] = Some(Fraction::new(ce, wr.clone()));
    }
    let sat = Ideal::new(&ext, rels)?.saturation(&ext.var(0))?;
    let modification = FpAlgebra::from_parts(&ext, sat, idef, defs);
    let iso = forced_iso(&chart.algebra, &modification)?;
    Ok(FiniteModification {
        ideal,
        chart: 0,
        modification,
        iso,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpalg::make_algebra;
    use crate::field::Rational;

    fn alg(vars: &[&str], rels: &[&str], idef: &[&str]) -> FpAlgebra<Rational> {
        make_algebra(vars, rels, idef, "w", ()).unwrap()
    }

    fn adm(a: &FpAlgebra<Rational>, gens: &[&str]) -> AdmissibleIdeal<Rational> {
        AdmissibleIdeal::new(a, gens.iter().map(|g| a.parse(g).unwrap()).collect()).unwrap()
    }

    #[test]
    fn plane_blowup_charts() {
        let a = alg(&["w", "x"], &[], &["w", "x"]);
        let j = adm(&a, &["x", "w"]);
        let atlas = blowup_charts(&a, &j).unwrap();
        assert_eq!(atlas.charts.len(), 2);
        let bx = &atlas.charts[0].algebra;
        // chart at x: w = x t
        assert!(bx.is_zero_element(&bx.parse("w - x t").unwrap()).unwrap());
        let bw = &atlas.charts[1].algebra;
        assert!(bw.is_zero_element(&bw.parse("x - w t").unwrap()).unwrap());
        for i in 0..2 {
            assert!(atlas.is_principal_on(i).unwrap());
        }
        let iso = chart_transition(&atlas, 0, 1).unwrap();
        assert_eq!(iso.forward.images()[1], iso.forward.target().var(1));
        assert!(chart_transition(&atlas, 1, 1).is_ok());
    }

    #[test]
    fn non_admissible_center_rejected() {
        let a = alg(&["w", "x"], &[], &["w", "x"]);
        let err = AdmissibleIdeal::new(&a, vec![a.var(1)]).unwrap_err();
        assert!(matches!(err, Error::NotAdmissible(_)));
        let err = affine_blowup_algebra(&a, &adm(&a, &["x", "w"]), 2).unwrap_err();
        assert_eq!(err, Error::NotAGenerator(2));
    }

    #[test]
    fn unit_and_principal_centers() {
        let a = alg(&["w", "x"], &["x^2 - w^3"], &["w"]);
        for gens in [&["1"][..], &["w"][..]] {
            let atlas = blowup_charts(&a, &adm(&a, gens)).unwrap();
            assert_eq!(atlas.charts.len(), 1);
            assert!(forced_iso(&a, &atlas.charts[0].algebra).is_ok());
        }
    }

    #[test]
    fn empty_overlap_is_reported() {
        let a = alg(&["w", "x", "y"], &["x y"], &["w", "x", "y"]);
        let atlas = blowup_charts(&a, &adm(&a, &["x", "y", "w"])).unwrap();
        assert_eq!(chart_transition(&atlas, 0, 1).unwrap_err(), Error::EmptyOverlap(0, 1));
        assert!(chart_transition(&atlas, 0, 2).is_ok());
    }

    #[test]
    fn cocycle_on_three_charts() {
        let a = alg(&["w", "x", "y"], &[], &["w", "x", "y"]);
        let atlas = blowup_charts(&a, &adm(&a, &["x", "y", "w"])).unwrap();
        assert!(check_cocycle(&atlas, 0, 1, 2).unwrap());
        assert!(check_cocycle(&atlas, 2, 0, 1).unwrap());
    }

    #[test]
    fn composition_factors_through_first_center() {
        let a = alg(&["w", "x", "y"], &[], &["w"]);
        let comp = compose_blowups(&a, &adm(&a, &["x", "w"]), &adm(&a, &["y", "w"])).unwrap();
        assert_eq!(comp.atlas.charts.len(), 4);
        for (k, (i, f)) in comp.factors.iter().enumerate() {
            let via = comp.first.charts[*i].map.then(f).unwrap();
            assert!(via.agrees_with(&comp.atlas.charts[k].map).unwrap());
        }
    }

    #[test]
    fn extension_examples() {
        let a = alg(&["w", "x"], &[], &["w"]);
        let (w, x) = (a.w(), a.var(1));
        let j = extend_admissible_ideal(&a, &x, &[(w.clone(), 1)], 16).unwrap();
        assert!(j.ideal().unwrap().equals(&a.ideal(std::slice::from_ref(&w)).unwrap()).unwrap());
        let j = extend_admissible_ideal(&a, &x, &[(w.clone(), 0)], 16).unwrap();
        assert!(j.ideal().unwrap().equals(&a.ideal(std::slice::from_ref(&w)).unwrap()).unwrap());
        let j = extend_admissible_ideal(&a, &x, &[(a.ring().one(), 1)], 16).unwrap();
        assert!(j.ideal().unwrap().is_unit().unwrap());
        let err = extend_admissible_ideal(&a, &x, &[(a.parse("x - 1").unwrap(), 0)], 16).unwrap_err();
        assert_eq!(err, Error::NotOpenLocally);
    }

    #[test]
    fn finite_modification_examples() {
        let a = alg(&["w", "u"], &["u^2 - w^2"], &["w"]);
        let fm = finite_modification_to_blowup(&a, &[(a.var(1), 1)]).unwrap();
        assert_eq!(fm.ideal.gens().len(), 2);
        assert_eq!(fm.chart, 0);
        let m = &fm.modification;
        assert!(m.is_zero_element(&m.parse("z^2 - 1").unwrap()).unwrap());

        let triv = finite_modification_to_blowup(&a, &[]).unwrap();
        assert!(triv.ideal.ideal().unwrap().is_unit().unwrap());

        let plane = alg(&["w", "x"], &[], &["w"]);
        let err = finite_modification_to_blowup(&plane, &[(plane.var(1), 1)]).unwrap_err();
        assert_eq!(err, Error::NotIntegral(0));
    }
}
