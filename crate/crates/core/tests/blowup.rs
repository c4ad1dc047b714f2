#![allow(clippy::type_complexity)]

mod common;

use common::*;
use formod::blowup::{
    affine_blowup_algebra, blowup_charts, chart_transition, check_cocycle, compose_blowups,
    extend_admissible_ideal, finite_modification_to_blowup, AdmissibleIdeal, DEFAULT_EXTENSION_BOUND,
};
use formod::fpalg::{localize, FpAlgebra};
use formod::{Error, Poly};

fn adm(a: &FpAlgebra<Q>, gens: &[&str]) -> AdmissibleIdeal<Q> {
    AdmissibleIdeal::new(a, gens.iter().map(|g| a.parse(g).unwrap()).collect()).unwrap()
}

fn ideal_of(a: &FpAlgebra<Q>, gens: &[&str]) -> formod::ideal::Ideal<Q> {
    a.ideal(&gens.iter().map(|g| a.parse(g).unwrap()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn affine_blowup_examples() {
    let a = alg(&["w", "x"], &[], &["w", "x"]);
    let j = adm(&a, &["x", "w"]);
    let (bx, _) = affine_blowup_algebra(&a, &j, 0).unwrap();
    // the kernel of k[w,x,t] -> B is (w - x t), so B = k[x,t]
    assert!(bx.relations().equals(&ideal_of(&bx, &["w - x t"])).unwrap());
    let (bw, _) = affine_blowup_algebra(&a, &j, 1).unwrap();
    assert!(bw.relations().equals(&ideal_of(&bw, &["x - w t"])).unwrap());
    assert_eq!(affine_blowup_algebra(&a, &j, 2).unwrap_err(), Error::NotAGenerator(2));

    let cusp = alg(&["w", "x"], &["x^2 - w^3"], &["w"]);
    let (b, _) = affine_blowup_algebra(&cusp, &adm(&cusp, &["w"]), 0).unwrap();
    assert!(b.same_presentation(&cusp).unwrap());
}

#[test]
fn chart_examples() {
    let a = alg(&["w", "x"], &[], &["w", "x"]);
    let at = blowup_charts(&a, &adm(&a, &["x", "w"])).unwrap();
    assert_eq!(at.charts.len(), 2);
    assert!(at.charts.iter().all(|c| !c.empty));
    let unit = blowup_charts(&a, &adm(&a, &["1"])).unwrap();
    assert_eq!(unit.charts.len(), 1);
    assert!(unit.charts[0].algebra.same_presentation(&a).unwrap());
    let err = AdmissibleIdeal::new(&a, vec![a.var(1)]).unwrap_err();
    assert!(matches!(err, Error::NotAdmissible(_)));
}

#[test]
fn transition_example() {
    let a = alg(&["w", "x"], &[], &["w", "x"]);
    let at = blowup_charts(&a, &adm(&a, &["x", "w"])).unwrap();
    let iso = chart_transition(&at, 0, 1).unwrap();
    let src = iso.forward.source().clone();
    let tgt = iso.forward.target().clone();
    assert_eq!(src.ring().vars(), &["w", "x", "t", "u"]);
    // on the x chart w = x t; t = w/x goes to 1/s and s = x/w comes back as 1/t
    assert!(src.is_zero_element(&src.parse("w - x t").unwrap()).unwrap());
    let s_back = iso.backward.apply(&tgt.var(2)).unwrap();
    assert!(src.is_zero_element(&(&(&s_back * &src.var(2)) - &src.ring().one())).unwrap());
    let t_fwd = iso.forward.apply(&src.var(2)).unwrap();
    assert!(tgt.is_zero_element(&(&(&t_fwd * &tgt.var(2)) - &tgt.ring().one())).unwrap());
    assert!(chart_transition(&at, 1, 1).is_ok());
}

#[test]
fn empty_overlap_witness() {
    let a = alg(&["w", "x", "y"], &["x y"], &["w"]);
    let at = blowup_charts(&a, &adm(&a, &["x", "y", "w"])).unwrap();
    let ov = at.overlap(0, 1).unwrap();
    // 1 is a combination of the overlap relations of low degree
    let one = ov.ring().one();
    assert!(naive_member(ov.relations().gens(), &one, 3));
    assert!(ov.is_zero_ring().unwrap());
    assert_eq!(chart_transition(&at, 0, 1).unwrap_err(), Error::EmptyOverlap(0, 1));
    assert!(check_cocycle(&at, 0, 1, 2).unwrap());
    assert!(chart_transition(&at, 0, 2).is_ok());
}

#[test]
fn composition_example() {
    let a = alg(&["w", "x", "y"], &[], &["w"]);
    let c = compose_blowups(&a, &adm(&a, &["x", "w"]), &adm(&a, &["y", "w"])).unwrap();
    assert_eq!(c.atlas.charts.len(), 4);
    for (k, (i, m)) in c.factors.iter().enumerate() {
        assert_eq!(*i, k / 2);
        let through = c.first.charts[*i].map.then(m).unwrap();
        assert!(through.agrees_with(&c.atlas.charts[k].map).unwrap());
    }
    let c1 = compose_blowups(&a, &adm(&a, &["x", "w"]), &adm(&a, &["1"])).unwrap();
    assert_eq!(c1.atlas.charts.len(), 2);
    for k in 0..2 {
        assert!(formod::fpalg::forced_iso(&c1.atlas.charts[k].algebra, &c1.first.charts[k].algebra).is_ok());
    }
    let cw = compose_blowups(&a, &adm(&a, &["w"]), &adm(&a, &["w"])).unwrap();
    assert_eq!(cw.atlas.charts.len(), 1);
    assert!(cw.atlas.charts[0].algebra.same_presentation(&a).unwrap());
}

/// `J' A[1/g]` against the local ideal generated by `p_i u^{m_i}` in `A[u]/(g u - 1)`.
fn restricts_to(a: &FpAlgebra<Q>, g: &Poly<Q>, j: &AdmissibleIdeal<Q>, local: &[(Poly<Q>, u32)]) -> bool {
    let (l, inc) = localize(a, g).unwrap();
    let u = l.var(a.nvars());
    let lhs: Vec<Poly<Q>> = j.gens().iter().map(|p| inc.apply(p).unwrap()).collect();
    let rhs: Vec<Poly<Q>> = local.iter().map(|(p, m)| &inc.apply(p).unwrap() * &u.pow(*m)).collect();
    l.ideal(&lhs).unwrap().equals(&l.ideal(&rhs).unwrap()).unwrap()
}

#[test]
fn extension_examples() {
    let a = alg(&["w", "x"], &[], &["w"]);
    let x = a.var(1);
    let w = a.w();
    let cases: Vec<(Vec<(Poly<Q>, u32)>, &[&str])> = vec![
        (vec![(w.clone(), 1)], &["w"]),
        (vec![(w.clone(), 0)], &["w"]),
        (vec![(a.ring().one(), 1)], &["1"]),
    ];
    for (local, expect) in cases {
        let j = extend_admissible_ideal(&a, &x, &local, DEFAULT_EXTENSION_BOUND).unwrap();
        assert!(j.ideal().unwrap().equals(&ideal_of(&a, expect)).unwrap(), "{j}");
        assert!(restricts_to(&a, &x, &j, &local));
    }
    let b = alg(&["w", "x", "y"], &[], &["w"]);
    let local = vec![(b.parse("y").unwrap(), 1), (b.parse("w").unwrap(), 2)];
    let g = b.parse("x").unwrap();
    let j = extend_admissible_ideal(&b, &g, &local, DEFAULT_EXTENSION_BOUND).unwrap();
    assert!(restricts_to(&b, &g, &j, &local));
    let err = extend_admissible_ideal(&b, &g, &[(b.parse("y").unwrap(), 1)], 4).unwrap_err();
    assert_eq!(err, Error::NotOpenLocally);
}

#[test]
fn finite_modification_examples() {
    let a = alg(&["w", "u"], &["u^2 - w^2"], &["w"]);
    let fm = finite_modification_to_blowup(&a, &[(a.var(1), 1)]).unwrap();
    assert!(fm.ideal.ideal().unwrap().equals(&ideal_of(&a, &["w", "u"])).unwrap());
    assert_eq!(fm.chart, 0);
    let m = &fm.modification;
    assert!(m.is_zero_element(&m.parse("w z - u").unwrap()).unwrap());
    assert!(m.is_zero_element(&m.parse("z^2 - 1").unwrap()).unwrap());
    assert!(fm.iso.forward.is_injective().unwrap());
    assert!(fm.iso.backward.is_injective().unwrap());

    let none = finite_modification_to_blowup(&a, &[]).unwrap();
    assert!(none.ideal.ideal().unwrap().is_unit().unwrap());
    assert!(none.modification.same_presentation(&a).unwrap());

    let plane = alg(&["w", "x"], &[], &["w"]);
    let err = finite_modification_to_blowup(&plane, &[(plane.var(1), 1)]).unwrap_err();
    assert_eq!(err, Error::NotIntegral(0));
}

#[test]
fn charts_are_torsion_free_and_principal() {
    let seeds: &[(&[&str], &[&str], &[&str], &[&str])] = &[
        (&["w", "x"], &["x^2 - w^3"], &["w"], &["x", "w"]),
        (&["w", "x", "y"], &[], &["w", "x", "y"], &["x", "y", "w"]),
        (&["w", "x", "y"], &["x y - w"], &["w"], &["x", "w"]),
        (&["w", "x", "y"], &["x y"], &["w"], &["x", "y", "w"]),
    ];
    for (v, r, i, j) in seeds {
        let a = alg(v, r, i);
        let at = blowup_charts(&a, &adm(&a, j)).unwrap();
        for k in 0..at.charts.len() {
            assert!(at.is_principal_on(k).unwrap());
            let b = &at.charts[k].algebra;
            let sat = b.relations().saturation(&b.w()).unwrap();
            assert!(sat.equals(b.relations()).unwrap());
        }
    }
}
