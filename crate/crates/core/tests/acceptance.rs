//! Acceptance run: one line per criterion, non-zero exit if any fails.

#![allow(clippy::type_complexity)]

mod common;

use std::fs;
use std::process::Command;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use formod::blowup::{
    blowup_charts, compose_blowups, finite_modification_to_blowup, AdmissibleIdeal, Chart,
};
use formod::cli::run_text;
use formod::fpalg::{forced_map, localize, map_kernel, ring_map, torsion_saturate, FpAlgebra, Fraction};
use formod::generic::{descend_morphism, generic_chart, lift_point, point_validate, spc_contains, Descent, Point};
use formod::normal::{check_uniformity_implication, is_integrally_closed, normalize, SearchOptions};
use formod::ratfun::RatFun;
use formod::{Monomial, Poly};

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

struct Pair {
    a: FpAlgebra<Q>,
    j: AdmissibleIdeal<Q>,
}

fn pair(vars: &[&str], rels: &[&str], j: &[&str]) -> Pair {
    let a = alg(vars, rels, &["w"]);
    let gens = j.iter().map(|g| a.parse(g).unwrap()).collect();
    let j = AdmissibleIdeal::new(&a, gens).unwrap();
    Pair { a, j }
}

fn corpus_pairs() -> Vec<Pair> {
    vec![
        pair(&["w", "x"], &[], &["x", "w"]),
        pair(&["w", "x"], &["x^2 - w^3"], &["x", "w"]),
        pair(&["w", "x"], &[], &["x^2", "w"]),
        pair(&["w", "x"], &[], &["x", "w^2"]),
        pair(&["w", "u"], &["u^2 - w^2"], &["u", "w"]),
        pair(&["w", "x", "y"], &[], &["x", "y", "w"]),
        pair(&["w", "x", "y"], &["x y"], &["x", "y", "w"]),
        pair(&["w", "x", "y"], &["x y - w"], &["x", "w"]),
        pair(&["w", "x", "y"], &[], &["x y", "w"]),
        pair(&["w", "x", "y"], &["x^2 - w^2 y"], &["x", "w"]),
        pair(&["w", "x", "y"], &[], &["x", "y^2", "w"]),
    ]
}

fn random_element(a: &FpAlgebra<Q>, rng: &mut ChaCha8Rng) -> Poly<Q> {
    let n = a.nvars();
    let terms = rng.gen_range(1..=4);
    let mut p = a.ring().zero();
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        for _ in 0..rng.gen_range(0..=3) {
            e[rng.gen_range(0..n)] += 1;
        }
        let c = q(rng.gen_range(-3..=3));
        p = &p + &Poly::from_terms(a.ring(), [(Monomial::from_exps(&e), c)]);
    }
    p
}

fn is_saturated(b: &FpAlgebra<Q>, f: &Poly<Q>) -> std::result::Result<bool, String> {
    let sat = ok(b.relations().saturation(f))?;
    ok(sat.equals(b.relations()))
}

fn principality() -> Check {
    let pairs = corpus_pairs();
    for (k, p) in pairs.iter().enumerate() {
        let atlas = ok(blowup_charts(&p.a, &p.j))?;
        for (i, c) in atlas.charts.iter().enumerate() {
            let images = ok(p.j.gens().iter().map(|g| c.map.apply(g)).collect::<Result<Vec<_>, _>>())?;
            let jb = ok(c.algebra.ideal(&images))?;
            let fi = ok(c.algebra.ideal(&[ok(c.map.apply(&p.j.gens()[i]))?]))?;
            ensure!(ok(jb.equals(&fi))?, "pair {k}, chart {i}: J B is not (f_i)");
            ensure!(ok(atlas.is_principal_on(i))?, "pair {k}, chart {i}: is_principal_on disagrees");
        }
    }
    Ok(())
}

fn torsion_freeness() -> Check {
    for (k, p) in corpus_pairs().iter().enumerate() {
        for (i, c) in ok(blowup_charts(&p.a, &p.j))?.charts.iter().enumerate() {
            ensure!(is_saturated(&c.algebra, &c.algebra.w())?, "pair {k}, chart {i} has w-torsion");
        }
        for n in 1..=3 {
            let g = ok(generic_chart(&p.a, n))?;
            ensure!(is_saturated(&g.algebra, &g.algebra.w())?, "pair {k}, generic chart {n} has w-torsion");
        }
    }
    Ok(())
}

/// `A[f_j/f_i]` as the image of `A[T_j] -> A[u]/(f_i w u - 1)`.
fn subring_presentation(a: &FpAlgebra<Q>, gens: &[Poly<Q>], i: usize) -> std::result::Result<FpAlgebra<Q>, String> {
    let n = a.nvars();
    let names = vec!["t"; gens.len() - 1];
    let src_ring = a.ring().extended(&names);
    let src_rels = a.relations().gens().iter().map(|r| r.extend_to(&src_ring)).collect();
    let src = ok(FpAlgebra::new(&src_ring, src_rels, vec![]))?;
    let tgt_ring = a.ring().extended(&["u"]);
    let u = tgt_ring.var(n);
    let fi = gens[i].extend_to(&tgt_ring);
    let mut trels: Vec<Poly<Q>> = a.relations().gens().iter().map(|r| r.extend_to(&tgt_ring)).collect();
    trels.push(&(&(&fi * &tgt_ring.var(0)) * &u) - &tgt_ring.one());
    let tgt = ok(FpAlgebra::new(&tgt_ring, trels, vec![]))?;
    let mut images: Vec<Poly<Q>> = (0..n).map(|v| tgt_ring.var(v)).collect();
    let mut defs = vec![None; n];
    for (k, g) in gens.iter().enumerate() {
        if k != i {
            images.push(&(&g.extend_to(&tgt_ring) * &u) * &tgt_ring.var(0));
            defs.push(Some(Fraction::new(g.extend_to(&src_ring), gens[i].extend_to(&src_ring))));
        }
    }
    let phi = ok(ring_map(&src, &tgt, images))?;
    let ker = ok(map_kernel(&phi))?;
    let idef = a.idef().iter().map(|g| g.extend_to(&src_ring)).collect();
    ok(ok(FpAlgebra::new(&src_ring, ker.gens().to_vec(), idef))?.with_var_defs(defs))
}

fn presentation_equivalence() -> Check {
    for (k, p) in corpus_pairs().iter().enumerate() {
        let atlas = ok(blowup_charts(&p.a, &p.j))?;
        for (i, c) in atlas.charts.iter().enumerate() {
            let sub = subring_presentation(&p.a, p.j.gens(), i)?;
            ensure!(same_subring(&c.algebra, &sub, p.a.nvars()), "pair {k}, chart {i}: presentations differ");
        }
    }
    Ok(())
}

/// Torsion-free algebras over a chart: a localization, a double cover and the
/// charts of a further blow-up lying over it.
fn test_algebras(p: &Pair, c: &Chart<Q>, i: usize) -> std::result::Result<Vec<FpAlgebra<Q>>, String> {
    let b = &c.algebra;
    let mut out = Vec::new();
    let one_plus = &b.ring().one() + &b.var(b.nvars() - 1);
    out.push(ok(localize(b, &one_plus))?.0);
    let r = b.ring().extended(&["z"]);
    let z = r.var(b.nvars());
    let mut rels: Vec<Poly<Q>> = b.relations().gens().iter().map(|g| g.extend_to(&r)).collect();
    rels.push(&z.pow(2) - &r.var(0));
    let idef = b.idef().iter().map(|g| g.extend_to(&r)).collect();
    let mut defs: Vec<Option<Fraction<Q>>> = b
        .var_defs()
        .iter()
        .map(|d| d.as_ref().map(|f| Fraction::new(f.num.extend_to(&r), f.den.extend_to(&r))))
        .collect();
    defs.push(None);
    out.push(ok(ok(FpAlgebra::new(&r, rels, idef))?.with_var_defs(defs))?);
    let j2 = ok(AdmissibleIdeal::new(&p.a, vec![p.a.var(1), p.a.w()]))?;
    let comp = ok(compose_blowups(&p.a, &p.j, &j2))?;
    for (k, (over, _)) in comp.factors.iter().enumerate() {
        if *over == i && !comp.atlas.charts[k].empty {
            out.push(comp.atlas.charts[k].algebra.clone());
        }
    }
    Ok(out)
}

fn universal_property() -> Check {
    let mut probes = 0;
    for (k, p) in corpus_pairs().iter().enumerate() {
        let atlas = ok(blowup_charts(&p.a, &p.j))?;
        for (i, chart) in atlas.charts.iter().enumerate() {
            if chart.empty {
                continue;
            }
            for cc in test_algebras(p, chart, i)? {
                ensure!(is_saturated(&cc, &cc.w())?, "pair {k}, chart {i}: test algebra has torsion");
                let psi = ok(ring_map(&p.a, &cc, (0..p.a.nvars()).map(|v| cc.var(v)).collect()))?;
                let images = ok(p.j.gens().iter().map(|g| psi.apply(g)).collect::<Result<Vec<_>, _>>())?;
                let fi = images[i].clone();
                ensure!(
                    ok(ok(cc.ideal(&images))?.equals(&ok(cc.ideal(std::slice::from_ref(&fi)))?))?,
                    "pair {k}, chart {i}: J C not principal"
                );
                let phi = ok(forced_map(&chart.algebra, &cc, psi.images()))?;
                ensure!(ok(chart.map.then(&phi))?.agrees_with(&psi) == Ok(true), "pair {k}, chart {i}: triangle fails");
                // any map with the same base images agrees: f_i is a non-zero-divisor
                ensure!(is_saturated(&cc, &fi)?, "pair {k}, chart {i}: f_i is a zero divisor in C");
                probes += 1;
            }
        }
    }
    ensure!(probes >= 30, "only {probes} factorizations");
    Ok(())
}

fn composition() -> Check {
    let cases: Vec<(Pair, Vec<&str>)> = vec![
        (pair(&["w", "x"], &[], &["x", "w"]), vec!["x", "w"]),
        (pair(&["w", "x", "y"], &[], &["x", "w"]), vec!["y", "w"]),
        (pair(&["w", "x"], &["x^2 - w^3"], &["x", "w"]), vec!["x", "w"]),
        (pair(&["w", "x", "y"], &["x y - w"], &["x", "w"]), vec!["y", "w"]),
        (pair(&["w", "x"], &[], &["x^2", "w"]), vec!["x", "w"]),
        (pair(&["w", "u"], &["u^2 - w^2"], &["u", "w"]), vec!["w"]),
    ];
    for (k, (p, j2)) in cases.iter().enumerate() {
        let j2 = ok(AdmissibleIdeal::new(&p.a, j2.iter().map(|g| p.a.parse(g).unwrap()).collect()))?;
        let c = ok(compose_blowups(&p.a, &p.j, &j2))?;
        ensure!(c.atlas.charts.len() == p.j.gens().len() * j2.gens().len(), "case {k}: chart count");
        for (l, (i, m)) in c.factors.iter().enumerate() {
            let through = ok(c.first.charts[*i].map.then(m))?;
            ensure!(ok(through.agrees_with(&c.atlas.charts[l].map))?, "case {k}, chart {l}: square fails");
        }
    }
    Ok(())
}

fn rf(s: &str) -> RatFun<Q> {
    RatFun::parse(&(), s).unwrap()
}

fn specialization() -> Check {
    let mut triples: Vec<(Pair, u32, Vec<&str>)> = Vec::new();
    for j in [&["x", "w"][..], &["x^2", "w"], &["x", "w^2"]] {
        for x in ["v", "v^2", "1 + v", "v^3 + 2*v^4", "3"] {
            triples.push((pair(&["w", "x"], &[], j), 1, vec![x]));
        }
    }
    for xy in [["v", "v^2"], ["v^2", "v"], ["1", "v^3"], ["v^3", "v^3 + v^4"]] {
        triples.push((pair(&["w", "x", "y"], &[], &["x", "y", "w"]), 1, xy.to_vec()));
    }
    for x in ["v^3", "-v^3"] {
        triples.push((pair(&["w", "x"], &["x^2 - w^3"], &["x", "w"]), 2, vec![x]));
    }
    for (e, xy) in [(2, ["v", "v"]), (3, ["v", "v^2"]), (3, ["v^3", "1"])] {
        triples.push((pair(&["w", "x", "y"], &["x y - w"], &["x", "w"]), e, xy.to_vec()));
    }
    ensure!(triples.len() >= 20, "only {} triples", triples.len());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (k, (p, e, vals)) in triples.iter().enumerate() {
        let pt = ok(Point::new(&p.a, *e, vals.iter().map(|s| rf(s)).collect()))?;
        ok(point_validate(&p.a, &pt))?;
        let atlas = ok(blowup_charts(&p.a, &p.j))?;
        let (i, lifted) = ok(lift_point(&p.a, &p.j, &pt))?;
        let chart = &atlas.charts[i];
        ok(point_validate(&chart.algebra, &lifted))?;
        for _ in 0..10 {
            let f = random_element(&p.a, &mut rng);
            let g = ok(chart.map.apply(&f))?;
            ensure!(ok(pt.eval(&f))? == ok(lifted.eval(&g))?, "triple {k}: values differ at {f}");
            ensure!(
                ok(spc_contains(&p.a, &pt, &f))? == ok(spc_contains(&chart.algebra, &lifted, &g))?,
                "triple {k}: specialization differs at {f}"
            );
        }
    }
    Ok(())
}

fn empty_fiber() -> Check {
    let corpus = [
        alg(&["w"], &["w^2"], &[]),
        alg(&["w", "x"], &["w x", "x^2"], &[]),
        alg(&["w", "x"], &[], &[]),
        alg(&["w", "x"], &["w^3 - w^2 x", "x^3"], &[]),
        alg(&["w", "x"], &["w x - 1"], &[]),
        alg(&["w", "x"], &["w x"], &[]),
        alg(&["w", "x", "y"], &["w y", "x^2", "w^2 - x y"], &[]),
    ];
    for a in &corpus {
        let empty = ok(formod::generic::is_generic_fiber_empty(a))?;
        let zero = ok(ok(torsion_saturate(a))?.0.is_zero_ring())?;
        ensure!(empty == zero, "{a}: empty fiber {empty}, saturation zero {zero}");
    }
    Ok(())
}

fn normalization_seeds() -> Vec<FpAlgebra<Q>> {
    vec![
        alg(&["w", "x"], &["x^2 - w^3"], &["w"]),
        alg(&["w", "u"], &["u^2 - w^2"], &["w"]),
        alg(&["w", "x"], &["x^3 - w^4"], &["w"]),
        alg(&["w", "x"], &["x^2 - w^2 - w^3"], &["w"]),
        alg(&["w", "x", "y"], &["x^2 - w^2 y"], &["w"]),
        alg(&["w", "x"], &["x^2 - w^5"], &["w"]),
    ]
}

fn normalization_oracle() -> Check {
    let opts = SearchOptions::default();
    for a in normalization_seeds() {
        let res = ok(normalize(&a, &opts))?;
        ensure!(res.complete, "{a}: search did not finish");
        let brute = brute_closure(&a, 4, 2);
        ensure!(same_subring(&res.closure, &brute, a.nvars()), "{a}: closure differs from the brute-force one");
    }
    let cusp = &normalization_seeds()[0];
    let cl = ok(normalize(cusp, &opts))?.closure;
    let target = alg(&["w", "y"], &["y^2 - w"], &["w"]);
    let fwd = ok(ring_map(&cl, &target, vec![target.w(), ok(target.parse("w y"))?, target.var(1)]))?;
    let bwd = ok(ring_map(&target, &cl, vec![cl.w(), cl.var(2)]))?;
    ok(formod::fpalg::RingIso::new(fwd, bwd))?;
    Ok(())
}

fn idempotence_and_localization() -> Check {
    let opts = SearchOptions::default();
    let bound6 = SearchOptions::with_degree_bound(6);
    for a in normalization_seeds() {
        let cl = ok(normalize(&a, &opts))?.closure;
        ensure!(ok(normalize(&cl, &opts))?.adjoined.is_empty(), "{a}: renormalizing adjoins");
        for v in 0..cl.nvars() {
            let (l, _) = ok(localize(&cl, &cl.var(v)))?;
            ensure!(ok(is_integrally_closed(&l, &bound6))?.0, "{a}: localization at variable {v} not closed");
        }
    }
    Ok(())
}

fn finite_modification() -> Check {
    let p = |a: &FpAlgebra<Q>, s: &str| a.parse(s).unwrap();
    let u2 = alg(&["w", "u"], &["u^2 - w^2"], &["w"]);
    let cusp = alg(&["w", "x"], &["x^2 - w^3"], &["w"]);
    let quad = alg(&["w", "x", "y"], &["x^2 - w^2 y"], &["w"]);
    let cube = alg(&["w", "x"], &["x^3 - w^4"], &["w"]);
    let seeds = vec![
        (u2.clone(), vec![(p(&u2, "u"), 1)]),
        (cusp.clone(), vec![(p(&cusp, "x"), 1)]),
        (quad.clone(), vec![(p(&quad, "x"), 1)]),
        (cube.clone(), vec![(p(&cube, "x"), 1), (p(&cube, "x^2"), 2)]),
    ];
    for (a, elems) in seeds {
        let r = elems.iter().map(|(_, m)| *m).max().unwrap();
        let w = a.w();
        let mut gens = vec![w.pow(r)];
        gens.extend(elems.iter().map(|(c, m)| c * &w.pow(r - m)));
        let j = ok(AdmissibleIdeal::new(&a, gens))?;
        let chart = &ok(blowup_charts(&a, &j))?.charts[0];
        let modification = adjoin_fractions(&a, &elems);
        ensure!(same_subring(&chart.algebra, &modification, a.nvars()), "{a}: chart differs from the modification");
        let fm = ok(finite_modification_to_blowup(&a, &elems))?;
        ensure!(same_subring(&fm.modification, &modification, a.nvars()), "{a}: library modification differs");
    }
    Ok(())
}

fn uniformity() -> Check {
    let opts = SearchOptions::default();
    let mut members = vec![
        alg(&["w", "x"], &[], &["w"]),
        alg(&["w", "y"], &["y^2 - w"], &["w"]),
        alg(&["w", "x", "y"], &["x y - w"], &["w"]),
    ];
    for a in &normalization_seeds()[..2] {
        members.push(ok(normalize(a, &opts))?.closure);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut probes, mut live) = (0, 0);
    for a in &members {
        ensure!(ok(is_integrally_closed(a, &opts))?.0, "{a} is not integrally closed");
        let w = a.w();
        let in_a = |c: &Poly<Q>, e: u32| a.ideal(&[w.pow(e)]).unwrap().contains(c).unwrap();
        for probe in 0..12 {
            let m = rng.gen_range(2..=4);
            let mut c = random_element(a, &mut rng);
            if probe % 3 == 0 {
                c = &c * &w.pow(m - 1);
            }
            let hyp = (1..=4).any(|j| in_a(&c.pow(j), j * (m - 1)));
            let concl = in_a(&c, m - 1);
            ensure!(!hyp || concl, "{a}: ({c}/w^{})^j in A but not {c}/w^{}", m - 1, m - 1);
            ensure!(ok(check_uniformity_implication(a, &c, m, 4))?, "{a}: library reports a failure at {c}");
            probes += 1;
            live += hyp as usize;
        }
    }
    ensure!(probes >= 10 && live >= 5, "{probes} probes, {live} with the hypothesis");
    Ok(())
}

fn descent() -> Check {
    let plane = alg(&["w", "x"], &[], &["w"]);
    let line = alg(&["w", "y"], &[], &["w"]);
    let space = alg(&["w", "x", "y"], &[], &["w"]);
    let root = alg(&["w", "y"], &["y^2 - w"], &["w"]);
    let cusp = alg(&["w", "x"], &["x^2 - w^3"], &["w"]);
    let mut maps: Vec<(&FpAlgebra<Q>, &FpAlgebra<Q>, Vec<(&str, u32)>)> = Vec::new();
    for im in [("y", 0), ("y", 1), ("w y", 1), ("w^2 y", 1), ("y^2 + w", 1), ("w y^2", 2), ("w^2 + w y", 1)] {
        maps.push((&plane, &line, vec![im]));
    }
    maps.push((&space, &root, vec![("y", 1), ("w", 1)]));
    maps.push((&space, &root, vec![("w y", 1), ("w", 1)]));
    maps.push((&space, &root, vec![("y", 0), ("y^3", 2)]));
    for im in [("w y", 0), ("w^2 y", 1), ("-w^3 y", 2), ("y^3", 0)] {
        maps.push((&cusp, &root, vec![im]));
    }
    for (k, (a, b, ims)) in maps.iter().enumerate() {
        let images: Vec<(Poly<Q>, u32)> = ims.iter().map(|(c, m)| (b.parse(c).unwrap(), *m)).collect();
        let expect = images
            .iter()
            .all(|(c, m)| b.ideal(&[b.w().pow(*m)]).unwrap().contains(c).unwrap());
        match ok(descend_morphism(a, b, &images))? {
            Descent::Map(phi) => {
                ensure!(expect, "map {k}: descended although a membership fails");
                ensure!(ok(b.is_zero_element(&(&phi.images()[0] - &b.w())))?, "map {k}: w not fixed");
                for (i, (c, m)) in images.iter().enumerate() {
                    let diff = &(&phi.images()[i + 1] * &b.w().pow(*m)) - c;
                    ensure!(ok(b.is_zero_element(&diff))?, "map {k}: image {i} does not reproduce the fraction");
                }
                for r in a.relations().gens() {
                    ensure!(ok(b.is_zero_element(&ok(phi.apply(r))?))?, "map {k}: relation not preserved");
                }
            }
            Descent::NeedsBlowup(i) => {
                ensure!(!expect, "map {k}: refused although every membership holds");
                let (c, m) = &images[i];
                ensure!(!ok(ok(b.ideal(&[b.w().pow(*m)]))?.contains(c))?, "map {k}: wrong index {i}");
            }
        }
    }
    ensure!(maps.len() >= 10, "only {} maps", maps.len());
    Ok(())
}

fn determinism() -> Check {
    for file in corpus() {
        let text = fs::read_to_string(&file).unwrap();
        let fl = flags(&text);
        for json in [false, true] {
            let o = options(&fl, json);
            ensure!(run_text(&text, &o) == run_text(&text, &o), "{}: library output differs", file.display());
            let run = || {
                let mut cmd = Command::new(env!("CARGO_BIN_EXE_formod"));
                cmd.args(&fl);
                if json {
                    cmd.arg("--json");
                }
                cmd.arg(&file).output().unwrap()
            };
            let (x, y) = (run(), run());
            ensure!(x.stdout == y.stdout && x.status == y.status, "{}: binary output differs", file.display());
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("chart principality", principality),
        ("torsion-freeness of charts", torsion_freeness),
        ("affine blow-up presentation equivalence", presentation_equivalence),
        ("universal property", universal_property),
        ("composition factorization", composition),
        ("specialization compatibility", specialization),
        ("empty generic fiber criterion", empty_fiber),
        ("normalization oracle equivalence", normalization_oracle),
        ("normalization idempotence and localization", idempotence_and_localization),
        ("finite modification round trip", finite_modification),
        ("uniformity implication", uniformity),
        ("descent dichotomy", descent),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2} {name}: PASS ({secs:.2}s)", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.2}s): {e}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
