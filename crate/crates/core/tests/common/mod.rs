//! Helpers shared by the integration tests: seeds, random polynomials and
//! oracles that avoid Gröbner bases (dense linear algebra over Q) or use a
//! construction independent of the one under test.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use formod::cli::{parse_order, Options};
use formod::fpalg::{forced_map, make_algebra, map_kernel, ring_map, FpAlgebra, Fraction, RingIso};
use formod::ideal::Ideal;
use formod::{CoeffField, Monomial, MonomialOrder, Poly, PolyRing, Rational, Ring};

pub type Q = Rational;

pub fn alg(vars: &[&str], rels: &[&str], idef: &[&str]) -> FpAlgebra<Q> {
    make_algebra(vars, rels, idef, "w", ()).unwrap()
}

pub fn ring(vars: &[&str]) -> Ring<Q> {
    PolyRing::new(vars.iter().map(|v| v.to_string()).collect(), ()).unwrap()
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn poly(r: &Ring<Q>, terms: &[(Vec<u32>, i64)]) -> Poly<Q> {
    Poly::from_terms(r, terms.iter().map(|(e, c)| (Monomial::from_exps(e), q(*c))))
}

/// Random polynomials in `nvars` variables: up to `max_terms` terms of degree
/// at most `max_deg` with small integer coefficients.
pub fn arb_terms(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, nvars), -3i64..=3),
        1..=max_terms,
    )
    .prop_map(move |ts| {
        ts.into_iter()
            .map(|(mut e, c)| {
                // keep the total degree bounded
                while e.iter().sum::<u32>() > max_deg {
                    let k = e.iter().position(|&x| x > 0).unwrap();
                    e[k] -= 1;
                }
                (e, c)
            })
            .collect()
    })
}

pub fn all_monomials(nvars: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; nvars]];
    let mut layer = out.clone();
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for m in &layer {
            for v in 0..nvars {
                let mut e = m.clone();
                e[v] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

type Vector = BTreeMap<(bool, Vec<u32>), Q>;
type Priority = Box<dyn Fn(&[u32]) -> bool>;

/// Row-echelon span of polynomial coefficient vectors. Columns are ordered by
/// a priority flag first, so that the rows whose pivot has a false flag span
/// the intersection with the low-priority coordinates.
pub struct Span {
    rows: Vec<Vector>,
    priority: Priority,
}

impl Span {
    pub fn new(priority: impl Fn(&[u32]) -> bool + 'static) -> Self {
        Span {
            rows: Vec::new(),
            priority: Box::new(priority),
        }
    }

    fn vector(&self, p: &Poly<Q>) -> Vector {
        p.terms()
            .iter()
            .map(|(m, c)| (((self.priority)(m.exps()), m.exps().to_vec()), c.clone()))
            .collect()
    }

    fn reduce(&self, mut v: Vector) -> Vector {
        loop {
            let Some((key, c)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
                return v;
            };
            let Some(row) = self.rows.iter().find(|r| r.keys().next_back() == Some(&key)) else {
                return v;
            };
            for (k, rc) in row {
                let e = v.entry(k.clone()).or_insert_with(<Q as Zero>::zero);
                *e -= &c * rc;
                if Zero::is_zero(e) {
                    v.remove(k);
                }
            }
        }
    }

    pub fn insert(&mut self, p: &Poly<Q>) {
        let v = self.reduce(self.vector(p));
        if let Some(lead) = v.values().next_back().cloned() {
            let v = v.into_iter().map(|(k, c)| (k, c / &lead)).collect();
            self.rows.push(v);
        }
    }

    pub fn contains(&self, p: &Poly<Q>) -> bool {
        self.reduce(self.vector(p)).is_empty()
    }

    /// Rows whose leading column has a false priority flag.
    pub fn low_rows(&self, r: &Ring<Q>) -> Vec<Poly<Q>> {
        self.rows
            .iter()
            .filter(|row| !row.keys().next_back().unwrap().0)
            .map(|row| Poly::from_terms(r, row.iter().map(|((_, e), c)| (Monomial::from_exps(e), c.clone()))))
            .collect()
    }
}

/// The span of all `m * g` with `deg(m * g) <= bound`.
pub fn multiples_span(gens: &[Poly<Q>], bound: u32, priority: impl Fn(&[u32]) -> bool + 'static) -> Span {
    let mut span = Span::new(priority);
    for g in gens {
        let Some(d) = g.total_degree() else { continue };
        if d > bound as u64 {
            continue;
        }
        let r = g.ring();
        for e in all_monomials(r.nvars(), bound - d as u32) {
            span.insert(&g.mul_monomial(&Monomial::from_exps(&e), &<Q as One>::one()));
        }
    }
    span
}

/// Membership by linear algebra on multiples of degree at most `bound`.
/// Sound; complete once `bound` exceeds the degree of some representation.
pub fn naive_member(gens: &[Poly<Q>], p: &Poly<Q>, bound: u32) -> bool {
    p.is_zero() || multiples_span(gens, bound, |_| false).contains(p)
}

/// `p^m ∈ I` for some `m <= max_m`, by Gröbner membership of powers.
pub fn brute_radical(i: &Ideal<Q>, p: &Poly<Q>, max_m: u32) -> bool {
    (1..=max_m).any(|m| i.contains(&p.pow(m)).unwrap())
}

/// Integrality of `c / w^m` over `a`, from the kernel of
/// `a[z] -> a[u]/(w u - 1)`, `z -> c u^m`: integral iff the kernel holds a
/// polynomial monic in `z`.
pub fn oracle_integral(a: &FpAlgebra<Q>, c: &Poly<Q>, m: u32) -> bool {
    let n = a.nvars();
    let src_ring = a.ring().extended(&["z"]);
    let rels: Vec<Poly<Q>> = a.relations().gens().iter().map(|r| r.extend_to(&src_ring)).collect();
    let src = FpAlgebra::new(&src_ring, rels, a.idef().iter().map(|g| g.extend_to(&src_ring)).collect()).unwrap();
    let tgt_ring = a.ring().extended(&["u"]);
    let u = tgt_ring.var(n);
    let mut trels: Vec<Poly<Q>> = a.relations().gens().iter().map(|r| r.extend_to(&tgt_ring)).collect();
    trels.push(&(&tgt_ring.var(0) * &u) - &tgt_ring.one());
    let tgt = FpAlgebra::new(&tgt_ring, trels, vec![]).unwrap();
    let mut images: Vec<Poly<Q>> = (0..n).map(|i| tgt_ring.var(i)).collect();
    images.push(&c.extend_to(&tgt_ring) * &u.pow(m));
    let phi = ring_map(&src, &tgt, images).unwrap();
    let ker = map_kernel(&phi).unwrap();
    let order = MonomialOrder::eliminating(n + 1, &[n]);
    ker.gb(&order).unwrap().iter().any(|g| {
        let lead = &g.leading_term(&order).unwrap().0;
        lead.exps()[n] > 0 && lead.exps()[..n].iter().all(|&e| e == 0)
    })
}

/// `A[c_1/w^m_1, ..]` presented inside `A[1/w]`, with variable definitions.
pub fn adjoin_fractions(a: &FpAlgebra<Q>, fracs: &[(Poly<Q>, u32)]) -> FpAlgebra<Q> {
    let n = a.nvars();
    let names = vec!["z"; fracs.len()];
    let r = a.ring().extended(&names);
    let w = r.var(0);
    let mut rels: Vec<Poly<Q>> = a.relations().gens().iter().map(|g| g.extend_to(&r)).collect();
    let mut defs = vec![None; n];
    for (k, (c, m)) in fracs.iter().enumerate() {
        let ce = c.extend_to(&r);
        rels.push(&(&w.pow(*m) * &r.var(n + k)) - &ce);
        defs.push(Some(Fraction::new(ce, w.pow(*m))));
    }
    let sat = Ideal::new(&r, rels).unwrap().saturation(&w).unwrap();
    let idef = a.idef().iter().map(|g| g.extend_to(&r)).collect();
    FpAlgebra::new(&r, sat.gens().to_vec(), idef)
        .unwrap()
        .with_var_defs(defs)
        .unwrap()
}

/// Numerators for the brute-force closure: monomials in the non-uniformizer
/// variables of degree at most `deg`, then sums and differences of two.
pub fn oracle_numerators(a: &FpAlgebra<Q>, deg: u32) -> Vec<Poly<Q>> {
    let n = a.nvars();
    let monos: Vec<Poly<Q>> = all_monomials(n - 1, deg)
        .into_iter()
        .map(|e| {
            let mut full = vec![0];
            full.extend(e);
            Poly::from_terms(a.ring(), [(Monomial::from_exps(&full), <Q as One>::one())])
        })
        .collect();
    let mut out = monos.clone();
    for (i, m1) in monos.iter().enumerate() {
        for m2 in &monos[i + 1..] {
            out.push(m1 + m2);
            out.push(m1 - m2);
        }
    }
    out
}

/// The subring of `A[1/w]` generated over `A` by every integral `c / w^m`
/// with `c` an oracle numerator and `m <= max_m`, tested one by one.
pub fn brute_closure(a: &FpAlgebra<Q>, deg: u32, max_m: u32) -> FpAlgebra<Q> {
    let mut fracs: Vec<(Poly<Q>, u32)> = Vec::new();
    let mut cur = a.clone();
    for m in 1..=max_m {
        for c in oracle_numerators(a, deg) {
            if !oracle_integral(a, &c, m) {
                continue;
            }
            let lifted = c.extend_to(cur.ring());
            let wm = cur.w().pow(m);
            if formod::fpalg::divide(&cur, &lifted, &wm).unwrap().is_some() {
                continue;
            }
            fracs.push((c, m));
            cur = adjoin_fractions(a, &fracs);
        }
    }
    cur
}

/// Two subrings of `A[1/w]` with defined variables are equal: the forced maps
/// exist both ways and are mutually inverse.
pub fn same_subring(x: &FpAlgebra<Q>, y: &FpAlgebra<Q>, nbase: usize) -> bool {
    let bx: Vec<Poly<Q>> = x.base_vars().into_iter().take(nbase).map(|i| y.var(i)).collect();
    let by: Vec<Poly<Q>> = y.base_vars().into_iter().take(nbase).map(|i| x.var(i)).collect();
    let (Ok(f), Ok(g)) = (forced_map(x, y, &bx), forced_map(y, x, &by)) else {
        return false;
    };
    RingIso::new(f, g).is_ok()
}

/// The session files under `tests/corpus`, sorted.
pub fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fm"))
        .collect();
    files.sort();
    files
}

/// Command-line flags from a leading `# flags:` comment.
pub fn flags(text: &str) -> Vec<String> {
    text.lines()
        .next()
        .and_then(|l| l.strip_prefix("# flags:"))
        .map(|f| f.split_whitespace().map(str::to_string).collect())
        .unwrap_or_default()
}

pub fn options(flags: &[String], json: bool) -> Options {
    let mut o = Options {
        json,
        ..Options::default()
    };
    for pair in flags.chunks(2) {
        let v = &pair[1];
        match pair[0].as_str() {
            "--field" => o.field = CoeffField::parse(v).unwrap(),
            "--order" => o.order = parse_order(v).unwrap(),
            "--degree-bound" => o.degree_bound = v.parse().unwrap(),
            "--uniformizer" => o.uniformizer = v.clone(),
            other => panic!("unsupported flag {other}"),
        }
    }
    o
}
