//! Integral closure of `A` in `A[1/w]` by a degree-bounded search for
//! integral fractions `c/w`, normalized blow-ups, and the uniformity test.

use crate::blowup::{blowup_charts, AdmissibleIdeal, Chart, ChartAtlas, Provenance};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fpalg::{integral_relation, ring_map, Fraction, FpAlgebra, RingMap};
use crate::ideal::Ideal;
use crate::poly::{Monomial, MonomialOrder, Poly};

/// Default total-degree bound for witness candidates.
pub const DEFAULT_DEGREE_BOUND: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Monomial candidates have total degree at most this.
    pub degree_bound: u32,
    /// Binomials `m1 ± m2` are tried, after all monomials fail, up to this degree.
    pub binomial_bound: u32,
    /// Maximal number of adjunctions in [`normalize`].
    pub max_stages: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            degree_bound: DEFAULT_DEGREE_BOUND,
            binomial_bound: 2,
            max_stages: 8,
        }
    }
}

impl SearchOptions {
    pub fn with_degree_bound(d: u32) -> Self {
        SearchOptions {
            degree_bound: d,
            ..Self::default()
        }
    }
}

/// Standard monomials free of `w`, by increasing degree.
fn candidate_monomials<F: Field>(a: &FpAlgebra<F>, bound: u32) -> Result<Vec<Poly<F>>> {
    let basis = a.relations().basis()?;
    let order = MonomialOrder::grevlex();
    let leads: Vec<Monomial> = basis
        .iter()
        .filter_map(|g| g.leading_term(&order).map(|t| t.0.clone()))
        .collect();
    let n = a.nvars();
    let mut out = Vec::new();
    let mut layer = vec![Monomial::one(n)];
    for d in 0..=bound {
        let mut sorted = layer.clone();
        sorted.sort_by(|x, y| order.compare(x, y));
        for m in &sorted {
            if !leads.iter().any(|l| l.divides(m)) {
                out.push(Poly::from_terms(a.ring(), [(m.clone(), F::one(a.ring().desc()))]));
            }
        }
        if d == bound {
            break;
        }
        let mut next: Vec<Monomial> = Vec::new();
        for m in &layer {
            for v in 1..n {
                let q = m.mul(&Monomial::var(n, v, 1));
                if !next.contains(&q) {
                    next.push(q);
                }
            }
        }
        layer = next;
    }
    Ok(out)
}

/// First candidate `c` with `c/w` integral and `c ∉ wA`.
fn find_witness<F: Field>(a: &FpAlgebra<F>, opts: &SearchOptions) -> Result<Option<Poly<F>>> {
    let wa = a.ideal(&[a.w()])?;
    let try_one = |c: &Poly<F>| -> Result<bool> {
        if c.is_zero() || wa.contains(c)? {
            return Ok(false);
        }
        Ok(integral_relation(a, c, 1)?.is_some())
    };
    let monos = candidate_monomials(a, opts.degree_bound)?;
    for c in &monos {
        if try_one(c)? {
            return Ok(Some(c.clone()));
        }
    }
    let small: Vec<&Poly<F>> = monos
        .iter()
        .filter(|m| m.total_degree().unwrap_or(0) <= opts.binomial_bound as u64)
        .collect();
    for (i, m1) in small.iter().enumerate() {
        for m2 in &small[i + 1..] {
            for c in [*m1 + *m2, *m1 - *m2] {
                if try_one(&c)? {
                    return Ok(Some(c));
                }
            }
        }
    }
    Ok(None)
}

/// `(true, None)` when no candidate up to the bound gives a new integral
/// element, else `(false, Some(c))` with `c/w` integral and not in `A`.
pub fn is_integrally_closed<F: Field>(a: &FpAlgebra<F>, opts: &SearchOptions) -> Result<(bool, Option<Poly<F>>)> {
    a.require_torsion_free()?;
    let c = find_witness(a, opts)?;
    Ok((c.is_none(), c))
}

#[derive(Clone, Debug)]
pub struct NormalizationResult<F: Field> {
    pub closure: FpAlgebra<F>,
    pub inclusion: RingMap<F>,
    /// Each adjoined fraction `c / w^m`, `c` living in the algebra of its stage.
    pub adjoined: Vec<(Poly<F>, u32)>,
    /// The final stage passed the bounded closedness test.
    pub complete: bool,
}

/// Adjoins `z = c/w` with its integrality relation, saturated at `w`.
fn adjoin<F: Field>(a: &FpAlgebra<F>, c: &Poly<F>, rel: &Poly<F>) -> Result<FpAlgebra<F>> {
    let n = a.nvars();
    let (ext, mut rels, idef, mut defs) = a.extend_vars(&["z"]);
    let w = ext.var(0);
    let ce = c.extend_to(&ext);
    rels.push(&(&w * &ext.var(n)) - &ce);
    rels.push(rel.extend_to(&ext));
    defs[n] = Some(Fraction::new(ce, w.clone()));
    let sat = Ideal::new(&ext, rels)?.saturation(&w)?;
    let out = FpAlgebra::from_parts(&ext, sat, idef, defs);
    let _ = out.is_torsion_free();
    Ok(out)
}

pub fn normalize<F: Field>(a: &FpAlgebra<F>, opts: &SearchOptions) -> Result<NormalizationResult<F>> {
    a.require_torsion_free()?;
    let mut cur = a.clone();
    let mut adjoined = Vec::new();
    let complete = loop {
        let Some(c) = find_witness(&cur, opts)? else {
            break true;
        };
        if adjoined.len() >= opts.max_stages {
            break false;
        }
        let rel = integral_relation(&cur, &c, 1)?.expect("witness is integral");
        cur = adjoin(&cur, &c, &rel)?;
        adjoined.push((c, 1));
    };
    let inclusion = ring_map(a, &cur, (0..a.nvars()).map(|i| cur.var(i)).collect())?;
    Ok(NormalizationResult {
        closure: cur,
        inclusion,
        adjoined,
        complete,
    })
}

/// The blow-up in `J` with every chart replaced by its normalization.
pub fn normalized_blowup<F: Field>(
    a: &FpAlgebra<F>,
    j: &AdmissibleIdeal<F>,
    opts: &SearchOptions,
) -> Result<ChartAtlas<F>> {
    a.require_torsion_free()?;
    let plain = blowup_charts(a, j)?;
    let mut charts = Vec::with_capacity(plain.charts.len());
    for (i, chart) in plain.charts.into_iter().enumerate() {
        if chart.empty {
            charts.push(chart);
            continue;
        }
        let res = normalize(&chart.algebra, opts)?;
        if !res.complete {
            return Err(Error::IncompleteNormalization(i));
        }
        let inc = &res.inclusion;
        charts.push(Chart {
            map: chart.map.then(inc)?,
            element: inc.apply(&chart.element)?,
            rees: chart.rees.iter().map(|p| inc.apply(p)).collect::<Result<Vec<_>>>()?,
            algebra: res.closure,
            empty: false,
        });
    }
    Ok(ChartAtlas {
        base: plain.base,
        ideal: plain.ideal,
        charts,
        provenance: Provenance::Normalized,
    })
}

/// For `f = c / w^m`: when `(w f)^j ∈ A` for some `j <= max_power`, whether
/// `w f ∈ A`. Vacuously true when the hypothesis fails.
pub fn check_uniformity_implication<F: Field>(
    a: &FpAlgebra<F>,
    c: &Poly<F>,
    m: u32,
    max_power: u32,
) -> Result<bool> {
    a.require_torsion_free()?;
    if m <= 1 {
        return Ok(true);
    }
    let k = m - 1;
    let w = a.w();
    let in_a = |num: &Poly<F>, e: u32| -> Result<bool> { a.ideal(&[w.pow(e)])?.contains(num) };
    for j in 1..=max_power {
        if in_a(&c.pow(j), j * k)? {
            return in_a(c, k);
        }
    }
    Ok(true)
}
