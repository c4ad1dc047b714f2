//! Finitely presented algebras `k[w, x1..xn]/I` over `k[w]` with an ideal of
//! definition containing `w`, ring maps between them, kernels, localizations
//! and integrality tests.
//!
//! Every algebra built by the library remembers, for each variable it adjoined,
//! the fraction that variable stands for (`t = f/g`, `u = 1/g`, `z = c/w`).
//! Maps out of such an algebra are then determined by the images of the
//! remaining *base* variables: see [`forced_map`].

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::parse_poly;
use crate::field::Field;
use crate::ideal::{elimination_basis, Ideal};
use crate::poly::{check_ring, groebner, MonomialOrder, Poly, PolyRing, Ring};

/// A formal quotient `num / den` of two polynomials of one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction<F: Field> {
    pub num: Poly<F>,
    pub den: Poly<F>,
}

impl<F: Field> Fraction<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        Fraction { num, den }
    }

    fn embedded(&self, ring: &Ring<F>) -> Self {
        Fraction {
            num: self.num.extend_to(ring),
            den: self.den.extend_to(ring),
        }
    }
}

impl<F: Field> fmt::Display for Fraction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let num = self.num.to_string();
            let den = self.den.to_string();
            let num = if num.contains(' ') { format!("({num})") } else { num };
            let bare = den.chars().all(|c| c.is_alphanumeric() || c == '^' || c == '_');
            let den = if bare { den } else { format!("({den})") };
            write!(f, "{num}/{den}")
        }
    }
}

struct AlgebraData<F: Field> {
    ring: Ring<F>,
    relations: Ideal<F>,
    idef: Vec<Poly<F>>,
    var_defs: Vec<Option<Fraction<F>>>,
    torsion_free: OnceLock<bool>,
}

/// `k[w, x1..xn]/I` with `w` the first variable and an ideal of definition
/// that contains `w`. Cheap to clone.
#[derive(Clone)]
pub struct FpAlgebra<F: Field>(Arc<AlgebraData<F>>);

impl<F: Field> fmt::Debug for FpAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpAlgebra({self})")
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl<F: Field> fmt::Display for FpAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vars[{}] rels[{}] idef[{}]",
            self.0.ring.vars().join(","),
            join(self.0.relations.gens()),
            join(&self.0.idef)
        )
    }
}

impl<F: Field> FpAlgebra<F> {
    /// The algebra `ring / (relations)`. Variable 0 is the uniformizer; it is
    /// added to the ideal of definition when not already contained in it.
    pub fn new(ring: &Ring<F>, relations: Vec<Poly<F>>, idef: Vec<Poly<F>>) -> Result<Self> {
        if ring.nvars() == 0 {
            return Err(Error::MissingUniformizer("w".into()));
        }
        for p in &idef {
            check_ring(p.ring(), ring)?;
        }
        let relations = Ideal::new(ring, relations)?;
        let mut idef: Vec<Poly<F>> = idef.into_iter().filter(|p| !p.is_zero()).collect();
        let w = ring.var(0);
        if !relations.with_gens(&idef)?.contains(&w)? {
            idef.insert(0, w);
        }
        Ok(Self::from_parts(ring, relations, idef, vec![None; ring.nvars()]))
    }

    pub(crate) fn from_parts(
        ring: &Ring<F>,
        relations: Ideal<F>,
        idef: Vec<Poly<F>>,
        var_defs: Vec<Option<Fraction<F>>>,
    ) -> Self {
        debug_assert_eq!(var_defs.len(), ring.nvars());
        FpAlgebra(Arc::new(AlgebraData {
            ring: ring.clone(),
            relations,
            idef,
            var_defs,
            torsion_free: OnceLock::new(),
        }))
    }

    fn known_torsion_free(self) -> Self {
        let _ = self.0.torsion_free.set(true);
        self
    }

    /// A copy whose variables carry the given defining fractions.
    pub fn with_var_defs(&self, var_defs: Vec<Option<Fraction<F>>>) -> Result<Self> {
        if var_defs.len() != self.nvars() {
            return Err(Error::InvalidArgument("one definition slot per variable".into()));
        }
        for d in var_defs.iter().flatten() {
            check_ring(d.num.ring(), &self.0.ring)?;
            check_ring(d.den.ring(), &self.0.ring)?;
        }
        let out = Self::from_parts(&self.0.ring, self.0.relations.clone(), self.0.idef.clone(), var_defs);
        if let Some(&t) = self.0.torsion_free.get() {
            let _ = out.0.torsion_free.set(t);
        }
        Ok(out)
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.0.ring
    }

    pub fn nvars(&self) -> usize {
        self.0.ring.nvars()
    }

    pub fn relations(&self) -> &Ideal<F> {
        &self.0.relations
    }

    pub fn idef(&self) -> &[Poly<F>] {
        &self.0.idef
    }

    pub fn var_defs(&self) -> &[Option<Fraction<F>>] {
        &self.0.var_defs
    }

    /// Indices of the variables without a defining fraction.
    pub fn base_vars(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.0.var_defs[i].is_none()).collect()
    }

    pub fn uniformizer_name(&self) -> &str {
        &self.0.ring.vars()[0]
    }

    pub fn w(&self) -> Poly<F> {
        self.0.ring.var(0)
    }

    pub fn var(&self, i: usize) -> Poly<F> {
        self.0.ring.var(i)
    }

    pub fn parse(&self, s: &str) -> Result<Poly<F>> {
        parse_poly(&self.0.ring, s)
    }

    /// Canonical representative modulo the relations.
    pub fn reduce(&self, p: &Poly<F>) -> Result<Poly<F>> {
        self.0.relations.reduce(p)
    }

    /// `p = 0` in the algebra.
    pub fn is_zero_element(&self, p: &Poly<F>) -> Result<bool> {
        self.0.relations.contains(p)
    }

    pub fn is_zero_ring(&self) -> Result<bool> {
        self.0.relations.is_unit()
    }

    /// The ideal of the polynomial ring generated by `gens` and the relations.
    pub fn ideal(&self, gens: &[Poly<F>]) -> Result<Ideal<F>> {
        self.0.relations.with_gens(gens)
    }

    pub fn idef_ideal(&self) -> Result<Ideal<F>> {
        self.ideal(&self.0.idef)
    }

    /// `sat(I, w) = I`.
    pub fn is_torsion_free(&self) -> Result<bool> {
        if let Some(&t) = self.0.torsion_free.get() {
            return Ok(t);
        }
        let sat = self.0.relations.saturation(&self.w())?;
        let t = sat.equals(&self.0.relations)?;
        let _ = self.0.torsion_free.set(t);
        Ok(t)
    }

    pub(crate) fn require_torsion_free(&self) -> Result<()> {
        if self.is_torsion_free()? {
            Ok(())
        } else {
            Err(Error::TorsionInput)
        }
    }

    /// Same ring and equal relation ideals.
    pub fn same_presentation(&self, other: &FpAlgebra<F>) -> Result<bool> {
        if self.0.ring != other.0.ring {
            return Ok(false);
        }
        self.0.relations.equals(&other.0.relations)
    }

    /// The algebra with `extra` fresh variables (no new relations).
    pub(crate) fn extend_vars(&self, names: &[&str]) -> Extension<F> {
        let ext = self.0.ring.extended(names);
        let rels = self.0.relations.gens().iter().map(|p| p.extend_to(&ext)).collect();
        let idef = self.0.idef.iter().map(|p| p.extend_to(&ext)).collect();
        let mut defs: Vec<Option<Fraction<F>>> = self
            .0
            .var_defs
            .iter()
            .map(|d| d.as_ref().map(|d| d.embedded(&ext)))
            .collect();
        defs.resize(ext.nvars(), None);
        (ext, rels, idef, defs)
    }
}

/// Builds an algebra from text. The uniformizer is moved to the front of the
/// variable list.
pub fn make_algebra<F: Field>(
    vars: &[&str],
    relations: &[&str],
    idef: &[&str],
    uniformizer: &str,
    desc: F::Desc,
) -> Result<FpAlgebra<F>> {
    let pos = vars
        .iter()
        .position(|v| *v == uniformizer)
        .ok_or_else(|| Error::MissingUniformizer(uniformizer.to_string()))?;
    let mut names = vec![uniformizer.to_string()];
    names.extend(vars.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, v)| v.to_string()));
    let ring = PolyRing::new(names, desc)?;
    let rels = relations.iter().map(|s| parse_poly(&ring, s)).collect::<Result<Vec<_>>>()?;
    let idef = idef.iter().map(|s| parse_poly(&ring, s)).collect::<Result<Vec<_>>>()?;
    FpAlgebra::new(&ring, rels, idef)
}

/// The quotient by the `w`-power torsion, with the quotient map.
pub fn torsion_saturate<F: Field>(a: &FpAlgebra<F>) -> Result<(FpAlgebra<F>, RingMap<F>)> {
    let sat = a.relations().saturation(&a.w())?;
    let out = FpAlgebra::from_parts(a.ring(), sat, a.idef().to_vec(), a.var_defs().to_vec())
        .known_torsion_free();
    let images = (0..a.nvars()).map(|i| out.var(i)).collect();
    let map = ring_map(a, &out, images)?;
    Ok((out, map))
}

/// `J` is open: every generator of the ideal of definition lies in `√(J + I)`.
pub fn is_open_ideal<F: Field>(a: &FpAlgebra<F>, j: &[Poly<F>]) -> Result<bool> {
    let jj = a.ideal(j)?;
    for g in a.idef() {
        if !jj.radical_contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A `k[w]`-algebra map between finitely presented algebras, given by the
/// images of the source variables (reduced in the target).
#[derive(Clone)]
pub struct RingMap<F: Field> {
    source: FpAlgebra<F>,
    target: FpAlgebra<F>,
    images: Vec<Poly<F>>,
}

impl<F: Field> fmt::Debug for RingMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingMap[{self}]")
    }
}

impl<F: Field> fmt::Display for RingMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .source
            .ring()
            .vars()
            .iter()
            .zip(&self.images)
            .map(|(v, im)| format!("{v} -> {im}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Validates and builds the map `source -> target` sending variable `i` to
/// `images[i]`. The uniformizer must go to the uniformizer.
pub fn ring_map<F: Field>(
    source: &FpAlgebra<F>,
    target: &FpAlgebra<F>,
    images: Vec<Poly<F>>,
) -> Result<RingMap<F>> {
    if images.len() != source.nvars() {
        return Err(Error::VariableMismatch(format!(
            "{} images for {} variables",
            images.len(),
            source.nvars()
        )));
    }
    let images = images
        .iter()
        .map(|p| {
            check_ring(p.ring(), target.ring())?;
            target.reduce(p)
        })
        .collect::<Result<Vec<_>>>()?;
    if !target.is_zero_element(&(&images[0] - &target.w()))? {
        return Err(Error::InvalidArgument(format!(
            "the uniformizer must map to `{}`",
            target.uniformizer_name()
        )));
    }
    for r in source.relations().gens() {
        let img = r.substitute(target.ring(), &images)?;
        if !target.is_zero_element(&img)? {
            return Err(Error::IllDefined(r.to_string()));
        }
    }
    Ok(RingMap {
        source: source.clone(),
        target: target.clone(),
        images,
    })
}

impl<F: Field> RingMap<F> {
    pub fn identity(a: &FpAlgebra<F>) -> Self {
        RingMap {
            source: a.clone(),
            target: a.clone(),
            images: (0..a.nvars())
                .map(|i| a.reduce(&a.var(i)).expect("same ring"))
                .collect(),
        }
    }

    pub fn source(&self) -> &FpAlgebra<F> {
        &self.source
    }

    pub fn target(&self) -> &FpAlgebra<F> {
        &self.target
    }

    pub fn images(&self) -> &[Poly<F>] {
        &self.images
    }

    /// Substitution followed by normal form in the target.
    pub fn apply(&self, p: &Poly<F>) -> Result<Poly<F>> {
        check_ring(p.ring(), self.source.ring())?;
        self.target.reduce(&p.substitute(self.target.ring(), &self.images)?)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RingMap<F>) -> Result<RingMap<F>> {
        check_ring(self.target.ring(), next.source.ring())?;
        let images = self.images.iter().map(|p| next.apply(p)).collect::<Result<Vec<_>>>()?;
        Ok(RingMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images,
        })
    }

    /// Both maps send every source variable to the same element.
    pub fn agrees_with(&self, other: &RingMap<F>) -> Result<bool> {
        check_ring(self.source.ring(), other.source.ring())?;
        check_ring(self.target.ring(), other.target.ring())?;
        for (a, b) in self.images.iter().zip(&other.images) {
            if !self.target.is_zero_element(&(a - b))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_injective(&self) -> Result<bool> {
        map_kernel(self)?.equals(self.source.relations())
    }
}

/// The kernel, as an ideal of the source polynomial ring (it contains the
/// source relations). Computed from the graph ideal by eliminating the
/// target variables.
pub fn map_kernel<F: Field>(phi: &RingMap<F>) -> Result<Ideal<F>> {
    let (src, tgt) = (phi.source(), phi.target());
    let nt = tgt.nvars();
    let names: Vec<&str> = src.ring().vars().iter().map(String::as_str).collect();
    let ext = tgt.ring().extended(&names);
    let mut gens: Vec<Poly<F>> = tgt.relations().gens().iter().map(|p| p.extend_to(&ext)).collect();
    for (i, im) in phi.images().iter().enumerate() {
        gens.push(&ext.var(nt + i) - &im.extend_to(&ext));
    }
    let elim: Vec<usize> = (0..nt).collect();
    let basis = elimination_basis(ext.nvars(), &gens, &elim, &[])?;
    let mut map = vec![0; ext.nvars()];
    for i in 0..src.nvars() {
        map[nt + i] = i;
    }
    let basis = basis.iter().map(|p| p.embed(src.ring(), &map)).collect();
    Ok(Ideal::from_grevlex_basis(src.ring(), basis))
}

/// `A[u]/(g u - 1)` with its structure map; `u` is recorded as `1/g`.
pub fn localize<F: Field>(a: &FpAlgebra<F>, g: &Poly<F>) -> Result<(FpAlgebra<F>, RingMap<F>)> {
    check_ring(g.ring(), a.ring())?;
    let (ext, mut rels, idef, mut defs) = a.extend_vars(&["u"]);
    let n = a.nvars();
    let u = ext.var(n);
    let ge = g.extend_to(&ext);
    rels.push(&(&ge * &u) - &ext.one());
    defs[n] = Some(Fraction::new(ext.one(), ge));
    let out = FpAlgebra::from_parts(&ext, Ideal::new(&ext, rels)?, idef, defs);
    if let Some(true) = a.0.torsion_free.get() {
        let _ = out.0.torsion_free.set(true);
    }
    let images = (0..n).map(|i| ext.var(i)).collect();
    let map = ring_map(a, &out, images)?;
    Ok((out, map))
}

/// The relation of lowest degree monic in `z` satisfied by `z = c / w^m`,
/// as a polynomial in the ring of `a` with `z` appended; `None` when `c/w^m`
/// is not integral.
pub fn integral_relation<F: Field>(a: &FpAlgebra<F>, c: &Poly<F>, m: u32) -> Result<Option<Poly<F>>> {
    check_ring(c.ring(), a.ring())?;
    a.require_torsion_free()?;
    let n = a.nvars();
    let ext = a.ring().extended(&["z", "y"]);
    let (z, y) = (ext.var(n), ext.var(n + 1));
    let w = ext.var(0);
    let mut gens: Vec<Poly<F>> = a.relations().gens().iter().map(|p| p.extend_to(&ext)).collect();
    gens.push(&(&w.pow(m) * &z) - &c.extend_to(&ext));
    gens.push(&ext.one() - &(&y * &w));
    let order = MonomialOrder::eliminating(n + 2, &[n + 1, n]);
    let gb = groebner(&gens, &order)?;
    let zring = a.ring().extended(&["z"]);
    let best = gb
        .iter()
        .filter(|g| !g.uses_var(n + 1))
        .filter_map(|g| {
            let (lm, _) = g.leading_term(&order)?;
            let pure = lm.exps().iter().enumerate().all(|(i, &e)| i == n || e == 0);
            pure.then(|| (lm.exps()[n], g))
        })
        .min_by_key(|(d, _)| *d);
    Ok(best.map(|(_, g)| {
        g.restrict_to(&zring)
            .expect("y eliminated")
            .monic(&order_without_y(n))
    }))
}

fn order_without_y(n: usize) -> MonomialOrder {
    MonomialOrder::eliminating(n + 1, &[n])
}

/// `c / w^m` is integral over `a` (inside `a[1/w]`).
pub fn is_integral_element<F: Field>(a: &FpAlgebra<F>, c: &Poly<F>, m: u32) -> Result<bool> {
    Ok(integral_relation(a, c, m)?.is_some())
}

/// The element `q` with `d q = a` in `c`, if there is one. Unique when `d` is
/// a nonzerodivisor. Found as the `z`-linear element of the reduced basis of
/// `sat(I + (d z - a), d)` under an order eliminating `z`.
pub fn divide<F: Field>(c: &FpAlgebra<F>, a: &Poly<F>, d: &Poly<F>) -> Result<Option<Poly<F>>> {
    check_ring(a.ring(), c.ring())?;
    check_ring(d.ring(), c.ring())?;
    if c.is_zero_ring()? {
        return Ok(Some(c.ring().zero()));
    }
    let a = c.reduce(a)?;
    let d = c.reduce(d)?;
    if d.is_zero() {
        return Ok(None);
    }
    if a.is_zero() {
        return Ok(Some(a));
    }
    if d.is_constant() {
        let inv = d.constant_term().inv().expect("nonzero constant");
        return Ok(Some(a.scale(&inv)));
    }
    if let Some(q) = a.div_exact(&d) {
        return Ok(Some(c.reduce(&q)?));
    }
    let n = c.nvars();
    let ext = c.ring().extended(&["z", "y"]);
    let (z, y) = (ext.var(n), ext.var(n + 1));
    let de = d.extend_to(&ext);
    let mut gens: Vec<Poly<F>> = c.relations().gens().iter().map(|p| p.extend_to(&ext)).collect();
    gens.push(&(&de * &z) - &a.extend_to(&ext));
    gens.push(&ext.one() - &(&y * &de));
    let order = MonomialOrder::eliminating(n + 2, &[n + 1, n]);
    let gb = groebner(&gens, &order)?;
    let zm = z.terms()[0].0.clone();
    let Some(g) = gb
        .iter()
        .find(|g| g.leading_term(&order).map(|t| &t.0) == Some(&zm))
    else {
        return Ok(None);
    };
    let q = (&z - g).restrict_to(c.ring()).expect("tail free of y and z");
    let q = c.reduce(&q)?;
    if c.is_zero_element(&(&(&d * &q) - &a))? {
        Ok(Some(q))
    } else {
        Ok(None)
    }
}

/// The map `source -> target` determined by images of the base variables
/// of `source` (in index order); every defined variable `t = f/g` goes to
/// the quotient of the images of `f` and `g` in `target`.
pub fn forced_map<F: Field>(
    source: &FpAlgebra<F>,
    target: &FpAlgebra<F>,
    base_images: &[Poly<F>],
) -> Result<RingMap<F>> {
    let base = source.base_vars();
    if base.len() != base_images.len() {
        return Err(Error::VariableMismatch(format!(
            "{} base images for {} base variables",
            base_images.len(),
            base.len()
        )));
    }
    let n = source.nvars();
    let mut images: Vec<Poly<F>> = vec![target.ring().zero(); n];
    for (&i, im) in base.iter().zip(base_images) {
        check_ring(im.ring(), target.ring())?;
        images[i] = im.clone();
    }
    for i in 0..n {
        if let Some(def) = &source.var_defs()[i] {
            let num = def.num.substitute(target.ring(), &images)?;
            let den = def.den.substitute(target.ring(), &images)?;
            images[i] = divide(target, &num, &den)?
                .ok_or_else(|| Error::NoForcedImage(source.ring().vars()[i].clone()))?;
        }
    }
    ring_map(source, target, images)
}

/// Base images matching base variables to the same-index variables of
/// `target`, which must carry the same names.
pub fn shared_base_images<F: Field>(source: &FpAlgebra<F>, target: &FpAlgebra<F>) -> Result<Vec<Poly<F>>> {
    source
        .base_vars()
        .into_iter()
        .map(|i| {
            let name = &source.ring().vars()[i];
            if target.ring().vars().get(i) != Some(name) {
                return Err(Error::VariableMismatch(format!("no base variable `{name}` in the target")));
            }
            Ok(target.var(i))
        })
        .collect()
}

/// A pair of mutually inverse ring maps.
#[derive(Clone, Debug)]
pub struct RingIso<F: Field> {
    pub forward: RingMap<F>,
    pub backward: RingMap<F>,
}

impl<F: Field> RingIso<F> {
    /// Checks that both composites fix every variable.
    pub fn new(forward: RingMap<F>, backward: RingMap<F>) -> Result<Self> {
        let there_back = forward.then(&backward)?;
        let back_there = backward.then(&forward)?;
        if !there_back.agrees_with(&RingMap::identity(forward.source()))?
            || !back_there.agrees_with(&RingMap::identity(forward.target()))?
        {
            return Err(Error::InvalidArgument("the maps are not mutually inverse".into()));
        }
        Ok(RingIso { forward, backward })
    }

    pub fn identity(a: &FpAlgebra<F>) -> Self {
        RingIso {
            forward: RingMap::identity(a),
            backward: RingMap::identity(a),
        }
    }
}

/// Ring, relations, ideal of definition and variable definitions of an
/// algebra with fresh variables appended.
pub(crate) type Extension<F> = (Ring<F>, Vec<Poly<F>>, Vec<Poly<F>>, Vec<Option<Fraction<F>>>);

/// Isomorphism between two algebras sharing their base variables, found from
/// the forced images in both directions.
pub fn forced_iso<F: Field>(a: &FpAlgebra<F>, b: &FpAlgebra<F>) -> Result<RingIso<F>> {
    let forward = forced_map(a, b, &shared_base_images(a, b)?)?;
    let backward = forced_map(b, a, &shared_base_images(b, a)?)?;
    RingIso::new(forward, backward)
}
