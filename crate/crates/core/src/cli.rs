//! Execution of sessions: a single-threaded loop over the parsed commands,
//! producing human-readable or JSON output.

use std::collections::BTreeMap;

use serde_json::{json, Value as Json};

use crate::blowup::{
    blowup_charts, chart_transition, check_cocycle, compose_blowups, extend_admissible_ideal,
    finite_modification_to_blowup, AdmissibleIdeal, ChartAtlas, Composition, FiniteModification,
    DEFAULT_EXTENSION_BOUND,
};
use crate::error::{Error, Result};
use crate::expr::{evaluate, Expr, FractionDomain, PolyDomain};
use crate::field::{CoeffField, Field, Fp, Rational};
use crate::fpalg::{
    is_integral_element, is_open_ideal, localize, map_kernel, ring_map, torsion_saturate, FpAlgebra,
    RingIso, RingMap,
};
use crate::generic::{
    descend_morphism, generic_chart, is_generic_fiber_empty, lift_point, point_validate, spc_contains,
    tube_chart, Descent, GenericChart, Point,
};
use crate::ideal::Ideal;
use crate::normal::{
    check_uniformity_implication, is_integrally_closed, normalize, normalized_blowup, NormalizationResult,
    SearchOptions, DEFAULT_DEGREE_BOUND,
};
use crate::poly::{MonomialOrder, Poly, PolyRing};
use crate::ratfun::RatFunDomain;
use crate::session::{parse_session, Arg, Command, Ref, Session, SessionError};

/// Global settings, as given on the command line.
#[derive(Clone, Debug)]
pub struct Options {
    pub field: CoeffField,
    pub order: MonomialOrder,
    pub degree_bound: u32,
    pub json: bool,
    pub uniformizer: String,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            field: CoeffField::Rationals,
            order: MonomialOrder::grevlex(),
            degree_bound: DEFAULT_DEGREE_BOUND,
            json: false,
            uniformizer: "w".into(),
        }
    }
}

/// Parses `grevlex` or `lex`.
pub fn parse_order(s: &str) -> Result<MonomialOrder> {
    match s {
        "grevlex" => Ok(MonomialOrder::grevlex()),
        "lex" => Ok(MonomialOrder::lex()),
        _ => Err(Error::InvalidArgument(format!("unknown monomial order `{s}`"))),
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_SYNTAX: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

/// Parses and runs a session.
pub fn run_text(text: &str, opts: &Options) -> Outcome {
    match parse_session(text) {
        Ok(s) => run_session(&s, opts),
        Err(e) => syntax_outcome(&e, opts),
    }
}

fn syntax_outcome(e: &SessionError, opts: &Options) -> Outcome {
    let output = if opts.json {
        let (kind, line, col) = match e {
            SessionError::Syntax { line, col, .. } => ("SyntaxError", line, col),
            SessionError::UnboundName { line, col, .. } => ("UnboundName", line, col),
        };
        let doc = json!({
            "format": 1,
            "error": {"kind": kind, "line": line, "col": col, "message": e.to_string()},
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
    } else {
        format!("{e}\n")
    };
    Outcome {
        output,
        exit_code: EXIT_SYNTAX,
    }
}

pub fn run_session(session: &Session, opts: &Options) -> Outcome {
    match opts.field {
        CoeffField::Rationals => Runner::<Rational>::new((), opts).run_all(session),
        CoeffField::PrimeField(p) => Runner::<Fp>::new(p, opts).run_all(session),
    }
}

/// Result of one command: text lines and the JSON payload.
struct Out {
    lines: Vec<String>,
    json: Json,
}

impl Out {
    fn new(lines: Vec<String>, json: Json) -> Self {
        Out { lines, json }
    }

    fn check(pass: bool, details: Vec<(String, bool)>) -> Self {
        let mut lines: Vec<String> = details
            .iter()
            .map(|(what, ok)| format!("{what}: {}", pass_fail(*ok)))
            .collect();
        lines.push(pass_fail(pass).to_string());
        let details: Vec<Json> = details
            .into_iter()
            .map(|(what, ok)| json!({"item": what, "pass": ok}))
            .collect();
        Out::new(lines, json!({"pass": pass, "details": details}))
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

enum Value<F: Field> {
    Algebra(FpAlgebra<F>),
    Ideal(FpAlgebra<F>, Vec<Poly<F>>),
    Admissible(AdmissibleIdeal<F>),
    Atlas(ChartAtlas<F>),
    Point(FpAlgebra<F>, Point<F>),
    Map(RingMap<F>),
    Normalization(NormalizationResult<F>),
    GenericChart(GenericChart<F>),
    Composition(Composition<F>),
    Modification(FiniteModification<F>),
}

fn strs<F: Field>(ps: &[Poly<F>]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn render_algebra<F: Field>(a: &FpAlgebra<F>) -> Result<Out> {
    let rels = strs(&a.relations().basis()?);
    let idef = strs(a.idef());
    let vars = a.ring().vars().to_vec();
    let mut lines = vec![format!(
        "vars[{}] rels[{}] idef[{}]",
        vars.join(","),
        rels.join(", "),
        idef.join(", ")
    )];
    let mut defs = BTreeMap::new();
    let mut shown = Vec::new();
    for (name, d) in vars.iter().zip(a.var_defs()) {
        if let Some(d) = d {
            shown.push(format!("{name} = {d}"));
            defs.insert(name.clone(), d.to_string());
        }
    }
    if !shown.is_empty() {
        lines.push(format!("defs {}", shown.join(", ")));
    }
    Ok(Out::new(
        lines,
        json!({"vars": vars, "relations": rels, "idef": idef, "defs": defs}),
    ))
}

fn render_map<F: Field>(m: &RingMap<F>) -> Result<(String, Json)> {
    let mut parts = Vec::new();
    let mut obj = BTreeMap::new();
    for (name, img) in m.source().ring().vars().iter().zip(m.images()).skip(1) {
        let img = m.target().reduce(img)?.to_string();
        parts.push(format!("{name} -> {img}"));
        obj.insert(name.clone(), img);
    }
    Ok((parts.join(", "), json!(obj)))
}

fn render_point<F: Field>(a: &FpAlgebra<F>, p: &Point<F>) -> (String, Json) {
    let mut parts = Vec::new();
    let mut obj = BTreeMap::new();
    for (name, v) in a.ring().vars().iter().zip(&p.values).skip(1) {
        parts.push(format!("{name} -> {v}"));
        obj.insert(name.clone(), v.to_string());
    }
    let text = if parts.is_empty() {
        format!("e={}", p.e)
    } else {
        format!("e={} {}", p.e, parts.join(", "))
    };
    (text, json!({"e": p.e, "values": obj}))
}

fn render_atlas<F: Field>(at: &ChartAtlas<F>) -> Result<Out> {
    let base = render_algebra(&at.base)?;
    let mut lines = vec![
        format!("base {}", base.lines[0]),
        format!("ideal {}", at.ideal),
        format!("provenance {}", at.provenance),
    ];
    let mut charts = Vec::new();
    for (i, c) in at.charts.iter().enumerate() {
        let alg = render_algebra(&c.algebra)?;
        let (map, map_json) = render_map(&c.map)?;
        let element = c.algebra.reduce(&c.element)?.to_string();
        lines.push(format!("chart {i}: f = {}{}", at.ideal.gens()[i], if c.empty { " (empty)" } else { "" }));
        lines.extend(alg.lines.iter().map(|l| format!("  {l}")));
        lines.push(format!("  element {element}"));
        lines.push(format!("  map {map}"));
        charts.push(json!({
            "index": i,
            "generator": at.ideal.gens()[i].to_string(),
            "presentation": alg.json,
            "element": element,
            "map": map_json,
            "empty": c.empty,
        }));
    }
    Ok(Out::new(
        lines,
        json!({
            "base": base.json,
            "ideal": strs(at.ideal.gens()),
            "provenance": at.provenance.to_string(),
            "charts": charts,
        }),
    ))
}

fn render_iso<F: Field>(iso: &RingIso<F>) -> Result<Out> {
    let (f, fj) = render_map(&iso.forward)?;
    let (b, bj) = render_map(&iso.backward)?;
    Ok(Out::new(
        vec![format!("forward {f}"), format!("backward {b}")],
        json!({"forward": fj, "backward": bj}),
    ))
}

fn render_value<F: Field>(v: &Value<F>) -> Result<Out> {
    match v {
        Value::Algebra(a) => render_algebra(a),
        Value::Ideal(a, gens) => {
            let basis = strs(&a.ideal(gens)?.basis()?);
            Ok(Out::new(
                vec![
                    format!("ideal ({})", strs(gens).join(", ")),
                    format!("basis [{}]", basis.join(", ")),
                ],
                json!({"gens": strs(gens), "basis": basis}),
            ))
        }
        Value::Admissible(j) => Ok(Out::new(
            vec![format!("admissible {j}")],
            json!({"gens": strs(j.gens())}),
        )),
        Value::Atlas(at) => render_atlas(at),
        Value::Point(a, p) => {
            let (t, j) = render_point(a, p);
            Ok(Out::new(vec![format!("point {t}")], j))
        }
        Value::Map(m) => {
            let (t, j) = render_map(m)?;
            Ok(Out::new(vec![format!("map {t}")], json!({"images": j})))
        }
        Value::Normalization(n) => {
            let alg = render_algebra(&n.closure)?;
            let adjoined: Vec<String> = n
                .adjoined
                .iter()
                .map(|(c, m)| format!("{}/{}", paren(c), n.closure.w().pow(*m)))
                .collect();
            let mut lines = vec![format!("closure {}", alg.lines[0])];
            lines.extend(alg.lines[1..].iter().cloned());
            lines.push(format!("adjoined [{}]", adjoined.join(", ")));
            lines.push(format!("complete {}", n.complete));
            Ok(Out::new(
                lines,
                json!({"closure": alg.json, "adjoined": adjoined, "complete_flag": n.complete}),
            ))
        }
        Value::GenericChart(g) => {
            let alg = render_algebra(&g.algebra)?;
            let mut lines = vec![format!("n = {}, adjoined generators {:?}", g.n, g.adjoined)];
            lines.extend(alg.lines);
            Ok(Out::new(
                lines,
                json!({"n": g.n, "adjoined": g.adjoined, "presentation": alg.json}),
            ))
        }
        Value::Composition(c) => {
            let at = render_atlas(&c.atlas)?;
            let mut lines = at.lines;
            let mut factors = Vec::new();
            for (k, (i, m)) in c.factors.iter().enumerate() {
                let (t, j) = render_map(m)?;
                lines.push(format!("factor {k} over chart {i}: {t}"));
                factors.push(json!({"chart": k, "over": i, "map": j}));
            }
            Ok(Out::new(lines, json!({"atlas": at.json, "factors": factors})))
        }
        Value::Modification(fm) => {
            let alg = render_algebra(&fm.modification)?;
            let iso = render_iso(&fm.iso)?;
            let mut lines = vec![
                format!("ideal {}", fm.ideal),
                format!("chart {}", fm.chart),
                format!("modification {}", alg.lines[0]),
            ];
            lines.extend(alg.lines[1..].iter().cloned());
            lines.extend(iso.lines);
            Ok(Out::new(
                lines,
                json!({
                    "ideal": strs(fm.ideal.gens()),
                    "chart": fm.chart,
                    "modification": alg.json,
                    "iso": iso.json,
                }),
            ))
        }
    }
}

fn paren<F: Field>(p: &Poly<F>) -> String {
    if p.terms().len() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

struct Runner<F: Field> {
    desc: F::Desc,
    opts: Options,
    env: BTreeMap<String, Value<F>>,
}

impl<F: Field> Runner<F> {
    fn new(desc: F::Desc, opts: &Options) -> Self {
        Runner {
            desc,
            opts: opts.clone(),
            env: BTreeMap::new(),
        }
    }

    fn run_all(&mut self, session: &Session) -> Outcome {
        let mut text = String::new();
        let mut results = Vec::new();
        let mut exit_code = EXIT_OK;
        for (cmd, &line) in session.commands.iter().zip(&session.lines) {
            let rendered = cmd.to_string();
            text.push_str(&format!("> {rendered}\n"));
            let res = self.run(cmd);
            let (status, payload, lines, failed) = match (res, cmd.expect_fail) {
                (Ok(out), false) => ("ok", out.json, out.lines, false),
                (Err(e), true) => (
                    "expected-failure",
                    json!(e.to_string()),
                    vec![format!("expected failure: {e}")],
                    false,
                ),
                (Err(e), false) => ("error", json!(e.to_string()), vec![format!("error: {e}")], true),
                (Ok(_), true) => {
                    let msg = "the command succeeded but was expected to fail";
                    ("error", json!(msg), vec![format!("error: {msg}")], true)
                }
            };
            for l in &lines {
                text.push_str(&format!("  {l}\n"));
            }
            results.push(json!({
                "line": line,
                "command": rendered,
                "status": status,
                "result": payload,
            }));
            if failed {
                exit_code = EXIT_DOMAIN;
                break;
            }
        }
        let output = if self.opts.json {
            let doc = json!({"format": 1, "results": results});
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        } else {
            text
        };
        Outcome { output, exit_code }
    }

    fn value(&self, name: &str) -> Result<&Value<F>> {
        self.env
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("`{name}` is not bound")))
    }

    fn algebra(&self, r: &Ref) -> Result<FpAlgebra<F>> {
        let v = self.value(&r.name)?;
        if let Some(k) = r.chart {
            let Value::Atlas(at) = v else {
                return Err(Error::InvalidArgument(format!("`{}` is not an atlas", r.name)));
            };
            return at
                .charts
                .get(k)
                .map(|c| c.algebra.clone())
                .ok_or_else(|| Error::InvalidArgument(format!("`{}` has {} charts", r.name, at.charts.len())));
        }
        match v {
            Value::Algebra(a) => Ok(a.clone()),
            Value::Normalization(n) => Ok(n.closure.clone()),
            Value::GenericChart(g) => Ok(g.algebra.clone()),
            Value::Modification(m) => Ok(m.modification.clone()),
            _ => Err(Error::InvalidArgument(format!("`{}` is not an algebra", r.name))),
        }
    }

    fn ideal_like(&self, name: &str) -> Result<Ideal<F>> {
        match self.value(name)? {
            Value::Ideal(a, gens) => a.ideal(gens),
            Value::Admissible(j) => j.ideal(),
            _ => Ok(self
                .algebra(&Ref {
                    name: name.into(),
                    chart: None,
                })?
                .relations()
                .clone()),
        }
    }

    fn atlas(&self, name: &str) -> Result<&ChartAtlas<F>> {
        match self.value(name)? {
            Value::Atlas(at) => Ok(at),
            _ => Err(Error::InvalidArgument(format!("`{name}` is not an atlas"))),
        }
    }

    fn point(&self, name: &str) -> Result<(&FpAlgebra<F>, &Point<F>)> {
        match self.value(name)? {
            Value::Point(a, p) => Ok((a, p)),
            _ => Err(Error::InvalidArgument(format!("`{name}` is not a point"))),
        }
    }

    fn center(&self, a: &FpAlgebra<F>, arg: &Arg) -> Result<AdmissibleIdeal<F>> {
        match arg {
            Arg::Ref(r) => match self.value(&r.name)? {
                Value::Admissible(j) => {
                    if j.ambient().ring() != a.ring() {
                        return Err(Error::VariableMismatch(format!(
                            "`{}` lives on a different algebra",
                            r.name
                        )));
                    }
                    Ok(j.clone())
                }
                _ => Err(Error::InvalidArgument(format!("`{}` is not an admissible ideal", r.name))),
            },
            Arg::List(_, items) => AdmissibleIdeal::new(a, polys(a, items)?),
            _ => Err(Error::InvalidArgument("expected an ideal".into())),
        }
    }

    fn degree_bound(&self, cmd: &Command) -> Result<u32> {
        match flag(cmd, "degree-bound") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("invalid degree bound `{v}`"))),
            None => Ok(self.opts.degree_bound),
        }
    }

    fn bind(&mut self, cmd: &Command, v: Value<F>) -> Result<Out> {
        let out = render_value(&v)?;
        if let Some(name) = &cmd.binding {
            self.env.insert(name.clone(), v);
        }
        Ok(out)
    }

    fn run(&mut self, cmd: &Command) -> Result<Out> {
        let args = &cmd.args;
        let r = |k: usize| -> &Ref {
            match &args[k] {
                Arg::Ref(r) => r,
                other => panic!("parser guarantees a reference, got {other:?}"),
            }
        };
        match cmd.keyword.as_str() {
            "ring" => {
                let a = self.ring(args)?;
                self.bind(cmd, Value::Algebra(a))
            }
            "ideal" => {
                let a = self.algebra(r(0))?;
                let gens = polys(&a, list_items(&args[1]))?;
                self.bind(cmd, Value::Ideal(a, gens))
            }
            "admissible" => {
                let a = self.algebra(r(0))?;
                let j = AdmissibleIdeal::new(&a, polys(&a, list_items(&args[1]))?)?;
                self.bind(cmd, Value::Admissible(j))
            }
            "point" => {
                let a = self.algebra(r(0))?;
                let (e, assign) = match &args[1] {
                    Arg::Ramification(e) => (*e, &args[2]),
                    other => (1, other),
                };
                let values = assigned(&a, assign, |ex| evaluate(ex, &RatFunDomain::<F>(self.desc.clone())))?;
                let p = Point::new(&a, e, values)?;
                self.bind(cmd, Value::Point(a, p))
            }
            "map" => {
                let src = self.algebra(r(0))?;
                let tgt = self.algebra(r(1))?;
                let mut images = vec![tgt.w()];
                images.extend(assigned(&src, &args[2], |ex| poly(&tgt, ex))?);
                let m = ring_map(&src, &tgt, images)?;
                self.bind(cmd, Value::Map(m))
            }
            "localize" => {
                let a = self.algebra(r(0))?;
                let g = poly(&a, expr(&args[1]))?;
                let (l, _) = localize(&a, &g)?;
                self.bind(cmd, Value::Algebra(l))
            }
            "sat" => {
                let a = self.algebra(r(0))?;
                let out = match args.get(1) {
                    Some(Arg::Expr(e)) => {
                        let g = poly(&a, e)?;
                        let sat = a.relations().saturation(&g)?;
                        FpAlgebra::from_parts(a.ring(), sat, a.idef().to_vec(), a.var_defs().to_vec())
                    }
                    _ => torsion_saturate(&a)?.0,
                };
                self.bind(cmd, Value::Algebra(out))
            }
            "gb" => {
                let ideal = self.ideal_like(&r(0).name)?;
                let order = match flag(cmd, "order") {
                    Some(o) => parse_order(o)?,
                    None => self.opts.order.clone(),
                };
                let basis = strs(&ideal.gb(&order)?);
                Ok(Out::new(vec![format!("[{}]", basis.join(", "))], json!({"basis": basis})))
            }
            "kernel" => {
                let Value::Map(m) = self.value(&r(0).name)? else {
                    return Err(Error::InvalidArgument("expected a map".into()));
                };
                let basis = strs(&map_kernel(m)?.basis()?);
                Ok(Out::new(vec![format!("[{}]", basis.join(", "))], json!({"kernel": basis})))
            }
            "contains" => {
                let ideal = self.ideal_like(&r(0).name)?;
                let p = poly_in(ideal.ring(), expr(&args[1]))?;
                let yes = ideal.contains(&p)?;
                Ok(Out::new(vec![yes.to_string()], json!({"contains": yes})))
            }
            "blowup" => {
                let a = self.algebra(r(0))?;
                let j = self.center(&a, &args[1])?;
                let at = blowup_charts(&a, &j)?;
                self.bind(cmd, Value::Atlas(at))
            }
            "transition" => {
                let at = self.atlas(&r(0).name)?;
                let iso = chart_transition(at, int(&args[1]), int(&args[2]))?;
                render_iso(&iso)
            }
            "compose" => {
                let a = self.algebra(r(0))?;
                let j1 = self.center(&a, &args[1])?;
                let j2 = self.center(&a, &args[2])?;
                let c = compose_blowups(&a, &j1, &j2)?;
                self.bind(cmd, Value::Composition(c))
            }
            "extend" => {
                let a = self.algebra(r(0))?;
                let g = poly(&a, expr(&args[1]))?;
                let local = list_items(&args[2])
                    .iter()
                    .map(|e| power_fraction(&a, e, &g))
                    .collect::<Result<Vec<_>>>()?;
                let bound = match flag(cmd, "bound") {
                    Some(v) => v
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("invalid bound `{v}`")))?,
                    None => DEFAULT_EXTENSION_BOUND,
                };
                let j = extend_admissible_ideal(&a, &g, &local, bound)?;
                self.bind(cmd, Value::Admissible(j))
            }
            "finmod" => {
                let a = self.algebra(r(0))?;
                let w = a.w();
                let elems = list_items(&args[1])
                    .iter()
                    .map(|e| power_fraction(&a, e, &w))
                    .collect::<Result<Vec<_>>>()?;
                let fm = finite_modification_to_blowup(&a, &elems)?;
                self.bind(cmd, Value::Modification(fm))
            }
            "genchart" => {
                let a = self.algebra(r(0))?;
                let g = generic_chart(&a, int(&args[1]) as u32)?;
                self.bind(cmd, Value::GenericChart(g))
            }
            "tube" => {
                let a = self.algebra(r(0))?;
                let z = polys(&a, list_items(&args[1]))?;
                let t = tube_chart(&a, &z, int(&args[2]) as u32)?;
                self.bind(cmd, Value::Algebra(t))
            }
            "spc" => {
                let (a, p) = self.point(&r(0).name)?;
                let f = poly(a, expr(&args[1]))?;
                let yes = spc_contains(a, p, &f)?;
                let order = p.eval(&f)?.order();
                let shown = order.map_or("infinite".to_string(), |o| o.to_string());
                Ok(Out::new(
                    vec![format!("{yes} (order {shown})")],
                    json!({"contains": yes, "order": order}),
                ))
            }
            "lift" => {
                let at = self.atlas(&r(0).name)?;
                let (pa, p) = self.point(&r(1).name)?;
                if pa.ring() != at.base.ring() {
                    return Err(Error::VariableMismatch("the point does not lie on the atlas base".into()));
                }
                let (i, q) = lift_point(&at.base, &at.ideal, p)?;
                let chart = at.charts[i].algebra.clone();
                let mut out = self.bind(cmd, Value::Point(chart, q))?;
                out.lines.insert(0, format!("chart {i}"));
                out.json = json!({"chart": i, "point": out.json});
                Ok(out)
            }
            "descend" => {
                let a = self.algebra(r(0))?;
                let b = self.algebra(r(1))?;
                let w = b.w();
                let images = assigned(&a, &args[2], |ex| power_fraction(&b, ex, &w))?;
                match descend_morphism(&a, &b, &images)? {
                    Descent::Map(m) => {
                        let (t, j) = render_map(&m)?;
                        Ok(Out::new(vec![format!("map {t}")], json!({"map": j})))
                    }
                    Descent::NeedsBlowup(i) => {
                        let name = a.ring().vars()[i + 1].clone();
                        Ok(Out::new(
                            vec![format!("NeedsBlowup({i}): the image of {name} is not in the model")],
                            json!({"needs_blowup": i, "variable": name}),
                        ))
                    }
                }
            }
            "normalize" => {
                let a = self.algebra(r(0))?;
                let opts = SearchOptions::with_degree_bound(self.degree_bound(cmd)?);
                let n = normalize(&a, &opts)?;
                self.bind(cmd, Value::Normalization(n))
            }
            "normblowup" => {
                let a = self.algebra(r(0))?;
                let j = self.center(&a, &args[1])?;
                let opts = SearchOptions::with_degree_bound(self.degree_bound(cmd)?);
                let at = normalized_blowup(&a, &j, &opts)?;
                self.bind(cmd, Value::Atlas(at))
            }
            "show" => {
                let rr = r(0);
                if rr.chart.is_some() {
                    render_algebra(&self.algebra(rr)?)
                } else {
                    render_value(self.value(&rr.name)?)
                }
            }
            "empty?" => {
                let yes = is_generic_fiber_empty(&self.algebra(r(0))?)?;
                Ok(Out::new(vec![yes.to_string()], json!({"empty": yes})))
            }
            "check" => self.check(cmd),
            other => Err(Error::InvalidArgument(format!("unknown command `{other}`"))),
        }
    }

    fn check(&mut self, cmd: &Command) -> Result<Out> {
        let args = &cmd.args;
        let Arg::Ref(prop) = &args[0] else {
            return Err(Error::InvalidArgument("expected a property".into()));
        };
        let r = |k: usize| -> &Ref {
            match &args[k] {
                Arg::Ref(r) => r,
                other => panic!("parser guarantees a reference, got {other:?}"),
            }
        };
        match prop.name.as_str() {
            "principal" => {
                let at = self.atlas(&r(1).name)?;
                let mut details = Vec::new();
                for i in 0..at.charts.len() {
                    details.push((format!("chart {i}"), at.is_principal_on(i)?));
                }
                Ok(Out::check(details.iter().all(|d| d.1), details))
            }
            "cocycle" => {
                let at = self.atlas(&r(1).name)?;
                let n = at.charts.len();
                let mut details = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        for k in j + 1..n {
                            details.push((format!("charts {i} {j} {k}"), check_cocycle(at, i, j, k)?));
                        }
                    }
                }
                Ok(Out::check(details.iter().all(|d| d.1), details))
            }
            "torsionfree" => {
                let name = &r(1).name;
                let mut details = Vec::new();
                match self.value(name)? {
                    Value::Atlas(at) => {
                        for (i, c) in at.charts.iter().enumerate() {
                            details.push((format!("chart {i}"), c.algebra.is_torsion_free()?));
                        }
                    }
                    _ => {
                        let a = self.algebra(r(1))?;
                        details.push((name.clone(), a.is_torsion_free()?));
                    }
                }
                Ok(Out::check(details.iter().all(|d| d.1), details))
            }
            "closed" => {
                let a = self.algebra(r(1))?;
                let opts = SearchOptions::with_degree_bound(self.degree_bound(cmd)?);
                let (closed, witness) = is_integrally_closed(&a, &opts)?;
                let mut out = Out::check(closed, Vec::new());
                if let Some(c) = witness {
                    let shown = format!("{}/{}", paren(&c), a.w());
                    out.lines.insert(0, format!("witness {shown}"));
                    out.json = json!({"pass": false, "witness": shown});
                }
                Ok(out)
            }
            "integral" => {
                let a = self.algebra(r(1))?;
                let (c, m) = power_fraction(&a, expr(&args[2]), &a.w())?;
                Ok(Out::check(is_integral_element(&a, &c, m)?, Vec::new()))
            }
            "open" => {
                let a = self.algebra(r(1))?;
                let gens = polys(&a, list_items(&args[2]))?;
                Ok(Out::check(is_open_ideal(&a, &gens)?, Vec::new()))
            }
            "point" => {
                let (a, p) = self.point(&r(1).name)?;
                match point_validate(a, p) {
                    Ok(()) => Ok(Out::check(true, Vec::new())),
                    Err(e) => Ok(Out::new(
                        vec![format!("FAIL {e}")],
                        json!({"pass": false, "reason": e.to_string()}),
                    )),
                }
            }
            "uniformity" => {
                let a = self.algebra(r(1))?;
                let (c, m) = power_fraction(&a, expr(&args[2]), &a.w())?;
                let max_power = match args.get(3) {
                    Some(Arg::Int(n)) => *n as u32,
                    _ => 4,
                };
                Ok(Out::check(check_uniformity_implication(&a, &c, m, max_power)?, Vec::new()))
            }
            "factorization" => {
                let Value::Composition(c) = self.value(&r(1).name)? else {
                    return Err(Error::InvalidArgument("expected a composition".into()));
                };
                let mut details = Vec::new();
                for (k, (i, m)) in c.factors.iter().enumerate() {
                    let through = c.first.charts[*i].map.then(m)?;
                    details.push((format!("chart {k}"), through.agrees_with(&c.atlas.charts[k].map)?));
                }
                Ok(Out::check(details.iter().all(|d| d.1), details))
            }
            "finmod" => {
                let Value::Modification(fm) = self.value(&r(1).name)? else {
                    return Err(Error::InvalidArgument("expected a finite modification".into()));
                };
                let ok = RingIso::new(fm.iso.forward.clone(), fm.iso.backward.clone()).is_ok();
                Ok(Out::check(ok, Vec::new()))
            }
            other => Err(Error::InvalidArgument(format!("unknown property `{other}`"))),
        }
    }

    fn ring(&self, args: &[Arg]) -> Result<FpAlgebra<F>> {
        let mut vars = Vec::new();
        let mut rels: &[Expr] = &[];
        let mut idef: &[Expr] = &[];
        for a in args {
            if let Arg::List(label, items) = a {
                match label.as_str() {
                    "vars" => {
                        for it in items {
                            let Expr::Var(v) = it else {
                                return Err(Error::InvalidArgument(format!("`{it}` is not a variable")));
                            };
                            if vars.contains(v) {
                                return Err(Error::InvalidArgument(format!("variable `{v}` listed twice")));
                            }
                            vars.push(v.clone());
                        }
                    }
                    "rels" => rels = items,
                    "idef" => idef = items,
                    _ => {}
                }
            }
        }
        let u = &self.opts.uniformizer;
        let pos = vars
            .iter()
            .position(|v| v == u)
            .ok_or_else(|| Error::MissingUniformizer(u.clone()))?;
        let first = vars.remove(pos);
        vars.insert(0, first);
        let ring = PolyRing::new(vars, self.desc.clone())?;
        let rels = rels.iter().map(|e| poly_in(&ring, e)).collect::<Result<Vec<_>>>()?;
        let idef = idef.iter().map(|e| poly_in(&ring, e)).collect::<Result<Vec<_>>>()?;
        FpAlgebra::new(&ring, rels, idef)
    }
}

fn flag<'a>(cmd: &'a Command, name: &str) -> Option<&'a str> {
    cmd.args.iter().find_map(|a| match a {
        Arg::Flag(n, v) if n == name => Some(v.as_str()),
        _ => None,
    })
}

fn list_items(arg: &Arg) -> &[Expr] {
    match arg {
        Arg::List(_, items) => items,
        _ => &[],
    }
}

fn expr(arg: &Arg) -> &Expr {
    match arg {
        Arg::Expr(e) => e,
        other => panic!("parser guarantees an expression, got {other:?}"),
    }
}

fn int(arg: &Arg) -> usize {
    match arg {
        Arg::Int(n) => *n as usize,
        other => panic!("parser guarantees an integer, got {other:?}"),
    }
}

fn poly_in<F: Field>(ring: &crate::poly::Ring<F>, e: &Expr) -> Result<Poly<F>> {
    evaluate(e, &PolyDomain(ring))
}

fn poly<F: Field>(a: &FpAlgebra<F>, e: &Expr) -> Result<Poly<F>> {
    poly_in(a.ring(), e)
}

fn polys<F: Field>(a: &FpAlgebra<F>, es: &[Expr]) -> Result<Vec<Poly<F>>> {
    es.iter().map(|e| poly(a, e)).collect()
}

/// Writes `e` as `c / g^m` with `c` a polynomial.
fn power_fraction<F: Field>(a: &FpAlgebra<F>, e: &Expr, g: &Poly<F>) -> Result<(Poly<F>, u32)> {
    let (num, den) = evaluate(e, &FractionDomain(a.ring()))?;
    let mut d = den.clone();
    let mut m = 0;
    loop {
        if d.is_constant() {
            let inv = d
                .constant_term()
                .inv()
                .ok_or_else(|| Error::InvalidExpression("division by zero".into()))?;
            return Ok((num.scale(&inv), m));
        }
        match d.div_exact(g) {
            Some(q) if !g.is_constant() => {
                d = q;
                m += 1;
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "the denominator of `{e}` is not a power of {g}"
                )))
            }
        }
    }
}

/// Values of the non-uniformizer variables of `a`, in variable order.
fn assigned<F: Field, T>(a: &FpAlgebra<F>, arg: &Arg, mut eval: impl FnMut(&Expr) -> Result<T>) -> Result<Vec<T>> {
    let Arg::Assign(pairs) = arg else {
        return Err(Error::InvalidArgument("expected `variable -> value` pairs".into()));
    };
    let names = &a.ring().vars()[1..];
    for (v, _) in pairs {
        if !names.contains(v) {
            return Err(Error::UnknownVariable(v.clone()));
        }
    }
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let mut found = pairs.iter().filter(|(v, _)| v == name);
        let Some((_, e)) = found.next() else {
            return Err(Error::InvalidArgument(format!("no value given for `{name}`")));
        };
        if found.next().is_some() {
            return Err(Error::InvalidArgument(format!("`{name}` is assigned twice")));
        }
        out.push(eval(e)?);
    }
    Ok(out)
}
