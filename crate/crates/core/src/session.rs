//! The line-based session language: parsing into commands, static checks on
//! names, and rendering back to canonical text.
//!
//! ```text
//! # comment
//! ring A = vars[w,x] rels[x^2 - w^3] idef[w]
//! blowup At = A ideal(x, w)
//! check principal At
//! fail blowup Bad = A ideal(x)
//! ```
//!
//! A line is `[fail] KEYWORD [NAME =] ARG..`. Arguments are separated by
//! whitespace outside brackets; an expression containing spaces must be
//! parenthesized. `fail` marks a command expected to raise a domain error.

use std::collections::HashMap;
use std::fmt;

use crate::expr::{parse_expr, Expr};

/// The kind of value a binding holds, used for static checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Algebra,
    Ideal,
    Admissible,
    Atlas,
    Point,
    Map,
    Normalization,
    GenericChart,
    Composition,
    Modification,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::Algebra => "an algebra",
            Kind::Ideal => "an ideal",
            Kind::Admissible => "an admissible ideal",
            Kind::Atlas => "a chart atlas",
            Kind::Point => "a point",
            Kind::Map => "a ring map",
            Kind::Normalization => "a normalization",
            Kind::GenericChart => "a generic chart",
            Kind::Composition => "a composition of blow-ups",
            Kind::Modification => "a finite modification",
        }
    }

}

/// A reference to a binding, optionally to one chart of an atlas (`At.1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ref {
    pub name: String,
    pub chart: Option<usize>,
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.chart {
            Some(k) => write!(f, "{}.{k}", self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Ref(Ref),
    Int(u64),
    /// `label[..]` or `label(..)`.
    List(String, Vec<Expr>),
    Expr(Expr),
    /// `e=N`.
    Ramification(u32),
    /// `x -> expr, y -> expr`.
    Assign(Vec<(String, Expr)>),
    /// `--name value`.
    Flag(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub expect_fail: bool,
    pub keyword: String,
    pub binding: Option<String>,
    pub args: Vec<Arg>,
}

/// Commands with their source line numbers. Equality ignores line numbers.
#[derive(Clone, Debug, Default)]
pub struct Session {
    pub commands: Vec<Command>,
    pub lines: Vec<usize>,
}

impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        self.commands == other.commands
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionError {
    Syntax { line: usize, col: usize, expected: String },
    UnboundName { line: usize, col: usize, name: String },
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionError::Syntax { line, col, expected } => {
                write!(f, "SyntaxError at line {line}, column {col}: expected {expected}")
            }
            SessionError::UnboundName { line, col, name } => {
                write!(f, "UnboundName at line {line}, column {col}: `{name}`")
            }
        }
    }
}

impl std::error::Error for SessionError {}

fn square_list(label: &str) -> bool {
    matches!(label, "vars" | "rels" | "idef")
}

/// A whitespace-separated item with its 1-based column and byte offset.
#[derive(Clone, Debug)]
struct Item<'a> {
    text: &'a str,
    col: usize,
    offset: usize,
}

fn split_items(line: &str) -> Result<Vec<Item<'_>>, (usize, String)> {
    let mut items = Vec::new();
    let mut depth: i32 = 0;
    let mut start: Option<(usize, usize)> = None;
    for (col0, (off, c)) in line.char_indices().enumerate() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err((col0 + 1, "a matching opening bracket".into()));
                }
            }
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some((s, scol)) = start.take() {
                items.push(Item {
                    text: &line[s..off],
                    col: scol,
                    offset: s,
                });
            }
        } else if start.is_none() {
            start = Some((off, col0 + 1));
        }
    }
    if depth != 0 {
        return Err((line.chars().count() + 1, "a closing bracket".into()));
    }
    if let Some((s, scol)) = start {
        items.push(Item {
            text: &line[s..],
            col: scol,
            offset: s,
        });
    }
    Ok(items)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Splits on commas outside brackets.
fn split_commas(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Binding {
    Required,
    None,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// A reference to a binding of one of the given kinds.
    Name(&'static [Kind]),
    /// Anything algebra-like, or an atlas chart.
    Alg,
    Int,
    OptInt,
    List(&'static str),
    OptList(&'static str),
    /// An admissible ideal: a binding or an inline `ideal(..)`.
    Center,
    Expr,
    OptExpr,
    Ramification,
    Assign,
}

struct Signature {
    binding: Binding,
    slots: &'static [Slot],
    flags: &'static [&'static str],
    produces: Option<Kind>,
}

const ANY: &[Kind] = &[
    Kind::Algebra,
    Kind::Ideal,
    Kind::Admissible,
    Kind::Atlas,
    Kind::Point,
    Kind::Map,
    Kind::Normalization,
    Kind::GenericChart,
    Kind::Composition,
    Kind::Modification,
];
/// Kinds that can stand where an algebra is expected.
const ALGEBRA_LIKE: &[Kind] = &[Kind::Algebra, Kind::Normalization, Kind::GenericChart, Kind::Modification];
const IDEAL_LIKE: &[Kind] = &[
    Kind::Ideal,
    Kind::Admissible,
    Kind::Algebra,
    Kind::Normalization,
    Kind::GenericChart,
    Kind::Modification,
];

fn signature(keyword: &str) -> Option<Signature> {
    use Slot::*;
    let s = |binding, slots, flags, produces| Signature {
        binding,
        slots,
        flags,
        produces,
    };
    Some(match keyword {
        "ring" => s(
            Binding::Required,
            &[List("vars"), OptList("rels"), OptList("idef")],
            &[],
            Some(Kind::Algebra),
        ),
        "ideal" => s(Binding::Required, &[Alg, List("ideal")], &[], Some(Kind::Ideal)),
        "admissible" => s(Binding::Required, &[Alg, List("ideal")], &[], Some(Kind::Admissible)),
        "point" => s(Binding::Required, &[Alg, Ramification, Assign], &[], Some(Kind::Point)),
        "map" => s(Binding::Required, &[Alg, Alg, Assign], &[], Some(Kind::Map)),
        "localize" => s(Binding::Required, &[Alg, Expr], &[], Some(Kind::Algebra)),
        "sat" => s(Binding::Required, &[Alg, OptExpr], &[], Some(Kind::Algebra)),
        "gb" => s(Binding::None, &[Name(IDEAL_LIKE)], &["order"], None),
        "kernel" => s(Binding::None, &[Name(&[Kind::Map])], &[], None),
        "contains" => s(Binding::None, &[Name(IDEAL_LIKE), Expr], &[], None),
        "blowup" => s(Binding::Required, &[Alg, Center], &[], Some(Kind::Atlas)),
        "transition" => s(Binding::None, &[Name(&[Kind::Atlas]), Int, Int], &[], None),
        "compose" => s(Binding::Required, &[Alg, Center, Center], &[], Some(Kind::Composition)),
        "extend" => s(
            Binding::Required,
            &[Alg, Expr, List("local")],
            &["bound"],
            Some(Kind::Admissible),
        ),
        "finmod" => s(Binding::Required, &[Alg, List("elems")], &[], Some(Kind::Modification)),
        "genchart" => s(Binding::Required, &[Alg, Int], &[], Some(Kind::GenericChart)),
        "tube" => s(Binding::Required, &[Alg, List("ideal"), Int], &[], Some(Kind::Algebra)),
        "spc" => s(Binding::None, &[Name(&[Kind::Point]), Expr], &[], None),
        "lift" => s(
            Binding::Required,
            &[Name(&[Kind::Atlas]), Name(&[Kind::Point])],
            &[],
            Some(Kind::Point),
        ),
        "descend" => s(Binding::None, &[Alg, Alg, Assign], &[], None),
        "normalize" => s(Binding::Required, &[Alg], &["degree-bound"], Some(Kind::Normalization)),
        "normblowup" => s(Binding::Required, &[Alg, Center], &["degree-bound"], Some(Kind::Atlas)),
        "show" => s(Binding::None, &[Name(ANY)], &[], None),
        "empty?" => s(Binding::None, &[Alg], &[], None),
        _ => return None,
    })
}

fn check_signature(property: &str) -> Option<Signature> {
    use Slot::*;
    let s = |slots, flags| Signature {
        binding: Binding::None,
        slots,
        flags,
        produces: None,
    };
    Some(match property {
        "principal" | "cocycle" => s(&[Name(&[Kind::Atlas])], &[]),
        "torsionfree" => s(
            &[Name(&[
                Kind::Algebra,
                Kind::Atlas,
                Kind::GenericChart,
                Kind::Normalization,
                Kind::Modification,
            ])],
            &[],
        ),
        "closed" => s(&[Alg], &["degree-bound"]),
        "integral" => s(&[Alg, Expr], &[]),
        "open" => s(&[Alg, List("ideal")], &[]),
        "point" => s(&[Name(&[Kind::Point])], &[]),
        "uniformity" => s(&[Alg, Expr, OptInt], &[]),
        "factorization" => s(&[Name(&[Kind::Composition])], &[]),
        "finmod" => s(&[Name(&[Kind::Modification])], &[]),
        _ => return None,
    })
}

struct LineParser<'a> {
    line_no: usize,
    line: &'a str,
    items: Vec<Item<'a>>,
    pos: usize,
    scope: &'a HashMap<String, Kind>,
}

type PResult<T> = Result<T, SessionError>;

impl<'a> LineParser<'a> {
    fn col(&self) -> usize {
        self.items
            .get(self.pos)
            .map(|i| i.col)
            .unwrap_or(self.line.chars().count() + 1)
    }

    fn syntax<T>(&self, col: usize, expected: impl Into<String>) -> PResult<T> {
        Err(SessionError::Syntax {
            line: self.line_no,
            col,
            expected: expected.into(),
        })
    }

    fn peek(&self) -> Option<&Item<'a>> {
        self.items.get(self.pos)
    }

    fn next(&mut self, expected: &str) -> PResult<Item<'a>> {
        match self.items.get(self.pos) {
            Some(it) if !it.text.starts_with("--") => {
                self.pos += 1;
                Ok(it.clone())
            }
            _ => self.syntax(self.col(), expected),
        }
    }

    fn expr_at(&self, text: &str, col: usize) -> PResult<Expr> {
        parse_expr(text).map_err(|e| match e {
            crate::error::Error::ExpressionSyntax { col: c, expected } => SessionError::Syntax {
                line: self.line_no,
                col: col + c - 1,
                expected,
            },
            other => SessionError::Syntax {
                line: self.line_no,
                col,
                expected: other.to_string(),
            },
        })
    }

    fn reference(&mut self, kinds: &[Kind], chart_ok: bool) -> PResult<Ref> {
        let it = self.next("a name")?;
        let (name, chart) = match it.text.split_once('.') {
            Some((n, k)) => match k.parse::<usize>() {
                Ok(k) if chart_ok => (n, Some(k)),
                _ => return self.syntax(it.col + n.len() + 1, "a chart index"),
            },
            None => (it.text, None),
        };
        if !is_ident(name) {
            return self.syntax(it.col, "a name");
        }
        let Some(&kind) = self.scope.get(name) else {
            return Err(SessionError::UnboundName {
                line: self.line_no,
                col: it.col,
                name: name.to_string(),
            });
        };
        let ok = if chart.is_some() {
            kind == Kind::Atlas
        } else {
            kinds.contains(&kind)
        };
        if !ok {
            let wanted: Vec<&str> = kinds.iter().map(|k| k.describe()).collect();
            return self.syntax(it.col, format!("{} (`{name}` is {})", wanted.join(" or "), kind.describe()));
        }
        Ok(Ref {
            name: name.to_string(),
            chart,
        })
    }

    fn list(&mut self, label: &str, optional: bool) -> PResult<Option<Arg>> {
        let Some(it) = self.peek().cloned() else {
            return if optional { Ok(None) } else { self.syntax(self.col(), format!("`{label}[..]`")) };
        };
        let body = it
            .text
            .strip_prefix(label)
            .and_then(|r| {
                r.strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .or_else(|| r.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            });
        let Some(body) = body else {
            return if optional { Ok(None) } else { self.syntax(it.col, format!("`{label}[..]`")) };
        };
        self.pos += 1;
        let base = it.col + label.len() + 1;
        let mut items = Vec::new();
        if !body.trim().is_empty() {
            for (off, part) in split_commas(body) {
                let lead = part.len() - part.trim_start().len();
                let col = base + body[..off].chars().count() + part[..lead].chars().count();
                let e = self.expr_at(part.trim(), col)?;
                if label == "vars" && !matches!(e, Expr::Var(_)) {
                    return self.syntax(col, "a variable name");
                }
                items.push(e);
            }
        }
        Ok(Some(Arg::List(label.to_string(), items)))
    }

    fn assignments(&mut self) -> PResult<Arg> {
        let Some(first) = self.peek().cloned() else {
            return Ok(Arg::Assign(Vec::new()));
        };
        let end = self
            .items
            .iter()
            .skip(self.pos)
            .position(|i| i.text.starts_with("--"))
            .map(|k| self.items[self.pos + k].offset)
            .unwrap_or(self.line.len());
        let rest = &self.line[first.offset..end];
        let base_col = first.col;
        let mut out = Vec::new();
        for (off, part) in split_commas(rest) {
            let col = base_col + rest[..off].chars().count();
            let Some((lhs, rhs)) = part.split_once("->") else {
                return self.syntax(col, "`variable -> value`");
            };
            let name = lhs.trim();
            if !is_ident(name) {
                return self.syntax(col, "a variable name");
            }
            let rcol = col + lhs.chars().count() + 2;
            out.push((name.to_string(), self.expr_at(rhs.trim(), rcol)?));
        }
        while self.peek().is_some_and(|i| !i.text.starts_with("--")) {
            self.pos += 1;
        }
        Ok(Arg::Assign(out))
    }

    fn slot(&mut self, slot: Slot) -> PResult<Option<Arg>> {
        Ok(match slot {
            Slot::Name(kinds) => Some(Arg::Ref(self.reference(kinds, kinds == ANY)?)),
            Slot::Alg => Some(Arg::Ref(self.reference(ALGEBRA_LIKE, true)?)),
            Slot::Int | Slot::OptInt => match self.peek() {
                Some(it) if it.text.parse::<u64>().is_ok() => {
                    let n = it.text.parse().unwrap();
                    self.pos += 1;
                    Some(Arg::Int(n))
                }
                _ if slot == Slot::OptInt => None,
                _ => return self.syntax(self.col(), "a non-negative integer"),
            },
            Slot::List(label) => self.list(label, false)?,
            Slot::OptList(label) => self.list(label, true)?,
            Slot::Center => {
                let is_list = self.peek().is_some_and(|i| i.text.starts_with("ideal"));
                if is_list && self.peek().is_some_and(|i| i.text.len() > 5) {
                    self.list("ideal", false)?
                } else {
                    Some(Arg::Ref(self.reference(&[Kind::Admissible], false)?))
                }
            }
            Slot::Expr | Slot::OptExpr => match self.peek().cloned() {
                Some(it) if !it.text.starts_with("--") => {
                    self.pos += 1;
                    Some(Arg::Expr(self.expr_at(it.text, it.col)?))
                }
                _ if slot == Slot::OptExpr => None,
                _ => return self.syntax(self.col(), "an expression"),
            },
            Slot::Ramification => match self.peek().cloned() {
                Some(it) if it.text.starts_with("e=") => match it.text[2..].parse::<u32>() {
                    Ok(e) if e >= 1 => {
                        self.pos += 1;
                        Some(Arg::Ramification(e))
                    }
                    _ => return self.syntax(it.col + 2, "a positive ramification index"),
                },
                _ => None,
            },
            Slot::Assign => Some(self.assignments()?),
        })
    }

    fn flags(&mut self, allowed: &[&str]) -> PResult<Vec<Arg>> {
        let mut out = Vec::new();
        while let Some(it) = self.peek().cloned() {
            let Some(name) = it.text.strip_prefix("--") else {
                return self.syntax(it.col, "end of line");
            };
            if !allowed.contains(&name) {
                return self.syntax(it.col, format!("one of the flags [{}]", allowed.iter().map(|f| format!("--{f}")).collect::<Vec<_>>().join(", ")));
            }
            self.pos += 1;
            let v = self.next(&format!("a value for --{name}"))?;
            out.push(Arg::Flag(name.to_string(), v.text.to_string()));
        }
        Ok(out)
    }
}

fn parse_line(
    line_no: usize,
    line: &str,
    scope: &mut HashMap<String, Kind>,
) -> PResult<Option<Command>> {
    let content = match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    };
    let items = split_items(content).map_err(|(col, expected)| SessionError::Syntax {
        line: line_no,
        col,
        expected,
    })?;
    if items.is_empty() {
        return Ok(None);
    }
    let snapshot = scope.clone();
    let mut p = LineParser {
        line_no,
        line: content,
        items,
        pos: 0,
        scope: &snapshot,
    };
    let mut expect_fail = false;
    if p.peek().map(|i| i.text) == Some("fail") {
        expect_fail = true;
        p.pos += 1;
    }
    let kw = p.next("a command")?;
    let keyword = kw.text.to_string();
    let sig = if keyword == "check" {
        let prop = p.next("a property to check")?;
        let sig = check_signature(prop.text).ok_or_else(|| SessionError::Syntax {
            line: line_no,
            col: prop.col,
            expected: "one of principal, torsionfree, cocycle, closed, integral, open, point, uniformity, factorization, finmod".into(),
        })?;
        (Some(prop.text.to_string()), sig)
    } else {
        let sig = signature(&keyword).ok_or_else(|| SessionError::Syntax {
            line: line_no,
            col: kw.col,
            expected: "a command keyword".into(),
        })?;
        (None, sig)
    };
    let (property, sig) = sig;
    let mut binding = None;
    if sig.binding == Binding::Required {
        let name = p.next("a name to bind")?;
        if !is_ident(name.text) {
            return p.syntax(name.col, "a name to bind");
        }
        if snapshot.contains_key(name.text) {
            return p.syntax(name.col, format!("a fresh name (`{}` is already bound)", name.text));
        }
        let eq = p.next("`=`")?;
        if eq.text != "=" {
            return p.syntax(eq.col, "`=`");
        }
        binding = Some(name.text.to_string());
    }
    let mut args = Vec::new();
    if let Some(prop) = property {
        args.push(Arg::Ref(Ref {
            name: prop,
            chart: None,
        }));
    }
    for &slot in sig.slots {
        if let Some(a) = p.slot(slot)? {
            args.push(a);
        }
    }
    args.extend(p.flags(sig.flags)?);
    if let (Some(name), Some(kind)) = (&binding, sig.produces) {
        scope.insert(name.clone(), kind);
    }
    Ok(Some(Command {
        expect_fail,
        keyword,
        binding,
        args,
    }))
}

/// Parses a whole session, checking that every name is bound before use.
pub fn parse_session(text: &str) -> Result<Session, SessionError> {
    let mut scope = HashMap::new();
    let mut session = Session::default();
    for (k, line) in text.lines().enumerate() {
        if let Some(cmd) = parse_line(k + 1, line, &mut scope)? {
            session.commands.push(cmd);
            session.lines.push(k + 1);
        }
    }
    Ok(session)
}

/// Expressions with spaces at the top level are parenthesized so that they
/// stay a single argument.
fn render_expr(e: &Expr) -> String {
    let s = e.to_string();
    let mut depth = 0;
    let spaced = s.chars().any(|c| {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        c == ' ' && depth == 0
    });
    if spaced {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Ref(r) => write!(f, "{r}"),
            Arg::Int(n) => write!(f, "{n}"),
            Arg::List(label, items) => {
                let body: Vec<String> = items.iter().map(|e| e.to_string()).collect();
                let sep = if label == "vars" { "," } else { ", " };
                if square_list(label) {
                    write!(f, "{label}[{}]", body.join(sep))
                } else {
                    write!(f, "{label}({})", body.join(sep))
                }
            }
            Arg::Expr(e) => write!(f, "{}", render_expr(e)),
            Arg::Ramification(e) => write!(f, "e={e}"),
            Arg::Assign(pairs) => {
                let parts: Vec<String> = pairs.iter().map(|(v, e)| format!("{v} -> {e}")).collect();
                write!(f, "{}", parts.join(", "))
            }
            Arg::Flag(name, value) => write!(f, "--{name} {value}"),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expect_fail {
            write!(f, "fail ")?;
        }
        write!(f, "{}", self.keyword)?;
        if let Some(b) = &self.binding {
            write!(f, " {b} =")?;
        }
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// Canonical text, one command per line.
pub fn render(session: &Session) -> String {
    let mut out = String::new();
    for c in &session.commands {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}
