use std::cmp::Ordering;

use super::Monomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Grevlex,
    Lex,
    /// Lex on the first `prefix` (permuted) variables, ties broken by grevlex
    /// on the rest. An elimination order for the prefix.
    Block { prefix: usize },
}

/// A monomial order on exponent vectors, optionally after permuting the
/// variables: position `k` of the permuted vector holds the exponent of
/// variable `perm[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub perm: Option<Vec<usize>>,
}

impl Default for MonomialOrder {
    fn default() -> Self {
        Self::grevlex()
    }
}

impl MonomialOrder {
    pub fn grevlex() -> Self {
        MonomialOrder {
            kind: OrderKind::Grevlex,
            perm: None,
        }
    }

    pub fn lex() -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            perm: None,
        }
    }

    /// Elimination order: the variables in `first` (in that priority) are
    /// compared lexicographically before anything else; the remaining
    /// variables follow in their natural order under grevlex.
    pub fn eliminating(nvars: usize, first: &[usize]) -> Self {
        let mut perm: Vec<usize> = first.to_vec();
        perm.extend((0..nvars).filter(|v| !first.contains(v)));
        MonomialOrder {
            kind: OrderKind::Block {
                prefix: first.len(),
            },
            perm: Some(perm),
        }
    }

    pub fn with_perm(mut self, perm: Vec<usize>) -> Self {
        self.perm = Some(perm);
        self
    }

    /// Permutation as a full vector for `nvars` variables.
    pub(crate) fn permutation(&self, nvars: usize) -> Vec<usize> {
        match &self.perm {
            Some(p) => {
                assert_eq!(p.len(), nvars, "order permutation has wrong length");
                p.clone()
            }
            None => (0..nvars).collect(),
        }
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match &self.perm {
            None => compare_kind(&self.kind, a.exps(), b.exps()),
            Some(p) => {
                let pa: Vec<u32> = p.iter().map(|&i| a.exps()[i]).collect();
                let pb: Vec<u32> = p.iter().map(|&i| b.exps()[i]).collect();
                compare_kind(&self.kind, &pa, &pb)
            }
        }
    }
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

/// Comparison on already permuted exponent vectors.
pub(crate) fn compare_kind(kind: &OrderKind, a: &[u32], b: &[u32]) -> Ordering {
    match kind {
        OrderKind::Grevlex => grevlex(a, b),
        OrderKind::Lex => a.cmp(b),
        OrderKind::Block { prefix } => {
            let p = (*prefix).min(a.len());
            match a[..p].cmp(&b[..p]) {
                Ordering::Equal => grevlex(&a[p..], &b[p..]),
                o => o,
            }
        }
    }
}
