//! Abstract syntax shared by resource terms and their explicit-substitution
//! extension, plus positions, free-variable lists and fresh names.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// Variable names are shared immutable strings.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A term of the resource calculus.
///
/// `Sub` only occurs in terms of the substitution calculus; every operation
/// documented as taking a resource term rejects it.  The AST itself is
/// unconstrained so that ill-formed input can be reported precisely.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Name),
    Abs(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `del x. M`
    Era(Name, Box<Term>),
    /// `dup x as (l,r). M`
    Dup(Name, Name, Name, Box<Term>),
    /// `M[N/x]`: body, replacement, target.
    Sub(Box<Term>, Box<Term>, Name),
}

/// Terms that may contain explicit substitution nodes.
pub type STerm = Term;

/// A position: child indices from the root.  Bodies are child 0, the argument
/// of an application and the replacement of a substitution are child 1.
pub type Path = Vec<u8>;

pub fn var(x: &str) -> Term {
    Term::Var(name(x))
}

pub fn abs(x: &str, body: Term) -> Term {
    Term::Abs(name(x), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

pub fn era(x: &str, body: Term) -> Term {
    Term::Era(name(x), Box::new(body))
}

pub fn dup(x: &str, l: &str, r: &str, body: Term) -> Term {
    Term::Dup(name(x), name(l), name(r), Box::new(body))
}

pub fn sub(body: Term, repl: Term, x: &str) -> Term {
    Term::Sub(Box::new(body), Box::new(repl), name(x))
}

impl Term {
    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) | Term::Era(_, b) | Term::Dup(_, _, _, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Sub(b, n, _) => 1 + b.size() + n.size(),
        }
    }

    pub fn is_substitution_free(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, b) | Term::Era(_, b) | Term::Dup(_, _, _, b) => b.is_substitution_free(),
            Term::App(f, a) => f.is_substitution_free() && a.is_substitution_free(),
            Term::Sub(..) => false,
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) => vec![],
            Term::Abs(_, b) | Term::Era(_, b) | Term::Dup(_, _, _, b) => vec![b],
            Term::App(f, a) => vec![f, a],
            Term::Sub(b, n, _) => vec![b, n],
        }
    }

    pub fn child(&self, i: u8) -> Option<&Term> {
        match (self, i) {
            (Term::Abs(_, b), 0) | (Term::Era(_, b), 0) | (Term::Dup(_, _, _, b), 0) => Some(b),
            (Term::App(f, _), 0) | (Term::Sub(f, _, _), 0) => Some(f),
            (Term::App(_, a), 1) | (Term::Sub(_, a, _), 1) => Some(a),
            _ => None,
        }
    }

    pub fn at(&self, path: &[u8]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = t.child(i)?;
        }
        Some(t)
    }

    /// Copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[u8], new: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        Some(match (self, i) {
            (Term::Abs(x, b), 0) => Term::Abs(x.clone(), Box::new(b.replace_at(rest, new)?)),
            (Term::Era(x, b), 0) => Term::Era(x.clone(), Box::new(b.replace_at(rest, new)?)),
            (Term::Dup(x, l, r, b), 0) => Term::Dup(
                x.clone(),
                l.clone(),
                r.clone(),
                Box::new(b.replace_at(rest, new)?),
            ),
            (Term::App(f, a), 0) => Term::App(Box::new(f.replace_at(rest, new)?), a.clone()),
            (Term::App(f, a), 1) => Term::App(f.clone(), Box::new(a.replace_at(rest, new)?)),
            (Term::Sub(b, n, x), 0) => {
                Term::Sub(Box::new(b.replace_at(rest, new)?), n.clone(), x.clone())
            }
            (Term::Sub(b, n, x), 1) => {
                Term::Sub(b.clone(), Box::new(n.replace_at(rest, new)?), x.clone())
            }
            _ => return None,
        })
    }

    /// Every name occurring anywhere in the term, bound or free.
    pub fn all_names(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut HashSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Abs(x, b) | Term::Era(x, b) => {
                out.insert(x.clone());
                b.collect_names(out);
            }
            Term::Dup(x, l, r, b) => {
                out.insert(x.clone());
                out.insert(l.clone());
                out.insert(r.clone());
                b.collect_names(out);
            }
            Term::App(f, a) => {
                f.collect_names(out);
                a.collect_names(out);
            }
            Term::Sub(b, n, x) => {
                out.insert(x.clone());
                b.collect_names(out);
                n.collect_names(out);
            }
        }
    }

    /// Names introduced by binders (abstractions, duplication splits and
    /// substitution targets), in preorder.
    pub fn binder_names(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders(&self, out: &mut Vec<Name>) {
        match self {
            Term::Var(_) => {}
            Term::Abs(x, b) => {
                out.push(x.clone());
                b.collect_binders(out);
            }
            Term::Era(_, b) => b.collect_binders(out),
            Term::Dup(_, l, r, b) => {
                out.push(l.clone());
                out.push(r.clone());
                b.collect_binders(out);
            }
            Term::App(f, a) => {
                f.collect_binders(out);
                a.collect_binders(out);
            }
            Term::Sub(b, n, x) => {
                out.push(x.clone());
                b.collect_binders(out);
                n.collect_binders(out);
            }
        }
    }

    /// Rename free occurrences of `from` to `to`.  Assumes `to` is not bound
    /// anywhere in the term, which the naming convention guarantees.
    pub fn rename_free(&self, from: &str, to: &Name) -> Term {
        let r = |x: &Name| if &**x == from { to.clone() } else { x.clone() };
        match self {
            Term::Var(x) => Term::Var(r(x)),
            Term::Abs(x, b) => {
                if &**x == from {
                    self.clone()
                } else {
                    Term::Abs(x.clone(), Box::new(b.rename_free(from, to)))
                }
            }
            Term::App(f, a) => Term::App(
                Box::new(f.rename_free(from, to)),
                Box::new(a.rename_free(from, to)),
            ),
            Term::Era(x, b) => Term::Era(r(x), Box::new(b.rename_free(from, to))),
            Term::Dup(x, l, rr, b) => {
                if &**l == from || &**rr == from {
                    Term::Dup(r(x), l.clone(), rr.clone(), b.clone())
                } else {
                    Term::Dup(r(x), l.clone(), rr.clone(), Box::new(b.rename_free(from, to)))
                }
            }
            Term::Sub(b, n, x) => {
                let body = if &**x == from {
                    (**b).clone()
                } else {
                    b.rename_free(from, to)
                };
                Term::Sub(Box::new(body), Box::new(n.rename_free(from, to)), x.clone())
            }
        }
    }

    /// Rename every occurrence of each name in `map`, binders included.
    pub fn rename_all(&self, map: &dyn Fn(&Name) -> Name) -> Term {
        match self {
            Term::Var(x) => Term::Var(map(x)),
            Term::Abs(x, b) => Term::Abs(map(x), Box::new(b.rename_all(map))),
            Term::App(f, a) => Term::App(Box::new(f.rename_all(map)), Box::new(a.rename_all(map))),
            Term::Era(x, b) => Term::Era(map(x), Box::new(b.rename_all(map))),
            Term::Dup(x, l, r, b) => Term::Dup(map(x), map(l), map(r), Box::new(b.rename_all(map))),
            Term::Sub(b, n, x) => Term::Sub(
                Box::new(b.rename_all(map)),
                Box::new(n.rename_all(map)),
                map(x),
            ),
        }
    }
}

/// Free-variable list following the list rules: abstraction drops its binder,
/// application concatenates, erasure and duplication put their variable first,
/// substitution drops the target and appends the replacement's list.
///
/// Computed on raw syntax; duplicates appear when the term is not linear.
pub fn fv_list(t: &Term) -> Vec<Name> {
    let mut out = Vec::new();
    fv_into(t, &mut out);
    out
}

fn fv_into(t: &Term, out: &mut Vec<Name>) {
    match t {
        Term::Var(x) => out.push(x.clone()),
        Term::Abs(x, b) => {
            let start = out.len();
            fv_into(b, out);
            remove_from(out, start, x);
        }
        Term::App(f, a) => {
            fv_into(f, out);
            fv_into(a, out);
        }
        Term::Era(x, b) => {
            out.push(x.clone());
            fv_into(b, out);
        }
        Term::Dup(x, l, r, b) => {
            out.push(x.clone());
            let start = out.len();
            fv_into(b, out);
            remove_from(out, start, l);
            remove_from(out, start, r);
        }
        Term::Sub(b, n, x) => {
            let start = out.len();
            fv_into(b, out);
            remove_from(out, start, x);
            fv_into(n, out);
        }
    }
}

fn remove_from(v: &mut Vec<Name>, start: usize, x: &Name) {
    let mut i = start;
    while i < v.len() {
        if v[i] == *x {
            v.remove(i);
        } else {
            i += 1;
        }
    }
}

pub fn fv_set(t: &Term) -> HashSet<Name> {
    fv_list(t).into_iter().collect()
}

pub fn occurs_free(t: &Term, x: &str) -> bool {
    fv_list(t).iter().any(|y| &**y == x)
}

/// Deterministic fresh-name supply.  A request for base `x` yields `x1`,
/// `x2`, ... skipping names already in use; bases ending in a digit get an
/// underscore separator (`x1` -> `x1_1`).
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: HashSet<Name>,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut s = Self::new();
        for t in names {
            s.used.extend(t.all_names());
        }
        s
    }

    pub fn reserve(&mut self, x: &Name) {
        self.used.insert(x.clone());
    }

    pub fn reserve_all(&mut self, t: &Term) {
        self.used.extend(t.all_names());
    }

    pub fn is_used(&self, x: &str) -> bool {
        self.used.contains(x)
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let sep = if base.ends_with(|c: char| c.is_ascii_digit()) { "_" } else { "" };
        let mut n = 1usize;
        loop {
            let cand = format!("{base}{sep}{n}");
            if !self.used.contains(cand.as_str()) {
                let nm: Name = name(&cand);
                self.used.insert(nm.clone());
                return nm;
            }
            n += 1;
        }
    }

    /// `base` itself when unused, otherwise a numbered variant.
    pub fn fresh_or_same(&mut self, base: &str) -> Name {
        if !self.used.contains(base) {
            let nm = name(base);
            self.used.insert(nm.clone());
            nm
        } else {
            self.fresh(base)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f)
    }
}

fn is_binder(t: &Term) -> bool {
    matches!(t, Term::Abs(..) | Term::Era(..) | Term::Dup(..))
}

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(x) => write!(f, "{x}"),
        Term::Abs(x, b) => {
            write!(f, "\\{x}. ")?;
            write_term(b, f)
        }
        Term::Era(x, b) => {
            write!(f, "del {x}. ")?;
            write_term(b, f)
        }
        Term::Dup(x, l, r, b) => {
            write!(f, "dup {x} as ({l},{r}). ")?;
            write_term(b, f)
        }
        Term::App(g, a) => {
            if is_binder(g) {
                write!(f, "(")?;
                write_term(g, f)?;
                write!(f, ")")?;
            } else {
                write_term(g, f)?;
            }
            write!(f, " ")?;
            if matches!(**a, Term::App(..)) || is_binder(a) {
                write!(f, "(")?;
                write_term(a, f)?;
                write!(f, ")")
            } else {
                write_term(a, f)
            }
        }
        Term::Sub(b, n, x) => {
            if matches!(**b, Term::Var(_) | Term::Sub(..)) {
                write_term(b, f)?;
            } else {
                write!(f, "(")?;
                write_term(b, f)?;
                write!(f, ")")?;
            }
            write!(f, "[")?;
            write_term(n, f)?;
            write!(f, "/{x}]")
        }
    }
}

pub fn path_string(p: &[u8]) -> String {
    if p.is_empty() {
        "root".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

pub(crate) fn ser_path<S: serde::Serializer>(p: &Path, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&path_string(p))
}

pub(crate) fn ser_term<S: serde::Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}
