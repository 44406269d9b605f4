//! Explicit substitution: the eight evaluation rules, normalisation with
//! traces, the termination measure, and substitution on resource terms.

use crate::alpha::rename_binders;
use crate::linear::{check_linear, check_sterm};
use crate::term::{fv_list, path_string, Name, NameSupply, Path, Term};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SubstRule {
    Var,
    Abs,
    AppLeft,
    AppRight,
    EraOther,
    EraHit,
    DupOther,
    DupHit,
}

impl SubstRule {
    pub fn id(self) -> &'static str {
        match self {
            SubstRule::Var => "var",
            SubstRule::Abs => "abs",
            SubstRule::AppLeft => "app-left",
            SubstRule::AppRight => "app-right",
            SubstRule::EraOther => "era-other",
            SubstRule::EraHit => "era-hit",
            SubstRule::DupOther => "dup-other",
            SubstRule::DupHit => "dup-hit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("no substitution at position {}", path_string(.0))]
    NotASubstitution(Path),
    #[error("body at {} is itself a substitution; evaluate it first", path_string(.0))]
    NestedBody(Path),
    #[error("invalid term: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Renamings used by a `dup-hit` step: how the two copies of the replacement
/// were obtained from it.  Only names that changed are listed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CopyRenaming {
    pub left: Vec<(String, String)>,
    pub right: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstStep {
    pub rule: SubstRule,
    #[serde(serialize_with = "crate::term::ser_path")]
    pub position: Path,
    pub mul_before: Vec<usize>,
    pub mul_after: Vec<usize>,
    #[serde(serialize_with = "crate::term::ser_term")]
    pub after: Term,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<CopyRenaming>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstTrace {
    #[serde(serialize_with = "crate::term::ser_term")]
    pub start: Term,
    pub steps: Vec<SubstStep>,
}

impl SubstTrace {
    pub fn end(&self) -> &Term {
        self.steps.last().map(|s| &s.after).unwrap_or(&self.start)
    }

    /// Term before step `i`.
    pub fn before(&self, i: usize) -> &Term {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].after
        }
    }
}

/// Size measure; substitution nodes are transparent.
pub fn measure(t: &Term) -> usize {
    match t {
        Term::Var(_) => 1,
        Term::Abs(_, b) | Term::Era(_, b) | Term::Dup(_, _, _, b) => measure(b) + 1,
        Term::App(f, a) => measure(f) + measure(a) + 1,
        Term::Sub(b, _, _) => measure(b),
    }
}

/// The multiset of body measures of all substitution nodes, sorted.
pub fn mul_multiset(t: &Term) -> Vec<usize> {
    fn go(t: &Term, out: &mut Vec<usize>) {
        match t {
            Term::Var(_) => {}
            Term::Abs(_, b) | Term::Era(_, b) | Term::Dup(_, _, _, b) => go(b, out),
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            Term::Sub(b, _, _) => {
                out.push(measure(b));
                go(b, out);
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out.sort_unstable();
    out
}

fn counts(m: &[usize]) -> BTreeMap<usize, usize> {
    let mut c = BTreeMap::new();
    for &x in m {
        *c.entry(x).or_insert(0) += 1;
    }
    c
}

/// Multiset order: `a` is strictly greater than `b` when they differ and
/// every element `b` has in excess is dominated by a larger element `a` has
/// in excess.
pub fn multiset_greater(a: &[usize], b: &[usize]) -> bool {
    let (ca, cb) = (counts(a), counts(b));
    if ca == cb {
        return false;
    }
    let excess_a: Vec<usize> =
        ca.iter().filter(|(k, &n)| n > *cb.get(k).unwrap_or(&0)).map(|(k, _)| *k).collect();
    cb.iter()
        .filter(|(k, &n)| n > *ca.get(k).unwrap_or(&0))
        .all(|(k, _)| excess_a.iter().any(|x| x > k))
}

fn era_stack(xs: &[Name], body: Term) -> Term {
    xs.iter().rev().fold(body, |acc, x| Term::Era(x.clone(), Box::new(acc)))
}

fn unique_fv(t: &Term) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::new();
    for x in fv_list(t) {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Copy of `n` with every free variable renamed fresh.  When `fresh_binders`
/// is set the bound names are renamed too, so the copy can sit next to the
/// original without repeating binder names.
fn fresh_copy(n: &Term, supply: &mut NameSupply, fresh_binders: bool) -> (Term, Vec<(Name, Name)>) {
    let mut map: Vec<(Name, Name)> = Vec::new();
    let mut out = n.clone();
    for y in unique_fv(n) {
        let y2 = supply.fresh(&y);
        out = out.rename_free(&y, &y2);
        map.push((y, y2));
    }
    if fresh_binders {
        let mut bmap = Vec::new();
        out = rename_binders(&out, &mut |b| {
            let base = b.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
            let nb = supply.fresh(if base.is_empty() { "v" } else { base });
            bmap.push((b.clone(), nb.clone()));
            nb
        });
        map.extend(bmap);
    }
    (out, map)
}

fn contract(
    body: &Term,
    n: &Term,
    x: &Name,
    supply: &mut NameSupply,
) -> Result<(SubstRule, Term, Option<CopyRenaming>), String> {
    let sub = |m: &Term| Term::Sub(Box::new(m.clone()), Box::new(n.clone()), x.clone());
    Ok(match body {
        Term::Var(y) if y == x => (SubstRule::Var, n.clone(), None),
        Term::Var(y) => return Err(format!("target {x} is not the variable {y}")),
        Term::Abs(y, m) => (SubstRule::Abs, Term::Abs(y.clone(), Box::new(sub(m))), None),
        Term::App(m, p) => {
            if fv_list(m).contains(x) {
                (SubstRule::AppLeft, Term::App(Box::new(sub(m)), p.clone()), None)
            } else if fv_list(p).contains(x) {
                (SubstRule::AppRight, Term::App(m.clone(), Box::new(sub(p))), None)
            } else {
                return Err(format!("target {x} does not occur"));
            }
        }
        Term::Era(y, m) if y == x => (SubstRule::EraHit, era_stack(&unique_fv(n), (**m).clone()), None),
        Term::Era(y, m) => (SubstRule::EraOther, Term::Era(y.clone(), Box::new(sub(m))), None),
        Term::Dup(y, y1, y2, m) if y == x => {
            let (n1, left) = fresh_copy(n, supply, false);
            let (n2, right) = fresh_copy(n, supply, true);
            let fv = unique_fv(n);
            let inner = Term::Sub(
                Box::new(Term::Sub(m.clone(), Box::new(n1), y1.clone())),
                Box::new(n2),
                y2.clone(),
            );
            let mut out = inner;
            for z in fv.iter().rev() {
                let l = &left.iter().find(|(a, _)| a == z).unwrap().1;
                let r = &right.iter().find(|(a, _)| a == z).unwrap().1;
                out = Term::Dup(z.clone(), l.clone(), r.clone(), Box::new(out));
            }
            let show = |v: Vec<(Name, Name)>| {
                v.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
            };
            (SubstRule::DupHit, out, Some(CopyRenaming { left: show(left), right: show(right) }))
        }
        Term::Dup(y, y1, y2, m) => {
            (SubstRule::DupOther, Term::Dup(y.clone(), y1.clone(), y2.clone(), Box::new(sub(m))), None)
        }
        Term::Sub(..) => return Err("nested".into()),
    })
}

/// Apply the evaluation rule matching the substitution node at `pos`.
pub fn step_subst_with(
    s: &Term,
    pos: &[u8],
    supply: &mut NameSupply,
) -> Result<SubstStep, SubstError> {
    let Some(Term::Sub(body, n, x)) = s.at(pos) else {
        return Err(SubstError::NotASubstitution(pos.to_vec()));
    };
    if matches!(**body, Term::Sub(..)) {
        return Err(SubstError::NestedBody(pos.to_vec()));
    }
    let (rule, replaced, copies) =
        contract(body, n, x, supply).map_err(SubstError::Invalid)?;
    let after = s.replace_at(pos, replaced).expect("position exists");
    Ok(SubstStep {
        rule,
        position: pos.to_vec(),
        mul_before: mul_multiset(s),
        mul_after: mul_multiset(&after),
        after,
        copies,
    })
}

pub fn step_subst(s: &Term, pos: &[u8]) -> Result<Term, SubstError> {
    let mut supply = NameSupply::avoiding([s]);
    step_subst_with(s, pos, &mut supply).map(|st| st.after)
}

/// Positions of substitution nodes whose body is not itself a substitution,
/// in preorder.
pub fn subst_redexes(s: &Term) -> Vec<Path> {
    fn go(t: &Term, path: &mut Vec<u8>, out: &mut Vec<Path>) {
        if let Term::Sub(b, _, _) = t {
            if !matches!(**b, Term::Sub(..)) {
                out.push(path.clone());
            }
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i as u8);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(s, &mut Vec::new(), &mut out);
    out
}

/// Leftmost substitution node with a substitution-free body.
fn innermost(s: &Term) -> Option<Path> {
    fn go(t: &Term, path: &mut Vec<u8>) -> Option<Path> {
        if let Term::Sub(b, _, _) = t {
            path.push(0);
            let inner = go(b, path);
            path.pop();
            return inner.or_else(|| Some(path.clone()));
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i as u8);
            let r = go(c, path);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }
    go(s, &mut Vec::new())
}

/// Evaluate all substitutions, innermost first, recording every step.
pub fn eval_subst_with(s: &Term, supply: &mut NameSupply) -> SubstTrace {
    supply.reserve_all(s);
    let mut cur = s.clone();
    let mut steps = Vec::new();
    while let Some(pos) = innermost(&cur) {
        let step = step_subst_with(&cur, &pos, supply).expect("valid terms always have a rule");
        cur = step.after.clone();
        steps.push(step);
    }
    SubstTrace { start: s.clone(), steps }
}

pub fn eval_subst(s: &Term) -> Result<(Term, SubstTrace), SubstError> {
    let rep = check_sterm(s);
    if let Some(v) = rep.violations.first() {
        return Err(SubstError::Invalid(v.detail.clone()));
    }
    let tr = eval_subst_with(s, &mut NameSupply::new());
    Ok((tr.end().clone(), tr))
}

fn check_pair(m: &Term, n: &Term, x: &Name) -> Result<(), SubstError> {
    for (what, t) in [("term", m), ("replacement", n)] {
        if let Some(v) = check_linear(t).violations.first() {
            return Err(SubstError::Precondition(format!("{what} is not linear: {}", v.detail)));
        }
    }
    let fm = fv_list(m);
    if !fm.contains(x) {
        return Err(SubstError::Precondition(format!("{x} is not free in the term")));
    }
    let fnn: HashSet<Name> = fv_list(n).into_iter().collect();
    if let Some(y) = fm.iter().find(|y| *y != x && fnn.contains(*y)) {
        return Err(SubstError::Precondition(format!(
            "{y} is free in both the term and the replacement"
        )));
    }
    Ok(())
}

/// `n` with its binders renamed away from the names of `m`.
fn apart(n: &Term, m: &Term, supply: &mut NameSupply) -> Term {
    let taken = m.all_names();
    let clash = n.binder_names().iter().any(|b| taken.contains(b));
    if !clash {
        return n.clone();
    }
    rename_binders(n, &mut |b| {
        let base = b.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
        supply.fresh(if base.is_empty() { "v" } else { base })
    })
}

/// Substitution on resource terms: the normal form of `m[n/x]`, with its
/// trace.  `supply` carries names that must not be reused (for example the
/// rest of an enclosing term).
pub fn substitute_traced(
    m: &Term,
    n: &Term,
    x: &Name,
    supply: &mut NameSupply,
) -> Result<SubstTrace, SubstError> {
    check_pair(m, n, x)?;
    supply.reserve_all(m);
    let n = apart(n, m, supply);
    let s = Term::Sub(Box::new(m.clone()), Box::new(n), x.clone());
    Ok(eval_subst_with(&s, supply))
}

pub fn substitute(m: &Term, n: &Term, x: &str) -> Result<Term, SubstError> {
    let mut supply = NameSupply::avoiding([m, n]);
    substitute_traced(m, n, &crate::term::name(x), &mut supply).map(|t| t.end().clone())
}

/// Simultaneous substitution, computed sequentially in list order.
pub fn substitute_many(m: &Term, pairs: &[(Term, Name)]) -> Result<Term, SubstError> {
    let targets: Vec<&Name> = pairs.iter().map(|(_, x)| x).collect();
    let fm = fv_list(m);
    let mut seen: HashMap<Name, usize> = HashMap::new();
    for (i, (n, x)) in pairs.iter().enumerate() {
        if targets.iter().filter(|y| **y == x).count() > 1 {
            return Err(SubstError::Precondition(format!("{x} is substituted twice")));
        }
        for y in fv_list(n) {
            if let Some(j) = seen.insert(y.clone(), i) {
                if j != i {
                    return Err(SubstError::Precondition(format!(
                        "{y} is free in two replacements"
                    )));
                }
            }
            if fm.contains(&y) && !targets.contains(&&y) {
                return Err(SubstError::Precondition(format!(
                    "{y} is free in both the term and a replacement"
                )));
            }
        }
    }
    let mut supply = NameSupply::avoiding(std::iter::once(m).chain(pairs.iter().map(|(n, _)| n)));
    let mut cur = m.clone();
    for (n, x) in pairs {
        cur = substitute_traced(&cur, n, x, &mut supply)?.end().clone();
    }
    Ok(cur)
}
