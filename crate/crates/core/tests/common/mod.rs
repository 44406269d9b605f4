//! Shared enumerators and independent checkers for the integration suites.
#![allow(dead_code)]

use rcl::alpha::freshen;
use rcl::term::{name, Name, Term};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

pub mod checks;

/// Every plain lambda term of exactly `size` nodes whose free variables are
/// drawn from `free`, passed to `f` one at a time.  Bound variables are named
/// by binding depth, so inner binders never shadow outer ones.
pub fn for_each_plain(size: usize, free: &[Name], f: &mut dyn FnMut(&Term)) {
    fn go(size: usize, scope: &mut Vec<Name>, f: &mut dyn FnMut(&Term)) {
        if size == 1 {
            for x in scope.iter() {
                f(&Term::Var(x.clone()));
            }
            return;
        }
        let x = name(&format!("x{}", scope.len()));
        scope.push(x.clone());
        go(size - 1, scope, &mut |b| f(&Term::Abs(x.clone(), Box::new(b.clone()))));
        scope.pop();
        for left in 1..size - 1 {
            let right = size - 1 - left;
            let mut snapshot = scope.clone();
            go(left, scope, &mut |l| {
                go(right, &mut snapshot, &mut |r| f(&Term::App(Box::new(l.clone()), Box::new(r.clone()))));
            });
        }
    }
    let mut scope = free.to_vec();
    go(size, &mut scope, f);
}

type Memo = HashMap<(usize, usize, bool), Rc<Vec<Term>>>;

fn slot(i: usize) -> Name {
    name(&format!("s{i}"))
}

fn bound(i: usize) -> Name {
    name(&format!("x{i}"))
}

/// Instantiate the memoised terms over `names.len()` slots: slot `i` becomes
/// `names[i]`, binders shift past the bound names already in `names`.
fn inst(size: usize, names: &[Name], subs: bool, memo: &mut Memo) -> Vec<Term> {
    let depth = names
        .iter()
        .filter_map(|n| n.strip_prefix('x').map(|i| i.parse::<usize>().unwrap() + 1))
        .max()
        .unwrap_or(0);
    linear(size, names.len(), subs, memo)
        .iter()
        .map(|t| {
            t.rename_all(&|n: &Name| match n.strip_prefix('s') {
                Some(i) => names[i.parse::<usize>().unwrap()].clone(),
                None => bound(n[1..].parse::<usize>().unwrap() + depth),
            })
        })
        .collect()
}

/// `slots` with `extra` inserted at the given positions (ascending).
fn with_inserted(slots: &[Name], extra: &[(usize, Name)]) -> Vec<Name> {
    let mut out = slots.to_vec();
    for (i, x) in extra {
        out.insert(*i, x.clone());
    }
    out
}

/// Linear terms of exactly `size` nodes whose free-variable list is exactly
/// `s0, .., s(k-1)`; each term up to renaming of free variables appears once.
/// Binders are `x0, x1, ...` by depth.  With `subs`, explicit substitutions
/// may appear (never inside a replacement).
fn linear(size: usize, k: usize, subs: bool, memo: &mut Memo) -> Rc<Vec<Term>> {
    if let Some(v) = memo.get(&(size, k, subs)) {
        return v.clone();
    }
    let mut out = Vec::new();
    let ctx: Vec<Name> = (0..k).map(slot).collect();
    if size == 1 {
        if k == 1 {
            out.push(Term::Var(slot(0)));
        }
    } else if size > k.saturating_sub(1) {
        for i in 0..=k {
            let names = with_inserted(&ctx, &[(i, bound(0))]);
            for body in inst(size - 1, &names, subs, memo) {
                out.push(Term::Abs(bound(0), Box::new(body)));
            }
        }
        if k >= 1 {
            for body in inst(size - 1, &ctx[1..], subs, memo) {
                out.push(Term::Era(slot(0), Box::new(body)));
            }
            for i in 0..=k {
                for j in 0..=k {
                    if i == j {
                        continue;
                    }
                    let mut names: Vec<Option<Name>> = vec![None; k + 1];
                    names[i] = Some(bound(0));
                    names[j] = Some(bound(1));
                    let mut rest = ctx[1..].iter();
                    let names: Vec<Name> =
                        names.into_iter().map(|n| n.unwrap_or_else(|| rest.next().unwrap().clone())).collect();
                    for body in inst(size - 1, &names, subs, memo) {
                        out.push(Term::Dup(slot(0), bound(0), bound(1), Box::new(body)));
                    }
                }
            }
        }
        for p in 0..=k {
            for n1 in 1..size - 1 {
                let n2 = size - 1 - n1;
                let fs = inst(n1, &ctx[..p], subs, memo);
                if !fs.is_empty() {
                    let as_ = inst(n2, &ctx[p..], subs, memo);
                    for f in &fs {
                        for a in &as_ {
                            out.push(Term::App(Box::new(f.clone()), Box::new(a.clone())));
                        }
                    }
                }
                if subs {
                    let repls = inst(n2, &ctx[p..], false, memo);
                    if repls.is_empty() {
                        continue;
                    }
                    for i in 0..=p {
                        let names = with_inserted(&ctx[..p], &[(i, bound(0))]);
                        for m in inst(n1, &names, subs, memo) {
                            for n in &repls {
                                out.push(Term::Sub(Box::new(m.clone()), Box::new(n.clone()), bound(0)));
                            }
                        }
                    }
                }
            }
        }
    }
    let out = Rc::new(out);
    memo.insert((size, k, subs), out.clone());
    out
}

fn free_names(k: usize) -> Vec<Name> {
    ["a", "b", "c", "d", "e", "f", "g", "h", "i"][..k].iter().map(|s| name(s)).collect()
}

fn closed_world(max_size: usize, subs: bool) -> Vec<Term> {
    let mut out = Vec::new();
    let mut memo = Memo::new();
    for size in 1..=max_size {
        for k in 0..=size {
            let ctx = free_names(k);
            for t in linear(size, k, subs, &mut memo).iter() {
                let t = t.rename_all(&|n: &Name| match n.strip_prefix('s') {
                    Some(i) => ctx[i.parse::<usize>().unwrap()].clone(),
                    None => n.clone(),
                });
                out.push(freshen(&t));
            }
        }
    }
    out
}

/// All well-formed resource terms up to `max_size` nodes, free variables
/// named `a, b, ...` in order of first occurrence, binders pairwise distinct.
pub fn wellformed_terms(max_size: usize) -> Vec<Term> {
    closed_world(max_size, false)
}

/// As [`wellformed_terms`], with explicit substitutions, containing at least
/// one substitution.
pub fn sterms(max_size: usize) -> Vec<Term> {
    closed_world(max_size, true).into_iter().filter(|t| !t.is_substitution_free()).collect()
}

/// Every raw term (no substitutions) up to `max_size` over `names`, ignoring
/// all side conditions.
pub fn raw_terms(max_size: usize, names: &[Name]) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(), names.iter().map(|x| Term::Var(x.clone())).collect()];
    for size in 2..=max_size {
        let mut cur = Vec::new();
        for b in &by_size[size - 1] {
            for x in names {
                cur.push(Term::Abs(x.clone(), Box::new(b.clone())));
                cur.push(Term::Era(x.clone(), Box::new(b.clone())));
                for l in names {
                    for r in names {
                        cur.push(Term::Dup(x.clone(), l.clone(), r.clone(), Box::new(b.clone())));
                    }
                }
            }
        }
        for n1 in 1..size - 1 {
            for f in &by_size[n1] {
                for a in &by_size[size - 1 - n1] {
                    cur.push(Term::App(Box::new(f.clone()), Box::new(a.clone())));
                }
            }
        }
        by_size.push(cur);
    }
    by_size.concat()
}

/// Independent formation checker: returns the free-variable set when a
/// derivation exists, following the rules literally on sets.
pub fn derivable(t: &Term) -> Option<HashSet<Name>> {
    match t {
        Term::Var(x) => Some(HashSet::from([x.clone()])),
        Term::Abs(x, b) => {
            let mut g = derivable(b)?;
            g.remove(x).then_some(g)
        }
        Term::App(f, a) => {
            let g = derivable(f)?;
            let d = derivable(a)?;
            g.is_disjoint(&d).then(|| g.union(&d).cloned().collect())
        }
        Term::Era(x, b) => {
            let mut g = derivable(b)?;
            g.insert(x.clone()).then_some(g)
        }
        Term::Dup(x, l, r, b) => {
            let mut g = derivable(b)?;
            if l == r || !g.remove(l) || !g.remove(r) {
                return None;
            }
            g.insert(x.clone()).then_some(g)
        }
        Term::Sub(..) => None,
    }
}

/// The Omega combinator's image.
pub fn omega() -> Term {
    rcl::to_resource(&rcl::parse_plain("(\\x. x x) (\\x. x x)").unwrap())
}
