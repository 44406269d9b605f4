//! Translation between ordinary lambda terms and resource terms.
//!
//! Plain terms reuse [`Term`] restricted to `Var`, `Abs` and `App`.

use crate::alpha::freshen;
use crate::term::{fv_list, Name, NameSupply, Term};

/// Free variables of a plain term in first-occurrence order, borrowed.
fn first_occurrences(t: &Term) -> Vec<&Name> {
    fn go<'a>(t: &'a Term, out: &mut Vec<&'a Name>) {
        match t {
            Term::Var(x) => {
                if !out.contains(&x) {
                    out.push(x)
                }
            }
            Term::Abs(x, b) => {
                let start = out.len();
                go(b, out);
                if let Some(i) = out[start..].iter().position(|y| *y == x) {
                    out.remove(start + i);
                }
            }
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

/// Embed a plain term: vacuous abstractions get an erasure, and a variable
/// shared by both sides of an application is duplicated, renamed apart and
/// the application translated again.  Shared variables are handled in
/// free-variable list order.
pub fn to_resource(t: &Term) -> Term {
    let fresh;
    let t = if binders_apart(t) {
        t
    } else {
        fresh = freshen(t);
        &fresh
    };
    embed(t, &mut LazySupply { term: t, supply: None })
}

/// Binders pairwise distinct and distinct from every free name.
fn binders_apart(t: &Term) -> bool {
    fn go<'a>(t: &'a Term, bound: &mut Vec<&'a Name>, seen: &mut Vec<&'a Name>) -> bool {
        match t {
            Term::Var(x) => !seen.contains(&x) || bound.contains(&x),
            Term::Abs(x, b) => {
                if seen.contains(&x) {
                    return false;
                }
                seen.push(x);
                bound.push(x);
                let ok = go(b, bound, seen);
                bound.pop();
                ok
            }
            Term::App(f, a) => go(f, bound, seen) && go(a, bound, seen),
            _ => false,
        }
    }
    // free names must not reuse a binder name anywhere, so check after the walk too
    let mut seen = Vec::new();
    go(t, &mut Vec::new(), &mut seen) && fv_list(t).iter().all(|x| !seen.contains(&x))
}

/// Name supply built on first use; most embeddings never need one.
struct LazySupply<'a> {
    term: &'a Term,
    supply: Option<NameSupply>,
}

impl LazySupply<'_> {
    fn fresh(&mut self, base: &str) -> Name {
        let term = self.term;
        self.supply.get_or_insert_with(|| NameSupply::avoiding([term])).fresh(base)
    }
}

fn embed(t: &Term, supply: &mut LazySupply<'_>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Abs(x, b) => {
            let body = embed(b, supply);
            if first_occurrences(b).contains(&x) {
                Term::Abs(x.clone(), Box::new(body))
            } else {
                Term::Abs(x.clone(), Box::new(Term::Era(x.clone(), Box::new(body))))
            }
        }
        Term::App(f, a) => {
            let right = first_occurrences(a);
            let shared = first_occurrences(f).into_iter().find(|x| right.contains(x)).cloned();
            match shared {
                None => Term::App(Box::new(embed(f, supply)), Box::new(embed(a, supply))),
                Some(x) => {
                    let x1 = supply.fresh(&x);
                    let x2 = supply.fresh(&x);
                    let renamed = Term::App(
                        Box::new(f.rename_free(&x, &x1)),
                        Box::new(a.rename_free(&x, &x2)),
                    );
                    Term::Dup(x, x1, x2, Box::new(embed(&renamed, supply)))
                }
            }
        }
        Term::Era(..) | Term::Dup(..) | Term::Sub(..) => {
            panic!("to_resource expects a plain lambda term")
        }
    }
}

/// Forget resource operators: erasures vanish and both split names of a
/// duplication are renamed back to the source.
pub fn to_plain(m: &Term) -> Term {
    match m {
        Term::Var(_) => m.clone(),
        Term::Abs(x, b) => Term::Abs(x.clone(), Box::new(to_plain(b))),
        Term::App(f, a) => Term::App(Box::new(to_plain(f)), Box::new(to_plain(a))),
        Term::Era(_, b) => to_plain(b),
        Term::Dup(x, l, r, b) => to_plain(b).rename_free(l, x).rename_free(r, x),
        Term::Sub(..) => panic!("to_plain expects a resource term"),
    }
}

pub fn is_plain(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Abs(_, b) => is_plain(b),
        Term::App(f, a) => is_plain(f) && is_plain(a),
        _ => false,
    }
}
