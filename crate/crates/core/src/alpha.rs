//! Alpha-equivalence and binder renaming.

use crate::term::{fv_list, Name, NameSupply, Term};
use std::collections::HashSet;

fn lookup(env: &[(Name, usize)], x: &Name) -> Option<usize> {
    env.iter().rev().find(|(y, _)| y == x).map(|(_, i)| *i)
}

struct AlphaEq {
    left: Vec<(Name, usize)>,
    right: Vec<(Name, usize)>,
    next: usize,
}

impl AlphaEq {
    fn same_ref(&self, a: &Name, b: &Name) -> bool {
        match (lookup(&self.left, a), lookup(&self.right, b)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }

    fn bind(&mut self, a: &Name, b: &Name) {
        self.left.push((a.clone(), self.next));
        self.right.push((b.clone(), self.next));
        self.next += 1;
    }

    fn unbind(&mut self, k: usize) {
        for _ in 0..k {
            self.left.pop();
            self.right.pop();
        }
    }

    fn eq(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => self.same_ref(x, y),
            (Term::Abs(x, m), Term::Abs(y, n)) => {
                self.bind(x, y);
                let r = self.eq(m, n);
                self.unbind(1);
                r
            }
            (Term::App(f, a1), Term::App(g, a2)) => self.eq(f, g) && self.eq(a1, a2),
            (Term::Era(x, m), Term::Era(y, n)) => self.same_ref(x, y) && self.eq(m, n),
            (Term::Dup(x, l1, r1, m), Term::Dup(y, l2, r2, n)) => {
                if !self.same_ref(x, y) {
                    return false;
                }
                self.bind(l1, l2);
                self.bind(r1, r2);
                let r = self.eq(m, n);
                self.unbind(2);
                r
            }
            (Term::Sub(m1, n1, x), Term::Sub(m2, n2, y)) => {
                if !self.eq(n1, n2) {
                    return false;
                }
                self.bind(x, y);
                let r = self.eq(m1, m2);
                self.unbind(1);
                r
            }
            _ => false,
        }
    }
}

/// Equality up to consistent renaming of bound names.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    AlphaEq { left: Vec::new(), right: Vec::new(), next: 0 }.eq(a, b)
}

/// Rename every binder through `choose`, keeping references consistent.
pub fn rename_binders(t: &Term, choose: &mut dyn FnMut(&Name) -> Name) -> Term {
    fn go(t: &Term, env: &mut Vec<(Name, Name)>, choose: &mut dyn FnMut(&Name) -> Name) -> Term {
        let r = |env: &Vec<(Name, Name)>, x: &Name| {
            env.iter().rev().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or_else(|| x.clone())
        };
        match t {
            Term::Var(x) => Term::Var(r(env, x)),
            Term::Abs(x, b) => {
                let nx = choose(x);
                env.push((x.clone(), nx.clone()));
                let body = go(b, env, choose);
                env.pop();
                Term::Abs(nx, Box::new(body))
            }
            Term::App(f, a) => {
                let f = go(f, env, choose);
                let a = go(a, env, choose);
                Term::App(Box::new(f), Box::new(a))
            }
            Term::Era(x, b) => Term::Era(r(env, x), Box::new(go(b, env, choose))),
            Term::Dup(x, l, rr, b) => {
                let nx = r(env, x);
                let nl = choose(l);
                let nr = choose(rr);
                env.push((l.clone(), nl.clone()));
                env.push((rr.clone(), nr.clone()));
                let body = go(b, env, choose);
                env.pop();
                env.pop();
                Term::Dup(nx, nl, nr, Box::new(body))
            }
            Term::Sub(b, n, x) => {
                let nx = choose(x);
                env.push((x.clone(), nx.clone()));
                let body = go(b, env, choose);
                env.pop();
                let repl = go(n, env, choose);
                Term::Sub(Box::new(body), Box::new(repl), nx)
            }
        }
    }
    go(t, &mut Vec::new(), choose)
}

/// Canonical binder names `b1`, `b2`, ... in preorder, skipping free names.
pub fn alpha_normalize(t: &Term) -> Term {
    let mut supply = NameSupply::new();
    for x in fv_list(t) {
        supply.reserve(&x);
    }
    rename_binders(t, &mut |_| supply.fresh("b"))
}

/// Rename binders apart: afterwards no binder name repeats and none clashes
/// with a free name.  Binders that already satisfy this keep their names.
pub fn freshen(t: &Term) -> Term {
    let free: HashSet<Name> = fv_list(t).into_iter().collect();
    let mut seen: HashSet<Name> = HashSet::new();
    let mut supply: Option<NameSupply> = None;
    rename_binders(t, &mut |x| {
        if !free.contains(x) && seen.insert(x.clone()) {
            x.clone()
        } else {
            let base = x.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
            let base = if base.is_empty() { "v" } else { base };
            supply.get_or_insert_with(|| NameSupply::avoiding([t])).fresh(base)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{check_barendregt, parse_plain, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn renamed_identity() {
        assert!(alpha_eq(&t("\\x. x"), &t("\\y. y")));
        assert!(!alpha_eq(&t("\\x. x"), &t("\\x. del y. x")));
        assert!(alpha_eq(&t("dup x as (a,b). a b"), &t("dup x as (u,v). u v")));
        assert!(!alpha_eq(&t("dup x as (a,b). a b"), &t("dup x as (u,v). v u")));
        assert!(!alpha_eq(&t("\\x. y"), &t("\\y. y")));
    }

    #[test]
    fn free_names_matter() {
        assert!(!alpha_eq(&t("del x. y"), &t("del z. y")));
    }

    #[test]
    fn normalize_is_alpha_invariant() {
        let a = alpha_normalize(&t("\\p. dup p as (q,r). q r b1"));
        let b = alpha_normalize(&t("\\u. dup u as (v,w). v w b1"));
        assert_eq!(a, b);
        assert!(check_barendregt(&a).is_ok());
    }

    #[test]
    fn freshen_separates_shadowed_binders() {
        let p = parse_plain("(\\x. x) (\\x. \\x. x) x").unwrap();
        let f = freshen(&p);
        assert!(check_barendregt(&f).is_ok());
        assert!(alpha_eq(&p, &f));
    }
}
