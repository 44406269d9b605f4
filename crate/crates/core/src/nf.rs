//! Head forms and normal forms of resource terms.

use crate::equiv::{dup_run, era_run, forest};
use crate::term::{fv_set, Term};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HeadTag {
    /// `\x. N`
    Abs,
    /// `x T1 .. Tn`
    Var,
    /// `del x. N`
    Era,
    /// `(\x. N) P T1 .. Tn`
    AbsApp,
    /// `(dup x as (l,r). N) T1 .. Tn`, n >= 0
    DupApp,
    /// `(del x. N) P T1 .. Tn`
    EraApp,
}

/// Decomposition of a term into its head and application spine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadForm {
    pub tag: HeadTag,
    pub head: Term,
    pub args: Vec<Term>,
}

impl HeadForm {
    /// Spine length as counted by the shape: for `AbsApp` and `EraApp` the
    /// first argument is part of the head redex and is not counted.
    pub fn n(&self) -> usize {
        match self.tag {
            HeadTag::AbsApp | HeadTag::EraApp => self.args.len() - 1,
            _ => self.args.len(),
        }
    }

    pub fn reassemble(&self) -> Term {
        self.args
            .iter()
            .fold(self.head.clone(), |f, a| Term::App(Box::new(f), Box::new(a.clone())))
    }
}

/// Split `t` into its non-application head and the arguments it is applied to.
pub fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

pub fn classify_head_form(t: &Term) -> HeadForm {
    let (head, args) = spine(t);
    let tag = match (head, args.is_empty()) {
        (Term::Abs(..), true) => HeadTag::Abs,
        (Term::Abs(..), false) => HeadTag::AbsApp,
        (Term::Era(..), true) => HeadTag::Era,
        (Term::Era(..), false) => HeadTag::EraApp,
        (Term::Dup(..), _) => HeadTag::DupApp,
        (Term::Var(_), _) => HeadTag::Var,
        (Term::App(..), _) => unreachable!(),
        (Term::Sub(..), _) => panic!("head forms are defined on resource terms only"),
    };
    HeadForm { tag, head: head.clone(), args: args.into_iter().cloned().collect() }
}

/// Normal-form recognizer.
///
/// ```text
/// NF ::= M | E
/// E  ::= del x. M | del x. E
/// M  ::= \x. M | \x. del x. M | H M .. M
/// H  ::= x | D
/// D  ::= a duplication run over an application  H M1 .. Mk  (k >= 1)
///        whose trees each have exactly two leaves, one free in
///        H M1 .. M(k-1) and the other free in Mk
/// ```
///
/// `D` with no arguments is the duplication production of the textbook
/// grammar extended to runs; `D` applied to arguments covers stuck
/// duplications in function position.
pub fn is_normal_form(t: &Term) -> bool {
    match t {
        Term::Era(..) => {
            let (_, body) = era_run(t);
            is_m(body)
        }
        _ => is_m(t),
    }
}

fn is_m(t: &Term) -> bool {
    match t {
        Term::Abs(x, b) => match &**b {
            Term::Era(y, m) => y == x && is_m(m),
            other => is_m(other),
        },
        Term::Era(..) | Term::Sub(..) => false,
        _ => {
            let (head, args) = spine(t);
            args.iter().all(|a| is_m(a))
                && match head {
                    Term::Var(_) => true,
                    Term::Dup(..) => is_stuck_dup(head),
                    _ => false,
                }
        }
    }
}

fn is_stuck_dup(t: &Term) -> bool {
    let (ds, body) = dup_run(t);
    if !matches!(body, Term::App(..)) || !is_m(body) {
        return false;
    }
    let Term::App(p, q) = body else { unreachable!() };
    let (fp, fq) = (fv_set(p), fv_set(q));
    forest(&ds).iter().all(|tree| {
        tree.leaves.len() == 2 && {
            let (a, b) = (&tree.leaves[0], &tree.leaves[1]);
            (fp.contains(a) && fq.contains(b)) || (fp.contains(b) && fq.contains(a))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn head_forms() {
        let h = classify_head_form(&t("(\\x. x) y"));
        assert_eq!((h.tag, h.n()), (HeadTag::AbsApp, 0));
        let h = classify_head_form(&t("x y z"));
        assert_eq!(h.tag, HeadTag::Var);
        assert_eq!(h.args, vec![t("y"), t("z")]);
        let h = classify_head_form(&t("(dup x as (a,b). a b) y"));
        assert_eq!((h.tag, h.n()), (HeadTag::DupApp, 1));
        assert_eq!(classify_head_form(&t("dup x as (a,b). a b")).tag, HeadTag::DupApp);
        assert_eq!(classify_head_form(&t("(del x. y) z")).tag, HeadTag::EraApp);
        let s = t("(del x. y) z w");
        assert_eq!(classify_head_form(&s).reassemble(), s);
    }

    #[test]
    fn grammar_examples() {
        assert!(is_normal_form(&t("\\x. del x. y")));
        assert!(!is_normal_form(&t("(\\x. x) y")));
        assert!(is_normal_form(&t("dup x as (a,b). (a)(b)")));
        assert!(!is_normal_form(&t("dup x as (a,b). \\y. a b y")));
        assert!(!is_normal_form(&t("\\x. del y. x")));
        assert!(is_normal_form(&t("del y. \\x. x")));
        assert!(!is_normal_form(&t("x (del y. z)")));
    }

    #[test]
    fn extended_productions() {
        assert!(is_normal_form(&t("dup x as (a,b). dup y as (c,d). a c (b d)")));
        assert!(is_normal_form(&t("(dup a as (b,c). b c) d")));
        assert!(!is_normal_form(&t("dup x as (a,b). dup a as (c,d). c b d")));
        assert!(!is_normal_form(&t("dup x as (a,b). a b y")));
    }
}
