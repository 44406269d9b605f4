//! Type derivations: constructors that compute conclusions from premises, a
//! node-by-node checker, and the JSON encoding.

use crate::syntax::parse_sterm;
use crate::term::{fv_set, name, Name, Term};
use crate::types::{
    basis_eq, basis_meet, parse_strict, render_basis, strict_eq, top_of, type_eq, Basis, Inter, Strict, TypeEq,
};
use serde_json::{json, Value};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DRule {
    Ax,
    ArrI,
    ArrE,
    Cont,
    Thin,
    Subst,
}

impl DRule {
    pub fn id(self) -> &'static str {
        match self {
            DRule::Ax => "Ax",
            DRule::ArrI => "ArrI",
            DRule::ArrE => "ArrE",
            DRule::Cont => "Cont",
            DRule::Thin => "Thin",
            DRule::Subst => "Subst",
        }
    }

    fn from_id(s: &str) -> Option<DRule> {
        [DRule::Ax, DRule::ArrI, DRule::ArrE, DRule::Cont, DRule::Thin, DRule::Subst]
            .into_iter()
            .find(|r| r.id() == s)
    }
}

/// A derivation of `basis |- subject : ty`.  For `ArrE` and `Subst`,
/// `premises[0]` types the function (resp. the body) and the remaining
/// premises type the argument; `witness` indexes the premise that only
/// contributes its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: DRule,
    pub basis: Basis,
    pub subject: Term,
    pub ty: Strict,
    pub premises: Vec<Derivation>,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule} node at {}: {message}", path_label(.path))]
pub struct NodeError {
    /// Premise indices from the root.
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub message: String,
}

fn path_label(p: &[usize]) -> String {
    if p.is_empty() {
        "root".into()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot build {rule}: {message}")]
pub struct BuildError {
    pub rule: &'static str,
    pub message: String,
}

impl Derivation {
    pub fn judgment(&self) -> String {
        let j = format!("|- {} : {}", self.subject, self.ty);
        if self.basis.is_empty() {
            j
        } else {
            format!("{} {j}", render_basis(&self.basis))
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Argument premises other than the witness.
    pub fn main_args(&self) -> Vec<&Derivation> {
        let w = self.witness.unwrap_or(0);
        self.premises.iter().enumerate().skip(1).filter(|(i, _)| *i != w).map(|(_, d)| d).collect()
    }

    fn fmt_tree(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let mark = match self.witness {
            Some(w) => format!(" [witness {w}]"),
            None => String::new(),
        };
        writeln!(f, "{:indent$}({}) {}{mark}", "", self.rule.id(), self.judgment(), indent = depth * 2)?;
        for p in &self.premises {
            p.fmt_tree(f, depth + 1)?;
        }
        Ok(())
    }
}

/// Indented tree, one judgment per line, root first.
impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_tree(f, 0)
    }
}

/// Local schema violations of a single node, given its premises.
fn node_errors(d: &Derivation, mode: TypeEq) -> Vec<String> {
    let mut errs = Vec::new();
    let fv = fv_set(&d.subject);
    if d.basis.len() != fv.len() || !d.basis.keys().all(|x| fv.contains(x)) {
        errs.push(format!("basis domain differs from the free variables of {}", d.subject));
    }
    let arity = |n: usize, errs: &mut Vec<String>| {
        if d.premises.len() != n {
            errs.push(format!("expected {n} premise(s), found {}", d.premises.len()));
            false
        } else {
            true
        }
    };
    if !matches!(d.rule, DRule::ArrE | DRule::Subst) && d.witness.is_some() {
        errs.push("only ArrE and Subst carry a witness".into());
    }
    match (d.rule, &d.subject) {
        (DRule::Ax, Term::Var(x)) => {
            if arity(0, &mut errs) {
                let expect: Basis = [(x.clone(), Inter::single(d.ty.clone()))].into();
                if !basis_eq(&d.basis, &expect, mode) {
                    errs.push(format!("the variable must have exactly the strict type {}", d.ty));
                }
            }
        }
        (DRule::ArrI, Term::Abs(x, m)) => {
            if arity(1, &mut errs) {
                let p = &d.premises[0];
                if p.subject != **m {
                    errs.push("premise subject is not the body".into());
                }
                match p.basis.get(x) {
                    None => errs.push(format!("bound variable {x} missing from the premise basis")),
                    Some(a) => {
                        if !strict_eq(&d.ty, &Strict::arrow(a.clone(), p.ty.clone()), mode) {
                            errs.push(format!("type should be {a} -> {}", p.ty));
                        }
                        let mut rest = p.basis.clone();
                        rest.remove(x);
                        if !basis_eq(&d.basis, &rest, mode) {
                            errs.push("basis must be the premise basis without the bound variable".into());
                        }
                    }
                }
            }
        }
        (DRule::ArrE, Term::App(m, n)) | (DRule::Subst, Term::Sub(m, n, _)) => {
            if d.premises.len() < 2 {
                errs.push("needs the function premise and at least the witness premise".into());
                return errs;
            }
            match d.witness {
                Some(w) if w >= 1 && w < d.premises.len() => {}
                _ => {
                    errs.push("witness index must point at an argument premise".into());
                    return errs;
                }
            };
            let head = &d.premises[0];
            if head.subject != **m {
                errs.push("first premise subject does not match".into());
            }
            if d.premises[1..].iter().any(|p| p.subject != **n) {
                errs.push("argument premises must all type the same term".into());
            }
            let args: Vec<&Derivation> = d.premises[1..].iter().collect();
            if args.iter().any(|p| !p.basis.keys().eq(args[0].basis.keys())) {
                errs.push("argument bases have different domains".into());
                return errs;
            }
            let mains: Vec<Strict> = d.main_args().iter().map(|p| p.ty.clone()).collect();
            let mains = Inter::from_vec(mains);
            let (dom, gamma) = if d.rule == DRule::ArrE {
                match &head.ty {
                    Strict::Arrow(dom, cod) => {
                        if !strict_eq(cod, &d.ty, mode) {
                            errs.push(format!("type should be the codomain {cod}"));
                        }
                        (dom.clone(), head.basis.clone())
                    }
                    Strict::Atom(_) => {
                        errs.push("function premise must have an arrow type".into());
                        return errs;
                    }
                }
            } else {
                let Term::Sub(_, _, x) = &d.subject else { unreachable!() };
                if !strict_eq(&head.ty, &d.ty, mode) {
                    errs.push("type must equal the body type".into());
                }
                let mut g = head.basis.clone();
                match g.remove(x) {
                    Some(dom) => (dom, g),
                    None => {
                        errs.push(format!("target {x} missing from the body basis"));
                        return errs;
                    }
                }
            };
            if !type_eq(&mains, &dom, mode) {
                errs.push(format!("argument types {mains} do not match the domain {dom}"));
            }
            if gamma.keys().any(|x| args[0].basis.contains_key(x)) {
                errs.push("function and argument bases overlap".into());
            }
            let mut parts = vec![top_of(&args[0].basis)];
            parts.extend(d.main_args().iter().map(|p| p.basis.clone()));
            let mut expect = basis_meet(&parts).expect("domains checked");
            expect.extend(gamma);
            if !basis_eq(&d.basis, &expect, mode) {
                errs.push(format!("basis should be {}", render_basis(&expect)));
            }
        }
        (DRule::Cont, Term::Dup(z, x, y, m)) => {
            if arity(1, &mut errs) {
                let p = &d.premises[0];
                if p.subject != **m {
                    errs.push("premise subject is not the body".into());
                }
                match (p.basis.get(x), p.basis.get(y)) {
                    (Some(a), Some(b)) if x != y => {
                        let mut expect = p.basis.clone();
                        expect.remove(x);
                        expect.remove(y);
                        if expect.contains_key(z) {
                            errs.push(format!("{z} already occurs in the premise"));
                        }
                        expect.insert(z.clone(), a.meet(b));
                        if !basis_eq(&d.basis, &expect, mode) {
                            errs.push(format!("basis should be {}", render_basis(&expect)));
                        }
                    }
                    _ => errs.push(format!("{x} and {y} must both be in the premise basis")),
                }
                if !strict_eq(&p.ty, &d.ty, mode) {
                    errs.push("type must equal the premise type".into());
                }
            }
        }
        (DRule::Thin, Term::Era(x, m)) => {
            if arity(1, &mut errs) {
                let p = &d.premises[0];
                if p.subject != **m {
                    errs.push("premise subject is not the body".into());
                }
                if p.basis.contains_key(x) {
                    errs.push(format!("{x} already occurs in the premise"));
                }
                let mut expect = p.basis.clone();
                expect.insert(x.clone(), Inter::top());
                if !basis_eq(&d.basis, &expect, mode) {
                    errs.push(format!("basis should be {}", render_basis(&expect)));
                }
                if !strict_eq(&p.ty, &d.ty, mode) {
                    errs.push("type must equal the premise type".into());
                }
            }
        }
        (r, t) => errs.push(format!("rule {} does not apply to {t}", r.id())),
    }
    errs
}

fn check_into(d: &Derivation, mode: TypeEq, path: &mut Vec<usize>, out: &mut Vec<NodeError>) {
    for m in node_errors(d, mode) {
        out.push(NodeError { path: path.clone(), rule: d.rule.id(), message: m });
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_into(p, mode, path, out);
        path.pop();
    }
}

/// Validate every node of `d`.
pub fn check_derivation(d: &Derivation, mode: TypeEq) -> Result<(), Vec<NodeError>> {
    let mut out = Vec::new();
    check_into(d, mode, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub fn is_valid(d: &Derivation) -> bool {
    check_derivation(d, TypeEq::Multiset).is_ok()
}

fn finish(d: Derivation) -> Result<Derivation, BuildError> {
    let errs = node_errors(&d, TypeEq::Multiset);
    match errs.into_iter().next() {
        None => Ok(d),
        Some(message) => Err(BuildError { rule: d.rule.id(), message }),
    }
}

fn berr(rule: &'static str, message: impl Into<String>) -> BuildError {
    BuildError { rule, message: message.into() }
}

pub fn ax(x: &Name, ty: Strict) -> Derivation {
    Derivation {
        rule: DRule::Ax,
        basis: [(x.clone(), Inter::single(ty.clone()))].into(),
        subject: Term::Var(x.clone()),
        ty,
        premises: Vec::new(),
        witness: None,
    }
}

pub fn arr_i(x: &Name, body: Derivation) -> Result<Derivation, BuildError> {
    let mut basis = body.basis.clone();
    let a = basis.remove(x).ok_or_else(|| berr("ArrI", format!("{x} is not in the body basis")))?;
    finish(Derivation {
        rule: DRule::ArrI,
        basis,
        subject: Term::Abs(x.clone(), Box::new(body.subject.clone())),
        ty: Strict::arrow(a, body.ty.clone()),
        premises: vec![body],
        witness: None,
    })
}

fn args_basis(rule: &'static str, args: &[Derivation], witness: usize) -> Result<Basis, BuildError> {
    let mut parts = vec![top_of(&args[witness].basis)];
    parts.extend(args.iter().enumerate().filter(|(i, _)| *i != witness).map(|(_, d)| d.basis.clone()));
    basis_meet(&parts).map_err(|_| berr(rule, "argument bases have different domains"))
}

/// `args[witness]` is the witness premise.
pub fn arr_e(fun: Derivation, args: Vec<Derivation>, witness: usize) -> Result<Derivation, BuildError> {
    if witness >= args.len() {
        return Err(berr("ArrE", "witness out of range"));
    }
    let Strict::Arrow(_, cod) = &fun.ty else {
        return Err(berr("ArrE", "function type is not an arrow"));
    };
    let mut basis = args_basis("ArrE", &args, witness)?;
    basis.extend(fun.basis.clone());
    let ty = (**cod).clone();
    let subject = Term::App(Box::new(fun.subject.clone()), Box::new(args[0].subject.clone()));
    let mut premises = vec![fun];
    premises.extend(args);
    finish(Derivation { rule: DRule::ArrE, basis, subject, ty, premises, witness: Some(witness + 1) })
}

/// `args[witness]` is the witness premise.
pub fn subst(body: Derivation, x: &Name, args: Vec<Derivation>, witness: usize) -> Result<Derivation, BuildError> {
    if witness >= args.len() {
        return Err(berr("Subst", "witness out of range"));
    }
    let mut basis = args_basis("Subst", &args, witness)?;
    let mut gamma = body.basis.clone();
    gamma.remove(x);
    basis.extend(gamma);
    let subject = Term::Sub(Box::new(body.subject.clone()), Box::new(args[0].subject.clone()), x.clone());
    let ty = body.ty.clone();
    let mut premises = vec![body];
    premises.extend(args);
    finish(Derivation { rule: DRule::Subst, basis, subject, ty, premises, witness: Some(witness + 1) })
}

pub fn cont(z: &Name, x: &Name, y: &Name, body: Derivation) -> Result<Derivation, BuildError> {
    let mut basis = body.basis.clone();
    let a = basis.remove(x).ok_or_else(|| berr("Cont", format!("{x} is not in the body basis")))?;
    let b = basis.remove(y).ok_or_else(|| berr("Cont", format!("{y} is not in the body basis")))?;
    basis.insert(z.clone(), a.meet(&b));
    finish(Derivation {
        rule: DRule::Cont,
        basis,
        subject: Term::Dup(z.clone(), x.clone(), y.clone(), Box::new(body.subject.clone())),
        ty: body.ty.clone(),
        premises: vec![body],
        witness: None,
    })
}

pub fn thin(x: &Name, body: Derivation) -> Result<Derivation, BuildError> {
    let mut basis = body.basis.clone();
    basis.insert(x.clone(), Inter::top());
    finish(Derivation {
        rule: DRule::Thin,
        basis,
        subject: Term::Era(x.clone(), Box::new(body.subject.clone())),
        ty: body.ty.clone(),
        premises: vec![body],
        witness: None,
    })
}

/// Rebuild a node of the same rule and binders as `like` over new premises.
pub fn rebuild_like(like: &Derivation, mut premises: Vec<Derivation>) -> Result<Derivation, BuildError> {
    let w = like.witness.map(|w| w - 1).unwrap_or(0);
    match (&like.subject, like.rule) {
        (Term::Var(x), DRule::Ax) => Ok(ax(x, like.ty.clone())),
        (Term::Abs(x, _), DRule::ArrI) => arr_i(x, premises.remove(0)),
        (Term::App(..), DRule::ArrE) => {
            let f = premises.remove(0);
            arr_e(f, premises, w)
        }
        (Term::Sub(_, _, x), DRule::Subst) => {
            let b = premises.remove(0);
            subst(b, x, premises, w)
        }
        (Term::Dup(z, x, y, _), DRule::Cont) => cont(z, x, y, premises.remove(0)),
        (Term::Era(x, _), DRule::Thin) => thin(x, premises.remove(0)),
        (_, r) => Err(berr(r.id(), "node does not match its subject")),
    }
}

fn strict_json(s: &Strict) -> Value {
    match s {
        Strict::Atom(a) => Value::String(a.to_string()),
        Strict::Arrow(d, c) => json!({"dom": d.items().iter().map(strict_json).collect::<Vec<_>>(), "cod": strict_json(c)}),
    }
}

/// JSON node: `{rule, ctx:[{var,type}], term, type, witness_index?, premises}`.
pub fn to_json(d: &Derivation) -> Value {
    let ctx: Vec<Value> = d
        .basis
        .iter()
        .map(|(x, t)| json!({"var": x.to_string(), "type": t.items().iter().map(strict_json).collect::<Vec<_>>()}))
        .collect();
    let mut node = serde_json::Map::new();
    node.insert("rule".into(), json!(d.rule.id()));
    node.insert("ctx".into(), Value::Array(ctx));
    node.insert("term".into(), json!(d.subject.to_string()));
    node.insert("type".into(), strict_json(&d.ty));
    if let Some(w) = d.witness {
        node.insert("witness_index".into(), json!(w));
    }
    node.insert("premises".into(), Value::Array(d.premises.iter().map(to_json).collect()));
    Value::Object(node)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("derivation JSON: {0}")]
pub struct JsonError(pub String);

fn strict_from(v: &Value) -> Result<Strict, JsonError> {
    match v {
        Value::String(s) => {
            if s.contains("->") || s.contains('&') {
                parse_strict(s).map_err(|e| JsonError(e.to_string()))
            } else {
                Ok(Strict::atom(s))
            }
        }
        Value::Object(o) => {
            let dom = o.get("dom").and_then(Value::as_array).ok_or_else(|| JsonError("arrow needs dom".into()))?;
            let cod = o.get("cod").ok_or_else(|| JsonError("arrow needs cod".into()))?;
            let dom = dom.iter().map(strict_from).collect::<Result<Vec<_>, _>>()?;
            Ok(Strict::arrow(Inter::from_vec(dom), strict_from(cod)?))
        }
        other => Err(JsonError(format!("bad type {other}"))),
    }
}

/// Decode a derivation.  Only the shape is checked here; validity is the
/// business of [`check_derivation`].
pub fn from_json(v: &Value) -> Result<Derivation, JsonError> {
    let o = v.as_object().ok_or_else(|| JsonError("node must be an object".into()))?;
    let field = |k: &str| o.get(k).ok_or_else(|| JsonError(format!("missing field '{k}'")));
    let rule = field("rule")?.as_str().and_then(DRule::from_id).ok_or_else(|| JsonError("unknown rule".into()))?;
    let term = field("term")?.as_str().ok_or_else(|| JsonError("term must be a string".into()))?;
    let subject = parse_sterm(term).map_err(|e| JsonError(format!("term '{term}': {e}")))?;
    let mut basis = Basis::new();
    for entry in field("ctx")?.as_array().ok_or_else(|| JsonError("ctx must be a list".into()))? {
        let x = entry.get("var").and_then(Value::as_str).ok_or_else(|| JsonError("ctx entry needs var".into()))?;
        let ty = match entry.get("type") {
            Some(Value::Array(items)) => Inter::from_vec(items.iter().map(strict_from).collect::<Result<_, _>>()?),
            Some(other) => Inter::single(strict_from(other)?),
            None => return Err(JsonError("ctx entry needs type".into())),
        };
        if basis.insert(name(x), ty).is_some() {
            return Err(JsonError(format!("variable {x} listed twice")));
        }
    }
    let ty = strict_from(field("type")?)?;
    let witness = match o.get("witness_index") {
        Some(w) => Some(w.as_u64().ok_or_else(|| JsonError("witness_index must be a number".into()))? as usize),
        None => None,
    };
    let premises = match o.get("premises") {
        Some(Value::Array(ps)) => ps.iter().map(from_json).collect::<Result<_, _>>()?,
        None => Vec::new(),
        Some(_) => return Err(JsonError("premises must be a list".into())),
    };
    Ok(Derivation { rule, basis, subject, ty, premises, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::types::parse_inter;

    fn n(s: &str) -> Name {
        name(s)
    }

    fn st(s: &str) -> Strict {
        parse_strict(s).unwrap()
    }

    /// z:Top, y:s |- (\x. del x. y) z : s
    fn example_one() -> Derivation {
        let body = thin(&n("x"), ax(&n("y"), st("s"))).unwrap();
        let f = arr_i(&n("x"), body).unwrap();
        arr_e(f, vec![ax(&n("z"), st("t"))], 0).unwrap()
    }

    #[test]
    fn example_one_validates() {
        let d = example_one();
        assert!(is_valid(&d));
        assert_eq!(d.subject, parse_term("(\\x. del x. y) z").unwrap());
        assert_eq!(d.basis[&n("z")], Inter::top());
        assert_eq!(d.ty, st("s"));
        assert_eq!(d.premises[0].ty, st("Top -> s"));
    }

    #[test]
    fn example_two_validates() {
        // |- \x. dup x as (y,z). y z : (t -> s) & t -> s, applied to v twice
        let yz = arr_e(ax(&n("y"), st("t -> s")), vec![ax(&n("z"), st("t")), ax(&n("z"), st("t"))], 0).unwrap();
        let f = arr_i(&n("x"), cont(&n("x"), &n("y"), &n("z"), yz).unwrap()).unwrap();
        let d = arr_e(f, vec![ax(&n("v"), st("t")), ax(&n("v"), st("t")), ax(&n("v"), st("t -> s"))], 0).unwrap();
        assert!(is_valid(&d));
        assert_eq!(d.basis[&n("v")], parse_inter("(t -> s) & t").unwrap());
    }

    #[test]
    fn schema_violations() {
        let mut d = ax(&n("x"), st("a"));
        d.basis.insert(n("x"), parse_inter("a & b").unwrap());
        assert!(check_derivation(&d, TypeEq::Multiset).is_err());
        let mut e = example_one();
        e.premises.truncate(1);
        e.witness = None;
        assert!(check_derivation(&e, TypeEq::Multiset).is_err());
        let mut wrong = example_one();
        wrong.basis.insert(n("z"), parse_inter("t").unwrap());
        let errs = check_derivation(&wrong, TypeEq::Multiset).unwrap_err();
        assert_eq!(errs[0].path, Vec::<usize>::new());
    }

    #[test]
    fn rebuild_inverts_destructuring() {
        let d = example_one();
        fn walk(d: &Derivation) {
            assert_eq!(&rebuild_like(d, d.premises.clone()).unwrap(), d);
            d.premises.iter().for_each(walk);
        }
        walk(&d);
    }

    #[test]
    fn json_round_trip() {
        let d = example_one();
        let v = to_json(&d);
        assert_eq!(v["rule"], "ArrE");
        assert_eq!(v["witness_index"], 1);
        assert_eq!(v["premises"][0]["type"], json!({"dom": [], "cod": "s"}));
        assert_eq!(from_json(&v).unwrap(), d);
    }
}
