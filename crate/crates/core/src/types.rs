//! Strict and intersection types, bases and their intersection.
//!
//! Concrete syntax: atoms are identifiers, `->` is right-associative, `&`
//! binds tighter than `->`, and `Top` is the empty intersection.

use crate::term::{name, Name};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A strict type: an atom, or an arrow from an intersection to a strict type.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Strict {
    Atom(Name),
    Arrow(Inter, Box<Strict>),
}

/// An intersection of strict types, kept as a sorted multiset so that the
/// derived equality is multiset equality.  The empty intersection is top.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Inter(Vec<Strict>);

impl Inter {
    pub fn top() -> Inter {
        Inter(Vec::new())
    }

    pub fn single(s: Strict) -> Inter {
        Inter(vec![s])
    }

    pub fn from_vec(mut v: Vec<Strict>) -> Inter {
        v.sort();
        Inter(v)
    }

    pub fn items(&self) -> &[Strict] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiset union.
    pub fn meet(&self, other: &Inter) -> Inter {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Inter::from_vec(v)
    }
}

impl Strict {
    pub fn atom(a: &str) -> Strict {
        Strict::Atom(name(a))
    }

    pub fn arrow(dom: Inter, cod: Strict) -> Strict {
        Strict::Arrow(dom, Box::new(cod))
    }

    /// `[d1] -> [d2] -> ... -> cod`, each domain a singleton.
    pub fn curried(doms: &[Strict], cod: Strict) -> Strict {
        doms.iter().rev().fold(cod, |acc, d| Strict::arrow(Inter::single(d.clone()), acc))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TypeEq {
    /// Intersections compare as multisets.
    #[default]
    Multiset,
    /// Intersections compare as sets.
    Idempotent,
}

impl std::str::FromStr for TypeEq {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "multiset" => Ok(TypeEq::Multiset),
            "idempotent" => Ok(TypeEq::Idempotent),
            other => Err(format!("unknown type equality '{other}'")),
        }
    }
}

fn dedup_strict(s: &Strict) -> Strict {
    match s {
        Strict::Atom(_) => s.clone(),
        Strict::Arrow(d, c) => Strict::Arrow(dedup_inter(d), Box::new(dedup_strict(c))),
    }
}

fn dedup_inter(i: &Inter) -> Inter {
    let mut v: Vec<Strict> = i.0.iter().map(dedup_strict).collect();
    v.sort();
    v.dedup();
    Inter(v)
}

pub fn type_eq(a: &Inter, b: &Inter, mode: TypeEq) -> bool {
    match mode {
        TypeEq::Multiset => a == b,
        TypeEq::Idempotent => dedup_inter(a) == dedup_inter(b),
    }
}

pub fn strict_eq(a: &Strict, b: &Strict, mode: TypeEq) -> bool {
    match mode {
        TypeEq::Multiset => a == b,
        TypeEq::Idempotent => dedup_strict(a) == dedup_strict(b),
    }
}

/// Variables to intersection types.
pub type Basis = BTreeMap<Name, Inter>;

pub fn basis_eq(a: &Basis, b: &Basis, mode: TypeEq) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|((x, s), (y, t))| x == y && type_eq(s, t, mode))
}

/// The basis with the same domain mapping every variable to top.
pub fn top_of(b: &Basis) -> Basis {
    b.keys().map(|x| (x.clone(), Inter::top())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bases have different domains")]
pub struct DomainMismatch;

/// Pointwise intersection of bases over one domain.
pub fn basis_meet(gs: &[Basis]) -> Result<Basis, DomainMismatch> {
    let Some(first) = gs.first() else {
        return Ok(Basis::new());
    };
    let mut out = first.clone();
    for g in &gs[1..] {
        if !g.keys().eq(out.keys()) {
            return Err(DomainMismatch);
        }
        for (x, t) in g {
            let cur = out.get_mut(x).unwrap();
            *cur = cur.meet(t);
        }
    }
    Ok(out)
}

pub fn render_basis(b: &Basis) -> String {
    b.iter().map(|(x, t)| format!("{x}:{t}")).collect::<Vec<_>>().join(", ")
}

fn fmt_dom_item(s: &Strict, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match s {
        Strict::Atom(_) => write!(f, "{s}"),
        Strict::Arrow(..) => write!(f, "({s})"),
    }
}

fn fmt_dom(d: &Inter, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if d.0.is_empty() {
        return write!(f, "Top");
    }
    for (i, s) in d.0.iter().enumerate() {
        if i > 0 {
            write!(f, " & ")?;
        }
        fmt_dom_item(s, f)?;
    }
    Ok(())
}

impl fmt::Display for Inter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [s] => write!(f, "{s}"),
            _ => fmt_dom(self, f),
        }
    }
}

impl fmt::Display for Strict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strict::Atom(a) => write!(f, "{a}"),
            Strict::Arrow(d, c) => {
                fmt_dom(d, f)?;
                write!(f, " -> {c}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type syntax error at {pos}: {msg}")]
pub struct TypeParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Top,
    Arrow,
    Amp,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, TypeParseError> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < cs.len() {
        let (p, c) = cs[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((p, Tok::LParen));
                i += 1
            }
            ')' => {
                out.push((p, Tok::RParen));
                i += 1
            }
            '&' | '∩' => {
                out.push((p, Tok::Amp));
                i += 1
            }
            '→' => {
                out.push((p, Tok::Arrow));
                i += 1
            }
            '⊤' => {
                out.push((p, Tok::Top));
                i += 1
            }
            '-' if cs.get(i + 1).map(|x| x.1) == Some('>') => {
                out.push((p, Tok::Arrow));
                i += 2
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < cs.len() && (cs[j].1.is_ascii_alphanumeric() || cs[j].1 == '_' || cs[j].1 == '\'') {
                    j += 1;
                }
                let word: String = cs[i..j].iter().map(|x| x.1).collect();
                out.push((p, if word == "Top" { Tok::Top } else { Tok::Ident(word) }));
                i = j
            }
            other => return Err(TypeParseError { pos: p, msg: format!("unexpected '{other}'") }),
        }
    }
    Ok(out)
}

struct TypeParser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl TypeParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, TypeParseError> {
        Err(TypeParseError { pos: self.pos(), msg: msg.into() })
    }

    /// ty := inter ('->' ty)?
    fn ty(&mut self) -> Result<Inter, TypeParseError> {
        let lhs = self.inter()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.i += 1;
            let rhs = self.ty()?;
            if rhs.len() != 1 {
                return self.err("the codomain of an arrow must be a strict type");
            }
            let cod = rhs.0.into_iter().next().unwrap();
            return Ok(Inter::single(Strict::arrow(lhs, cod)));
        }
        Ok(lhs)
    }

    fn inter(&mut self) -> Result<Inter, TypeParseError> {
        let mut acc = self.prim()?;
        while self.peek() == Some(&Tok::Amp) {
            self.i += 1;
            acc = acc.meet(&self.prim()?);
        }
        Ok(acc)
    }

    fn prim(&mut self) -> Result<Inter, TypeParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(a)) => {
                self.i += 1;
                Ok(Inter::single(Strict::atom(&a)))
            }
            Some(Tok::Top) => {
                self.i += 1;
                Ok(Inter::top())
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let t = self.ty()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.i += 1;
                Ok(t)
            }
            _ => self.err("expected a type"),
        }
    }
}

/// Parse an intersection type (a single strict type is a singleton).
pub fn parse_inter(s: &str) -> Result<Inter, TypeParseError> {
    let mut p = TypeParser { toks: lex(s)?, i: 0, end: s.len() };
    let t = p.ty()?;
    if p.i != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

pub fn parse_strict(s: &str) -> Result<Strict, TypeParseError> {
    let t = parse_inter(s)?;
    if t.len() != 1 {
        return Err(TypeParseError { pos: 0, msg: "expected a strict type, not an intersection".into() });
    }
    Ok(t.0.into_iter().next().unwrap())
}

/// Deterministic supply of atom names: `a` .. `z`, then `a1` ...
#[derive(Debug, Clone, Default)]
pub struct AtomSupply {
    next: usize,
}

impl AtomSupply {
    pub fn fresh(&mut self) -> Strict {
        let i = self.next;
        self.next += 1;
        let letter = (b'a' + (i % 26) as u8) as char;
        let round = i / 26;
        if round == 0 {
            Strict::atom(&letter.to_string())
        } else {
            Strict::atom(&format!("{letter}{round}"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(s: &str) -> Inter {
        parse_inter(s).unwrap()
    }

    #[test]
    fn equality_modes() {
        let s = i("a");
        assert!(type_eq(&s.meet(&Inter::top()), &s, TypeEq::Multiset));
        assert!(type_eq(&i("a & a"), &i("a"), TypeEq::Idempotent));
        assert!(!type_eq(&i("a & a"), &i("a"), TypeEq::Multiset));
        assert!(type_eq(&i("a & (b -> c)"), &i("(b -> c) & a"), TypeEq::Multiset));
        assert!(type_eq(&i("a & a -> b"), &i("a -> b"), TypeEq::Idempotent));
    }

    #[test]
    fn syntax_round_trip() {
        for s in ["a", "a -> b", "a & b -> c", "Top -> a", "(a -> b) -> a -> b", "a & (a -> b) -> b", "Top"] {
            let t = i(s);
            assert_eq!(t.to_string(), s);
            assert_eq!(i(&t.to_string()), t);
        }
        assert_eq!(parse_strict("a -> b -> c").unwrap(), parse_strict("a -> (b -> c)").unwrap());
        assert!(parse_strict("a & b").is_err());
        assert!(parse_strict("a -> Top").is_err());
        assert!(parse_inter("a ->").is_err());
    }

    #[test]
    fn meet_of_bases() {
        let x = name("x");
        let g: Basis = [(x.clone(), i("a"))].into();
        let d: Basis = [(x.clone(), i("b"))].into();
        assert_eq!(basis_meet(&[g.clone(), d]).unwrap()[&x], i("a & b"));
        assert_eq!(basis_meet(&[top_of(&g), g.clone()]).unwrap(), g);
        let other: Basis = [(name("y"), i("a"))].into();
        assert_eq!(basis_meet(&[g, other]), Err(DomainMismatch));
        // Top & (t -> s) & t is (t -> s) & t
        let v = i("Top").meet(&i("t -> s")).meet(&i("t"));
        assert_eq!(v, i("(t -> s) & t"));
    }

    #[test]
    fn atoms_are_deterministic() {
        let mut s = AtomSupply::default();
        let v: Vec<String> = (0..28).map(|_| s.fresh().to_string()).collect();
        assert_eq!(v[0], "a");
        assert_eq!(v[25], "z");
        assert_eq!(v[26], "a1");
    }
}
