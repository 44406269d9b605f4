//! Linearity: the formation judgment for resource terms and its extension to
//! explicit substitutions.

use crate::term::{fv_list, path_string, Name, Path, Term};
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(serialize_with = "ser_path")]
    pub position: Path,
    pub rule: &'static str,
    pub variable: String,
    pub detail: String,
}

fn ser_path<S: serde::Serializer>(p: &Path, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&path_string(p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearityReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("ill-formed at {}: {} ({})", path_string(&.0.position), .0.detail, .0.rule)]
    Violation(Violation),
}

impl From<Violation> for WellFormedError {
    fn from(v: Violation) -> Self {
        WellFormedError::Violation(v)
    }
}

struct Checker {
    allow_sub: bool,
    out: Vec<Violation>,
}

impl Checker {
    fn flag(&mut self, path: &[u8], rule: &'static str, x: &Name, detail: String) {
        self.out.push(Violation {
            position: path.to_vec(),
            rule,
            variable: x.to_string(),
            detail,
        });
    }

    /// Returns the free-variable list of `t` so parents need not recompute it.
    fn walk(&mut self, t: &Term, path: &mut Vec<u8>) -> Vec<Name> {
        match t {
            Term::Var(x) => vec![x.clone()],
            Term::Abs(x, b) => {
                path.push(0);
                let mut fv = self.walk(b, path);
                path.pop();
                if !fv.contains(x) {
                    self.flag(path, "abs", x, format!("{x} is not free in the body"));
                }
                fv.retain(|y| y != x);
                fv
            }
            Term::App(f, a) => {
                path.push(0);
                let mut fv = self.walk(f, path);
                path.pop();
                path.push(1);
                let fa = self.walk(a, path);
                path.pop();
                let left: HashSet<&Name> = fv.iter().collect();
                let mut shared: Vec<Name> = Vec::new();
                for y in &fa {
                    if left.contains(y) && !shared.contains(y) {
                        shared.push(y.clone());
                    }
                }
                for y in shared {
                    self.flag(path, "app", &y, format!("{y} is free in both function and argument"));
                }
                fv.extend(fa);
                fv
            }
            Term::Era(x, b) => {
                path.push(0);
                let fv = self.walk(b, path);
                path.pop();
                if fv.contains(x) {
                    self.flag(path, "era", x, format!("erased {x} is free in the body"));
                }
                let mut out = vec![x.clone()];
                out.extend(fv);
                out
            }
            Term::Dup(x, l, r, b) => {
                path.push(0);
                let fv = self.walk(b, path);
                path.pop();
                if l == r {
                    self.flag(path, "dup", l, format!("split names coincide ({l})"));
                }
                if !fv.contains(l) {
                    self.flag(path, "dup", l, format!("{l} is not free in the body"));
                }
                if l != r && !fv.contains(r) {
                    self.flag(path, "dup", r, format!("{r} is not free in the body"));
                }
                if x != l && x != r && fv.contains(x) {
                    self.flag(path, "dup", x, format!("source {x} is free in the body"));
                }
                let mut out = vec![x.clone()];
                out.extend(fv.into_iter().filter(|y| y != l && y != r));
                out
            }
            Term::Sub(b, n, x) => {
                if !self.allow_sub {
                    self.flag(path, "sub", x, "explicit substitution in a resource term".into());
                }
                path.push(0);
                let mut fv = self.walk(b, path);
                path.pop();
                path.push(1);
                let fn_ = self.walk(n, path);
                path.pop();
                if !fv.contains(x) {
                    self.flag(path, "sub", x, format!("target {x} is not free in the body"));
                }
                if !n.is_substitution_free() {
                    self.flag(path, "sub", x, "replacement contains a substitution".into());
                }
                fv.retain(|y| y != x);
                let rest: HashSet<&Name> = fv.iter().collect();
                let mut shared: Vec<Name> = Vec::new();
                for y in &fn_ {
                    if rest.contains(y) && !shared.contains(y) {
                        shared.push(y.clone());
                    }
                }
                for y in shared {
                    self.flag(path, "sub", &y, format!("{y} is free in both body and replacement"));
                }
                fv.extend(fn_);
                fv
            }
        }
    }
}

fn run(t: &Term, allow_sub: bool) -> LinearityReport {
    let mut c = Checker { allow_sub, out: Vec::new() };
    c.walk(t, &mut Vec::new());
    LinearityReport { ok: c.out.is_empty(), violations: c.out }
}

/// Check the formation rules for resource terms.  Any explicit substitution
/// node is itself a violation.
pub fn check_linear(t: &Term) -> LinearityReport {
    run(t, false)
}

/// Check the formation rules extended with explicit substitution.
pub fn check_sterm(t: &Term) -> LinearityReport {
    run(t, true)
}

pub fn is_linear(t: &Term) -> bool {
    check_linear(t).ok
}

/// Free-variable list of a well-formed resource term.
pub fn free_var_list(t: &Term) -> Result<Vec<Name>, WellFormedError> {
    let rep = check_linear(t);
    match rep.violations.into_iter().next() {
        Some(v) => Err(v.into()),
        None => Ok(fv_list(t)),
    }
}

/// Free-variable list of a valid term with explicit substitutions.
pub fn sfree_var_list(t: &Term) -> Result<Vec<Name>, WellFormedError> {
    let rep = check_sterm(t);
    match rep.violations.into_iter().next() {
        Some(v) => Err(v.into()),
        None => Ok(fv_list(t)),
    }
}
