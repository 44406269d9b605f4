//! Typing normal forms and certifying strong normalisation.

use crate::deriv::{arr_e, arr_i, ax, check_derivation, cont, thin, BuildError, Derivation};
use crate::equiv::{dup_run, key, Key};
use crate::nf::is_normal_form;
use crate::reduce::{classify_sn, enumerate_redexes, leftmost_outermost, Budget, Cycle, SnVerdict};
use crate::term::Term;
use crate::transport::{expand_step, retarget, TransportError};
use crate::types::{AtomSupply, Strict, TypeEq};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypingError {
    #[error("{0} is not a normal form")]
    NotNormal(Term),
    #[error("{0} has no typing of the expected shape")]
    Shape(Term),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// A derivation for a normal form, built along its shape: each head
/// variable gets the curried type its arguments ask for, each argument is
/// typed once and reused as its own witness.
pub fn nf_type(t: &Term) -> Result<Derivation, TypingError> {
    if !is_normal_form(t) {
        return Err(TypingError::NotNormal(t.clone()));
    }
    with_demand(t, &[], &mut AtomSupply::default())
}

fn with_demand(t: &Term, demand: &[Strict], atoms: &mut AtomSupply) -> Result<Derivation, TypingError> {
    match t {
        Term::Var(x) => Ok(ax(x, Strict::curried(demand, atoms.fresh()))),
        Term::Dup(..) => {
            let (layers, body) = dup_run(t);
            let mut d = with_demand(body, demand, atoms)?;
            for (z, x, y) in layers.iter().rev() {
                d = cont(z, x, y, d)?;
            }
            Ok(d)
        }
        Term::App(..) => {
            let mut args = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                args.push(&**a);
                head = f;
            }
            args.reverse();
            let typed = args.iter().map(|a| with_demand(a, &[], atoms)).collect::<Result<Vec<_>, _>>()?;
            let mut doms: Vec<Strict> = typed.iter().map(|d| d.ty.clone()).collect();
            doms.extend_from_slice(demand);
            let mut d = with_demand(head, &doms, atoms)?;
            for a in typed {
                d = arr_e(d, vec![a.clone(), a], 0)?;
            }
            Ok(d)
        }
        Term::Abs(x, b) if demand.is_empty() => Ok(arr_i(x, with_demand(b, &[], atoms)?)?),
        Term::Era(x, b) if demand.is_empty() => Ok(thin(x, with_demand(b, &[], atoms)?)?),
        _ => Err(TypingError::Shape(t.clone())),
    }
}

/// Outcome of [`certify_sn`].
#[derive(Debug, Clone)]
pub enum Certificate {
    /// A checked derivation of the term.
    Certified(Derivation),
    /// A reduction cycle, so the term is not strongly normalising.
    NotSn(Cycle),
    /// The budget ran out or a derivation could not be assembled.
    Unknown(String),
}

/// Decide strong normalisation within `budget` and, for strongly
/// normalising terms, produce a derivation by typing the normal form and
/// expanding it back along the leftmost-outermost path.  Erased arguments
/// are typed recursively the same way.
pub fn certify_sn(t: &Term, budget: Budget) -> Certificate {
    match classify_sn(t, budget) {
        SnVerdict::NonSn(c) => return Certificate::NotSn(c),
        SnVerdict::Unknown { nodes, steps } => {
            return Certificate::Unknown(format!("budget exhausted after {nodes} nodes and {steps} steps"))
        }
        SnVerdict::Sn(_) => {}
    }
    let mut memo = HashMap::new();
    match build(t, &mut memo) {
        Ok(d) => match check_derivation(&d, TypeEq::Multiset) {
            Ok(()) => Certificate::Certified(d),
            Err(errs) => Certificate::Unknown(format!("assembled derivation is invalid: {}", errs[0])),
        },
        Err(e) => Certificate::Unknown(e.to_string()),
    }
}

/// Derivation of a strongly normalising term.  Classes are memoised by key;
/// the reduction path is walked iteratively, only erased arguments recurse.
fn build(t: &Term, memo: &mut HashMap<Key, Derivation>) -> Result<Derivation, TransportError> {
    let mut path = Vec::new();
    let mut cur = key(t).render();
    let mut d = loop {
        let k = key(&cur);
        if let Some(d) = memo.get(&k) {
            break d.clone();
        }
        if is_normal_form(&cur) {
            let d = nf_type(&cur).map_err(|e| TransportError::Shape(e.to_string()))?;
            memo.insert(k, d.clone());
            break d;
        }
        let steps = enumerate_redexes(&cur);
        let s = leftmost_outermost(&steps).ok_or_else(|| TransportError::Shape(format!("{cur} is stuck")))?.clone();
        let next = key(&s.after).render();
        path.push((k, s));
        cur = next;
    };
    while let Some((k, s)) = path.pop() {
        let after = retarget(&d, &s.after)?;
        let mut oracle = |n: &Term| build(n, memo).ok();
        d = expand_step(&after, &s, &mut oracle)?;
        memo.insert(k, d.clone());
    }
    retarget(&d, t)
}
