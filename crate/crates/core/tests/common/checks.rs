//! Property sweeps shared by the integration suites and the acceptance
//! harness.  Each returns how many cases were checked and the first failure.

use super::{derivable, for_each_plain, omega};
use rcl::certify::{certify_sn, nf_type, Certificate};
use rcl::deriv::is_valid;
use rcl::reduce::{classify_sn, enumerate_redexes, explore, Budget, SnVerdict};
use rcl::subst::{mul_multiset, multiset_greater, step_subst, subst_redexes};
use rcl::term::{fv_set, Name, Term};
use rcl::transport::{expand_step, transport_forward};
use rcl::{alpha_eq, alpha_normalize, check_linear, is_normal_form, to_plain, to_resource};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub failures: usize,
    pub first: Option<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(why());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    pub fn summary(&self) -> String {
        match &self.first {
            None => format!("{} checked", self.checked),
            Some(w) => format!("{} of {} failed, first: {w}", self.failures, self.checked),
        }
    }
}

/// `to_plain (to_resource t)` is alpha-equal to `t`.
pub fn round_trip(max_size: usize, free: &[Name]) -> Tally {
    let mut tally = Tally::default();
    for size in 1..=max_size {
        for_each_plain(size, free, &mut |t| {
            let r = to_resource(t);
            let back = to_plain(&r);
            tally.check(alpha_eq(&back, t) && check_linear(&r).ok, || format!("{t} -> {r} -> {back}"));
        });
    }
    tally
}

/// Every order of substitution steps ends in the same alpha class, which is
/// substitution free and linear.
pub fn subst_confluence(terms: &[Term]) -> Tally {
    fn ends(t: &Term, memo: &mut HashMap<Term, HashSet<Term>>) -> HashSet<Term> {
        let key = alpha_normalize(t);
        if let Some(e) = memo.get(&key) {
            return e.clone();
        }
        let redexes = subst_redexes(t);
        let out = if redexes.is_empty() {
            HashSet::from([key.clone()])
        } else {
            let mut acc = HashSet::new();
            for p in redexes {
                let next = step_subst(t, &p).expect("redex steps");
                acc.extend(ends(&next, memo));
            }
            acc
        };
        memo.insert(key, out.clone());
        out
    }
    let mut tally = Tally::default();
    let mut memo = HashMap::new();
    for t in terms {
        let e = ends(t, &mut memo);
        let good = e.len() == 1 && e.iter().all(|n| n.is_substitution_free() && check_linear(n).ok);
        tally.check(good, || format!("{t} has normal forms {:?}", e.iter().map(Term::to_string).collect::<Vec<_>>()));
    }
    tally
}

/// Every single substitution step, on every path from each term: does the
/// multiset of substitution body sizes drop?  Also counts, separately, steps
/// where the contracted node's own multiset drops.
pub fn measure_steps(terms: &[Term]) -> (Tally, Tally) {
    let (mut global, mut local) = (Tally::default(), Tally::default());
    let mut seen = HashSet::new();
    let mut stack: Vec<Term> = terms.to_vec();
    while let Some(t) = stack.pop() {
        if !seen.insert(alpha_normalize(&t)) {
            continue;
        }
        for p in subst_redexes(&t) {
            let next = step_subst(&t, &p).expect("redex steps");
            let (before, after) = (mul_multiset(&t), mul_multiset(&next));
            global.check(multiset_greater(&before, &after), || format!("{t} -> {next}: {before:?} to {after:?}"));
            let (rb, ra) = (mul_multiset(t.at(&p).unwrap()), mul_multiset(next.at(&p).unwrap()));
            local.check(multiset_greater(&rb, &ra), || format!("{t} at {p:?}: {rb:?} to {ra:?}"));
            stack.push(next);
        }
    }
    (global, local)
}

/// Normal-form recognition agrees with the absence of redexes.
pub fn nf_iff_irreducible(terms: &[Term]) -> Tally {
    let mut tally = Tally::default();
    for t in terms {
        let (nf, red) = (is_normal_form(t), enumerate_redexes(t));
        tally.check(nf == red.is_empty(), || format!("{t}: normal={nf}, {} redexes", red.len()));
    }
    tally
}

/// Free variables and formation are preserved by every step and along every
/// edge of each explored graph.
pub fn graph_preservation(terms: &[Term], budget: Budget) -> Tally {
    let mut tally = Tally::default();
    for t in terms {
        for s in enumerate_redexes(t) {
            tally.check(fv_set(&s.after) == fv_set(t) && derivable(&s.after).is_some(), || {
                format!("{}", s.trace_line())
            });
        }
        let g = explore(t, budget);
        for e in &g.edges {
            let (a, b) = (&g.nodes[e.from].term, &g.nodes[e.to].term);
            tally.check(fv_set(a) == fv_set(b) && check_linear(b).ok && derivable(b).is_some(), || {
                format!("{a} --{}--> {b}", e.rule.id())
            });
        }
    }
    tally
}

/// `nf_type` yields a valid derivation about every normal form.
pub fn nf_typing(terms: &[Term]) -> Tally {
    let mut tally = Tally::default();
    for t in terms.iter().filter(|t| is_normal_form(t)) {
        let r = nf_type(t);
        tally.check(matches!(&r, Ok(d) if is_valid(d) && d.subject == *t), || format!("{t}: {r:?}"));
    }
    tally
}

/// Forward transport and expansion keep the judgment for each step out of
/// each certified term, until `want` pairs were checked.
pub fn judgment_invariance(terms: &[Term], want: usize, budget: Budget) -> Tally {
    let mut tally = Tally::default();
    let mut oracle = |m: &Term| match certify_sn(m, budget) {
        Certificate::Certified(d) => Some(d),
        _ => None,
    };
    for t in terms {
        if tally.checked >= want {
            break;
        }
        let Certificate::Certified(d) = certify_sn(t, budget) else { continue };
        for s in enumerate_redexes(t) {
            let fwd = transport_forward(&d, &s, None);
            let back = fwd.as_ref().ok().map(|f| expand_step(f, &s, &mut oracle));
            let good = match (&fwd, &back) {
                (Ok(f), Some(Ok(b))) => {
                    is_valid(f)
                        && is_valid(b)
                        && f.subject == s.after
                        && b.subject == *t
                        && (&f.basis, &f.ty) == (&d.basis, &d.ty)
                        && (&b.basis, &b.ty) == (&d.basis, &d.ty)
                }
                _ => false,
            };
            tally.check(good, || format!("{}: {:?} / {:?}", s.trace_line(), fwd.err(), back.and_then(|b| b.err())));
        }
    }
    tally
}

/// Certification succeeds exactly for the terms classified as strongly
/// normalising, with valid derivations; the Omega image is refuted within
/// `omega_nodes` classes.
pub fn characterisation(terms: &[Term], budget: Budget, omega_nodes: usize) -> Tally {
    let mut tally = Tally::default();
    for t in terms {
        let sn = matches!(classify_sn(t, budget), SnVerdict::Sn(_));
        let c = certify_sn(t, budget);
        let good = match &c {
            Certificate::Certified(d) => sn && is_valid(d) && d.subject == *t,
            _ => !sn,
        };
        tally.check(good, || format!("{t}: sn={sn}, {c:?}"));
    }
    let om = omega();
    let c = certify_sn(&om, Budget { nodes: omega_nodes, steps: omega_nodes * 10 });
    tally.check(matches!(c, Certificate::NotSn(_)), || format!("{om}: {c:?}"));
    tally
}
