//! Moving derivations along reduction.
//!
//! Forward transport rewrites a derivation of a redex into one of its
//! contractum with the same judgment; expansion goes the other way.  A term
//! position can correspond to several derivation nodes, because an argument
//! is typed once per premise, so every step is applied to every copy.

use crate::deriv::{arr_e, arr_i, cont, rebuild_like, subst, thin, ax, BuildError, DRule, Derivation};
use crate::equiv::{canonical_alignment, dup_run, era_run};
use crate::reduce::{ReductionStep, Rule};
use crate::subst::{substitute_traced, SubstRule, SubstTrace};
use crate::term::{fv_list, name, Name, NameSupply, Term};
use crate::types::{Inter, Strict};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// Supplies a typing of a term on demand.
pub type Oracle<'a> = dyn FnMut(&Term) -> Option<Derivation> + 'a;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("derivation does not match the term: {0}")]
    Shape(String),
    #[error("a typing of {0} is needed")]
    NeedsTyping(Term),
    #[error("terms are not structurally equivalent")]
    NotEquivalent,
    #[error("substitution failed: {0}")]
    Subst(String),
}

type Res<T> = Result<T, TransportError>;

fn shape<T>(msg: impl Into<String>) -> Res<T> {
    Err(TransportError::Shape(msg.into()))
}

const HOLE: &str = "?";

/// Placeholder for a witness premise whose typing is supplied at the end.
fn hole(subject: Term) -> Derivation {
    let basis = fv_list(&subject).into_iter().map(|x| (x, Inter::top())).collect();
    Derivation { rule: DRule::Ax, basis, subject, ty: Strict::atom(HOLE), premises: Vec::new(), witness: None }
}

fn is_hole(d: &Derivation) -> bool {
    d.premises.is_empty() && d.ty == Strict::atom(HOLE)
}

fn fill_holes(d: Derivation, oracle: &mut Option<&mut Oracle<'_>>) -> Res<Derivation> {
    if is_hole(&d) {
        return match oracle.as_mut().and_then(|o| o(&d.subject)) {
            Some(t) if t.subject == d.subject => Ok(t),
            _ => Err(TransportError::NeedsTyping(d.subject)),
        };
    }
    if !contains_hole(&d) {
        return Ok(d);
    }
    let premises = d.premises.iter().map(|p| fill_holes(p.clone(), oracle)).collect::<Res<Vec<_>>>()?;
    Ok(rebuild_like(&d, premises)?)
}

fn contains_hole(d: &Derivation) -> bool {
    is_hole(d) || d.premises.iter().any(contains_hole)
}

/// Rename a derivation onto a term of the same shape: free and bound names
/// follow the positional correspondence between the two subjects.
pub fn realign(d: &Derivation, new: &Term) -> Res<Derivation> {
    if is_hole(d) {
        return Ok(hole(new.clone()));
    }
    if d.subject == *new {
        return Ok(d.clone());
    }
    let (old_fv, new_fv) = (fv_list(&d.subject), fv_list(new));
    if old_fv.len() != new_fv.len() {
        return shape(format!("{} and {new} differ in free variables", d.subject));
    }
    let map: HashMap<&Name, &Name> = old_fv.iter().zip(new_fv.iter()).collect();
    let basis = d.basis.iter().map(|(x, t)| (map.get(x).map(|y| (*y).clone()).unwrap_or(x.clone()), t.clone())).collect();
    let kids = new.children();
    let same_shape = std::mem::discriminant(&d.subject) == std::mem::discriminant(new);
    if !same_shape {
        return shape(format!("{} and {new} differ in shape", d.subject));
    }
    let premises = d
        .premises
        .iter()
        .enumerate()
        .map(|(i, p)| realign(p, kids[i.min(1)]))
        .collect::<Res<Vec<_>>>()?;
    Ok(Derivation { rule: d.rule, basis, subject: new.clone(), ty: d.ty.clone(), premises, witness: d.witness })
}

fn peel<'a>(d: &'a Derivation, rule: DRule, n: usize) -> Res<&'a Derivation> {
    let mut cur = d;
    for _ in 0..n {
        if cur.rule != rule || cur.premises.len() != 1 {
            return shape(format!("expected a {} node for {}", rule.id(), cur.subject));
        }
        cur = &cur.premises[0];
    }
    Ok(cur)
}

fn thin_stack(xs: &[Name], mut d: Derivation) -> Res<Derivation> {
    for x in xs.iter().rev() {
        d = thin(x, d)?;
    }
    Ok(d)
}

fn cont_stack(layers: &[(Name, Name, Name)], mut d: Derivation) -> Res<Derivation> {
    for (z, x, y) in layers.iter().rev() {
        d = cont(z, x, y, d)?;
    }
    Ok(d)
}

/// Move a derivation to a structurally equivalent term that uses the same
/// free, bound and leaf names: erasure and duplication runs are rebuilt over
/// the derivation of their body.
pub fn retarget_local(d: &Derivation, new: &Term) -> Res<Derivation> {
    if d.subject == *new {
        return Ok(d.clone());
    }
    if is_hole(d) {
        return Ok(hole(new.clone()));
    }
    match (&d.subject, new) {
        (Term::Dup(..), Term::Dup(..)) => {
            let (old, _) = dup_run(&d.subject);
            let (layers, body) = dup_run(new);
            let inner = retarget_local(peel(d, DRule::Cont, old.len())?, body)?;
            cont_stack(&layers, inner)
        }
        (Term::Era(..), Term::Era(..)) => {
            let (old, _) = era_run(&d.subject);
            let (xs, body) = era_run(new);
            let inner = retarget_local(peel(d, DRule::Thin, old.len())?, body)?;
            thin_stack(&xs, inner)
        }
        (Term::Abs(x, _), Term::Abs(y, b)) if x == y => Ok(rebuild_like(d, vec![retarget_local(&d.premises[0], b)?])?),
        (Term::App(..), Term::App(f, a)) | (Term::Sub(..), Term::Sub(f, a, _)) => {
            let mut ps = vec![retarget_local(&d.premises[0], f)?];
            for p in &d.premises[1..] {
                ps.push(retarget_local(p, a)?);
            }
            let like = Derivation { subject: new.clone(), ..d.clone() };
            Ok(rebuild_like(&like, ps)?)
        }
        _ => Err(TransportError::NotEquivalent),
    }
}

/// Move a derivation to any structurally equivalent term, alpha-renaming
/// included.  Both terms are aligned with their shared class representative.
pub fn retarget(d: &Derivation, target: &Term) -> Res<Derivation> {
    if d.subject == *target {
        return Ok(d.clone());
    }
    let (ca, ma) = canonical_alignment(&d.subject);
    let (cb, mb) = canonical_alignment(target);
    if ca != cb {
        return Err(TransportError::NotEquivalent);
    }
    let inv = |m: &HashMap<Name, Name>| m.iter().map(|(o, r)| (r.clone(), o.clone())).collect::<HashMap<Name, Name>>();
    let (inv_a, inv_b) = (inv(&ma), inv(&mb));
    let free: BTreeSet<Name> = fv_list(&ca).into_iter().collect();
    let internal: BTreeSet<Name> =
        ca.all_names().into_iter().filter(|n| !free.contains(n) && !inv_a.contains_key(n)).collect();
    let internal: HashMap<Name, Name> =
        internal.into_iter().enumerate().map(|(i, n)| (n, name(&format!("%{i}")))).collect();
    let via = |m: &HashMap<Name, Name>| {
        ca.rename_all(&|n: &Name| m.get(n).or_else(|| internal.get(n)).cloned().unwrap_or_else(|| n.clone()))
    };
    let (s1, s2) = (via(&inv_a), via(&inv_b));
    let d1 = retarget_local(d, &s1)?;
    let d2 = realign(&d1, &s2)?;
    retarget_local(&d2, target)
}

/// Apply `f` to every derivation node at term position `path`.  Placeholders
/// met on the way only have their subject updated to `new_sub`.
fn map_at(
    d: &Derivation,
    path: &[u8],
    new_sub: &Term,
    f: &mut dyn FnMut(&Derivation) -> Res<Derivation>,
) -> Res<Derivation> {
    if is_hole(d) {
        let subject = d.subject.replace_at(path, new_sub.clone()).ok_or_else(|| TransportError::Shape("bad path".into()))?;
        return Ok(hole(subject));
    }
    let Some((&i, rest)) = path.split_first() else {
        return f(d);
    };
    let mut ps = d.premises.clone();
    match (i, d.rule) {
        (0, _) if !ps.is_empty() => ps[0] = map_at(&ps[0], rest, new_sub, f)?,
        (1, DRule::ArrE | DRule::Subst) => {
            for p in ps.iter_mut().skip(1) {
                *p = map_at(p, rest, new_sub, f)?;
            }
        }
        _ => return shape(format!("no premise for position {i} under {}", d.rule.id())),
    }
    let like = Derivation {
        subject: d.subject.replace_at(path, new_sub.clone()).unwrap_or_else(|| d.subject.clone()),
        ..d.clone()
    };
    Ok(rebuild_like(&like, ps)?)
}

/// Split an `ArrE` or `Subst` node into head, argument premises and the
/// witness index among the arguments.
fn split_args(d: &Derivation) -> Res<(&Derivation, Vec<Derivation>, usize)> {
    match (d.rule, d.witness) {
        (DRule::ArrE | DRule::Subst, Some(w)) if d.premises.len() >= 2 => {
            Ok((&d.premises[0], d.premises[1..].to_vec(), w - 1))
        }
        _ => shape(format!("expected an application or substitution node for {}", d.subject)),
    }
}

fn expect_rule(d: &Derivation, r: DRule) -> Res<()> {
    if d.rule == r && !is_hole(d) {
        Ok(())
    } else {
        shape(format!("expected {} for {}, found {}", r.id(), d.subject, d.rule.id()))
    }
}

/// Remove from `pool` one derivation per type of `want`.
fn take_matching(pool: &mut Vec<Derivation>, want: &Inter) -> Res<Vec<Derivation>> {
    let mut out = Vec::new();
    for t in want.items() {
        let i = pool.iter().position(|d| d.ty == *t).ok_or_else(|| TransportError::Shape(format!("no premise of type {t}")))?;
        out.push(pool.remove(i));
    }
    Ok(out)
}

fn mains(args: &[Derivation], w: usize) -> Vec<Derivation> {
    args.iter().enumerate().filter(|(i, _)| *i != w).map(|(_, d)| d.clone()).collect()
}

/// `args` typings of the replacement, witness first when nonempty, else `fallback`.
fn subst_with(body: Derivation, x: &Name, chosen: Vec<Derivation>, fallback: &Derivation) -> Res<Derivation> {
    let w = chosen.first().cloned().unwrap_or_else(|| fallback.clone());
    let mut args = vec![w];
    args.extend(chosen);
    Ok(subst(body, x, args, 0)?)
}

/// One substitution rule, forward, at a `Subst` node.
fn subst_rule_forward(d: &Derivation, rule: SubstRule, contractum: &Term) -> Res<Derivation> {
    let Term::Sub(_, n, x) = &d.subject else { return shape("expected a substitution") };
    let (body, args, w) = split_args(d)?;
    let main = mains(&args, w);
    let out = match rule {
        SubstRule::Var => {
            let [m] = main.as_slice() else { return shape("variable substitution needs one typing") };
            m.clone()
        }
        SubstRule::AppLeft => {
            let (f, ps, wp) = split_args(body)?;
            arr_e(subst(f.clone(), x, args, w)?, ps, wp)?
        }
        SubstRule::AppRight => {
            let (f, ps, wp) = split_args(body)?;
            let mut pool = main.clone();
            let mut new_ps: Vec<Option<Derivation>> = vec![None; ps.len()];
            for (j, p) in ps.iter().enumerate() {
                if j == wp {
                    continue;
                }
                let want = p.basis.get(x).cloned().unwrap_or_default();
                let chosen = take_matching(&mut pool, &want)?;
                new_ps[j] = Some(subst_with(p.clone(), x, chosen, &args[w])?);
            }
            if !pool.is_empty() {
                return shape("replacement typings left over");
            }
            let witness = match new_ps.iter().flatten().next() {
                Some(copy) => copy.clone(),
                None => {
                    let p = &ps[wp];
                    let want = p.basis.get(x).cloned().unwrap_or_default();
                    let found: Option<Vec<Derivation>> =
                        want.items().iter().map(|t| args.iter().find(|a| a.ty == *t).cloned()).collect();
                    match found {
                        Some(chosen) => subst_with(p.clone(), x, chosen, &args[w])?,
                        None => hole(Term::Sub(Box::new(p.subject.clone()), n.clone(), x.clone())),
                    }
                }
            };
            new_ps[wp] = Some(witness);
            arr_e(f.clone(), new_ps.into_iter().map(Option::unwrap).collect(), wp)?
        }
        SubstRule::Abs => {
            expect_rule(body, DRule::ArrI)?;
            let Term::Abs(y, _) = &body.subject else { unreachable!() };
            arr_i(y, subst(body.premises[0].clone(), x, args, w)?)?
        }
        SubstRule::EraHit => {
            expect_rule(body, DRule::Thin)?;
            let dm = body.premises[0].clone();
            let (xs, _) = era_run(contractum);
            let k = xs.len() - era_run(&dm.subject).0.len();
            thin_stack(&xs[..k], dm)?
        }
        SubstRule::EraOther => {
            expect_rule(body, DRule::Thin)?;
            let Term::Era(y, _) = &body.subject else { unreachable!() };
            thin(y, subst(body.premises[0].clone(), x, args, w)?)?
        }
        SubstRule::DupHit => {
            expect_rule(body, DRule::Cont)?;
            let Term::Dup(_, x1, x2, _) = &body.subject else { unreachable!() };
            let dm = body.premises[0].clone();
            let (layers, inner) = dup_run(contractum);
            let Term::Sub(s1, n2, _) = inner else { return shape("dup-hit result") };
            let Term::Sub(_, n1, _) = &**s1 else { return shape("dup-hit result") };
            let mut pool = main;
            let l1 = take_matching(&mut pool, &dm.basis.get(x1).cloned().unwrap_or_default())?;
            let l2 = take_matching(&mut pool, &dm.basis.get(x2).cloned().unwrap_or_default())?;
            let l1 = l1.iter().map(|p| realign(p, n1)).collect::<Res<Vec<_>>>()?;
            let l2 = l2.iter().map(|p| realign(p, n2)).collect::<Res<Vec<_>>>()?;
            let d1 = subst_with(dm, x1, l1, &realign(&args[w], n1)?)?;
            let d2 = subst_with(d1, x2, l2, &realign(&args[w], n2)?)?;
            cont_stack(&layers, d2)?
        }
        SubstRule::DupOther => {
            expect_rule(body, DRule::Cont)?;
            let Term::Dup(z, y1, y2, _) = &body.subject else { unreachable!() };
            cont(z, y1, y2, subst(body.premises[0].clone(), x, args, w)?)?
        }
    };
    if out.subject != *contractum {
        return shape(format!("transported subject {} differs from {contractum}", out.subject));
    }
    Ok(out)
}

/// One substitution rule, backward: from a derivation of the contractum to
/// one of `redex`.
fn subst_rule_backward(d: &Derivation, rule: SubstRule, redex: &Term, oracle: &mut Oracle<'_>) -> Res<Derivation> {
    let Term::Sub(_, n, x) = redex else { return shape("expected a substitution") };
    let out = match rule {
        SubstRule::Var => subst(ax(x, d.ty.clone()), x, vec![d.clone(), d.clone()], 0)?,
        SubstRule::AppLeft => {
            let (s, ps, wp) = split_args(d)?;
            let (m, args, w) = split_args(s)?;
            subst(arr_e(m.clone(), ps, wp)?, x, args, w)?
        }
        SubstRule::AppRight => {
            let (f, ps, wp) = split_args(d)?;
            let mut bodies = Vec::new();
            let mut union = Vec::new();
            let mut fallback = None;
            for (j, p) in ps.iter().enumerate() {
                let (b, args, w) = split_args(p)?;
                bodies.push(b.clone());
                fallback.get_or_insert_with(|| args[w].clone());
                if j != wp {
                    union.extend(mains(&args, w));
                }
            }
            subst_with(arr_e(f.clone(), bodies, wp)?, x, union, &fallback.unwrap())?
        }
        SubstRule::Abs => {
            expect_rule(d, DRule::ArrI)?;
            let Term::Abs(y, _) = &d.subject else { unreachable!() };
            let (m, args, w) = split_args(&d.premises[0])?;
            subst(arr_i(y, m.clone())?, x, args, w)?
        }
        SubstRule::EraHit => {
            let k = era_run(&d.subject).0.len() - era_run(redex.at(&[0, 0]).unwrap()).0.len();
            let dm = peel(d, DRule::Thin, k)?.clone();
            let dn = oracle(n).ok_or_else(|| TransportError::NeedsTyping((**n).clone()))?;
            let dn = retarget(&dn, n)?;
            subst(thin(x, dm)?, x, vec![dn], 0)?
        }
        SubstRule::EraOther => {
            expect_rule(d, DRule::Thin)?;
            let Term::Era(y, _) = &d.subject else { unreachable!() };
            let (m, args, w) = split_args(&d.premises[0])?;
            subst(thin(y, m.clone())?, x, args, w)?
        }
        SubstRule::DupHit => {
            let Term::Sub(b, _, _) = redex else { unreachable!() };
            let Term::Dup(_, x1, x2, _) = &**b else { return shape("dup-hit redex") };
            let (layers, _) = dup_run(&d.subject);
            let outer = peel(d, DRule::Cont, layers.len())?;
            let (s1, args2, w2) = split_args(outer)?;
            let (dm, args1, w1) = split_args(s1)?;
            let mut union = Vec::new();
            for p in mains(&args1, w1).iter().chain(mains(&args2, w2).iter()) {
                union.push(realign(p, n)?);
            }
            let fallback = realign(&args1[w1], n)?;
            subst_with(cont(x, x1, x2, dm.clone())?, x, union, &fallback)?
        }
        SubstRule::DupOther => {
            expect_rule(d, DRule::Cont)?;
            let Term::Dup(z, y1, y2, _) = &d.subject else { unreachable!() };
            let (m, args, w) = split_args(&d.premises[0])?;
            subst(cont(z, y1, y2, m.clone())?, x, args, w)?
        }
    };
    if out.subject != *redex {
        return shape(format!("expanded subject {} differs from {redex}", out.subject));
    }
    Ok(out)
}

fn trace_forward(d: Derivation, trace: &SubstTrace, oracle: &mut Option<&mut Oracle<'_>>) -> Res<Derivation> {
    let mut d = d;
    for s in &trace.steps {
        let contractum = s.after.at(&s.position).ok_or_else(|| TransportError::Shape("bad trace".into()))?.clone();
        d = map_at(&d, &s.position, &contractum, &mut |n| subst_rule_forward(n, s.rule, &contractum))?;
    }
    fill_holes(d, oracle)
}

fn trace_backward(d: Derivation, trace: &SubstTrace, oracle: &mut Oracle<'_>) -> Res<Derivation> {
    let mut d = d;
    for (i, s) in trace.steps.iter().enumerate().rev() {
        let redex = trace.before(i).at(&s.position).ok_or_else(|| TransportError::Shape("bad trace".into()))?.clone();
        d = map_at(&d, &s.position, &redex, &mut |n| subst_rule_backward(n, s.rule, &redex, oracle))?;
    }
    Ok(d)
}

/// From `Γ, x:∩τi |- M : σ` and typings `ws` of one replacement (`ws[0]` the
/// witness), a derivation of the substitution result with conclusion basis
/// `Γ, Δ0^⊤ ⊓ Δ1 ⊓ ... ⊓ Δn`.  The oracle types an argument whose only
/// typing is lost on the way (the witness of an argument that absorbs the
/// replacement); without one that case fails.
pub fn subst_lemma_apply(
    d: &Derivation,
    x: &Name,
    ws: Vec<Derivation>,
    mut oracle: Option<&mut Oracle<'_>>,
) -> Res<Derivation> {
    let Some(first) = ws.first() else { return shape("the witness typing is required") };
    let mut supply = NameSupply::avoiding([&d.subject, &first.subject]);
    let trace = substitute_traced(&d.subject, &first.subject, x, &mut supply)
        .map_err(|e| TransportError::Subst(e.to_string()))?;
    let Term::Sub(_, n2, _) = &trace.start else { unreachable!() };
    let ws = ws.iter().map(|w| realign(w, n2)).collect::<Res<Vec<_>>>()?;
    let root = subst(d.clone(), x, ws, 0)?;
    trace_forward(root, &trace, &mut oracle)
}

fn binder3(t: &Term) -> Res<(&Name, &Name, &Name)> {
    match t {
        Term::Dup(z, x, y, _) => Ok((z, x, y)),
        _ => shape("expected a duplication"),
    }
}

fn redex_forward(
    d: &Derivation,
    rule: Rule,
    redex: &Term,
    contractum: &Term,
    trace: Option<&SubstTrace>,
    oracle: &mut Option<&mut Oracle<'_>>,
) -> Res<Derivation> {
    let out = match rule {
        Rule::Beta => {
            let (f, args, w) = split_args(d)?;
            expect_rule(f, DRule::ArrI)?;
            let Term::Abs(x, _) = &f.subject else { unreachable!() };
            let trace = trace.ok_or_else(|| TransportError::Shape("beta step without a trace".into()))?;
            let Term::Sub(_, n2, _) = &trace.start else { return shape("trace start") };
            let args = args.iter().map(|a| realign(a, n2)).collect::<Res<Vec<_>>>()?;
            let root = subst(f.premises[0].clone(), x, args, w)?;
            trace_forward(root, trace, oracle)?
        }
        Rule::Gamma1 => {
            let (z, x1, x2) = binder3(redex)?;
            let inner = peel(d, DRule::Cont, 1)?;
            expect_rule(inner, DRule::ArrI)?;
            let Term::Abs(y, _) = &inner.subject else { unreachable!() };
            arr_i(y, cont(z, x1, x2, inner.premises[0].clone())?)?
        }
        Rule::Gamma2 => {
            let (z, x1, x2) = binder3(redex)?;
            let (m, args, w) = split_args(peel(d, DRule::Cont, 1)?)?;
            arr_e(cont(z, x1, x2, m.clone())?, args, w)?
        }
        Rule::Gamma3 => {
            let (z, x1, x2) = binder3(redex)?;
            let (m, args, w) = split_args(peel(d, DRule::Cont, 1)?)?;
            let args = args.into_iter().map(|a| cont(z, x1, x2, a)).collect::<Result<Vec<_>, _>>()?;
            arr_e(m.clone(), args, w)?
        }
        Rule::Omega1 => {
            expect_rule(d, DRule::ArrI)?;
            let Term::Abs(x, b) = redex else { return shape("omega1 redex") };
            let Term::Era(y, _) = &**b else { return shape("omega1 redex") };
            let m = peel(&d.premises[0], DRule::Thin, 1)?;
            thin(y, arr_i(x, m.clone())?)?
        }
        Rule::Omega2 => {
            let (f, args, w) = split_args(d)?;
            let Term::App(fe, _) = redex else { return shape("omega2 redex") };
            let Term::Era(y, _) = &**fe else { return shape("omega2 redex") };
            thin(y, arr_e(peel(f, DRule::Thin, 1)?.clone(), args, w)?)?
        }
        Rule::Omega3 => {
            let (f, args, w) = split_args(d)?;
            let Term::App(_, ae) = redex else { return shape("omega3 redex") };
            let Term::Era(y, _) = &**ae else { return shape("omega3 redex") };
            let args = args.iter().map(|a| peel(a, DRule::Thin, 1).cloned()).collect::<Res<Vec<_>>>()?;
            thin(y, arr_e(f.clone(), args, w)?)?
        }
        Rule::GammaOmega1 => {
            let (z, x1, x2) = binder3(redex)?;
            let inner = peel(d, DRule::Cont, 1)?;
            let Term::Era(y, _) = &inner.subject else { return shape("gamma-omega1 redex") };
            thin(y, cont(z, x1, x2, peel(inner, DRule::Thin, 1)?.clone())?)?
        }
        Rule::GammaOmega2 => realign(peel(d, DRule::Cont, 1).and_then(|i| peel(i, DRule::Thin, 1))?, contractum)?,
    };
    if out.subject != *contractum {
        return shape(format!("transported subject {} differs from {contractum}", out.subject));
    }
    Ok(out)
}

fn redex_backward(
    d: &Derivation,
    rule: Rule,
    redex: &Term,
    trace: Option<&SubstTrace>,
    oracle: &mut Oracle<'_>,
) -> Res<Derivation> {
    let out = match rule {
        Rule::Beta => {
            let Term::App(fa, n) = redex else { return shape("beta redex") };
            let Term::Abs(x, _) = &**fa else { return shape("beta redex") };
            let trace = trace.ok_or_else(|| TransportError::Shape("beta step without a trace".into()))?;
            let start = trace_backward(d.clone(), trace, oracle)?;
            let (m, args, w) = split_args(&start)?;
            let args = args.iter().map(|a| realign(a, n)).collect::<Res<Vec<_>>>()?;
            arr_e(arr_i(x, m.clone())?, args, w)?
        }
        Rule::Gamma1 => {
            let (z, x1, x2) = binder3(redex)?;
            expect_rule(d, DRule::ArrI)?;
            let Term::Abs(y, _) = &d.subject else { unreachable!() };
            cont(z, x1, x2, arr_i(y, peel(&d.premises[0], DRule::Cont, 1)?.clone())?)?
        }
        Rule::Gamma2 => {
            let (z, x1, x2) = binder3(redex)?;
            let (f, args, w) = split_args(d)?;
            cont(z, x1, x2, arr_e(peel(f, DRule::Cont, 1)?.clone(), args, w)?)?
        }
        Rule::Gamma3 => {
            let (z, x1, x2) = binder3(redex)?;
            let (f, args, w) = split_args(d)?;
            let args = args.iter().map(|a| peel(a, DRule::Cont, 1).cloned()).collect::<Res<Vec<_>>>()?;
            cont(z, x1, x2, arr_e(f.clone(), args, w)?)?
        }
        Rule::Omega1 => {
            let Term::Abs(x, b) = redex else { return shape("omega1 redex") };
            let Term::Era(y, _) = &**b else { return shape("omega1 redex") };
            let inner = peel(d, DRule::Thin, 1)?;
            expect_rule(inner, DRule::ArrI)?;
            arr_i(x, thin(y, inner.premises[0].clone())?)?
        }
        Rule::Omega2 => {
            let Term::App(fe, _) = redex else { return shape("omega2 redex") };
            let Term::Era(y, _) = &**fe else { return shape("omega2 redex") };
            let (f, args, w) = split_args(peel(d, DRule::Thin, 1)?)?;
            arr_e(thin(y, f.clone())?, args, w)?
        }
        Rule::Omega3 => {
            let Term::App(_, ae) = redex else { return shape("omega3 redex") };
            let Term::Era(y, _) = &**ae else { return shape("omega3 redex") };
            let (f, args, w) = split_args(peel(d, DRule::Thin, 1)?)?;
            let args = args.into_iter().map(|a| thin(y, a)).collect::<Result<Vec<_>, _>>()?;
            arr_e(f.clone(), args, w)?
        }
        Rule::GammaOmega1 => {
            let (z, x1, x2) = binder3(redex)?;
            expect_rule(d, DRule::Thin)?;
            let Term::Era(y, _) = &d.subject else { unreachable!() };
            let inner = peel(&d.premises[0], DRule::Cont, 1)?;
            cont(z, x1, x2, thin(y, inner.clone())?)?
        }
        Rule::GammaOmega2 => {
            let (z, x1, x2) = binder3(redex)?;
            let Term::Dup(_, _, _, b) = redex else { unreachable!() };
            let Term::Era(_, m) = &**b else { return shape("gamma-omega2 redex") };
            cont(z, x1, x2, thin(x1, realign(d, m)?)?)?
        }
    };
    if out.subject != *redex {
        return shape(format!("expanded subject {} differs from {redex}", out.subject));
    }
    Ok(out)
}

/// A derivation of the step's result with the same basis and type as `d`.
/// The oracle is consulted only when an argument's witness typing cannot be
/// rebuilt from the derivation itself.
pub fn transport_forward(d: &Derivation, s: &ReductionStep, mut oracle: Option<&mut Oracle<'_>>) -> Res<Derivation> {
    if d.subject != s.before {
        return shape("derivation is not about the step's source");
    }
    let exposed = retarget_local(d, &s.exposed)?;
    let redex = s.exposed.at(&s.position).ok_or_else(|| TransportError::Shape("bad position".into()))?.clone();
    let contractum = s.after.at(&s.position).ok_or_else(|| TransportError::Shape("bad position".into()))?.clone();
    let out = map_at(&exposed, &s.position, &contractum, &mut |n| {
        redex_forward(n, s.rule, &redex, &contractum, s.trace.as_ref(), &mut oracle)
    })?;
    let out = fill_holes(out, &mut oracle)?;
    debug_assert_eq!(out.basis, d.basis);
    Ok(out)
}

/// A derivation of the step's source from one of its result, with the same
/// basis and type.  The oracle types replacements that the step erased.
pub fn expand_step(d: &Derivation, s: &ReductionStep, oracle: &mut Oracle<'_>) -> Res<Derivation> {
    if d.subject != s.after {
        return shape("derivation is not about the step's result");
    }
    let redex = s.exposed.at(&s.position).ok_or_else(|| TransportError::Shape("bad position".into()))?.clone();
    let out = map_at(d, &s.position, &redex, &mut |n| redex_backward(n, s.rule, &redex, s.trace.as_ref(), oracle))?;
    retarget_local(&out, &s.before)
}
