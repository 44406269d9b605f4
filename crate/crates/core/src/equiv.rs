//! Structural equivalence.
//!
//! Erasures only commute with erasures, and a run of consecutive duplications
//! is a forest: every tree splits one outside name into a set of leaves, and
//! any binary shape over that set is reachable by the axioms.  A canonical
//! key therefore records sorted erasure runs and, per duplication run, the
//! sorted tree sources.  Occurrences of leaves are recorded by their tree
//! only, which makes the leaf set of each tree implicit and unordered.

use crate::alpha::alpha_normalize;
use crate::term::{fv_list, Name, NameSupply, Term};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};
use thiserror::Error;

pub const DEFAULT_CLASS_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("equivalence class exceeds {cap} members")]
pub struct ClassCapExceeded {
    pub cap: usize,
}

/// A value that takes no part in comparison or hashing.
#[derive(Clone, Debug)]
struct Ghost<T>(T);

impl<T> PartialEq for Ghost<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl<T> Eq for Ghost<T> {}
impl<T> PartialOrd for Ghost<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Ghost<T> {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}
impl<T> Hash for Ghost<T> {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

/// Reference to a variable: bound at a binder depth (and, for duplication
/// runs, a tree index), or free.  Bound sorts before free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Ref {
    Bound(u32, u32),
    Free(Name),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Occ {
    r: Ref,
    orig: Ghost<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct QTree {
    source: Occ,
    leaves: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum QTerm {
    Var(Occ),
    Abs(Ghost<Name>, Box<QTerm>),
    App(Box<QTerm>, Box<QTerm>),
    Era(Vec<Occ>, Box<QTerm>),
    Dup(Vec<QTree>, Box<QTerm>),
}

/// Hashable identity of an equivalence class (structural equivalence and
/// renaming of bound names).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key(QTerm);

/// A tree of a duplication run: `source` is split into `leaves`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DupTree {
    pub source: Name,
    pub leaves: Vec<Name>,
}

/// Consecutive erasures from the top of `t`, and the first non-erasure below.
pub fn era_run(t: &Term) -> (Vec<Name>, &Term) {
    let mut xs = Vec::new();
    let mut cur = t;
    while let Term::Era(x, b) = cur {
        xs.push(x.clone());
        cur = b;
    }
    (xs, cur)
}

/// Consecutive duplications from the top of `t` as `(source, left, right)`.
pub fn dup_run(t: &Term) -> (Vec<(Name, Name, Name)>, &Term) {
    let mut ds = Vec::new();
    let mut cur = t;
    while let Term::Dup(x, l, r, b) = cur {
        ds.push((x.clone(), l.clone(), r.clone()));
        cur = b;
    }
    (ds, cur)
}

/// Group a duplication run into trees.  A split name that is the source of a
/// later duplication in the run is internal, not a leaf.
pub fn forest(dups: &[(Name, Name, Name)]) -> Vec<DupTree> {
    let mut trees: Vec<DupTree> = Vec::new();
    for (x, l, r) in dups {
        let home = trees.iter().position(|t| t.leaves.contains(x));
        match home {
            Some(i) => {
                let leaves = &mut trees[i].leaves;
                let j = leaves.iter().position(|y| y == x).unwrap();
                leaves.splice(j..=j, [l.clone(), r.clone()]);
            }
            None => trees.push(DupTree { source: x.clone(), leaves: vec![l.clone(), r.clone()] }),
        }
    }
    trees
}

/// Rebuild a duplication run over `body`: trees in the given order, each as a
/// right comb over its leaves in the given order.  Internal names come from
/// `supply`.
pub fn build_forest(trees: &[DupTree], body: Term, supply: &mut NameSupply) -> Term {
    let mut layers: Vec<(Name, Name, Name)> = Vec::new();
    for t in trees {
        assert!(t.leaves.len() >= 2, "a duplication tree has at least two leaves");
        let k = t.leaves.len();
        let mut src = t.source.clone();
        for (i, leaf) in t.leaves.iter().enumerate().take(k - 1) {
            let right = if i == k - 2 {
                t.leaves[k - 1].clone()
            } else {
                let base = t.source.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
                supply.fresh(if base.is_empty() { "i" } else { base })
            };
            layers.push((src.clone(), leaf.clone(), right.clone()));
            src = right;
        }
    }
    let mut out = body;
    for (x, l, r) in layers.into_iter().rev() {
        out = Term::Dup(x, l, r, Box::new(out));
    }
    out
}

struct KeyBuilder {
    env: Vec<(Name, Ref)>,
}

impl KeyBuilder {
    fn occ(&self, x: &Name) -> Occ {
        let r = self
            .env
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| Ref::Free(x.clone()));
        Occ { r, orig: Ghost(x.clone()) }
    }

    fn build(&mut self, t: &Term, level: u32) -> QTerm {
        match t {
            Term::Var(x) => QTerm::Var(self.occ(x)),
            Term::Abs(x, b) => {
                self.env.push((x.clone(), Ref::Bound(level, 0)));
                let body = self.build(b, level + 1);
                self.env.pop();
                QTerm::Abs(Ghost(x.clone()), Box::new(body))
            }
            Term::App(f, a) => {
                let f = self.build(f, level);
                let a = self.build(a, level);
                QTerm::App(Box::new(f), Box::new(a))
            }
            Term::Era(..) => {
                let (xs, body) = era_run(t);
                let mut occs: Vec<Occ> = xs.iter().map(|x| self.occ(x)).collect();
                occs.sort();
                QTerm::Era(occs, Box::new(self.build(body, level)))
            }
            Term::Dup(..) => {
                let (ds, body) = dup_run(t);
                let trees = forest(&ds);
                let mut sourced: Vec<(Occ, &DupTree)> =
                    trees.iter().map(|tr| (self.occ(&tr.source), tr)).collect();
                sourced.sort_by(|a, b| a.0.cmp(&b.0));
                let mut best: Option<QTerm> = None;
                for order in tie_orders(&sourced) {
                    let mark = self.env.len();
                    for (idx, &k) in order.iter().enumerate() {
                        for leaf in &sourced[k].1.leaves {
                            self.env.push((leaf.clone(), Ref::Bound(level, idx as u32)));
                        }
                    }
                    let kb = self.build(body, level + 1);
                    self.env.truncate(mark);
                    let qtrees = order
                        .iter()
                        .map(|&k| QTree {
                            source: sourced[k].0.clone(),
                            leaves: sourced[k].1.leaves.len() as u32,
                        })
                        .collect();
                    let cand = QTerm::Dup(qtrees, Box::new(kb));
                    if best.as_ref().map_or(true, |b| cand < *b) {
                        best = Some(cand);
                    }
                }
                best.unwrap()
            }
            Term::Sub(..) => panic!("structural keys are defined on resource terms only"),
        }
    }
}

/// All orderings of sorted trees that permute only within runs of equal
/// source references.
fn tie_orders(sourced: &[(Occ, &DupTree)]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, (o, _)) in sourced.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if sourced[g[0]].0 == *o => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for g in groups {
        let perms = permutations(&g);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for p in &perms {
                let mut v = prefix.clone();
                v.extend(p);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

/// Key of the equivalence class of a resource term.
pub fn key(t: &Term) -> Key {
    Key(KeyBuilder { env: Vec::new() }.build(t, 0))
}

pub fn equivalent(a: &Term, b: &Term) -> bool {
    key(a) == key(b)
}

enum Level {
    Abs(Name),
    Run(Vec<Vec<Name>>),
}

struct Renderer {
    supply: NameSupply,
    levels: Vec<Level>,
    /// original name -> rendered name, for binders and leaves
    map: HashMap<Name, Name>,
}

impl Renderer {
    fn occ(&mut self, o: &Occ) -> Name {
        match &o.r {
            Ref::Free(x) => x.clone(),
            Ref::Bound(l, i) => match &mut self.levels[*l as usize] {
                Level::Abs(x) => x.clone(),
                Level::Run(_) => {
                    let nm = self.supply.fresh("v");
                    if let Level::Run(trees) = &mut self.levels[*l as usize] {
                        trees[*i as usize].push(nm.clone());
                    }
                    self.map.insert(o.orig.0.clone(), nm.clone());
                    nm
                }
            },
        }
    }

    fn render(&mut self, q: &QTerm) -> Term {
        match q {
            QTerm::Var(o) => Term::Var(self.occ(o)),
            QTerm::Abs(orig, b) => {
                let x = self.supply.fresh("v");
                self.map.insert(orig.0.clone(), x.clone());
                self.levels.push(Level::Abs(x.clone()));
                let body = self.render(b);
                self.levels.pop();
                Term::Abs(x, Box::new(body))
            }
            QTerm::App(f, a) => {
                let f = self.render(f);
                let a = self.render(a);
                Term::App(Box::new(f), Box::new(a))
            }
            QTerm::Era(xs, b) => {
                let names: Vec<Name> = xs.iter().map(|o| self.occ(o)).collect();
                let mut out = self.render(b);
                for x in names.into_iter().rev() {
                    out = Term::Era(x, Box::new(out));
                }
                out
            }
            QTerm::Dup(trees, b) => {
                self.levels.push(Level::Run(vec![Vec::new(); trees.len()]));
                let body = self.render(b);
                let Some(Level::Run(leaves)) = self.levels.pop() else { unreachable!() };
                let dts: Vec<DupTree> = trees
                    .iter()
                    .zip(leaves)
                    .map(|(t, ls)| {
                        debug_assert_eq!(ls.len() as u32, t.leaves);
                        DupTree { source: self.occ(&t.source), leaves: ls }
                    })
                    .collect();
                let mut supply = std::mem::take(&mut self.supply);
                let out = build_forest(&dts, body, &mut supply);
                self.supply = supply;
                out
            }
        }
    }
}

fn free_names_of(q: &QTerm, out: &mut HashSet<Name>) {
    let mut o = |x: &Occ| {
        if let Ref::Free(n) = &x.r {
            out.insert(n.clone());
        }
    };
    match q {
        QTerm::Var(x) => o(x),
        QTerm::Abs(_, b) => free_names_of(b, out),
        QTerm::App(f, a) => {
            free_names_of(f, out);
            free_names_of(a, out);
        }
        QTerm::Era(xs, b) => {
            xs.iter().for_each(&mut o);
            free_names_of(b, out);
        }
        QTerm::Dup(ts, b) => {
            ts.iter().for_each(|t| o(&t.source));
            free_names_of(b, out);
        }
    }
}

impl Key {
    /// Render the representative term of this class.
    pub fn render(&self) -> Term {
        self.render_with_map().0
    }

    fn render_with_map(&self) -> (Term, HashMap<Name, Name>) {
        let mut free = HashSet::new();
        free_names_of(&self.0, &mut free);
        let mut supply = NameSupply::new();
        for x in &free {
            supply.reserve(x);
        }
        let mut r = Renderer { supply, levels: Vec::new(), map: HashMap::new() };
        let t = r.render(&self.0);
        (t, r.map)
    }
}

/// Deterministic representative of the equivalence class of `t`.
pub fn equiv_canonical(t: &Term) -> Term {
    key(t).render()
}

/// The representative together with a map from the binder and leaf names of
/// `t` to the corresponding names in the representative.  Two equivalent
/// terms renamed through their maps agree on every leaf and binder name.
pub fn canonical_alignment(t: &Term) -> (Term, HashMap<Name, Name>) {
    key(t).render_with_map()
}

/// One application of an axiom anywhere in `t`, in either direction.
pub fn axiom_neighbours(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    at_root(t, &mut out);
    let wrap = |out: &mut Vec<Term>, inner: Vec<Term>, f: &dyn Fn(Term) -> Term| {
        out.extend(inner.into_iter().map(f));
    };
    match t {
        Term::Var(_) => {}
        Term::Abs(x, b) => wrap(&mut out, axiom_neighbours(b), &|n| Term::Abs(x.clone(), Box::new(n))),
        Term::Era(x, b) => wrap(&mut out, axiom_neighbours(b), &|n| Term::Era(x.clone(), Box::new(n))),
        Term::Dup(x, l, r, b) => wrap(&mut out, axiom_neighbours(b), &|n| {
            Term::Dup(x.clone(), l.clone(), r.clone(), Box::new(n))
        }),
        Term::App(f, a) => {
            wrap(&mut out, axiom_neighbours(f), &|n| Term::App(Box::new(n), a.clone()));
            wrap(&mut out, axiom_neighbours(a), &|n| Term::App(f.clone(), Box::new(n)));
        }
        Term::Sub(..) => {}
    }
    out
}

fn at_root(t: &Term, out: &mut Vec<Term>) {
    match t {
        Term::Era(x, b) => {
            if let Term::Era(y, m) = &**b {
                out.push(Term::Era(y.clone(), Box::new(Term::Era(x.clone(), m.clone()))));
            }
        }
        Term::Dup(x, x1, x2, b) => {
            out.push(Term::Dup(x.clone(), x2.clone(), x1.clone(), b.clone()));
            if let Term::Dup(y, y1, y2, m) = &**b {
                if y == x1 {
                    // x<y,z (y<u,v M)  ==  x<y,u (y<z,v M)
                    out.push(Term::Dup(
                        x.clone(),
                        x1.clone(),
                        y1.clone(),
                        Box::new(Term::Dup(y.clone(), x2.clone(), y2.clone(), m.clone())),
                    ));
                }
                if y != x1 && y != x2 && x != y1 && x != y2 {
                    out.push(Term::Dup(
                        y.clone(),
                        y1.clone(),
                        y2.clone(),
                        Box::new(Term::Dup(x.clone(), x1.clone(), x2.clone(), m.clone())),
                    ));
                }
            }
        }
        _ => {}
    }
}

/// Every member of the class of `t`, up to renaming of bound names, found by
/// closing under single axiom applications.  Members are returned with
/// normalised binder names, the input's own representative first.
pub fn equiv_class(t: &Term, cap: usize) -> Result<Vec<Term>, ClassCapExceeded> {
    let start = alpha_normalize(t);
    let mut seen: HashSet<Term> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    order.push(start.clone());
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        for v in axiom_neighbours(&u) {
            let v = alpha_normalize(&v);
            if seen.insert(v.clone()) {
                if seen.len() > cap {
                    return Err(ClassCapExceeded { cap });
                }
                order.push(v.clone());
                queue.push_back(v);
            }
        }
    }
    Ok(order)
}

/// Names bound by a duplication run that are sources of another duplication
/// in the same run.
pub fn internal_names(dups: &[(Name, Name, Name)]) -> Vec<Name> {
    let sources: HashSet<&Name> = dups.iter().map(|(x, _, _)| x).collect();
    dups.iter()
        .flat_map(|(_, l, r)| [l, r])
        .filter(|n| sources.contains(n))
        .cloned()
        .collect()
}

/// Free variables of a subterm, as a set (helper for side conditions).
pub fn fv_contains(t: &Term, x: &Name) -> bool {
    fv_list(t).contains(x)
}
