//! Reduction modulo structural equivalence.
//!
//! Redexes are found on the given term by exposing, at each node, every
//! arrangement of an adjacent erasure or duplication run that can put a rule's
//! left-hand side in place.  A duplication can only be innermost in its run
//! when both its splits are leaves, so every pair of leaves of a tree is tried
//! as the innermost duplication.

use crate::equiv::{build_forest, dup_run, era_run, forest, key, DupTree, Key};
use crate::nf::is_normal_form;
use crate::subst::{substitute_traced, SubstTrace};
use crate::term::{fv_list, path_string, Name, NameSupply, Path, Term};
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Beta,
    Gamma1,
    Gamma2,
    Gamma3,
    Omega1,
    Omega2,
    Omega3,
    GammaOmega1,
    GammaOmega2,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::Beta,
        Rule::Gamma1,
        Rule::Gamma2,
        Rule::Gamma3,
        Rule::Omega1,
        Rule::Omega2,
        Rule::Omega3,
        Rule::GammaOmega1,
        Rule::GammaOmega2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::Beta => "beta",
            Rule::Gamma1 => "gamma1",
            Rule::Gamma2 => "gamma2",
            Rule::Gamma3 => "gamma3",
            Rule::Omega1 => "omega1",
            Rule::Omega2 => "omega2",
            Rule::Omega3 => "omega3",
            Rule::GammaOmega1 => "gamma-omega1",
            Rule::GammaOmega2 => "gamma-omega2",
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl std::str::FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Rule::ALL.into_iter().find(|r| r.id() == s).ok_or_else(|| format!("unknown rule '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("rule {} does not apply at {}", .0.id(), path_string(.1))]
    NotApplicable(Rule, Path),
    #[error("step was computed for a different term")]
    Stale,
    #[error("substitution failed: {0}")]
    Substitution(String),
}

/// One reduction step.  `exposed` is the member of the class of `before` in
/// which the rule's left-hand side sits at `position`; it equals `before`
/// when no rearrangement was needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    /// Node of `before` whose neighbourhood was rearranged.
    pub anchor: Path,
    pub position: Path,
    pub before: Term,
    pub exposed: Term,
    pub after: Term,
    /// Evaluation trace of the substitution, for beta steps.
    pub trace: Option<SubstTrace>,
}

impl ReductionStep {
    pub fn adjusted(&self) -> bool {
        self.exposed != self.before
    }

    /// `rule @ position : term`
    pub fn trace_line(&self) -> String {
        format!("{} @ {} : {}", self.rule.id(), path_string(&self.position), self.after)
    }
}

fn era_stack(xs: &[Name], body: Term) -> Term {
    xs.iter().rev().fold(body, |acc, x| Term::Era(x.clone(), Box::new(acc)))
}

/// The erasure run `xs` over `body` with `xs[j]` moved to the front.
fn era_front(xs: &[Name], j: usize, body: &Term) -> Term {
    let mut rest = xs.to_vec();
    let y = rest.remove(j);
    Term::Era(y, Box::new(era_stack(&rest, body.clone())))
}

fn contains(t: &Term, x: &Name) -> bool {
    fv_list(t).contains(x)
}

/// Contract the left-hand side of `rule` found at `pos` in `t`.
pub fn apply_rule(
    t: &Term,
    pos: &[u8],
    rule: Rule,
    supply: &mut NameSupply,
) -> Result<(Term, Option<SubstTrace>), ReduceError> {
    let na = || ReduceError::NotApplicable(rule, pos.to_vec());
    let node = t.at(pos).ok_or_else(na)?;
    let mut trace = None;
    let contractum = match (rule, node) {
        (Rule::Beta, Term::App(f, n)) => match &**f {
            Term::Abs(x, m) => {
                let tr = substitute_traced(m, n, x, supply)
                    .map_err(|e| ReduceError::Substitution(e.to_string()))?;
                let out = tr.end().clone();
                trace = Some(tr);
                out
            }
            _ => return Err(na()),
        },
        (Rule::Gamma1, Term::Dup(x, x1, x2, b)) => match &**b {
            Term::Abs(y, m) => Term::Abs(
                y.clone(),
                Box::new(Term::Dup(x.clone(), x1.clone(), x2.clone(), m.clone())),
            ),
            _ => return Err(na()),
        },
        (Rule::Gamma2 | Rule::Gamma3, Term::Dup(x, x1, x2, b)) => match &**b {
            Term::App(m, n) => {
                let dup = |body: &Term| {
                    Box::new(Term::Dup(x.clone(), x1.clone(), x2.clone(), Box::new(body.clone())))
                };
                if rule == Rule::Gamma2 && !contains(n, x1) && !contains(n, x2) {
                    Term::App(dup(m), n.clone())
                } else if rule == Rule::Gamma3 && !contains(m, x1) && !contains(m, x2) {
                    Term::App(m.clone(), dup(n))
                } else {
                    return Err(na());
                }
            }
            _ => return Err(na()),
        },
        (Rule::Omega1, Term::Abs(x, b)) => match &**b {
            Term::Era(y, m) if y != x => {
                Term::Era(y.clone(), Box::new(Term::Abs(x.clone(), m.clone())))
            }
            _ => return Err(na()),
        },
        (Rule::Omega2, Term::App(f, n)) => match &**f {
            Term::Era(x, m) => Term::Era(x.clone(), Box::new(Term::App(m.clone(), n.clone()))),
            _ => return Err(na()),
        },
        (Rule::Omega3, Term::App(m, a)) => match &**a {
            Term::Era(x, n) => Term::Era(x.clone(), Box::new(Term::App(m.clone(), n.clone()))),
            _ => return Err(na()),
        },
        (Rule::GammaOmega1, Term::Dup(x, x1, x2, b)) => match &**b {
            Term::Era(y, m) if y != x1 && y != x2 => Term::Era(
                y.clone(),
                Box::new(Term::Dup(x.clone(), x1.clone(), x2.clone(), m.clone())),
            ),
            _ => return Err(na()),
        },
        (Rule::GammaOmega2, Term::Dup(x, x1, x2, b)) => match &**b {
            Term::Era(y, m) if y == x1 => m.rename_free(x2, x),
            _ => return Err(na()),
        },
        _ => return Err(na()),
    };
    let after = t.replace_at(pos, contractum).ok_or_else(na)?;
    Ok((after, trace))
}

struct Candidate {
    anchor: Path,
    /// Replacement for the subterm at `anchor`, when rearranged.
    exposed_sub: Option<Term>,
    rel: Path,
    rule: Rule,
}

fn collect(t: &Term, path: &mut Vec<u8>, under_dup: bool, supply: &mut NameSupply, out: &mut Vec<Candidate>) {
    let here = path.clone();
    match t {
        Term::Var(_) => {}
        Term::Abs(x, b) => {
            if let Term::Era(..) = &**b {
                let (xs, body) = era_run(b);
                for (j, y) in xs.iter().enumerate() {
                    if y != x {
                        let sub = (j > 0).then(|| Term::Abs(x.clone(), Box::new(era_front(&xs, j, body))));
                        out.push(Candidate { anchor: here.clone(), exposed_sub: sub, rel: vec![], rule: Rule::Omega1 });
                    }
                }
            }
        }
        Term::App(f, a) => {
            if let Term::Abs(..) = &**f {
                out.push(Candidate { anchor: here.clone(), exposed_sub: None, rel: vec![], rule: Rule::Beta });
            }
            if let Term::Era(..) = &**f {
                let (xs, body) = era_run(f);
                for j in 0..xs.len() {
                    let sub = (j > 0).then(|| Term::App(Box::new(era_front(&xs, j, body)), a.clone()));
                    out.push(Candidate { anchor: here.clone(), exposed_sub: sub, rel: vec![], rule: Rule::Omega2 });
                }
            }
            if let Term::Era(..) = &**a {
                let (xs, body) = era_run(a);
                for j in 0..xs.len() {
                    let sub = (j > 0).then(|| Term::App(f.clone(), Box::new(era_front(&xs, j, body))));
                    out.push(Candidate { anchor: here.clone(), exposed_sub: sub, rel: vec![], rule: Rule::Omega3 });
                }
            }
        }
        Term::Dup(..) if !under_dup => dup_candidates(t, &here, supply, out),
        _ => {}
    }
    let is_dup = matches!(t, Term::Dup(..));
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i as u8);
        collect(c, path, is_dup, supply, out);
        path.pop();
    }
}

/// Rebuild the run so that `dup c as (l1,l2)` sits directly over `body`.
/// Returns the rebuilt run and the depth of that innermost duplication.
fn expose_cherry(
    dups: &[(Name, Name, Name)],
    trees: &[DupTree],
    tree: usize,
    l1: &Name,
    l2: &Name,
    body: Term,
    supply: &mut NameSupply,
) -> (Term, usize) {
    let mut outer: Vec<DupTree> =
        trees.iter().enumerate().filter(|(i, _)| *i != tree).map(|(_, t)| t.clone()).collect();
    let tr = &trees[tree];
    let c = if tr.leaves.len() == 2 {
        tr.source.clone()
    } else {
        let base = tr.source.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
        let i = supply.fresh(if base.is_empty() { "i" } else { base });
        let mut leaves: Vec<Name> = tr.leaves.iter().filter(|n| *n != l1 && *n != l2).cloned().collect();
        leaves.push(i.clone());
        outer.push(DupTree { source: tr.source.clone(), leaves });
        i
    };
    let depth = outer.iter().map(|t| t.leaves.len() - 1).sum();
    debug_assert_eq!(depth + 1, dups.len());
    let inner = Term::Dup(c, l1.clone(), l2.clone(), Box::new(body));
    (build_forest(&outer, inner, supply), depth)
}

fn dup_candidates(t: &Term, here: &Path, supply: &mut NameSupply, out: &mut Vec<Candidate>) {
    let (dups, body) = dup_run(t);
    let trees = forest(&dups);
    let last = dups.last().unwrap().clone();
    let mut push = |l1: &Name, l2: &Name, tree: usize, new_body: Term, rule: Rule, out: &mut Vec<Candidate>| {
        let in_place = last.1 == *l1 && last.2 == *l2 && new_body == *body;
        let (sub, depth) = if in_place {
            (None, dups.len() - 1)
        } else {
            let (s, d) = expose_cherry(&dups, &trees, tree, l1, l2, new_body, supply);
            (Some(s), d)
        };
        out.push(Candidate { anchor: here.clone(), exposed_sub: sub, rel: vec![0; depth], rule });
    };
    for (ti, tr) in trees.iter().enumerate() {
        for i in 0..tr.leaves.len() {
            for j in (i + 1)..tr.leaves.len() {
                let (a, b) = (&tr.leaves[i], &tr.leaves[j]);
                match body {
                    Term::Abs(..) => push(a, b, ti, body.clone(), Rule::Gamma1, out),
                    Term::App(m, n) => {
                        let (fm, fn_) = (fv_list(m), fv_list(n));
                        if !fn_.contains(a) && !fn_.contains(b) {
                            push(a, b, ti, body.clone(), Rule::Gamma2, out);
                        }
                        if !fm.contains(a) && !fm.contains(b) {
                            push(a, b, ti, body.clone(), Rule::Gamma3, out);
                        }
                    }
                    Term::Era(..) => {
                        let (ys, inner) = era_run(body);
                        for (k, y) in ys.iter().enumerate() {
                            let nb = era_front(&ys, k, inner);
                            if y == a {
                                push(a, b, ti, nb, Rule::GammaOmega2, out);
                            } else if y == b {
                                push(b, a, ti, nb, Rule::GammaOmega2, out);
                            } else {
                                push(a, b, ti, nb, Rule::GammaOmega1, out);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }
}

/// Every step available from any member of the class of `t`, one per rule
/// and resulting class, sorted by rule then position.
pub fn enumerate_redexes(t: &Term) -> Vec<ReductionStep> {
    enumerate_with_keys(t).into_iter().map(|(s, _)| s).collect()
}

pub(crate) fn enumerate_with_keys(t: &Term) -> Vec<(ReductionStep, Key)> {
    let mut supply = NameSupply::avoiding([t]);
    let mut cands = Vec::new();
    collect(t, &mut Vec::new(), false, &mut supply, &mut cands);
    cands.sort_by(|a, b| (a.rule, &a.anchor).cmp(&(b.rule, &b.anchor)));
    let mut seen: HashSet<(Rule, Key)> = HashSet::new();
    let mut out = Vec::new();
    for c in cands {
        let exposed = match c.exposed_sub {
            Some(sub) => t.replace_at(&c.anchor, sub).expect("anchor exists"),
            None => t.clone(),
        };
        let mut position = c.anchor.clone();
        position.extend(&c.rel);
        let mut local = supply.clone();
        local.reserve_all(&exposed);
        let Ok((after, trace)) = apply_rule(&exposed, &position, c.rule, &mut local) else {
            debug_assert!(false, "exposed candidate must apply");
            continue;
        };
        let k = key(&after);
        if seen.insert((c.rule, k.clone())) {
            out.push((
                ReductionStep { rule: c.rule, anchor: c.anchor, position, before: t.clone(), exposed, after, trace },
                k,
            ));
        }
    }
    out
}

/// Re-check a step against `t` and return its contractum.
pub fn reduce_step(t: &Term, s: &ReductionStep) -> Result<Term, ReduceError> {
    if s.before != *t || key(&s.exposed) != key(t) {
        return Err(ReduceError::Stale);
    }
    let mut supply = NameSupply::avoiding([&s.exposed]);
    let (after, _) = apply_rule(&s.exposed, &s.position, s.rule, &mut supply)?;
    if key(&after) != key(&s.after) {
        return Err(ReduceError::Stale);
    }
    Ok(s.after.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Strategy {
    LeftmostOutermost,
    ExhaustiveFirst,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lo" | "leftmost-outermost" => Ok(Strategy::LeftmostOutermost),
            "ef" | "exhaustive-first" => Ok(Strategy::ExhaustiveFirst),
            other => Err(format!("unknown strategy '{other}' (expected lo or exhaustive-first)")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Normal(Term, Vec<ReductionStep>),
    Exceeded(Vec<ReductionStep>),
}

impl Outcome {
    pub fn trace(&self) -> &[ReductionStep] {
        match self {
            Outcome::Normal(_, tr) | Outcome::Exceeded(tr) => tr,
        }
    }
}

/// Leftmost-outermost choice: smallest anchor in preorder, then rule order.
pub fn leftmost_outermost(steps: &[ReductionStep]) -> Option<&ReductionStep> {
    steps.iter().min_by(|a, b| (&a.anchor, a.rule).cmp(&(&b.anchor, b.rule)))
}

/// Reduce to normal form.  Structural rearrangements do not count as steps.
/// `exhaustive-first` searches breadth-first in redex-list order and returns
/// a shortest path to a normal form; `node_budget` bounds that search.
pub fn normalize(t: &Term, strategy: Strategy, max_steps: usize, node_budget: usize) -> Outcome {
    match strategy {
        Strategy::LeftmostOutermost => {
            let mut cur = t.clone();
            let mut trace = Vec::new();
            loop {
                let steps = enumerate_redexes(&cur);
                let Some(s) = leftmost_outermost(&steps) else {
                    return Outcome::Normal(cur, trace);
                };
                if trace.len() == max_steps {
                    return Outcome::Exceeded(trace);
                }
                cur = s.after.clone();
                trace.push(s.clone());
            }
        }
        Strategy::ExhaustiveFirst => {
            let mut parent: Vec<Option<(usize, ReductionStep)>> = vec![None];
            let mut terms = vec![(t.clone(), 0usize)];
            let mut seen: HashSet<Key> = HashSet::from([key(t)]);
            let mut queue = VecDeque::from([0usize]);
            let mut deepest = 0;
            while let Some(i) = queue.pop_front() {
                let (cur, depth) = terms[i].clone();
                if depth > terms[deepest].1 {
                    deepest = i;
                }
                let steps = enumerate_with_keys(&cur);
                if steps.is_empty() {
                    return Outcome::Normal(cur, path_to(&parent, i));
                }
                if depth == max_steps || terms.len() >= node_budget {
                    continue;
                }
                for (s, k) in steps {
                    if seen.insert(k) {
                        terms.push((s.after.clone(), depth + 1));
                        parent.push(Some((i, s)));
                        queue.push_back(terms.len() - 1);
                    }
                }
            }
            Outcome::Exceeded(path_to(&parent, deepest))
        }
    }
}

fn path_to(parent: &[Option<(usize, ReductionStep)>], mut i: usize) -> Vec<ReductionStep> {
    let mut out = Vec::new();
    while let Some((p, s)) = &parent[i] {
        out.push(s.clone());
        i = *p;
    }
    out.reverse();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub nodes: usize,
    pub steps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { nodes: 50_000, steps: 250_000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphNode {
    #[serde(serialize_with = "crate::term::ser_term")]
    pub term: Term,
    pub normal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub rule: Rule,
    #[serde(serialize_with = "crate::term::ser_path")]
    pub position: Path,
}

/// Reduction graph over class representatives.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionGraph {
    pub root: usize,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    /// All reachable classes were expanded.
    pub complete: bool,
    #[serde(skip)]
    index: HashMap<Key, usize>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
}

impl ReductionGraph {
    fn new() -> Self {
        ReductionGraph { root: 0, nodes: Vec::new(), edges: Vec::new(), complete: false, index: HashMap::new(), out: Vec::new() }
    }

    fn intern(&mut self, k: Key) -> (usize, bool) {
        if let Some(&i) = self.index.get(&k) {
            return (i, false);
        }
        let term = k.render();
        let normal = is_normal_form(&term);
        self.nodes.push(GraphNode { term, normal });
        self.out.push(Vec::new());
        self.index.insert(k, self.nodes.len() - 1);
        (self.nodes.len() - 1, true)
    }

    pub fn node_of(&self, t: &Term) -> Option<usize> {
        self.index.get(&key(t)).copied()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = &GraphEdge> {
        self.out[i].iter().map(move |&e| &self.edges[e])
    }

    fn add_edge(&mut self, from: usize, to: usize, rule: Rule, position: Path) {
        self.edges.push(GraphEdge { from, to, rule, position });
        self.out[from].push(self.edges.len() - 1);
    }

    /// Expand the classes of node `i`, returning newly created nodes.
    fn expand(&mut self, i: usize) -> Vec<usize> {
        let mut fresh = Vec::new();
        for (s, k) in enumerate_with_keys(&self.nodes[i].term.clone()) {
            let (j, new) = self.intern(k);
            if new {
                fresh.push(j);
            }
            self.add_edge(i, j, s.rule, s.position);
        }
        fresh
    }
}

/// Breadth-first exploration of the whole graph, cycles included.
pub fn explore(t: &Term, budget: Budget) -> ReductionGraph {
    let mut g = ReductionGraph::new();
    let (root, _) = g.intern(key(t));
    g.root = root;
    let mut queue = VecDeque::from([root]);
    let mut edges = 0;
    while let Some(i) = queue.pop_front() {
        if g.nodes.len() > budget.nodes || edges > budget.steps {
            return g;
        }
        let fresh = g.expand(i);
        edges = g.edges.len();
        queue.extend(fresh);
    }
    g.complete = true;
    g
}

#[derive(Debug, Clone)]
pub struct Cycle {
    /// Class representatives from the root; the last one repeats `path[repeat]`.
    pub path: Vec<Term>,
    pub rules: Vec<Rule>,
    pub repeat: usize,
}

#[derive(Debug, Clone)]
pub enum SnVerdict {
    Sn(ReductionGraph),
    NonSn(Cycle),
    Unknown { nodes: usize, steps: usize },
}

/// Decide strong normalisation by depth-first search over classes: a class
/// revisited on the current path is a cycle; a fully explored acyclic graph
/// means every reduction terminates.
pub fn classify_sn(t: &Term, budget: Budget) -> SnVerdict {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut g = ReductionGraph::new();
    let (root, _) = g.intern(key(t));
    g.root = root;
    let mut mark: Vec<Mark> = vec![Mark::Open];
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    let mut expanded: Vec<bool> = vec![false];
    let mut steps = 0;
    while let Some(&mut (i, ref mut next)) = stack.last_mut() {
        if !expanded[i] {
            expanded[i] = true;
            g.expand(i);
            steps += g.out[i].len();
            while mark.len() < g.nodes.len() {
                mark.push(Mark::Open);
                expanded.push(false);
            }
            if g.nodes.len() > budget.nodes || steps > budget.steps {
                return SnVerdict::Unknown { nodes: g.nodes.len(), steps };
            }
        }
        if *next < g.out[i].len() {
            let e = g.out[i][*next];
            *next += 1;
            let j = g.edges[e].to;
            if stack.iter().any(|&(k, _)| k == j) {
                let mut path: Vec<Term> = stack.iter().map(|&(k, _)| g.nodes[k].term.clone()).collect();
                let mut rules: Vec<Rule> = stack
                    .windows(2)
                    .map(|w| g.edges[g.out[w[0].0][w[0].1 - 1]].rule)
                    .collect();
                rules.push(g.edges[e].rule);
                path.push(g.nodes[j].term.clone());
                let repeat = stack.iter().position(|&(k, _)| k == j).unwrap();
                return SnVerdict::NonSn(Cycle { path, rules, repeat });
            }
            if mark[j] != Mark::Done {
                stack.push((j, 0));
            }
        } else {
            mark[i] = Mark::Done;
            stack.pop();
        }
    }
    g.complete = true;
    SnVerdict::Sn(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is incomplete")]
    Incomplete,
    #[error("graph has a cycle")]
    Cyclic,
}

/// Length of the longest path from the root of a complete acyclic graph.
pub fn longest_path(g: &ReductionGraph) -> Result<usize, GraphError> {
    if !g.complete {
        return Err(GraphError::Incomplete);
    }
    let n = g.nodes.len();
    let mut best: Vec<Option<usize>> = vec![None; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<(usize, usize)> = vec![(g.root, 0)];
    on_stack[g.root] = true;
    while let Some(&mut (i, ref mut k)) = stack.last_mut() {
        if *k < g.out[i].len() {
            let j = g.edges[g.out[i][*k]].to;
            *k += 1;
            if on_stack[j] {
                return Err(GraphError::Cyclic);
            }
            if best[j].is_none() {
                on_stack[j] = true;
                stack.push((j, 0));
            }
        } else {
            let v = g.out[i].iter().map(|&e| best[g.edges[e].to].unwrap() + 1).max().unwrap_or(0);
            best[i] = Some(v);
            on_stack[i] = false;
            stack.pop();
        }
    }
    Ok(best[g.root].unwrap())
}

/// Longest reduction length from every node (complete acyclic graphs only).
pub fn heights(g: &ReductionGraph) -> Result<Vec<usize>, GraphError> {
    if !g.complete {
        return Err(GraphError::Incomplete);
    }
    let mut out = vec![0; g.nodes.len()];
    for i in 0..g.nodes.len() {
        let mut sub = g.clone();
        sub.root = i;
        out[i] = longest_path(&sub)?;
    }
    Ok(out)
}
