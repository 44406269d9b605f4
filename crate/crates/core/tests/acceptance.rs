//! Acceptance run: one line per criterion.  Criteria listed in
//! `KNOWN_UNATTAINABLE` are reported honestly but do not fail the run; the
//! reason is printed next to them.

mod common;

use common::checks::{self, Tally};
use common::{sterms, wellformed_terms};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rcl::certify::{certify_sn, Certificate};
use rcl::deriv::{arr_e, arr_i, ax, check_derivation, cont, thin, Derivation};
use rcl::equiv::equivalent;
use rcl::reduce::{explore, Budget};
use rcl::subst::{mul_multiset, multiset_greater, step_subst, subst_redexes};
use rcl::term::{name, Term};
use rcl::types::{parse_strict, Inter, Strict, TypeEq};
use rcl::{parse_plain, parse_term, substitute, to_resource};
use std::time::Instant;

const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    4,
    "a step inside a substitution body can grow the enclosing substitution: \
     (x[a b/x])[P/a] has body sizes {1,1} and steps to (a b)[P/a] with {3}",
)];

fn t(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn st(s: &str) -> Strict {
    parse_strict(s).unwrap()
}

fn golden(tally: &mut Tally, ok: bool, what: &str) {
    tally.check(ok, || what.to_string());
}

fn embedding() -> Tally {
    let mut g = Tally::default();
    for (src, want) in [("\\x. y", "\\x. del x. y"), ("\\x. x x", "\\x. dup x as (x1,x2). x1 x2")] {
        let got = to_resource(&parse_plain(src).unwrap()).to_string();
        golden(&mut g, got == want, &format!("{src} embeds as {got}"));
    }
    g
}

fn substitution_goldens() -> Tally {
    let mut g = Tally::default();
    for (m, n, want) in [
        ("del x. y", "z", "del z. y"),
        ("dup x as (y,z). y z", "v", "dup v as (v1,v2). v1 v2"),
        ("del x. y", "dup z as (u,v). u v", "del z. y"),
        ("dup x as (y,z). y z", "del u. v", "dup u as (u1,u2). dup v as (v1,v2). (del u1. v1) (del u2. v2)"),
    ] {
        let got = substitute(&t(m), &t(n), "x").unwrap();
        golden(&mut g, equivalent(&got, &t(want)), &format!("{m}[{n}/x] gave {got}"));
    }
    let graph = explore(&t("dup u as (u1,u2). dup v as (v1,v2). (del u1. v1) (del u2. v2)"), Budget::default());
    golden(
        &mut g,
        graph.node_of(&t("dup v as (v1,v2). v1 (del u. v2)")).is_some(),
        "continuation does not reach dup v as (v1,v2). v1 (del u. v2)",
    );
    g
}

/// Random nested substitutions `(M[N1/b])[N2/a]` walked by random step
/// choices, plus every step from every small substitution term.
fn measure() -> (Tally, Tally) {
    let mut runner = TestRunner::deterministic();
    let shape = proptest::collection::vec(0usize..64, 40);
    let mut global = Tally::default();
    let mut local = Tally::default();
    let plain = |seed: &[usize], free: &[&str]| -> Term {
        // small deterministic builder over a seed stream
        fn go(seed: &[usize], i: &mut usize, depth: usize, free: &[&str], budget: &mut usize) -> Term {
            let pick = seed[*i % seed.len()];
            *i += 1;
            if *budget == 0 || pick % 3 == 0 {
                let choices = depth + free.len();
                let k = seed[*i % seed.len()] % choices;
                *i += 1;
                return if k < depth { Term::Var(name(&format!("x{k}"))) } else { Term::Var(name(free[k - depth])) };
            }
            *budget -= 1;
            if pick % 3 == 1 {
                Term::Abs(name(&format!("x{depth}")), Box::new(go(seed, i, depth + 1, free, budget)))
            } else {
                let f = go(seed, i, depth, free, budget);
                Term::App(Box::new(f), Box::new(go(seed, i, depth, free, budget)))
            }
        }
        go(seed, &mut 0, 0, free, &mut 8)
    };
    while global.checked < 10_000 {
        let seed = shape.new_tree(&mut runner).unwrap().current();
        let mut body = to_resource(&plain(&seed, &["a", "b", "c"]));
        for x in ["a", "b"] {
            if !rcl::term::occurs_free(&body, x) {
                body = Term::Era(name(x), Box::new(body));
            }
        }
        let body = Box::new(body);
        let n1 = to_resource(&plain(&seed[7..], &["p", "q"]));
        let n2 = to_resource(&plain(&seed[13..], &["r", "s"]));
        let mut cur = Term::Sub(Box::new(Term::Sub(body, Box::new(n1), name("b"))), Box::new(n2), name("a"));
        let mut k = 0;
        loop {
            let rs = subst_redexes(&cur);
            if rs.is_empty() {
                break;
            }
            let p = &rs[seed[k % seed.len()] % rs.len()];
            k += 1;
            let next = step_subst(&cur, p).unwrap();
            let (b, a) = (mul_multiset(&cur), mul_multiset(&next));
            global.check(multiset_greater(&b, &a), || format!("{cur} -> {next}: {b:?} to {a:?}"));
            let (rb, ra) = (mul_multiset(cur.at(p).unwrap()), mul_multiset(next.at(p).unwrap()));
            local.check(multiset_greater(&rb, &ra), || format!("{cur} at {p:?}"));
            cur = next;
        }
    }
    let (g2, l2) = checks::measure_steps(&sterms(9));
    for (into, from) in [(&mut global, g2), (&mut local, l2)] {
        into.checked += from.checked;
        into.failures += from.failures;
        if into.first.is_none() {
            into.first = from.first;
        }
    }
    (global, local)
}

fn typing_goldens() -> Tally {
    let valid = |d: &Derivation| check_derivation(d, TypeEq::Multiset).is_ok();
    let mut g = Tally::default();
    let ex1 = arr_e(
        arr_i(&name("x"), thin(&name("x"), ax(&name("y"), st("s"))).unwrap()).unwrap(),
        vec![ax(&name("z"), st("t"))],
        0,
    )
    .unwrap();
    golden(&mut g, valid(&ex1) && ex1.judgment() == "y:s, z:Top |- (\\x. del x. y) z : s", "first worked tree");
    let yz = arr_e(ax(&name("y"), st("t -> s")), vec![ax(&name("z"), st("t")); 2], 0).unwrap();
    let f = arr_i(&name("x"), cont(&name("x"), &name("y"), &name("z"), yz).unwrap()).unwrap();
    let ex2 = arr_e(f, vec![ax(&name("v"), st("t")), ax(&name("v"), st("t")), ax(&name("v"), st("t -> s"))], 0).unwrap();
    let want = Inter::from_vec(vec![st("t -> s"), st("t")]);
    golden(&mut g, valid(&ex2) && ex2.basis[&name("v")] == want, "second worked tree");
    let k = arr_i(&name("x"), arr_i(&name("y"), thin(&name("y"), ax(&name("x"), st("a"))).unwrap()).unwrap()).unwrap();
    golden(&mut g, valid(&k) && k.subject == t("\\x. \\y. del y. x"), "K image");
    let xy = arr_e(ax(&name("x"), st("b -> c -> d")), vec![ax(&name("y1"), st("b")); 2], 0).unwrap();
    let xyy = arr_e(xy, vec![ax(&name("y2"), st("c")); 2], 0).unwrap();
    let w = arr_i(&name("x"), arr_i(&name("y"), cont(&name("y"), &name("y1"), &name("y2"), xyy).unwrap()).unwrap()).unwrap();
    golden(&mut g, valid(&w) && w.subject == t("\\x. \\y. dup y as (y1,y2). x y1 y2"), "W inverse image");
    let Certificate::Certified(d) = certify_sn(&t("\\x. \\y. del y. x"), Budget::default()) else {
        golden(&mut g, false, "K image not certified");
        return g;
    };
    golden(&mut g, d.ty.to_string() == "a -> Top -> a", "K certificate shape");
    g
}

struct Row {
    id: u32,
    what: &'static str,
    tally: Tally,
    extra: String,
    secs: f64,
}

fn run(id: u32, what: &'static str, f: impl FnOnce() -> (Tally, String)) -> Row {
    let t0 = Instant::now();
    let (tally, extra) = f();
    let secs = t0.elapsed().as_secs_f64();
    let row = Row { id, what, tally, extra, secs };
    report(&row);
    row
}

fn report(r: &Row) {
    let known = KNOWN_UNATTAINABLE.iter().find(|(i, _)| *i == r.id);
    let verdict = if r.tally.ok() { "PASS" } else { "FAIL" };
    let mut line = format!("{verdict} [{:>2}] {}: {} ({:.1}s)", r.id, r.what, r.tally.summary(), r.secs);
    if !r.extra.is_empty() {
        line.push_str(&format!("; {}", r.extra));
    }
    if let (false, Some((_, why))) = (r.tally.ok(), known) {
        line.push_str(&format!(" [known unattainable: {why}]"));
    }
    println!("{line}");
}

fn main() {
    let budget = Budget { nodes: 10_000, steps: 100_000 };
    let rows = vec![
        run(1, "embedding goldens", || (embedding(), String::new())),
        run(2, "round trip, plain terms up to size 12 over 3 free names", || {
            (checks::round_trip(12, &[name("a"), name("b"), name("c")]), String::new())
        }),
        run(3, "substitution goldens and continuation", || (substitution_goldens(), String::new())),
        run(4, "substitution measure decreases on every step", || {
            let (global, local) = measure();
            (global, format!("contracted node alone: {}", local.summary()))
        }),
        run(5, "substitution confluence up to size 9", || (checks::subst_confluence(&sterms(9)), String::new())),
        run(6, "normal form iff no redex up to size 9", || (checks::nf_iff_irreducible(&wellformed_terms(9)), String::new())),
        run(7, "free variables and formation along graph edges", || {
            let mut corpus = wellformed_terms(7);
            corpus.extend(
                [
                    "(\\x. del x. y) z",
                    "(\\x. dup x as (y,z). y z) v",
                    "(\\x. del x. y) (dup z as (u,v). u v)",
                    "(\\x. dup x as (y,z). y z) (del u. v)",
                    "dup u as (u1,u2). dup v as (v1,v2). (del u1. v1) (del u2. v2)",
                ]
                .map(t),
            );
            corpus.push(common::omega());
            (checks::graph_preservation(&corpus, Budget { nodes: 2_000, steps: 20_000 }), String::new())
        }),
        run(8, "typing goldens", || (typing_goldens(), String::new())),
        run(9, "nf_type validates on normal forms up to size 9", || (checks::nf_typing(&wellformed_terms(9)), String::new())),
        run(10, "transport and expansion keep the judgment", || {
            let tally = checks::judgment_invariance(&wellformed_terms(7), 2_000, budget);
            let enough = tally.checked >= 1_000;
            let mut tally = tally;
            tally.check(enough, || "fewer than 1000 pairs".into());
            (tally, String::new())
        }),
        run(11, "certification iff strong normalisation up to size 8, Omega refuted", || {
            (checks::characterisation(&wellformed_terms(8), budget, 10_000), String::new())
        }),
    ];
    let unexpected: Vec<u32> = rows
        .iter()
        .filter(|r| !r.tally.ok() && !KNOWN_UNATTAINABLE.iter().any(|(i, _)| *i == r.id))
        .map(|r| r.id)
        .collect();
    let passed = rows.iter().filter(|r| r.tally.ok()).count();
    println!("{passed}/{} criteria pass", rows.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
