//! Property sweeps at sizes that keep the suite quick; the acceptance
//! harness runs the same checks at full size.

mod common;

use common::checks;
use common::{derivable, raw_terms, sterms, wellformed_terms};
use rcl::check_linear;
use rcl::reduce::Budget;
use rcl::term::name;

#[test]
fn round_trip_small() {
    let free = [name("a"), name("b"), name("c")];
    let t = checks::round_trip(8, &free);
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn formation_matches_the_rules() {
    let names = [name("x"), name("y"), name("z")];
    let mut n = 0;
    for t in raw_terms(5, &names) {
        let want = derivable(&t);
        let got = check_linear(&t);
        assert_eq!(got.ok, want.is_some(), "{t}: {:?}", got.violations);
        if let Some(fv) = want {
            assert_eq!(rcl::term::fv_set(&t), fv, "{t}");
        }
        n += 1;
    }
    assert!(n > 100_000);
}

#[test]
fn substitution_confluence_small() {
    let t = checks::subst_confluence(&sterms(7));
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn normal_forms_small() {
    let terms = wellformed_terms(7);
    let t = checks::nf_iff_irreducible(&terms);
    assert!(t.ok(), "{}", t.summary());
    let t = checks::nf_typing(&terms);
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn preservation_small() {
    let t = checks::graph_preservation(&wellformed_terms(6), Budget { nodes: 2_000, steps: 20_000 });
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn local_measure_drops() {
    let (_, local) = checks::measure_steps(&sterms(7));
    assert!(local.ok(), "{}", local.summary());
}

#[test]
fn transport_small() {
    let t = checks::judgment_invariance(&wellformed_terms(6), 500, Budget::default());
    assert!(t.ok() && t.checked >= 500, "{}", t.summary());
}
