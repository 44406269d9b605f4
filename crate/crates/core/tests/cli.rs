use std::process::{Command, Output};

fn rcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn embed_prints_the_resource_term() {
    let o = rcl(&["embed", "\\x. x x"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "\\x. dup x as (x1,x2). x1 x2\n");
}

#[test]
fn reduce_prints_a_one_step_trace() {
    let o = rcl(&["reduce", "--strategy", "lo", "--max-steps", "10", "(\\x. del x. y) z"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "beta @ root : del z. y");
    assert!(lines[1].ends_with("del z. y"));
}

#[test]
fn omega_exceeds_and_is_refuted() {
    let omega = "(\\x. dup x as (a,b). a b) (\\y. dup y as (c,d). c d)";
    assert_eq!(rcl(&["reduce", "--max-steps", "5", omega]).status.code(), Some(1));
    let o = rcl(&["certify-sn", "--budget-nodes", "10000", "--format", "json", omega]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "not-sn");
}

#[test]
fn certificates_round_trip_through_check_deriv() {
    let dir = std::env::temp_dir().join(format!("rcl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let o = rcl(&["certify-sn", "--format", "json", "(\\x. dup x as (y,z). y z) v"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let file = dir.join("ex2.json");
    std::fs::write(&file, v["derivation"].to_string()).unwrap();
    let o = rcl(&["check-deriv", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("ok: "));

    let mut broken = v["derivation"].clone();
    broken["type"] = serde_json::json!("zzz");
    std::fs::write(&file, broken.to_string()).unwrap();
    let o = rcl(&["check-deriv", &format!("@{}", file.display())]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn terms_can_come_from_files() {
    let file = std::env::temp_dir().join(format!("rcl-term-{}.txt", std::process::id()));
    std::fs::write(&file, "\\x. y\n").unwrap();
    let o = rcl(&["embed", &format!("@{}", file.display())]);
    assert_eq!(stdout(&o), "\\x. del x. y\n");
    std::fs::remove_file(&file).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(rcl(&["check", "\\x. del x. x"]).status.code(), Some(1));
    assert_eq!(rcl(&["check", "(del x. y)[z/x]"]).status.code(), Some(0));
    assert_eq!(rcl(&["nf-type", "(\\x. x) y"]).status.code(), Some(1));
    assert_eq!(rcl(&["nf-type", "x (\\y. y)"]).status.code(), Some(0));
    assert_eq!(rcl(&["embed", "\\x."]).status.code(), Some(2));
    assert_eq!(rcl(&["reduce", "--strategy", "random", "x"]).status.code(), Some(2));
    assert_eq!(rcl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rcl(&["embed", "@/nonexistent/term"]).status.code(), Some(2));
}

#[test]
fn json_outputs_parse_and_repeat() {
    for args in [
        &["subst", "(dup x as (y,z). y z)[del u. v/x]"][..],
        &["graph", "(\\x. dup x as (a,b). a b) ((\\y. y) z)"],
        &["reduce", "--strategy", "exhaustive-first", "(\\x. x) ((\\y. y) z)"],
        &["check", "\\x. y"],
        &["project", "dup x as (a,b). a b"],
    ] {
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(args);
        let (a, b) = (rcl(&full), rcl(&full));
        assert_eq!(a.stdout, b.stdout);
        serde_json::from_slice::<serde_json::Value>(&a.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn idempotent_type_equality_flag() {
    let d = serde_json::json!({
        "rule": "ArrE", "term": "f v", "type": "s", "witness_index": 1,
        "ctx": [{"var": "f", "type": ["t -> s"]}, {"var": "v", "type": ["t", "t"]}],
        "premises": [
            {"rule": "Ax", "term": "f", "type": "t -> s", "ctx": [{"var": "f", "type": ["t -> s"]}], "premises": []},
            {"rule": "Ax", "term": "v", "type": "t", "ctx": [{"var": "v", "type": ["t"]}], "premises": []},
            {"rule": "Ax", "term": "v", "type": "t", "ctx": [{"var": "v", "type": ["t"]}], "premises": []},
            {"rule": "Ax", "term": "v", "type": "t", "ctx": [{"var": "v", "type": ["t"]}], "premises": []}
        ]
    })
    .to_string();
    assert_eq!(rcl(&["check-deriv", &d]).status.code(), Some(1));
    assert_eq!(rcl(&["check-deriv", "--type-eq", "idempotent", &d]).status.code(), Some(0));
}
