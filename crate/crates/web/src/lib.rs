//! Browser bindings: embed a lambda term, reduce it and draw its reduction
//! graph, certify strong normalisation.  Every export returns a JSON string
//! or throws the error message.

use rcl::certify::{certify_sn, Certificate};
use rcl::deriv::to_json;
use rcl::reduce::{explore, longest_path, normalize, Budget, Outcome, Strategy};
use rcl::{check_linear, parse_plain, parse_term, to_resource, Term};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn resource_term(src: &str) -> Result<Term, String> {
    let t = parse_term(src).map_err(|e| e.to_string())?;
    match check_linear(&t).violations.first() {
        None => Ok(t),
        Some(v) => Err(format!("not a resource term: {}", v.detail)),
    }
}

/// Accept either syntax: resource terms as they are, plain terms embedded.
fn any_term(src: &str) -> Result<Term, String> {
    resource_term(src).or_else(|e| parse_plain(src).map(|p| to_resource(&p)).map_err(|_| e))
}

pub fn embed_json(src: &str) -> Result<String, String> {
    let plain = parse_plain(src).map_err(|e| e.to_string())?;
    Ok(json!({ "term": to_resource(&plain).to_string() }).to_string())
}

pub fn reduce_json(src: &str, budget: usize) -> Result<String, String> {
    let t = any_term(src)?;
    let out = normalize(&t, Strategy::LeftmostOutermost, budget, budget);
    let trace: Vec<_> = out.trace().iter().map(|s| s.trace_line()).collect();
    let normal = match &out {
        Outcome::Normal(nf, _) => Some(nf.to_string()),
        Outcome::Exceeded(_) => None,
    };
    let g = explore(&t, Budget { nodes: budget, steps: budget * 10 });
    let mut graph = serde_json::to_value(&g).map_err(|e| e.to_string())?;
    graph["longest_path"] = json!(longest_path(&g).ok());
    Ok(json!({ "term": t.to_string(), "trace": trace, "normal_form": normal, "graph": graph }).to_string())
}

pub fn certify_json(src: &str, budget: usize) -> Result<String, String> {
    let t = any_term(src)?;
    let v = match certify_sn(&t, Budget { nodes: budget, steps: budget * 10 }) {
        Certificate::Certified(d) => json!({
            "verdict": "certified",
            "judgment": d.judgment(),
            "tree": d.to_string(),
            "derivation": to_json(&d),
        }),
        Certificate::NotSn(c) => json!({
            "verdict": "not-sn",
            "cycle": c.path.iter().map(Term::to_string).collect::<Vec<_>>(),
            "rules": c.rules.iter().map(|r| r.id()).collect::<Vec<_>>(),
        }),
        Certificate::Unknown(why) => json!({ "verdict": "unknown", "reason": why }),
    };
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn embed(src: &str) -> Result<String, JsError> {
    embed_json(src).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reduce(src: &str, budget: usize) -> Result<String, JsError> {
    reduce_json(src, budget).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certify(src: &str, budget: usize) -> Result<String, JsError> {
    certify_json(src, budget).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn embeds() {
        assert_eq!(parse(embed_json("\\x. x x").unwrap())["term"], "\\x. dup x as (x1,x2). x1 x2");
        assert!(embed_json("\\x.").is_err());
    }

    #[test]
    fn reduces_plain_or_resource_input() {
        let v = parse(reduce_json("(\\x. del x. y) z", 100).unwrap());
        assert_eq!(v["normal_form"], "del z. y");
        assert_eq!(v["graph"]["longest_path"], 1);
        let v = parse(reduce_json("(\\x. x x) (\\y. y)", 100).unwrap());
        assert_eq!(v["normal_form"], "\\y1. y1");
    }

    #[test]
    fn certifies_and_refutes() {
        assert_eq!(parse(certify_json("\\x y. x", 1000).unwrap())["verdict"], "certified");
        assert_eq!(parse(certify_json("(\\x. x x) (\\x. x x)", 1000).unwrap())["verdict"], "not-sn");
    }
}
