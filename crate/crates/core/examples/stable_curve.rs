//! Invariants of a stable curve: two supersingular elliptic components meeting twice.

use ekedahl_oort::stable::{stable_invariants, StableCurveGraph};
use serde_json::json;

fn main() {
    let ss = json!({"kind": "module", "F": [[0, 0], [1, 0]], "V": [[0, 0], [2, 0]], "b": [[0, 1], [2, 0]]});
    let graph = StableCurveGraph::from_json(&json!({
        "p": 3, "k": 1,
        "vertices": [{"id": "a", "genus": 1, "payload": ss}, {"id": "b", "genus": 1, "payload": ss}],
        "edges": [["a", "b"], ["a", "b"]]
    }))
    .expect("well-formed graph");
    let r = stable_invariants(&graph).expect("stable");
    println!("genus {}  loops {}  rho {:?}", r.genus, r.loops, r.rho);
    println!("delta {}  p-rank {}  a-number {}", r.delta, r.p_rank, r.a_number);
    match &r.mu {
        Some(mu) => println!("mu {mu} ({:?})", r.mu_level),
        None => println!("mu unresolved ({:?})", r.mu_level),
    }
    println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
}
