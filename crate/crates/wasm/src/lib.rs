//! Browser bindings: check a net, list the rewiring classes of a sequent,
//! and search for a rewiring path. Every function takes and returns JSON
//! text so the page needs no glue beyond `JSON.parse`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use mll::io;
use mll::rewiring::{Equivalence, Reason};

fn error(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

fn net(text: &str) -> Result<(mll::Sequent, mll::Linking), String> {
    io::parse(text).and_then(|v| io::net_from_json(&v)).map_err(error)
}

/// `{"correct": bool}` for a net in the usual JSON form.
#[wasm_bindgen]
pub fn check(net_json: &str) -> String {
    match net(net_json) {
        Ok((s, l)) => match mll::is_correct_fast(&s, &l) {
            Ok(c) => json!({ "correct": c }).to_string(),
            Err(e) => error(e),
        },
        Err(e) => e,
    }
}

/// Every correct linking of the sequent, grouped into classes.
#[wasm_bindgen]
pub fn classes(sequent: &str, budget: usize) -> String {
    let s = match mll::parse_sequent(sequent) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    match mll::classes(&s, budget) {
        Ok(cs) => {
            let listed: Vec<Value> =
                cs.iter().map(|c| Value::Array(c.iter().map(|l| json!(l.to_names(&s))).collect())).collect();
            json!({ "sequent": mll::print_sequent(&s), "classes": listed }).to_string()
        }
        Err(e) => error(e),
    }
}

/// A rewiring path between two nets, or the reason there is none.
#[wasm_bindgen]
pub fn equivalent(a_json: &str, b_json: &str, budget: usize) -> String {
    let ((s, l1), (s2, l2)) = match (net(a_json), net(b_json)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    if mll::print_sequent(&s) != mll::print_sequent(&s2) {
        return error("the two nets are over different sequents");
    }
    let l2 = match mll::Linking::from_names(&s, &l2.to_names(&s2)) {
        Ok(l) => l,
        Err(e) => return error(e),
    };
    match mll::equivalent(&s, &l1, &l2, budget) {
        Ok(Equivalence::Found(p)) => json!({ "equivalent": true, "path": io::path_to_json(&s, &p) }).to_string(),
        Ok(Equivalence::Inequivalent(Reason::Parity)) => json!({ "equivalent": false, "reason": "parity" }).to_string(),
        Ok(Equivalence::Inequivalent(Reason::Exhausted { class_size })) => {
            json!({ "equivalent": false, "reason": "class exhausted", "class_size": class_size }).to_string()
        }
        Ok(Equivalence::Unknown) => json!({ "equivalent": null, "reason": "budget exhausted" }).to_string(),
        Err(e) => error(e),
    }
}
