use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

const TWO_CYCLES: &str = "bot:a * bot:b, 1:x, 1:y, 1:z, bot:c * bot:d";

#[test]
fn classes_of_the_five_formula_sequent() {
    let v = parse(mll_wasm::classes(TWO_CYCLES, 10_000));
    let sizes: Vec<usize> = v["classes"].as_array().unwrap().iter().map(|c| c.as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![12, 12]);
}

#[test]
fn check_and_equivalent() {
    let v = parse(mll_wasm::classes(TWO_CYCLES, 10_000));
    let net = |c: usize, i: usize| serde_json::json!({ "sequent": TWO_CYCLES, "jumps": v["classes"][c][i] }).to_string();
    assert_eq!(parse(mll_wasm::check(&net(0, 0)))["correct"], true);
    let same = parse(mll_wasm::equivalent(&net(0, 0), &net(0, 7), 10_000));
    assert_eq!(same["equivalent"], true);
    let other = parse(mll_wasm::equivalent(&net(0, 0), &net(1, 0), 10_000));
    assert_eq!(other["reason"], "parity");
}

#[test]
fn bad_input_is_reported() {
    assert!(parse(mll_wasm::check("{")).get("error").is_some());
    assert!(parse(mll_wasm::classes("bot *", 10)).get("error").is_some());
}
