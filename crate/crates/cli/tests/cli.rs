use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn mll(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mll")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("mll-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const TWO: &str = "bot:a * bot:b, 1:x, 1:y";

#[test]
fn two_cycle_demo() {
    let (code, out, _) = mll(&["demo", "fig7"]);
    assert_eq!(code, 0);
    assert!(out.contains("24 nets in 2 classes of sizes 12, 12"), "{out}");
    assert_eq!(out.matches("a single rewiring cycle").count(), 2);
}

#[test]
fn equiv_same_class_gives_a_checked_path() {
    let (_, out, _) = mll(&["--format", "json", "classes", "bot:a * bot:b, 1:x, 1:y, 1:z, bot:c * bot:d"]);
    let classes: Value = serde_json::from_str(&out).unwrap();
    let class = classes[0].as_array().unwrap();
    let d = scratch("equiv");
    let seq = "bot:a * bot:b, 1:x, 1:y, 1:z, bot:c * bot:d";
    let net = |j: &Value| serde_json::json!({ "sequent": seq, "jumps": j }).to_string();
    let a = write(&d, "a.json", &net(&class[0]));
    let b = write(&d, "b.json", &net(&class[5]));
    let (code, out, _) = mll(&["equiv", &a, &b]);
    assert_eq!(code, 0);
    let (s, p) = mll::io::path_from_json(&serde_json::from_str(&out).unwrap()).unwrap();
    p.verify(&s).unwrap();
    assert!(!p.is_empty());
}

#[test]
fn equiv_across_parity() {
    let d = scratch("parity");
    let net = |x: &str, y: &str| format!(r#"{{"sequent":"{TWO}","jumps":{{"a":"{x}","b":"{y}"}}}}"#);
    let id = write(&d, "id.json", &net("x", "y"));
    let twist = write(&d, "twist.json", &net("y", "x"));
    let (code, out, _) = mll(&["equiv", &id, &twist]);
    assert_eq!(code, 1);
    assert!(out.contains("parity"));
    let (code, out, _) = mll(&["parity", &id, &twist]);
    assert_eq!((code, out.trim()), (1, "odd"));
    let (code, out, _) = mll(&["check", &id]);
    assert_eq!((code, out.trim()), (0, "correct"));
}

#[test]
fn three_partition() {
    let (code, out, _) = mll(&["3p", "--values", "1,1,4", "--k", "3"]);
    assert_eq!((code, out.trim()), (1, "no partition"));
    let (code, out, _) = mll(&["--format", "json", "3p", "--values", "1,2,2", "--k", "5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let group: Vec<u64> = serde_json::from_value(v["partition"][0].clone()).unwrap();
    assert_eq!(group.iter().sum::<u64>(), 5);
}

#[test]
fn encode_decode_compile() {
    let d = scratch("enc");
    let g = write(
        &d,
        "g.json",
        r#"{"vertices":[{"id":"u","constraint":0},{"id":"w","constraint":0}],
            "edges":[{"id":"e","ends":["u","w"],"weight":1}]}"#,
    );
    let a = write(&d, "a.json", r#"{"e":"u"}"#);
    let b = write(&d, "b.json", r#"{"e":"w"}"#);
    let (code, out, _) = mll(&["ncl-solve", &g, &a, &b]);
    assert_eq!(code, 0);
    let path = write(&d, "path.json", &out);
    let enc = d.join("enc");
    let (code, _, err) = mll(&["encode", &g, &a, &b, "--out", enc.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    for f in ["sequent.txt", "gamma.json", "delta.json", "tables.json"] {
        assert!(enc.join(f).is_file());
    }
    let (code, out, err) = mll(&["--format", "json", "compile", enc.to_str().unwrap(), &path]);
    assert_eq!(code, 0, "{err}");
    let (s, p) = mll::io::path_from_json(&serde_json::from_str(&out).unwrap()).unwrap();
    p.verify(&s).unwrap();
    let end = write(&d, "end.json", &mll::io::net_to_json(&s, &p.end(&s)).to_string());
    let (code, out, _) = mll(&["decode", enc.to_str().unwrap(), &end]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["e"], "w");
}

#[test]
fn dot_outputs() {
    let d = scratch("dot");
    let net = write(&d, "n.json", &format!(r#"{{"sequent":"{TWO}","jumps":{{"a":"x","b":"y"}}}}"#));
    let (code, out, _) = mll(&["dot", &net]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph") && out.trim_end().ends_with('}'));
    assert_eq!(out.matches('{').count(), out.matches('}').count());
    let (code, _, err) = mll(&["dot", &net, "--switching", "0"]);
    assert_eq!(code, 65, "no pars to switch: {err}");
}

#[test]
fn deterministic() {
    let a = mll(&["--seed", "7", "translate", "--random", "12"]);
    let b = mll(&["--seed", "7", "translate", "--random", "12"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    let (s, l) = mll::io::net_from_json(&v["net"]).unwrap();
    assert!(mll::is_net(&s, &l));
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(mll(&["nonsense"]).0, 64);
    assert_eq!(mll(&["check", "/nonexistent/net.json"]).0, 65);
}

#[test]
fn boat_demo() {
    let (code, out, _) = mll(&["demo", "boat", "--depth", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("4 times"), "{out}");
}
