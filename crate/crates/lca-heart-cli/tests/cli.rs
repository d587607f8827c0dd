mod common;

use std::process::Command;

use serde_json::Value;

use common::*;
use lca_heart_cli::{run_script, Executor, LoadError, Options, Session};

#[test]
fn golden_session_matches() {
    let (_, text, code) = run_golden();
    assert_eq!(text, golden_expected());
    assert_eq!(code, 1, "the script contains deliberate user errors");
}

#[test]
fn binary_reproduces_golden_output() {
    let out = Command::new(env!("CARGO_BIN_EXE_lcah"))
        .arg("--batch")
        .arg(golden_dir().join("session.lcah"))
        .arg("--check-certificates")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden_expected());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let ok = Command::new(env!("CARGO_BIN_EXE_lcah")).args(["let G = R + T", "dual G"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), "G = R + T\ndual: R + Z\n");
    let bad = Command::new(env!("CARGO_BIN_EXE_lcah")).args(["let G = R +"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn session_round_trip_is_byte_stable() {
    let (exec, _, _) = run_golden();
    let first = exec.session.save_string();
    let loaded = Session::load_str(&first).unwrap();
    assert_eq!(loaded.save_string(), first);
    assert_eq!(loaded.certificates().len(), 4);
}

#[test]
fn session_file_through_binary() {
    let dir = std::env::temp_dir().join(format!("lcah-session-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.json");
    let _ = std::fs::remove_file(&path);
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_lcah")).arg("--session").arg(&path).args(args).output().unwrap()
    };
    let a = run(&["symbol a 1.4142135623730951", "obj G : Z^2 -> R = [[1, a]]", "let N = normalize G"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let saved = std::fs::read_to_string(&path).unwrap();
    let b = run(&["ghost? N"]);
    assert_eq!(String::from_utf8(b.stdout).unwrap(), "ghost: true\n");
    let after = std::fs::read_to_string(&path).unwrap();
    assert!(after.starts_with(&saved[..saved.find("\"history\"").unwrap()]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tampered_certificate_names_the_square() {
    let mut exec = Executor::new(Session::new(), Options::default());
    let (_, code) = run_script(
        &mut exec,
        ["symbol a 1.4142135623730951", "obj G : Z^2 -> R = [[1, a]]", "normalize G"].into_iter(),
    );
    assert_eq!(code, 0);
    let mut v: Value = serde_json::from_str(&exec.session.save_string()).unwrap();
    v["certificates"][0]["chain"]["squares"][0]["right"]["blocks"] = serde_json::json!({});
    let err = Session::load_str(&serde_json::to_string_pretty(&v).unwrap()).unwrap_err();
    assert!(matches!(err, LoadError::Certificate { ref id, .. } if id == "c1"));
    assert!(err.to_string().contains("square 0"), "{err}");
}

#[test]
fn tampered_binding_is_named() {
    let mut exec = Executor::new(Session::new(), Options::default());
    let (_, code) = run_script(&mut exec, ["obj X : Z -> T = [[1/2]]"].into_iter());
    assert_eq!(code, 1);
    let (_, code) = run_script(&mut exec, ["obj X : Z -> R = [[3]]"].into_iter());
    assert_eq!(code, 0);
    let mut v: Value = serde_json::from_str(&exec.session.save_string()).unwrap();
    v["bindings"][0]["value"]["differential"]["blocks"] = serde_json::json!({});
    let err = Session::load_str(&v.to_string()).unwrap_err();
    assert!(err.to_string().starts_with("binding `X`"), "{err}");
}

#[test]
fn json_mode() {
    let mut exec = Executor::new(Session::new(), Options { json: true, ..Options::default() });
    let (text, code) = run_script(&mut exec, ["obj O = classical T", "decompose O", "ghost? Q"].into_iter());
    assert_eq!(code, 1);
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["result"]["cotorsion"]["T"], 1);
    assert_eq!(rows[2]["ok"], false);
    assert_eq!(rows[2]["error"]["kind"], "usage");
}

#[test]
fn parse_errors_in_json_carry_expectations() {
    let mut exec = Executor::new(Session::new(), Options { json: true, ..Options::default() });
    let (text, _) = run_script(&mut exec, ["mor f Z -> T = [[1]]"].into_iter());
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["error"]["column"], 7);
    assert!(v["error"]["expected"].as_array().unwrap().iter().any(|e| e == "`:`"));
}

#[test]
fn parser_fuzz_small() {
    let s = parser_fuzz(2_000, 17);
    assert!(s.failures.is_empty(), "{:?}", &s.failures[..s.failures.len().min(5)]);
    assert_eq!(s.round_trips, 1_500);
}
