//! The `cclg` binary, run as a subprocess.

use std::process::{Command, Output};

use cclg::terms::Term;

fn grammar(name: &str) -> String {
    format!("{}/grammars/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cclg(args: &[&str], fuel: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cclg"));
    cmd.args(args).env_remove("CCLG_FUEL");
    if let Some(f) = fuel {
        cmd.env("CCLG_FUEL", f);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_prints_each_entry() {
    let o = cclg(&["check", &grammar("english.cclg")], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("16 entries"), "{out}");
    assert!(out.contains("john"));
}

#[test]
fn check_reports_the_broken_grammar() {
    let o = cclg(&["check", &grammar("english_unrepaired.cclg")], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("40:61"), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    let g = grammar("english.cclg");
    assert_eq!(
        cclg(&["check", "/no/such/grammar"], None).status.code(),
        Some(2)
    );
    assert_eq!(
        cclg(&["parse", &g, "died", "john"], None).status.code(),
        Some(3)
    );
    assert_eq!(
        cclg(&["parse", &g, "john", "snores"], None).status.code(),
        Some(4)
    );
    assert_eq!(
        cclg(&["models", &g, "john died", "--reading", "2"], None)
            .status
            .code(),
        Some(5)
    );
    // usage errors count as plain errors
    assert_eq!(cclg(&["parse"], None).status.code(), Some(1));
}

#[test]
fn lambda_and_avm_output() {
    let o = cclg(&["parse", &grammar("toy.cclg"), "john runs"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("\\x_1. x_1.reln=run & x_1.arg1=john"),
        "{}",
        stdout(&o)
    );

    let o = cclg(
        &[
            "parse",
            &grammar("english.cclg"),
            "mary died",
            "--format",
            "avm",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("reln die"), "{out}");
    assert!(out.contains("residue: true"), "{out}");
}

#[test]
fn json_terms_deserialize() {
    let o = cclg(
        &[
            "parse",
            &grammar("english.cclg"),
            "john read a book",
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["sentence"], "john read a book");
    let rs = doc["readings"].as_array().unwrap();
    assert_eq!(rs.len(), 1);
    let t: Term = serde_json::from_value(rs[0]["term"].clone()).unwrap();
    assert!(t.is_lambda());
}

#[test]
fn dot_output() {
    let o = cclg(
        &[
            "parse",
            &grammar("english.cclg"),
            "john died",
            "--format",
            "dot",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn models_of_a_reading() {
    let o = cclg(
        &[
            "models",
            &grammar("english.cclg"),
            "a man said that john read a book and mary died",
            "--reading",
            "2",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("type=coord"));
}

#[test]
fn fuel_limit_from_the_environment() {
    let args = ["parse", &grammar("english.cclg"), "john gave mary a book"];
    let o = cclg(&args, Some("1"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step bound"), "{}", stderr(&o));
    assert_eq!(cclg(&args, Some("lots")).status.code(), Some(1));
}
