use std::path::PathBuf;
use std::process::{Command, Output};

fn typea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_typea")).args(args).output().expect("run typea")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("typea-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn cubic_surface_report() {
    let o = typea(&["quantum", "cubic"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("eigenvalues −6 (mult 8), 21 (mult 1)"), "{out}");
    assert!(out.contains("lines = 27"), "{out}");
}

#[test]
fn jacobian_and_superpotential_strings() {
    let o = typea(&["jacobian", "--n", "4", "--a", "3", "--specialize-r"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("β³ = 27Tβ²"));
    let o = typea(&["superpotential", "--n", "4", "--a", "3", "--hessians"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("27 small critical points"));
}

#[test]
fn json_certificates_are_deterministic() {
    let dir = scratch("json");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let o = typea(&["--json", p.to_str().unwrap(), "superpotential", "--n", "4", "--a", "2"]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "pass");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["anchor"].as_str().is_some_and(|s| !s.is_empty())));
}

#[test]
fn scratch_directory_resolves_relative_paths() {
    let dir = scratch("env");
    let o = Command::new(env!("CARGO_BIN_EXE_typea"))
        .env("TYPEA_SCRATCH", &dir)
        .args(["--json", "hh.json", "clifford", "hh", "--n", "2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.join("hh.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = scratch("usage");
    let empty = dir.join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let o = typea(&["groebner", "--input", empty.to_str().unwrap(), "--order", "lex:x>y"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(typea(&["jacobian", "--n", "9", "--a", "3"]).status.code(), Some(2));
    assert_eq!(typea(&["clifford", "hh", "--n", "2", "--form", "diag:1"]).status.code(), Some(2));
}

#[test]
fn groebner_of_a_file() {
    let dir = scratch("groebner");
    let input = dir.join("ideal.txt");
    std::fs::write(&input, "x^2 - y\nx*y - 1\n").unwrap();
    let o = typea(&["groebner", "--input", input.to_str().unwrap(), "--order", "lex:x>y"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn corrupted_tables_fail_verification() {
    let dir = scratch("tables");
    let tables = dir.join("m.txt");
    let o = typea(&["minimal-model", "--n", "4", "--a", "2", "--arity", "3", "--tables", tables.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = typea(&["ainf", "verify", "--tables", tables.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));

    let text = std::fs::read_to_string(&tables).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // Change the coefficient of t1 t2 so the product stops being associative.
    let i = lines.iter().position(|l| l.starts_with("mu 2 | in: t1,t2 |")).unwrap();
    let (head, tail) = lines[i].split_once("| out: (").unwrap();
    let (_, label) = tail.rsplit_once(")*").unwrap();
    lines[i] = format!("{head}| out: (5)*{label}");
    let broken = dir.join("broken.txt");
    std::fs::write(&broken, lines.join("\n") + "\n").unwrap();
    let o = typea(&["ainf", "verify", "--tables", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}
