use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclav")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,1,2"]);
    assert_eq!(code(&ok), 0);
    let v = json(&ok);
    assert_eq!(v["is_weil"], true);
    assert_eq!(v["is_ordinary"], true);
    assert_eq!(v["is_irreducible"], true);

    let supersingular = run(&["validate", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,0,2"]);
    assert_eq!(code(&supersingular), 1);
    assert_eq!(json(&supersingular)["is_ordinary"], false);

    let short = run(&["validate", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,1"]);
    assert_eq!(code(&short), 2);
    assert_eq!(json(&short)["error"], "wrong_degree");

    assert_eq!(code(&run(&["validate", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,x,2"])), 2);
    assert_eq!(code(&run(&["validate", "--p", "4", "--r", "1", "--g", "1", "--poly", "1,1,4"])), 2);
    assert_eq!(code(&run(&["validate", "--p", "2"])), 2);
}

#[test]
fn classify_worked_examples() {
    let out = run(&["classify", "--p", "5", "--r", "1", "--g", "1", "--poly", "1,-2,5", "--no-timing"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["summary"]["classes"], "2");
    assert_eq!(v["summary"]["cyclic"], "1");
    assert_eq!(v["summary"]["not_cyclic"], "1");
    assert_eq!(v["completeness"], "certified");
    assert!(v.get("timing").is_none());
    let mut groups: Vec<String> = v["classes"].as_array().unwrap().iter().map(|c| c["group"].to_string()).collect();
    groups.sort();
    assert_eq!(groups, vec![r#"["2","2"]"#, r#"["4"]"#]);

    let out = run(&["classify", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,1,2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["summary"]["classes"], "1");
    assert_eq!(v["summary"]["cyclic"], "1");
    assert!(v["timing"]["seconds"].is_string());
}

#[test]
fn classify_refuses_non_ordinary() {
    let out = run(&["classify", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,0,2"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert!(v["message"].as_str().unwrap().contains("not ordinary"), "{v}");
}

#[test]
fn classify_is_byte_deterministic() {
    let args = ["classify", "--p", "3", "--r", "1", "--g", "2", "--poly", "1,1,1,3,9", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classify_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let out = run(&["classify", "--p", "2", "--r", "1", "--g", "1", "--poly", "1,-1,2", "--no-timing", "--out", p]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["classes"], "1");
}

#[test]
fn convert_round_trips() {
    let out = run(&["convert", "--poly", "1,1,2", "--matrix", "0,-2,1,-1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["round_trip"]["conjugate"], true);

    let out = run(&["convert", "--poly", "1,-2,5", "--matrix", "1,-2,2,1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["round_trip"]["conjugate"], true);

    let out = run(&["convert", "--poly", "1,1,2", "--ideal", "2,0;0,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["round_trip"]["equivalent"], true);

    let out = run(&["convert", "--poly", "1,1,2", "--ideal", "1/2,0;0,1/2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn convert_rejects_wrong_charpoly() {
    let out = run(&["convert", "--poly", "1,1,2", "--matrix", "1,0,0,1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["message"], "not in M_{n,f}");
    assert_eq!(code(&run(&["convert", "--poly", "1,1,2", "--matrix", "1,0,0"])), 2);
    assert_eq!(code(&run(&["convert", "--poly", "1,1,2"])), 2);
}

#[test]
fn sweep_lists_contexts() {
    let out = run(&["sweep", "--p", "2", "--r", "1", "--g", "1", "--no-timing"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,f,classes,cyclic,not_cyclic,completeness,error"));
    assert!(text.contains("2,\"1,1,2\",1,1,0,certified,"));
    assert!(text.contains("2,\"1,-1,2\",1,1,0,certified,"));
}

#[test]
fn sweep_writes_documents_and_cross_validation() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/classes.jsonl");
    let d = dir.path().to_str().unwrap();
    let args = ["sweep", "--p", "3", "--r", "1", "--g", "1", "--no-timing", "--fixtures", fixture, "--out", d];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("# cross-validation"));
    assert!(dir.path().join("summary.csv").exists());
    assert!(dir.path().join("cross_validation.json").exists());
    let docs = std::fs::read_dir(dir.path()).unwrap().filter(|e| {
        e.as_ref().unwrap().file_name().to_string_lossy().starts_with("q3_g1_")
    });
    assert_eq!(docs.count(), text.lines().filter(|l| l.starts_with("3,")).count());

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn sweep_rejects_unsupported_dimension() {
    let out = run(&["sweep", "--p", "2", "--r", "1", "--g", "3"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["error"], "capability");
}

#[test]
fn fetch_requires_network_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cyclav"))
        .args(["fetch", "--q", "2", "--g", "1", "--cache-dir", d])
        .env_remove("CYCLAV_ENDPOINT")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["error"], "capability");
}

#[test]
fn fetch_serves_cached_records_offline() {
    let dir = tempfile::tempdir().unwrap();
    let line = r#"{"label":"1.2.b","q":2,"g":1,"poly":[2,1,1]}"#;
    std::fs::write(dir.path().join("classes_q2_g1.jsonl"), format!("{line}\n")).unwrap();
    let cfg = dir.path().join("fetch.toml");
    std::fs::write(&cfg, format!("network = true\ncache_dir = {:?}\n", dir.path())).unwrap();
    let out = run(&["fetch", "--q", "2", "--g", "1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("1.2.b"));

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(code(&run(&["fetch", "--q", "2", "--g", "1", "--config", cfg.to_str().unwrap()])), 2);
}
