use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cutlab_core::protocols::run_wigner;
use serde_json::Value;

fn cutlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cutlab")).args(args).env_remove("CUTLAB_OUT_DIR").output().unwrap()
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name).display().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.display().to_string();
    full.extend(["--json", &out_s]);
    let o = cutlab(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    read_json(&out)
}

fn strip_wall_time(text: &str) -> String {
    text.lines().filter(|l| !l.contains("wall_time_seconds")).collect::<Vec<_>>().join("\n")
}

#[test]
fn run_wigner_matches_the_builtin_report() {
    let v = json_of(&["run", &corpus("wigner.wfp")]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "run");
    assert_eq!(v["report"]["builtin"], "wigner");
    let theorem = &v["report"]["theorem"];
    assert_eq!(theorem["verdict"], "CONTRADICTION_REPRODUCED");
    let (_, expected) = run_wigner().unwrap();
    assert_eq!(theorem["feasibility"][0]["name"], "alice_q_vs_bob_q_la");
    assert_eq!(theorem["feasibility"][0]["report"]["verdict"], "INFEASIBLE");
    let expected_purity = expected.number("bob_purity").unwrap();
    let got = theorem["evidence"]["bob_purity"].as_f64().unwrap();
    assert_eq!(got, expected_purity);
    assert_eq!(v["report"]["trace"]["steps"].as_array().unwrap().len(), 6);
}

#[test]
fn full_trace_level_carries_density_matrices() {
    let v = json_of(&["run", &corpus("deutsch.wfp"), "--trace-level", "full"]);
    assert!(v["report"]["trace"]["steps"][0]["global"].is_object());
    assert_eq!(v["report"]["builtin"], "deutsch");
}

#[test]
fn run_exit_codes() {
    let o = cutlab(&["run", &corpus("negative/misspelled_verb.wfp")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3, column 13"), "{err}");
    assert_eq!(cutlab(&["run", &corpus("negative/self_description.wfp")]).status.code(), Some(1));
    assert_eq!(cutlab(&["run", &corpus("negative/reversal_outside_cut.wfp")]).status.code(), Some(1));
    assert_eq!(cutlab(&["run", "/nonexistent/file.wfp"]).status.code(), Some(1));
}

#[test]
fn run_writes_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    let o = cutlab(&["run", &corpus("fr.wfp"), "--csv", p.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("step,actor,operation,acceptance,owner,condition,probability,purity"));
}

#[test]
fn verify_thm3_with_and_without_c() {
    let v = json_of(&["verify", "thm3", "--with-C"]);
    let r = &v["report"];
    assert_eq!(r["verdict"], "CONTRADICTION_REPRODUCED");
    let ev = &r["evidence"];
    assert!((ev["p_accept"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(ev["claimed"].as_f64().unwrap(), 1.0);
    assert!((ev["actual"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((ev["bound"].as_f64().unwrap() - 0.853553).abs() < 1e-6);
    let v = json_of(&["verify", "thm3", "--without-C"]);
    assert_eq!(v["report"]["verdict"], "CONSISTENT");
    assert!(v["report"]["evidence"].get("claimed").is_none());
}

#[test]
fn verify_thm2_reports_the_entropic_certificate() {
    let v = json_of(&["verify", "thm2"]);
    let r = &v["report"];
    assert_eq!(r["evidence"]["maassen_uffink_bound"].as_f64().unwrap(), 1.0);
    assert_eq!(r["feasibility"][0]["report"]["verdict"], "INFEASIBLE");
    assert_eq!(r["feasibility"][0]["report"]["certificate_kind"], "entropic");
}

#[test]
fn disabling_any_required_assumption_gives_consistent() {
    for (thm, flag) in [
        ("thm1", "agreement"),
        ("thm2", "objectivity"),
        ("thm3", "quantum"),
        ("thm5", "consistency"),
        ("no-cloning", "black-hole"),
    ] {
        let v = json_of(&["verify", thm, "--without", flag]);
        assert_eq!(v["report"]["verdict"], "CONSISTENT", "{thm} without {flag}");
    }
    let v = json_of(&["verify", "thm4", "--without", "objectivity", "--seeds", "2"]);
    assert_eq!(v["report"]["verdict"], "CONSISTENT");
    assert_eq!(v["seeds"], serde_json::json!([0, 1]));
}

#[test]
fn invalid_flag_combinations_exit_one() {
    for args in [
        &["verify", "thm1", "--with-C"][..],
        &["verify", "thm3", "--with-C", "--without-C"],
        &["verify", "thm2", "--seeds", "3"],
        &["verify", "thm1", "--without", "black-hole"],
        &["verify", "thm4", "--n-interior", "7"],
        &["verify", "thm9"],
        &["game"],
        &["game", "--optimize", "--sample", "10"],
        &["game", "--eval", "|q>,0,0bar"],
        &["sweep", "--m-range", "x"],
    ] {
        let o = cutlab(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sweep_csv_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    let o = cutlab(&["sweep", "--n-interior", "3", "--m-range", "0..=2", "--seeds", "2", "--csv", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&p).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, cutlab::sweep::CSV_COLUMNS);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 3 + 1);
    assert_eq!(&rows[6][0], "mean");
    assert_eq!(&rows[6][1], "all");
}

#[test]
fn sweep_cap_exceeded() {
    let o = cutlab(&["sweep", "--n-interior", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("size cap exceeded"));
}

#[test]
fn game_commands() {
    let v = json_of(&["game", "--optimize"]);
    assert!((v["report"]["eigen"]["win_probability"].as_f64().unwrap() - 0.8535533905932737).abs() < 1e-12);
    let v = json_of(&["game", "--eval", "|1>,1,0bar"]);
    assert!((v["report"]["win_probability"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    let v = json_of(&["game", "--sample", "1000", "--seed", "7"]);
    assert_eq!(v["seeds"], serde_json::json!([7]));
    assert_eq!(v["report"]["rounds"], 1000);
}

#[test]
fn identical_commands_give_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let p = dir.path().join(name);
        let mut full = args.to_vec();
        let s = p.display().to_string();
        full.extend(["--json", &s]);
        assert!(cutlab(&full).status.success());
        strip_wall_time(&std::fs::read_to_string(&p).unwrap())
    };
    let sample = ["game", "--sample", "20000", "--seed", "7"];
    assert_eq!(run("a.json", &sample), run("b.json", &sample));
    let sweep = ["sweep", "--n-interior", "2", "--m-range", "0,3", "--seeds", "3"];
    assert_eq!(run("c.json", &sweep), run("d.json", &sweep));
    let verify = ["verify", "thm5", "--seed", "3"];
    assert_eq!(run("e.json", &verify), run("f.json", &verify));
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    assert!(cutlab(&["game", "--eval", "|+>,0,0bar", "--json", p.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&p).unwrap();
    let line = text.lines().find(|l| l.contains("\"win_probability\"")).unwrap();
    let value = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let (mantissa, exponent) = value.split_once('e').unwrap();
    assert_eq!(mantissa.len(), 18, "{value}");
    assert!(exponent.parse::<i32>().is_ok(), "{value}");
    assert!(text.contains("\"bound\": 8.5355339059327373e-1"), "{text}");
}

#[test]
fn json_without_path_goes_to_the_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cutlab"))
        .args(["verify", "thm1", "--json"])
        .env("CUTLAB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let v = read_json(&dir.path().join("verify_thm1.json"));
    assert_eq!(v["report"]["theorem"], "thm1");
}

#[test]
fn json_to_stdout() {
    let o = cutlab(&["game", "--eval", "|0>,0,0bar", "--json", "-"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "game");
}
