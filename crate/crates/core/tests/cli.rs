use std::io::Write;
use std::process::{Command, Output, Stdio};

fn wknot(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wknot"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

const TREFOIL: &str = "O1+ U2+ O3+ U1+ O2+ U3+";

#[test]
fn gen_prints_codes() {
    let o = wknot(&["gen", "Torus2", "3"], "");
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), TREFOIL);
    let o = wknot(&["gen", "WK", "1"], "");
    assert_eq!(stdout(&o).trim(), "O1+ U2- O3+ O4- O2- U1+ O5+ O6- U6- U3+ U4- U5+");
    let o = wknot(&["gen", "WK", "0"], "");
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "");
}

#[test]
fn gen_rejects_bad_input() {
    assert_eq!(wknot(&["gen", "Q", "1"], "").status.code(), Some(2));
    assert_eq!(wknot(&["gen", "B", "0"], "").status.code(), Some(2));
}

#[test]
fn parse_accepts_text_and_json() {
    let o = wknot(&["parse", "--json"], "# trefoil\nO1+U2+O3+U1+O2+U3+\n");
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["passes"][0], serde_json::json!({"label": 1, "strand": "O", "sign": 1}));
    let back = wknot(&["parse"], &stdout(&o));
    assert_eq!(stdout(&back).trim(), TREFOIL);
}

#[test]
fn malformed_input_exits_2() {
    let o = wknot(&["invariants"], "O1+ U2+ O2+");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("LabelCountError"));
    let o = wknot(&["parse", "--json"], "O1+ X1+");
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "input");
    assert_eq!(wknot(&["parse", "/no/such/file"], "").status.code(), Some(2));
}

#[test]
fn invariants_report() {
    let o = wknot(&["invariants", "--json"], TREFOIL);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["warping_degree"], 1);
    assert_eq!(v["colorings"][0], serde_json::json!({"field": "3:1,1", "dim": 2, "count": "9"}));
    assert_eq!(v["verdict"]["value"], "Nontrivial");

    let v = json(&wknot(&["invariants", "--json"], ""));
    assert_eq!(v["verdict"]["value"], "Trivial");
    assert!(v["colorings"].as_array().unwrap().iter().all(|s| s["dim"] == 1));
}

#[test]
fn field_flag() {
    let v = json(&wknot(&["invariants", "--json", "--fields", "R5,3:1,0,1"], TREFOIL));
    let fields: Vec<&str> = v["colorings"].as_array().unwrap().iter().map(|s| s["field"].as_str().unwrap()).collect();
    assert_eq!(fields, ["5:1,1", "3:1,0,1"]);
    assert_ne!(wknot(&["invariants", "--fields", "4:1,1"], TREFOIL).status.code(), Some(0));
}

#[test]
fn ut_bounds_trace_replays_and_tampering_is_caught() {
    let o = wknot(&["ut-bounds"], TREFOIL);
    assert!(o.status.success());
    let cert = json(&o);
    assert_eq!(cert["lower"]["value"], 1);
    assert_eq!(cert["upper"]["value"], 1);
    let trace = cert["upper"]["trace"].clone();
    let ok = wknot(&["replay", "--json"], &trace.to_string());
    assert!(ok.status.success());
    assert_eq!(json(&ok)["flips"], 1);

    let mut tampered = trace.clone();
    tampered["steps"][0] = serde_json::json!({"kind": "TwistFlip", "label": 9});
    let bad = wknot(&["replay"], &tampered.to_string());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ReplayMismatch at step 0"));
}

#[test]
fn replay_empty_trace() {
    let code = json(&wknot(&["parse", "--json"], TREFOIL));
    let trace = serde_json::json!({"start": code, "steps": [], "end": code});
    assert!(wknot(&["replay"], &trace.to_string()).status.success());
    assert_eq!(wknot(&["replay"], "{not json").status.code(), Some(2));
}

#[test]
fn distance_and_uw() {
    let dir = std::env::temp_dir().join(format!("wknot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.txt");
    let b = dir.join("b.txt");
    std::fs::write(&a, TREFOIL).unwrap();
    std::fs::write(&b, "").unwrap();
    let cert = json(&wknot(&["distance", a.to_str().unwrap(), b.to_str().unwrap()], ""));
    assert_eq!(cert["quantity"], "DT");
    assert_eq!(cert["upper"]["value"], 1);
    let cert = json(&wknot(&["uw", a.to_str().unwrap()], ""));
    assert_eq!(cert["upper"]["value"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simplify_removes_kinks() {
    let o = wknot(&["simplify"], "O1+ U1+ O2- U2-");
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "");
    let trace = json(&wknot(&["simplify", "--json"], "O1+ U1+"));
    assert_eq!(trace["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn budget_exhaustion_is_not_a_failure() {
    let o = wknot(&["ut-bounds", "--max-nodes", "1"], &stdout(&wknot(&["gen", "B", "3"], "")));
    assert!(o.status.success());
}

#[test]
fn reproduce_with_tiny_budget_and_r5() {
    let o = wknot(&["reproduce", "--fields", "R5", "--max-nodes", "1", "--json"], "");
    assert!(o.status.success(), "{}", stdout(&o));
    let rows = json(&o)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0]["status"], "Skipped");
    assert_eq!(rows[1]["status"], "Skipped");
    assert_eq!(rows[3]["status"], "Budget");
    assert!(rows.iter().all(|r| r["status"] != "Fail"));
}

#[test]
fn proptest_is_seeded() {
    let a = wknot(&["proptest", "--seed", "3", "--trials", "20", "--json"], "");
    let b = wknot(&["proptest", "--seed", "3", "--trials", "20", "--json"], "");
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(json(&a)["flip_suite"]["violations"], 0);
}
