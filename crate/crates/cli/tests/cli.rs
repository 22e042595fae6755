use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use constraint_forge::{SystemReport, MAX_STAGES_ENV};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_constraint-forge"))
        .args(args)
        .env_remove(MAX_STAGES_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> (Output, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = forge(&all);
    let v = serde_json::from_str(&stdout(&o)).unwrap_or(Value::Null);
    (o, v)
}

#[test]
fn json_report_round_trips_and_is_deterministic() {
    let f = fixture("example1.sys");
    let (first, value) = json(&["integrate", &f]);
    let (second, _) = json(&["integrate", &f]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let report = SystemReport::from_json(&text).unwrap();
    assert_eq!(report.to_json(), text);
    assert_eq!(value["engines_agree"], Value::Bool(true));
    assert_eq!(value["classification"]["first"], serde_json::json!(["p1", "p3"]));
}

#[test]
fn exit_codes() {
    assert_eq!(forge(&["analyze", &fixture("example1.sys")]).status.code(), Some(0));
    assert_eq!(forge(&["analyze", &fixture("example2.sys")]).status.code(), Some(0));
    assert_eq!(forge(&["analyze", &fixture("multiplier.sys")]).status.code(), Some(0));
    let bad = forge(&["analyze", &fixture("inconsistent.sys")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("inconsistent"));
    assert_eq!(forge(&["analyze", "/no/such/file.sys"]).status.code(), Some(1));
    assert_eq!(forge(&["analyze"]).status.code(), Some(1));
    assert_eq!(forge(&["analyze", &fixture("example1.sys"), "--engine", "quantum"]).status.code(), Some(1));
    assert_eq!(forge(&["--help"]).status.code(), Some(0));
    assert_eq!(forge(&["--version"]).status.code(), Some(0));
}

#[test]
fn inconsistent_report_has_no_dynamics() {
    let (o, v) = json(&["integrate", &fixture("inconsistent.sys")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(v["classification"].is_null());
    assert!(v["integration"].is_null());
    let ledgers = v["ledgers"].as_array().unwrap();
    for ledger in ledgers {
        assert_eq!(ledger["status"], "inconsistent");
        assert_eq!(ledger["inconsistency"]["stage"], 1);
    }
    assert_eq!(ledgers[0]["engine"], "geometric");
    assert!(ledgers[0]["inconsistency"]["source"].is_null());
    assert_eq!(ledgers[1]["inconsistency"]["source"], "p2");
    assert_eq!(ledgers[1]["inconsistency"]["residual"], "1");
}

#[test]
fn stage_limit_from_environment() {
    let f = fixture("example1.sys");
    let o = Command::new(env!("CARGO_BIN_EXE_constraint-forge"))
        .args(["analyze", &f, "--format", "json"])
        .env(MAX_STAGES_ENV, "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ledgers"][0]["status"], "exceeded-iterations");
    let o = Command::new(env!("CARGO_BIN_EXE_constraint-forge"))
        .args(["analyze", &f])
        .env(MAX_STAGES_ENV, "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(MAX_STAGES_ENV));
}

#[test]
fn trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let p = path.to_string_lossy().into_owned();
    let (o, v) = json(&["integrate", &fixture("example1.sys"), "--dt", "0.01", "--out", &p]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["integration"]["csv"], p.as_str());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,q1,q2,q3,q4,p1,p2,p3,p4"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(v["integration"]["samples"], 101);
    assert_eq!(rows[0][..5], [0.0, 0.0, -1.0, 0.0, 1.0]);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert_eq!(last[4], v["integration"]["final_state"]["q4"].as_f64().unwrap());
    assert!((last[4] - 0.5f64.sqrt().cosh()).abs() < 1e-6);
    for r in &rows {
        assert!((r[2] + r[4]).abs() < 1e-12);
    }
}

#[test]
fn command_line_overrides_file_options() {
    let f = fixture("example1.sys");
    let (o, v) = json(&["integrate", &f, "--multiplier", "lambda2=1", "--t-end", "0.5", "--dt", "0.05"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["integration"]["multipliers"]["lambda2"], "1");
    assert_eq!(v["integration"]["samples"], 11);
    let (o, _) = json(&["integrate", &f, "--multiplier", "lambda7=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lambda7"));
    let (o, _) = json(&["integrate", &f, "--init", "q2=5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: dynamics:"));
    let (o, _) = json(&["integrate", &f, "--dt", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn contact_defaults_and_engine_choice() {
    let f = fixture("example2.sys");
    let (o, v) = json(&["eom", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["contact"]["class"], 3);
    assert_eq!(v["contact"]["reeb_unique"], false);
    assert_eq!(v["ledgers"].as_array().unwrap().len(), 1);
    assert_eq!(v["classification"]["bracket"], "jacobi");
    let tangent: Vec<bool> = v["tangency"].as_array().unwrap().iter().map(|t| t["tangent"].as_bool().unwrap()).collect();
    assert_eq!(tangent, [true, false]);
    let (_, both) = json(&["analyze", &f, "--engine", "both"]);
    assert_eq!(both["ledgers"].as_array().unwrap().len(), 2);
    assert_eq!(both["engines_agree"], false);
    let (_, primary) = json(&["analyze", &f, "--ambient", "primary"]);
    assert!(primary["ledgers"][0]["constraints"].as_array().unwrap().len() > 2);
}

#[test]
fn file_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sys");
    std::fs::write(&path, "[system]\nkind = symplectic\nn = 1\n[lagrangian]\nv1^2 +\n").unwrap();
    let o = forge(&["analyze", &path.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
}

#[test]
fn text_report_sections() {
    let o = forge(&["eom", &fixture("example1.sys")]);
    let text = stdout(&o);
    for heading in ["system:", "legendre:", "ledger [geometric]", "ledger [algebraic]", "classification", "H_T =", "equations of motion:", "tangency:"] {
        assert!(text.contains(heading), "missing {heading}");
    }
    assert!(text.contains("dq4/dt = 1/2*p4"));
}

/// Field paths listed in the JSON table of docs/FORMATS.md.
fn documented_fields() -> BTreeSet<String> {
    let doc = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/FORMATS.md")).unwrap();
    let section = doc.split("## JSON report").nth(1).unwrap().split("\n## ").next().unwrap();
    section
        .lines()
        .filter_map(|l| l.strip_prefix("| `"))
        .filter_map(|l| l.split('`').next())
        .map(|f| f.replace("[]", ""))
        .collect()
}

/// Objects keyed by names from the input rather than by fixed fields.
const NAME_MAPS: &[&str] = &[
    "legendre.velocity_solution",
    "ledgers.multiplier_fixings",
    "integration.multipliers",
    "integration.final_state",
];

fn collect(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) if !NAME_MAPS.contains(&prefix) => {
            for (k, child) in m {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                out.insert(path.clone());
                collect(child, &path, out);
            }
        }
        Value::Array(items) => {
            for item in items.iter().filter(|i| i.is_object()) {
                collect(item, prefix, out);
            }
        }
        _ => {}
    }
}

#[test]
fn json_fields_match_the_documentation() {
    let mut seen = BTreeSet::new();
    for (cmd, file) in [("integrate", "example1.sys"), ("eom", "example2.sys"), ("analyze", "inconsistent.sys")] {
        let (_, v) = json(&[cmd, &fixture(file)]);
        collect(&v, "", &mut seen);
    }
    assert_eq!(seen, documented_fields());
}
