use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rootabc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootabc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = rootabc(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn expand_text_and_json() {
    let o = rootabc(&["expand", "--k", "2", "--s", "3", "--terms", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("[1; 3, 1, 5]"));
    for c in ["1/1", "4/3", "5/4", "29/23"] {
        assert!(text.contains(c), "{c} missing from {text}");
    }
    let v = json(&["expand", "--k", "109", "--s", "5", "--terms", "5"]);
    assert_eq!(v["coefficients"], serde_json::json!(["2", "1", "1", "4", "77733"]));
}

#[test]
fn exit_codes() {
    assert_eq!(rootabc(&["expand", "--k", "4", "--s", "2", "--terms", "1"]).status.code(), Some(2));
    assert_eq!(rootabc(&["expand", "--k", "2"]).status.code(), Some(2));
    assert_eq!(rootabc(&["expand", "--k", "2", "--s", "3", "--terms", "0"]).status.code(), Some(2));
    let o = rootabc(&["scan", "--s", "3", "--k-min", "2", "--k-max", "2", "--out", "/nonexistent/dir/r.jsonl"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn roth_table_rows() {
    let v = json(&["roth-table", "--k", "2", "--eps-roth", "0.4,0.5,1"]);
    let bounds: Vec<f64> = v.as_array().unwrap().iter().map(|r| r["bound"].as_f64().unwrap()).collect();
    for (got, want) in bounds.iter().zip([15.03, 13.16, 6.78]) {
        assert!((got - want).abs() <= 0.02, "{got} vs {want}");
    }
    let v = json(&["roth-table", "--eps-roth", "0"]);
    assert!((v[0]["bound"].as_f64().unwrap() - 25.60).abs() <= 0.02);
    assert_eq!(v[0]["flags"], serde_json::json!(["paper-discrepancy"]));
}

#[test]
fn ridout_square_root() {
    let v = json(&["ridout", "--s", "2", "--k", "2", "--primes", "2,3", "--eps", "1", "--K", "1", "--depth", "40"]);
    assert!((v["bound"].as_f64().unwrap() - 144.0).abs() < 1e-9);
    let found: Vec<String> = v["approximants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| format!("{}/{}", c["p"].as_str().unwrap(), c["q"].as_str().unwrap()))
        .collect();
    assert_eq!(found, ["3/2", "17/12"]);
}

#[test]
fn metrics_of_a_triple() {
    let v = json(&["metrics", "--triple", "2,6436341,6436343", "--eps", "1/5"]);
    assert!((v["quality"].as_f64().unwrap() - 1.62991).abs() < 2e-4);
    assert_eq!(v["rad_abc"], "15042");
    assert_eq!(rootabc(&["metrics", "--triple", "2,4,6"]).status.code(), Some(2));
}

fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn scan_is_resumable_and_csv_matches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let csv = dir.path().join("r.csv");
    let out_s = out.to_str().unwrap();
    let args = ["scan", "--s", "3", "--k-min", "2", "--k-max", "2", "--depth", "3", "--out", out_s];
    assert!(rootabc(&args).status.success());
    let first = fs::read(&out).unwrap();
    assert_eq!(line_count(&out), 3);
    let o = rootabc(&args);
    assert!(stdout(&o).starts_with("0 appended"));
    assert_eq!(fs::read(&out).unwrap(), first);

    let o = rootabc(&[
        "--jobs", "2", "scan", "--s", "3", "--k-min", "2", "--k-max", "12", "--depth", "6", "--out", out_s, "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let jsonl = line_count(&out);
    // k = 8 is a cube; 10 roots times 6 equations
    assert_eq!(jsonl, 60);
    assert_eq!(line_count(&csv), jsonl + 1);
}

#[test]
fn verify_exit_status() {
    let ok = rootabc(&["verify", "--suite", "gains,gain-quality", "--k-min", "2", "--k-max", "20", "--depth", "15"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    let bad = rootabc(&["verify", "--suite", "roth-form", "--k-min", "2", "--k-max", "2", "--depth", "5", "--eps-roth", "0", "--c-inverse", "0.5"]);
    assert_eq!(bad.status.code(), Some(5));
    // degree 5 Liouville checks are observational
    let obs = rootabc(&["verify", "--suite", "liouville", "--s", "5", "--k-min", "109", "--k-max", "109", "--depth", "5"]);
    assert!(obs.status.success());
    assert!(stdout(&obs).contains("observed"));
}

#[test]
fn config_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("defaults.conf");
    fs::write(&cfg, "# shared defaults\nterms = 4\nk = 2\ns = 3\ndepth = 99\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let o = rootabc(&["--config", cfg_s, "expand"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("[1; 3, 1, 5]"));
    // flags win over the file
    let o = rootabc(&["--config", cfg_s, "expand", "--terms", "2"]);
    assert!(stdout(&o).contains("[1; 3]"));
    assert_eq!(rootabc(&["--config", "/nonexistent.conf", "expand", "--k", "2", "--s", "3"]).status.code(), Some(4));
}
