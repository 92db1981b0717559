use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seqcomplex"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

struct Files {
    _dir: TempDir,
    pennies: PathBuf,
    binary: PathBuf,
    tree: PathBuf,
    dir: PathBuf,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    let p = dir.path().to_path_buf();
    let write = |name: &str, body: &str| -> PathBuf {
        let f = p.join(name);
        std::fs::write(&f, body).unwrap();
        f
    };
    Files {
        pennies: write("pennies.json", r#"{"domain_size": 2, "scale": 1, "kind": "real", "functions": [[1, 0], [0, 1]]}"#),
        binary: write("binary.json", r#"{"domain_size": 2, "scale": 1, "kind": "binary", "functions": [[1, 1], [1, -1], [-1, 1], [-1, -1]]}"#),
        tree: write("tree.json", r#"{"depth": 2, "values": [0, 1, 0]}"#),
        dir: p,
        _dir: dir,
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dim_cover_pack() {
    let f = files();
    let d = json(&run(&["dim", "--class", s(&f.binary)]));
    assert_eq!(d["dimension"], 2);
    let d = json(&run(&["dim", "--class", s(&f.pennies), "--alpha", "1"]));
    assert_eq!(d["dimension"], 1);
    let c = json(&run(&["cover", "--class", s(&f.pennies), "--tree", s(&f.tree), "--alpha", "0", "--norm", "0"]));
    assert_eq!(c["size"], 2);
    let p = json(&run(&["pack", "--class", s(&f.pennies), "--tree", s(&f.tree), "--alpha", "1/2", "--norm", "inf"]));
    assert_eq!(p["packing"], 2);
}

#[test]
fn rad_and_value() {
    let f = files();
    let one = f.dir.join("leaf.json");
    std::fs::write(&one, r#"{"depth": 1, "values": [0]}"#).unwrap();
    let r = json(&run(&["rad", "--class", s(&f.pennies), "--tree", s(&one)]));
    assert_eq!(r["exact"], "1/2");
    let r = json(&run(&["rad", "--class", s(&f.pennies), "--depth", "1"]));
    assert_eq!(r["exact"], "1/2");
    let v = json(&run(&["value", "--class", s(&f.pennies), "--horizon", "1"]));
    assert_eq!(v["primal"]["value"], "1/2");
    assert_eq!(v["equal"], true);
    let d = json(&run(&["dudley", "--class", s(&f.pennies), "--tree", s(&f.tree)]));
    assert!(d["value"].as_f64().unwrap() >= 0.0);
}

#[test]
fn simulate_writes_csv_and_summary() {
    let f = files();
    let csv = f.dir.join("traces.csv");
    let o = run(&[
        "simulate", "--learner", "const0", "--adversary", "tree", "--class", s(&f.pennies), "--horizon", "2", "--tree", s(&f.tree),
        "--trials", "5", "--seed", "3", "--csv", s(&csv),
    ]);
    let summary = json(&o);
    assert_eq!(summary["trials"], 5);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("trial,seed,points"));
}

#[test]
fn verify_exit_codes_and_determinism() {
    let f = files();
    let o = run(&["verify", "gap"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["dim", "--nonsense"]);
    assert_eq!(o.status.code(), Some(2));

    let a = f.dir.join("a.json");
    let b = f.dir.join("b.json");
    for out in [&a, &b] {
        assert!(run(&["verify", "packing", "--seed", "5", "--out", s(out)]).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let csv = f.dir.join("a.csv");
    assert!(run(&["report", "--input", s(&a), "--format", "csv", "--out", s(&csv)]).status.success());
    let back = f.dir.join("back.json");
    assert!(run(&["report", "--input", s(&csv), "--out", s(&back)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&back).unwrap());
}

#[test]
fn failing_report_exits_one() {
    let f = files();
    let bad = f.dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"[{"suite": "x", "instance": 0, "check": "c", "lhs": "2", "relation": "<=", "rhs": "1", "margin": "-1",
             "holds": false, "arithmetic": "exact", "detail": "", "runtime_ms": null}]"#,
    )
    .unwrap();
    let o = run(&["report", "--input", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL x #0 c"));
}

#[test]
fn pollard_on_files_and_config() {
    let f = files();
    let o = run(&["verify", "pollard", "--class", s(&f.pennies), "--tree", s(&f.tree), "--alpha", "1"]);
    assert!(o.status.success());
    let rows: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);

    let cfg = f.dir.join("cfg.json");
    let out = f.dir.join("out.csv");
    std::fs::write(&cfg, format!(r#"{{"suite": "massart", "seed": 2, "instances": 5, "format": "csv", "output": "{}"}}"#, s(&out))).unwrap();
    assert!(run(&["report", "--config", s(&cfg)]).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1 + 5 + 2);
}
