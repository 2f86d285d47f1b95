use std::path::PathBuf;
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/golden").join(name)
}

fn lipext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipext")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("report is JSON")
}

#[test]
fn verify_all_is_byte_identical_across_runs() {
    for name in ["scalar.json", "pointwise.json", "measure.json", "quotient.json", "interpolation.json"] {
        let path = golden(name);
        let p = path.to_str().unwrap();
        let a = lipext(&["verify-all", p, "--suite-cases", "4"]);
        let b = lipext(&["verify-all", p, "--suite-cases", "4"]);
        assert_eq!(code(&a), 0, "{name}: {}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert_eq!(report(&a)["seed"], report(&b)["seed"]);
    }
}

#[test]
fn seed_flag_overrides_instance_seed() {
    let p = golden("scalar.json");
    let o = lipext(&["verify-all", p.to_str().unwrap(), "--suite-cases", "2", "--seed", "99"]);
    assert_eq!(report(&o)["seed"], 99);
}

#[test]
fn non_additive_measure_extension_exits_two_with_witness() {
    let o = lipext(&["extend-measure", golden("nonadditive.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r = report(&o);
    let w = &r["error"]["witness"];
    assert_eq!(w["kind"], "point-subsets");
    assert_eq!(w["x"], 2);
    assert_eq!(w["check"], "additivity");
}

#[test]
fn unknown_command_is_a_usage_error() {
    let o = lipext(&["extend-everything", "x.json"]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("verify-all"));
    let o = lipext(&[]);
    assert_eq!(code(&o), 64);
}

#[test]
fn bad_instances_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"version": 1, "metric_space": {"dist": [[0, 1], [1, 0]]}, "measure": {"weights": [1, -1]}}"#).unwrap();
    let o = lipext(&["verify-all", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert_eq!(report(&o)["error"]["pointer"], "/measure/weights/1");

    std::fs::write(&bad, "{\n \"version\": 1,\n ]").unwrap();
    let o = lipext(&["verify-all", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert_eq!(report(&o)["error"]["line"], 3);

    let o = lipext(&["verify-all", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 65);
}

#[test]
fn max_atoms_is_capped() {
    let p = golden("scalar.json");
    let o = lipext(&["verify-all", p.to_str().unwrap(), "--max-atoms", "21"]);
    assert_eq!(code(&o), 64);
    let o = lipext(&["extend-pointwise", golden("pointwise.json").to_str().unwrap(), "--max-atoms", "2"]);
    assert_eq!(code(&o), 65);
    assert_eq!(report(&o)["error"]["pointer"], "/measure/weights");
}

#[test]
fn csv_report_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = lipext(&["extend-mcshane", golden("scalar.json").to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,bound,achieved,holds,witness"));
    assert!(lines.all(|l| l.contains(",true,")));
}

#[test]
fn emitted_instance_reproduces_check_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("ext.json");
    for (cmd, name) in [("extend-pointwise", "pointwise.json"), ("extend-mcshane", "scalar.json"), ("extend-measure", "measure.json")] {
        let first = lipext(&[cmd, golden(name).to_str().unwrap(), "--emit-instance", emitted.to_str().unwrap()]);
        assert_eq!(code(&first), 0, "{cmd}");
        let second = lipext(&[cmd, emitted.to_str().unwrap()]);
        assert_eq!(code(&second), 0, "{cmd}");
        let outcomes = |o: &Output| -> Vec<(String, bool)> {
            report(o)["checks"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| (c["name"].as_str().unwrap().to_string(), c["holds"].as_bool().unwrap()))
                .collect()
        };
        assert_eq!(outcomes(&first), outcomes(&second), "{cmd}");
        assert_eq!(report(&first)["result"]["extended"], report(&second)["result"]["extended"], "{cmd}");
    }
}

#[test]
fn timing_is_opt_in() {
    let p = golden("scalar.json");
    let o = lipext(&["extend-whitney", p.to_str().unwrap()]);
    assert!(report(&o).get("timing").is_none());
    let o = lipext(&["extend-whitney", p.to_str().unwrap(), "--timing"]);
    assert!(report(&o)["timing"]["seconds"].as_f64().unwrap() >= 0.0);
}
