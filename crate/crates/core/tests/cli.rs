use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_torus-nls");

fn run(args: &[&str], out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).arg("--out").arg(out).arg("--quiet");
    match threads {
        Some(t) => cmd.env("TORUS_NLS_THREADS", t),
        None => cmd.env_remove("TORUS_NLS_THREADS"),
    };
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn validate(schema: &str, value: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema").join(schema);
    let validator = jsonschema::validator_for(&read_json(&path)).unwrap();
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn classify_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    for (f, status) in [("2*uc*uxc", "WellPosed"), ("2*u*ux", "IllPosed"), ("2*u*ux*uc + u^2*uxc", "WellPosed"), ("i*(2*u*ux*uc + u^2*uxc)", "IllPosed")] {
        let o = run(&["classify", f], dir.path(), None);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v = read_json(&dir.path().join("verdict.json"));
        validate("classification_verdict.schema.json", &v);
        assert_eq!(v["status"], status, "{f}");
        assert_eq!(v["witness"].is_null(), status == "WellPosed");
        validate("run_manifest.schema.json", &read_json(&dir.path().join("manifest.json")));
    }
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["classify", "u + + ux"], dir.path(), None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("token 3"), "{}", String::from_utf8_lossy(&o.stderr));

    assert_eq!(code(&run(&["classify", "u*w"], dir.path(), None)), 1);
    assert_eq!(code(&run(&["classify", "0.5*u"], dir.path(), None)), 1);
    assert_eq!(code(&run(&["eps-converge", "2*uc*uxc", "--eps", "0.01"], dir.path(), None)), 1);
    assert_eq!(code(&run(&["smooth-probe", "2*uc*uxc", "--grid", "64"], dir.path(), None)), 1);
    assert_eq!(code(&run(&["ineq-probe", "no_such_probe"], dir.path(), None)), 1);

    let unknown = write_config(dir.path(), "subcommand = \"classify\"\nnonlinearity = \"u\"\nbogus = 1\n");
    assert_eq!(code(&run(&["classify", "--config", unknown.to_str().unwrap()], dir.path(), None)), 1);
    let mismatch = write_config(dir.path(), "subcommand = \"energy\"\nnonlinearity = \"u\"\n");
    assert_eq!(code(&run(&["classify", "--config", mismatch.to_str().unwrap()], dir.path(), None)), 1);
}

#[test]
fn config_file_supplies_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "subcommand = \"classify\"\nnonlinearity = \"2*u*ux\"\nseed = 7\n");
    let o = run(&["classify", "--config", cfg.to_str().unwrap()], dir.path(), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&dir.path().join("verdict.json"))["status"], "IllPosed");
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["config"]["seed"], 7);
    assert_eq!(m["config"]["nonlinearity"], "2*u*ux");
}

/// Small-grid configurations for every report-producing subcommand.
const REPORT_RUNS: &[(&str, &str, &[&str])] = &[
    ("gauge-check", "nonlinearity = \"2*u*ux*uc + u^2*uxc\"\nn = 32\nt_end = 0.005\n", &["gauge-check.json"]),
    ("energy", "nonlinearity = \"2*u*ux*uc + u^2*uxc\"\nn = 32\n", &["energy.json"]),
    ("eps-converge", "nonlinearity = \"2*uc*uxc\"\nn = 32\nt_end = 0.02\n", &["eps-converge.json"]),
    ("bona-smith", "nonlinearity = \"2*uc*uxc\"\nn = 128\nt_end = 0.005\n", &["bona-smith.json"]),
    ("smooth-probe", "nonlinearity = \"i*(2*u*ux*uc + u^2*uxc)\"\nn = 256\nt_end = 0.005\n", &["smooth-probe.json"]),
    ("ineq-probe", "samples = 20\nn_list = [32, 64]\n", &["bilinear_2_1.json", "product_2_2.json", "projection_2_3.json", "commutator_2_5.json"]),
];

#[test]
fn every_subcommand_writes_valid_outputs() {
    for (sub, body, files) in REPORT_RUNS {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), &format!("subcommand = \"{sub}\"\n{body}"));
        let o = run(&[sub, "--config", cfg.to_str().unwrap()], dir.path(), None);
        assert!([0, 2, 3].contains(&code(&o)), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        for f in *files {
            let report = read_json(&dir.path().join(f));
            validate("experiment_report.schema.json", &report);
        }
        let m = read_json(&dir.path().join("manifest.json"));
        validate("run_manifest.schema.json", &m);
        assert_eq!(m["subcommand"], *sub);
        assert_eq!(m["exit_code"], code(&o));
    }

    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "2*uc*uxc", "--grid", "32", "--eps", "0.01"], dir.path(), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    validate("trajectory_manifest.schema.json", &read_json(&dir.path().join("trajectory/manifest.json")));
    validate("run_manifest.schema.json", &read_json(&dir.path().join("manifest.json")));
}

/// Drop the fields that legitimately differ between runs: timestamps and the output path.
fn strip_run_fields(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timestamp");
            map.remove("out");
            map.values_mut().for_each(strip_run_fields);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_run_fields),
        _ => {}
    }
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "run.toml" {
                let bytes = std::fs::read(&p).unwrap();
                let bytes = if p.extension().is_some_and(|x| x == "json") {
                    let mut v: Value = serde_json::from_slice(&bytes).unwrap();
                    strip_run_fields(&mut v);
                    serde_json::to_vec(&v).unwrap()
                } else {
                    bytes
                };
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn reruns_are_identical_across_thread_counts() {
    let runs: &[&[&str]] = &[
        &["classify", "2*u*ux"],
        &["solve", "i*(2*u*ux*uc + u^2*uxc)", "--grid", "32", "--eps", "0.01"],
        &["eps-converge", "2*uc*uxc", "--grid", "32"],
        &["ineq-probe", "commutator_2_5"],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ca = code(&run(args, a.path(), Some("1")));
        let cb = code(&run(args, b.path(), Some("3")));
        assert_eq!(ca, cb);
        assert_eq!(snapshot(a.path()), snapshot(b.path()), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["classify", "u"], dir.path(), Some("zero"))), 1);
}
