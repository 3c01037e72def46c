use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman-coorbit"))
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema(schema: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{schema}.schema.json"));
    let validator = jsonschema::validator_for(&read(&path)).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

fn z_squared(dir: &Path) -> PathBuf {
    write(dir, "z2.json", &json!({"n": 1, "terms": [{"exponent": [2], "re": 1.0}]}))
}

fn csv_column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

#[test]
fn default_verify_passes_and_matches_schema() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["verify"], None, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(&tmp.path().join("verify.json"));
    assert_schema("verify", &report);
    assert_eq!(report["all_pass"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn verify_in_two_dimensions() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"n": 2, "sigma": 3.0, "epsilon": 0.4, "box_radius": 0.8, "truncation": 3}));
    let out = run(&["verify"], Some(&cfg), &tmp.path().join("o"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn alpha_on_the_boundary_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"n": 1, "sigma": 3.0, "p": 2.0, "alpha": 3.0}));
    let out = run(&["verify"], Some(&cfg), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config_error") && err.contains("alpha"), "{err}");
}

#[test]
fn sigma_equal_to_n_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"n": 2, "sigma": 2.0, "alpha": 0.0}));
    let out = run(&["verify"], Some(&cfg), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
}

#[test]
fn unknown_config_field_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"eps": 0.1}));
    assert_eq!(run(&["lattice"], Some(&cfg), &tmp.path().join("o")).status.code(), Some(2));
}

#[test]
fn huge_epsilon_gives_the_identity_point() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"epsilon": 1e6}));
    assert!(run(&["lattice"], Some(&cfg), tmp.path()).status.success());
    let fam = read(&tmp.path().join("lattice.json"));
    assert_schema("lattice", &fam);
    assert_eq!(fam, json!([{"index": 0, "tvec": [0.0, 0.0], "w": [[0.0, 0.0]], "one_minus_w2": 1.0}]));
}

#[test]
fn reconstruct_z_squared() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"n": 1, "sigma": 3.0, "epsilon": 0.1, "box_radius": 1.5, "truncation": 8}));
    let input = z_squared(tmp.path());
    let out = run(&["reconstruct", "--input", input.to_str().unwrap()], Some(&cfg), &tmp.path().join("o"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(&tmp.path().join("o/reconstruct.json"));
    assert_schema("reconstruct", &report);
    assert_schema("coefficients", &read(&tmp.path().join("o/samples.json")));
    assert!(report["relative_error"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn decompose_writes_coefficients() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"epsilon": 0.1, "box_radius": 1.5, "truncation": 6}));
    let input = write(tmp.path(), "f.json", &json!({"n": 1, "terms": [{"exponent": [0], "re": 1.0}, {"exponent": [1], "re": 0.5, "im": -0.25}]}));
    let out = run(&["decompose", "--input", input.to_str().unwrap()], Some(&cfg), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(&tmp.path().join("decompose.json"));
    assert_schema("decompose", &report);
    let coeffs = read(&tmp.path().join("coefficients.json"));
    assert_schema("coefficients", &coeffs);
    assert_eq!(coeffs.as_array().unwrap().len(), report["points"].as_u64().unwrap() as usize);
}

#[test]
fn mismatched_input_dimension_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "f.json", &json!({"n": 2, "terms": [{"exponent": [1, 0], "re": 1.0}]}));
    let out = run(&["decompose", "--input", input.to_str().unwrap()], None, tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frame_bounds_sweep_is_monotone() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["frame-bounds", "--sweep", "epsilon=0.4,0.2,0.1"], None, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a: Vec<f64> = csv_column(&tmp.path().join("summary.csv"), "a_est").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(a.len(), 3);
    assert!(a.windows(2).all(|w| w[1] >= w[0]), "{a:?}");
    for v in ["0.4", "0.2", "0.1"] {
        assert_schema("frame_bounds", &read(&tmp.path().join(format!("epsilon={v}/frame_bounds.json"))));
    }
}

#[test]
fn reruns_are_bit_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &json!({"epsilon": 0.1, "box_radius": 1.5, "truncation": 6, "seed": 7}));
    let input = z_squared(tmp.path());
    let files = ["decompose.json", "coefficients.json", "summary.csv"];
    let mut runs = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let dir = tmp.path().join(format!("run{k}"));
        let out = run(&["--threads", threads, "decompose", "--input", input.to_str().unwrap()], Some(&cfg), &dir);
        assert!(out.status.success());
        runs.push(files.map(|f| std::fs::read(dir.join(f)).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let v1 = tmp.path().join("v1");
    let v2 = tmp.path().join("v2");
    assert!(run(&["verify"], Some(&cfg), &v1).status.success());
    assert!(run(&["verify"], Some(&cfg), &v2).status.success());
    assert_eq!(std::fs::read(v1.join("verify.json")).unwrap(), std::fs::read(v2.join("verify.json")).unwrap());
}

#[test]
fn floats_round_trip_exactly() {
    let tmp = TempDir::new().unwrap();
    assert!(run(&["lattice"], None, tmp.path()).status.success());
    let fam = read(&tmp.path().join("lattice.json"));
    assert_schema("lattice", &fam);
    let expect = bergman_coorbit::sampling::generate_lattice(0.15, 1.2, 1).unwrap();
    let got = fam.as_array().unwrap();
    assert_eq!(got.len(), expect.len());
    for (g, e) in got.iter().zip(expect.entries()) {
        assert_eq!(g["one_minus_w2"].as_f64().unwrap().to_bits(), e.one_minus_w2.to_bits());
        for (t, u) in g["tvec"].as_array().unwrap().iter().zip(&e.tvec) {
            assert_eq!(t.as_f64().unwrap().to_bits(), u.to_bits());
        }
        let w = &g["w"][0];
        assert_eq!(w[0].as_f64().unwrap().to_bits(), e.w.coords()[0].re.to_bits());
        assert_eq!(w[1].as_f64().unwrap().to_bits(), e.w.coords()[0].im.to_bits());
    }
}

#[test]
fn example_config_is_schema_valid() {
    let cfg = json!({
        "n": 1, "sigma": 3.0, "alpha": 0.0, "p": 2.0, "epsilon": 0.15, "box_radius": 1.2, "truncation": 6,
        "quadrature": {"radial": 12, "phase": 32, "modulus": 1},
        "atom": {"polynomial": [{"exponent": [1], "re": 1.0}]}, "seed": 0, "output": "out"
    });
    assert_schema("config", &cfg);
    assert_schema("function", &json!({"n": 1, "terms": [{"exponent": [2], "re": 1.0}]}));
    let tmp = TempDir::new().unwrap();
    let path = write(tmp.path(), "c.json", &cfg);
    let out = run(&["frame-bounds"], Some(&path), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
