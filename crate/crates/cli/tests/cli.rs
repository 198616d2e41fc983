use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn example(name: &str) -> String {
    root().join("examples").join(name).to_string_lossy().into_owned()
}

fn ssm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssm"))
        .args(args)
        .env_remove("SSM_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = ssm(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    ssm(args).status.code().unwrap()
}

fn check_schema(schema: &str, text: &str) -> Value {
    let s: Value = serde_json::from_str(&std::fs::read_to_string(root().join("schemas").join(schema)).unwrap()).unwrap();
    let v: Value = serde_json::from_str(text).unwrap();
    let validator = jsonschema::draft202012::new(&s).expect("valid schema");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{text}");
    v
}

#[test]
fn example_inputs_match_ifs_schema() {
    for f in ["cantor.json", "uniform02.json", "dyadic.json", "independent.json", "golden.json", "golden_mixed.json"] {
        check_schema("ifs.json", &std::fs::read_to_string(example(f)).unwrap());
    }
}

#[test]
fn classify_verdicts() {
    let cases = [
        ("cantor.json", "Uniqueness", "DimensionBelowOnePisotRational"),
        ("dyadic.json", "Multiplicity", "PositiveMeasureInterval"),
        ("uniform02.json", "Multiplicity", "PositiveMeasureInterval"),
        ("independent.json", "Multiplicity", "MultiplicativeIndependence"),
        ("golden.json", "Multiplicity", "PositiveMeasureInterval"),
    ];
    for (f, tag, kind) in cases {
        let v = check_schema("verdict.json", &ok(&["classify", &example(f)]));
        assert_eq!(v["tag"], tag, "{f}");
        assert_eq!(v["certificate"]["kind"], kind, "{f}");
    }
}

#[test]
fn outputs_match_schemas() {
    let cantor = example("cantor.json");
    let v = check_schema("fourier_eval.json", &ok(&["fourier", "eval", "--omega", "10", "--delta", "0.000244140625", &cantor]));
    assert!(v["radius"].as_f64().unwrap() <= 1e-6);
    check_schema("calibration.json", &ok(&["fourier", "calibrate", "--points", "6", &cantor]));
    check_schema("mc.json", &ok(&["--seed", "3", "fourier", "mc", "--omega", "2", "--samples", "500", &cantor]));
    check_schema("renewal_sim.json", &ok(&["--seed", "3", "renewal", "sim", "--t", "5", "--trials", "50", "--omega", "2", &cantor]));
    check_schema("renewal.json", &ok(&["--format", "json", "renewal", "--kmax", "6", "--steps", "1,2"]));
    check_schema("dc.json", &ok(&["--format", "json", "dc", "--x", "3", "--epsilon", "1/10", "--min-poly", "-1,-1,1"]));
    let v = check_schema("dc.json", &ok(&["dc", "--x", "100", "--epsilon", "1/10", "--gamma", "sqrt(3)", "--min-poly", "-1,-2,1"]));
    assert_eq!((v["dc_x"].as_u64(), v["dc_gamma_x"].as_u64()), (Some(4), Some(5)));
    let v = check_schema(
        "recover.json",
        &ok(&["recover", "--alpha", "[2,1]", "--n", "16", "--K", "3", "--epsilon", "1/100", "--min-poly", "-1,-1,1"]),
    );
    assert_eq!(v["beta"], "[2, 1]");
    let v = check_schema(
        "liouville.json",
        &ok(&["liouville", "--alpha", "[2,1] + pi/10^80", "--H", "2", "--budget", "32", "--min-poly", "-1,-1,1"]),
    );
    assert!(v["witnesses"].as_array().unwrap().iter().any(|w| w["satisfies"] == true));
    let v = check_schema("gamma.json", &ok(&["gamma", "--R", "100", "--min-poly", "-1,-1,1"]));
    assert_eq!(v["gamma"], serde_json::json!(["34", "55"]));
}

#[test]
fn csv_headers() {
    let cantor = example("cantor.json");
    let scan = ok(&["fourier", "scan", "--omega-min", "1", "--omega-max", "100", "--points", "5", &cantor]);
    let lines: Vec<&str> = scan.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("omega,"));
    let cols = lines[0].split(',').count();
    assert!(lines[1..].iter().all(|l| l.split(',').count() == cols));
    let r = ok(&["renewal", "--kmax", "3", "--steps", "1,2"]);
    assert_eq!(r, "k,P_k,P_k_float\n0,1,1\n1,1/2,0.5\n2,3/4,0.75\n3,5/8,0.625\n");
    let d = ok(&["dc", "--x", "3", "--epsilon", "1/10", "--min-poly", "-1,-1,1"]);
    assert!(d.starts_with("t,value,nearest_int,distance,counted\n"));
    let e = ok(&["--format", "csv", "fourier", "eval", "--omega", "1", &cantor]);
    assert!(e.starts_with("omega,re,im,abs,radius\n"));
}

#[test]
fn exit_codes() {
    let cantor = example("cantor.json");
    assert_eq!(code(&["classify", &cantor]), 0);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["fourier", "scan", "--omega-min", "1", "--omega-max", "2", "--pair", "1,1", &cantor]), 2);
    assert_eq!(code(&["fourier", "eval", "--omega", "1", "--delta", "2", &cantor]), 2);
    assert_eq!(code(&["--precision", "16", "classify", &cantor]), 2);
    assert_eq!(code(&["classify", "/nonexistent/ifs.json"]), 2);
    assert_eq!(code(&["rewrite", "--j", "1", &cantor]), 2);
    assert_eq!(code(&["classify", r#"{"maps":[]}"#]), 1);
    assert_eq!(code(&["classify", r#"{"maps":[{"l":1,"a":"0"}],"bogus":1}"#]), 1);
    assert_eq!(code(&["recover", "--alpha", "[2,1]", "--n", "8", "--K", "3", "--epsilon", "1/100", "--min-poly", "-1,-1,1"]), 1);
    assert_eq!(code(&["dc", "--x", "100", "--epsilon", "1/10", "--gamma", "[0,1]", "--min-poly", "-1,-2,1"]), 1);
    let o = ssm(&["fourier", "eval", "--omega", "1", "--delta", "2", &cantor]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: invalid value `2` for --delta"));
}

#[test]
fn thread_count_does_not_change_output() {
    let golden = example("golden.json");
    let args = |t: &'static str| ["--threads", t, "fourier", "scan", "--omega-min", "0.5", "--omega-max", "500", "--points", "24", "--C", "2"];
    let mut a1 = args("1").to_vec();
    a1.push(&golden);
    let mut a4 = args("4").to_vec();
    a4.push(&golden);
    assert_eq!(ok(&a1), ok(&a4));
}

#[test]
fn seeded_runs_are_reproducible() {
    let cantor = example("cantor.json");
    let mc = |seed: &str| ok(&["--seed", seed, "fourier", "mc", "--omega", "7", "--samples", "2000", &cantor]);
    assert_eq!(mc("11"), mc("11"));
    assert_ne!(mc("11"), mc("12"));
    let golden = example("golden_mixed.json");
    let sim = |threads: &str| ok(&["--threads", threads, "--seed", "5", "renewal", "sim", "--t", "8", "--trials", "400", "--omega", "3", "--pair", "2,3", &golden]);
    assert_eq!(sim("1"), sim("3"));
    let o = ssm(&["--seed", "11", "fourier", "mc", "--omega", "7", "--samples", "10", &cantor]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: 11"));
}

#[test]
fn precision_flag_and_environment() {
    let cantor = example("cantor.json");
    let v: Value = serde_json::from_str(&ok(&["--precision", "256", "fourier", "eval", "--omega", "3", &cantor])).unwrap();
    assert_eq!(v["precision"], 256);
    let o = Command::new(env!("CARGO_BIN_EXE_ssm"))
        .args(["fourier", "eval", "--omega", "3", &cantor])
        .env("SSM_PRECISION_BITS", "192")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["precision"], 192);
    let o = Command::new(env!("CARGO_BIN_EXE_ssm"))
        .args(["classify", &cantor])
        .env("SSM_PRECISION_BITS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rewrite_round_trips_and_preserves_transform() {
    let src = example("golden_mixed.json");
    let text = ok(&["rewrite", "--j", "2", &src]);
    check_schema("ifs.json", &text);
    let o = ssm(&["rewrite", "--j", "2", &src]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("shift:") && err.contains("b:"));
    let v: Value = serde_json::from_str(&text).unwrap();
    let maps = v["maps"].as_array().unwrap();
    assert_eq!(maps[0]["l"], maps[1]["l"]);
    let before: Value = serde_json::from_str(&ok(&["classify", &src])).unwrap();
    let after: Value = serde_json::from_str(&ok(&["classify", &text])).unwrap();
    assert_eq!(before["tag"], after["tag"]);
    for w in ["0.7", "5", "40"] {
        let a: Value = serde_json::from_str(&ok(&["fourier", "eval", "--omega", w, &src])).unwrap();
        let b: Value = serde_json::from_str(&ok(&["fourier", "eval", "--omega", w, &text])).unwrap();
        let tol = a["radius"].as_f64().unwrap() + b["radius"].as_f64().unwrap() + 1e-12;
        assert!((a["abs"].as_f64().unwrap() - b["abs"].as_f64().unwrap()).abs() <= tol, "ω = {w}");
    }
}

#[test]
fn scan_writes_svg() {
    let dir = std::env::temp_dir().join(format!("ssm-svg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.svg");
    ok(&["fourier", "scan", "--omega-min", "1", "--omega-max", "50", "--points", "8", "--svg", path.to_str().unwrap(), &example("cantor.json")]);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 3);
    std::fs::remove_dir_all(&dir).unwrap();
}
