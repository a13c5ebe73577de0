use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner-lab")).args(args).output().expect("binary runs")
}

fn lab_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner-lab"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn trace_tip_of_sqrt_driving() {
    let v = json(&lab(&["trace", "--driving", "sqrt:c=3", "--t", "1.0"]));
    assert!((num(&v, "x") - 2.452459).abs() < 1e-4);
    assert!((num(&v, "y") - 1.781833).abs() < 1e-4);
}

#[test]
fn ratio_summary_keys_and_limit() {
    let v = json(&lab(&["ratio", "--theorem", "1", "--c", "3", "--t-grid", "geometric:1e-2,1e-6,9"]));
    assert!((num(&v, "limit") - 4.0).abs() < 0.02);
    assert!(num(&v, "error") >= 0.0);
    assert_eq!(v["model"], "sqrt-t");
    assert_eq!(v["theorem"], 1);
}

#[test]
fn oracle_outputs() {
    let v = json(&lab(&["oracle", "arc", "--t", "1e-6"]));
    for key in ["t", "beta1", "beta2", "lambda0", "residual1", "residual2"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!((num(&v, "beta1") / -0.8947e-4 - 1.0).abs() < 0.01);
    assert!((num(&v, "beta2") / 0.033531 - 1.0).abs() < 0.01);

    let v = json(&lab(&["oracle", "sqrt", "--c", "3"]));
    assert!((num(&v, "beta") - 0.6).abs() < 1e-12);
    for key in ["c", "theta", "b_modulus"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(lab(&["trace", "--driving", "spiral:c=1", "--t", "1"]).status.code(), Some(2));
    assert_eq!(lab(&["oracle", "arc", "--t", "5"]).status.code(), Some(2));
    assert_eq!(lab(&["ratio", "--theorem", "3", "--c", "1", "--t-grid", "geometric:1e-2,1e-4,5"]).status.code(), Some(2));
    assert_eq!(lab(&["ratio", "--theorem", "1", "--c", "1", "--t-grid", "geometric:1e-4,1e-2,5"]).status.code(), Some(2));
    assert_eq!(lab(&["hcap", "--curve", "file:/nonexistent/curve.csv"]).status.code(), Some(2));
    assert_eq!(lab(&["nonsense"]).status.code(), Some(2));
    // a Newton budget of one iteration cannot reach the default tolerance
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"numeric": {"max_newton_iters": 1}}"#).unwrap();
    let out = lab(&["oracle", "arc", "--t", "0.05", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("arc_params"));
}

#[test]
fn errors_name_the_operation() {
    let out = lab(&["oracle", "arc", "--t", "5"]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("arc_params"), "{msg}");
}

#[test]
fn outputs_are_byte_identical_and_stamp_is_a_comment() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "weld".to_string(),
            "--curve".into(),
            "arc:phi=0.3".into(),
            "--points".into(),
            "257".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &Path, extra: &[&str]| {
        let mut v = args(p);
        v.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        assert!(lab(&refs).status.success());
        std::fs::read(p).unwrap()
    };
    let first = run(&a, &[]);
    let second = run(&b, &[]);
    assert_eq!(first, second);
    assert!(first.starts_with(b"t,lambda\n"));

    let stamped = run(&a, &["--stamp"]);
    let text = String::from_utf8(stamped).unwrap();
    let (line, rest) = text.split_once('\n').unwrap();
    assert!(line.starts_with("# loewner-lab "), "{line}");
    assert_eq!(rest.as_bytes(), &first[..]);
}

#[test]
fn json_outputs_repeat_exactly() {
    let args = ["measure", "--c", "1", "--t", "0.01"];
    assert_eq!(lab(&args).stdout, lab(&args).stdout);
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"driving": "sqrt:c=1", "t": 0.25, "numeric": {"ode_rel_tol": 1e-10}}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = json(&lab(&["trace", "--config", c]));
    let direct = json(&lab(&["trace", "--driving", "sqrt:c=1", "--t", "0.25", "--rel-tol", "1e-10"]));
    assert_eq!(from_file, direct);
    // the flag wins over the file entry
    let flagged = json(&lab(&["trace", "--config", c, "--t", "1.0"]));
    assert_eq!(num(&flagged, "t"), 1.0);

    std::fs::write(&cfg, r#"{"drivng": "sqrt:c=1"}"#).unwrap();
    assert_eq!(lab(&["trace", "--config", c, "--t", "1"]).status.code(), Some(2));
}

#[test]
fn trace_grid_writes_curve_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let svg = dir.path().join("trace.svg");
    let status = lab(&[
        "trace",
        "--driving",
        "sqrt:c=3",
        "--t-grid",
        "geometric:1,1e-4,32",
        "--out",
        out.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("s,x,y,t\n"));
    assert_eq!(csv.lines().count(), 1 + 33);
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn trace_then_weld_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let weld = dir.path().join("weld.csv");
    assert!(lab(&["trace", "--driving", "sqrt:c=1", "--t-grid", "geometric:1,1e-9,512", "--out", curve.to_str().unwrap()])
        .status
        .success());
    let spec = format!("file:{}", curve.display());
    assert!(lab(&["weld", "--curve", &spec, "--out", weld.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&weld).unwrap();
    let last = text.lines().last().unwrap();
    let (t, l) = last.split_once(',').unwrap();
    let (t, l): (f64, f64) = (t.parse().unwrap(), l.parse().unwrap());
    assert!((t - 1.0).abs() < 1e-3, "{t}");
    assert!((l - 1.0).abs() < 1e-3, "{l}");
    // the welded driving feeds back into the flow
    let d = format!("file:{}", weld.display());
    let v = json(&lab(&["measure", "--driving", &d, "--t", "0.5"]));
    assert!(num(&v, "m_left") > num(&v, "m_right"));
}

#[test]
fn ratio_sweep_csv_and_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let v = json(&lab(&[
        "ratio",
        "--theorem",
        "2",
        "--arc-oracle",
        "--interval",
        "--t-grid",
        "geometric:1e-3,1e-9,7",
        "--csv",
        table.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]));
    assert!((num(&v, "limit") / (2.0 * std::f64::consts::PI) - 1.0).abs() < 0.01);
    assert_eq!(v["model"], "cbrt-t");
    let csv = std::fs::read_to_string(&table).unwrap();
    assert!(csv.starts_with("t,lambda,f_minus,f_plus,m_left,m_right,ratio\n"));
    assert_eq!(csv.lines().count(), 8);
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<circle").count(), 7);
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let args = ["ratio", "--theorem", "1", "--c", "1", "--t-grid", "geometric:1e-2,1e-6,9"];
    let one = lab_env(&args, "LOEWNER_LAB_THREADS", "1");
    assert!(one.status.success());
    assert_eq!(one.stdout, lab(&args).stdout);
    assert_eq!(lab_env(&args, "LOEWNER_LAB_THREADS", "zero").status.code(), Some(2));
}

#[test]
fn source_must_be_unique() {
    let out = lab(&["measure", "--c", "1", "--arc-oracle", "--t", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_rejected_where_meaningless() {
    assert_eq!(lab(&["oracle", "sqrt", "--c", "1", "--plot", "/tmp/never.svg"]).status.code(), Some(2));
}

#[test]
fn check_command_passes() {
    let v = json(&lab(&["check"]));
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.len() >= 6, "{names:?}");
    assert!(names.contains(&"weld-round-trip"));
}
