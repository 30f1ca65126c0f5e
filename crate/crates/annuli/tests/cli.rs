use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_annuli")
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("annuli-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(bin()).args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

#[test]
fn unknown_rhs_exits_with_two() {
    let dir = scratch("unknown");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"experiment":"bad","rhs":"not-a-field","solvers":["zernike-annular"],"n":[4]}"#).unwrap();
    for cmd in ["solve", "convergence", "structure"] {
        let out = run(&[cmd], &cfg, &dir);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("not-a-field"));
    }
}

#[test]
fn decreasing_sweep_is_a_config_error() {
    let dir = scratch("sweep");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"experiment":"bad","rhs":"zero","solvers":["zernike-annular"],"n":[8,4]}"#).unwrap();
    assert_eq!(run(&["convergence"], &cfg, &dir).status.code(), Some(2));
}

#[test]
fn zero_rhs_gives_zero_coefficients() {
    let dir = scratch("zero");
    let out = run(&["solve"], &configs().join("zero.json"), &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for solver in ["zernike-annular", "chebyshev-fourier"] {
        let text = std::fs::read_to_string(dir.join(format!("zero_{solver}_coefficients.json"))).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mut count = 0;
        let mut stack = vec![&json];
        while let Some(v) = stack.pop() {
            match v {
                serde_json::Value::Object(m) => {
                    if let Some(serde_json::Value::Array(c)) = m.get("coefficients") {
                        assert!(c.iter().all(|x| x.as_f64() == Some(0.0)));
                        count += c.len();
                    }
                    stack.extend(m.values());
                }
                serde_json::Value::Array(a) => stack.extend(a.iter()),
                _ => {}
            }
        }
        assert!(count > 0);
        assert!(dir.join(format!("zero_{solver}_values.csv")).exists());
    }
}

#[test]
fn manufactured_convergence_csv() {
    let dir = scratch("manufactured");
    let out = run(&["convergence"], &configs().join("manufactured.json"), &dir);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(dir.join("manufactured_convergence.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["experiment", "solver", "N", "dofs", "sup_error", "wall_ms"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let err: f64 = row[4].parse().unwrap();
        assert!(err <= 1e-12, "{row:?}");
    }
}

#[test]
fn output_is_byte_identical_without_timing() {
    let dir = scratch("bytes");
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"experiment":"det","rhs":"gaussian-bump","rho":0.2,"solvers":["zernike-annular","chebyshev-fourier"],"n":[10,20],"timing":false}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "1", "3"] {
        let o = dir.join(format!("out{}", outputs.len()));
        let out = Command::new(bin())
            .args(["convergence", "--threads", threads, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&o)
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(std::fs::read(o.join("det_convergence.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn structure_sizes() {
    let dir = scratch("structure");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment":"s","rhs":"zero","rho":0.5,"solvers":["zernike-annular","chebyshev-fourier"],"n":[20]}"#)
        .unwrap();
    assert!(run(&["structure"], &cfg, &dir).status.success());
    let mut reader = csv::Reader::from_path(dir.join("s_structure.csv")).unwrap();
    for row in reader.records() {
        let row = row.unwrap();
        let m: usize = row[2].parse().unwrap();
        let size: usize = row[3].parse().unwrap();
        match &row[1] {
            "zernike-annular" => assert_eq!(size, (21 - m).div_ceil(2)),
            "chebyshev-fourier" => assert_eq!(size, 22),
            other => panic!("{other}"),
        }
    }
}

#[test]
fn missing_config_fails() {
    let out = Command::new(bin()).arg("solve").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
