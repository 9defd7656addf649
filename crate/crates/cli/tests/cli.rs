use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use biharmonic::output::{read_sensor_csv, Snapshot};

fn biharmonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharmonic")).args(args).output().expect("binary runs")
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

const SMALL: &str = r#"
[domain]
x = [-1.0, 1.0]
y = [-1.0, 1.0]

[mesh]
nx = 8
ny = 8

[time]
final_time = 0.03
steps = 6

[scheme]
kind = "gc3"

[coefficient]
kind = "jump"
threshold = 0.2
below = 1.0
above = 9.0

[initial]
kind = "gaussian-bump"

[sensor]
center = [0.5, 0.0]
half_width = 0.1
samples_per_step = 3

[output]
snapshots = [0.0, 0.0125, 0.03]
"#;

#[test]
fn info_prints_paper_dof_counts() {
    let config = configs().join("unit_square_16.toml");
    let out = biharmonic(&["info", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cells: 256"), "{text}");
    assert!(text.contains("cgp1: 2312 dof"), "{text}");
    assert!(text.contains("cgp2: 4624 dof"), "{text}");
    assert!(text.contains("gc3: 4624 dof"), "{text}");
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(biharmonic(&[]).status.code(), Some(2));
    assert_eq!(biharmonic(&["converge", "--scheme", "rk4"]).status.code(), Some(2));
    assert_eq!(biharmonic(&["run", "--config", "/nonexistent.toml", "--out", "/tmp/x"]).status.code(), Some(2));
    assert_eq!(biharmonic(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, SMALL.replace("nx = 8", "nx = \"eight\"")).unwrap();
    let out_dir = dir.path().join("out");
    let out = biharmonic(&["run", "--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nx"), "{err}");
    assert!(!out_dir.exists());
}

#[test]
fn runs_are_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    fs::write(&config, SMALL).unwrap();
    let mut sensors = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = biharmonic(&["run", "--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        sensors.push(fs::read(out_dir.join("sensor.csv")).unwrap());
    }
    assert_eq!(sensors[0], sensors[1]);
    let a = dir.path().join("a");
    for k in 0..3 {
        assert_eq!(fs::read(a.join(format!("snapshot_{k}.txt"))).unwrap(), fs::read(dir.path().join(format!("b/snapshot_{k}.txt"))).unwrap());
    }

    let samples = read_sensor_csv(&sensors[0][..]).unwrap();
    // t = 0 plus three samples on each of six intervals
    assert_eq!(samples.len(), 19);
    assert_eq!(samples.last().unwrap().0, 0.03);
    assert!(samples.windows(2).all(|w| w[1].0 > w[0].0));
    assert!(samples.iter().any(|s| s.1 != 0.0));

    let snap = Snapshot::read(fs::read(a.join("snapshot_1.txt")).unwrap().as_slice()).unwrap();
    assert_eq!((snap.nx, snap.ny, snap.time), (8, 8, 0.0125));
    // clamped edges
    assert!((0..=8).all(|i| snap.value(i, 0) == 0.0 && snap.value(i, 8) == 0.0 && snap.value(0, i) == 0.0));
    let first = Snapshot::read(fs::read(a.join("snapshot_0.txt")).unwrap().as_slice()).unwrap();
    // u₀ = 0.2 at the center node
    assert!((first.value(4, 4) - 0.2).abs() < 1e-15);

    // four spatial blocks of 81 nodes × 4
    let report = fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(report.contains("scheme = gc3\ndof = 1296\ndof_free = 784\n"), "{report}");
}

#[test]
fn zero_data_gives_zero_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("zero.toml");
    let text = SMALL.replace("kind = \"gaussian-bump\"", "kind = \"zero\"");
    fs::write(&config, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = biharmonic(&["run", "--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let samples = read_sensor_csv(fs::read(out_dir.join("sensor.csv")).unwrap().as_slice()).unwrap();
    assert!(samples.iter().all(|s| s.1 == 0.0));
    for k in 0..3 {
        let snap = Snapshot::read(fs::read(out_dir.join(format!("snapshot_{k}.txt"))).unwrap().as_slice()).unwrap();
        assert!(snap.values.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn converge_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = biharmonic(&["converge", "--scheme", "cgp1", "--levels", "2", "--case", "fct2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("scheme cgp1\n"), "{table}");
    let csv = fs::read_to_string(dir.path().join("eoc_cgp1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,tau,h,err_linf_tau,eoc,err_linf,eoc,err_l2l2,eoc");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,0.1,"));
    assert!(lines[2].starts_with("1,0.05,"));
}
