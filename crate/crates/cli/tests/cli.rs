use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rotlab_core::linalg::{identity, op_norm};
use rotlab_core::matrix_io::{matrix_to_json, read_matrix};
use serde_json::Value;

fn rotlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotlab"))
        .args(args)
        .arg("-o")
        .arg(out)
        .env("ROTLAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn rep_pair_with_multiplicity() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotlab(dir.path(), &["rep", "--pair", "1/3", "--mult", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v1 = read_matrix(&dir.path().join("v1.json")).unwrap();
    let v2 = read_matrix(&dir.path().join("v2.json")).unwrap();
    assert_eq!(v1.shape(), (6, 6));
    assert_eq!(v2.shape(), (6, 6));
    let manifest = json(dir.path().join("manifest.json"));
    assert_eq!(manifest["report"]["dim"], 6);
    assert!(manifest["report"]["defect"].as_f64().unwrap() <= 1e-14);
    assert!(manifest["meta"]["timestamp"].is_string());
}

#[test]
fn rep_torus3_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotlab(dir.path(), &["rep", "--torus3", "1/2,1/3,1/5"]);
    assert_eq!(code(&o), 0);
    for j in 1..=3 {
        assert_eq!(
            read_matrix(&dir.path().join(format!("v{j}.json")))
                .unwrap()
                .shape(),
            (30, 30)
        );
    }
}

#[test]
fn rep_zero_phase_is_identity_pair() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rotlab(dir.path(), &["rep", "--pair", "0/1"])), 0);
    for j in 1..=2 {
        let v = read_matrix(&dir.path().join(format!("v{j}.json"))).unwrap();
        assert_eq!(op_norm(&(v - identity(1))), 0.0);
    }
}

#[test]
fn matrix_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rotlab(
            dir.path(),
            &["rep", "--pair", "3/7", "--mult", "2"]
        )),
        0
    );
    let path = dir.path().join("v2.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let m = read_matrix(&path).unwrap();
    assert_eq!(matrix_to_json(&m).trim(), text.trim());
}

#[test]
fn obstruct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    assert_eq!(code(&rotlab(d, &["rep", "--torus3", "1/2,1/3,1/5"])), 0);
    let (v1, v2, v3) = (d.join("v1.json"), d.join("v2.json"), d.join("v3.json"));
    let o = rotlab(
        d,
        &[
            "obstruct",
            "--theta",
            "1/2,1/3,1/5",
            "--matrices",
            path_str(&v1),
            path_str(&v2),
            path_str(&v3),
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let pair = d.join("pair8");
    std::fs::create_dir(&pair).unwrap();
    assert_eq!(code(&rotlab(&pair, &["rep", "--pair", "1/8"])), 0);
    let (u1, u2) = (pair.join("v1.json"), pair.join("v2.json"));
    let o = rotlab(
        &pair,
        &[
            "obstruct",
            "--theta",
            "0",
            "--matrices",
            path_str(&u1),
            path_str(&u2),
        ],
    );
    assert_eq!(code(&o), 2);
    let report = json(pair.join("report.json"));
    let r = report["report"]["per_pair"][0]["trace_condition_residual"]
        .as_f64()
        .unwrap();
    assert!((r - 0.125).abs() <= 1e-10, "{r}");
    let csv = std::fs::read_to_string(pair.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);

    // Commutator −I puts every eigenvalue on the cut of the Θ = 0 branch.
    let half = d.join("pair2");
    std::fs::create_dir(&half).unwrap();
    assert_eq!(code(&rotlab(&half, &["rep", "--pair", "1/2"])), 0);
    let (w1, w2) = (half.join("v1.json"), half.join("v2.json"));
    let o = rotlab(
        &half,
        &[
            "obstruct",
            "--theta",
            "0",
            "--matrices",
            path_str(&w1),
            path_str(&w2),
        ],
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn obstruct_report_is_deterministic_apart_from_meta() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&rotlab(d, &["rep", "--pair", "2/5", "--mult", "2"])),
        0
    );
    let (v1, v2) = (d.join("v1.json"), d.join("v2.json"));
    let args = [
        "obstruct",
        "--theta",
        "2/5",
        "--format",
        "json",
        "--matrices",
        path_str(&v1),
        path_str(&v2),
    ];
    let first = d.join("a");
    let second = d.join("b");
    std::fs::create_dir(&first).unwrap();
    std::fs::create_dir(&second).unwrap();
    assert_eq!(code(&rotlab(&first, &args)), 0);
    assert_eq!(code(&rotlab(&second, &args)), 0);
    let a = json(first.join("report.json"));
    let b = json(second.join("report.json"));
    assert_eq!(
        serde_json::to_string(&a["report"]).unwrap(),
        serde_json::to_string(&b["report"]).unwrap()
    );
    assert!(!first.join("report.csv").exists());
}

#[test]
fn exel_suite_small_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotlab(
        dir.path(),
        &["exel-suite", "--cases", "20", "--q-max", "6", "--seed", "5"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let summary = json(dir.path().join("exel_suite.json"));
    assert_eq!(summary["report"]["validated"], 20);
    assert!(dir.path().join("exel_cases.csv").exists());
}

#[test]
fn repair_planted_instance_converges() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotlab(
        dir.path(),
        &[
            "repair",
            "--theta",
            "1/3",
            "--plant-noise",
            "1e-3",
            "--mult",
            "2",
            "--seed",
            "11",
        ],
    );
    assert_eq!(code(&o), 0);
    let res = json(dir.path().join("repair.json"));
    assert_eq!(res["report"]["converged"], true);
    assert!(res["report"]["final_defect"].as_f64().unwrap() <= 1e-10);
    assert_eq!(
        read_matrix(&dir.path().join("repaired1.json"))
            .unwrap()
            .shape(),
        (6, 6)
    );
    let trace = std::fs::read_to_string(dir.path().join("objective_trace.csv")).unwrap();
    assert!(trace.lines().count() >= 2);
}

#[test]
fn repair_obstructed_pair_stays_far_or_fails() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&rotlab(d, &["rep", "--pair", "1/8"])), 0);
    let (v1, v2) = (d.join("v1.json"), d.join("v2.json"));
    let o = rotlab(
        d,
        &[
            "repair",
            "--theta",
            "0",
            "--mu",
            "1",
            "--matrices",
            path_str(&v1),
            path_str(&v2),
        ],
    );
    assert_eq!(code(&o), 0, "diverging is reported, not an exit failure");
    let res = &json(d.join("repair.json"))["report"];
    assert!(res["converged"] == false || res["distance_moved"].as_f64().unwrap() >= 0.1);
}

#[test]
fn repair_exact_input_takes_no_steps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&rotlab(d, &["rep", "--pair", "1/4", "--mult", "3"])),
        0
    );
    let (v1, v2) = (d.join("v1.json"), d.join("v2.json"));
    let o = rotlab(
        d,
        &[
            "repair",
            "--theta",
            "1/4",
            "--matrices",
            path_str(&v1),
            path_str(&v2),
        ],
    );
    assert_eq!(code(&o), 0);
    let res = &json(d.join("repair.json"))["report"];
    assert_eq!(res["iterations"], 0);
    assert_eq!(res["converged"], true);
}

#[test]
fn counterexample_sweep_index_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotlab(
        dir.path(),
        &["counterexample", "--n-min", "2", "--n-max", "12"],
    );
    assert_eq!(code(&o), 0);
    let rows = json(dir.path().join("counterexample.json"));
    let rows = rows["report"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r["bott_index"] == 1));
    let csv = std::fs::read_to_string(dir.path().join("counterexample.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn calibrate_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotlab(
        dir.path(),
        &["calibrate", "--theta", "1/3", "--noise", "0.5,0.1,0.01"],
    );
    assert_eq!(code(&o), 0);
    let table = json(dir.path().join("calibration.json"));
    assert_eq!(table["report"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&rotlab(d, &["rep", "--pair", "1/0"])),
        2,
        "clap rejects the value"
    );
    let missing = d.join("nope.json");
    assert_eq!(
        code(&rotlab(
            d,
            &[
                "obstruct",
                "--theta",
                "1/2",
                "--matrices",
                path_str(&missing)
            ]
        )),
        1
    );
    std::fs::write(d.join("bad.json"), "{ not json").unwrap();
    let bad = d.join("bad.json");
    assert_eq!(
        code(&rotlab(
            d,
            &[
                "repair",
                "--theta",
                "0",
                "--matrices",
                path_str(&bad),
                path_str(&bad)
            ]
        )),
        1
    );
    assert_eq!(code(&rotlab(d, &["rep", "--torus3", "1/2,1/3"])), 1);
}
