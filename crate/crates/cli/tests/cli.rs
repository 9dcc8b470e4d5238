use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anchorsched::graph::is_critical;
use anchorsched::instances::read_instance;
use tempfile::TempDir;

const EXAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/example.json");
const BASELINE_SCHEDULE: &str = "[0.0, 0.0, 1.0, 1.0, 3.0, 2.5, 4.5]";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_anchorsched"));
    cmd.env_remove("ANCHORSCHED_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map(|it| it.map(|e| e.unwrap().path()).collect())
        .unwrap_or_default();
    files.sort();
    files
}

fn generate(dir: &Path, label: &str, n: &str, count: &str, seed: &str) -> Output {
    run(&[
        "generate",
        "--label",
        label,
        "-n",
        n,
        "--count",
        count,
        "--seed",
        seed,
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn generates_critical_series_parallel_instances() {
    let dir = TempDir::new().unwrap();
    let out = generate(dir.path(), "SP_pQCri_dUnif_G1", "12", "10", "5");
    assert_eq!(code(&out), 0, "{out:?}");
    let files = json_files(dir.path());
    assert_eq!(files.len(), 10);
    assert!(files[0].ends_with("SP_pQCri_dUnif_G1_n12_000.json"));
    for f in &files {
        let (inst, meta) = read_instance(f).unwrap();
        assert_eq!(inst.n(), 12);
        assert_eq!(meta.label, "SP_pQCri_dUnif_G1");
        assert!(is_critical(&inst.graph), "{}", f.display());
    }
}

#[test]
fn zero_count_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("none");
    let out = generate(&target, "ER_pRand_dRand_G2", "8", "0", "1");
    assert_eq!(code(&out), 0);
    assert!(json_files(&target).is_empty());
}

#[test]
fn generation_is_byte_identical_on_repeat() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        assert_eq!(code(&generate(dir.path(), "ER_pZero_dRand_Mixed", "15", "3", "42")), 0);
    }
    let fa = json_files(a.path());
    let fb = json_files(b.path());
    assert_eq!(fa.len(), 3);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn seed_comes_from_environment() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = |dir: &Path| {
        vec![
            "generate".to_string(),
            "--label".into(),
            "SP_pRand_dRand_G1".into(),
            "-n".into(),
            "6".into(),
            "--count".into(),
            "1".into(),
            "--out".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    let out = bin().args(args(a.path())).env("ANCHORSCHED_SEED", "77").output().unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(code(&generate(b.path(), "SP_pRand_dRand_G1", "6", "1", "77")), 0);
    let (_, meta) = read_instance(&json_files(a.path())[0]).unwrap();
    assert_eq!(meta.seed, 77);
    assert_eq!(
        fs::read(&json_files(a.path())[0]).unwrap(),
        fs::read(&json_files(b.path())[0]).unwrap()
    );
}

#[test]
fn bad_label_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let out = generate(dir.path(), "SP_pQCri_dUnif_G9", "5", "1", "0");
    assert_eq!(code(&out), 4);
    assert_eq!(code(&run(&["solve", EXAMPLE, "--method", "simplex"])), 4);
    assert_eq!(code(&run(&["frobnicate"])), 4);
}

#[test]
fn solves_example_with_every_method() {
    for method in ["auto", "dom", "std", "lay", "brute"] {
        let out = run(&["solve", EXAMPLE, "--method", method]);
        assert_eq!(code(&out), 0, "{method}: {out:?}");
        let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(record["objective"], 4.0, "{method}");
        assert_eq!(record["status"], "optimal", "{method}");
    }
    let out = run(&["solve", EXAMPLE]);
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record["route"], "box");
}

#[test]
fn solve_exports_lp_and_solution() {
    let dir = TempDir::new().unwrap();
    let lp = dir.path().join("model.lp");
    let sol = dir.path().join("sol.json");
    let out = run(&[
        "solve",
        EXAMPLE,
        "--method",
        "dom",
        "--chvatal",
        "--export-lp",
        lp.to_str().unwrap(),
        "-o",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Maximize") || text.contains("maximize"));
    assert!(text.contains("chv_"));
    let verify = run(&["verify", EXAMPLE, sol.to_str().unwrap()]);
    assert_eq!(code(&verify), 0, "{}", stdout(&verify));
}

#[test]
fn lay_rejects_partition_sets() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&generate(dir.path(), "SP_pRand_dRand_Partition", "6", "1", "3")), 0);
    let inst = &json_files(dir.path())[0];
    let out = run(&["solve", inst.to_str().unwrap(), "--method", "lay"]);
    assert_eq!(code(&out), 3, "{out:?}");
}

#[test]
fn tight_deadline_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("tight.json");
    let text = fs::read_to_string(EXAMPLE).unwrap().replace("\"deadline\": 4.5", "\"deadline\": 3.0");
    fs::write(&inst, text).unwrap();
    let out = run(&["solve", inst.to_str().unwrap(), "--method", "dom"]);
    assert_eq!(code(&out), 2, "{out:?}");
}

fn verify_with(anchored: &str) -> Output {
    let dir = TempDir::new().unwrap();
    let sol = dir.path().join("sol.json");
    fs::write(&sol, format!("{{\"schedule\": {BASELINE_SCHEDULE}, \"anchored\": {anchored}}}")).unwrap();
    run(&["verify", EXAMPLE, sol.to_str().unwrap()])
}

#[test]
fn verify_accepts_and_rejects_baseline_pairs() {
    let ok = verify_with("[1, 2, 4]");
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).ends_with("PASS\n"));
    let bad = verify_with("[1, 2, 4, 5]");
    assert_eq!(code(&bad), 2, "{}", stdout(&bad));
    assert!(stdout(&bad).contains("FAIL"));
    assert_eq!(code(&verify_with("[]")), 0);
}

#[test]
fn malformed_solution_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let sol = dir.path().join("sol.json");
    fs::write(&sol, "{\"schedule\": [0.0], \"anchored\": [], \"extra\": 1}").unwrap();
    assert_eq!(code(&run(&["verify", EXAMPLE, sol.to_str().unwrap()])), 4);
}

#[test]
fn bench_on_empty_directory_prints_header_only() {
    let dir = TempDir::new().unwrap();
    let out = run(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with("label,"));
}

#[test]
fn bench_summarizes_generated_instances() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&generate(dir.path(), "SP_pQCri_dRand_G1", "8", "3", "9")), 0);
    let csv_path = dir.path().join("summary.csv");
    let out = run(&[
        "bench",
        dir.path().to_str().unwrap(),
        "--methods",
        "dom,auto",
        "--time-limit",
        "30",
        "--jobs",
        "2",
        "--cuts",
        "-o",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with("root_gap_after_cuts"), "{header}");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert!(rows.iter().all(|r| r.starts_with("SP_pQCri_dRand_G1,")));
}
