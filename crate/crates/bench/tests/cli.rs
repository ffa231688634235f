use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use bass_bench::rows::ResultRow;
use bass_bench::{parse_jsonl, summarize, ExperimentConfig, Summary};
use bass_core::gates::{cnot, hadamard, Gate};
use bass_core::Circuit;

const CONFIG: &str = r#"{
  "experiment_id": "cli_small",
  "family": "Brickwork1D",
  "family_params": { "depth": 4 },
  "n_qubits": [8, 10],
  "k": [16, 32],
  "trials": 3,
  "seeds": { "base_seed": 21 },
  "stats": { "bootstrap_resamples": 200 }
}"#;

fn bass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bass"))
        .args(args)
        .env_remove("BASS_THREADS")
        .output()
        .expect("bass binary runs")
}

fn run_config(dir: &Path, threads: &str) -> (Vec<ResultRow>, Summary) {
    let config = dir.join("config.json");
    std::fs::write(&config, CONFIG).unwrap();
    let out = dir.join("out");
    let status = bass(&["run", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    for name in ["cli_small_rows.csv", "cli_small_summary.csv"] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let rows = parse_jsonl(&std::fs::read_to_string(out.join("cli_small.jsonl")).unwrap()).unwrap();
    let summary = serde_json::from_str(&std::fs::read_to_string(out.join("cli_small_summary.json")).unwrap()).unwrap();
    (rows, summary)
}

#[test]
fn run_is_reproducible_and_summary_recomputes_from_rows() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (rows_a, summary_a) = run_config(a.path(), "1");
    let (rows_b, _) = run_config(b.path(), "4");

    assert_eq!(rows_a.len(), 2 * 2 * 3 * 2);
    assert!(rows_a.iter().all(ResultRow::succeeded));
    let strip = |rows: &[ResultRow]| rows.iter().map(ResultRow::without_timings).collect::<Vec<_>>();
    assert_eq!(strip(&rows_a), strip(&rows_b));

    let config = ExperimentConfig::from_json(CONFIG).unwrap();
    assert_eq!(summarize(&config, &rows_a), summary_a);
}

#[test]
fn paired_arms_share_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, _) = run_config(dir.path(), "2");
    let mut hashes: HashMap<(usize, u64), &str> = HashMap::new();
    for row in &rows {
        let hash = hashes.entry((row.n_qubits, row.trial)).or_insert(&row.circuit_hash);
        assert_eq!(*hash, row.circuit_hash, "N={} trial={}", row.n_qubits, row.trial);
    }
    assert_eq!(hashes.len(), 2 * 3);
}

#[test]
fn simulate_saved_bell_circuit_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.json");
    let circuit = Circuit::new(4, vec![Gate::one(0, hadamard()), Gate::two(0, 1, cnot()), Gate::two(2, 3, cnot())]);
    std::fs::write(&path, circuit.to_json()).unwrap();
    for mode in ["fixed", "adaptive"] {
        let out = bass(&["simulate", "--circuit", path.to_str().unwrap(), "--k", "16", "--mode", mode]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let row: ResultRow = serde_json::from_slice(&out.stdout).unwrap();
        assert!((row.fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(row.gamma2_tot, 1.0);
    }
}

#[test]
fn saved_circuit_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let first = bass(&["simulate", "--n", "8", "--k", "12", "--seed", "3", "--save-circuit", path.to_str().unwrap()]);
    assert!(first.status.success());
    let again = bass(&["simulate", "--circuit", path.to_str().unwrap(), "--k", "12", "--seed", "3"]);
    assert!(again.status.success());
    let a: ResultRow = serde_json::from_slice(&first.stdout).unwrap();
    let b: ResultRow = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!(a.circuit_hash, b.circuit_hash);
    assert_eq!(a.fidelity, b.fidelity);
    assert!(a.fidelity.unwrap() < 1.0);
}

#[test]
fn bad_inputs_exit_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"experiment_id":"x","family":"Brickwork1D","n_qubits":[0],"k":[4],"trials":1}"#).unwrap();
    assert_eq!(bass(&["run", config.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&config, "{").unwrap();
    assert_eq!(bass(&["run", config.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(bass(&["simulate", "--circuit", config.to_str().unwrap(), "--k", "4"]).status.code(), Some(2));
    assert_eq!(bass(&["verify", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let config = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(path.file_stem().unwrap().to_str().unwrap(), config.experiment_id);
        seen += 1;
    }
    assert!(seen >= 4);
}
