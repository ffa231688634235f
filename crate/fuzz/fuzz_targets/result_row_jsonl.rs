#![no_main]

use bass_bench::rows::to_jsonl;
use bass_bench::{parse_jsonl, summarize, ExperimentConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(rows) = parse_jsonl(text) else {
        return;
    };
    let again = parse_jsonl(&to_jsonl(&rows)).expect("encoded rows re-parse");
    assert_eq!(again, rows);
    if let Some(first) = rows.first() {
        let config = format!(
            r#"{{"experiment_id":"fuzz","family":"Brickwork1D","n_qubits":[{}],"k":[{}],"trials":1}}"#,
            first.n_qubits.clamp(2, 30),
            first.k.max(1)
        );
        if let Ok(config) = ExperimentConfig::from_json(&config) {
            let _ = summarize(&config, &rows);
        }
    }
});
