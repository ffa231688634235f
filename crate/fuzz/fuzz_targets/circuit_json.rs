#![no_main]

use bass_core::{run, Circuit, Mode, SimConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(circuit) = Circuit::from_json(text) else {
        return;
    };
    let again = Circuit::from_json(&circuit.to_json()).expect("a parsed circuit re-parses");
    assert_eq!(again, circuit);
    if circuit.n_qubits <= 8 && circuit.gates.len() <= 32 {
        for mode in [Mode::Fixed, Mode::Adaptive] {
            let out = run(&circuit, &SimConfig::new(4, mode)).expect("validated circuits simulate");
            assert!(out.state.support() <= 4);
            assert!((out.state.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }
});
