use bass_core::gates::{cnot, hadamard};
use bass_core::propagation::TruncationRule;
use bass_core::reference::pr_z_exact;
use bass_core::stats::geometric_mean;
use bass_core::{
    dense_simulate, fidelity, generate_circuit, run, Circuit, Family, FamilyParams, Gate, Mode, SimConfig,
};

#[test]
fn full_budget_is_exact_for_every_family() {
    for family in Family::ALL {
        let n = 6;
        let circuit = generate_circuit(family, n, &FamilyParams::default(), 11).unwrap();
        let reference = dense_simulate(&circuit).unwrap();
        for mode in [Mode::Fixed, Mode::Adaptive] {
            for two_qubit_pass in [false, true] {
                let config = SimConfig {
                    two_qubit_pass,
                    ..SimConfig::new(1 << n, mode)
                };
                let out = run(&circuit, &config).unwrap();
                let f = fidelity(&out.state, &out.frame, &reference).unwrap();
                assert!((f - 1.0).abs() < 1e-10, "{family} {mode:?}: F = {f}");
                assert_eq!(out.record.gamma2_tot, 1.0);
                assert!(out.record.truncation_events.is_empty());
            }
        }
    }
}

#[test]
fn bell_circuit_both_modes() {
    let circuit = Circuit::new(4, vec![Gate::one(0, hadamard()), Gate::two(0, 1, cnot()), Gate::two(2, 3, cnot())]);
    let reference = dense_simulate(&circuit).unwrap();
    for mode in [Mode::Fixed, Mode::Adaptive] {
        let out = run(&circuit, &SimConfig::new(16, mode)).unwrap();
        assert!((fidelity(&out.state, &out.frame, &reference).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn truncated_runs_keep_their_bookkeeping() {
    for family in [Family::Brickwork1D, Family::HaarPairs, Family::RFIM, Family::QAOA] {
        let n = 10;
        let circuit = generate_circuit(family, n, &FamilyParams::default(), 5).unwrap();
        let reference = dense_simulate(&circuit).unwrap();
        for rule in [TruncationRule::TopK, TruncationRule::Schmidt1, TruncationRule::Schmidt3, TruncationRule::Random] {
            for mode in [Mode::Fixed, Mode::Adaptive] {
                let k = 24;
                let config = SimConfig {
                    truncation: rule,
                    two_qubit_pass: mode == Mode::Adaptive,
                    ..SimConfig::new(k, mode)
                };
                let out = run(&circuit, &config).unwrap();
                let r = &out.record;
                assert!(out.state.support() <= k);
                assert!((out.state.norm_sqr() - 1.0).abs() < 1e-12);
                assert!((r.gamma2_product() - r.gamma2_tot).abs() <= 1e-12 * r.gamma2_tot.max(1e-300));
                assert!(r.truncation_events.iter().all(|e| e.step_gamma2 > 0.0 && e.step_gamma2 <= 1.0 + 1e-15));
                assert_eq!(r.pr_increases, 0);
                assert_eq!(r.rotations_attempted, r.rotations_accepted + r.rotations_reverted);
                assert_eq!(r.two_qubit_attempted, r.two_qubit_accepted + r.two_qubit_reverted);
                assert!(r.final_pr >= 1.0 - 1e-12 && r.final_pr <= k as f64 + 1e-9);
                let f = fidelity(&out.state, &out.frame, &reference).unwrap();
                assert!((0.0..=1.0 + 1e-12).contains(&f));
                if mode == Mode::Fixed {
                    assert!(out.frame.is_identity());
                }
            }
        }
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let circuit = generate_circuit(Family::Brickwork1D, 10, &FamilyParams::default(), 3).unwrap();
    for mode in [Mode::Fixed, Mode::Adaptive] {
        let config = SimConfig {
            truncation: TruncationRule::Random,
            seed: 17,
            ..SimConfig::new(40, mode)
        };
        let a = run(&circuit, &config).unwrap();
        let b = run(&circuit, &config).unwrap();
        assert_eq!(a.state, b.state);
        assert_eq!(a.frame, b.frame);
        assert_eq!(a.record.truncation_events, b.record.truncation_events);
        assert_eq!(a.record.pr_trace, b.record.pr_trace);
    }
}

#[test]
fn hard_cap_bounds_transient_support() {
    // A Hadamard wall doubles the support per gate; K_hard = 8k = 16 must bind.
    let n = 8;
    let gates = (0..n).map(|q| Gate::one(q, hadamard())).collect();
    let circuit = Circuit::new(n, gates);
    let config = SimConfig {
        n_trunc: 1000,
        ..SimConfig::new(2, Mode::Fixed)
    };
    let out = run(&circuit, &config).unwrap();
    assert!(out.state.support() <= 2);
    // Cap fired at 32 > 16 and was followed by an immediate truncation to k.
    assert!(out.record.truncation_events.iter().any(|e| e.kept == 16));
    assert!(out.record.truncation_events.iter().all(|e| e.kept + e.discarded <= 32));
}

#[test]
fn adaptive_frame_helps_on_shallow_brickwork() {
    // Paired comparison over 20 instances in the regime k < PR_Z.
    let (n, k) = (10, 32);
    let params = FamilyParams::with_depth(4);
    let (mut fixed, mut adaptive, mut pr_z) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..20 {
        let circuit = generate_circuit(Family::Brickwork1D, n, &params, seed).unwrap();
        let reference = dense_simulate(&circuit).unwrap();
        pr_z.push(pr_z_exact(&reference).unwrap());
        for (mode, sink) in [(Mode::Fixed, &mut fixed), (Mode::Adaptive, &mut adaptive)] {
            let out = run(&circuit, &SimConfig::new(k, mode)).unwrap();
            sink.push(fidelity(&out.state, &out.frame, &reference).unwrap().max(1e-16));
        }
    }
    assert!(geometric_mean(&pr_z).unwrap() > k as f64);
    let gm_fixed = geometric_mean(&fixed).unwrap();
    let gm_adaptive = geometric_mean(&adaptive).unwrap();
    assert!(gm_adaptive > gm_fixed, "adaptive {gm_adaptive} vs fixed {gm_fixed}");
}

#[test]
fn circuit_documents_round_trip() {
    for family in Family::ALL {
        let c = generate_circuit(family, 6, &FamilyParams::default(), 99).unwrap();
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), c.to_json());
    }
    assert!(Circuit::from_json("{}").is_err());
    let bad = r#"{"family":"Brickwork1D","n_qubits":2,"seed":0,"params":{},"gates":[{"targets":[0,0],"matrix":[]}]}"#;
    assert!(Circuit::from_json(bad).is_err());
}
