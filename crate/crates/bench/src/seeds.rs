//! Deterministic seed derivation.

use bass_core::Family;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds every word through splitmix64 so that permuted inputs give unrelated seeds.
pub fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0u64, |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Seed of the circuit instance; independent of `k` so every budget sees the same circuit.
pub fn circuit_seed(base_seed: u64, n_qubits: usize, family: Family, trial: u64) -> u64 {
    mix(&[base_seed, n_qubits as u64, fnv1a(family.name().as_bytes()), trial])
}

/// Seed of one (point, trial) run, used by randomized truncation rules.
pub fn trial_seed(base_seed: u64, n_qubits: usize, k: usize, family: Family, trial: u64) -> u64 {
    mix(&[base_seed, n_qubits as u64, k as u64, fnv1a(family.name().as_bytes()), trial])
}
