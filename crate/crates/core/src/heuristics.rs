//! Alternative truncation rules: Schmidt-sector weighting and uniform random selection.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::state::{SparseState, TruncationEvent};

/// Bits of `x` above cut `c`, i.e. `floor(x / 2^c)`.
pub fn schmidt_sector(x: u64, c: usize) -> u64 {
    if c >= 64 {
        0
    } else {
        x >> c
    }
}

/// Number of support keys in each sector at cut `c`.
pub fn sector_counts(entries: &[(u64, C64)], c: usize) -> HashMap<u64, usize> {
    let mut counts = HashMap::new();
    for &(x, _) in entries {
        *counts.entry(schmidt_sector(x, c)).or_insert(0) += 1;
    }
    counts
}

/// Cuts `(floor(N/4), floor(N/2), floor(3N/4))` and whether they are exact quarters.
pub fn schmidt3_cuts(n_qubits: usize) -> ([usize; 3], bool) {
    ([n_qubits / 4, n_qubits / 2, 3 * n_qubits / 4], n_qubits % 4 == 0)
}

/// Keeps the `k` best `|α|² / C_{N/2}(x)`, where `C` counts support keys sharing the sector.
pub fn truncate_schmidt1(state: &mut SparseState, k: usize) -> Result<TruncationEvent> {
    check(state, k)?;
    let cut = state.n_qubits() / 2;
    let counts = sector_counts(state.entries(), cut);
    state.truncate_by_score(k, |x, a| a.norm_sqr() / counts[&schmidt_sector(x, cut)] as f64)
}

/// Keeps the `k` best `|α|²` divided by the geometric mean of the sector counts at three cuts.
pub fn truncate_schmidt3(state: &mut SparseState, k: usize) -> Result<TruncationEvent> {
    check(state, k)?;
    let (cuts, _) = schmidt3_cuts(state.n_qubits());
    let counts = cuts.map(|c| sector_counts(state.entries(), c));
    state.truncate_by_score(k, |x, a| {
        let product: f64 = cuts
            .iter()
            .zip(&counts)
            .map(|(&c, m)| m[&schmidt_sector(x, c)] as f64)
            .product();
        a.norm_sqr() / product.cbrt()
    })
}

/// Keeps `k` support keys chosen uniformly without replacement.
pub fn truncate_random<R: Rng + ?Sized>(state: &mut SparseState, k: usize, rng: &mut R) -> Result<TruncationEvent> {
    check(state, k)?;
    let n = state.support();
    let positions = if n <= k {
        (0..n).collect()
    } else {
        sample(rng, n, k).into_vec()
    };
    state.retain_positions(positions)
}

fn check(state: &SparseState, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidBudget(k));
    }
    if state.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real_state(n: usize, probs: &[(u64, f64)]) -> SparseState {
        SparseState::from_entries(n, probs.iter().map(|&(x, p)| (x, C64::new(p.sqrt(), 0.0))).collect())
            .unwrap()
    }

    #[test]
    fn sector_examples() {
        assert_eq!(schmidt_sector(0, 3), 0);
        assert_eq!(schmidt_sector(0b1010, 2), 0b10);
        assert_eq!(schmidt_sector(0b1010, 0), 0b1010);
        assert_eq!(schmidt3_cuts(12), ([3, 6, 9], true));
        assert_eq!(schmidt3_cuts(10), ([2, 5, 7], false));
    }

    #[test]
    fn schmidt1_penalises_crowded_sectors() {
        // N = 4, cut 2: A = 0b0100 and B = 0b0110 share sector 0b01; C = 0b1000 is alone.
        let probs = [(0b0100, 0.4), (0b0110, 0.35), (0b1000, 0.25)];
        let mut s = real_state(4, &probs);
        let ev = truncate_schmidt1(&mut s, 2).unwrap();
        let keys: Vec<u64> = s.sorted_entries().iter().map(|e| e.0).collect();
        assert_eq!(keys, vec![0b0100, 0b1000]);
        assert!((ev.step_gamma2 - 0.65).abs() < 1e-12);
        let mut t = real_state(4, &probs);
        assert!((t.truncate_topk(2).unwrap().step_gamma2 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn distinct_sectors_reduce_to_topk() {
        let probs = [(0b0000, 0.1), (0b0100, 0.5), (0b1000, 0.15), (0b1100, 0.25)];
        for rule in [truncate_schmidt1, truncate_schmidt3] {
            let mut a = real_state(4, &probs);
            let mut b = a.clone();
            rule(&mut a, 2).unwrap();
            b.truncate_topk(2).unwrap();
            assert_eq!(a.sorted_entries(), b.sorted_entries());
        }
    }

    #[test]
    fn random_rule_is_seeded_and_identity_at_full_budget() {
        let probs: Vec<(u64, f64)> = (0..16).map(|x| (x, 1.0 / 16.0)).collect();
        let mut a = real_state(4, &probs);
        let mut b = a.clone();
        truncate_random(&mut a, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        truncate_random(&mut b, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.support(), 5);
        let mut c = real_state(4, &probs);
        let before = c.sorted_entries();
        let ev = truncate_random(&mut c, 16, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(ev.step_gamma2, 1.0);
        assert_eq!(c.sorted_entries(), before);
    }

    proptest! {
        #[test]
        fn heuristics_never_beat_topk(
            raw in prop::collection::vec((0u64..256, 0.001f64..1.0), 1..60),
            k in 1usize..20,
        ) {
            let s = SparseState::from_entries(8, raw.into_iter().map(|(x, a)| (x, C64::new(a, 0.0))).collect()).unwrap();
            let mut top = s.clone();
            let best = top.truncate_topk(k).unwrap().step_gamma2;
            let mut one = s.clone();
            let mut three = s.clone();
            let mut rnd = s.clone();
            prop_assert!(truncate_schmidt1(&mut one, k).unwrap().step_gamma2 <= best + 1e-15);
            prop_assert!(truncate_schmidt3(&mut three, k).unwrap().step_gamma2 <= best + 1e-15);
            let r = truncate_random(&mut rnd, k, &mut ChaCha8Rng::seed_from_u64(k as u64)).unwrap();
            prop_assert!(r.step_gamma2 <= best + 1e-15);
        }
    }
}
