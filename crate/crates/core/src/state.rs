//! Sparse amplitude container.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashtable::AmpTable;
use crate::linalg::C64;

/// Entries with `|α|²` at or below this are never stored.
pub const DROP_THRESHOLD: f64 = 1e-30;

pub const MAX_QUBITS: usize = 30;

/// Record of one truncation that discarded at least one entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationEvent {
    /// Retained probability over pre-truncation norm.
    pub step_gamma2: f64,
    pub kept: usize,
    pub discarded: usize,
}

/// Sparse state: basis index (qubit `j` is bit `j`) to amplitude.
///
/// Entry order is an implementation detail but is deterministic for a given
/// sequence of operations.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    n_qubits: usize,
    entries: Vec<(u64, C64)>,
    gamma2_tot: f64,
}

impl SparseState {
    /// The all-zeros basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, key: u64) -> Result<Self> {
        Self::from_entries(n_qubits, vec![(key, C64::new(1.0, 0.0))])
    }

    /// Builds a state from raw entries; duplicate keys are summed and dust is dropped.
    /// The result is not normalized.
    pub fn from_entries(n_qubits: usize, entries: Vec<(u64, C64)>) -> Result<Self> {
        check_qubits(n_qubits)?;
        for &(key, amp) in &entries {
            if n_qubits < 64 && key >> n_qubits != 0 {
                return Err(Error::KeyOutOfRange { key, n_qubits });
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::InvalidValue(format!("non-finite amplitude at key {key}")));
            }
        }
        let entries = AmpTable::from_entries(&entries).into_entries(DROP_THRESHOLD);
        Ok(Self {
            n_qubits,
            entries,
            gamma2_tot: 1.0,
        })
    }

    /// Replaces the amplitudes without validation; used by kernels that preserve key range.
    pub(crate) fn set_entries(&mut self, entries: Vec<(u64, C64)>) {
        self.entries = entries;
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [(u64, C64)] {
        &mut self.entries
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &[(u64, C64)] {
        &self.entries
    }

    /// Entries sorted by ascending key.
    pub fn sorted_entries(&self) -> Vec<(u64, C64)> {
        let mut out = self.entries.clone();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn gamma2_tot(&self) -> f64 {
        self.gamma2_tot
    }

    pub fn amplitude(&self, key: u64) -> C64 {
        self.entries
            .iter()
            .find(|e| e.0 == key)
            .map_or(C64::new(0.0, 0.0), |e| e.1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the squared norm before rescaling.
    pub fn normalize(&mut self) -> Result<f64> {
        let norm2 = self.norm_sqr();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::NullState);
        }
        let scale = 1.0 / norm2.sqrt();
        for e in self.entries.iter_mut() {
            e.1 *= scale;
        }
        Ok(norm2)
    }

    /// `(Σp)² / Σp²`, independent of the overall norm.
    pub fn participation_ratio(&self) -> Result<f64> {
        participation_ratio_of(&self.entries)
    }

    /// Keeps the `k` largest `|α|²`, ties broken toward smaller keys, then renormalizes.
    pub fn truncate_topk(&mut self, k: usize) -> Result<TruncationEvent> {
        self.truncate_by_score(k, |_, amp| amp.norm_sqr())
    }

    /// Keeps the `k` entries with the highest score, ties broken toward smaller keys,
    /// then renormalizes. The step retained probability is always measured in `|α|²`.
    pub fn truncate_by_score<F>(&mut self, k: usize, score: F) -> Result<TruncationEvent>
    where
        F: Fn(u64, C64) -> f64,
    {
        if k < 1 {
            return Err(Error::InvalidBudget(k));
        }
        if self.entries.is_empty() {
            return Err(Error::EmptySupport);
        }
        if self.entries.len() <= k {
            self.normalize()?;
            return Ok(TruncationEvent {
                step_gamma2: 1.0,
                kept: self.entries.len(),
                discarded: 0,
            });
        }
        let mut scored: Vec<(f64, u64, C64)> =
            self.entries.iter().map(|&(x, a)| (score(x, a), x, a)).collect();
        let order = |l: &(f64, u64, C64), r: &(f64, u64, C64)| {
            r.0.partial_cmp(&l.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| l.1.cmp(&r.1))
        };
        scored.select_nth_unstable_by(k - 1, order);
        scored.truncate(k);
        scored.sort_unstable_by_key(|s| s.1);
        let kept: Vec<(u64, C64)> = scored.into_iter().map(|(_, x, a)| (x, a)).collect();
        self.finish_truncation(kept)
    }

    /// Keeps the entries at the given positions of `entries()`, then renormalizes.
    pub fn retain_positions(&mut self, mut positions: Vec<usize>) -> Result<TruncationEvent> {
        if self.entries.is_empty() {
            return Err(Error::EmptySupport);
        }
        positions.sort_unstable();
        positions.dedup();
        if positions.len() == self.entries.len() {
            self.normalize()?;
            return Ok(TruncationEvent {
                step_gamma2: 1.0,
                kept: self.entries.len(),
                discarded: 0,
            });
        }
        let mut kept: Vec<(u64, C64)> = positions.iter().map(|&p| self.entries[p]).collect();
        kept.sort_unstable_by_key(|e| e.0);
        self.finish_truncation(kept)
    }

    fn finish_truncation(&mut self, kept: Vec<(u64, C64)>) -> Result<TruncationEvent> {
        let before = self.norm_sqr();
        let retained: f64 = kept.iter().map(|e| e.1.norm_sqr()).sum();
        let discarded = self.entries.len() - kept.len();
        if !(retained > 0.0) {
            return Err(Error::NullState);
        }
        let step_gamma2 = (retained / before).min(1.0);
        self.entries = kept;
        self.normalize()?;
        self.gamma2_tot *= step_gamma2;
        Ok(TruncationEvent {
            step_gamma2,
            kept: self.entries.len(),
            discarded,
        })
    }
}

pub(crate) fn check_qubits(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::InvalidQubitCount(n_qubits))
    }
}

pub(crate) fn participation_ratio_of(entries: &[(u64, C64)]) -> Result<f64> {
    if entries.is_empty() {
        return Err(Error::EmptySupport);
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for e in entries {
        let p = e.1.norm_sqr();
        s1 += p;
        s2 += p * p;
    }
    if !(s2 > 0.0) {
        return Err(Error::NullState);
    }
    Ok(s1 * s1 / s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real_state(n: usize, probs: &[(u64, f64)]) -> SparseState {
        SparseState::from_entries(n, probs.iter().map(|&(x, p)| (x, C64::new(p.sqrt(), 0.0))).collect())
            .unwrap()
    }

    #[test]
    fn pr_examples() {
        assert_eq!(SparseState::zero(3).unwrap().participation_ratio().unwrap(), 1.0);
        let n = 5;
        let amp = C64::new((1.0 / 32.0f64).sqrt(), 0.0);
        let uniform = SparseState::from_entries(n, (0..32).map(|x| (x, amp)).collect()).unwrap();
        assert!((uniform.participation_ratio().unwrap() - 32.0).abs() < 1e-12);
        let s = real_state(1, &[(0, 0.8), (1, 0.2)]);
        assert!((s.participation_ratio().unwrap() - 1.0 / 0.68).abs() < 1e-12);
        // Oracle above: 1/(0.8² + 0.2²).
        assert!((s.participation_ratio().unwrap() - 1.470_588_235_294_117_6).abs() < 1e-12);
    }

    #[test]
    fn empty_support_is_an_error() {
        let s = SparseState::from_entries(2, vec![]).unwrap();
        assert_eq!(s.participation_ratio(), Err(Error::EmptySupport));
    }

    #[test]
    fn topk_keeps_best_pair() {
        let mut s = real_state(2, &[(0b00, 0.80), (0b01, 0.15), (0b10, 0.05)]);
        let ev = s.truncate_topk(2).unwrap();
        assert!((ev.step_gamma2 - 0.95).abs() < 1e-12);
        assert_eq!(ev.kept, 2);
        assert_eq!(ev.discarded, 1);
        let keys: Vec<u64> = s.sorted_entries().iter().map(|e| e.0).collect();
        assert_eq!(keys, vec![0b00, 0b01]);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((s.gamma2_tot() - 0.95).abs() < 1e-12);
    }

    #[test]
    fn topk_no_op_when_support_small() {
        let mut s = real_state(3, &[(1, 0.5), (2, 0.3), (7, 0.2)]);
        let before = s.clone();
        let ev = s.truncate_topk(8).unwrap();
        assert_eq!(ev.step_gamma2, 1.0);
        assert_eq!(ev.discarded, 0);
        assert_eq!(s.gamma2_tot(), 1.0);
        assert_eq!(s.sorted_entries(), before.sorted_entries());
    }

    #[test]
    fn topk_ties_prefer_low_keys() {
        let mut s = real_state(2, &[(3, 0.25), (1, 0.25), (2, 0.25), (0, 0.25)]);
        let ev = s.truncate_topk(2).unwrap();
        assert!((ev.step_gamma2 - 0.5).abs() < 1e-15);
        let keys: Vec<u64> = s.sorted_entries().iter().map(|e| e.0).collect();
        assert_eq!(keys, vec![0, 1]);
    }

    #[test]
    fn zero_budget_rejected() {
        let mut s = SparseState::zero(2).unwrap();
        assert_eq!(s.truncate_topk(0), Err(Error::InvalidBudget(0)));
    }

    #[test]
    fn normalize_examples() {
        let mut s = SparseState::from_entries(1, vec![(0, C64::new(0.6, 0.0)), (1, C64::new(0.8, 0.0))]).unwrap();
        assert!((s.normalize().unwrap() - 1.0).abs() < 1e-15);
        let mut s = SparseState::from_entries(1, vec![(0, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]).unwrap();
        assert_eq!(s.normalize().unwrap(), 2.0);
        assert!((s.amplitude(1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let mut s = SparseState::from_entries(1, vec![(0, C64::new(0.0, 0.3)), (1, C64::new(0.4, 0.0))]).unwrap();
        assert!((s.normalize().unwrap() - 0.25).abs() < 1e-15);
        assert!((s.amplitude(0) - C64::new(0.0, 0.6)).norm() < 1e-15);
        assert!((s.amplitude(1) - C64::new(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn null_state_rejected() {
        let mut s = SparseState::from_entries(1, vec![]).unwrap();
        assert_eq!(s.normalize(), Err(Error::NullState));
    }

    #[test]
    fn out_of_range_key_rejected() {
        let r = SparseState::from_entries(2, vec![(4, C64::new(1.0, 0.0))]);
        assert!(matches!(r, Err(Error::KeyOutOfRange { .. })));
        assert!(SparseState::zero(0).is_err());
        assert!(SparseState::zero(31).is_err());
    }

    #[test]
    fn dust_is_not_stored() {
        let s = SparseState::from_entries(2, vec![(0, C64::new(1.0, 0.0)), (1, C64::new(1e-16, 0.0))]).unwrap();
        assert_eq!(s.support(), 1);
    }

    fn arb_state() -> impl Strategy<Value = SparseState> {
        (1usize..=8).prop_flat_map(|n| {
            prop::collection::vec((0u64..(1 << n), -1.0f64..1.0, -1.0f64..1.0), 1..40).prop_filter_map(
                "nonzero",
                move |raw| {
                    let s = SparseState::from_entries(
                        n,
                        raw.into_iter().map(|(x, re, im)| (x, C64::new(re, im))).collect(),
                    )
                    .ok()?;
                    (s.support() > 0).then_some(s)
                },
            )
        })
    }

    proptest! {
        #[test]
        fn pr_invariant_under_phase_and_permutation(s in arb_state(), theta in 0.0f64..6.3) {
            let pr = s.participation_ratio().unwrap();
            let phase = C64::from_polar(1.0, theta);
            let mut rotated: Vec<(u64, C64)> = s.entries().iter().map(|&(x, a)| (x, a * phase)).collect();
            rotated.reverse();
            let mask = (1u64 << s.n_qubits()) - 1;
            let permuted: Vec<(u64, C64)> = rotated.iter().map(|&(x, a)| (x ^ mask, a)).collect();
            let pr2 = participation_ratio_of(&permuted).unwrap();
            prop_assert!((pr - pr2).abs() <= 1e-9 * pr);
            prop_assert!(pr >= 1.0 - 1e-12 && pr <= (1u64 << s.n_qubits()) as f64 + 1e-9);
        }

        #[test]
        fn gamma_product_matches_events(s in arb_state(), ks in prop::collection::vec(1usize..20, 1..6)) {
            let mut s = s;
            s.normalize().unwrap();
            let mut product = 1.0;
            let mut last = 1.0;
            for k in ks {
                let ev = s.truncate_topk(k).unwrap();
                prop_assert!(ev.step_gamma2 > 0.0 && ev.step_gamma2 <= 1.0);
                product *= ev.step_gamma2;
                prop_assert!(s.gamma2_tot() <= last);
                last = s.gamma2_tot();
                prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
                prop_assert!(s.support() <= k);
            }
            prop_assert!((s.gamma2_tot() - product).abs() <= 1e-12);
        }
    }
}
