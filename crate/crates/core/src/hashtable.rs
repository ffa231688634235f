//! Open-addressing amplitude accumulator keyed by basis index.
//!
//! Linear probing over a power-of-two slot array, load factor kept at or below
//! one half, grow-by-doubling. Keys are compared exactly on every probe.

use crate::linalg::{C64, ZERO};

const EMPTY: u64 = u64::MAX;
const MIN_CAPACITY: usize = 16;

/// Hash table mapping basis indices to accumulated complex amplitudes.
#[derive(Clone, Debug)]
pub struct AmpTable {
    keys: Vec<u64>,
    values: Vec<C64>,
    len: usize,
    mask: usize,
}

#[inline]
fn mix(key: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = key.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl AmpTable {
    /// Table sized to hold `expected` keys without growing.
    pub fn with_capacity(expected: usize) -> Self {
        let slots = (expected.max(1) * 2).next_power_of_two().max(MIN_CAPACITY);
        Self {
            keys: vec![EMPTY; slots],
            values: vec![ZERO; slots],
            len: 0,
            mask: slots - 1,
        }
    }

    pub fn from_entries(entries: &[(u64, C64)]) -> Self {
        let mut table = Self::with_capacity(entries.len());
        for &(key, amp) in entries {
            table.add(key, amp);
        }
        table
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    #[inline]
    fn slot_of(&self, key: u64) -> usize {
        let mut slot = (mix(key) as usize) & self.mask;
        loop {
            let k = self.keys[slot];
            if k == key || k == EMPTY {
                return slot;
            }
            slot = (slot + 1) & self.mask;
        }
    }

    /// Accumulates `amp` into the entry for `key`, inserting it if absent.
    #[inline]
    pub fn add(&mut self, key: u64, amp: C64) {
        debug_assert_ne!(key, EMPTY);
        if (self.len + 1) * 2 > self.keys.len() {
            self.grow();
        }
        let slot = self.slot_of(key);
        if self.keys[slot] == EMPTY {
            self.keys[slot] = key;
            self.values[slot] = amp;
            self.len += 1;
        } else {
            self.values[slot] += amp;
        }
    }

    #[inline]
    pub fn get(&self, key: u64) -> Option<C64> {
        let slot = self.slot_of(key);
        (self.keys[slot] == key).then(|| self.values[slot])
    }

    pub fn contains(&self, key: u64) -> bool {
        self.get(key).is_some()
    }

    fn grow(&mut self) {
        let slots = self.keys.len() * 2;
        let old_keys = std::mem::replace(&mut self.keys, vec![EMPTY; slots]);
        let old_values = std::mem::replace(&mut self.values, vec![ZERO; slots]);
        self.mask = slots - 1;
        for (key, value) in old_keys.into_iter().zip(old_values) {
            if key != EMPTY {
                let slot = self.slot_of(key);
                self.keys[slot] = key;
                self.values[slot] = value;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, C64)> + '_ {
        self.keys
            .iter()
            .zip(&self.values)
            .filter(|(k, _)| **k != EMPTY)
            .map(|(k, v)| (*k, *v))
    }

    /// Drains occupied slots in slot order, dropping entries with `|amp|² <= floor`.
    pub fn into_entries(self, floor: f64) -> Vec<(u64, C64)> {
        self.keys
            .into_iter()
            .zip(self.values)
            .filter(|(k, v)| *k != EMPTY && v.norm_sqr() > floor)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn accumulates_colliding_keys() {
        let mut t = AmpTable::with_capacity(2);
        t.add(5, C64::new(1.0, 0.0));
        t.add(5, C64::new(0.5, -1.0));
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(5), Some(C64::new(1.5, -1.0)));
        assert_eq!(t.get(6), None);
    }

    #[test]
    fn load_factor_stays_at_most_half() {
        let mut t = AmpTable::with_capacity(1);
        for key in 0..10_000u64 {
            t.add(key * 7919, C64::new(key as f64, 0.0));
            assert!(t.len() * 2 <= t.capacity());
            assert!(t.capacity().is_power_of_two());
        }
        assert_eq!(t.len(), 10_000);
    }

    #[test]
    fn floor_prunes_dust() {
        let mut t = AmpTable::with_capacity(4);
        t.add(1, C64::new(1e-16, 0.0));
        t.add(2, C64::new(1.0, 0.0));
        t.add(3, C64::new(1.0, 0.0));
        t.add(3, C64::new(-1.0, 0.0));
        let entries = t.into_entries(1e-30);
        assert_eq!(entries, vec![(2, C64::new(1.0, 0.0))]);
    }

    proptest! {
        #[test]
        fn matches_std_hashmap(ops in prop::collection::vec((0u64..64, -1.0f64..1.0), 0..300)) {
            let mut t = AmpTable::with_capacity(4);
            let mut reference: HashMap<u64, C64> = HashMap::new();
            for (key, re) in ops {
                t.add(key, C64::new(re, 0.0));
                *reference.entry(key).or_insert(ZERO) += C64::new(re, 0.0);
            }
            prop_assert_eq!(t.len(), reference.len());
            for (key, value) in reference {
                prop_assert_eq!(t.get(key), Some(value));
            }
        }
    }
}
