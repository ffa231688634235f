//! Single-step optimality and single-step estimator identities as property tests.

use bass_core::heuristics::{schmidt_sector, truncate_schmidt1};
use bass_core::rdm::{rdm1_all, rdm2};
use bass_core::reference::partial_trace;
use bass_core::{fidelity, BasisFrame, DenseState, SparseState, C64};
use proptest::prelude::*;

fn state_strategy(n: usize, max_support: usize) -> impl Strategy<Value = SparseState> {
    prop::collection::vec((0u64..1 << n, -1.0f64..1.0, -1.0f64..1.0), 2..max_support).prop_filter_map(
        "non-null",
        move |raw| {
            let mut s =
                SparseState::from_entries(n, raw.into_iter().map(|(x, re, im)| (x, C64::new(re, im))).collect())
                    .ok()?;
            s.normalize().ok()?;
            Some(s)
        },
    )
}

fn distinct_sectors(keys: impl Iterator<Item = u64>, cut: usize) -> usize {
    let mut v: Vec<u64> = keys.map(|x| schmidt_sector(x, cut)).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

proptest! {
    #[test]
    fn more_diverse_selection_never_retains_more(s in state_strategy(8, 80), k in 1usize..16) {
        let mut top = s.clone();
        let p_top = top.truncate_topk(k).unwrap().step_gamma2;
        let mut sch = s.clone();
        let p_sch = truncate_schmidt1(&mut sch, k).unwrap().step_gamma2;
        let cut = 4;
        let d_top = distinct_sectors(top.entries().iter().map(|e| e.0), cut);
        let d_sch = distinct_sectors(sch.entries().iter().map(|e| e.0), cut);
        if d_sch > d_top {
            prop_assert!(p_sch <= p_top + 1e-15);
        }
    }

    #[test]
    fn one_truncation_fidelity_equals_gamma(s in state_strategy(7, 128), k in 1usize..64) {
        let dense = DenseState::from_sparse(&s).unwrap();
        let mut t = s.clone();
        let ev = t.truncate_topk(k).unwrap();
        let f = fidelity(&t, &BasisFrame::identity(7), &dense).unwrap();
        prop_assert!((f - ev.step_gamma2).abs() <= 1e-12);
    }

    #[test]
    fn sparse_rdms_match_dense_partial_traces(s in state_strategy(5, 32), q1 in 0usize..5, q2 in 0usize..5) {
        prop_assume!(q1 != q2);
        let dense = DenseState::from_sparse(&s).unwrap();
        let rho = rdm2(&s, q1, q2).unwrap();
        let exact = partial_trace(&dense, &[q1, q2]).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                prop_assert!((rho[(r, c)] - exact[(r, c)]).norm() <= 1e-12);
            }
        }
        let one = rdm1_all(&s)[q1].matrix();
        let exact1 = partial_trace(&dense, &[q1]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!((one[(r, c)] - exact1[(r, c)]).norm() <= 1e-12);
            }
        }
    }
}
