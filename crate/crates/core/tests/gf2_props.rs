mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use tailbiting::gf2::{rank, row_space, zero_run, BitVec, Gf2Solver, Interval};

fn bitvec(n: usize) -> impl Strategy<Value = BitVec> {
    prop::collection::vec(0u8..2, n).prop_map(|b| BitVec::from_bits(&b))
}

proptest! {
    #[test]
    fn row_space_is_closed_and_sized(rows in prop::collection::vec(bitvec(12), 1..7)) {
        let space = row_space(&rows).unwrap();
        prop_assert_eq!(space.len(), 1usize << rank(&rows));
        let v: Vec<&BitVec> = space.iter().take(9).collect();
        for a in &v {
            for b in &v {
                prop_assert!(space.contains(&a.xor(b)));
            }
        }
    }

    #[test]
    fn solver_recovers_combinations(
        rows in prop::collection::vec(bitvec(16), 1..8),
        coeffs in prop::collection::vec(any::<bool>(), 8),
    ) {
        let mut target = BitVec::zeros(16);
        for (r, &c) in rows.iter().zip(&coeffs) {
            if c { target.xor_assign(r); }
        }
        let x = Gf2Solver::new(&rows).solve(&target).expect("in the span");
        let mut back = BitVec::zeros(16);
        for (i, r) in rows.iter().enumerate() {
            if x.get(i) { back.xor_assign(r); }
        }
        prop_assert_eq!(back, target);
    }

    #[test]
    fn bitvec_text_round_trip(v in bitvec(70)) {
        let s = v.to_string();
        prop_assert_eq!(s.parse::<BitVec>().unwrap(), v);
    }

    #[test]
    fn bitvec_extract_insert(v in bitvec(40), start in 0usize..30, width in 1usize..=10) {
        let x = v.extract(start, width);
        let mut w = BitVec::zeros(40);
        w.insert(start, width, x);
        for i in 0..40 {
            prop_assert_eq!(w.get(i), (start..start + width).contains(&i) && v.get(i));
        }
    }

    #[test]
    fn zero_run_tiles_active_times(g in common::spanned_matrix(4..=24, 6)) {
        let n = g.n();
        for (row, span) in g.circular_rows() {
            let z = zero_run(row, span, n).unwrap();
            let active = span.active_times(n).unwrap();
            let zs: BTreeSet<usize> = z.iter().collect();
            let acts: BTreeSet<usize> = active.iter().collect();
            prop_assert!(zs.is_disjoint(&acts));
            prop_assert_eq!(zs.len() + acts.len(), n);
            prop_assert!(z.iter().all(|t| t == span.lo || !row.get(t)));
        }
        for (row, span) in g.linear_rows() {
            prop_assert!(zero_run(row, span, n).is_err());
        }
    }

    #[test]
    fn intersection_witness_lies_in_every_zero_run(g in common::spanned_matrix(5..=16, 5)) {
        let v = g.intersection_property();
        if let Some(w) = v.witness {
            for (row, span) in g.circular_rows() {
                let z = zero_run(row, span, g.n()).unwrap();
                prop_assert!(z.covers(&w), "{} not in {}", w, z);
            }
        } else {
            prop_assert!(!v.holds);
        }
    }

    #[test]
    fn interval_membership(lo in 0usize..10, hi in 0usize..10) {
        let iv = Interval::new(lo, hi, 10);
        let members: Vec<usize> = iv.iter().collect();
        prop_assert_eq!(members.len(), iv.len());
        prop_assert!((0..10).all(|t| iv.contains(t) == members.contains(&t)));
    }

    #[test]
    fn spanned_matrix_text_round_trip(g in common::spanned_matrix(4..=20, 6)) {
        let back = tailbiting::gf2::SpannedMatrix::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(back, g);
    }
}
