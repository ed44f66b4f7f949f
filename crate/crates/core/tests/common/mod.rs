#![allow(dead_code)]

use proptest::prelude::*;
use tailbiting::gf2::{BitVec, Span, SpannedMatrix};

/// One row: span start, span length, interior bits.
fn row_parts(n: usize) -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (0..n, 2..n, prop::collection::vec(any::<bool>(), n))
}

fn build_row(n: usize, lo: usize, len: usize, fill: &[bool]) -> (BitVec, Span) {
    let hi = (lo + len - 1) % n;
    let mut row = BitVec::zeros(n);
    for k in 0..len {
        let p = (lo + k) % n;
        row.set(p, k == 0 || k == len - 1 || fill[p]);
    }
    let span = if lo <= hi { Span::linear(lo, hi) } else { Span::circular(lo, hi) };
    (row, span)
}

/// Random spanned matrices with independent rows, `n` in `lens`, up to
/// `max_k` rows. Roughly half the rows wrap.
pub fn spanned_matrix(lens: std::ops::RangeInclusive<usize>, max_k: usize) -> impl Strategy<Value = SpannedMatrix> {
    lens.prop_flat_map(move |n| (Just(n), prop::collection::vec(row_parts(n), 1..=max_k)))
        .prop_filter_map("dependent rows", |(n, parts)| {
            let rows = parts.iter().map(|(lo, len, fill)| build_row(n, *lo, *len, fill)).collect();
            SpannedMatrix::new(n, rows).ok()
        })
}

pub fn snr() -> impl Strategy<Value = f64> {
    -2.0f64..6.0
}
