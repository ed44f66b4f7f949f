//! Builds a 16-state tail-biting trellis for the (24,12,8) extended Golay
//! code from a quasi-cyclic generator and writes it to `data/`.
//!
//! cargo run --release --example golay_trellis [-- <out-dir>]

use std::collections::BTreeSet;
use std::path::PathBuf;

use tailbiting::gf2::{row_space, BitVec, Span, SpannedMatrix};
use tailbiting::trellis::from_spanned_matrix;

const N: usize = 24;
const TYPES: [&str; 4] = [
    "111110101100000000000000",
    "001101011111000000000000",
    "000011101110110000000000",
    "000000111011011100000000",
];

fn rotate(v: &BitVec, by: usize) -> BitVec {
    let mut out = BitVec::zeros(N);
    for i in v.ones() {
        out.set((i + by) % N, true);
    }
    out
}

fn main() -> tailbiting::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));

    let mut rows = Vec::new();
    for shift in [0, 8, 16] {
        for (j, ty) in TYPES.iter().enumerate() {
            let row = rotate(&ty.parse()?, shift);
            let lo = 2 * j + shift;
            let hi = (lo + 9) % N;
            let span = if lo <= hi { Span::linear(lo, hi) } else { Span::circular(lo, hi) };
            rows.push((row, span));
        }
    }
    let g = SpannedMatrix::new(N, rows)?;

    let words = row_space(&g.generator())?;
    let weights: BTreeSet<usize> = words.iter().map(BitVec::weight).collect();
    println!("codewords {} weights {:?}", words.len(), weights);
    assert_eq!(words.len(), 4096);
    assert_eq!(weights, BTreeSet::from([0, 8, 12, 16, 24]));

    let bit_level = from_spanned_matrix(&g)?;
    let t = bit_level.merge_sections(2)?;
    println!(
        "bit-level states {} -> {} sections of width 2, states per time {:?}, V = {}, start states {}",
        bit_level.total_states(),
        t.n(),
        t.v_counts(),
        t.total_states(),
        t.num_subtrellises()
    );
    assert_eq!(t.total_states(), 192);

    std::fs::create_dir_all(&out_dir)?;
    let tbt = out_dir.join("golay24_16state.tbt");
    std::fs::write(&tbt, t.to_text())?;
    std::fs::write(out_dir.join("golay24_16state.gkv"), g.to_text())?;
    println!("wrote {}", tbt.display());
    Ok(())
}
