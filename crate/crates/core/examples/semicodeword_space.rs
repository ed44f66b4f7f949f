//! Every start-to-final path label of the Hamming trellis, grouped by
//! endpoints, against the row space of the head/tail matrix.

use std::collections::BTreeSet;

use tailbiting::codebook::hamming74;
use tailbiting::gf2::{row_space, BitVec, Gf2Solver};
use tailbiting::oracle::enumerate_path_labels;

fn main() -> tailbiting::Result<()> {
    let (g, t) = hamming74();
    let gs = g.split_heads_tails()?;
    println!("G_s rows:");
    for (row, span) in gs.rows() {
        println!("  {row}  [{},{}]", span.lo, span.hi);
    }
    let labels = enumerate_path_labels(&t.unroll())?;
    let words: BTreeSet<BitVec> = labels.iter().map(|p| p.label.clone()).collect();
    let space = row_space(&gs.generator())?;
    println!("{} path labels, {} distinct, row space size {}, equal: {}", labels.len(), words.len(), space.len(), words == space);

    let solver = Gf2Solver::new(&gs.generator());
    for target in ["1100110", "0000000", "1111111"] {
        let w: BitVec = target.parse()?;
        let ends: Vec<String> = labels
            .iter()
            .filter(|p| p.label == w)
            .map(|p| format!("(s{}, f{})", p.start, p.end))
            .collect();
        println!("{target}: endpoints {} coefficients {:?}", ends.join(" "), solver.solve(&w).map(|x| x.to_string()));
    }
    Ok(())
}
