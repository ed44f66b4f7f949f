//! Structural and decoding self-checks behind `tbt-decode selftest`.

use std::collections::{BTreeMap, BTreeSet};

use crate::channel::branch_costs;
use crate::codebook::{hamming74, Code, ConvCodeSpec};
use crate::decoder::{phase1, Decoder, Mode};
use crate::error::Result;
use crate::gf2::{row_space, zero_run, BitVec, Interval, SpannedMatrix};
use crate::oracle::{brute_force_ml, check_heuristic, enumerate_path_labels, per_subtrellis_viterbi};
use crate::sim::Frame;
use crate::trellis::{elementary_trellis, from_spanned_matrix, TailBitingTrellis};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Reference matrices: Hamming, the (35,31) code over 20 sections at bit
/// level, and the (7,5) code over 6 sections.
fn matrices() -> Result<Vec<(&'static str, SpannedMatrix)>> {
    Ok(vec![
        ("hamming74", hamming74().0),
        ("conv35_31_L20", ConvCodeSpec::new(vec![0o35, 0o31], 20)?.spanned_matrix()?),
        ("conv7_5_L6", ConvCodeSpec::new(vec![0o7, 0o5], 6)?.spanned_matrix()?),
    ])
}

fn edge_multiplicativity() -> Result<(bool, String)> {
    let mut notes = Vec::new();
    for (name, g) in matrices()? {
        let elems: Vec<TailBitingTrellis> = g
            .rows()
            .iter()
            .map(|(r, s)| elementary_trellis(r, s))
            .collect::<Result<_>>()?;
        let product = from_spanned_matrix(&g)?;
        for t in 0..g.n() {
            let expected: usize = elems.iter().map(|e| e.section(t).len()).product();
            if product.section(t).len() != expected {
                return Ok((false, format!("{name} section {t}: {} edges, expected {expected}", product.section(t).len())));
            }
        }
        notes.push(format!("{name} {} edges", product.total_edges()));
    }
    Ok((true, notes.join(", ")))
}

fn start_state_count() -> Result<(bool, String)> {
    let mut notes = Vec::new();
    for (name, g) in matrices()? {
        let t = from_spanned_matrix(&g)?;
        let expected = 1usize << g.c();
        if t.num_subtrellises() != expected {
            return Ok((false, format!("{name}: {} start states, c = {}", t.num_subtrellises(), g.c())));
        }
        notes.push(format!("{name} 2^{}", g.c()));
    }
    Ok((true, notes.join(", ")))
}

fn coset_structure() -> Result<(bool, String)> {
    let (g, t) = hamming74();
    let labels = enumerate_path_labels(&t.unroll())?;
    let gl: Vec<BitVec> = g.linear_rows().map(|(r, _)| r.clone()).collect();
    let subcode = row_space(&gl)?;
    let mut by_trellis: BTreeMap<usize, BTreeSet<BitVec>> = BTreeMap::new();
    for p in labels.iter().filter(|p| p.start == p.end) {
        by_trellis.entry(p.start).or_default().insert(p.label.clone());
    }
    let mut union = BTreeSet::new();
    for (i, words) in &by_trellis {
        let leader = words.iter().next().expect("non-empty");
        let coset: BTreeSet<BitVec> = subcode.iter().map(|w| w.xor(leader)).collect();
        if *words != coset {
            return Ok((false, format!("subtrellis {i} is not a coset of the linear subcode")));
        }
        union.extend(words.iter().cloned());
    }
    let code = row_space(&g.generator())?;
    let ok = by_trellis.len() == 4 && union == code;
    Ok((ok, format!("{} cosets of size {}", by_trellis.len(), subcode.len())))
}

fn zero_run_tiling() -> Result<(bool, String)> {
    let mut checked = 0;
    for (name, g) in matrices()? {
        let n = g.n();
        for (idx, (row, span)) in g.circular_rows().enumerate() {
            let z = zero_run(row, span, n)?;
            let active = span.active_times(n).expect("circular rows are active");
            let tiles = (0..n).all(|t| z.contains(t) != active.contains(t));
            let zero = z.iter().all(|t| !row.get(t) || t == span.lo);
            if !(tiles && zero) {
                return Ok((false, format!("{name} circular row {idx}: zero run {z}, active {active}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} circular rows")))
}

fn intersection_witness() -> Result<(bool, String)> {
    let (g, _) = hamming74();
    let v = g.intersection_property();
    let ok = v.holds && v.witness == Some(Interval::new(4, 5, 7));
    Ok((ok, format!("witness {:?}", v.witness.map(|w| w.to_string()))))
}

fn semicodeword_space() -> Result<(bool, String)> {
    let (g, t) = hamming74();
    let labels: BTreeSet<BitVec> = enumerate_path_labels(&t.unroll())?
        .into_iter()
        .map(|p| p.label)
        .collect();
    let gs = row_space(&g.split_heads_tails()?.generator())?;
    Ok((labels == gs && gs.len() == 64, format!("{} labels", labels.len())))
}

fn decoder_vs_oracles() -> Result<(bool, String)> {
    let mut notes = Vec::new();
    for name in ["hamming74", "conv35_31_L20"] {
        let code = Code::from_name(name)?;
        let u = code.trellis.unroll();
        let mut dec = Decoder::new(&u);
        let mut worst: f64 = 0.0;
        for f in 0..300 {
            let frame = Frame::generate(&code, 0x5e1f, f, (f % 6) as f64, false);
            let res = dec.decode(&frame.r, Mode::Exact)?;
            let reference = if code.k() <= 12 {
                brute_force_ml(&code.systematic, &frame.r)?.cost
            } else {
                per_subtrellis_viterbi(&code.trellis, &frame.r)?.cost
            };
            worst = worst.max((res.cost - reference).abs());
        }
        if worst > 1e-9 {
            return Ok((false, format!("{name}: cost gap {worst:e}")));
        }
        notes.push(format!("{name} 300 frames"));
    }
    Ok((true, notes.join(", ")))
}

fn heuristic() -> Result<(bool, String)> {
    let code = Code::from_name("hamming74")?;
    let u = code.trellis.unroll();
    let mut total = 0;
    for f in 0..100 {
        let frame = Frame::generate(&code, 0xface, f, 1.0, false);
        let s = branch_costs(&code.trellis, &frame.r)?;
        let p1 = phase1(&u, &s);
        let c = check_heuristic(&u, &s.costs, &p1, 1e-9);
        if c.admissibility_violations + c.consistency_violations > 0 {
            return Ok((false, format!("frame {f}: {c:?}")));
        }
        total += c.edges_checked;
    }
    Ok((true, format!("{total} edge checks")))
}

pub fn run() -> Vec<Check> {
    vec![
        check("product edge counts multiply", edge_multiplicativity),
        check("start states = 2^c", start_state_count),
        check("subtrellis codes are cosets of the linear subcode", coset_structure),
        check("zero run tiles with active times", zero_run_tiling),
        check("hamming intersection witness [4,5]", intersection_witness),
        check("path labels span G_s (64 words)", semicodeword_space),
        check("exact decoder matches oracles", decoder_vs_oracles),
        check("heuristic admissible and consistent", heuristic),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
