//! Reference decoders and diagnostics used to check the two-phase decoder.
//!
//! Nothing here touches decoder internals except [`diagnose_discrepancy`],
//! which reads a recorded closure trace and the Phase-1 survivors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::decoder::{DecodeResult, Mode, Phase1Result, WinnerSource};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2Solver, SpannedMatrix};
use crate::trellis::{TailBitingTrellis, UnrolledTrellis};

pub const BRUTE_FORCE_MAX_K: usize = 24;
pub const PATH_ENUMERATION_LIMIT: u128 = 1 << 20;

fn sq_distance(c: &BitVec, r: &[f64]) -> f64 {
    r.iter()
        .enumerate()
        .map(|(i, &y)| {
            let x = if c.get(i) { -1.0 } else { 1.0 };
            (y - x) * (y - x)
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForce {
    pub codeword: BitVec,
    pub cost: f64,
    /// Cost of the second-best codeword (`+inf` for a one-word code).
    pub runner_up: f64,
}

/// Exhaustive ML decoding over every codeword spanned by `gen`. Ties go to
/// the lexicographically smallest codeword.
pub fn brute_force_ml(gen: &[BitVec], r: &[f64]) -> Result<BruteForce> {
    let k = gen.len();
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::EnumerationLimit {
            what: "brute-force codewords",
            count: 1u128 << k,
            limit: 1u128 << BRUTE_FORCE_MAX_K,
        });
    }
    let n = gen.first().map_or(r.len(), BitVec::len);
    if r.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: r.len(),
        });
    }
    let mut c = BitVec::zeros(n);
    let mut best = (sq_distance(&c, r), c.clone());
    let mut runner_up = f64::INFINITY;
    for step in 1u64..(1u64 << k) {
        c.xor_assign(&gen[step.trailing_zeros() as usize]);
        let d = sq_distance(&c, r);
        if d < best.0 || (d == best.0 && c < best.1) {
            runner_up = best.0;
            best = (d, c.clone());
        } else if d < runner_up {
            runner_up = d;
        }
    }
    Ok(BruteForce {
        codeword: best.1,
        cost: best.0,
        runner_up,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViterbiMl {
    pub codeword: BitVec,
    pub cost: f64,
    pub subtrellis: usize,
    /// State updates summed over all subtrellis runs.
    pub updates: usize,
}

/// One conventional Viterbi run per start state `i`, constrained to begin
/// and end in state `i`; the best of the runs is returned.
pub fn per_subtrellis_viterbi(t: &TailBitingTrellis, r: &[f64]) -> Result<ViterbiMl> {
    let n = t.n();
    if r.len() != t.total_width() {
        return Err(Error::LengthMismatch {
            expected: t.total_width(),
            actual: r.len(),
        });
    }
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0;
    for &w in t.widths() {
        offsets.push(acc);
        acc += w;
    }
    let branch = |s: usize, label: u32| -> f64 {
        (0..t.widths()[s])
            .map(|k| {
                let x = if (label >> k) & 1 == 1 { -1.0 } else { 1.0 };
                let y = r[offsets[s] + k];
                (y - x) * (y - x)
            })
            .sum()
    };
    let costs: Vec<Vec<f64>> = (0..n)
        .map(|s| t.section(s).iter().map(|e| branch(s, e.label)).collect())
        .collect();

    let mut updates = 0;
    let mut best: Option<(f64, usize, Vec<u32>)> = None;
    for i in 0..t.v_counts()[0] {
        let mut metric = vec![f64::INFINITY; t.v_counts()[0]];
        metric[i] = 0.0;
        // back[s][v] = index into section s of the survivor edge into v
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(n);
        for (s, cost_s) in costs.iter().enumerate() {
            let size = t.v_counts()[(s + 1) % n];
            let mut next = vec![f64::INFINITY; size];
            let mut choice = vec![usize::MAX; size];
            for (idx, e) in t.section(s).iter().enumerate() {
                let m = metric[e.from as usize] + cost_s[idx];
                if m < next[e.to as usize] {
                    next[e.to as usize] = m;
                    choice[e.to as usize] = idx;
                }
            }
            updates += next.iter().filter(|m| m.is_finite()).count();
            metric = next;
            back.push(choice);
        }
        let m = metric[i];
        if !m.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| m < b.0) {
            let mut labels = vec![0u32; n];
            let mut v = i;
            for s in (0..n).rev() {
                let e = t.section(s)[back[s][v]];
                labels[s] = e.label;
                v = e.from as usize;
            }
            best = Some((m, i, labels));
        }
    }
    let (cost, subtrellis, labels) = best.expect("every reduced trellis has a cycle");
    let mut codeword = BitVec::zeros(t.total_width());
    for (s, &label) in labels.iter().enumerate() {
        codeword.insert(offsets[s], t.widths()[s], label);
    }
    Ok(ViterbiMl {
        codeword,
        cost,
        subtrellis,
        updates,
    })
}

/// Label of an `(s_i, f_j)` path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathLabel {
    pub start: usize,
    pub end: usize,
    pub label: BitVec,
}

/// Every start-to-final path label of `u` with its endpoints.
pub fn enumerate_path_labels(u: &UnrolledTrellis) -> Result<BTreeSet<PathLabel>> {
    // path counts per node, to enforce the guard before walking
    let mut count = vec![0u128; u.num_nodes()];
    for i in 0..u.num_subtrellises() {
        count[u.start(i) as usize] = 1;
    }
    for layer in 1..=u.depth() {
        for v in u.layer_nodes(layer) {
            count[v as usize] = u
                .in_edges(v)
                .iter()
                .map(|&e| count[u.edge(e).from as usize])
                .fold(0u128, |a, b| a.saturating_add(b));
        }
    }
    let total = u
        .layer_nodes(u.depth())
        .map(|v| count[v as usize])
        .fold(0u128, |a, b| a.saturating_add(b));
    if total > PATH_ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            what: "trellis paths",
            count: total,
            limit: PATH_ENUMERATION_LIMIT,
        });
    }

    let mut out = BTreeSet::new();
    let mut path = Vec::with_capacity(u.depth());
    for i in 0..u.num_subtrellises() {
        walk(u, i, u.start(i), &mut path, &mut out);
    }
    Ok(out)
}

fn walk(u: &UnrolledTrellis, start: usize, node: u32, path: &mut Vec<u32>, out: &mut BTreeSet<PathLabel>) {
    if u.is_final(node) {
        out.insert(PathLabel {
            start,
            end: u.local(node),
            label: u.path_label(path),
        });
        return;
    }
    for &e in u.out_edges(node) {
        path.push(e);
        walk(u, start, u.edge(e).to, path, out);
        path.pop();
    }
}

/// Violation counts of the Phase-2 heuristic `e(v, f_j) = metric(T_j) - cost1(v)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HeuristicCheck {
    /// `(subtrellis, node)` pairs checked for admissibility.
    pub nodes_checked: usize,
    /// `(subtrellis, edge)` pairs checked for consistency.
    pub edges_checked: usize,
    /// Estimate above the true cheapest completion inside the subtrellis.
    pub admissibility_violations: usize,
    /// `l(u,v) + e(v,f_j) < e(u,f_j)`.
    pub consistency_violations: usize,
}

/// Checks the heuristic on every node and edge of every subtrellis against
/// a backward dynamic program restricted to that subtrellis.
pub fn check_heuristic(u: &UnrolledTrellis, costs: &[Vec<f64>], p1: &Phase1Result, tol: f64) -> HeuristicCheck {
    let mut out = HeuristicCheck::default();
    let edge_cost = |e: u32| {
        let ed = u.edge(e);
        costs[ed.section as usize][ed.label as usize]
    };
    for j in 0..u.num_subtrellises() {
        let mut to_go = vec![f64::INFINITY; u.num_nodes()];
        to_go[u.final_node(j) as usize] = 0.0;
        for layer in (0..u.depth()).rev() {
            for v in u.layer_nodes(layer) {
                if !u.is_member(v, j) {
                    continue;
                }
                to_go[v as usize] = u
                    .out_edges(v)
                    .iter()
                    .filter(|&&e| u.is_member(u.edge(e).to, j))
                    .map(|&e| edge_cost(e) + to_go[u.edge(e).to as usize])
                    .fold(f64::INFINITY, f64::min);
            }
        }
        for layer in 0..=u.depth() {
            for v in u.layer_nodes(layer) {
                if !u.is_member(v, j) || !to_go[v as usize].is_finite() {
                    continue;
                }
                out.nodes_checked += 1;
                if p1.estimate(j, v) > to_go[v as usize] + tol {
                    out.admissibility_violations += 1;
                }
                for &e in u.out_edges(v) {
                    let w = u.edge(e).to;
                    if !u.is_member(w, j) {
                        continue;
                    }
                    out.edges_checked += 1;
                    if edge_cost(e) + p1.estimate(j, w) < p1.estimate(j, v) - tol {
                        out.consistency_violations += 1;
                    }
                }
            }
        }
    }
    out
}

/// Compact view of a decode result for discrepancy records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub mode: Mode,
    pub codeword: BitVec,
    pub cost: f64,
    pub subtrellis: usize,
    pub winner_source: WinnerSource,
    pub node_computations: usize,
}

impl From<&DecodeResult> for ResultSummary {
    fn from(r: &DecodeResult) -> Self {
        Self {
            mode: r.mode,
            codeword: r.codeword.clone(),
            cost: r.cost,
            subtrellis: r.subtrellis,
            winner_source: r.winner_source,
            node_computations: r.stats.node_computations,
        }
    }
}

/// A frame on which an approximate mode lost to the exact decoder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub frame_seed: u64,
    pub snr_db: Option<f64>,
    pub exact: ResultSummary,
    pub approx: ResultSummary,
    /// Subtrellis whose closure landed first on the ML path.
    pub blocking_trellis: usize,
    pub blocked_node: u32,
    pub blocked_depth: usize,
    /// Phase-1 survivor label at the blocking subtrellis's final node.
    pub survivor: BitVec,
    /// `survivor + exact.codeword`: the survivor as seen when the ML
    /// codeword is translated to the all-zero word.
    pub semicodeword: BitVec,
    /// Coefficients over the rows of `G_s` (linear rows first, then head
    /// and tail of each circular row).
    pub coefficients: BitVec,
    pub uses_linear_rows: bool,
}

/// Prepared `G_s` coordinate system for one code.
#[derive(Clone, Debug)]
pub struct DiscrepancyAnalyzer {
    linear_rows: usize,
    solver: Gf2Solver,
}

impl DiscrepancyAnalyzer {
    pub fn new(g: &SpannedMatrix) -> Result<Self> {
        let gs = g.split_heads_tails()?;
        let rows: Vec<BitVec> = gs.rows().iter().map(|(r, _)| r.clone()).collect();
        Ok(Self {
            linear_rows: g.l(),
            solver: Gf2Solver::new(&rows),
        })
    }

    /// Coefficients of `word` over `G_s`, and whether any linear row is used.
    pub fn decompose(&self, word: &BitVec) -> Option<(BitVec, bool)> {
        let x = self.solver.solve(word)?;
        let uses = (0..self.linear_rows).any(|i| x.get(i));
        Some((x, uses))
    }

    /// `approx` must have been decoded with tracing on, from the same frame
    /// and Phase-1 result as `exact`.
    pub fn diagnose(
        &self,
        frame_seed: u64,
        u: &UnrolledTrellis,
        exact: &DecodeResult,
        approx: &DecodeResult,
        p1: &Phase1Result,
    ) -> Result<Discrepancy> {
        if exact.mode != Mode::Exact || approx.mode == Mode::Exact {
            return Err(Error::Diagnosis("expected one exact and one approximate result".into()));
        }
        if exact.stats.phase1_updates != p1.updates
            || approx.stats.phase1_updates != p1.updates
            || exact.codeword.len() != approx.codeword.len()
        {
            return Err(Error::Diagnosis("results are not from the same frame".into()));
        }
        if exact.cost.partial_cmp(&(approx.cost - 1e-9)) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Diagnosis(format!(
                "not a miss: exact cost {} vs approximate cost {}",
                exact.cost, approx.cost
            )));
        }
        let trace = approx
            .trace
            .as_ref()
            .ok_or_else(|| Error::Diagnosis("approximate result has no trace".into()))?;
        let ml_nodes: BTreeSet<u32> = exact.path_nodes(u).into_iter().collect();
        let blocker = trace
            .iter()
            .find(|c| c.trellis_no as usize != exact.subtrellis && ml_nodes.contains(&c.node))
            .ok_or_else(|| Error::Diagnosis("no foreign closure on the ML path".into()))?;
        let j = blocker.trellis_no as usize;
        let survivor = p1.survivor_label(u, j);
        let semicodeword = survivor.xor(&exact.codeword);
        let (coefficients, uses_linear_rows) = self
            .decompose(&semicodeword)
            .ok_or_else(|| Error::Diagnosis("survivor label outside the semicodeword space".into()))?;
        Ok(Discrepancy {
            frame_seed,
            snr_db: None,
            exact: exact.into(),
            approx: approx.into(),
            blocking_trellis: j,
            blocked_node: blocker.node,
            blocked_depth: blocker.depth as usize,
            survivor,
            semicodeword,
            coefficients,
            uses_linear_rows,
        })
    }
}

/// One-shot form of [`DiscrepancyAnalyzer::diagnose`].
pub fn diagnose_discrepancy(
    g: &SpannedMatrix,
    frame_seed: u64,
    u: &UnrolledTrellis,
    exact: &DecodeResult,
    approx: &DecodeResult,
    p1: &Phase1Result,
) -> Result<Discrepancy> {
    DiscrepancyAnalyzer::new(g)?.diagnose(frame_seed, u, exact, approx, p1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{add_awgn, modulate};
    use crate::codebook::{conv_tbt, hamming74, ConvCodeSpec};
    use crate::decoder::{decode, phase1, Decoder};
    use crate::gf2::row_space;

    #[test]
    fn brute_force_zero_noise_and_ties() {
        let (g, _) = hamming74();
        let gen = g.generator();
        let c: BitVec = "1100101".parse().unwrap();
        let bf = brute_force_ml(&gen, &modulate(&c)).unwrap();
        assert_eq!(bf.codeword, c);
        assert_eq!(bf.cost, 0.0);
        let bf = brute_force_ml(&gen, &[0.0; 7]).unwrap();
        assert_eq!(bf.cost, 7.0);
        assert!(bf.codeword.is_zero());
        let big = vec![BitVec::zeros(30); 25];
        assert!(matches!(brute_force_ml(&big, &[0.0; 30]), Err(Error::EnumerationLimit { .. })));
    }

    #[test]
    fn oracles_agree_on_hamming() {
        let (g, t) = hamming74();
        let gen = g.generator();
        for seed in 0..500u64 {
            let r = add_awgn(&[1.0; 7], 1.0, seed);
            let bf = brute_force_ml(&gen, &r).unwrap();
            let vt = per_subtrellis_viterbi(&t, &r).unwrap();
            assert!((bf.cost - vt.cost).abs() < 1e-9);
        }
    }

    #[test]
    fn single_subtrellis_is_plain_viterbi() {
        let g = SpannedMatrix::from_printed(&[("1101000", 0, 3), ("0110100", 1, 4)], 0).unwrap();
        let t = crate::trellis::from_spanned_matrix(&g).unwrap();
        assert_eq!(t.num_subtrellises(), 1);
        let r = add_awgn(&[1.0; 7], 0.0, 3);
        let vt = per_subtrellis_viterbi(&t, &r).unwrap();
        let bf = brute_force_ml(&g.generator(), &r).unwrap();
        assert_eq!(vt.codeword, bf.codeword);
        assert_eq!(vt.updates, t.total_states() - t.v_counts()[0] + 1);
    }

    #[test]
    fn conv_baseline_update_count() {
        let spec = ConvCodeSpec::new(vec![0o35, 0o31], 20).unwrap();
        let t = conv_tbt(&spec).unwrap();
        let vt = per_subtrellis_viterbi(&t, &[1.0; 40]).unwrap();
        assert!(vt.codeword.is_zero());
        // 16 runs; each grows 1, 2, 4, 8 states, then 16 per step
        assert_eq!(vt.updates, 16 * (2 + 4 + 8 + 16 * 17));
    }

    #[test]
    fn hamming_path_labels() {
        let (g, t) = hamming74();
        let labels = enumerate_path_labels(&t.unroll()).unwrap();
        let words: BTreeSet<BitVec> = labels.iter().map(|p| p.label.clone()).collect();
        let gs = g.split_heads_tails().unwrap().generator();
        assert_eq!(words, row_space(&gs).unwrap());
        assert_eq!(words.len(), 64);
        let code: BTreeSet<BitVec> = labels
            .iter()
            .filter(|p| p.start == p.end)
            .map(|p| p.label.clone())
            .collect();
        assert_eq!(code, row_space(&g.generator()).unwrap());
    }

    #[test]
    fn path_enumeration_guard() {
        let t = conv_tbt(&ConvCodeSpec::new(vec![0o35, 0o31], 20).unwrap()).unwrap();
        assert!(matches!(
            enumerate_path_labels(&t.unroll()),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn diagnosis_requires_a_miss() {
        let (g, t) = hamming74();
        let u = t.unroll();
        let r = add_awgn(&[1.0; 7], 3.0, 11);
        let s = crate::channel::branch_costs(&t, &r).unwrap();
        let p1 = phase1(&u, &s);
        let mut dec = Decoder::new(&u).with_trace(true);
        let exact = dec.phase2(&s, &p1, Mode::Exact);
        let approx = dec.phase2(&s, &p1, Mode::Approx1);
        let err = diagnose_discrepancy(&g, 11, &u, &exact, &approx, &p1).unwrap_err();
        assert!(matches!(err, Error::Diagnosis(_)));
        let _ = decode(&t, &r, Mode::Exact).unwrap();
    }
}
