//! Two-phase maximum-likelihood decoder.
//!
//! Phase 1 runs Viterbi over the unrolled trellis from all start nodes at
//! once. Its survivor costs give, for every node `v` and subtrellis `j`, the
//! estimate `e(v, f_j) = metric(T_j) - cost1(v)`, which never overestimates
//! the cheapest completion inside `T_j` and is consistent along edges.
//!
//! Phase 2 is a best-first search over `(subtrellis, node)` pairs ordered by
//! `cost so far + e(v, f_j)`. It starts from the residual subtrellises
//! (those whose Phase-1 survivor at `f_j` came from another start and whose
//! metric is below `low`, the best codeword survivor), never queues
//! entries at or above `low`, and stops at the first final node closed.
//!
//! The approximate modes bound the work: [`Mode::Approx1`] closes every
//! node of the unrolled trellis at most once over all subtrellises, and
//! [`Mode::Approx2`] at most twice.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{branch_costs, SoftInput};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::trellis::{TailBitingTrellis, UnrolledTrellis};

/// Absolute tolerance for all metric comparisons.
pub const EPS: f64 = 1e-9;

const NO_EDGE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx1,
    Approx2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Exact, Mode::Approx1, Mode::Approx2];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approx1 => "approx1",
            Mode::Approx2 => "approx2",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            "approx1" => Ok(Mode::Approx1),
            "approx2" => Ok(Mode::Approx2),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// Survivor information from the Viterbi pass.
#[derive(Clone, Debug)]
pub struct Phase1Result {
    /// Survivor cost per unrolled node (0 at every start node).
    pub cost1: Vec<f64>,
    /// Incoming edge of the survivor, `u32::MAX` at start nodes.
    pub parent: Vec<u32>,
    /// Start node index the survivor originates from.
    pub origin: Vec<u32>,
    /// `metric(T_j) = cost1(f_j)`.
    pub trellis_metric: Vec<f64>,
    /// Whether the survivor at `f_j` is an `(s_j, f_j)` path.
    pub codeword_survivor: Vec<bool>,
    /// Cost of the best codeword survivor, or `+inf`.
    pub low: f64,
    pub low_trellis: Option<usize>,
    /// Nodes updated (all nodes of layers `1..=n`).
    pub updates: usize,
}

impl Phase1Result {
    /// Heuristic `e(node, f_j)`.
    #[inline]
    pub fn estimate(&self, j: usize, node: u32) -> f64 {
        self.trellis_metric[j] - self.cost1[node as usize]
    }

    /// Edge ids of the survivor path ending at `node`, in forward order.
    pub fn survivor_edges(&self, u: &UnrolledTrellis, node: u32) -> Vec<u32> {
        let mut edges = Vec::with_capacity(u.depth());
        let mut cur = node;
        while self.parent[cur as usize] != NO_EDGE {
            let e = self.parent[cur as usize];
            edges.push(e);
            cur = u.edge(e).from;
        }
        edges.reverse();
        edges
    }

    /// Label of the survivor at final node `f_j`.
    pub fn survivor_label(&self, u: &UnrolledTrellis, j: usize) -> BitVec {
        u.path_label(&self.survivor_edges(u, u.final_node(j)))
    }
}

/// Viterbi over the unrolled trellis, all start nodes at cost 0.
pub fn phase1(u: &UnrolledTrellis, s: &SoftInput) -> Phase1Result {
    let num = u.num_nodes();
    let l = u.num_subtrellises();
    let mut cost1 = vec![f64::INFINITY; num];
    let mut parent = vec![NO_EDGE; num];
    let mut origin = vec![0u32; num];
    for i in 0..l {
        let st = u.start(i) as usize;
        cost1[st] = 0.0;
        origin[st] = i as u32;
    }
    let mut updates = 0;
    for layer in 1..=u.depth() {
        for v in u.layer_nodes(layer) {
            let mut best = f64::INFINITY;
            let mut best_edge = NO_EDGE;
            for &e in u.in_edges(v) {
                let ed = u.edge(e);
                let c = cost1[ed.from as usize] + s.cost(ed.section as usize, ed.label);
                if c < best {
                    best = c;
                    best_edge = e;
                }
            }
            let vi = v as usize;
            cost1[vi] = best;
            parent[vi] = best_edge;
            origin[vi] = origin[u.edge(best_edge).from as usize];
            updates += 1;
        }
    }
    let trellis_metric: Vec<f64> = (0..l).map(|j| cost1[u.final_node(j) as usize]).collect();
    let codeword_survivor: Vec<bool> = (0..l)
        .map(|j| origin[u.final_node(j) as usize] as usize == j)
        .collect();
    let mut low = f64::INFINITY;
    let mut low_trellis = None;
    for j in 0..l {
        if codeword_survivor[j] && trellis_metric[j] < low {
            low = trellis_metric[j];
            low_trellis = Some(j);
        }
    }
    Phase1Result {
        cost1,
        parent,
        origin,
        trellis_metric,
        codeword_survivor,
        low,
        low_trellis,
        updates,
    }
}

/// Unit of Phase-2 scheduling; ordered by `(metric, trellis_no, node)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeapEntry {
    pub trellis_no: u32,
    pub node: u32,
    pub depth: u32,
    pub metric: f64,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.metric
            .total_cmp(&other.metric)
            .then(self.trellis_no.cmp(&other.trellis_no))
            .then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One Phase-2 node closure, in the order it happened.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    pub trellis_no: u32,
    pub node: u32,
    pub depth: u32,
    pub metric: f64,
    /// `true` when popped from the heap, `false` when closed directly
    /// because its metric did not rise.
    pub from_heap: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WinnerSource {
    /// Step 1: the cheapest Phase-1 survivor was already a codeword.
    Phase1,
    /// A final node was closed in Phase 2.
    Phase2,
    /// The heap emptied and the best codeword survivor was output.
    Low,
    /// An approximate search emptied its heap with no codeword survivor
    /// available; an exact search was run instead.
    ExactFallback,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecodeStats {
    /// Phase-1 updates plus Phase-2 expansions.
    pub node_computations: usize,
    pub phase1_updates: usize,
    pub phase2_expansions: usize,
    pub heap_insertions: usize,
    pub max_heap_size: usize,
    pub residual_trellises: usize,
    /// Number of `(subtrellis, node)` cost records touched in Phase 2.
    pub store_size: usize,
}

#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub codeword: BitVec,
    /// Sum of branch costs along the returned path.
    pub cost: f64,
    pub mode: Mode,
    /// Subtrellis whose `(s_i, f_i)` path was returned.
    pub subtrellis: usize,
    /// Edge ids of the returned path in the unrolled trellis.
    pub path: Vec<u32>,
    pub winner_source: WinnerSource,
    pub stats: DecodeStats,
    /// Phase-2 closures, recorded only when tracing is enabled.
    pub trace: Option<Vec<Closure>>,
}

impl DecodeResult {
    /// Unrolled node ids visited by the returned path, start node first.
    pub fn path_nodes(&self, u: &UnrolledTrellis) -> Vec<u32> {
        let mut nodes = vec![u.start(self.subtrellis)];
        nodes.extend(self.path.iter().map(|&e| u.edge(e).to));
        nodes
    }
}

#[derive(Clone, Copy, Debug)]
struct StoreEntry {
    cost: f64,
    metric: f64,
    via: u32,
}

#[inline]
fn key(i: usize, node: u32) -> u64 {
    ((i as u64) << 32) | node as u64
}

enum SearchOutcome {
    Found { trellis: usize },
    Exhausted,
}

/// Per-frame scratch for Phase 2. Reused across frames by [`Decoder`].
#[derive(Default)]
struct Search {
    store: HashMap<u64, StoreEntry>,
    pair_closed: HashSet<u64>,
    node_closed: Vec<u8>,
    heap: BinaryHeap<Reverse<HeapEntry>>,
    stack: Vec<(usize, u32, f64)>,
    trace: Option<Vec<Closure>>,
    expansions: usize,
    insertions: usize,
    max_heap: usize,
}

impl Search {
    fn reset(&mut self, num_nodes: usize, trace: bool) {
        self.store.clear();
        self.pair_closed.clear();
        self.node_closed.clear();
        self.node_closed.resize(num_nodes, 0);
        self.heap.clear();
        self.stack.clear();
        self.trace = trace.then(Vec::new);
        self.expansions = 0;
        self.insertions = 0;
        self.max_heap = 0;
    }

    #[inline]
    fn blocked(&self, mode: Mode, i: usize, v: u32) -> bool {
        match mode {
            Mode::Exact => self.pair_closed.contains(&key(i, v)),
            Mode::Approx1 => self.node_closed[v as usize] >= 1,
            Mode::Approx2 => {
                self.node_closed[v as usize] >= 2 || self.pair_closed.contains(&key(i, v))
            }
        }
    }

    #[inline]
    fn close(&mut self, u: &UnrolledTrellis, i: usize, v: u32, metric: f64, from_heap: bool) {
        self.pair_closed.insert(key(i, v));
        let c = &mut self.node_closed[v as usize];
        *c = c.saturating_add(1);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(Closure {
                trellis_no: i as u32,
                node: v,
                depth: u.layer(v) as u32,
                metric,
                from_heap,
            });
        }
    }

    fn push(&mut self, entry: HeapEntry) {
        self.heap.push(Reverse(entry));
        self.insertions += 1;
        self.max_heap = self.max_heap.max(self.heap.len());
    }

    fn run(
        &mut self,
        u: &UnrolledTrellis,
        s: &SoftInput,
        p1: &Phase1Result,
        residual: &[usize],
        mode: Mode,
    ) -> SearchOutcome {
        let low = p1.low;
        let tm = &p1.trellis_metric;
        for &i in residual {
            let st = u.start(i);
            self.store.insert(
                key(i, st),
                StoreEntry {
                    cost: 0.0,
                    metric: tm[i],
                    via: NO_EDGE,
                },
            );
            self.push(HeapEntry {
                trellis_no: i as u32,
                node: st,
                depth: 0,
                metric: tm[i],
            });
        }
        while let Some(Reverse(h)) = self.heap.pop() {
            let i = h.trellis_no as usize;
            if self.blocked(mode, i, h.node) {
                continue;
            }
            self.close(u, i, h.node, h.metric, true);
            if u.is_final(h.node) {
                return SearchOutcome::Found { trellis: i };
            }
            self.stack.push((i, h.node, h.metric));
            // Successors whose metric does not rise are closed and expanded
            // depth-first without going through the heap.
            while let Some((i, x, m)) = self.stack.pop() {
                self.expansions += 1;
                let cx = self.store[&key(i, x)].cost;
                for &e in u.out_edges(x) {
                    let ed = u.edge(e);
                    let y = ed.to;
                    if !u.is_member(y, i) || self.blocked(mode, i, y) {
                        continue;
                    }
                    let newcost = cx + s.cost(ed.section as usize, ed.label);
                    let (improved, my) = match self.store.entry(key(i, y)) {
                        Entry::Occupied(mut o) => {
                            let entry = o.get_mut();
                            if newcost < entry.cost {
                                entry.cost = newcost;
                                entry.via = e;
                                entry.metric = newcost + tm[i] - p1.cost1[y as usize];
                                (true, entry.metric)
                            } else {
                                (false, entry.metric)
                            }
                        }
                        Entry::Vacant(v) => {
                            let metric = newcost + tm[i] - p1.cost1[y as usize];
                            v.insert(StoreEntry {
                                cost: newcost,
                                metric,
                                via: e,
                            });
                            (true, metric)
                        }
                    };
                    if my <= m + EPS {
                        self.close(u, i, y, my, false);
                        if u.is_final(y) {
                            return SearchOutcome::Found { trellis: i };
                        }
                        self.stack.push((i, y, my));
                    } else if improved && my < low {
                        self.push(HeapEntry {
                            trellis_no: i as u32,
                            node: y,
                            depth: u.layer(y) as u32,
                            metric: my,
                        });
                    }
                }
            }
        }
        SearchOutcome::Exhausted
    }

    fn winning_path(&self, u: &UnrolledTrellis, i: usize) -> Vec<u32> {
        let mut edges = Vec::with_capacity(u.depth());
        let mut cur = u.final_node(i);
        loop {
            let via = self.store[&key(i, cur)].via;
            if via == NO_EDGE {
                break;
            }
            edges.push(via);
            cur = u.edge(via).from;
        }
        edges.reverse();
        edges
    }
}

/// Decoder bound to one unrolled trellis; owns reusable per-frame scratch.
pub struct Decoder<'a> {
    u: &'a UnrolledTrellis,
    trace: bool,
    search: Search,
}

impl<'a> Decoder<'a> {
    pub fn new(u: &'a UnrolledTrellis) -> Self {
        Self {
            u,
            trace: false,
            search: Search::default(),
        }
    }

    /// Record every Phase-2 closure in [`DecodeResult::trace`].
    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn unrolled(&self) -> &'a UnrolledTrellis {
        self.u
    }

    /// Branch costs, Phase 1 and Phase 2 for a received vector.
    pub fn decode(&mut self, r: &[f64], mode: Mode) -> Result<DecodeResult> {
        let s = self.soft_input(r)?;
        let p1 = phase1(self.u, &s);
        Ok(self.phase2(&s, &p1, mode))
    }

    pub fn soft_input(&self, r: &[f64]) -> Result<SoftInput> {
        crate::channel::branch_costs_for_widths(self.u.widths(), r)
    }

    /// Second phase on an already computed Phase-1 result.
    pub fn phase2(&mut self, s: &SoftInput, p1: &Phase1Result, mode: Mode) -> DecodeResult {
        let u = self.u;
        let l = u.num_subtrellises();
        let mut stats = DecodeStats {
            phase1_updates: p1.updates,
            ..Default::default()
        };
        let phase1_winner = |j: usize, source: WinnerSource, stats: DecodeStats| {
            let path = p1.survivor_edges(u, u.final_node(j));
            DecodeResult {
                codeword: u.path_label(&path),
                cost: p1.trellis_metric[j],
                mode,
                subtrellis: j,
                path,
                winner_source: source,
                stats,
                trace: None,
            }
        };

        let min_metric = p1
            .trellis_metric
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if let Some(j) = p1.low_trellis {
            if p1.low <= min_metric {
                stats.node_computations = stats.phase1_updates;
                let mut res = phase1_winner(j, WinnerSource::Phase1, stats);
                res.trace = self.trace.then(Vec::new);
                return res;
            }
        }

        let mut residual: Vec<usize> = (0..l)
            .filter(|&j| !p1.codeword_survivor[j] && p1.trellis_metric[j] < p1.low)
            .collect();
        residual.sort_by(|&a, &b| p1.trellis_metric[a].total_cmp(&p1.trellis_metric[b]).then(a.cmp(&b)));
        stats.residual_trellises = residual.len();

        self.search.reset(u.num_nodes(), self.trace);
        let mut outcome = self.search.run(u, s, p1, &residual, mode);
        let mut source = WinnerSource::Phase2;
        if matches!(outcome, SearchOutcome::Exhausted) && p1.low_trellis.is_none() {
            // Only reachable in the approximate modes: every residual search
            // was cut off by closures of other subtrellises.
            debug_assert_ne!(mode, Mode::Exact);
            let spent = (
                self.search.expansions,
                self.search.insertions,
                self.search.max_heap,
            );
            self.search.reset(u.num_nodes(), self.trace);
            self.search.expansions = spent.0;
            self.search.insertions = spent.1;
            self.search.max_heap = spent.2;
            outcome = self.search.run(u, s, p1, &residual, Mode::Exact);
            source = WinnerSource::ExactFallback;
        }
        stats.phase2_expansions = self.search.expansions;
        stats.heap_insertions = self.search.insertions;
        stats.max_heap_size = self.search.max_heap;
        stats.store_size = self.search.store.len();
        stats.node_computations = stats.phase1_updates + stats.phase2_expansions;
        let trace = self.search.trace.take();

        match outcome {
            SearchOutcome::Found { trellis } => {
                let path = self.search.winning_path(u, trellis);
                let cost = self.search.store[&key(trellis, u.final_node(trellis))].cost;
                DecodeResult {
                    codeword: u.path_label(&path),
                    cost,
                    mode,
                    subtrellis: trellis,
                    path,
                    winner_source: source,
                    stats,
                    trace,
                }
            }
            SearchOutcome::Exhausted => {
                let j = p1
                    .low_trellis
                    .expect("exact search always reaches a final node");
                let mut res = phase1_winner(j, WinnerSource::Low, stats);
                res.trace = trace;
                res
            }
        }
    }
}

/// One-shot decode of `r` on `t`.
pub fn decode(t: &TailBitingTrellis, r: &[f64], mode: Mode) -> Result<DecodeResult> {
    let s = branch_costs(t, r)?;
    let u = t.unroll();
    let p1 = phase1(&u, &s);
    Ok(Decoder::new(&u).phase2(&s, &p1, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{add_awgn, modulate};
    use crate::gf2::SpannedMatrix;
    use crate::trellis::from_spanned_matrix;

    fn hamming_trellis() -> TailBitingTrellis {
        let g = SpannedMatrix::from_printed(
            &[
                ("1000110", 1, 6),
                ("0010111", 3, 7),
                ("0100011", 6, 2),
                ("0111001", 7, 4),
            ],
            1,
        )
        .unwrap();
        from_spanned_matrix(&g).unwrap()
    }

    #[test]
    fn zero_noise_all_zero_frame() {
        let t = hamming_trellis();
        let u = t.unroll();
        let r = vec![1.0; 7];
        let s = branch_costs(&t, &r).unwrap();
        let p1 = phase1(&u, &s);
        assert_eq!(p1.trellis_metric[0], 0.0);
        assert_eq!(p1.low, 0.0);
        assert!(p1.codeword_survivor[0]);
        assert_eq!(p1.updates, t.total_states());
        let res = Decoder::new(&u).phase2(&s, &p1, Mode::Exact);
        assert_eq!(res.winner_source, WinnerSource::Phase1);
        assert_eq!(res.stats.phase2_expansions, 0);
        assert_eq!(res.stats.node_computations, t.total_states());
        assert!(res.codeword.is_zero());
    }

    #[test]
    fn length_mismatch() {
        let t = hamming_trellis();
        assert!(matches!(
            decode(&t, &[0.0; 6], Mode::Exact),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn cost_matches_path_and_trace_is_monotone() {
        let t = hamming_trellis();
        let u = t.unroll();
        let mut dec = Decoder::new(&u).with_trace(true);
        for seed in 0..2000u64 {
            let r = add_awgn(&modulate(&BitVec::zeros(7)), 0.0, seed);
            for mode in Mode::ALL {
                let res = dec.decode(&r, mode).unwrap();
                let s = dec.soft_input(&r).unwrap();
                let sum: f64 = res
                    .path
                    .iter()
                    .map(|&e| s.cost(u.edge(e).section as usize, u.edge(e).label))
                    .sum();
                assert!((sum - res.cost).abs() < 1e-9);
                let trace = res.trace.unwrap();
                for w in trace.windows(2) {
                    assert!(w[1].metric >= w[0].metric - EPS);
                }
            }
        }
    }

    #[test]
    fn heap_entry_order() {
        let a = HeapEntry { trellis_no: 1, node: 5, depth: 0, metric: 1.0 };
        let b = HeapEntry { trellis_no: 0, node: 9, depth: 0, metric: 1.0 };
        let c = HeapEntry { trellis_no: 0, node: 1, depth: 0, metric: 0.5 };
        let mut v = vec![a, b, c];
        v.sort();
        assert_eq!(v, vec![c, b, a]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("approx2".parse::<Mode>().unwrap(), Mode::Approx2);
        assert!("fast".parse::<Mode>().is_err());
    }
}
