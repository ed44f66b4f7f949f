//! Tail-biting trellises: elementary trellises, the trellis product,
//! subtrellis membership, merging intervals, and the unrolled layered form
//! consumed by the decoder.
//!
//! Vertex class `V_t` holds the states at time index `t`; section `t`
//! carries edges from `V_t` to `V_{(t+1) mod n}` labelled with `b_t` code
//! bits. Labels are packed into a `u32` with bit `k` holding the `k`-th
//! symbol of the section. Subtrellis `i` is the one whose start state is
//! node `i` of `V_0`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::{cyclic_runs, BitVec, Interval, Span, SpannedMatrix};

/// Widest section label supported (branch cost tables hold `2^width` entries).
pub const MAX_SECTION_WIDTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: u32,
    pub label: u32,
    pub to: u32,
}

impl Edge {
    pub fn new(from: u32, label: u32, to: u32) -> Self {
        Self { from, label, to }
    }

    fn sort_key(&self) -> (u32, u32, u32) {
        (self.to, self.from, self.label)
    }
}

/// Per-node subtrellis membership bit vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipTable {
    subtrellises: usize,
    words: usize,
    offsets: Vec<usize>,
    bits: Vec<u64>,
}

impl MembershipTable {
    pub fn num_subtrellises(&self) -> usize {
        self.subtrellises
    }

    pub fn words(&self, t: usize, v: usize) -> &[u64] {
        let base = (self.offsets[t] + v) * self.words;
        &self.bits[base..base + self.words]
    }

    pub fn contains(&self, t: usize, v: usize, i: usize) -> bool {
        (self.words(t, v)[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Subtrellis ids whose cycles pass through node `v` of `V_t`.
    pub fn members(&self, t: usize, v: usize) -> Vec<usize> {
        (0..self.subtrellises)
            .filter(|&i| self.contains(t, v, i))
            .collect()
    }

    /// Storage used by the bit vectors, in bits.
    pub fn size_bits(&self) -> usize {
        self.bits.len() * 64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailBitingTrellis {
    widths: Vec<usize>,
    v_counts: Vec<usize>,
    sections: Vec<Vec<Edge>>,
    membership: MembershipTable,
}

fn bitset_or(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn bitset_any_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

impl TailBitingTrellis {
    /// Validates structure and reducedness and computes membership.
    pub fn new(widths: Vec<usize>, v_counts: Vec<usize>, mut sections: Vec<Vec<Edge>>) -> Result<Self> {
        let n = widths.len();
        if n == 0 {
            return Err(Error::Malformed {
                line: 0,
                msg: "trellis needs at least one section".into(),
            });
        }
        if v_counts.len() != n || sections.len() != n {
            return Err(Error::Malformed {
                line: 0,
                msg: format!(
                    "inconsistent depth: {} widths, {} vertex classes, {} sections",
                    n,
                    v_counts.len(),
                    sections.len()
                ),
            });
        }
        if let Some(t) = v_counts.iter().position(|&c| c == 0) {
            return Err(Error::Malformed {
                line: 0,
                msg: format!("vertex class {t} is empty"),
            });
        }
        for (t, sec) in sections.iter_mut().enumerate() {
            let w = widths[t];
            if w == 0 || w > MAX_SECTION_WIDTH {
                return Err(Error::WidthMismatch { section: t });
            }
            let next = v_counts[(t + 1) % n];
            for e in sec.iter() {
                if e.from as usize >= v_counts[t] {
                    return Err(Error::DanglingNode {
                        section: t,
                        node: e.from,
                    });
                }
                if e.to as usize >= next {
                    return Err(Error::DanglingNode {
                        section: t,
                        node: e.to,
                    });
                }
                if e.label >> w != 0 {
                    return Err(Error::Malformed {
                        line: 0,
                        msg: format!("label {:#b} wider than section {t} width {w}", e.label),
                    });
                }
            }
            sec.sort_by_key(Edge::sort_key);
            if sec.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::DuplicateEdge { section: t });
            }
        }
        let membership = Self::compute_membership(&v_counts, &sections)?;
        Ok(Self {
            widths,
            v_counts,
            sections,
            membership,
        })
    }

    /// Forward reachability from each start node and backward reachability
    /// to each final node over the unrolled graph; membership is their
    /// intersection. Fails if any node or edge lies on no start-to-own-final
    /// cycle.
    fn compute_membership(v_counts: &[usize], sections: &[Vec<Edge>]) -> Result<MembershipTable> {
        let n = v_counts.len();
        let l = v_counts[0];
        let words = l.div_ceil(64);
        // layer t in 0..=n; layer n mirrors V_0
        let count = |t: usize| if t == n { l } else { v_counts[t] };
        let mut fwd: Vec<Vec<u64>> = (0..=n).map(|t| vec![0u64; count(t) * words]).collect();
        let mut bwd: Vec<Vec<u64>> = (0..=n).map(|t| vec![0u64; count(t) * words]).collect();
        for i in 0..l {
            fwd[0][i * words + i / 64] |= 1 << (i % 64);
            bwd[n][i * words + i / 64] |= 1 << (i % 64);
        }
        for t in 0..n {
            let (head, tail) = fwd.split_at_mut(t + 1);
            let (src, dst) = (&head[t], &mut tail[0]);
            for e in &sections[t] {
                let (f, to) = (e.from as usize, e.to as usize);
                bitset_or(&mut dst[to * words..(to + 1) * words], &src[f * words..(f + 1) * words]);
            }
        }
        for t in (0..n).rev() {
            let (head, tail) = bwd.split_at_mut(t + 1);
            let (dst, src) = (&mut head[t], &tail[0]);
            for e in &sections[t] {
                let (f, to) = (e.from as usize, e.to as usize);
                bitset_or(&mut dst[f * words..(f + 1) * words], &src[to * words..(to + 1) * words]);
            }
        }
        for (t, sec) in sections.iter().enumerate() {
            for e in sec {
                let (f, to) = (e.from as usize, e.to as usize);
                if !bitset_any_and(
                    &fwd[t][f * words..(f + 1) * words],
                    &bwd[t + 1][to * words..(to + 1) * words],
                ) {
                    return Err(Error::NotReduced(format!(
                        "edge {}->{} in section {t} lies on no cycle",
                        e.from, e.to
                    )));
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for &c in v_counts {
            offsets.push(acc);
            acc += c;
        }
        offsets.push(acc);
        let mut bits = vec![0u64; acc * words];
        for t in 0..n {
            for v in 0..v_counts[t] {
                let dst = &mut bits[(offsets[t] + v) * words..(offsets[t] + v + 1) * words];
                if t == 0 {
                    // a start node belongs to its own subtrellis iff it
                    // closes a cycle
                    if (bwd[0][v * words + v / 64] >> (v % 64)) & 1 == 1 {
                        dst[v / 64] |= 1 << (v % 64);
                    }
                } else {
                    for k in 0..words {
                        dst[k] = fwd[t][v * words + k] & bwd[t][v * words + k];
                    }
                }
                if dst.iter().all(|&w| w == 0) {
                    return Err(Error::NotReduced(format!(
                        "node {v} at time {t} lies on no cycle"
                    )));
                }
            }
        }
        Ok(MembershipTable {
            subtrellises: l,
            words,
            offsets,
            bits,
        })
    }

    /// One state per time index and a single all-zero edge per section.
    pub fn trivial(n: usize) -> Self {
        Self::new(
            vec![1; n],
            vec![1; n],
            vec![vec![Edge::new(0, 0, 0)]; n],
        )
        .expect("trivial trellis is valid")
    }

    pub fn n(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Code length in bits.
    pub fn total_width(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn v_counts(&self) -> &[usize] {
        &self.v_counts
    }

    /// `V`, the number of states of the tail-biting trellis.
    pub fn total_states(&self) -> usize {
        self.v_counts.iter().sum()
    }

    pub fn total_edges(&self) -> usize {
        self.sections.iter().map(Vec::len).sum()
    }

    /// `L`, the number of start states (and subtrellises).
    pub fn num_subtrellises(&self) -> usize {
        self.v_counts[0]
    }

    pub fn sections(&self) -> &[Vec<Edge>] {
        &self.sections
    }

    pub fn section(&self, t: usize) -> &[Edge] {
        &self.sections[t]
    }

    pub fn membership(&self) -> &MembershipTable {
        &self.membership
    }

    /// Product trellis: states are pairs, labels add.
    pub fn product(&self, other: &TailBitingTrellis) -> Result<TailBitingTrellis> {
        if self.n() != other.n() {
            return Err(Error::DepthMismatch(self.n(), other.n()));
        }
        if let Some(t) = (0..self.n()).find(|&t| self.widths[t] != other.widths[t]) {
            return Err(Error::WidthMismatch { section: t });
        }
        let n = self.n();
        let v_counts: Vec<usize> = (0..n)
            .map(|t| self.v_counts[t] * other.v_counts[t])
            .collect();
        let sections = (0..n)
            .map(|t| {
                let c_here = other.v_counts[t] as u32;
                let c_next = other.v_counts[(t + 1) % n] as u32;
                let mut out = Vec::with_capacity(self.sections[t].len() * other.sections[t].len());
                for a in &self.sections[t] {
                    for b in &other.sections[t] {
                        out.push(Edge::new(
                            a.from * c_here + b.from,
                            a.label ^ b.label,
                            a.to * c_next + b.to,
                        ));
                    }
                }
                out
            })
            .collect();
        TailBitingTrellis::new(self.widths.clone(), v_counts, sections)
    }

    /// Merges each run of `group` consecutive sections into one section whose
    /// label is the concatenation of the merged labels.
    pub fn merge_sections(&self, group: usize) -> Result<TailBitingTrellis> {
        let n = self.n();
        if group == 0 || !n.is_multiple_of(group) {
            return Err(Error::Config(format!(
                "cannot merge {n} sections in groups of {group}"
            )));
        }
        let m = n / group;
        let mut widths = Vec::with_capacity(m);
        let mut v_counts = Vec::with_capacity(m);
        let mut sections = Vec::with_capacity(m);
        for big in 0..m {
            let first = big * group;
            widths.push(self.widths[first..first + group].iter().sum());
            v_counts.push(self.v_counts[first]);
            let mut edges = BTreeSet::new();
            for start in 0..self.v_counts[first] as u32 {
                // (node, label so far, bits so far, subtrellises containing
                // every node so far); a segment leaving all subtrellises
                // would compose into an edge on no cycle
                let mask = self.membership.words(first, start as usize).to_vec();
                let mut frontier = vec![(start, 0u32, 0usize, mask)];
                for t in first..first + group {
                    let mut next = Vec::new();
                    for (node, label, shift, mask) in &frontier {
                        for e in self.sections[t].iter().filter(|e| e.from == *node) {
                            let to_words = self.membership.words((t + 1) % n, e.to as usize);
                            let m: Vec<u64> = mask.iter().zip(to_words).map(|(a, b)| a & b).collect();
                            if m.iter().any(|&w| w != 0) {
                                next.push((e.to, label | (e.label << shift), shift + self.widths[t], m));
                            }
                        }
                    }
                    frontier = next;
                }
                for (end, label, _, _) in frontier {
                    edges.insert(Edge::new(start, label, end));
                }
            }
            sections.push(edges.into_iter().collect());
        }
        TailBitingTrellis::new(widths, v_counts, sections)
    }

    /// Maximal time interval on which subtrellises `i` and `j` have exactly
    /// the same states, or `None` if they never do.
    pub fn merging_interval(&self, i: usize, j: usize) -> Result<Option<Interval>> {
        let l = self.num_subtrellises();
        for idx in [i, j] {
            if idx >= l {
                return Err(Error::SubtrellisOutOfRange { index: idx, count: l });
            }
        }
        if i == j {
            return Err(Error::SameSubtrellis(i));
        }
        let mb = &self.membership;
        let mask: Vec<bool> = (0..self.n())
            .map(|t| {
                (0..self.v_counts[t]).all(|v| mb.contains(t, v, i) == mb.contains(t, v, j))
                    && (0..self.v_counts[t]).any(|v| mb.contains(t, v, i))
            })
            .collect();
        Ok(cyclic_runs(&mask).into_iter().next())
    }

    pub fn unroll(&self) -> UnrolledTrellis {
        UnrolledTrellis::new(self)
    }

    /// Serializes to the trellis interchange text format.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        writeln!(s, "n {}", self.n()).unwrap();
        writeln!(s, "section_widths {}", join(&self.widths)).unwrap();
        writeln!(s, "V_counts {}", join(&self.v_counts)).unwrap();
        for (t, sec) in self.sections.iter().enumerate() {
            for e in sec {
                let label: String = (0..self.widths[t])
                    .map(|k| if (e.label >> k) & 1 == 1 { '1' } else { '0' })
                    .collect();
                writeln!(s, "{t} {} {label} {}", e.from, e.to).unwrap();
            }
        }
        s
    }

    /// Parses the trellis interchange text format: `n`, `section_widths`
    /// and `V_counts` header lines followed by one `t from label to` edge
    /// per line, with labels written as bit strings in symbol order.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut widths: Option<Vec<usize>> = None;
        let mut v_counts: Option<Vec<usize>> = None;
        let mut sections: Vec<Vec<Edge>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |msg: String| Error::Malformed { line: line_no, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let ints = |toks: &[&str]| -> Result<Vec<usize>> {
                toks.iter()
                    .map(|t| t.parse().map_err(|_| malformed(format!("bad integer '{t}'"))))
                    .collect()
            };
            match toks[0] {
                "n" => {
                    let v = ints(&toks[1..])?;
                    if v.len() != 1 {
                        return Err(malformed("expected 'n <int>'".into()));
                    }
                    n = Some(v[0]);
                    sections = vec![Vec::new(); v[0]];
                }
                "section_widths" => widths = Some(ints(&toks[1..])?),
                "V_counts" => v_counts = Some(ints(&toks[1..])?),
                _ => {
                    let (Some(n), Some(widths)) = (n, widths.as_ref()) else {
                        return Err(malformed("edge before n/section_widths header".into()));
                    };
                    if toks.len() != 4 {
                        return Err(malformed("expected 't from label to'".into()));
                    }
                    let t: usize = toks[0]
                        .parse()
                        .map_err(|_| malformed(format!("bad section '{}'", toks[0])))?;
                    if t >= n || widths.len() != n {
                        return Err(malformed(format!("section {t} out of range")));
                    }
                    let from: u32 = toks[1]
                        .parse()
                        .map_err(|_| malformed(format!("bad node '{}'", toks[1])))?;
                    let to: u32 = toks[3]
                        .parse()
                        .map_err(|_| malformed(format!("bad node '{}'", toks[3])))?;
                    let bits = toks[2];
                    if bits.len() != widths[t] {
                        return Err(malformed(format!(
                            "label '{bits}' does not match width {}",
                            widths[t]
                        )));
                    }
                    let mut label = 0u32;
                    for (k, ch) in bits.chars().enumerate() {
                        match ch {
                            '0' => {}
                            '1' => label |= 1 << k,
                            _ => return Err(malformed(format!("bad label '{bits}'"))),
                        }
                    }
                    sections[t].push(Edge::new(from, label, to));
                }
            }
        }
        let missing = |what: &str| Error::Malformed {
            line: 0,
            msg: format!("missing {what} header"),
        };
        let n = n.ok_or_else(|| missing("n"))?;
        let widths = widths.ok_or_else(|| missing("section_widths"))?;
        let v_counts = v_counts.ok_or_else(|| missing("V_counts"))?;
        if widths.len() != n || v_counts.len() != n {
            return Err(Error::Malformed {
                line: 0,
                msg: "header lengths disagree with n".into(),
            });
        }
        Self::new(widths, v_counts, sections)
    }
}

/// Elementary trellis of the one-dimensional code generated by `row`.
pub fn elementary_trellis(row: &BitVec, span: &Span) -> Result<TailBitingTrellis> {
    if row.is_zero() {
        return Err(Error::ZeroRow);
    }
    span.validate(row)?;
    let n = row.len();
    let active: Vec<bool> = (0..n).map(|t| span.is_active(t, n)).collect();
    let v_counts = active.iter().map(|&a| if a { 2 } else { 1 }).collect();
    let sections = (0..n)
        .map(|t| {
            let mut edges: Vec<Edge> = (0..2u32)
                .map(|a| {
                    Edge::new(
                        if active[t] { a } else { 0 },
                        a & row.get(t) as u32,
                        if active[(t + 1) % n] { a } else { 0 },
                    )
                })
                .collect();
            edges.dedup();
            edges
        })
        .collect();
    TailBitingTrellis::new(vec![1; n], v_counts, sections)
}

/// Product of the elementary trellises of all rows of `g`. Start state `i`
/// has bit `b` set iff the `b`-th circular row is active at time 0, so
/// start 0 is the subtrellis of the linear-span subcode.
pub fn from_spanned_matrix(g: &SpannedMatrix) -> Result<TailBitingTrellis> {
    let mut acc = TailBitingTrellis::trivial(g.n());
    for (row, span) in g.rows() {
        let elem = elementary_trellis(row, span)?;
        acc = elem.product(&acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnrolledEdge {
    pub from: u32,
    pub to: u32,
    pub label: u32,
    pub section: u32,
}

/// Acyclic layered form of a tail-biting trellis with `n + 1` layers:
/// layer 0 holds the start copies `s_i` of `V_0`, layer `n` the final copies
/// `f_i`, and layer `t` in between is `V_t`. Node ids are global and dense.
#[derive(Clone, Debug)]
pub struct UnrolledTrellis {
    n: usize,
    subtrellises: usize,
    total_states: usize,
    widths: Vec<usize>,
    bit_offsets: Vec<usize>,
    layer_start: Vec<u32>,
    node_layer: Vec<u32>,
    edges: Vec<UnrolledEdge>,
    out_start: Vec<u32>,
    out_edges: Vec<u32>,
    in_start: Vec<u32>,
    in_edges: Vec<u32>,
    words: usize,
    membership: Vec<u64>,
}

impl UnrolledTrellis {
    fn new(t: &TailBitingTrellis) -> Self {
        let n = t.n();
        let l = t.num_subtrellises();
        let mut layer_start = Vec::with_capacity(n + 2);
        let mut acc = 0u32;
        for layer in 0..=n {
            layer_start.push(acc);
            acc += if layer == n { l } else { t.v_counts[layer] } as u32;
        }
        layer_start.push(acc);
        let num_nodes = acc as usize;
        let mut node_layer = vec![0u32; num_nodes];
        for layer in 0..=n {
            for v in layer_start[layer]..layer_start[layer + 1] {
                node_layer[v as usize] = layer as u32;
            }
        }
        let mut edges = Vec::with_capacity(t.total_edges());
        for (s, sec) in t.sections.iter().enumerate() {
            for e in sec {
                edges.push(UnrolledEdge {
                    from: layer_start[s] + e.from,
                    to: layer_start[s + 1] + e.to,
                    label: e.label,
                    section: s as u32,
                });
            }
        }
        let csr = |key: &dyn Fn(&UnrolledEdge) -> u32| {
            let mut start = vec![0u32; num_nodes + 1];
            for e in &edges {
                start[key(e) as usize + 1] += 1;
            }
            for i in 0..num_nodes {
                start[i + 1] += start[i];
            }
            let mut fill = start.clone();
            let mut list = vec![0u32; edges.len()];
            for (id, e) in edges.iter().enumerate() {
                let k = key(e) as usize;
                list[fill[k] as usize] = id as u32;
                fill[k] += 1;
            }
            (start, list)
        };
        let (out_start, out_edges) = csr(&|e| e.from);
        let (in_start, in_edges) = csr(&|e| e.to);

        let words = l.div_ceil(64);
        let mut membership = vec![0u64; num_nodes * words];
        let mb = t.membership();
        for layer in 0..=n {
            let count = (layer_start[layer + 1] - layer_start[layer]) as usize;
            for v in 0..count {
                let g = layer_start[layer] as usize + v;
                let dst = &mut membership[g * words..(g + 1) * words];
                if layer == 0 || layer == n {
                    dst[v / 64] |= 1 << (v % 64);
                } else {
                    dst.copy_from_slice(mb.words(layer, v));
                }
            }
        }
        let mut bit_offsets = Vec::with_capacity(n + 1);
        let mut off = 0;
        for &w in &t.widths {
            bit_offsets.push(off);
            off += w;
        }
        bit_offsets.push(off);
        Self {
            n,
            subtrellises: l,
            total_states: t.total_states(),
            widths: t.widths.clone(),
            bit_offsets,
            layer_start,
            node_layer,
            edges,
            out_start,
            out_edges,
            in_start,
            in_edges,
            words,
            membership,
        }
    }

    /// Number of sections (the final layer index).
    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn num_subtrellises(&self) -> usize {
        self.subtrellises
    }

    pub fn num_nodes(&self) -> usize {
        self.node_layer.len()
    }

    /// `V` of the underlying tail-biting trellis.
    pub fn total_states(&self) -> usize {
        self.total_states
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn bit_offset(&self, section: usize) -> usize {
        self.bit_offsets[section]
    }

    pub fn code_length(&self) -> usize {
        self.bit_offsets[self.n]
    }

    pub fn layer_nodes(&self, layer: usize) -> std::ops::Range<u32> {
        self.layer_start[layer]..self.layer_start[layer + 1]
    }

    #[inline]
    pub fn layer(&self, node: u32) -> usize {
        self.node_layer[node as usize] as usize
    }

    /// Index of `node` within its vertex class.
    #[inline]
    pub fn local(&self, node: u32) -> usize {
        (node - self.layer_start[self.layer(node)]) as usize
    }

    #[inline]
    pub fn start(&self, i: usize) -> u32 {
        self.layer_start[0] + i as u32
    }

    #[inline]
    pub fn final_node(&self, i: usize) -> u32 {
        self.layer_start[self.n] + i as u32
    }

    #[inline]
    pub fn is_final(&self, node: u32) -> bool {
        node >= self.layer_start[self.n]
    }

    #[inline]
    pub fn edge(&self, id: u32) -> &UnrolledEdge {
        &self.edges[id as usize]
    }

    pub fn edges(&self) -> &[UnrolledEdge] {
        &self.edges
    }

    #[inline]
    pub fn out_edges(&self, node: u32) -> &[u32] {
        let n = node as usize;
        &self.out_edges[self.out_start[n] as usize..self.out_start[n + 1] as usize]
    }

    #[inline]
    pub fn in_edges(&self, node: u32) -> &[u32] {
        let n = node as usize;
        &self.in_edges[self.in_start[n] as usize..self.in_start[n + 1] as usize]
    }

    #[inline]
    pub fn is_member(&self, node: u32, i: usize) -> bool {
        (self.membership[node as usize * self.words + i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn members(&self, node: u32) -> Vec<usize> {
        (0..self.subtrellises)
            .filter(|&i| self.is_member(node, i))
            .collect()
    }

    /// Concatenates the labels of a start-to-final edge path into a code
    /// vector.
    pub fn path_label(&self, edge_path: &[u32]) -> BitVec {
        let mut out = BitVec::zeros(self.code_length());
        for &id in edge_path {
            let e = self.edge(id);
            let s = e.section as usize;
            out.insert(self.bit_offsets[s], self.widths[s], e.label);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    /// Every label of a path from start `i` to final `j`, by brute force.
    fn paths(u: &UnrolledTrellis) -> Vec<(usize, usize, BitVec)> {
        fn walk(
            u: &UnrolledTrellis,
            node: u32,
            stack: &mut Vec<u32>,
            start: usize,
            out: &mut Vec<(usize, usize, BitVec)>,
        ) {
            if u.is_final(node) {
                out.push((start, u.local(node), u.path_label(stack)));
                return;
            }
            for &e in u.out_edges(node) {
                stack.push(e);
                walk(u, u.edge(e).to, stack, start, out);
                stack.pop();
            }
        }
        let mut out = Vec::new();
        for i in 0..u.num_subtrellises() {
            walk(u, u.start(i), &mut Vec::new(), i, &mut out);
        }
        out
    }

    fn hamming() -> SpannedMatrix {
        SpannedMatrix::from_printed(
            &[
                ("1000110", 1, 6),
                ("0010111", 3, 7),
                ("0100011", 6, 2),
                ("0111001", 7, 4),
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn elementary_profile_matches_circular_row() {
        let t = elementary_trellis(&bv("0100011"), &Span::circular(5, 1)).unwrap();
        assert_eq!(t.v_counts(), &[2, 2, 1, 1, 1, 1, 2]);
        let labels: BTreeSet<BitVec> = paths(&t.unroll())
            .into_iter()
            .filter(|(i, j, _)| i == j)
            .map(|(_, _, l)| l)
            .collect();
        assert_eq!(labels, [bv("0000000"), bv("0100011")].into_iter().collect());
    }

    #[test]
    fn elementary_weight_one_row() {
        let t = elementary_trellis(&bv("00100"), &Span::linear(2, 2)).unwrap();
        assert_eq!(t.v_counts(), &[1; 5]);
        assert_eq!(t.section(2).len(), 2);
        let labels: BTreeSet<BitVec> = paths(&t.unroll()).into_iter().map(|(_, _, l)| l).collect();
        assert_eq!(labels, [bv("00000"), bv("00100")].into_iter().collect());
    }

    #[test]
    fn elementary_rejects_zero_row() {
        assert_eq!(
            elementary_trellis(&bv("0000"), &Span::linear(0, 0)),
            Err(Error::ZeroRow)
        );
    }

    #[test]
    fn product_multiplies_edge_counts_and_identity() {
        let g = hamming();
        let parts: Vec<TailBitingTrellis> = g
            .rows()
            .iter()
            .map(|(r, s)| elementary_trellis(r, s).unwrap())
            .collect();
        let p = parts[0].product(&parts[2]).unwrap();
        for t in 0..7 {
            assert_eq!(
                p.section(t).len(),
                parts[0].section(t).len() * parts[2].section(t).len()
            );
        }
        let id = parts[3].product(&TailBitingTrellis::trivial(7)).unwrap();
        assert_eq!(id, parts[3]);
        assert!(matches!(
            parts[0].product(&TailBitingTrellis::trivial(6)),
            Err(Error::DepthMismatch(7, 6))
        ));
    }

    #[test]
    fn hamming_trellis_structure() {
        let t = from_spanned_matrix(&hamming()).unwrap();
        assert_eq!(t.num_subtrellises(), 4);
        let u = t.unroll();
        let all = paths(&u);
        let codewords: BTreeSet<BitVec> = all
            .iter()
            .filter(|(i, j, _)| i == j)
            .map(|(_, _, l)| l.clone())
            .collect();
        assert_eq!(codewords.len(), 16);
        assert!(!codewords.contains(&bv("1100110")));
        // printed as (s_2, f_1) with 1-based subtrellis numbering
        assert!(all
            .iter()
            .any(|(i, j, l)| *i == 1 && *j == 0 && *l == bv("1100110")));
    }

    #[test]
    fn membership_of_starts_and_zero_run_sharing() {
        let t = from_spanned_matrix(&hamming()).unwrap();
        let mb = t.membership();
        for i in 0..4 {
            assert_eq!(mb.members(0, i), vec![i]);
        }
        // node 0 at times 2..=5 is on the all-zero path; the coset of
        // 0100011 (subtrellis 1) shares it
        for time in 2..=5 {
            assert!(mb.contains(time, 0, 0) && mb.contains(time, 0, 1));
        }
    }

    #[test]
    fn merging_intervals() {
        let t = from_spanned_matrix(&hamming()).unwrap();
        let iv = t.merging_interval(0, 1).unwrap().unwrap();
        assert!(iv.covers(&Interval::new(2, 5, 7)));
        assert_eq!(t.merging_interval(1, 0).unwrap(), Some(iv));
        assert_eq!(t.merging_interval(2, 2), Err(Error::SameSubtrellis(2)));

        let disjoint = SpannedMatrix::new(
            6,
            vec![
                (bv("100100"), Span::circular(3, 0)),
                (bv("000101"), Span::circular(5, 3)),
            ],
        )
        .unwrap();
        let t = from_spanned_matrix(&disjoint).unwrap();
        assert_eq!(t.merging_interval(1, 2).unwrap(), None);
    }

    #[test]
    fn unrolled_layers() {
        let t = from_spanned_matrix(&hamming()).unwrap();
        let u = t.unroll();
        assert_eq!(u.layer_nodes(0).len(), 4);
        assert_eq!(u.layer_nodes(7).len(), 4);
        assert_eq!(u.num_nodes(), t.total_states() + 4);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let t = from_spanned_matrix(&hamming()).unwrap();
        let text = t.to_text();
        let back = TailBitingTrellis::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);

        let dangling = "n 2\nsection_widths 1 1\nV_counts 1 1\n0 0 0 0\n1 0 0 3\n";
        assert!(matches!(
            TailBitingTrellis::from_text(dangling),
            Err(Error::DanglingNode { section: 1, node: 3 })
        ));
        let orphan = "n 2\nsection_widths 1 1\nV_counts 1 2\n0 0 0 0\n1 0 0 0\n";
        assert!(matches!(
            TailBitingTrellis::from_text(orphan),
            Err(Error::NotReduced(_))
        ));
        assert!(matches!(
            TailBitingTrellis::from_text("n 2\nsection_widths 1 1\nV_counts 1 1\n0 0 01 0\n"),
            Err(Error::Malformed { line: 4, .. })
        ));
    }

    #[test]
    fn merge_sections_preserves_labels() {
        let t = from_spanned_matrix(&hamming()).unwrap();
        assert!(t.merge_sections(2).is_err());
        let g = SpannedMatrix::new(
            6,
            vec![
                (bv("110100"), Span::linear(0, 3)),
                (bv("100011"), Span::circular(4, 0)),
            ],
        )
        .unwrap();
        let fine = from_spanned_matrix(&g).unwrap();
        let coarse = fine.merge_sections(2).unwrap();
        assert_eq!(coarse.widths(), &[2, 2, 2]);
        let set = |t: &TailBitingTrellis| -> BTreeSet<(usize, usize, BitVec)> {
            paths(&t.unroll()).into_iter().collect()
        };
        assert_eq!(set(&fine), set(&coarse));
    }

    #[test]
    fn merge_drops_segments_leaving_every_subtrellis() {
        let g = SpannedMatrix::new(6, vec![("101000".parse().unwrap(), Span::circular(2, 0))]).unwrap();
        let merged = from_spanned_matrix(&g).unwrap().merge_sections(3).unwrap();
        assert_eq!(merged.section(0).len(), 2);
        assert_eq!(merged.total_edges(), 4);
    }
}
