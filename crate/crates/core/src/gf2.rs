//! Binary vectors and matrices over GF(2), row spans, zero runs and the
//! head/tail split of circular rows.
//!
//! All positions are 0-indexed. A row of length `n` occupies symbol positions
//! `0..n`; trellis time indices are also `0..n`, with time `t` sitting just
//! before symbol `t`. A row with symbol span `[lo, hi]` therefore keeps its
//! elementary trellis in a two-state region over the time indices
//! `lo+1 ..= hi` (mod `n`), and its zero run is the complementary time
//! interval `[hi+1, lo]`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of rows [`row_space`] will enumerate.
pub const ROW_SPACE_LIMIT: usize = 24;

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Builds a vector from a slice of 0/1 values; any nonzero byte counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "BitVec length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Copies `width` bits starting at `start` into the low bits of a `u32`
    /// (bit `k` of the result is position `start + k`).
    pub fn extract(&self, start: usize, width: usize) -> u32 {
        (0..width).fold(0u32, |acc, k| acc | ((self.get(start + k) as u32) << k))
    }

    /// Writes the low `width` bits of `value` at `start`.
    pub fn insert(&mut self, start: usize, width: usize, value: u32) {
        for k in 0..width {
            self.set(start + k, (value >> k) & 1 == 1);
        }
    }
}

/// Lexicographic order on the bit sequence, position 0 first.
impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> Ordering {
        for i in 0..self.len.min(other.len) {
            match (self.get(i), other.get(i)) {
                (false, true) => return Ordering::Less,
                (true, false) => return Ordering::Greater,
                _ => {}
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVec::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Error::Malformed {
                        line: 0,
                        msg: format!("invalid bit character '{ch}' in '{s}'"),
                    })
                }
            }
        }
        Ok(v)
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A cyclic interval `{lo, lo+1, ..., hi}` of indices modulo `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
    pub n: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize, n: usize) -> Self {
        debug_assert!(lo < n && hi < n);
        Self { lo, hi, n }
    }

    pub fn full(n: usize) -> Self {
        Self { lo: 0, hi: n - 1, n }
    }

    pub fn len(&self) -> usize {
        (self.hi + self.n - self.lo) % self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wraps(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, t: usize) -> bool {
        if self.lo <= self.hi {
            self.lo <= t && t <= self.hi
        } else {
            t >= self.lo || t <= self.hi
        }
    }

    /// Whether every element of `other` lies in `self`.
    pub fn covers(&self, other: &Interval) -> bool {
        other.iter().all(|t| self.contains(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let (lo, n) = (self.lo, self.n);
        (0..self.len()).map(move |k| (lo + k) % n)
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for t in self.iter() {
            m[t] = true;
        }
        m
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Maximal cyclic runs of `true` in `mask`, longest first (ties by start).
pub fn cyclic_runs(mask: &[bool]) -> Vec<Interval> {
    let n = mask.len();
    if n == 0 {
        return Vec::new();
    }
    if mask.iter().all(|&b| b) {
        return vec![Interval::full(n)];
    }
    let mut runs = Vec::new();
    for start in 0..n {
        let prev = (start + n - 1) % n;
        if mask[start] && !mask[prev] {
            let mut len = 0;
            while mask[(start + len) % n] {
                len += 1;
            }
            runs.push(Interval::new(start, (start + len - 1) % n, n));
        }
    }
    runs.sort_by(|a, b| b.len().cmp(&a.len()).then(a.lo.cmp(&b.lo)));
    runs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpanKind {
    Linear,
    Circular,
}

/// Symbol span of a generator row, 0-indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
    pub kind: SpanKind,
}

impl Span {
    pub fn linear(lo: usize, hi: usize) -> Self {
        Self {
            lo,
            hi,
            kind: SpanKind::Linear,
        }
    }

    pub fn circular(lo: usize, hi: usize) -> Self {
        Self {
            lo,
            hi,
            kind: SpanKind::Circular,
        }
    }

    /// The smallest linear span of a nonzero row.
    pub fn minimal_linear(row: &BitVec) -> Option<Self> {
        Some(Self::linear(row.first_one()?, row.last_one()?))
    }

    /// Symbol positions covered by the span.
    pub fn positions(&self, n: usize) -> Interval {
        Interval::new(self.lo, self.hi, n)
    }

    /// Time indices at which the elementary trellis of the row has two
    /// states. `None` for a linear span of a single position.
    pub fn active_times(&self, n: usize) -> Option<Interval> {
        if self.lo == self.hi && self.kind == SpanKind::Linear {
            return None;
        }
        Some(Interval::new((self.lo + 1) % n, self.hi, n))
    }

    pub fn is_active(&self, t: usize, n: usize) -> bool {
        self.active_times(n).is_some_and(|iv| iv.contains(t))
    }

    /// Checks the span against `row`: endpoints nonzero, support inside,
    /// and `lo <= hi` exactly when the span is linear.
    pub fn validate(&self, row: &BitVec) -> Result<()> {
        let n = row.len();
        let bad = |reason| Error::InvalidSpan {
            row: row.to_string(),
            lo: self.lo,
            hi: self.hi,
            reason,
        };
        if self.lo >= n || self.hi >= n {
            return Err(bad("span endpoint out of range"));
        }
        match self.kind {
            SpanKind::Linear if self.lo > self.hi => {
                return Err(bad("linear span requires lo <= hi"))
            }
            SpanKind::Circular if self.lo <= self.hi => {
                return Err(bad("circular span requires lo > hi"))
            }
            _ => {}
        }
        if !row.get(self.lo) || !row.get(self.hi) {
            return Err(bad("row must be nonzero at both span endpoints"));
        }
        let cover = self.positions(n);
        if row.ones().any(|p| !cover.contains(p)) {
            return Err(bad("row has support outside its span"));
        }
        Ok(())
    }
}

/// Zero run of a circular-span row: the time interval `[hi+1, lo]` on
/// which its elementary trellis has a single state.
pub fn zero_run(row: &BitVec, span: &Span, n: usize) -> Result<Interval> {
    if span.kind != SpanKind::Circular {
        return Err(Error::LinearSpanZeroRun);
    }
    if row.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: row.len(),
        });
    }
    span.validate(row)?;
    Ok(Interval::new((span.hi + 1) % n, span.lo, n))
}

/// A binary generator matrix whose rows carry declared spans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpannedMatrix {
    n: usize,
    rows: Vec<(BitVec, Span)>,
}

impl SpannedMatrix {
    /// Validates lengths, spans, and linear independence.
    pub fn new(n: usize, rows: Vec<(BitVec, Span)>) -> Result<Self> {
        for (row, span) in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            span.validate(row)?;
        }
        let plain: Vec<BitVec> = rows.iter().map(|(r, _)| r.clone()).collect();
        if rank(&plain) != plain.len() {
            return Err(Error::DependentRows);
        }
        Ok(Self { n, rows })
    }

    /// Parses rows given as bit strings with spans in the printed
    /// `index_base` (0 or 1) convention.
    pub fn from_printed(rows: &[(&str, usize, usize)], index_base: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        let mut n = None;
        for &(bits, lo, hi) in rows {
            let row: BitVec = bits.parse()?;
            let (lo, hi) = (lo - index_base, hi - index_base);
            let span = if lo <= hi {
                Span::linear(lo, hi)
            } else {
                Span::circular(lo, hi)
            };
            n.get_or_insert(row.len());
            out.push((row, span));
        }
        Self::new(n.unwrap_or(0), out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn l(&self) -> usize {
        self.linear_rows().count()
    }

    pub fn c(&self) -> usize {
        self.circular_rows().count()
    }

    pub fn rows(&self) -> &[(BitVec, Span)] {
        &self.rows
    }

    pub fn generator(&self) -> Vec<BitVec> {
        self.rows.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn linear_rows(&self) -> impl Iterator<Item = &(BitVec, Span)> {
        self.rows.iter().filter(|(_, s)| s.kind == SpanKind::Linear)
    }

    pub fn circular_rows(&self) -> impl Iterator<Item = &(BitVec, Span)> {
        self.rows.iter().filter(|(_, s)| s.kind == SpanKind::Circular)
    }

    /// `G_s = [G_l; G_c']`: linear rows first, then for every circular row
    /// its head (positions `0..=hi`) and tail (positions `lo..n`), each
    /// with its minimal linear span.
    pub fn split_heads_tails(&self) -> Result<SpannedMatrix> {
        let mut rows: Vec<(BitVec, Span)> = self.linear_rows().cloned().collect();
        for (row, span) in self.circular_rows() {
            let mut head = BitVec::zeros(self.n);
            let mut tail = BitVec::zeros(self.n);
            for p in row.ones() {
                if p <= span.hi {
                    head.set(p, true);
                } else {
                    tail.set(p, true);
                }
            }
            for part in [head, tail] {
                let span = Span::minimal_linear(&part).expect("head and tail contain an endpoint");
                rows.push((part, span));
            }
        }
        SpannedMatrix::new(self.n, rows)
    }

    /// Intersection of the zero runs of all circular rows.
    pub fn intersection_property(&self) -> IntersectionVerdict {
        if self.c() == 0 {
            return IntersectionVerdict {
                holds: true,
                witness: Some(Interval::full(self.n)),
                no_circular_rows: true,
            };
        }
        let mut common = vec![true; self.n];
        for (row, span) in self.circular_rows() {
            let zr = zero_run(row, span, self.n).expect("validated at construction");
            for (t, c) in common.iter_mut().enumerate() {
                *c &= zr.contains(t);
            }
        }
        let witness = cyclic_runs(&common).into_iter().next();
        IntersectionVerdict {
            holds: witness.is_some(),
            witness,
            no_circular_rows: false,
        }
    }

    /// Serializes in the spanned-matrix text format (0-indexed spans).
    pub fn to_text(&self) -> String {
        let mut s = format!("n={} k={}\n", self.n, self.k());
        for (row, span) in &self.rows {
            let kind = match span.kind {
                SpanKind::Linear => "linear",
                SpanKind::Circular => "circular",
            };
            s.push_str(&format!("{row} {} {} {kind}\n", span.lo, span.hi));
        }
        s
    }

    /// Parses the spanned-matrix text format: a header line of `key=value`
    /// pairs (`n`, `k`, optional `index_base`), then one `bits lo hi kind`
    /// row per line. `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut k = None;
        let mut base = 0usize;
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |msg: String| Error::Malformed { line: line_no, msg };
            if !header_seen {
                for tok in line.split_whitespace() {
                    let (key, val) = tok
                        .split_once('=')
                        .ok_or_else(|| malformed(format!("expected key=value, got '{tok}'")))?;
                    let val: usize = val
                        .parse()
                        .map_err(|_| malformed(format!("bad integer '{val}'")))?;
                    match key {
                        "n" => n = Some(val),
                        "k" => k = Some(val),
                        "index_base" if val <= 1 => base = val,
                        _ => return Err(malformed(format!("unknown header key '{tok}'"))),
                    }
                }
                header_seen = true;
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(malformed("expected 'bits lo hi kind'".into()));
            }
            let row: BitVec = toks[0]
                .parse()
                .map_err(|_| malformed(format!("bad bits '{}'", toks[0])))?;
            let parse_idx = |s: &str| -> Result<usize> {
                let v: usize = s
                    .parse()
                    .map_err(|_| malformed(format!("bad index '{s}'")))?;
                v.checked_sub(base)
                    .ok_or_else(|| malformed(format!("index {v} below index_base {base}")))
            };
            let (lo, hi) = (parse_idx(toks[1])?, parse_idx(toks[2])?);
            let span = match toks[3] {
                "linear" => Span::linear(lo, hi),
                "circular" => Span::circular(lo, hi),
                other => return Err(malformed(format!("unknown span kind '{other}'"))),
            };
            rows.push((row, span));
        }
        let n = n.ok_or(Error::Malformed {
            line: 0,
            msg: "missing n= header".into(),
        })?;
        if let Some(k) = k {
            if k != rows.len() {
                return Err(Error::Malformed {
                    line: 0,
                    msg: format!("header says k={k} but {} rows given", rows.len()),
                });
            }
        }
        Self::new(n, rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionVerdict {
    pub holds: bool,
    /// Longest common run of the zero runs, if any.
    pub witness: Option<Interval>,
    pub no_circular_rows: bool,
}

/// All GF(2) linear combinations of `rows`, including the zero vector.
pub fn row_space(rows: &[BitVec]) -> Result<BTreeSet<BitVec>> {
    if rows.len() > ROW_SPACE_LIMIT {
        return Err(Error::EnumerationLimit {
            what: "row_space rows",
            count: rows.len() as u128,
            limit: ROW_SPACE_LIMIT as u128,
        });
    }
    let n = rows.first().map_or(0, |r| r.len());
    let mut seen = HashSet::with_capacity(1 << rows.len());
    let mut acc = BitVec::zeros(n);
    seen.insert(acc.clone());
    // Gray-code walk over all coefficient vectors.
    for step in 1u64..(1u64 << rows.len()) {
        acc.xor_assign(&rows[step.trailing_zeros() as usize]);
        seen.insert(acc.clone());
    }
    Ok(seen.into_iter().collect())
}

/// Incremental elimination that remembers, for every basis vector, which
/// original rows were combined to form it.
#[derive(Clone, Debug)]
pub struct Gf2Solver {
    input_rows: usize,
    basis: Vec<(usize, BitVec, BitVec)>,
}

impl Gf2Solver {
    pub fn new(rows: &[BitVec]) -> Self {
        let mut solver = Self {
            input_rows: rows.len(),
            basis: Vec::new(),
        };
        for (i, row) in rows.iter().enumerate() {
            let mut combo = BitVec::zeros(rows.len());
            combo.set(i, true);
            let (rest, combo) = solver.reduce(row.clone(), combo);
            if let Some(p) = rest.first_one() {
                solver.basis.push((p, rest, combo));
            }
        }
        solver
    }

    fn reduce(&self, mut v: BitVec, mut combo: BitVec) -> (BitVec, BitVec) {
        for (pivot, b, c) in &self.basis {
            if v.get(*pivot) {
                v.xor_assign(b);
                combo.xor_assign(c);
            }
        }
        (v, combo)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients `x` with `sum x_i * rows_i == target`, if any.
    pub fn solve(&self, target: &BitVec) -> Option<BitVec> {
        let (rest, combo) = self.reduce(target.clone(), BitVec::zeros(self.input_rows));
        rest.is_zero().then_some(combo)
    }
}

pub fn rank(rows: &[BitVec]) -> usize {
    Gf2Solver::new(rows).rank()
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot
/// columns in increasing order.
pub fn rref(rows: &[BitVec]) -> (Vec<BitVec>, Vec<usize>) {
    let mut m: Vec<BitVec> = rows.to_vec();
    let n = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i].get(col)) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
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
    fn zero_run_examples() {
        let n = 7;
        let r = bv("0100011");
        // printed [6,2] -> 0-indexed [5,1]
        assert_eq!(
            zero_run(&r, &Span::circular(5, 1), n).unwrap(),
            Interval::new(2, 5, n)
        );
        let r = bv("0111001");
        assert_eq!(
            zero_run(&r, &Span::circular(6, 3), n).unwrap(),
            Interval::new(4, 6, n)
        );
        let r = bv("1000110");
        assert_eq!(
            zero_run(&r, &Span::linear(0, 5), n),
            Err(Error::LinearSpanZeroRun)
        );
    }

    #[test]
    fn zero_run_and_active_times_tile() {
        let g = hamming();
        for (row, span) in g.circular_rows() {
            let zr = zero_run(row, span, 7).unwrap().mask();
            let act = span.active_times(7).unwrap().mask();
            for t in 0..7 {
                assert!(zr[t] ^ act[t], "time {t} not tiled exactly once");
            }
        }
    }

    #[test]
    fn span_validation() {
        assert!(Span::linear(0, 5).validate(&bv("1000110")).is_ok());
        assert!(Span::linear(0, 4).validate(&bv("1000110")).is_err());
        assert!(Span::circular(5, 1).validate(&bv("0100011")).is_ok());
        assert!(Span::circular(1, 5).validate(&bv("0100011")).is_err());
        assert!(Span::circular(6, 1).validate(&bv("0100011")).is_err());
    }

    #[test]
    fn dependent_rows_rejected() {
        let rows = vec![
            (bv("1100"), Span::linear(0, 1)),
            (bv("0110"), Span::linear(1, 2)),
            (bv("1010"), Span::linear(0, 2)),
        ];
        assert_eq!(SpannedMatrix::new(4, rows), Err(Error::DependentRows));
    }

    #[test]
    fn hamming_split_matches_printed_gs() {
        let gs = hamming().split_heads_tails().unwrap();
        let got: Vec<String> = gs.rows().iter().map(|(r, _)| r.to_string()).collect();
        assert_eq!(
            got,
            ["1000110", "0010111", "0100000", "0000011", "0111000", "0000001"]
        );
        assert_eq!(gs.k(), hamming().l() + 2 * hamming().c());
    }

    #[test]
    fn split_without_circular_rows_is_identity() {
        let g = SpannedMatrix::new(
            5,
            vec![
                (bv("11010"), Span::linear(0, 3)),
                (bv("01101"), Span::linear(1, 4)),
            ],
        )
        .unwrap();
        assert_eq!(g.split_heads_tails().unwrap(), g);
    }

    #[test]
    fn row_space_of_gs() {
        let gs = hamming().split_heads_tails().unwrap().generator();
        let space = row_space(&gs).unwrap();
        assert_eq!(space.len(), 64);
        assert!(space.contains(&bv("1100110")));
        assert!(space.contains(&BitVec::zeros(7)));
        let empty = row_space(&[]).unwrap();
        assert_eq!(empty.len(), 1);
        let too_many = vec![BitVec::zeros(3); ROW_SPACE_LIMIT + 1];
        assert!(matches!(
            row_space(&too_many),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn intersection_property_hamming() {
        let v = hamming().intersection_property();
        assert!(v.holds);
        let w = v.witness.unwrap();
        assert!(w.covers(&Interval::new(4, 5, 7)));
    }

    #[test]
    fn intersection_property_single_and_disjoint() {
        let one = SpannedMatrix::new(7, vec![(bv("0100011"), Span::circular(5, 1))]).unwrap();
        let v = one.intersection_property();
        assert_eq!(v.witness, Some(Interval::new(2, 5, 7)));

        // zero runs [1,3] and [4,5] on n = 6 are disjoint
        let two = SpannedMatrix::new(
            6,
            vec![
                (bv("100100"), Span::circular(3, 0)),
                (bv("000101"), Span::circular(5, 3)),
            ],
        )
        .unwrap();
        let z: Vec<Interval> = two
            .circular_rows()
            .map(|(r, s)| zero_run(r, s, 6).unwrap())
            .collect();
        assert_eq!(z, vec![Interval::new(1, 3, 6), Interval::new(4, 5, 6)]);
        let v = two.intersection_property();
        assert!(!v.holds);
        assert_eq!(v.witness, None);

        let none = SpannedMatrix::new(3, vec![(bv("110"), Span::linear(0, 1))]).unwrap();
        let v = none.intersection_property();
        assert!(v.holds && v.no_circular_rows);
    }

    #[test]
    fn text_format_round_trip_and_one_based() {
        let text = "n=7 k=4 index_base=1\n1000110 1 6 linear\n0010111 3 7 linear\n0100011 6 2 circular\n0111001 7 4 circular\n";
        let g = SpannedMatrix::from_text(text).unwrap();
        assert_eq!(g, hamming());
        assert_eq!(SpannedMatrix::from_text(&g.to_text()).unwrap(), g);
        assert!(SpannedMatrix::from_text("n=7\n1000110 1 6 sideways\n").is_err());
    }

    #[test]
    fn solver_and_rref() {
        let gs = hamming().split_heads_tails().unwrap().generator();
        let solver = Gf2Solver::new(&gs);
        let x = solver.solve(&bv("1100110")).unwrap();
        assert_eq!(x.to_string(), "101000");
        let (rows, pivots) = rref(&hamming().generator());
        assert_eq!(rows.len(), 4);
        for (r, &p) in rows.iter().zip(&pivots) {
            assert!(r.get(p));
            assert_eq!(rows.iter().filter(|q| q.get(p)).count(), 1);
        }
    }

    #[test]
    fn bitvec_order_is_lexicographic() {
        assert!(bv("0111") < bv("1000"));
        assert!(bv("0010") < bv("0100"));
        assert_eq!(bv("1010").extract(0, 4), 0b0101);
    }
}
