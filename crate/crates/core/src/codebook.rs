//! Built-in codes and trellis file ingestion.
//!
//! Registry names:
//! - `hamming74`: the (7,4) Hamming code with two linear and two circular rows
//! - `conv<g0>_<g1>[_<g2>...]_L<len>`: rate `1/ν` feedforward convolutional
//!   code with octal generators, tail-biting over `len` information bits
//!   (`conv133_171_L48` and `conv35_31_L20` are the reference codes)
//! - `file:<path>`: a trellis in the interchange text format; a sibling
//!   `<stem>.gkv` spanned matrix, when present, is loaded alongside it

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{rref, BitVec, Gf2Solver, Span, SpannedMatrix};
use crate::trellis::{from_spanned_matrix, Edge, TailBitingTrellis};

/// Generator matrix of the (7,4) Hamming code with its row spans
/// (two linear, two circular), and the product trellis built from it.
pub fn hamming74() -> (SpannedMatrix, TailBitingTrellis) {
    let g = SpannedMatrix::from_printed(
        &[
            ("1000110", 1, 6),
            ("0010111", 3, 7),
            ("0100011", 6, 2),
            ("0111001", 7, 4),
        ],
        1,
    )
    .expect("valid Hamming matrix");
    let t = from_spanned_matrix(&g).expect("valid product trellis");
    (g, t)
}

/// Feedforward rate `1/ν` convolutional code, tail-biting over `circle`
/// information bits.
///
/// Generators are written in octal with the most significant tap applied
/// to the current input bit, so `0o133` with `memory = 6` has taps
/// `1 0 1 1 0 1 1` at delays `0..=6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvCodeSpec {
    pub generators: Vec<u32>,
    pub memory: usize,
    pub circle: usize,
}

impl ConvCodeSpec {
    /// Memory is taken from the widest generator.
    pub fn new(generators: Vec<u32>, circle: usize) -> Result<Self> {
        let widest = generators.iter().map(|g| 32 - g.leading_zeros()).max().unwrap_or(0);
        let spec = Self {
            generators,
            memory: widest.saturating_sub(1) as usize,
            circle,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rate_inverse(&self) -> usize {
        self.generators.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.memory;
        if self.generators.is_empty() {
            return Err(Error::InvalidConvCode("no generators".into()));
        }
        if m == 0 || m > 16 {
            return Err(Error::InvalidConvCode(format!("memory {m} out of range 1..=16")));
        }
        if self.generators.iter().any(|&g| g >> (m + 1) != 0) {
            return Err(Error::InvalidConvCode("generator degree exceeds memory".into()));
        }
        if !self.generators.iter().any(|&g| (g >> m) & 1 == 1) {
            return Err(Error::InvalidConvCode("no generator taps the current input".into()));
        }
        if !self.generators.iter().any(|&g| g & 1 == 1) {
            return Err(Error::InvalidConvCode("no generator taps the oldest input".into()));
        }
        if self.circle <= m {
            return Err(Error::CircleTooShort {
                circle: self.circle,
                memory: m,
            });
        }
        Ok(())
    }

    fn outputs(&self, reg: u32) -> u32 {
        self.generators
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &g)| acc | (((reg & g).count_ones() & 1) << j))
    }

    /// Tail-biting encoding: the register starts in the state given by the
    /// last `memory` information bits, so it ends where it started.
    pub fn encode(&self, info: &[u8]) -> Result<BitVec> {
        if info.len() != self.circle {
            return Err(Error::LengthMismatch {
                expected: self.circle,
                actual: info.len(),
            });
        }
        let (m, nu) = (self.memory, self.rate_inverse());
        // bit m-1-d of the state holds the input d+1 steps back
        let mut state = (0..m).fold(0u32, |acc, d| {
            acc | (((info[self.circle - 1 - d] & 1) as u32) << (m - 1 - d))
        });
        let mut out = BitVec::zeros(self.circle * nu);
        for (t, &b) in info.iter().enumerate() {
            let reg = ((b as u32 & 1) << m) | state;
            out.insert(t * nu, nu, self.outputs(reg));
            state = reg >> 1;
        }
        Ok(out)
    }

    /// Tail-biting generator rows: row `t` is the encoding of a single 1 at
    /// position `t`, with span from its first to last nonzero bit (circular
    /// when the response wraps around the circle).
    pub fn spanned_matrix(&self) -> Result<SpannedMatrix> {
        let (m, nu) = (self.memory, self.rate_inverse());
        let total = self.circle * nu;
        let first = (0..nu)
            .find(|&j| (self.generators[j] >> m) & 1 == 1)
            .expect("validated");
        let last = (0..nu)
            .rev()
            .find(|&j| self.generators[j] & 1 == 1)
            .expect("validated");
        let mut rows = Vec::with_capacity(self.circle);
        for t in 0..self.circle {
            let mut info = vec![0u8; self.circle];
            info[t] = 1;
            let row = self.encode(&info)?;
            let lo = t * nu + first;
            let hi = ((t + m) % self.circle) * nu + last;
            let span = if lo <= hi {
                Span::linear(lo, hi)
            } else {
                Span::circular(lo, hi)
            };
            debug_assert!(lo < total && hi < total);
            rows.push((row, span));
        }
        SpannedMatrix::new(total, rows)
    }
}

/// Shift-register tail-biting trellis: `circle` sections of width `ν`,
/// `2^memory` states per time index. State `i` holds the last `memory`
/// inputs with the most recent in the top bit.
pub fn conv_tbt(spec: &ConvCodeSpec) -> Result<TailBitingTrellis> {
    spec.validate()?;
    let (m, nu) = (spec.memory, spec.rate_inverse());
    let states = 1usize << m;
    let section: Vec<Edge> = (0..states as u32)
        .flat_map(|s| {
            (0..2u32).map(move |b| {
                let reg = (b << m) | s;
                (s, reg)
            })
        })
        .map(|(s, reg)| Edge::new(s, spec.outputs(reg), reg >> 1))
        .collect();
    TailBitingTrellis::new(
        vec![nu; spec.circle],
        vec![states; spec.circle],
        vec![section; spec.circle],
    )
}

/// Reads a trellis in the interchange text format.
pub fn load_trellis(path: impl AsRef<Path>) -> Result<TailBitingTrellis> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    TailBitingTrellis::from_text(&text)
}

pub fn save_trellis(t: &TailBitingTrellis, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, t.to_text())?;
    Ok(())
}

/// Number of `(s_i, f_i)` paths summed over all subtrellises.
fn count_cycles(t: &TailBitingTrellis) -> f64 {
    let n = t.n();
    let l = t.num_subtrellises();
    let mut total = 0.0;
    for i in 0..l {
        let mut count = vec![0.0f64; t.v_counts()[0]];
        count[i] = 1.0;
        for s in 0..n {
            let mut next = vec![0.0f64; t.v_counts()[(s + 1) % n]];
            for e in t.section(s) {
                next[e.to as usize] += count[e.from as usize];
            }
            count = next;
        }
        total += count[i];
    }
    total
}

/// Recovers a basis of the code of a linear, one-to-one trellis from
/// random `(s_i, f_i)` cycles.
pub fn generator_from_trellis(t: &TailBitingTrellis) -> Result<Vec<BitVec>> {
    let cycles = count_cycles(t);
    let k = cycles.log2().round();
    if !(cycles >= 1.0 && (2f64.powf(k) - cycles).abs() < 0.5) {
        return Err(Error::NotReduced(format!(
            "{cycles} codeword cycles is not a power of two"
        )));
    }
    let k = k as usize;
    let u = t.unroll();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7b7_c0de);
    let mut basis: Vec<BitVec> = Vec::with_capacity(k);
    let mut attempts = 0;
    while basis.len() < k {
        attempts += 1;
        if attempts > 200 * (k + 8) {
            return Err(Error::NotReduced(format!(
                "could not recover {k} independent codewords from cycle labels"
            )));
        }
        let i = rng.random_range(0..u.num_subtrellises());
        let mut node = u.start(i);
        let mut path = Vec::with_capacity(u.depth());
        while !u.is_final(node) {
            let choices: Vec<u32> = u
                .out_edges(node)
                .iter()
                .copied()
                .filter(|&e| u.is_member(u.edge(e).to, i))
                .collect();
            let e = choices[rng.random_range(0..choices.len())];
            path.push(e);
            node = u.edge(e).to;
        }
        let word = u.path_label(&path);
        let mut candidate = basis.clone();
        candidate.push(word.clone());
        if Gf2Solver::new(&candidate).rank() == candidate.len() {
            basis.push(word);
        }
    }
    Ok(basis)
}

/// A code ready for simulation: trellis, systematic-form generator and
/// information set.
#[derive(Clone, Debug)]
pub struct Code {
    pub name: String,
    pub trellis: TailBitingTrellis,
    /// Generator rows with declared spans, when known.
    pub spanned: Option<SpannedMatrix>,
    /// Reduced row echelon generator; row `i` has a lone 1 at
    /// `info_positions[i]`.
    pub systematic: Vec<BitVec>,
    pub info_positions: Vec<usize>,
}

impl Code {
    pub fn new(
        name: impl Into<String>,
        trellis: TailBitingTrellis,
        generator: &[BitVec],
        spanned: Option<SpannedMatrix>,
    ) -> Result<Self> {
        let (systematic, info_positions) = rref(generator);
        if systematic.len() != generator.len() {
            return Err(Error::DependentRows);
        }
        if let Some(row) = systematic.first() {
            if row.len() != trellis.total_width() {
                return Err(Error::LengthMismatch {
                    expected: trellis.total_width(),
                    actual: row.len(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            trellis,
            spanned,
            systematic,
            info_positions,
        })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        if name == "hamming74" {
            let (g, t) = hamming74();
            return Self::new(name, t, &g.generator(), Some(g));
        }
        if let Some(path) = name.strip_prefix("file:") {
            let t = load_trellis(path)?;
            let gkv = Path::new(path).with_extension("gkv");
            let spanned = if gkv.exists() {
                Some(SpannedMatrix::from_text(&std::fs::read_to_string(&gkv)?)?)
            } else {
                None
            };
            let generator = match &spanned {
                Some(g) => g.generator(),
                None => generator_from_trellis(&t)?,
            };
            return Self::new(name, t, &generator, spanned);
        }
        if let Some(spec) = parse_conv_name(name) {
            let spec = spec?;
            let t = conv_tbt(&spec)?;
            let g = spec.spanned_matrix()?;
            return Self::new(name, t, &g.generator(), Some(g));
        }
        Err(Error::UnknownCode(name.to_string()))
    }

    pub fn k(&self) -> usize {
        self.systematic.len()
    }

    /// Code length in bits.
    pub fn len(&self) -> usize {
        self.trellis.total_width()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn encode(&self, info: &[u8]) -> BitVec {
        let mut c = BitVec::zeros(self.len());
        for (row, &b) in self.systematic.iter().zip(info) {
            if b & 1 == 1 {
                c.xor_assign(row);
            }
        }
        c
    }

    pub fn info_bits(&self, codeword: &BitVec) -> Vec<u8> {
        self.info_positions
            .iter()
            .map(|&p| codeword.get(p) as u8)
            .collect()
    }
}

fn parse_conv_name(name: &str) -> Option<Result<ConvCodeSpec>> {
    let rest = name.strip_prefix("conv")?;
    let (gens, circle) = rest.rsplit_once("_L")?;
    let parsed = (|| {
        let circle: usize = circle
            .parse()
            .map_err(|_| Error::UnknownCode(name.to_string()))?;
        let generators = gens
            .split('_')
            .map(|g| u32::from_str_radix(g, 8).map_err(|_| Error::UnknownCode(name.to_string())))
            .collect::<Result<Vec<u32>>>()?;
        ConvCodeSpec::new(generators, circle)
    })();
    Some(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::row_space;
    use std::collections::BTreeSet;

    fn conv(gens: &[u32], circle: usize) -> ConvCodeSpec {
        ConvCodeSpec::new(gens.to_vec(), circle).unwrap()
    }

    #[test]
    fn hamming_parameters() {
        let (g, t) = hamming74();
        let gl: Vec<String> = g.linear_rows().map(|(r, _)| r.to_string()).collect();
        assert_eq!(gl, ["1000110", "0010111"]);
        assert_eq!(t.num_subtrellises(), 4);
        let words = row_space(&g.generator()).unwrap();
        assert_eq!(words.len(), 16);
        assert_eq!(words.iter().filter(|w| !w.is_zero()).map(BitVec::weight).min(), Some(3));
    }

    #[test]
    fn reference_conv_state_counts() {
        let t = conv_tbt(&conv(&[0o133, 0o171], 48)).unwrap();
        assert_eq!(t.total_states(), 3072);
        assert_eq!(t.num_subtrellises(), 64);
        let t = conv_tbt(&conv(&[0o35, 0o31], 20)).unwrap();
        assert_eq!(t.total_states(), 320);
        assert_eq!(t.widths(), &[2; 20]);
    }

    #[test]
    fn circle_too_short() {
        assert_eq!(
            ConvCodeSpec::new(vec![0o35, 0o31], 4),
            Err(Error::CircleTooShort { circle: 4, memory: 4 })
        );
    }

    #[test]
    fn all_zero_info_gives_zero_codeword() {
        let spec = conv(&[0o35, 0o31], 20);
        assert!(spec.encode(&[0; 20]).unwrap().is_zero());
    }

    fn cycle_labels(t: &TailBitingTrellis) -> BTreeSet<BitVec> {
        let u = t.unroll();
        let mut out = BTreeSet::new();
        fn walk(u: &crate::trellis::UnrolledTrellis, i: usize, node: u32, path: &mut Vec<u32>, out: &mut BTreeSet<BitVec>) {
            if u.is_final(node) {
                if u.local(node) == i {
                    out.insert(u.path_label(path));
                }
                return;
            }
            for &e in u.out_edges(node) {
                path.push(e);
                walk(u, i, u.edge(e).to, path, out);
                path.pop();
            }
        }
        for i in 0..u.num_subtrellises() {
            walk(&u, i, u.start(i), &mut Vec::new(), &mut out);
        }
        out
    }

    #[test]
    fn conv_code_is_linear_with_2_pow_circle_words() {
        for (gens, circle) in [(vec![0o7, 0o5], 6), (vec![0o35, 0o31], 8)] {
            let spec = conv(&gens, circle);
            let labels = cycle_labels(&conv_tbt(&spec).unwrap());
            assert_eq!(labels.len(), 1 << circle);
            let enc: BTreeSet<BitVec> = (0..1u32 << circle)
                .map(|x| {
                    let info: Vec<u8> = (0..circle).map(|i| ((x >> i) & 1) as u8).collect();
                    spec.encode(&info).unwrap()
                })
                .collect();
            assert_eq!(labels, enc);
            let a = labels.iter().nth(3).unwrap();
            let b = labels.iter().nth(17).unwrap();
            assert!(labels.contains(&a.xor(b)));
        }
    }

    #[test]
    fn conv_product_construction_agrees() {
        let spec = conv(&[0o7, 0o5], 5);
        let g = spec.spanned_matrix().unwrap();
        let product = from_spanned_matrix(&g).unwrap().merge_sections(2).unwrap();
        let direct = conv_tbt(&spec).unwrap();
        assert_eq!(product.total_states(), direct.total_states());
        assert_eq!(cycle_labels(&product), cycle_labels(&direct));
    }

    #[test]
    fn registry_and_info_mapping() {
        let code = Code::from_name("conv35_31_L20").unwrap();
        assert_eq!(code.k(), 20);
        assert_eq!(code.len(), 40);
        let info: Vec<u8> = (0..20).map(|i| (i % 3 == 0) as u8).collect();
        let c = code.encode(&info);
        assert_eq!(code.info_bits(&c), info);
        assert!(matches!(Code::from_name("nope"), Err(Error::UnknownCode(_))));
        assert!(Code::from_name("hamming74").unwrap().spanned.is_some());
    }

    #[test]
    fn generator_recovered_from_trellis() {
        let (g, t) = hamming74();
        let basis = generator_from_trellis(&t).unwrap();
        assert_eq!(row_space(&basis).unwrap(), row_space(&g.generator()).unwrap());
    }

    #[test]
    fn load_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let (_, t) = hamming74();
        let p = dir.path().join("h.tbt");
        save_trellis(&t, &p).unwrap();
        assert_eq!(load_trellis(&p).unwrap(), t);
        let code = Code::from_name(&format!("file:{}", p.display())).unwrap();
        assert_eq!(code.k(), 4);
        let bad = dir.path().join("bad.tbt");
        std::fs::write(&bad, "n 2\nsection_widths 1 1\nV_counts 1 1\n0 0 0 0\n1 0 0 5\n").unwrap();
        assert!(matches!(load_trellis(&bad), Err(Error::DanglingNode { .. })));
        assert!(matches!(load_trellis(dir.path().join("missing")), Err(Error::Io(_))));
    }
}
