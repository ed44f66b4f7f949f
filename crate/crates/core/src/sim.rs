//! Monte-Carlo sweeps over SNR and decoding mode.
//!
//! Frame `f` draws its information bits and then its noise from a ChaCha8
//! stream seeded with `seed ^ f`. The same stream is reused at every SNR
//! point and for every mode, so modes are compared on identical noise and
//! results do not depend on how frames are scheduled across threads.

use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{add_awgn_with, ebn0_db, modulate};
use crate::codebook::Code;
use crate::decoder::{phase1, DecodeResult, Decoder, Mode, WinnerSource};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::oracle::{brute_force_ml, per_subtrellis_viterbi, Discrepancy, DiscrepancyAnalyzer};
use crate::trellis::UnrolledTrellis;

pub const DEFAULT_MAX_FRAMES: u64 = 10_000_000;
/// Codes with at most this many information bits are checked against
/// exhaustive enumeration; larger ones against per-subtrellis Viterbi.
pub const BRUTE_FORCE_ORACLE_MAX_K: usize = 12;
const CHUNK: u64 = 4096;

/// Axis the configured SNR values are expressed on. The channel itself
/// always works in `E_s/N_0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SnrUnit {
    #[default]
    EsN0,
    EbN0,
}

impl std::str::FromStr for SnrUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "esn0" => Ok(SnrUnit::EsN0),
            "ebn0" => Ok(SnrUnit::EbN0),
            other => Err(Error::Config(format!("unknown SNR unit '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub code: String,
    pub modes: Vec<Mode>,
    pub snr_db: Vec<f64>,
    pub snr_unit: SnrUnit,
    pub frames: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub all_zero: bool,
    pub reproducible: bool,
    pub max_frames: u64,
}

impl SimConfig {
    pub fn new(code: impl Into<String>, modes: Vec<Mode>, snr_db: Vec<f64>, frames: u64) -> Self {
        Self {
            code: code.into(),
            modes,
            snr_db,
            snr_unit: SnrUnit::EsN0,
            frames,
            seed: 1,
            out: None,
            all_zero: false,
            reproducible: false,
            max_frames: DEFAULT_MAX_FRAMES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.frames > self.max_frames {
            return Err(Error::Config(format!(
                "{} frames exceeds the limit of {}",
                self.frames, self.max_frames
            )));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("empty SNR list".into()));
        }
        if let Some(bad) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR {bad} is not finite")));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("empty mode list".into()));
        }
        Ok(())
    }

    /// Configured points converted to `E_s/N_0` for a code of rate `rate`.
    pub fn esn0_points(&self, rate: f64) -> Vec<f64> {
        match self.snr_unit {
            SnrUnit::EsN0 => self.snr_db.clone(),
            SnrUnit::EbN0 => self.snr_db.iter().map(|&eb| eb + 10.0 * rate.log10()).collect(),
        }
    }
}

/// Parses `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad SNR list '{s}'"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err(bad());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            // round to kill accumulated binary fractions like 1.5000000000000002
            Ok((0..count)
                .map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

pub fn parse_mode_list(s: &str) -> Result<Vec<Mode>> {
    s.split(',')
        .map(|m| m.trim().parse::<Mode>())
        .collect()
}

/// One transmitted and received frame.
#[derive(Clone, Debug)]
pub struct Frame {
    pub seed: u64,
    pub info: Vec<u8>,
    pub codeword: BitVec,
    pub r: Vec<f64>,
}

impl Frame {
    pub fn generate(code: &Code, base_seed: u64, index: u64, snr_db: f64, all_zero: bool) -> Self {
        let seed = base_seed ^ index;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u8> = if all_zero {
            vec![0; code.k()]
        } else {
            (0..code.k()).map(|_| rng.random_range(0..2u8)).collect()
        };
        let codeword = code.encode(&info);
        let r = add_awgn_with(&modulate(&codeword), snr_db, &mut rng);
        Self {
            seed,
            info,
            codeword,
            r,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub mode: String,
    pub frames: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frame_errors: u64,
    pub avg_node_computations: f64,
    pub max_node_computations: u64,
    pub max_heap_size: u64,
    pub avg_phase2_expansions: f64,
    /// Frames whose output differs from the exact decoder's; empty when
    /// exact mode was not run.
    pub disagreements: Option<u64>,
    pub exact_fallbacks: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    node_sum: u64,
    node_max: u64,
    heap_max: u64,
    expansion_sum: u64,
    disagreements: u64,
    fallbacks: u64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.frames += o.frames;
        self.bit_errors += o.bit_errors;
        self.frame_errors += o.frame_errors;
        self.node_sum += o.node_sum;
        self.node_max = self.node_max.max(o.node_max);
        self.heap_max = self.heap_max.max(o.heap_max);
        self.expansion_sum += o.expansion_sum;
        self.disagreements += o.disagreements;
        self.fallbacks += o.fallbacks;
    }

    fn record(&mut self, code: &Code, frame: &Frame, res: &DecodeResult, exact: Option<&BitVec>) {
        let decoded = code.info_bits(&res.codeword);
        let errs = decoded
            .iter()
            .zip(&frame.info)
            .filter(|(a, b)| a != b)
            .count() as u64;
        let nc = res.stats.node_computations as u64;
        self.add(&Tally {
            frames: 1,
            bit_errors: errs,
            frame_errors: (errs > 0) as u64,
            node_sum: nc,
            node_max: nc,
            heap_max: res.stats.max_heap_size as u64,
            expansion_sum: res.stats.phase2_expansions as u64,
            disagreements: exact.is_some_and(|c| *c != res.codeword) as u64,
            fallbacks: (res.winner_source == WinnerSource::ExactFallback) as u64,
        });
    }

    fn row(&self, snr: f64, mode: Mode, code: &Code, with_exact: bool) -> SweepRow {
        let f = self.frames as f64;
        SweepRow {
            snr_db: snr,
            ebn0_db: ebn0_db(snr, code.rate()),
            mode: mode.to_string(),
            frames: self.frames,
            bit_errors: self.bit_errors,
            ber: self.bit_errors as f64 / (f * code.k() as f64),
            frame_errors: self.frame_errors,
            avg_node_computations: self.node_sum as f64 / f,
            max_node_computations: self.node_max,
            max_heap_size: self.heap_max,
            avg_phase2_expansions: self.expansion_sum as f64 / f,
            disagreements: with_exact.then_some(self.disagreements),
            exact_fallbacks: self.fallbacks,
        }
    }
}

/// Per-frame outcome of decoding one frame in every requested mode.
struct FrameOutcome {
    tallies: Vec<Tally>,
    discrepancies: Vec<Discrepancy>,
    oracle_mismatch: Option<String>,
}

struct Harness<'a> {
    code: &'a Code,
    u: &'a UnrolledTrellis,
    modes: &'a [Mode],
    exact_index: Option<usize>,
    analyzer: Option<DiscrepancyAnalyzer>,
    oracle: bool,
}

impl Harness<'_> {
    fn frame(&self, dec: &mut Decoder, frame: &Frame, snr: f64) -> Result<FrameOutcome> {
        let s = dec.soft_input(&frame.r)?;
        let p1 = phase1(self.u, &s);
        let results: Vec<DecodeResult> = self.modes.iter().map(|&m| dec.phase2(&s, &p1, m)).collect();
        let exact = self.exact_index.map(|i| &results[i]);
        let mut tallies = vec![Tally::default(); self.modes.len()];
        for (t, res) in tallies.iter_mut().zip(&results) {
            t.record(self.code, frame, res, exact.map(|e| &e.codeword));
        }
        let mut discrepancies = Vec::new();
        let mut oracle_mismatch = None;
        if let Some(exact) = exact {
            if let Some(a) = &self.analyzer {
                for res in results.iter().filter(|r| r.mode != Mode::Exact) {
                    if exact.cost < res.cost - 1e-9 {
                        let mut d = a.diagnose(frame.seed, self.u, exact, res, &p1)?;
                        d.snr_db = Some(snr);
                        discrepancies.push(d);
                    }
                }
            }
            if self.oracle {
                let reference = if self.code.k() <= BRUTE_FORCE_ORACLE_MAX_K {
                    brute_force_ml(&self.code.systematic, &frame.r)?.cost
                } else {
                    per_subtrellis_viterbi(&self.code.trellis, &frame.r)?.cost
                };
                if (reference - exact.cost).abs() > 1e-9 {
                    oracle_mismatch = Some(format!(
                        "frame seed {} at {snr} dB: exact cost {} vs oracle {}",
                        frame.seed, exact.cost, reference
                    ));
                }
            }
        }
        Ok(FrameOutcome {
            tallies,
            discrepancies,
            oracle_mismatch,
        })
    }

    fn point(&self, cfg: &SimConfig, snr: f64, trace: bool) -> Result<(Vec<Tally>, Vec<Discrepancy>, Vec<String>)> {
        let mut totals = vec![Tally::default(); self.modes.len()];
        let mut discrepancies = Vec::new();
        let mut mismatches = Vec::new();
        let mut start = 0;
        while start < cfg.frames {
            let end = (start + CHUNK).min(cfg.frames);
            let outcomes: Vec<Result<FrameOutcome>> = (start..end)
                .into_par_iter()
                .map_init(
                    || Decoder::new(self.u).with_trace(trace),
                    |dec, f| {
                        let frame = Frame::generate(self.code, cfg.seed, f, snr, cfg.all_zero);
                        self.frame(dec, &frame, snr)
                    },
                )
                .collect();
            for o in outcomes {
                let o = o?;
                for (t, x) in totals.iter_mut().zip(&o.tallies) {
                    t.add(x);
                }
                discrepancies.extend(o.discrepancies);
                mismatches.extend(o.oracle_mismatch);
            }
            start = end;
        }
        Ok((totals, discrepancies, mismatches))
    }
}

/// Runs every `(snr, mode)` point of `cfg` and writes the CSV when
/// `cfg.out` is set.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let code = Code::from_name(&cfg.code)?;
    let u = code.trellis.unroll();
    let h = Harness {
        code: &code,
        u: &u,
        modes: &cfg.modes,
        exact_index: cfg.modes.iter().position(|&m| m == Mode::Exact),
        analyzer: None,
        oracle: false,
    };
    let mut rows = Vec::new();
    for snr in cfg.esn0_points(code.rate()) {
        let (tallies, _, _) = h.point(cfg, snr, false)?;
        for (t, &m) in tallies.iter().zip(&cfg.modes) {
            rows.push(t.row(snr, m, &code, h.exact_index.is_some()));
        }
    }
    if let Some(path) = &cfg.out {
        std::fs::write(path, sweep_csv(cfg, &code, &rows)?)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(rows)
}

/// CSV text with `#` header lines describing the run.
pub fn sweep_csv(cfg: &SimConfig, code: &Code, rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# tbt-decode sweep")?;
    writeln!(
        buf,
        "# code {} n={} k={} states={} subtrellises={}",
        cfg.code,
        code.len(),
        code.k(),
        code.trellis.total_states(),
        code.trellis.num_subtrellises()
    )?;
    writeln!(
        buf,
        "# seed={} frames_per_point={} transmitted={}",
        cfg.seed,
        cfg.frames,
        if cfg.all_zero { "all-zero" } else { "uniform random" }
    )?;
    writeln!(buf, "# snr_db is Es/N0 with unit-energy antipodal symbols; ebn0_db = snr_db - 10 log10(k/n)")?;
    writeln!(
        buf,
        "# ber = information-bit errors / (frames * k), information bits read at the pivot columns of the row-reduced generator"
    )?;
    writeln!(buf, "# node computations = phase-1 updates + phase-2 expansions")?;
    if !cfg.reproducible {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        writeln!(buf, "# generated_unix_time={secs}")?;
    }
    let mut w = csv::Writer::from_writer(buf);
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparePoint {
    pub snr_db: f64,
    pub mode: String,
    pub ber: f64,
    pub ber_exact: f64,
    pub ber_delta: f64,
    /// Binomial standard error of a BER estimate at the pooled error rate
    /// of the two modes.
    pub std_error: f64,
    pub within_two_se: bool,
    pub disagreements: u64,
    pub misses: u64,
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub rows: Vec<SweepRow>,
    pub points: Vec<ComparePoint>,
    pub discrepancies: Vec<Discrepancy>,
    pub oracle: &'static str,
    pub oracle_frames: u64,
    pub oracle_mismatches: Vec<String>,
}

/// Decodes identical frames in exact and approximate modes, checks exact
/// mode against an independent oracle, and records every approximate miss.
pub fn compare_modes(cfg: &SimConfig) -> Result<CompareReport> {
    cfg.validate()?;
    if !cfg.modes.contains(&Mode::Exact) || cfg.modes.iter().all(|&m| m == Mode::Exact) {
        return Err(Error::Config("compare needs exact and at least one approximate mode".into()));
    }
    let code = Code::from_name(&cfg.code)?;
    let u = code.trellis.unroll();
    let exact_index = cfg.modes.iter().position(|&m| m == Mode::Exact);
    let h = Harness {
        code: &code,
        u: &u,
        modes: &cfg.modes,
        exact_index,
        analyzer: code.spanned.as_ref().map(DiscrepancyAnalyzer::new).transpose()?,
        oracle: true,
    };
    let mut report = CompareReport {
        rows: Vec::new(),
        points: Vec::new(),
        discrepancies: Vec::new(),
        oracle: if code.k() <= BRUTE_FORCE_ORACLE_MAX_K {
            "brute-force enumeration"
        } else {
            "per-subtrellis viterbi"
        },
        oracle_frames: 0,
        oracle_mismatches: Vec::new(),
    };
    let bits = (cfg.frames * code.k() as u64) as f64;
    for snr in cfg.esn0_points(code.rate()) {
        let (tallies, discrepancies, mismatches) = h.point(cfg, snr, h.analyzer.is_some())?;
        let exact = tallies[exact_index.expect("checked")];
        for (t, &m) in tallies.iter().zip(&cfg.modes) {
            report.rows.push(t.row(snr, m, &code, true));
            if m == Mode::Exact {
                continue;
            }
            let pooled = (t.bit_errors + exact.bit_errors) as f64 / (2.0 * bits);
            let se = (pooled * (1.0 - pooled) / bits).sqrt();
            let delta = (t.bit_errors as f64 - exact.bit_errors as f64) / bits;
            report.points.push(ComparePoint {
                snr_db: snr,
                mode: m.to_string(),
                ber: t.bit_errors as f64 / bits,
                ber_exact: exact.bit_errors as f64 / bits,
                ber_delta: delta,
                std_error: se,
                within_two_se: delta.abs() <= 2.0 * se,
                disagreements: t.disagreements,
                misses: discrepancies.iter().filter(|d| d.approx.mode == m).count() as u64,
            });
        }
        report.discrepancies.extend(discrepancies);
        report.oracle_frames += cfg.frames;
        report.oracle_mismatches.extend(mismatches);
    }
    Ok(report)
}

/// One JSON object per line.
pub fn discrepancies_jsonl(ds: &[Discrepancy]) -> Result<String> {
    let mut out = String::new();
    for d in ds {
        out.push_str(&serde_json::to_string(d).map_err(|e| Error::Io(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}
