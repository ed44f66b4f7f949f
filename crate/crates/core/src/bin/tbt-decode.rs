use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tailbiting::sim::{
    compare_modes, discrepancies_jsonl, parse_mode_list, parse_snr_list, run_sweep, sweep_csv, SimConfig,
    DEFAULT_MAX_FRAMES,
};
use tailbiting::codebook::Code;

#[derive(Parser)]
#[command(name = "tbt-decode", version, about = "Two-phase ML decoding on tail-biting trellises")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER and work statistics over an SNR grid, written as CSV.
    Sweep(RunArgs),
    /// Exact against approximate modes on identical frames, with an oracle check.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Write one JSON line per approximate-mode miss.
        #[arg(long)]
        discrepancies: Option<PathBuf>,
    },
    /// Structural invariants and decoder cross-checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// hamming74, conv<g0>_<g1>_L<len> (octal), or file:<path>
    #[arg(long)]
    code: String,
    #[arg(long, default_value = "exact,approx1,approx2")]
    modes: String,
    /// start:step:stop or a comma list, Es/N0 in dB
    #[arg(long, default_value = "0:1:5")]
    snr: String,
    /// Axis of --snr: esn0 or ebn0 (converted with the code rate)
    #[arg(long, default_value = "esn0")]
    snr_unit: String,
    #[arg(long, default_value_t = 10_000)]
    frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV destination; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Transmit the all-zero codeword in every frame.
    #[arg(long)]
    all_zero: bool,
    /// Omit the timestamp header line.
    #[arg(long)]
    reproducible: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_FRAMES)]
    max_frames: u64,
}

impl RunArgs {
    fn config(&self) -> tailbiting::Result<SimConfig> {
        let mut cfg = SimConfig::new(&self.code, parse_mode_list(&self.modes)?, parse_snr_list(&self.snr)?, self.frames);
        cfg.snr_unit = self.snr_unit.parse()?;
        cfg.seed = self.seed;
        cfg.out = self.out.clone();
        cfg.all_zero = self.all_zero;
        cfg.reproducible = self.reproducible;
        cfg.max_frames = self.max_frames;
        Ok(cfg)
    }
}

fn emit(cfg: &SimConfig, rows: &[tailbiting::sim::SweepRow]) -> tailbiting::Result<()> {
    if cfg.out.is_none() {
        let code = Code::from_name(&cfg.code)?;
        std::io::stdout().write_all(&sweep_csv(cfg, &code, rows)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> tailbiting::Result<bool> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let rows = run_sweep(&cfg)?;
            emit(&cfg, &rows)?;
            Ok(true)
        }
        Command::Compare { run, discrepancies } => {
            let cfg = run.config()?;
            let report = compare_modes(&cfg)?;
            if let Some(path) = &cfg.out {
                let code = Code::from_name(&cfg.code)?;
                std::fs::write(path, sweep_csv(&cfg, &code, &report.rows)?)?;
            } else {
                emit(&cfg, &report.rows)?;
            }
            for p in &report.points {
                eprintln!(
                    "{:>6.2} dB {:<8} ber {:.3e} exact {:.3e} delta {:+.2e} (2se {:.2e}) {} disagreements {} misses {}",
                    p.snr_db,
                    p.mode,
                    p.ber,
                    p.ber_exact,
                    p.ber_delta,
                    2.0 * p.std_error,
                    if p.within_two_se { "ok" } else { "OUTSIDE" },
                    p.disagreements,
                    p.misses
                );
            }
            let flagged = report.discrepancies.iter().filter(|d| d.uses_linear_rows).count();
            eprintln!(
                "misses {} ({} use a linear-span row); oracle ({}) mismatches {}/{}",
                report.discrepancies.len(),
                flagged,
                report.oracle,
                report.oracle_mismatches.len(),
                report.oracle_frames
            );
            for m in &report.oracle_mismatches {
                eprintln!("  {m}");
            }
            if let Some(path) = discrepancies {
                std::fs::write(path, discrepancies_jsonl(&report.discrepancies)?)?;
            }
            Ok(true)
        }
        Command::Selftest => {
            let checks = tailbiting::selftest::run();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
