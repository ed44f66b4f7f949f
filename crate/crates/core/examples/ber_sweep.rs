//! Small BER / work sweep printed as CSV, the library equivalent of
//! `tbt-decode sweep`.

use tailbiting::codebook::Code;
use tailbiting::decoder::Mode;
use tailbiting::sim::{run_sweep, sweep_csv, SimConfig};

fn main() -> tailbiting::Result<()> {
    let mut cfg = SimConfig::new("conv35_31_L20", Mode::ALL.to_vec(), vec![0.0, 1.0, 2.0, 3.0], 5_000);
    cfg.reproducible = true;
    let rows = run_sweep(&cfg)?;
    let code = Code::from_name(&cfg.code)?;
    print!("{}", String::from_utf8_lossy(&sweep_csv(&cfg, &code, &rows)?));
    Ok(())
}
