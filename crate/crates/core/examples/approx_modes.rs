//! Work done by the exact and bounded modes on the same noisy frames.

use tailbiting::codebook::Code;
use tailbiting::decoder::{phase1, Decoder, Mode};
use tailbiting::sim::Frame;

fn main() -> tailbiting::Result<()> {
    let code = Code::from_name("conv35_31_L20")?;
    let u = code.trellis.unroll();
    let v = u.total_states();
    let mut dec = Decoder::new(&u);
    println!("V = {v}; bounds: approx1 <= 2V = {}, approx2 <= 3V = {}", 2 * v, 3 * v);
    println!("{:>5} {:>8} {:>10} {:>10} {:>10}", "frame", "snr", "exact", "approx1", "approx2");
    for f in 0..16u64 {
        let snr = -3.0 + 0.25 * f as f64;
        let frame = Frame::generate(&code, 3, f, snr, false);
        let s = dec.soft_input(&frame.r)?;
        let p1 = phase1(&u, &s);
        let work: Vec<String> = Mode::ALL
            .iter()
            .map(|&m| {
                let r = dec.phase2(&s, &p1, m);
                format!("{}{}", r.stats.node_computations, if r.codeword == frame.codeword { "" } else { "*" })
            })
            .collect();
        println!("{f:>5} {snr:>8.2} {:>10} {:>10} {:>10}", work[0], work[1], work[2]);
    }
    println!("(* = decoded word differs from the transmitted one)");
    Ok(())
}
