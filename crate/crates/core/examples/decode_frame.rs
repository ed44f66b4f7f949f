//! Encode, transmit and decode a single frame.
//!
//! cargo run --example decode_frame -- [code] [snr_db] [seed]

use tailbiting::codebook::Code;
use tailbiting::decoder::{Decoder, Mode};
use tailbiting::sim::Frame;

fn main() -> tailbiting::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("conv35_31_L20", String::as_str);
    let snr: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("snr"));
    let seed: u64 = args.get(2).map_or(7, |s| s.parse().expect("seed"));

    let code = Code::from_name(name)?;
    let u = code.trellis.unroll();
    let frame = Frame::generate(&code, seed, 0, snr, false);
    let res = Decoder::new(&u).decode(&frame.r, Mode::Exact)?;

    let hard: String = frame.r.iter().map(|&y| if y < 0.0 { '1' } else { '0' }).collect();
    println!("code        {name}  (n={}, k={}, V={})", code.len(), code.k(), u.total_states());
    println!("sent        {}", frame.codeword);
    println!("hard        {hard}");
    println!("decoded     {}", res.codeword);
    println!("cost        {:.4}  subtrellis {}  via {:?}", res.cost, res.subtrellis, res.winner_source);
    println!("info errors {}", code.info_bits(&res.codeword).iter().zip(&frame.info).filter(|(a, b)| a != b).count());
    println!("{:#?}", res.stats);
    Ok(())
}
