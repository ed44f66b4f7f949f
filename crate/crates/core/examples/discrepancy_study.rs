//! Counts approximate-mode misses against exact decoding and classifies
//! each one by the G_s decomposition of the blocking survivor.
//!
//! cargo run --release --example discrepancy_study -- [code] [snr_db] [frames]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailbiting::channel::{add_awgn_with, branch_costs, modulate};
use tailbiting::codebook::Code;
use tailbiting::decoder::{phase1, Decoder, Mode, WinnerSource};
use tailbiting::oracle::DiscrepancyAnalyzer;

fn main() -> tailbiting::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("hamming74", String::as_str);
    let snr: f64 = args.get(1).map_or(Ok(2.0), |s| s.parse()).expect("snr");
    let frames: u64 = args.get(2).map_or(Ok(100_000), |s| s.parse()).expect("frames");

    let code = Code::from_name(name)?;
    let u = code.trellis.unroll();
    let v = u.total_states();
    let analyzer = code.spanned.as_ref().map(DiscrepancyAnalyzer::new).transpose()?;
    let mut dec = Decoder::new(&u).with_trace(true);

    for mode in [Mode::Approx1, Mode::Approx2] {
        let mut misses = 0u64;
        let mut flagged = 0u64;
        let mut sources: BTreeMap<String, u64> = BTreeMap::new();
        let mut max_exp = 0;
        let mut max_nc = 0;
        for f in 0..frames {
            let mut rng = ChaCha8Rng::seed_from_u64(f);
            let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
            let r = add_awgn_with(&modulate(&code.encode(&info)), snr, &mut rng);
            let s = branch_costs(&code.trellis, &r)?;
            let p1 = phase1(&u, &s);
            let exact = dec.phase2(&s, &p1, Mode::Exact);
            let approx = dec.phase2(&s, &p1, mode);
            *sources.entry(format!("{:?}", approx.winner_source)).or_default() += 1;
            if approx.winner_source != WinnerSource::ExactFallback {
                max_exp = max_exp.max(approx.stats.phase2_expansions);
                max_nc = max_nc.max(approx.stats.node_computations);
            }
            if exact.cost < approx.cost - 1e-9 {
                misses += 1;
                if let Some(a) = &analyzer {
                    match a.diagnose(f, &u, &exact, &approx, &p1) {
                        Ok(d) if d.uses_linear_rows => flagged += 1,
                        Ok(d) => println!("unflagged miss: {}", serde_json::to_string(&d).unwrap()),
                        Err(e) => println!("frame {f}: {e}"),
                    }
                }
            }
        }
        println!(
            "{name} {mode} {snr} dB: {misses}/{frames} misses, {flagged} flagged, V={v}, \
             max expansions {max_exp}, max node computations {max_nc}, sources {sources:?}"
        );
    }
    Ok(())
}
