use tailbiting::codebook::{conv_tbt, ConvCodeSpec};
use tailbiting::oracle::per_subtrellis_viterbi;
use tailbiting::trellis::from_spanned_matrix;

fn main() -> tailbiting::Result<()> {
    for (gens, circle) in [(vec![0o133, 0o171], 48), (vec![0o35, 0o31], 20), (vec![0o7, 0o5], 8)] {
        let spec = ConvCodeSpec::new(gens.clone(), circle)?;
        let t = conv_tbt(&spec)?;
        let baseline = per_subtrellis_viterbi(&t, &vec![1.0; t.total_width()])?;
        println!(
            "{:o}/{:o} m={} L={}: V = {}, {} start states, {} edges, per-subtrellis Viterbi updates {}",
            gens[0],
            gens[1],
            spec.memory,
            circle,
            t.total_states(),
            t.num_subtrellises(),
            t.total_edges(),
            baseline.updates
        );
        let g = spec.spanned_matrix()?;
        println!("  spanned generator: {} linear rows, {} circular rows", g.l(), g.c());
        if circle <= 20 {
            let merged = from_spanned_matrix(&g)?.merge_sections(spec.rate_inverse())?;
            println!("  product construction merged to {} sections: V = {}", merged.n(), merged.total_states());
        }
    }
    Ok(())
}
