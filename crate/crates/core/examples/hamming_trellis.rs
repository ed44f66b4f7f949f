//! The (7,4) Hamming code on a four-start tail-biting trellis: spans, zero
//! runs, subtrellis cosets and merging intervals.

use tailbiting::codebook::hamming74;
use tailbiting::gf2::zero_run;
use tailbiting::oracle::enumerate_path_labels;

fn main() -> tailbiting::Result<()> {
    let (g, t) = hamming74();
    println!("generator with spans (0-based):");
    for (row, span) in g.rows() {
        let run = match zero_run(row, span, g.n()) {
            Ok(z) => format!("zero run {z}"),
            Err(_) => String::new(),
        };
        println!("  {row}  [{},{}] {:?} {run}", span.lo, span.hi, span.kind);
    }
    let v = g.intersection_property();
    println!("intersection property: {} witness {:?}", v.holds, v.witness.map(|w| w.to_string()));

    println!(
        "\ntrellis: {} sections, states per time {:?}, V = {}, {} edges, {} subtrellises",
        t.n(),
        t.v_counts(),
        t.total_states(),
        t.total_edges(),
        t.num_subtrellises()
    );
    let labels = enumerate_path_labels(&t.unroll())?;
    for i in 0..t.num_subtrellises() {
        let words: Vec<String> = labels
            .iter()
            .filter(|p| p.start == i && p.end == i)
            .map(|p| p.label.to_string())
            .collect();
        println!("  T{i}: {}", words.join(" "));
    }
    for i in 0..t.num_subtrellises() {
        for j in i + 1..t.num_subtrellises() {
            let m = t.merging_interval(i, j)?;
            println!("  merging interval T{i}/T{j}: {}", m.map_or("none".into(), |m| m.to_string()));
        }
    }
    println!("\n{}", t.to_text());
    Ok(())
}
