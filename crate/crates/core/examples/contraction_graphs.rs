//! Graphs produced by Wick contraction, with automorphism counts.

use feynkit::graph::{automorphism_count, enumerate_contraction_graphs, vertex_symmetry_factor};

fn main() -> feynkit::Result<()> {
    let cases: [(&str, &[usize], usize, usize); 4] = [
        ("two cubic vertices", &[3], 2, 0),
        ("one quartic vertex", &[4], 1, 0),
        ("one quartic vertex, two legs", &[4], 1, 2),
        ("cubic + quartic, order 3", &[3, 4], 2, 0),
    ];
    for (label, valences, n, legs) in cases {
        println!("{label}:");
        for class in enumerate_contraction_graphs(valences, n, legs)? {
            let aut = automorphism_count(&class.graph)?;
            let vsf = vertex_symmetry_factor(class.graph.valences());
            println!(
                "  {:<28} |Aut| = {:>3}  pairings = {:>4}  vertex factor = {vsf}",
                class.code, aut, class.multiplicity
            );
        }
    }
    Ok(())
}
