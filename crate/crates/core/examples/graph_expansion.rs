//! Perturbative series of a two-variable cubic+quartic model, by graphs and directly.

use feynkit::gauss::SymmetricForm;
use feynkit::graph::GraphCatalog;
use feynkit::perturb::{correlator_series, correlator_series_direct, graph_expansion, partition_series_direct, GraphFilter, Potential};
use feynkit::rational::{rat, ratio};

fn main() -> feynkit::Result<()> {
    let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 2]])?;
    let u = Potential::from_monomials(
        2,
        &[(vec![3, 0], rat(1)), (vec![1, 2], ratio(-1, 2)), (vec![4, 0], ratio(1, 3)), (vec![2, 2], ratio(1, 4))],
    )?;

    let mut catalog = GraphCatalog::new();
    let vacuum = graph_expansion(&a, &u, &[], 3, GraphFilter::All, &mut catalog)?;
    println!("Z / Z0 by graphs : {}", vacuum.series);
    println!("Z / Z0 directly  : {}", partition_series_direct(&a, &u, 3)?);
    for t in vacuum.terms.iter().filter(|t| t.order == 2) {
        println!("  order 2 graph {:<24} |Aut| = {:>2}  weight = {}", t.code, t.automorphisms, t.weight);
    }

    let legs = [1, 2];
    println!("<x1 x2> by graphs: {}", correlator_series(&a, &u, &legs, 2)?);
    println!("<x1 x2> directly : {}", correlator_series_direct(&a, &u, &legs, 2)?);
    Ok(())
}
