//! The logarithm of the partition function keeps only connected vacuum graphs.

use feynkit::gauss::SymmetricForm;
use feynkit::perturb::{connected_vacuum_series, free_energy_series, partition_series_graphs, Potential};
use feynkit::rational::{ratio, rat};

fn main() -> feynkit::Result<()> {
    let a = SymmetricForm::from_integers(&[&[1]])?;
    let u = Potential::from_monomials(1, &[(vec![3], rat(1)), (vec![4], ratio(1, 2))])?;

    let z = partition_series_graphs(&a, &u, 4)?;
    let f = free_energy_series(&a, &u, 4)?;
    let c = connected_vacuum_series(&a, &u, 4)?;
    println!("Z / Z0          = {z}");
    println!("log(Z / Z0)     = {f}");
    println!("connected sum   = {c}");
    println!("exp(connected)  = {}", c.exp()?);
    Ok(())
}
