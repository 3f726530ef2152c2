//! Closed-form Gaussian integrals checked against nested quadrature.

use feynkit::gauss::{gaussian_partition, partition_by_quadrature, shifted_partition, LinearSource, SymmetricForm};
use feynkit::rational::{rat, ratio};

fn main() -> feynkit::Result<()> {
    let a = SymmetricForm::from_integers(&[&[3, 1, 0], &[1, 2, 1], &[0, 1, 4]])?;
    let b = LinearSource::new(vec![rat(1), ratio(-1, 2), rat(0)]);

    let z0 = gaussian_partition(&a);
    let zb = shifted_partition(&a, &b)?;
    let q0 = partition_by_quadrature(&a.entries_f64(), &[0.0; 3], 1e-6)?;
    let qb = partition_by_quadrature(&a.entries_f64(), &[1.0, -0.5, 0.0], 1e-6)?;

    println!("det A = {}", a.determinant());
    println!("Z(A)    closed form {z0:.10}   quadrature {q0:.10}");
    println!("Z(A, b) closed form {zb:.10}   quadrature {qb:.10}");
    Ok(())
}
