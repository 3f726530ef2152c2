//! Berezin integration of exp(<c̄, Λ c>) reproduces det Λ.

use feynkit::grassmann::{berezin_integral, berezin_iterated, grassmann_exp, GrassmannPolynomial};
use feynkit::linalg::determinant;
use feynkit::rational::rat;

fn main() -> feynkit::Result<()> {
    let lambda: Vec<Vec<_>> = [[2, -1, 0, 1], [3, 1, 4, 0], [0, 5, -2, 1], [1, 0, 1, 1]]
        .iter()
        .map(|row| row.iter().map(|&x| rat(x)).collect())
        .collect();
    let integrand = grassmann_exp(&GrassmannPolynomial::bilinear(&lambda))?;
    println!("terms in exp(<c̄, Λ c>): {}", integrand.terms().len());
    println!("Berezin integral        : {}", berezin_integral(&integrand));
    println!("iterated in other order : {}", berezin_iterated(&integrand));
    println!("det Λ                   : {}", determinant(&lambda));
    Ok(())
}
