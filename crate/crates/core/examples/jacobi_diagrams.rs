//! Jacobi diagrams of low degree and their quotient by AS, STU and IHX.

use feynkit::jacobi::{enumerate_jacobi, named, quotient_dimension, JacobiQuotient};
use feynkit::rational::Rational;

fn show(class: &[Rational]) -> String {
    let parts: Vec<String> = class.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn main() -> feynkit::Result<()> {
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let count = enumerate_jacobi(n, m)?.len();
        println!(
            "degree {n}, {m} circle(s): {count:>2} diagrams, dimension {} ({} with the one-term relation)",
            quotient_dimension(n, m, false)?,
            quotient_dimension(n, m, true)?
        );
    }

    let q = JacobiQuotient::new(2, 1, false)?;
    for (label, d) in [("X", named::x()), ("parallel", named::parallel()), ("Y", named::y()), ("double edge", named::double_edge())] {
        println!("[{label:<11}] = {}", show(&q.class_of(&d)?));
    }
    let framed = JacobiQuotient::new(2, 1, true)?;
    println!("with one-term: [X] = {}, [Y] = {}", show(&framed.class_of(&named::x())?), show(&framed.class_of(&named::y())?));
    let t = JacobiQuotient::new(1, 1, false)?;
    println!("tadpole class: {}", show(&t.class_of(&named::tadpole())?));
    Ok(())
}
