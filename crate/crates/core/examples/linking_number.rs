//! Gauss linking integral against crossing counts.

use feynkit::cs::{linking_integral, linking_integral_exact};
use feynkit::knot::{builtin, combinatorial_linking};
use feynkit::mc::McConfig;

fn main() -> feynkit::Result<()> {
    let cfg = McConfig::new(2_000_000, 11);
    for name in ["hopf", "split", "torus:2,4", "torus:2,6"] {
        let link = builtin(name)?;
        let mc = linking_integral(&link, 0, 1, &cfg)?;
        let exact = linking_integral_exact(&link, 0, 1)?;
        let counts: Vec<i64> = (0..5).map(|s| combinatorial_linking(&link, 0, 1, s)).collect::<Result<_, _>>()?;
        println!("{name:<10} MC {:+.4} ± {:.4}   segment sum {exact:+.6}   crossings {counts:?}", mc.value, mc.std_error);
    }
    Ok(())
}
