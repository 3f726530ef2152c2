//! Framed self-linking, and the unframed writhe integral that is not an isotopy invariant.

use feynkit::cs::{self_linking_integral, writhe_exact, writhe_integral};
use feynkit::knot::{builtin, default_pushoff_eps, writhe_pushoff_selflinking};
use feynkit::mc::McConfig;

fn main() -> feynkit::Result<()> {
    let cfg = McConfig::new(1_000_000, 5);
    for twists in [0, 1, -2] {
        let link = builtin(&format!("circle-twist:{twists}"))?;
        let eps = default_pushoff_eps(&link, 0)?;
        let est = self_linking_integral(&link, 0, eps, &cfg)?;
        let count = writhe_pushoff_selflinking(&link, 0)?;
        println!("circle with {twists:+} twists: integral {:+.4} ± {:.4}   push-off count {count:+}", est.value, est.std_error);
    }

    // Both curves are unknots; the chord integral still differs between them.
    for name in ["circle", "unknot-torus"] {
        let link = builtin(name)?;
        let w = writhe_integral(&link, 0, &cfg)?;
        println!("writhe of {name:<13} MC {:+.4} ± {:.4}   segment sum {:+.5}", w.value, w.std_error, writhe_exact(&link, 0)?);
    }
    Ok(())
}
