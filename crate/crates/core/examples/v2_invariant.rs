//! The degree-two configuration-space integral on a few knots.
//!
//! Pass a sample count as the first argument (default 4e6).

use feynkit::cs::{double_edge_weight, v2_integral};
use feynkit::knot::{builtin, conway_a2};
use feynkit::mc::McConfig;

fn main() -> feynkit::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse::<f64>().ok()).unwrap_or(4e6) as u64;
    let cfg = McConfig::new(samples, 7);
    println!("{:<14} {:>10} {:>10} {:>18} {:>4}", "knot", "W_X/4", "W_Y/3", "v2", "a2");
    for name in ["circle", "unknot-torus", "trefoil", "trefoil-torus", "figure-eight"] {
        let knot = builtin(name)?;
        let est = v2_integral(&knot, &cfg, 1e-4)?;
        println!(
            "{name:<14} {:>10.4} {:>10.4} {:>10.4} ± {:.4} {:>4}",
            est.wx_quarter.value.value,
            est.wy_third.value.value,
            est.v2.value,
            est.v2.std_error,
            conway_a2(&knot, 0, 1)?
        );
    }
    let de = double_edge_weight(&builtin("trefoil")?, &McConfig::new(samples / 10, 3))?;
    println!("double-edge graph on the trefoil: {:.2e} ± {:.1e}", de.value, de.std_error);
    Ok(())
}
