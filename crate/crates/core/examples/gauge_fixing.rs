//! Faddeev-Popov gauge fixing for the rotation action on the plane and the C* action on C^2.

use feynkit::gaugefix::{cstar_gauge_fixed, quadratic_form_check, rotation_example, OrbitIntegrand, QuadConfig, RadialIntegrand};

fn main() -> feynkit::Result<()> {
    let cfg = QuadConfig::default();
    for f in RadialIntegrand::ALL {
        let r = rotation_example(f, &cfg)?;
        println!("rotation  {:<10} Z_GF = {:.8}  direct = {:.8}  rel diff = {:.1e}", f.name(), r.value, r.direct_value, r.rel_diff);
    }
    for alpha in [1, 2] {
        let r = cstar_gauge_fixed(alpha, OrbitIntegrand::Gaussian, &cfg)?;
        println!("C^2 alpha={alpha}  Z_GF = {:.8}  direct = {:.8}", r.value, r.direct_value);
        for p in &r.epsilon_trace {
            println!("    eps = {:<7} value = {:.8}", p.epsilon, p.value);
        }
    }
    println!("{}", serde_json::to_string_pretty(&quadratic_form_check())?);
    Ok(())
}
