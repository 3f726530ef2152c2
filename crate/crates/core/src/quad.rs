//! Thin wrappers over double-exponential quadrature: breakpoints, half-lines,
//! and nesting.

use crate::error::{Error, Result};

/// Integrates `f` over `[a, b]`, splitting at the given interior breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in pts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let out = quadrature::integrate(&f, w[0], w[1], tol);
        if !out.integral.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite value on [{}, {}]",
                w[0], w[1]
            )));
        }
        total += out.integral;
    }
    Ok(total)
}

/// Integrates `f` over `[a, inf)` through `x = a + s t / (1 - t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let x = a + scale * t / (1.0 - t);
        let v = f(x) * scale / ((1.0 - t) * (1.0 - t));
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, &[], tol)
}

/// Integrates over the whole real line.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, scale: f64, tol: f64) -> Result<f64> {
    let right = integrate_to_infinity(&f, 0.0, scale, tol)?;
    let left = integrate_to_infinity(|x| f(-x), 0.0, scale, tol)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_on_real_line() {
        let v = integrate_real_line(|x| (-0.5 * x * x).exp(), 1.0, 1e-12).unwrap();
        assert!((v - (2.0 * PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let v = integrate(|x| if x < 0.3 { 1.0 } else { 2.0 }, 0.0, 1.0, &[0.3], 1e-12).unwrap();
        assert!((v - 1.7).abs() < 1e-10);
    }
}
