//! Faddeev-Popov gauge fixing on two small examples: rotations of the plane
//! and the scaling action of `C*` on `C^2`.
//!
//! Deltas are replaced by Gaussians of width `ε`, evaluated for a halving
//! sequence of widths, and extrapolated to `ε → 0`.

use std::f64::consts::PI;

use num::complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{determinant, rank, Matrix};
use crate::quad::{integrate, integrate_to_infinity};
use crate::rational::{rat, Rational};

/// Gaussian nascent delta on the line.
pub fn nascent_delta(t: f64, eps: f64) -> f64 {
    (-0.5 * (t / eps).powi(2)).exp() / ((2.0 * PI).sqrt() * eps)
}

/// Gaussian nascent delta on the plane.
pub fn nascent_delta2(re: f64, im: f64, eps: f64) -> f64 {
    (-0.5 * (re * re + im * im) / (eps * eps)).exp() / (2.0 * PI * eps * eps)
}

/// Extrapolates values taken at `ε, ε/2, ε/4, ...` assuming an even error
/// expansion in `ε`.
pub fn richardson(values: &[f64]) -> f64 {
    let mut row = values.to_vec();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    row.first().copied().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadConfig {
    pub epsilons: Vec<f64>,
    pub tol: f64,
    /// Truncation radius for the `C^2` integrals, in units of `|x_2|`.
    pub radius: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { epsilons: vec![0.1, 0.05, 0.025], tol: 1e-10, radius: 12.0 }
    }
}

impl QuadConfig {
    fn check(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
            return Err(Error::Quadrature("ε sequence must be non-empty with 0 < ε < 0.5".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonPoint {
    pub epsilon: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeFixReport {
    pub example: String,
    pub integrand: String,
    pub alpha: Option<u32>,
    pub value: f64,
    pub epsilon_trace: Vec<EpsilonPoint>,
    pub direct_value: f64,
    pub rel_diff: f64,
    pub truncation_error: f64,
}

/// Test integrands for the rotation example, each a function of `|x|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialIntegrand {
    /// `exp(-r^2/2)`
    Gaussian,
    /// indicator of `r < 1`
    UnitDisk,
    /// `r^2 exp(-r^2)`
    QuadraticGaussian,
}

impl RadialIntegrand {
    pub const ALL: [RadialIntegrand; 3] =
        [RadialIntegrand::Gaussian, RadialIntegrand::UnitDisk, RadialIntegrand::QuadraticGaussian];

    pub fn eval(self, r: f64) -> f64 {
        match self {
            RadialIntegrand::Gaussian => (-0.5 * r * r).exp(),
            RadialIntegrand::UnitDisk => f64::from(u8::from(r < 1.0)),
            RadialIntegrand::QuadraticGaussian => r * r * (-r * r).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RadialIntegrand::Gaussian => "gaussian",
            RadialIntegrand::UnitDisk => "unit-disk",
            RadialIntegrand::QuadraticGaussian => "r2-gaussian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown integrand {s:?}")))
    }

    /// Radii where the integrand is not smooth.
    fn breaks(self) -> Vec<f64> {
        match self {
            RadialIntegrand::UnitDisk => vec![1.0],
            _ => vec![],
        }
    }
}

/// `J(x) = 2π|x|` for the rotation action with gauge `F = x_2` on the right
/// half-plane.
///
/// The point is rotated onto the section `(|x|, 0)`; there the fibre
/// coordinate `x_2` relates to the angle by `dφ = x_1 |x|^{-2} dx_2`, and the
/// group measure is `dφ / 2π`.
pub fn fp_jacobian_rotation(x: [f64; 2]) -> Result<f64> {
    let r = x[0].hypot(x[1]);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::DegenerateOrbit);
    }
    let (x1, x2) = (r, 0.0);
    let dphi_dx2 = x1 / (x1 * x1 + x2 * x2);
    let j_inv = dphi_dx2 / (2.0 * PI);
    Ok(1.0 / j_inv)
}

/// `J(x)^{-1}` from the regularised orbit integral
/// `(1/2π) ∫ δ_ε(F(φx)) dφ` over the half of the orbit with `x_1 > 0`.
pub fn fp_inverse_numeric(x: [f64; 2], eps: f64, tol: f64) -> Result<f64> {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(Error::DegenerateOrbit);
    }
    let half = PI / 2.0;
    let w = (8.0 * eps / r).min(half);
    let v = integrate(|phi| nascent_delta(r * phi.sin(), eps), -w, w, &[0.0], tol)?;
    Ok(v / (2.0 * PI))
}

/// Rejects radial functions for which `∫ f(r) r dr` visibly diverges.
fn check_radial<F: Fn(f64) -> f64>(f: &F) -> Result<()> {
    let tails: Vec<f64> = [1e3, 1e4, 1e5].iter().map(|&r| (f(r) * r * r).abs()).collect();
    let decreasing = tails.windows(2).all(|w| w[1] <= w[0]);
    if tails.iter().any(|t| !t.is_finite()) || (tails[2] > 1e-3 && !decreasing) {
        return Err(Error::Divergent(format!("r^2 f(r) at large r: {tails:?}")));
    }
    let near = f(1e-9) * 1e-9;
    if !near.is_finite() {
        return Err(Error::Divergent("f(r) r is not finite near 0".into()));
    }
    Ok(())
}

/// `2π ∫_0^∞ f(r) r dr`.
pub fn polar_integral<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    check_radial(&f)?;
    let last = breaks.iter().copied().fold(0.0, f64::max);
    let inner = if last > 0.0 { integrate(|r| f(r) * r, 0.0, last, breaks, tol)? } else { 0.0 };
    let outer = integrate_to_infinity(|r| f(r) * r, last, 1.0, tol)?;
    Ok(2.0 * PI * (inner + outer))
}

/// `∫_{x_1 > 0} f(|x|) 2π|x| δ_ε(x_2) d^2x` for one width `ε`.
pub fn gauge_fixed_rotation_at<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], eps: f64, tol: f64) -> Result<f64> {
    let window = 8.0 * eps;
    let slice = |x2: f64| -> f64 {
        let radial_breaks: Vec<f64> =
            breaks.iter().filter(|&&b| b > x2.abs()).map(|&b| (b * b - x2 * x2).sqrt()).collect();
        let g = |x1: f64| {
            let r = x1.hypot(x2);
            f(r) * fp_jacobian_rotation([x1, x2]).unwrap_or(0.0)
        };
        let last = radial_breaks.iter().copied().fold(0.0, f64::max);
        let inner = if last > 0.0 { integrate(g, 0.0, last, &radial_breaks, tol) } else { Ok(0.0) };
        let outer = integrate_to_infinity(g, last, 1.0, tol);
        match (inner, outer) {
            (Ok(a), Ok(b)) => (a + b) * nascent_delta(x2, eps),
            _ => f64::NAN,
        }
    };
    integrate(slice, -window, window, &[0.0], tol)
}

/// The gauge-fixed rotation integral, extrapolated in `ε`, against the polar
/// formula.
pub fn gauge_fixed_integral_rotation<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<GaugeFixReport> {
    cfg.check()?;
    check_radial(&f)?;
    let trace = cfg
        .epsilons
        .iter()
        .map(|&eps| Ok(EpsilonPoint { epsilon: eps, value: gauge_fixed_rotation_at(&f, breaks, eps, cfg.tol)? }))
        .collect::<Result<Vec<_>>>()?;
    let value = richardson(&trace.iter().map(|p| p.value).collect::<Vec<_>>());
    let direct_value = polar_integral(&f, breaks, cfg.tol)?;
    Ok(GaugeFixReport {
        example: "rotation-R2".into(),
        integrand: String::new(),
        alpha: None,
        value,
        epsilon_trace: trace,
        direct_value,
        rel_diff: (value - direct_value).abs() / direct_value.abs(),
        truncation_error: 0.0,
    })
}

/// Rotation example for one of the built-in integrands.
pub fn rotation_example(f: RadialIntegrand, cfg: &QuadConfig) -> Result<GaugeFixReport> {
    let mut r = gauge_fixed_integral_rotation(|r| f.eval(r), &f.breaks(), cfg)?;
    r.integrand = f.name().into();
    Ok(r)
}

/// Functions of `z = x_1/x_2` integrated over the orbit space of `C^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitIntegrand {
    /// `exp(-|z|^2 / 2)`
    Gaussian,
    /// indicator of `|z| < 1`
    UnitDisk,
}

impl OrbitIntegrand {
    pub fn eval(self, z_abs2: f64) -> f64 {
        match self {
            OrbitIntegrand::Gaussian => (-0.5 * z_abs2).exp(),
            OrbitIntegrand::UnitDisk => f64::from(u8::from(z_abs2 < 1.0)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrbitIntegrand::Gaussian => "gaussian",
            OrbitIntegrand::UnitDisk => "unit-disk",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(OrbitIntegrand::Gaussian),
            "unit-disk" => Ok(OrbitIntegrand::UnitDisk),
            _ => Err(Error::Parse(format!("unknown integrand {s:?}"))),
        }
    }
}

/// `∫ dz dz̄ (1 + |z|^2)^{-2} h(z)` in polar coordinates, with `dz dz̄` read
/// as the plane measure. Returns the value and a bound on the part beyond
/// `|z| = radius`.
pub fn cstar_direct(h: OrbitIntegrand, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let g = |r: f64| r * h.eval(r * r) / (1.0 + r * r).powi(2);
    match h {
        OrbitIntegrand::UnitDisk => Ok((2.0 * PI * integrate(g, 0.0, 1.0, &[], cfg.tol)?, 0.0)),
        OrbitIntegrand::Gaussian => {
            let big_r = cfg.radius;
            let v = integrate(g, 0.0, big_r, &[1.0], cfg.tol)?;
            let tail = 2.0 * PI * (-0.5 * big_r * big_r).exp() / (1.0 + big_r * big_r).powi(2);
            Ok((2.0 * PI * v, tail))
        }
    }
}

/// Gauge-fixed integral for `F = x_2^α - 1` at one width `ε`.
///
/// The integrand is the invariant measure `d^4x / (|x_1|^2 + |x_2|^2)^2`
/// times `h(x_1/x_2) δ²_ε(x_2^α - 1) det Λ`, with `det Λ = α^2 |x_2|^{2α}`.
/// The `x_2` integral runs over the sector `|arg x_2| < π/α`, which contains
/// one root of `x_2^α = 1`.
pub fn cstar_gauge_fixed_at(alpha: u32, h: OrbitIntegrand, eps: f64, cfg: &QuadConfig) -> Result<f64> {
    if alpha == 0 {
        return Err(Error::InvalidMove("gauge exponent α must be positive".into()));
    }
    let a = f64::from(alpha);
    let reach = 8.0 * eps;
    let s_lo = (1.0 - reach).max(0.0).powf(1.0 / a);
    let s_hi = (1.0 + reach).powf(1.0 / a);
    let theta_max = (reach.min(1.0).asin() / a).min(PI / a);
    let tol = cfg.tol;
    let big_r = cfg.radius;
    // radial integral over x_1 = ρ e^{iψ}, the ψ integral giving 2π
    let over_x1 = |s: f64| -> f64 {
        let g = |rho: f64| rho * h.eval(rho * rho / (s * s)) / (rho * rho + s * s).powi(2);
        let res = match h {
            OrbitIntegrand::UnitDisk => integrate(g, 0.0, s, &[], tol),
            OrbitIntegrand::Gaussian => integrate(g, 0.0, big_r * s, &[s], tol),
        };
        res.map(|v| 2.0 * PI * v).unwrap_or(f64::NAN)
    };
    let over_theta = |s: f64| -> f64 {
        let w = |theta: f64| {
            let (re, im) = ((a * theta).cos() * s.powf(a) - 1.0, (a * theta).sin() * s.powf(a));
            nascent_delta2(re, im, eps)
        };
        integrate(w, -theta_max, theta_max, &[0.0], tol).unwrap_or(f64::NAN)
    };
    let over_s = |s: f64| -> f64 {
        let det_lambda = a * a * s.powf(2.0 * a);
        s * det_lambda * over_x1(s) * over_theta(s)
    };
    integrate(over_s, s_lo, s_hi, &[1.0], tol)
}

/// The `C^2` gauge-fixed integral extrapolated in `ε`, with the direct
/// orbit-space value for comparison.
pub fn cstar_gauge_fixed(alpha: u32, h: OrbitIntegrand, cfg: &QuadConfig) -> Result<GaugeFixReport> {
    cfg.check()?;
    let trace = cfg
        .epsilons
        .iter()
        .map(|&eps| Ok(EpsilonPoint { epsilon: eps, value: cstar_gauge_fixed_at(alpha, h, eps, cfg)? }))
        .collect::<Result<Vec<_>>>()?;
    let value = richardson(&trace.iter().map(|p| p.value).collect::<Vec<_>>());
    let (direct_value, truncation_error) = cstar_direct(h, cfg)?;
    Ok(GaugeFixReport {
        example: "cstar-C2".into(),
        integrand: h.name().into(),
        alpha: Some(alpha),
        value,
        epsilon_trace: trace,
        direct_value,
        rel_diff: (value - direct_value).abs() / direct_value.abs(),
        truncation_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticFormReport {
    pub rank_a: usize,
    pub det_a_f: String,
    pub a_f_nondegenerate: bool,
    pub a_f_top_block: [[i64; 2]; 2],
}

type C = Complex<Rational>;

fn c(re: i64, im: i64) -> C {
    Complex::new(rat(re), rat(im))
}

/// The quadratic form of the `C^2` example before gauge fixing, in the
/// coordinates `(x_1', x̄_1', x_2', x̄_2')`.
pub fn cstar_quadratic_form() -> Matrix<C> {
    let mut a = vec![vec![c(0, 0); 4]; 4];
    a[0][1] = c(1, 0);
    a[1][0] = c(1, 0);
    a
}

/// The supplemented form with the multipliers `ξ, ξ̄` appended.
pub fn cstar_supplemented_form() -> Matrix<C> {
    let mut a = vec![vec![c(0, 0); 6]; 6];
    a[0][1] = c(1, 0);
    a[1][0] = c(1, 0);
    a[2][4] = c(0, 1);
    a[4][2] = c(0, 1);
    a[3][5] = c(0, -1);
    a[5][3] = c(0, -1);
    a
}

pub fn quadratic_form_check() -> QuadraticFormReport {
    let a = cstar_quadratic_form();
    let af = cstar_supplemented_form();
    let det = determinant(&af);
    let top = |i: usize, j: usize| -> i64 {
        let re = &af[i][j].re;
        assert!(re.is_integer(), "integer entries");
        re.to_integer().try_into().expect("small entries")
    };
    QuadraticFormReport {
        rank_a: rank(&a),
        det_a_f: if det.im == rat(0) { det.re.to_string() } else { format!("{} + {}i", det.re, det.im) },
        a_f_nondegenerate: det != c(0, 0),
        a_f_top_block: [[top(0, 0), top(0, 1)], [top(1, 0), top(1, 1)]],
    }
}
