//! A compact run of the oracle comparisons, sized by a sample budget.

use serde::Serialize;
use serde_json::{json, Value};

use crate::cs;
use crate::error::Result;
use crate::gaugefix::{self, OrbitIntegrand, QuadConfig, RadialIntegrand};
use crate::gauss::{partition_by_quadrature, shifted_partition, LinearSource, SymmetricForm};
use crate::graph::enumerate_contraction_graphs;
use crate::grassmann::{berezin_integral, grassmann_exp, GrassmannPolynomial};
use crate::jacobi::{named, JacobiQuotient};
use crate::knot::{builtin, combinatorial_linking, conway_a2, writhe_pushoff_selflinking};
use crate::linalg::determinant;
use crate::mc::McConfig;
use crate::perturb::{free_energy_series, partition_series_direct, partition_series_graphs, connected_vacuum_series, Potential};
use crate::rational::{rat, ratio};
use crate::wick::{moment, moment_via_recursion, pairing_count, MomentRequest};

pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, Value)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: json!({ "error": e.to_string() }) },
    }
}

/// Runs every check; Monte Carlo checks use at most `budget` samples each.
pub fn run(budget: u64, seed: u64) -> Vec<Check> {
    let mc = McConfig::new(budget.max(1000), seed);
    vec![
        check("gaussian-closed-form", || {
            let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 3]])?;
            let b = LinearSource::new(vec![rat(1), ratio(-1, 3)]);
            let exact = shifted_partition(&a, &b)?;
            let num = partition_by_quadrature(&a.entries_f64(), &[1.0, -1.0 / 3.0], 1e-8)?;
            Ok(((num - exact).abs() < 1e-6 * exact, json!({ "closed_form": exact, "quadrature": num })))
        }),
        check("wick-exact", || {
            let a = SymmetricForm::from_integers(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 3]])?;
            let req = MomentRequest::new(vec![1, 1, 2, 3, 3, 3]);
            let (p, r) = (moment(&a, &req)?, moment_via_recursion(&a, &req)?);
            Ok((p == r && pairing_count(12) == 10395, json!({ "pairings": p.to_string(), "recursion": r.to_string() })))
        }),
        check("graph-counts", || {
            let mut cubic: Vec<(u64, u64)> =
                enumerate_contraction_graphs(&[3], 2, 0)?.iter().map(|c| (c.automorphisms, c.multiplicity)).collect();
            cubic.sort();
            Ok((cubic == vec![(8, 9), (12, 6)], json!({ "cubic_order_two": cubic })))
        }),
        check("graphs-equal-direct", || {
            let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 2]])?;
            let u = Potential::from_monomials(2, &[(vec![3, 0], rat(1)), (vec![1, 2], ratio(-1, 2)), (vec![2, 2], ratio(1, 3))])?;
            let (g, d) = (partition_series_graphs(&a, &u, 3)?, partition_series_direct(&a, &u, 3)?);
            Ok((g == d, json!({ "series": g.to_json() })))
        }),
        check("free-energy", || {
            let a = SymmetricForm::from_integers(&[&[3]])?;
            let u = Potential::from_monomials(1, &[(vec![3], ratio(1, 2)), (vec![4], ratio(1, 5))])?;
            let (f, c) = (free_energy_series(&a, &u, 3)?, connected_vacuum_series(&a, &u, 3)?);
            Ok((f == c, json!({ "free_energy": f.to_json() })))
        }),
        check("berezin-determinant", || {
            let lambda = vec![vec![rat(2), rat(-1), rat(0)], vec![rat(3), rat(1), rat(4)], vec![rat(0), rat(5), rat(-2)]];
            let i = berezin_integral(&grassmann_exp(&GrassmannPolynomial::bilinear(&lambda))?);
            let d = determinant(&lambda);
            Ok((i == d, json!({ "integral": i.to_string(), "det": d.to_string() })))
        }),
        check("gauge-fixing", || {
            let cfg = QuadConfig::default();
            let r = gaugefix::rotation_example(RadialIntegrand::Gaussian, &cfg)?;
            let c1 = gaugefix::cstar_gauge_fixed(1, OrbitIntegrand::Gaussian, &cfg)?;
            let c2 = gaugefix::cstar_gauge_fixed(2, OrbitIntegrand::Gaussian, &cfg)?;
            let ok = r.rel_diff < 5e-3 && c1.rel_diff < 5e-3 && (c1.value - c2.value).abs() < 5e-3 * c1.value.abs();
            Ok((ok, json!({ "rotation": r.value, "cstar_alpha1": c1.value, "cstar_alpha2": c2.value })))
        }),
        check("linking-number", || {
            let hopf = builtin("hopf")?;
            let comb = combinatorial_linking(&hopf, 0, 1, seed)?;
            let est = cs::linking_integral(&hopf, 0, 1, &mc)?;
            Ok(((est.value - comb as f64).abs() < 0.1, json!({ "estimate": est, "oracle": comb })))
        }),
        check("self-linking", || {
            let link = builtin("circle-twist:1")?;
            let comb = writhe_pushoff_selflinking(&link, 0)?;
            let eps = crate::knot::default_pushoff_eps(&link, 0)?;
            let est = cs::self_linking_integral(&link, 0, eps, &mc)?;
            Ok(((est.value - comb as f64).abs() < 2e-2, json!({ "estimate": est, "oracle": comb })))
        }),
        check("v2-trefoil", || {
            let knot = builtin("trefoil")?;
            let oracle = conway_a2(&knot, 0, seed)?;
            let est = cs::v2_integral(&knot, &mc, 1e-4)?;
            let tol = 0.05 + 5.0 * est.v2.std_error;
            Ok(((est.v2.value - oracle as f64).abs() < tol, json!({ "estimate": est.v2, "oracle": oracle })))
        }),
        check("double-edge-vanishes", || {
            let ok = cs::double_edge_vanishes_exactly(&builtin("trefoil")?, 10, seed)?;
            Ok((ok, json!({ "exact_zero": ok })))
        }),
        check("jacobi", || {
            let q = JacobiQuotient::new(2, 1, true)?;
            let same = q.class_of(&named::x())? == q.class_of(&named::y())?;
            let t = JacobiQuotient::new(1, 1, false)?;
            let tadpole_zero = t.class_of(&named::tadpole())?.iter().all(num::Zero::is_zero);
            Ok((same && tadpole_zero && q.dimension() == 1, json!({ "x_equals_y": same, "tadpole_zero": tadpole_zero })))
        }),
    ]
}
