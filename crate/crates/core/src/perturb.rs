//! Perturbative expansion of `Z_U / Z_0` and of correlators, both from the
//! direct Wick expansion of `exp(hU)` and from sums over Feynman graphs.
//!
//! Potentials use the symmetric normalisation
//! `U(x) = sum_k (1/k!) <u_k, x^{⊗k}>`, which makes the graph sum weight each
//! graph by `1/|Aut|`.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gauss::SymmetricForm;
use crate::graph::{
    coordinate_covector, graph_weight, is_connected, is_vacuum, unflatten, GraphCatalog, SymTensor, WeightSystem,
};
use crate::rational::{factorial, rational_from_json, rational_to_json, Rational};
use crate::series::PowerSeries;
use crate::wick::MomentTable;

/// Highest total polynomial degree the direct expansion will take moments of.
pub const MAX_DIRECT_DEGREE: usize = 28;

/// Polynomial in `x` keyed by exponent vectors.
pub type Polynomial = BTreeMap<Vec<u32>, Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    dim: usize,
    terms: BTreeMap<usize, SymTensor>,
}

impl Potential {
    pub fn new(dim: usize, terms: BTreeMap<usize, SymTensor>) -> Result<Self> {
        for (&k, t) in &terms {
            if k < 3 {
                return Err(Error::InvalidGraph(format!("potential term of degree {k} < 3")));
            }
            if t.dim() != dim || t.rank() != k {
                return Err(Error::DimensionMismatch { expected: dim, got: t.dim() });
            }
        }
        Ok(Potential { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        Potential { dim, terms: BTreeMap::new() }
    }

    /// Converts raw monomial coefficients `c_alpha x^alpha` to tensors with
    /// `u_alpha = c_alpha * alpha!`.
    pub fn from_monomials(dim: usize, monomials: &[(Vec<u32>, Rational)]) -> Result<Self> {
        let mut by_degree: BTreeMap<usize, BTreeMap<Vec<u32>, Rational>> = BTreeMap::new();
        for (exps, c) in monomials {
            if exps.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: exps.len() });
            }
            let k = exps.iter().sum::<u32>() as usize;
            *by_degree.entry(k).or_default().entry(exps.clone()).or_insert_with(Rational::zero) += c;
        }
        let mut terms = BTreeMap::new();
        for (k, coeffs) in by_degree {
            let t = SymTensor::from_fn(dim, k, |sorted| {
                let exps = exponents_of(sorted, dim);
                match coeffs.get(&exps) {
                    Some(c) => c * multi_factorial(&exps),
                    None => Rational::zero(),
                }
            });
            terms.insert(k, t);
        }
        Potential::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valences(&self) -> Vec<usize> {
        self.terms.keys().copied().collect()
    }

    pub fn tensor(&self, k: usize) -> Option<&SymTensor> {
        self.terms.get(&k)
    }

    /// `U` as an ordinary polynomial, `c_alpha = u_alpha / alpha!`.
    pub fn monomials(&self) -> Polynomial {
        let mut out = Polynomial::new();
        for (&k, t) in &self.terms {
            for exps in exponent_vectors(self.dim, k) {
                let idx = indices_of(&exps);
                let c = t.get(&idx) / multi_factorial(&exps);
                if !c.is_zero() {
                    out.insert(exps, c);
                }
            }
        }
        out
    }

    pub fn weight_system(&self, a: &SymmetricForm) -> Result<WeightSystem> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: self.dim });
        }
        WeightSystem::from_form(a, self.terms.clone())
    }

    /// Accepts `{"dim": d, "3": tensor, "4": tensor}` with nested-array or flat
    /// tensors (symmetrised on input), or
    /// `{"dim": d, "monomials": [{"exponents": [...], "coefficient": "p/q"}]}`.
    /// `dim` may be omitted when a tensor is given as nested arrays.
    pub fn from_json(v: &Value) -> Result<Self> {
        let inferred = v.as_object().and_then(|o| {
            o.iter().filter(|(k, _)| k.parse::<usize>().is_ok()).find_map(|(_, t)| match t {
                Value::Array(rows) if rows.first().is_some_and(Value::is_array) => Some(rows.len() as u64),
                _ => None,
            })
        });
        let dim = v["dim"]
            .as_u64()
            .or(inferred)
            .ok_or_else(|| Error::Parse("potential: missing \"dim\"".into()))? as usize;
        if let Some(list) = v.get("monomials") {
            let list = list.as_array().ok_or_else(|| Error::Parse("potential: monomials must be a list".into()))?;
            let monos = list
                .iter()
                .map(|m| {
                    let exps = m["exponents"]
                        .as_array()
                        .ok_or_else(|| Error::Parse("monomial: missing exponents".into()))?
                        .iter()
                        .map(|e| e.as_u64().map(|x| x as u32).ok_or_else(|| Error::Parse("bad exponent".into())))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((exps, rational_from_json(&m["coefficient"])?))
                })
                .collect::<Result<Vec<_>>>()?;
            return Potential::from_monomials(dim, &monos);
        }
        let obj = v.as_object().ok_or_else(|| Error::Parse("potential must be an object".into()))?;
        let mut terms = BTreeMap::new();
        for (key, val) in obj {
            if key == "dim" {
                continue;
            }
            let k: usize = key.parse().map_err(|_| Error::Parse(format!("potential: unexpected key {key:?}")))?;
            let mut flat = Vec::new();
            flatten_json(val, &mut flat)?;
            terms.insert(k, SymTensor::symmetrized(dim, k, flat)?);
        }
        Potential::new(dim, terms)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("dim".into(), json!(self.dim));
        for (k, t) in &self.terms {
            obj.insert(k.to_string(), Value::Array(t.data().iter().map(rational_to_json).collect()));
        }
        Value::Object(obj)
    }
}

fn flatten_json(v: &Value, out: &mut Vec<Rational>) -> Result<()> {
    match v {
        Value::Array(items) => items.iter().try_for_each(|x| flatten_json(x, out)),
        other => {
            out.push(rational_from_json(other)?);
            Ok(())
        }
    }
}

fn exponents_of(sorted_idx: &[usize], dim: usize) -> Vec<u32> {
    let mut e = vec![0u32; dim];
    for &i in sorted_idx {
        e[i] += 1;
    }
    e
}

fn indices_of(exps: &[u32]) -> Vec<usize> {
    exps.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
}

fn multi_factorial(exps: &[u32]) -> Rational {
    exps.iter().map(|&e| factorial(e as usize)).product()
}

/// All exponent vectors of length `dim` with total degree `k`.
pub fn exponent_vectors(dim: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    for flat in 0..dim.pow(k as u32) {
        unflatten(flat, dim, &mut idx);
        if idx.windows(2).all(|w| w[0] <= w[1]) {
            out.push(exponents_of(&idx, dim));
        }
    }
    out
}

pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let mut out = Polynomial::new();
    for (a, ca) in p {
        for (b, cb) in q {
            let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn gaussian_expectation(table: &mut MomentTable<'_>, p: &Polynomial) -> Rational {
    p.iter().map(|(e, c)| c * table.get(e)).sum()
}

fn check_dims(a: &SymmetricForm, u: &Potential) -> Result<()> {
    if a.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: u.dim() });
    }
    Ok(())
}

fn check_degree(u: &Potential, order: usize, legs: usize) -> Result<()> {
    let top = u.valences().last().copied().unwrap_or(0) * order + legs;
    if top > MAX_DIRECT_DEGREE {
        return Err(Error::SizeGuard(format!("direct expansion degree {top} > {MAX_DIRECT_DEGREE}")));
    }
    Ok(())
}

/// `sum_n h^n/n! <x^{i_1}..x^{i_m} U^n>` from Gaussian moments.
fn direct_numerator(a: &SymmetricForm, u: &Potential, legs: &[usize], order: usize) -> Result<PowerSeries> {
    check_dims(a, u)?;
    check_degree(u, order, legs.len())?;
    let mut insertion = vec![0u32; a.dim()];
    for &i in legs {
        if i == 0 || i > a.dim() {
            return Err(Error::IndexOutOfRange { index: i, dim: a.dim() });
        }
        insertion[i - 1] += 1;
    }
    let monos = u.monomials();
    let mut power = Polynomial::from([(insertion, Rational::one())]);
    let mut table = MomentTable::new(a);
    let mut out = PowerSeries::zero(order);
    for n in 0..=order {
        out.set(n, gaussian_expectation(&mut table, &power) / factorial(n));
        if n < order {
            power = poly_mul(&power, &monos);
        }
    }
    Ok(out)
}

/// `Z_U / Z_0` to order `h^order`, through moments of powers of `U`.
pub fn partition_series_direct(a: &SymmetricForm, u: &Potential, order: usize) -> Result<PowerSeries> {
    direct_numerator(a, u, &[], order)
}

/// The correlator as the quotient of the direct numerator by `Z_U / Z_0`.
pub fn correlator_series_direct(a: &SymmetricForm, u: &Potential, legs: &[usize], order: usize) -> Result<PowerSeries> {
    direct_numerator(a, u, legs, order)?.div(&partition_series_direct(a, u, order)?)
}

/// Which graphs a graph sum keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFilter {
    All,
    NonVacuum,
    ConnectedVacuum,
}

/// One graph's contribution `h^|Γ| W_Γ / |Aut Γ|`.
#[derive(Clone, Debug, Serialize)]
pub struct GraphTerm {
    pub order: usize,
    pub code: String,
    pub automorphisms: u64,
    pub multiplicity: u64,
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub contribution: Rational,
    pub connected: bool,
    pub vacuum: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug)]
pub struct GraphExpansion {
    pub series: PowerSeries,
    pub terms: Vec<GraphTerm>,
}

/// Sums `W_Γ / |Aut Γ|` over graphs with the given legs (one-based coordinate
/// indices), grouped by order.
pub fn graph_expansion(
    a: &SymmetricForm,
    u: &Potential,
    legs: &[usize],
    order: usize,
    filter: GraphFilter,
    catalog: &mut GraphCatalog,
) -> Result<GraphExpansion> {
    check_dims(a, u)?;
    let d = a.dim();
    let covectors = legs
        .iter()
        .map(|&i| {
            if i == 0 || i > d {
                Err(Error::IndexOutOfRange { index: i, dim: d })
            } else {
                Ok(coordinate_covector(d, i - 1))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let ws = u.weight_system(a)?;
    let valences = u.valences();
    let mut series = PowerSeries::zero(order);
    let mut terms = Vec::new();
    for n in 0..=order {
        let mut total = Rational::zero();
        for class in catalog.get(&valences, n, legs.len())? {
            let g = &class.graph;
            let vacuum = is_vacuum(g);
            let connected = is_connected(g);
            let keep = match filter {
                GraphFilter::All => true,
                GraphFilter::NonVacuum => !vacuum,
                GraphFilter::ConnectedVacuum => vacuum && connected && g.degree() > 0,
            };
            if !keep {
                continue;
            }
            let weight = graph_weight(g, &ws, &covectors)?;
            let contribution = &weight / Rational::from_integer(class.automorphisms.into());
            total += &contribution;
            terms.push(GraphTerm {
                order: n,
                code: class.code.clone(),
                automorphisms: class.automorphisms,
                multiplicity: class.multiplicity,
                weight,
                contribution,
                connected,
                vacuum,
            });
        }
        series.set(n, total);
    }
    Ok(GraphExpansion { series, terms })
}

/// `Z_U / Z_0` as the sum over all vacuum graphs.
pub fn partition_series_graphs(a: &SymmetricForm, u: &Potential, order: usize) -> Result<PowerSeries> {
    Ok(graph_expansion(a, u, &[], order, GraphFilter::All, &mut GraphCatalog::new())?.series)
}

/// The normalised correlator as a sum over graphs with no vacuum component.
pub fn correlator_series(a: &SymmetricForm, u: &Potential, legs: &[usize], order: usize) -> Result<PowerSeries> {
    Ok(graph_expansion(a, u, legs, order, GraphFilter::NonVacuum, &mut GraphCatalog::new())?.series)
}

/// `log(Z_U / Z_0)` computed by series arithmetic on the full graph sum.
pub fn free_energy_series(a: &SymmetricForm, u: &Potential, order: usize) -> Result<PowerSeries> {
    partition_series_graphs(a, u, order)?.log()
}

/// Sum over connected vacuum graphs only.
pub fn connected_vacuum_series(a: &SymmetricForm, u: &Potential, order: usize) -> Result<PowerSeries> {
    Ok(graph_expansion(a, u, &[], order, GraphFilter::ConnectedVacuum, &mut GraphCatalog::new())?.series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn x_cubed() -> Potential {
        Potential::from_monomials(1, &[(vec![3], rat(1))]).unwrap()
    }

    #[test]
    fn monomial_conversion() {
        assert_eq!(x_cubed().tensor(3).unwrap().get(&[0, 0, 0]), &rat(6));
        let q = Potential::from_monomials(1, &[(vec![4], rat(1))]).unwrap();
        assert_eq!(q.tensor(4).unwrap().get(&[0, 0, 0, 0]), &rat(24));
        let mixed = Potential::from_monomials(2, &[(vec![2, 1], ratio(1, 2)), (vec![0, 3], rat(2))]).unwrap();
        assert_eq!(mixed.tensor(3).unwrap().get(&[0, 1, 0]), &rat(1));
        assert_eq!(mixed.monomials(), Polynomial::from([(vec![2, 1], ratio(1, 2)), (vec![0, 3], rat(2))]));
    }

    #[test]
    fn cubic_one_dimensional() {
        let a = SymmetricForm::identity(1);
        let direct = partition_series_direct(&a, &x_cubed(), 2).unwrap();
        assert_eq!(direct.coeff(0), &rat(1));
        assert!(direct.coeff(1).is_zero());
        assert_eq!(direct.coeff(2), &ratio(15, 2));
        let ex = graph_expansion(&a, &x_cubed(), &[], 2, GraphFilter::All, &mut GraphCatalog::new()).unwrap();
        assert_eq!(ex.series, direct);
        let mut parts: Vec<_> = ex.terms.iter().filter(|t| t.order == 2).map(|t| t.contribution.clone()).collect();
        parts.sort();
        assert_eq!(parts, vec![rat(3), ratio(9, 2)]);
    }

    #[test]
    fn cubic_scales_with_propagator() {
        let a = SymmetricForm::from_integers(&[&[2]]).unwrap();
        let s = partition_series_graphs(&a, &x_cubed(), 2).unwrap();
        assert_eq!(s.coeff(2), &(ratio(15, 2) * ratio(1, 8)));
        assert_eq!(s, partition_series_direct(&a, &x_cubed(), 2).unwrap());
    }

    #[test]
    fn quartic_first_order() {
        let a = SymmetricForm::from_integers(&[&[3]]).unwrap();
        let u = Potential::from_monomials(1, &[(vec![4], rat(1))]).unwrap();
        let s = partition_series_graphs(&a, &u, 1).unwrap();
        assert_eq!(s.coeff(1), &ratio(3, 9));
        assert_eq!(s, partition_series_direct(&a, &u, 1).unwrap());
    }

    #[test]
    fn order_zero_and_free_theory() {
        let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 2]]).unwrap();
        let u = Potential::from_monomials(2, &[(vec![1, 2], rat(1))]).unwrap();
        assert_eq!(partition_series_graphs(&a, &u, 0).unwrap(), PowerSeries::one(0));
        let c = correlator_series(&a, &Potential::zero(2), &[1, 2, 2, 2], 2).unwrap();
        let m = crate::wick::moment(&a, &crate::wick::MomentRequest::new(vec![1, 2, 2, 2])).unwrap();
        assert_eq!(c.coeffs(), &[m, rat(0), rat(0)]);
        assert!(free_energy_series(&a, &u, 0).unwrap().coeff(0).is_zero());
    }

    #[test]
    fn correlator_matches_quotient() {
        let a = SymmetricForm::from_integers(&[&[3, 1], &[1, 2]]).unwrap();
        let u = Potential::from_monomials(2, &[(vec![3, 0], rat(1)), (vec![1, 2], rat(-2)), (vec![2, 2], ratio(1, 3))])
            .unwrap();
        for legs in [vec![1, 2], vec![1], vec![2, 2, 1]] {
            let g = correlator_series(&a, &u, &legs, 3).unwrap();
            let d = correlator_series_direct(&a, &u, &legs, 3).unwrap();
            assert_eq!(g, d, "legs {legs:?}");
        }
    }

    #[test]
    fn free_energy_is_connected_sum() {
        let a = SymmetricForm::identity(1);
        let f = free_energy_series(&a, &x_cubed(), 4).unwrap();
        assert_eq!(f, connected_vacuum_series(&a, &x_cubed(), 4).unwrap());
        let full = partition_series_graphs(&a, &x_cubed(), 4).unwrap();
        assert_ne!(full.coeff(4), f.coeff(4));
    }

    #[test]
    fn json_forms() {
        let v = json!({"dim": 2, "3": [[[1, 0], [0, 0]], [[0, 0], [0, "1/2"]]]});
        let p = Potential::from_json(&v).unwrap();
        assert_eq!(p.tensor(3).unwrap().get(&[0, 0, 0]), &rat(1));
        assert_eq!(p.tensor(3).unwrap().get(&[1, 1, 1]), &ratio(1, 2));
        assert_eq!(Potential::from_json(&p.to_json()).unwrap(), p);
        let no_dim = json!({"3": [[[1, 0], [0, 0]], [[0, 0], [0, "1/2"]]]});
        assert_eq!(Potential::from_json(&no_dim).unwrap(), p);
        let m = json!({"dim": 1, "monomials": [{"exponents": [3], "coefficient": 1}]});
        assert_eq!(Potential::from_json(&m).unwrap(), x_cubed());
    }
}
