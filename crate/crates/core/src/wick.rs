//! Gaussian moments: explicit pairing sums, the derivative recursion, a
//! memoised multi-index table, and a Monte Carlo oracle.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gauss::SymmetricForm;
use crate::mc::{self, IntegralEstimate, McConfig};
use crate::rational::Rational;

/// Largest moment order the explicit pairing enumeration accepts.
pub const MAX_PAIRING_ORDER: usize = 16;

/// A perfect matching of `{1..m}`; pairs are sorted and listed by first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// The coordinate indices `i_1..i_m` (one-based, repeats allowed) of a moment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentRequest {
    indices: Vec<usize>,
}

impl MomentRequest {
    pub fn new(indices: Vec<usize>) -> Self {
        MomentRequest { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i == 0 || i > dim) {
            Some(&index) => Err(Error::IndexOutOfRange { index, dim }),
            None => Ok(()),
        }
    }
}

/// All pairings of `{1..m}`; empty for odd `m`, a single empty pairing for `m = 0`.
///
/// The smallest unused element is always paired first, which yields each
/// pairing exactly once in a canonical order.
pub fn enumerate_pairings(m: usize) -> Vec<Pairing> {
    if m % 2 == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut used = vec![false; m];
    let mut current = Vec::with_capacity(m / 2);
    pairings_rec(&mut used, &mut current, &mut out);
    out
}

fn pairings_rec(used: &mut [bool], current: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    let Some(first) = used.iter().position(|u| !u) else {
        out.push(Pairing { pairs: current.clone() });
        return;
    };
    used[first] = true;
    for second in first + 1..used.len() {
        if used[second] {
            continue;
        }
        used[second] = true;
        current.push((first + 1, second + 1));
        pairings_rec(used, current, out);
        current.pop();
        used[second] = false;
    }
    used[first] = false;
}

/// Visits every pairing of `0..m` (zero-based) without materialising the list.
pub(crate) fn for_each_pairing<F: FnMut(&[(usize, usize)])>(m: usize, mut f: F) {
    if m % 2 == 1 {
        return;
    }
    fn rec<F: FnMut(&[(usize, usize)])>(used: &mut [bool], cur: &mut Vec<(usize, usize)>, f: &mut F) {
        let Some(first) = used.iter().position(|u| !u) else {
            f(cur);
            return;
        };
        used[first] = true;
        for second in first + 1..used.len() {
            if used[second] {
                continue;
            }
            used[second] = true;
            cur.push((first, second));
            rec(used, cur, f);
            cur.pop();
            used[second] = false;
        }
        used[first] = false;
    }
    let mut used = vec![false; m];
    let mut cur = Vec::with_capacity(m / 2);
    rec(&mut used, &mut cur, &mut f);
}

/// `(2n)! / (2^n n!)`, the number of pairings of `2n` points.
pub fn pairing_count(m: usize) -> u128 {
    if m % 2 == 1 {
        return 0;
    }
    (1..m as u128).step_by(2).product()
}

/// `<x^{i_1}, ..., x^{i_m}>` as the sum over pairings of products of propagators.
pub fn moment(a: &SymmetricForm, req: &MomentRequest) -> Result<Rational> {
    req.validate(a.dim())?;
    let m = req.indices().len();
    if m > MAX_PAIRING_ORDER {
        return Err(Error::SizeGuard(format!("moment order {m} > {MAX_PAIRING_ORDER}")));
    }
    let idx: Vec<usize> = req.indices().iter().map(|i| i - 1).collect();
    let mut total = Rational::zero();
    for_each_pairing(m, |pairs| {
        let mut term = Rational::one();
        for &(p, q) in pairs {
            term *= a.prop(idx[p], idx[q]);
        }
        total += term;
    });
    Ok(total)
}

/// Polynomial in the source variables `b`, keyed by exponent vectors.
type SourcePoly = BTreeMap<Vec<u32>, Rational>;

/// Evaluates `P_{i_1..i_m}(0)` where `P` is built by applying
/// `(d/db_j + sum_i A^{ji} b_i)` to the constant 1, innermost index last.
pub fn moment_via_recursion(a: &SymmetricForm, req: &MomentRequest) -> Result<Rational> {
    req.validate(a.dim())?;
    let d = a.dim();
    let mut poly: SourcePoly = BTreeMap::new();
    poly.insert(vec![0; d], Rational::one());
    for &j in req.indices().iter().rev() {
        let j = j - 1;
        let mut next: SourcePoly = BTreeMap::new();
        for (exps, c) in &poly {
            if exps[j] > 0 {
                let mut e = exps.clone();
                e[j] -= 1;
                let add = c * Rational::from_integer(exps[j].into());
                *next.entry(e).or_insert_with(Rational::zero) += add;
            }
            for i in 0..d {
                let p = a.prop(j, i);
                if p.is_zero() {
                    continue;
                }
                let mut e = exps.clone();
                e[i] += 1;
                *next.entry(e).or_insert_with(Rational::zero) += c * p;
            }
        }
        next.retain(|_, c| !c.is_zero());
        poly = next;
    }
    Ok(poly.get(&vec![0; d]).cloned().unwrap_or_else(Rational::zero))
}

/// Memoised moments `<x^alpha>` of monomials given by exponent vectors.
///
/// Uses `<x_i x^beta> = sum_j A^{ij} beta_j <x^{beta - e_j}>`, which is Wick's
/// theorem with the first factor's partner singled out.
pub struct MomentTable<'a> {
    form: &'a SymmetricForm,
    memo: HashMap<Vec<u32>, Rational>,
}

impl<'a> MomentTable<'a> {
    pub fn new(form: &'a SymmetricForm) -> Self {
        MomentTable { form, memo: HashMap::new() }
    }

    pub fn get(&mut self, exps: &[u32]) -> Rational {
        let total: u32 = exps.iter().sum();
        if total == 0 {
            return Rational::one();
        }
        if total % 2 == 1 {
            return Rational::zero();
        }
        if let Some(v) = self.memo.get(exps) {
            return v.clone();
        }
        let i = exps.iter().position(|&e| e > 0).expect("non-zero degree");
        let mut beta = exps.to_vec();
        beta[i] -= 1;
        let mut acc = Rational::zero();
        for j in 0..beta.len() {
            if beta[j] == 0 {
                continue;
            }
            let p = self.form.prop(i, j).clone();
            if p.is_zero() {
                continue;
            }
            let mult = Rational::from_integer(beta[j].into());
            beta[j] -= 1;
            let sub = self.get(&beta);
            beta[j] += 1;
            acc += p * mult * sub;
        }
        self.memo.insert(exps.to_vec(), acc.clone());
        acc
    }
}

/// Monte Carlo estimate of the normalised Gaussian integral of
/// `x^{i_1} ... x^{i_m}`, sampling `x = L z` with `L L^T = A^{-1}`.
pub fn moment_oracle_numeric(
    a: &SymmetricForm,
    req: &MomentRequest,
    config: &McConfig,
) -> Result<IntegralEstimate> {
    req.validate(a.dim())?;
    let chol = cholesky(&a.inverse_f64())
        .ok_or_else(|| Error::NotPositiveDefinite { minor: 0, value: "float Cholesky".into() })?;
    let d = a.dim();
    let idx: Vec<usize> = req.indices().iter().map(|i| i - 1).collect();
    let acc = mc::run(config, |rng, acc| {
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let x: Vec<f64> = (0..d)
            .map(|i| (0..=i).map(|k| chol[i][k] * z[k]).sum())
            .collect();
        acc.push(idx.iter().map(|&i| x[i]).product());
    })?;
    Ok(IntegralEstimate::from_accumulator(&acc, config.seed))
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = m[i][i] - s;
                if v <= 0.0 {
                    return None;
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}
