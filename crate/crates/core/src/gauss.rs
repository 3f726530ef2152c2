//! Exact quadratic forms and closed-form Gaussian partition functions.

use std::f64::consts::PI;

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{rational_to_json, to_f64, Rational};

/// A symmetric positive-definite matrix together with its exact inverse.
///
/// The inverse entries are the propagators of every graph expansion built on
/// top of this form.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricForm {
    entries: Matrix<Rational>,
    inverse: Matrix<Rational>,
    det: Rational,
}

impl SymmetricForm {
    /// Validates symmetry and positive-definiteness (all leading principal
    /// minors positive) and computes the inverse once.
    pub fn new(entries: Matrix<Rational>) -> Result<Self> {
        let d = entries.len();
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for row in &entries {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
        }
        for i in 0..d {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        for k in 1..=d {
            let minor: Matrix<Rational> =
                entries[..k].iter().map(|r| r[..k].to_vec()).collect();
            let m = linalg::determinant(&minor);
            if !m.is_positive() {
                return Err(Error::NotPositiveDefinite { minor: k, value: m.to_string() });
            }
        }
        let det = linalg::determinant(&entries);
        let inverse = linalg::inverse(&entries).expect("positive-definite matrix is invertible");
        Ok(SymmetricForm { entries, inverse, det })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::rational::rat(x)).collect())
                .collect(),
        )
    }

    pub fn identity(d: usize) -> Self {
        Self::new(linalg::identity(d)).expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &Matrix<Rational> {
        &self.entries
    }

    /// The propagator matrix `A^{-1}`.
    pub fn inverse(&self) -> &Matrix<Rational> {
        &self.inverse
    }

    pub fn determinant(&self) -> &Rational {
        &self.det
    }

    /// Inverse entry with zero-based indices; callers have already validated.
    pub(crate) fn prop(&self, i: usize, j: usize) -> &Rational {
        &self.inverse[i][j]
    }

    pub fn inverse_f64(&self) -> Vec<Vec<f64>> {
        self.inverse.iter().map(|r| r.iter().map(to_f64).collect()).collect()
    }

    pub fn entries_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(to_f64).collect()).collect()
    }

    /// Parses `{"dim": d, "entries": [[...], ...]}` with integer or `"p/q"` entries.
    pub fn from_json(v: &Value) -> Result<Self> {
        Self::new(crate::rational::square_matrix_from_json(v)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim(),
            "entries": self.entries.iter()
                .map(|r| r.iter().map(rational_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// A linear source term `b` added to the exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSource(Vec<Rational>);

impl LinearSource {
    pub fn new(entries: Vec<Rational>) -> Self {
        LinearSource(entries)
    }

    pub fn zero(d: usize) -> Self {
        LinearSource(vec![Rational::zero(); d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }
}

/// `Z_0 = (det(A / 2 pi))^{-1/2}`; the determinant is exact, only the final
/// root is taken in floating point.
pub fn gaussian_partition(a: &SymmetricForm) -> f64 {
    let d = a.dim() as f64;
    (2.0 * PI).powf(d / 2.0) / to_f64(a.determinant()).sqrt()
}

/// The exact exponent `1/2 <b, A^{-1} b>` of the shifted partition function.
pub fn source_exponent(a: &SymmetricForm, b: &LinearSource) -> Result<Rational> {
    if b.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let mut acc = Rational::zero();
    for (i, bi) in b.entries().iter().enumerate() {
        for (j, bj) in b.entries().iter().enumerate() {
            acc += bi * a.prop(i, j) * bj;
        }
    }
    Ok(acc / crate::rational::rat(2))
}

/// `Z_b = Z_0 exp(1/2 <b, A^{-1} b>)`.
pub fn shifted_partition(a: &SymmetricForm, b: &LinearSource) -> Result<f64> {
    let e = source_exponent(a, b)?;
    if e.is_zero() {
        return Ok(gaussian_partition(a));
    }
    Ok(gaussian_partition(a) * to_f64(&e).exp())
}

/// The two-point function `<x^i, x^j> = (A^{-1})_{ij}` with one-based indices.
pub fn propagator_entry(a: &SymmetricForm, i: usize, j: usize) -> Result<Rational> {
    let d = a.dim();
    for idx in [i, j] {
        if idx == 0 || idx > d {
            return Err(Error::IndexOutOfRange { index: idx, dim: d });
        }
    }
    Ok(a.prop(i - 1, j - 1).clone())
}

/// Numerical oracle: `∫ exp(-<Ax,x>/2 + <b,x>) dx` by nested quadrature
/// over the real line, one coordinate at a time. Intended for `d <= 3`.
pub fn partition_by_quadrature(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<f64> {
    let d = a.len();
    if b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
    }
    if d > 3 {
        return Err(Error::SizeGuard(format!("nested quadrature in {d} dimensions")));
    }
    fn level(a: &[Vec<f64>], b: &[f64], x: &[f64], tol: f64) -> Result<f64> {
        let d = a.len();
        let k = x.len();
        if k == d {
            let mut e = 0.0;
            for i in 0..d {
                e += b[i] * x[i];
                for j in 0..d {
                    e -= 0.5 * a[i][j] * x[i] * x[j];
                }
            }
            return Ok(e.exp());
        }
        let scale = 1.0 / a[k][k].sqrt();
        let err = std::cell::RefCell::new(None);
        // x = s t / (1 - t^2) maps (-1, 1) onto the line in one piece
        let v = crate::quad::integrate(
            |t: f64| {
                let w = 1.0 - t * t;
                if w <= 0.0 {
                    return 0.0;
                }
                let mut y = x.to_vec();
                y.push(scale * t / w);
                let f = level(a, b, &y, tol).unwrap_or_else(|e| {
                    *err.borrow_mut() = Some(e);
                    0.0
                });
                let v = f * scale * (1.0 + t * t) / (w * w);
                if v.is_finite() { v } else { 0.0 }
            },
            -1.0,
            1.0,
            &[],
            tol,
        )?;
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
    level(a, b, &[], tol)
}

/// Exact check that `A A^{-1} = I`.
pub fn inverse_is_exact(a: &SymmetricForm) -> bool {
    let prod = linalg::mat_mul(a.entries(), a.inverse());
    prod.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn one_dimensional_gauss_integral() {
        let a = SymmetricForm::from_integers(&[&[1]]).unwrap();
        assert!((gaussian_partition(&a) - (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn identity_in_two_dimensions() {
        let a = SymmetricForm::identity(2);
        assert!((gaussian_partition(&a) - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn diagonal_form() {
        let a = SymmetricForm::from_integers(&[&[2, 0], &[0, 3]]).unwrap();
        let expected = 2.0 * PI / 6f64.sqrt();
        assert!((gaussian_partition(&a) - expected).abs() < 1e-13);
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        assert!(matches!(
            SymmetricForm::from_integers(&[&[1, 2], &[2, 1]]),
            Err(Error::NotPositiveDefinite { minor: 2, .. })
        ));
        assert!(matches!(
            SymmetricForm::from_integers(&[&[0]]),
            Err(Error::NotPositiveDefinite { minor: 1, .. })
        ));
        assert!(matches!(
            SymmetricForm::from_integers(&[&[2, 1], &[0, 2]]),
            Err(Error::NotSymmetric(1, 0))
        ));
    }

    #[test]
    fn shifted_by_zero_is_unshifted() {
        let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 3]]).unwrap();
        let z = shifted_partition(&a, &LinearSource::zero(2)).unwrap();
        assert_eq!(z, gaussian_partition(&a));
    }

    #[test]
    fn shifted_scalar() {
        let a = SymmetricForm::from_integers(&[&[1]]).unwrap();
        let z = shifted_partition(&a, &LinearSource::new(vec![rat(1)])).unwrap();
        assert!((z - (2.0 * PI).sqrt() * 0.5f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn shifted_diagonal_exponent_is_three_quarters() {
        let a = SymmetricForm::from_integers(&[&[1, 0], &[0, 2]]).unwrap();
        let b = LinearSource::new(vec![rat(1), rat(1)]);
        assert_eq!(source_exponent(&a, &b).unwrap(), ratio(3, 4));
        let z = shifted_partition(&a, &b).unwrap();
        let expected = 2.0 * PI / 2f64.sqrt() * 0.75f64.exp();
        assert!((z - expected).abs() < 1e-12);
        assert!(shifted_partition(&a, &LinearSource::zero(3)).is_err());
    }

    #[test]
    fn propagator_entries() {
        let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 1]]).unwrap();
        assert_eq!(propagator_entry(&a, 1, 1).unwrap(), rat(1));
        assert_eq!(propagator_entry(&a, 1, 2).unwrap(), rat(-1));
        assert_eq!(propagator_entry(&a, 2, 2).unwrap(), rat(2));
        assert!(inverse_is_exact(&a));
        let s = SymmetricForm::from_integers(&[&[2]]).unwrap();
        assert_eq!(propagator_entry(&s, 1, 1).unwrap(), ratio(1, 2));
        assert!(propagator_entry(&s, 2, 1).is_err());
        assert!(propagator_entry(&s, 0, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = serde_json::json!({"dim": 2, "entries": [[2, "1/2"], ["1/2", 1]]});
        let a = SymmetricForm::from_json(&v).unwrap();
        assert_eq!(a.entries()[0][1], ratio(1, 2));
        assert_eq!(SymmetricForm::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn quadrature_oracle_matches_closed_form() {
        let a = SymmetricForm::from_integers(&[&[3, 1, 0], &[1, 2, 1], &[0, 1, 2]]).unwrap();
        let b = LinearSource::new(vec![rat(1), ratio(-1, 2), rat(0)]);
        let num = partition_by_quadrature(&a.entries_f64(), &[1.0, -0.5, 0.0], 1e-5).unwrap();
        let exact = shifted_partition(&a, &b).unwrap();
        assert!((num - exact).abs() < 1e-4 * exact, "{num} vs {exact}");
    }
}
