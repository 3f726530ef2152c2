//! Truncated power series in one formal variable with exact coefficients.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{rational_to_json, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Coefficients of `t^0..t^N`; the truncation order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set(&mut self, n: usize, c: Rational) {
        self.coeffs[n] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        PowerSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|i| &self.coeffs[i] * &other.coeffs[k - i]).sum())
            .collect();
        PowerSeries { coeffs }
    }

    /// `self / other`; needs an invertible constant term in `other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.coeffs[0].is_zero() {
            return Err(Error::InvalidMove("division by a series with zero constant term".into()));
        }
        let n = self.common_order(other);
        let mut q: Vec<Rational> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut c = self.coeffs[k].clone();
            for i in 1..=k {
                c -= &other.coeffs[i] * &q[k - i];
            }
            q.push(c / &other.coeffs[0]);
        }
        Ok(PowerSeries { coeffs: q })
    }

    /// Logarithm of a series with constant term 1, from `f' = g'/g`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InvalidMove("log needs constant term 1".into()));
        }
        let n = self.order();
        let mut f = vec![Rational::zero(); n + 1];
        for k in 1..=n {
            let mut c = Rational::from_integer(k.into()) * &self.coeffs[k];
            for j in 1..k {
                c -= Rational::from_integer(j.into()) * &f[j] * &self.coeffs[k - j];
            }
            f[k] = c / Rational::from_integer(k.into());
        }
        Ok(PowerSeries { coeffs: f })
    }

    /// Exponential of a series with zero constant term, from `h' = f' h`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidMove("exp needs zero constant term".into()));
        }
        let n = self.order();
        let mut h = vec![Rational::zero(); n + 1];
        h[0] = Rational::one();
        for k in 1..=n {
            let mut c = Rational::zero();
            for j in 1..=k {
                c += Rational::from_integer(j.into()) * &self.coeffs[j] * &h[k - j];
            }
            h[k] = c / Rational::from_integer(k.into());
        }
        Ok(PowerSeries { coeffs: h })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(rational_to_json).collect())
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, other: &PowerSeries) -> PowerSeries {
        let n = self.common_order(other);
        PowerSeries { coeffs: (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, other: &PowerSeries) -> PowerSeries {
        let n = self.common_order(other);
        PowerSeries { coeffs: (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, other: &PowerSeries) -> PowerSeries {
        PowerSeries::mul(self, other)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})h")?,
                _ => write!(f, "({c})h^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(h^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn s(v: &[i64]) -> PowerSeries {
        PowerSeries::new(v.iter().map(|&x| rat(x)).collect())
    }

    #[test]
    fn geometric_series() {
        let q = s(&[1, 0, 0, 0]).div(&s(&[1, -1, 0, 0])).unwrap();
        assert_eq!(q, s(&[1, 1, 1, 1]));
    }

    #[test]
    fn exp_of_t() {
        let e = s(&[0, 1, 0, 0, 0]).exp().unwrap();
        let expect: Vec<Rational> = vec![rat(1), rat(1), ratio(1, 2), ratio(1, 6), ratio(1, 24)];
        assert_eq!(e.coeffs(), &expect[..]);
    }

    #[test]
    fn log_exp_round_trip() {
        let f = PowerSeries::new(vec![rat(0), ratio(3, 2), ratio(-7, 5), rat(2), ratio(1, 9)]);
        assert_eq!(f.exp().unwrap().log().unwrap(), f);
        let g = &s(&[1, 2, 0, 0]) * &s(&[1, 0, 3, 0]);
        let lg = g.log().unwrap();
        let sum = &s(&[1, 2, 0, 0]).log().unwrap() + &s(&[1, 0, 3, 0]).log().unwrap();
        assert_eq!(lg, sum);
    }

    #[test]
    fn guards() {
        assert!(s(&[2, 1]).log().is_err());
        assert!(s(&[1, 1]).exp().is_err());
        assert!(s(&[1, 1]).div(&s(&[0, 1])).is_err());
    }
}
