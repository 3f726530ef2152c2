//! The Grassmann algebra on `c̄^1..c̄^l, c^1..c^l` and Berezin integration.
//!
//! Monomials are bitmasks over the `2l` generators, `c̄^i` at bit `i-1` and
//! `c^i` at bit `l+i-1`; the stored coefficient belongs to the product of the
//! generators in ascending bit order.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Rational;

/// At most 32 pairs so that masks fit in a `u64`.
pub const MAX_PAIRS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannPolynomial {
    pairs: usize,
    terms: BTreeMap<u64, Rational>,
}

impl GrassmannPolynomial {
    pub fn zero(pairs: usize) -> Self {
        assert!(pairs <= MAX_PAIRS, "too many generator pairs");
        GrassmannPolynomial { pairs, terms: BTreeMap::new() }
    }

    pub fn constant(pairs: usize, c: Rational) -> Self {
        let mut p = Self::zero(pairs);
        p.add_term(0, c);
        p
    }

    pub fn one(pairs: usize) -> Self {
        Self::constant(pairs, Rational::one())
    }

    /// `c^i`, one-based.
    pub fn c(pairs: usize, i: usize) -> Self {
        Self::monomial(pairs, pairs + i - 1)
    }

    /// `c̄^i`, one-based.
    pub fn cbar(pairs: usize, i: usize) -> Self {
        Self::monomial(pairs, i - 1)
    }

    fn monomial(pairs: usize, bit: usize) -> Self {
        assert!(bit < 2 * pairs, "generator index out of range");
        let mut p = Self::zero(pairs);
        p.add_term(1 << bit, Rational::one());
        p
    }

    /// `<c̄, Λ c> = sum_ij Λ_ij c̄^i c^j`.
    pub fn bilinear(lambda: &Matrix<Rational>) -> Self {
        let l = lambda.len();
        let mut p = Self::zero(l);
        for i in 0..l {
            for j in 0..l {
                if !lambda[i][j].is_zero() {
                    p.add_term((1 << i) | (1 << (l + j)), lambda[i][j].clone());
                }
            }
        }
        p
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, mask: u64) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, mask: u64, c: Rational) {
        let entry = self.terms.entry(mask).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.pairs);
        for (&m, v) in &self.terms {
            out.add_term(m, v * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of a homogeneous element, `None` if mixed or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.count_ones());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

/// Sign of concatenating sorted monomials `a` then `b` and re-sorting.
fn merge_sign(a: u64, b: u64) -> bool {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j >> 1).count_ones();
    }
    inversions % 2 == 1
}

pub fn grassmann_mul(p: &GrassmannPolynomial, q: &GrassmannPolynomial) -> Result<GrassmannPolynomial> {
    if p.pairs != q.pairs {
        return Err(Error::GeneratorMismatch(p.pairs, q.pairs));
    }
    let mut out = GrassmannPolynomial::zero(p.pairs);
    for (&a, ca) in &p.terms {
        for (&b, cb) in &q.terms {
            if a & b != 0 {
                continue;
            }
            let c = ca * cb;
            out.add_term(a | b, if merge_sign(a, b) { -c } else { c });
        }
    }
    Ok(out)
}

/// `sum_k p^k / k!` for an element with only even-degree, non-constant terms.
pub fn grassmann_exp(p: &GrassmannPolynomial) -> Result<GrassmannPolynomial> {
    if p.terms.contains_key(&0) {
        return Err(Error::NotEvenNilpotent("constant term present".into()));
    }
    if p.terms.keys().any(|m| m.count_ones() % 2 == 1) {
        return Err(Error::NotEvenNilpotent("odd-degree term present".into()));
    }
    let mut out = GrassmannPolynomial::one(p.pairs);
    let mut power = GrassmannPolynomial::one(p.pairs);
    let mut k = 0i64;
    loop {
        k += 1;
        power = grassmann_mul(&power, p)?.scale(&Rational::new(1.into(), k.into()));
        if power.is_zero() {
            return Ok(out);
        }
        out = &out + &power;
    }
}

/// The coefficient of `c̄^1 c^1 c̄^2 c^2 ... c̄^l c^l` in `p`.
///
/// With this normalisation `∫ exp(<c̄, Λ c>) = det Λ` for every `l`.
pub fn berezin_integral(p: &GrassmannPolynomial) -> Rational {
    let l = p.pairs;
    let mut reference = GrassmannPolynomial::one(l);
    for i in 1..=l {
        let pair = grassmann_mul(&GrassmannPolynomial::cbar(l, i), &GrassmannPolynomial::c(l, i)).expect("same generators");
        reference = grassmann_mul(&reference, &pair).expect("same generators");
    }
    let top = (1u64 << (2 * l)) - 1;
    let sign = reference.coefficient(top);
    p.coefficient(top) * sign
}

/// Iterated integration `∫ p dc^l ... dc^1 dc̄^l ... dc̄^1`, each `dθ`
/// acting on the integrand from the right (`∫ A θ dθ = A`).
///
/// Differs from [`berezin_integral`] by `(-1)^{l(l-1)/2}`.
pub fn berezin_iterated(p: &GrassmannPolynomial) -> Rational {
    let l = p.pairs;
    let order: Vec<usize> = (0..l).rev().map(|i| l + i).chain((0..l).rev()).collect();
    let mut terms = p.terms.clone();
    for bit in order {
        let mut next = BTreeMap::new();
        for (m, c) in terms {
            if m & (1 << bit) == 0 {
                continue;
            }
            // moving θ past the generators above it
            let above = (m >> bit >> 1).count_ones();
            let c = if above % 2 == 1 { -c } else { c };
            next.insert(m & !(1 << bit), c);
        }
        terms = next;
    }
    terms.get(&0).cloned().unwrap_or_else(Rational::zero)
}

impl Add for &GrassmannPolynomial {
    type Output = GrassmannPolynomial;
    fn add(self, other: &GrassmannPolynomial) -> GrassmannPolynomial {
        assert_eq!(self.pairs, other.pairs, "generator mismatch");
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl Mul for &GrassmannPolynomial {
    type Output = GrassmannPolynomial;
    fn mul(self, other: &GrassmannPolynomial) -> GrassmannPolynomial {
        grassmann_mul(self, other).expect("generator mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;
    use crate::rational::{rat, ratio};

    type G = GrassmannPolynomial;

    #[test]
    fn anticommutation() {
        let (c1, c2) = (G::c(2, 1), G::c(2, 2));
        assert!((&c1 * &c1).is_zero());
        assert_eq!(&c1 * &c2, (&c2 * &c1).scale(&rat(-1)));
        let cb = G::cbar(2, 1);
        assert_eq!(&cb * &c1, (&c1 * &cb).scale(&rat(-1)));
    }

    #[test]
    fn product_of_pairs() {
        let l = 2;
        let p1 = &G::one(l) + &(&G::c(l, 1) * &G::cbar(l, 1));
        let p2 = &G::one(l) + &(&G::c(l, 2) * &G::cbar(l, 2));
        let prod = &p1 * &p2;
        let a = &G::c(l, 1) * &G::cbar(l, 1);
        let b = &G::c(l, 2) * &G::cbar(l, 2);
        let expected = &(&(&G::one(l) + &a) + &b) + &(&a * &b);
        assert_eq!(prod, expected);
        assert_eq!(prod.terms().len(), 4);
    }

    #[test]
    fn exp_single_pair() {
        let lam = ratio(5, 3);
        let p = (&G::cbar(1, 1) * &G::c(1, 1)).scale(&lam);
        let e = grassmann_exp(&p).unwrap();
        assert_eq!(e, &G::one(1) + &p);
        assert_eq!(berezin_integral(&e), lam);
        assert_eq!(berezin_iterated(&e), lam);
        assert_eq!(grassmann_exp(&G::zero(3)).unwrap(), G::one(3));
    }

    #[test]
    fn exp_two_pairs() {
        let l = 2;
        let a = &G::cbar(l, 1) * &G::c(l, 1);
        let b = &G::cbar(l, 2) * &G::c(l, 2);
        let p = &a + &b;
        let expected = &(&G::one(l) + &p) + &(&a * &b);
        assert_eq!(grassmann_exp(&p).unwrap(), expected);
    }

    #[test]
    fn exp_rejects_bad_input() {
        assert!(grassmann_exp(&G::c(1, 1)).is_err());
        assert!(grassmann_exp(&G::one(1)).is_err());
    }

    #[test]
    fn integral_of_constant_is_zero() {
        for l in 1..4 {
            assert!(berezin_integral(&G::one(l)).is_zero());
        }
    }

    #[test]
    fn determinant_identity() {
        let lam: Matrix<Rational> = vec![
            vec![rat(2), rat(-1), rat(3)],
            vec![rat(0), rat(4), rat(1)],
            vec![rat(5), rat(2), rat(-2)],
        ];
        let e = grassmann_exp(&G::bilinear(&lam)).unwrap();
        let det = determinant(&lam);
        assert_eq!(berezin_integral(&e), det);
        assert_eq!(berezin_iterated(&e), -det);
    }

    #[test]
    fn iterated_order_sign() {
        let id: Matrix<Rational> = crate::linalg::identity(2);
        let e = grassmann_exp(&G::bilinear(&id)).unwrap();
        assert_eq!(berezin_integral(&e), rat(1));
        assert_eq!(berezin_iterated(&e), rat(-1));
    }

    #[test]
    fn mismatch() {
        assert!(matches!(grassmann_mul(&G::one(1), &G::one(2)), Err(Error::GeneratorMismatch(1, 2))));
    }
}
