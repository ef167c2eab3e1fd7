//! Multilinear polynomials `Σ_S a(S) Π_{i∈S} x_i` with sparse coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set_function::SetFunction;
use crate::subset::{check_n, SubsetMask};

#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearPoly<T> {
    n: usize,
    coeffs: BTreeMap<u64, T>,
}

impl<T: Scalar> MultilinearPoly<T> {
    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(MultilinearPoly {
            n,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn constant(n: usize, c: T) -> Result<Self> {
        let mut p = Self::zero(n)?;
        p.add_term(SubsetMask::from_bits(0, n), c);
        Ok(p)
    }

    /// The monomial `v_S(x) = Π_{i∈S} x_i`.
    pub fn monomial(s: SubsetMask) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(s.bits(), T::one());
        MultilinearPoly { n: s.n(), coeffs }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (SubsetMask, T)>) -> Result<Self> {
        let mut p = Self::zero(n)?;
        for (s, c) in terms {
            if s.n() != n {
                return Err(Error::invalid(format!(
                    "term {s} belongs to a ground set of size {}, expected {n}",
                    s.n()
                )));
            }
            p.add_term(s, c);
        }
        Ok(p)
    }

    /// Coefficients read off a dense table (zeros dropped).
    pub fn from_set_function(a: &SetFunction<T>) -> Self {
        let coeffs = a.support().map(|(s, v)| (s.bits(), v.clone())).collect();
        MultilinearPoly { n: a.n(), coeffs }
    }

    pub fn to_set_function(&self) -> Result<SetFunction<T>> {
        let mut a = SetFunction::zeros(self.n)?;
        for (s, c) in self.terms() {
            a.set(s, c.clone());
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, s: SubsetMask) -> T {
        self.coeffs.get(&s.bits()).cloned().unwrap_or_else(T::zero)
    }

    pub fn set_coeff(&mut self, s: SubsetMask, c: T) {
        if c.is_zero() {
            self.coeffs.remove(&s.bits());
        } else {
            self.coeffs.insert(s.bits(), c);
        }
    }

    pub fn add_term(&mut self, s: SubsetMask, c: T) {
        let cur = self.coeff(s);
        self.set_coeff(s, cur + c);
    }

    /// Nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (SubsetMask, &T)> + '_ {
        let n = self.n;
        self.coeffs
            .iter()
            .map(move |(&b, c)| (SubsetMask::from_bits(b, n), c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest `|S|` with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms().map(|(s, _)| s.len()).max().unwrap_or(0)
    }

    /// Membership in `W_k`.
    pub fn in_space(&self, k: usize) -> bool {
        self.degree() <= k
    }

    /// Union of the variables that appear in some term.
    pub fn support(&self) -> SubsetMask {
        let bits = self.coeffs.keys().fold(0u64, |acc, b| acc | b);
        SubsetMask::from_bits(bits, self.n)
    }

    pub fn eval(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.n);
        let mut acc = T::zero();
        for (s, c) in self.terms() {
            let mut term = c.clone();
            for p in s.positions() {
                term = term * x[p].clone();
            }
            acc = acc + term;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        self.terms()
            .map(|(s, c)| s.positions().fold(c.to_f64(), |acc, p| acc * x[p]))
            .sum()
    }

    /// Mixed partial derivative `D^S`.
    pub fn partial(&self, s: SubsetMask) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&b, _)| b & s.bits() == s.bits())
            .map(|(&b, c)| (b & !s.bits(), c.clone()))
            .collect();
        MultilinearPoly { n: self.n, coeffs }
    }

    pub fn scale(&self, factor: &T) -> Self {
        let mut out = Self {
            n: self.n,
            coeffs: BTreeMap::new(),
        };
        for (s, c) in self.terms() {
            out.set_coeff(s, c.clone() * factor.clone());
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MultilinearPoly<U> {
        let mut out = MultilinearPoly {
            n: self.n,
            coeffs: BTreeMap::new(),
        };
        for (s, c) in self.terms() {
            out.set_coeff(s, f(c));
        }
        out
    }

    /// Relabels variables: the coefficient of `S` moves to `π(S)`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut out = Self::zero(self.n)?;
        for (s, c) in self.terms() {
            out.set_coeff(s.permuted(perm)?, c.clone());
        }
        Ok(out)
    }

    /// `∫_{[0,1]^n} p(x) dx`.
    pub fn integral(&self) -> T {
        let half = T::from_ratio(1, 2);
        self.terms()
            .map(|(s, c)| c.clone() * half.powi(s.len()))
            .fold(T::zero(), |a, b| a + b)
    }

    /// `∫_{[0,1]^n} p(x)² dx`, from `∫ v_S v_T = 2^{-|S△T|} 3^{-|S∩T|}`.
    pub fn square_integral(&self) -> T {
        let half = T::from_ratio(1, 2);
        let third = T::from_ratio(1, 3);
        let terms: Vec<_> = self.terms().collect();
        let mut acc = T::zero();
        for (s, a) in &terms {
            for (t, b) in &terms {
                let both = s.intersection(*t).len();
                let one = s.len() + t.len() - 2 * both;
                acc = acc + (*a).clone() * (*b).clone() * half.powi(one) * third.powi(both);
            }
        }
        acc
    }
}

impl<T: Scalar> Add for &MultilinearPoly<T> {
    type Output = MultilinearPoly<T>;
    fn add(self, rhs: &MultilinearPoly<T>) -> MultilinearPoly<T> {
        assert_eq!(self.n, rhs.n, "ground set mismatch");
        let mut out = self.clone();
        for (s, c) in rhs.terms() {
            out.add_term(s, c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &MultilinearPoly<T> {
    type Output = MultilinearPoly<T>;
    fn sub(self, rhs: &MultilinearPoly<T>) -> MultilinearPoly<T> {
        assert_eq!(self.n, rhs.n, "ground set mismatch");
        let mut out = self.clone();
        for (s, c) in rhs.terms() {
            out.add_term(s, -c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn m(n: usize, idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, idx).unwrap()
    }

    #[test]
    fn degree_and_partials() {
        let p = MultilinearPoly::from_terms(
            3,
            [(m(3, &[1, 2]), ratio(1, 1)), (m(3, &[3]), ratio(2, 1))],
        )
        .unwrap();
        assert_eq!(p.degree(), 2);
        assert!(p.in_space(2) && !p.in_space(1));
        let d1 = p.partial(m(3, &[1]));
        assert_eq!(d1.coeff(m(3, &[2])), ratio(1, 1));
        assert_eq!(d1.num_terms(), 1);
    }

    #[test]
    fn integrals_of_x1x2() {
        let p: MultilinearPoly<Rational> = MultilinearPoly::monomial(m(2, &[1, 2]));
        assert_eq!(p.integral(), ratio(1, 4));
        assert_eq!(p.square_integral(), ratio(1, 9));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut p = MultilinearPoly::constant(2, ratio(1, 1)).unwrap();
        p.add_term(m(2, &[]), ratio(-1, 1));
        assert_eq!(p.num_terms(), 0);
        assert_eq!(p.degree(), 0);
    }
}
