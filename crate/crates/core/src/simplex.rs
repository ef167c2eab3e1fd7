//! Exact integrals of Choquet integrals over the cube.
//!
//! On each ordering simplex a Choquet integral is affine in the order
//! statistics, so `∫ f²` reduces to monomial integrals over
//! `0 ≤ y_1 ≤ … ≤ y_m ≤ 1`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::quadrature::permutations;
use crate::scalar::{ratio, Rational};
use crate::set_function::SetFunction;

/// Largest `n` handled by [`choquet_square_integral_simplex`].
pub const MAX_SIMPLEX_N: usize = 6;

/// `∫_{0≤y_1≤…≤y_m≤1} Π_k y_k^{e_k} dy = Π_k 1 / (k + e_1 + … + e_k)`.
pub fn ordered_simplex_monomial(exps: &[usize]) -> Rational {
    let mut acc = Rational::one();
    let mut partial = 0usize;
    for (k, &e) in exps.iter().enumerate() {
        partial += e;
        acc /= ratio((k + 1 + partial) as i64, 1);
    }
    acc
}

/// `∫ f²` for `f = Σ_T a(T) min_{i∈T} x_i`, summed over the `n!` ordering simplices.
pub fn choquet_square_integral_simplex(a: &SetFunction<Rational>) -> Result<Rational> {
    let n = a.n();
    if n > MAX_SIMPLEX_N {
        return Err(Error::invalid(format!(
            "simplex decomposition is limited to n <= {MAX_SIMPLEX_N}"
        )));
    }
    // Monomial integrals shared by every simplex: index 0 is the constant.
    let mut second = vec![vec![Rational::zero(); n + 1]; n + 1];
    for j in 0..=n {
        let mut e = vec![0usize; n];
        if j > 0 {
            e[j - 1] += 1;
        }
        for k in 0..=n {
            let mut e2 = e.clone();
            if k > 0 {
                e2[k - 1] += 1;
            }
            second[j][k] = ordered_simplex_monomial(&e2);
        }
    }
    let support: Vec<_> = a.support().map(|(t, c)| (t, c.clone())).collect();
    let mut total = Rational::zero();
    for sigma in permutations(n) {
        let mut rank = vec![0usize; n];
        for (k, &axis) in sigma.iter().enumerate() {
            rank[axis] = k;
        }
        let mut c = vec![Rational::zero(); n + 1];
        for (t, coef) in &support {
            let slot = t.positions().map(|p| rank[p] + 1).min().unwrap_or(0);
            c[slot] += coef;
        }
        for j in 0..=n {
            if c[j].is_zero() {
                continue;
            }
            for k in 0..=n {
                if !c[k].is_zero() {
                    total += &c[j] * &c[k] * &second[j][k];
                }
            }
        }
    }
    Ok(total)
}

/// `E[min_A · min_B]` for independent uniforms, with `min_∅ = 1`.
pub fn min_product_moment(only_a: usize, shared: usize, only_b: usize) -> Rational {
    let (a, p, b) = (only_a as i64, shared as i64, only_b as i64);
    let tail = ratio(1, p + a + b + 2);
    ratio(1, a + 1) * (ratio(1, p + b + 1) - &tail) + ratio(1, b + 1) * (ratio(1, p + a + 1) - tail)
}

/// `∫ f²` from pairwise moments of minima; any `n` with a dense table.
pub fn choquet_square_integral_pairwise(a: &SetFunction<Rational>) -> Rational {
    let support: Vec<_> = a.support().collect();
    let mut total = Rational::zero();
    for (s, cs) in &support {
        for (t, ct) in &support {
            let shared = s.intersection(*t).len();
            let m = min_product_moment(s.len() - shared, shared, t.len() - shared);
            total += *cs * *ct * m;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::SubsetMask;

    #[test]
    fn simplex_volume_and_order_statistics() {
        assert_eq!(ordered_simplex_monomial(&[0, 0, 0]), ratio(1, 6));
        // E[U_(1)] for 2 uniforms is 1/3, times volume 1/2.
        assert_eq!(ordered_simplex_monomial(&[1, 0]), ratio(1, 6));
    }

    #[test]
    fn square_of_min_matches_known_moment() {
        for n in 1..=5 {
            let mut a = SetFunction::zeros(n).unwrap();
            a.set(SubsetMask::full(n).unwrap(), Rational::one());
            // E[min²] = 2 / ((n+1)(n+2)).
            let expected = ratio(2, ((n + 1) * (n + 2)) as i64);
            assert_eq!(choquet_square_integral_simplex(&a).unwrap(), expected);
            assert_eq!(choquet_square_integral_pairwise(&a), expected);
        }
    }

    #[test]
    fn min_product_moment_small_cases() {
        assert_eq!(min_product_moment(1, 0, 1), ratio(1, 4));
        assert_eq!(min_product_moment(0, 1, 0), ratio(1, 3));
        assert_eq!(min_product_moment(0, 0, 0), ratio(1, 1));
    }
}
