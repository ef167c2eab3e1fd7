//! Reference computations that share no code with the formulas they check.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::scalar::{ratio, Rational};
use crate::set_function::SetFunction;
use crate::subset::{subsets_of_size_at_most, SubsetMask};

/// Solves `A x = b` exactly by Gauss–Jordan elimination.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Degenerate("singular normal equations".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for j in col..m {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in col..m {
                    let delta = &factor * &a[col][j];
                    a[r][j] -= delta;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Ok(b)
}

fn basis(n: usize, k: usize) -> Result<Vec<SubsetMask>> {
    Ok(subsets_of_size_at_most(n, k)?.collect())
}

/// Least-squares fit over the vertices `{0,1}^n` by the normal equations
/// of the monomial basis of degree at most `k`.
pub fn discrete_least_squares(
    v: &SetFunction<Rational>,
    k: usize,
) -> Result<MultilinearPoly<Rational>> {
    let n = v.n();
    let basis = basis(n, k)?;
    let vertices: Vec<SubsetMask> = (0..1u64 << n)
        .map(|b| SubsetMask::new(b, n))
        .collect::<Result<_>>()?;
    let mut gram = vec![vec![Rational::zero(); basis.len()]; basis.len()];
    let mut rhs = vec![Rational::zero(); basis.len()];
    for (i, s) in basis.iter().enumerate() {
        for (j, t) in basis.iter().enumerate() {
            // Vertices containing S ∪ T.
            let free = n - s.union(*t).len();
            gram[i][j] = Rational::from_integer((1u64 << free).into());
        }
        for u in &vertices {
            if s.is_subset_of(*u) {
                rhs[i] += v.get(*u);
            }
        }
    }
    let x = solve(gram, rhs)?;
    MultilinearPoly::from_terms(n, basis.into_iter().zip(x))
}

/// `∫ v_S v_T = 2^{−|S△T|} 3^{−|S∩T|}` for monomials `v_S = Π_{i∈S} x_i`.
pub fn monomial_inner_product(s: SubsetMask, t: SubsetMask) -> Rational {
    let both = s.intersection(t).len() as i32;
    let one_side = s.union(t).len() as i32 - both;
    num_traits::pow(ratio(1, 2), one_side as usize) * num_traits::pow(ratio(1, 3), both as usize)
}

/// Orthogonal projection in `L²([0,1]^n)` of a polynomial onto degree `≤ k`,
/// by the normal equations of the monomial basis.
pub fn continuous_least_squares(
    p: &MultilinearPoly<Rational>,
    k: usize,
) -> Result<MultilinearPoly<Rational>> {
    let n = p.n();
    let basis = basis(n, k)?;
    let gram: Vec<Vec<Rational>> = basis
        .iter()
        .map(|s| {
            basis
                .iter()
                .map(|t| monomial_inner_product(*s, *t))
                .collect()
        })
        .collect();
    let rhs: Vec<Rational> = basis
        .iter()
        .map(|s| {
            p.terms()
                .map(|(t, a)| a * monomial_inner_product(*s, t))
                .sum()
        })
        .collect();
    let x = solve(gram, rhs)?;
    MultilinearPoly::from_terms(n, basis.into_iter().zip(x))
}
