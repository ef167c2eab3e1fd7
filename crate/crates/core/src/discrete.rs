//! Games, pseudo-Boolean functions and the Banzhaf interaction index.
//!
//! A game `v: 2^N → ℝ` is identified with the pseudo-Boolean function
//! `f(1_S) = v(S)`. No normalization `v(∅) = 0` is assumed.

use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::scalar::Scalar;
use crate::set_function::SetFunction;
use crate::subset::{binomial, SubsetMask};

pub type Game<T> = SetFunction<T>;

fn yates<T: Scalar>(values: &mut [T], n: usize, sign: i64) {
    let s = T::from_int(sign);
    for i in 0..n {
        let bit = 1usize << i;
        for mask in 0..values.len() {
            if mask & bit != 0 {
                let lower = values[mask ^ bit].clone();
                values[mask] = values[mask].clone() + s.clone() * lower;
            }
        }
    }
}

/// Möbius transform `a(S) = Σ_{T⊆S} (−1)^{|S|−|T|} v(T)`, in `O(n 2^n)`.
pub fn mobius<T: Scalar>(v: &Game<T>) -> SetFunction<T> {
    let mut a = v.clone();
    let n = a.n();
    yates(a.values_mut(), n, -1);
    a
}

/// Zeta transform `v(S) = Σ_{T⊆S} a(T)`; inverse of [`mobius`].
pub fn zeta<T: Scalar>(a: &SetFunction<T>) -> Game<T> {
    let mut v = a.clone();
    let n = v.n();
    yates(v.values_mut(), n, 1);
    v
}

fn check_ground(v_n: usize, s: SubsetMask) -> Result<()> {
    if s.n() != v_n {
        return Err(Error::invalid(format!(
            "subset {s} is over n = {}, game is over n = {v_n}",
            s.n()
        )));
    }
    Ok(())
}

/// `I_B(v, S) = Σ_{T⊇S} (½)^{|T|−|S|} a(T)` with `a` the Möbius transform of `v`.
pub fn banzhaf_interaction<T: Scalar>(v: &Game<T>, s: SubsetMask) -> Result<T> {
    check_ground(v.n(), s)?;
    let a = mobius(v);
    Ok(weighted_superset_sum(&a, s))
}

pub(crate) fn weighted_superset_sum<T: Scalar>(a: &SetFunction<T>, s: SubsetMask) -> T {
    let half = T::from_ratio(1, 2);
    s.supersets()
        .map(|t| a.get(t).clone() * half.powi(t.len() - s.len()))
        .fold(T::zero(), |acc, x| acc + x)
}

/// Banzhaf interaction index for every coalition at once, in `O(n 2^n)`.
pub fn banzhaf_all<T: Scalar>(v: &Game<T>) -> SetFunction<T> {
    let mut b = mobius(v);
    let n = b.n();
    let half = T::from_ratio(1, 2);
    let values = b.values_mut();
    for i in 0..n {
        let bit = 1usize << i;
        for mask in 0..values.len() {
            if mask & bit == 0 {
                let upper = values[mask | bit].clone();
                values[mask] = values[mask].clone() + half.clone() * upper;
            }
        }
    }
    b
}

/// `(1/2^n) Σ_{x∈{0,1}^n} (Δ^S f)(x)`, evaluated by brute force over the vertices.
pub fn discrete_derivative_average<T: Scalar>(v: &Game<T>, s: SubsetMask) -> Result<T> {
    check_ground(v.n(), s)?;
    let n = v.n();
    let mut total = T::zero();
    for x in 0..1u64 << n {
        let base = x & !s.bits();
        for t in s.subsets() {
            let term = v.get(SubsetMask::from_bits(base | t.bits(), n)).clone();
            if (s.len() - t.len()).is_multiple_of(2) {
                total = total + term;
            } else {
                total = total - term;
            }
        }
    }
    Ok(total / T::from_int(2).powi(n))
}

/// Best `k`-th least-squares approximation of `v` over the vertices,
/// `aₖ(S) = a(S) + (−1)^{k−|S|} Σ_{T⊇S, |T|>k} C(|T|−|S|−1, k−|S|) (½)^{|T|−|S|} a(T)`.
pub fn best_k_approx_discrete<T: Scalar>(v: &Game<T>, k: usize) -> Result<MultilinearPoly<T>> {
    let n = v.n();
    if k > n {
        return Err(Error::invalid(format!("order k = {k} exceeds n = {n}")));
    }
    let a = mobius(v);
    let half = T::from_ratio(1, 2);
    let mut out = MultilinearPoly::zero(n)?;
    for (s, _) in a.iter().filter(|(s, _)| s.len() <= k) {
        let mut tail = T::zero();
        for t in s.supersets().filter(|t| t.len() > k) {
            let d = t.len() - s.len();
            let c = binomial(d - 1, k - s.len()) as i64;
            tail = tail + T::from_int(c) * half.powi(d) * a.get(t).clone();
        }
        if (k - s.len()) % 2 == 1 {
            tail = -tail;
        }
        out.set_coeff(s, a.get(s).clone() + tail);
    }
    Ok(out)
}

/// The unique multilinear polynomial agreeing with `v` on `{0,1}^n`.
pub fn multilinear_extension<T: Scalar>(v: &Game<T>) -> MultilinearPoly<T> {
    MultilinearPoly::from_set_function(&mobius(v))
}

/// Restriction of a multilinear polynomial to the vertices, as a game.
pub fn vertex_game<T: Scalar>(poly: &MultilinearPoly<T>) -> Result<Game<T>> {
    Ok(zeta(&poly.to_set_function()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use num_traits::Zero;

    fn mask(n: usize, idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, idx).unwrap()
    }

    fn majority3() -> Game<Rational> {
        SetFunction::from_fn(3, |s| ratio((s.len() >= 2) as i64, 1)).unwrap()
    }

    fn cardinality(n: usize) -> Game<Rational> {
        SetFunction::from_fn(n, |s| ratio(s.len() as i64, 1)).unwrap()
    }

    #[test]
    fn mobius_examples() {
        let a = mobius(&cardinality(2));
        assert_eq!(*a.get(mask(2, &[1])), ratio(1, 1));
        assert_eq!(*a.get(mask(2, &[2])), ratio(1, 1));
        assert!(a.get(mask(2, &[1, 2])).is_zero());

        let u = SetFunction::from_fn(2, |s| ratio((s.len() == 2) as i64, 1)).unwrap();
        let a = mobius(&u);
        assert_eq!(*a.get(mask(2, &[1, 2])), ratio(1, 1));
        assert_eq!(a.support().count(), 1);

        let c = SetFunction::from_fn(3, |_| ratio(5, 2)).unwrap();
        let a = mobius(&c);
        assert_eq!(*a.get(mask(3, &[])), ratio(5, 2));
        assert_eq!(a.support().count(), 1);
    }

    #[test]
    fn zeta_examples() {
        let mut a = SetFunction::zeros(1).unwrap();
        a.set(mask(1, &[]), ratio(1, 1));
        a.set(mask(1, &[1]), ratio(-1, 1));
        let v = zeta(&a);
        assert_eq!(*v.get(mask(1, &[])), ratio(1, 1));
        assert!(v.get(mask(1, &[1])).is_zero());
    }

    #[test]
    fn majority_game() {
        let v = majority3();
        assert_eq!(banzhaf_interaction(&v, mask(3, &[1])).unwrap(), ratio(1, 2));
        assert!(banzhaf_interaction(&v, mask(3, &[1, 2])).unwrap().is_zero());
        assert_eq!(
            discrete_derivative_average(&v, mask(3, &[1])).unwrap(),
            ratio(1, 2)
        );
        let ext = multilinear_extension(&v);
        assert_eq!(ext.coeff(mask(3, &[1, 2])), ratio(1, 1));
        assert_eq!(ext.coeff(mask(3, &[1, 2, 3])), ratio(-2, 1));
        assert_eq!(ext.num_terms(), 4);
    }

    #[test]
    fn additive_games_have_no_interaction() {
        let v = cardinality(3);
        assert!(banzhaf_interaction(&v, mask(3, &[1, 2])).unwrap().is_zero());
        assert!(discrete_derivative_average(&v, mask(3, &[1, 3]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn empty_set_derivative_is_the_vertex_mean() {
        let v = majority3();
        assert_eq!(
            discrete_derivative_average(&v, mask(3, &[])).unwrap(),
            ratio(4, 8)
        );
    }

    #[test]
    fn best_approx_examples() {
        let v = SetFunction::from_fn(2, |s| ratio((s.len() == 2) as i64, 1)).unwrap();
        let f1 = best_k_approx_discrete(&v, 1).unwrap();
        assert_eq!(f1.coeff(mask(2, &[])), ratio(-1, 4));
        assert_eq!(f1.coeff(mask(2, &[1])), ratio(1, 2));
        assert_eq!(f1.coeff(mask(2, &[2])), ratio(1, 2));
        let f0 = best_k_approx_discrete(&v, 0).unwrap();
        assert_eq!(f0.coeff(mask(2, &[])), ratio(1, 4));
        let f2 = best_k_approx_discrete(&v, 2).unwrap();
        assert_eq!(f2, multilinear_extension(&v));
        assert!(best_k_approx_discrete(&v, 3).is_err());
    }

    #[test]
    fn all_coalitions_at_once() {
        let v = majority3();
        let b = banzhaf_all(&v);
        for (s, val) in b.iter() {
            assert_eq!(*val, banzhaf_interaction(&v, s).unwrap());
        }
    }
}
