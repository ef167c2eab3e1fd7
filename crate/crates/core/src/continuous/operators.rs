//! Shift, `S`-difference and `S`-difference-quotient operators.

use crate::error::{Error, Result};
use crate::spec::FunctionSpec;
use crate::subset::SubsetMask;

fn check_args(spec: &FunctionSpec, s: SubsetMask, h: &[f64], x: &[f64]) -> Result<()> {
    let n = spec.n();
    if s.n() != n || h.len() != n || x.len() != n {
        return Err(Error::invalid(format!(
            "subset, step and point must all have dimension {n}"
        )));
    }
    if let Some(p) = s.positions().find(|&p| h[p].is_nan()) {
        return Err(Error::invalid(format!("step h{} is NaN", p + 1)));
    }
    Ok(())
}

fn shifted_point(s: SubsetMask, h: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for p in s.positions() {
        y[p] += h[p];
    }
    y
}

/// `E^S_h f(x) = f(x + Σ_{j∈S} h_j e_j)`.
pub fn shift(spec: &FunctionSpec, s: SubsetMask, h: &[f64], x: &[f64]) -> Result<f64> {
    check_args(spec, s, h, x)?;
    spec.eval(&shifted_point(s, h, x))
}

/// `Δ^S_h f(x) = Σ_{T⊆S} (−1)^{|S|−|T|} E^T_h f(x)`.
///
/// Differences are taken one coordinate at a time, so a function that does
/// not move along some axis of `S` gives exactly zero.
pub fn s_difference(spec: &FunctionSpec, s: SubsetMask, h: &[f64], x: &[f64]) -> Result<f64> {
    check_args(spec, s, h, x)?;
    spec.eval(&shifted_point(s, h, x))?;
    spec.eval(x)?;
    Ok(difference_unchecked(spec, s, h, x))
}

/// `Δ^S_h f(x)` for points known to keep every corner inside the cube.
pub(crate) fn difference_unchecked(
    spec: &FunctionSpec,
    s: SubsetMask,
    h: &[f64],
    x: &[f64],
) -> f64 {
    let axes: Vec<usize> = s.positions().collect();
    let m = axes.len();
    let mut corners: Vec<f64> = (0..1usize << m)
        .map(|c| {
            let mut y = x.to_vec();
            for (k, &p) in axes.iter().enumerate() {
                if c >> k & 1 == 1 {
                    y[p] += h[p];
                }
            }
            spec.eval_unchecked(&y)
        })
        .collect();
    for k in 0..m {
        for c in 0..corners.len() {
            if c >> k & 1 == 1 {
                corners[c] -= corners[c ^ (1 << k)];
            }
        }
    }
    corners[(1 << m) - 1]
}

/// `Q^S_h f(x) = Δ^S_h f(x) / Π_{i∈S} h_i`.
pub fn difference_quotient(
    spec: &FunctionSpec,
    s: SubsetMask,
    h: &[f64],
    x: &[f64],
) -> Result<f64> {
    check_args(spec, s, h, x)?;
    if let Some(p) = s.positions().find(|&p| h[p] == 0.0) {
        return Err(Error::invalid(format!("step h{} is zero", p + 1)));
    }
    let d = s_difference(spec, s, h, x)?;
    Ok(s.positions().fold(d, |acc, p| acc / h[p]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultilinearPoly;
    use crate::scalar::ratio;

    fn mask(n: usize, idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, idx).unwrap()
    }

    fn x1x2() -> FunctionSpec {
        FunctionSpec::Multilinear(MultilinearPoly::monomial(mask(2, &[1, 2])))
    }

    #[test]
    fn shift_examples() {
        let f = x1x2();
        assert_eq!(
            shift(&f, mask(2, &[]), &[0.3, 0.3], &[0.2, 0.5]).unwrap(),
            0.1
        );
        let x1 = FunctionSpec::Multilinear(MultilinearPoly::monomial(mask(1, &[1])));
        assert_eq!(shift(&x1, mask(1, &[1]), &[0.25], &[0.5]).unwrap(), 0.75);
        let min = FunctionSpec::min_of(mask(2, &[1, 2])).unwrap();
        let v = shift(&min, mask(2, &[1, 2]), &[0.2, 0.2], &[0.1, 0.3]).unwrap();
        assert!((v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn shift_outside_the_cube_is_a_domain_error() {
        let r = shift(&x1x2(), mask(2, &[1]), &[0.8, 0.0], &[0.5, 0.5]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn difference_examples() {
        let d = s_difference(&x1x2(), mask(2, &[1, 2]), &[0.4, 0.7], &[0.1, 0.2]).unwrap();
        assert!((d - 0.28).abs() < 1e-15);
        assert_eq!(
            s_difference(&x1x2(), mask(2, &[]), &[0.4, 0.7], &[0.1, 0.2]).unwrap(),
            0.1 * 0.2
        );
        let additive = FunctionSpec::arithmetic_mean(2).unwrap();
        let d = s_difference(&additive, mask(2, &[1, 2]), &[0.3, 0.6], &[0.2, 0.1]).unwrap();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn quotient_examples() {
        let q = difference_quotient(&x1x2(), mask(2, &[1]), &[0.5, 0.0], &[0.2, 0.4]).unwrap();
        assert!((q - 0.4).abs() < 1e-15);
        let linear = FunctionSpec::Multilinear(
            MultilinearPoly::from_terms(1, [(mask(1, &[1]), ratio(3, 1))]).unwrap(),
        );
        for h in [0.1, 0.25, 0.5] {
            let q = difference_quotient(&linear, mask(1, &[1]), &[h], &[0.3]).unwrap();
            assert!((q - 3.0).abs() < 1e-14);
        }
        assert_eq!(
            difference_quotient(&x1x2(), mask(2, &[]), &[0.0, 0.0], &[0.5, 0.5]).unwrap(),
            0.25
        );
        assert!(matches!(
            difference_quotient(&x1x2(), mask(2, &[1]), &[0.0, 0.0], &[0.5, 0.5]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
