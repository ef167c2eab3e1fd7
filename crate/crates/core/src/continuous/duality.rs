//! `f^d(x) = 1 − f(1 − x)` and the self-dual / anti-self-dual split.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::scalar::{ratio, Rational};
use crate::set_function::SetFunction;
use crate::spec::{BlackBox, FunctionSpec, Unary};
use crate::subset::SubsetMask;

/// Coefficients of `x ↦ p(1 − x)`: `g(R) = (−1)^{|R|} Σ_{T⊇R} a(T)`.
fn reflect_poly(p: &MultilinearPoly<Rational>) -> MultilinearPoly<Rational> {
    let mut out = MultilinearPoly::zero(p.n()).expect("valid ground set");
    for (t, a) in p.terms() {
        for r in t.subsets() {
            let c = if r.len() % 2 == 0 {
                a.clone()
            } else {
                -a.clone()
            };
            out.add_term(r, c);
        }
    }
    out
}

fn one_minus(p: &MultilinearPoly<Rational>) -> MultilinearPoly<Rational> {
    let n = p.n();
    let one = MultilinearPoly::constant(n, Rational::one()).expect("valid ground set");
    &one - p
}

fn dual_poly(p: &MultilinearPoly<Rational>) -> MultilinearPoly<Rational> {
    one_minus(&reflect_poly(p))
}

/// Dual capacity: `a^d(R) = (−1)^{|R|+1} Σ_{T⊇R} a(T)` for `R ≠ ∅` and
/// `a^d(∅) = 1 − Σ_T a(T)`.
fn dual_capacity(a: &SetFunction<Rational>) -> Result<SetFunction<Rational>> {
    let n = a.n();
    let mut out = SetFunction::zeros(n)?;
    let mut total = Rational::zero();
    for (t, c) in a.support() {
        total += c;
        for r in t.subsets().filter(|r| !r.is_empty()) {
            let signed = if r.len() % 2 == 1 {
                c.clone()
            } else {
                -c.clone()
            };
            let updated = out.get(r) + signed;
            out.set(r, updated);
        }
    }
    out.set(SubsetMask::empty(n)?, Rational::one() - total);
    Ok(out)
}

fn reflect_all(transforms: &[Unary]) -> Result<Vec<Unary>> {
    transforms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.reflected().ok_or_else(|| {
                Error::unsupported(format!(
                    "the reflection of the transform of x{} is not a supported transform",
                    i + 1
                ))
            })
        })
        .collect()
}

/// `f^d(x) = 1 − f(1 − x)`.
///
/// Multilinear and Choquet specs stay in their class. Pseudo-multilinear and
/// multiplicative specs stay pseudo-multilinear when every transform can be
/// reflected. Geometric means are not closed under duality; wrap them with
/// [`FunctionSpec::as_black_box`] first.
pub fn dual(spec: &FunctionSpec) -> Result<FunctionSpec> {
    let n = spec.n();
    match spec {
        FunctionSpec::Multilinear(p) => Ok(FunctionSpec::Multilinear(dual_poly(p))),
        FunctionSpec::Choquet(a) => Ok(FunctionSpec::Choquet(dual_capacity(a)?)),
        FunctionSpec::PseudoMultilinear { poly, transforms } => {
            FunctionSpec::pseudo_multilinear(one_minus(poly), reflect_all(transforms)?)
        }
        FunctionSpec::Multiplicative(ts) => {
            let poly = one_minus(&MultilinearPoly::monomial(SubsetMask::full(n)?));
            FunctionSpec::pseudo_multilinear(poly, reflect_all(ts)?)
        }
        FunctionSpec::GeometricMean(_) => Err(Error::unsupported(
            "geometric means are not closed under duality; wrap the spec as a black box",
        )),
        FunctionSpec::BlackBox(bb) => {
            let inner = bb.clone();
            let wrapped = BlackBox::new(n, bb.smoothness(), move |x: &[f64]| {
                let y: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
                1.0 - inner.call(&y)
            })?
            .with_support(bb.support())?
            .with_label(format!("dual of {}", bb.label()));
            Ok(FunctionSpec::BlackBox(wrapped))
        }
    }
}

/// `(f^s, f^a) = ((f + f^d)/2, (f − f^d)/2)`.
pub fn self_dual_split(
    poly: &MultilinearPoly<Rational>,
) -> (MultilinearPoly<Rational>, MultilinearPoly<Rational>) {
    let d = dual_poly(poly);
    let half = ratio(1, 2);
    ((poly + &d).scale(&half), (poly - &d).scale(&half))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(n: usize, idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, idx).unwrap()
    }

    fn poly(n: usize, terms: &[(&[usize], i64, i64)]) -> MultilinearPoly<Rational> {
        MultilinearPoly::from_terms(n, terms.iter().map(|(s, p, q)| (mask(n, s), ratio(*p, *q))))
            .unwrap()
    }

    #[test]
    fn min_and_max_are_dual() {
        let min = FunctionSpec::min_of(mask(2, &[1, 2])).unwrap();
        let FunctionSpec::Choquet(d) = dual(&min).unwrap() else {
            panic!("dual of a Choquet spec must stay Choquet")
        };
        assert_eq!(*d.get(mask(2, &[1])), ratio(1, 1));
        assert_eq!(*d.get(mask(2, &[2])), ratio(1, 1));
        assert_eq!(*d.get(mask(2, &[1, 2])), ratio(-1, 1));
        assert!(d.get(mask(2, &[])).is_zero());

        let x1x2 = FunctionSpec::Multilinear(MultilinearPoly::monomial(mask(2, &[1, 2])));
        let FunctionSpec::Multilinear(p) = dual(&x1x2).unwrap() else {
            unreachable!()
        };
        assert_eq!(p, poly(2, &[(&[1], 1, 1), (&[2], 1, 1), (&[1, 2], -1, 1)]));
    }

    #[test]
    fn simple_duals() {
        let x1 = FunctionSpec::Multilinear(MultilinearPoly::monomial(mask(1, &[1])));
        let FunctionSpec::Multilinear(p) = dual(&x1).unwrap() else {
            unreachable!()
        };
        assert_eq!(p, MultilinearPoly::monomial(mask(1, &[1])));
        let zero = FunctionSpec::Multilinear(MultilinearPoly::zero(2).unwrap());
        let FunctionSpec::Multilinear(p) = dual(&zero).unwrap() else {
            unreachable!()
        };
        assert_eq!(p, MultilinearPoly::constant(2, ratio(1, 1)).unwrap());
        let g = FunctionSpec::geometric_mean(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert!(matches!(dual(&g), Err(Error::Unsupported(_))));
    }

    #[test]
    fn duals_agree_pointwise() {
        let pts = [[0.1, 0.7, 0.4], [0.9, 0.2, 0.55], [0.0, 1.0, 0.5]];
        let mut a = SetFunction::zeros(3).unwrap();
        a.set(mask(3, &[1, 3]), ratio(2, 3));
        a.set(mask(3, &[2]), ratio(-1, 5));
        a.set(mask(3, &[]), ratio(1, 7));
        let specs = vec![
            FunctionSpec::Choquet(a),
            FunctionSpec::pseudo_multilinear(
                poly(3, &[(&[1, 2], 1, 1), (&[3], 2, 1)]),
                vec![
                    Unary::Identity,
                    Unary::constant(ratio(1, 2)),
                    Unary::Identity,
                ],
            )
            .unwrap(),
            FunctionSpec::multiplicative(vec![Unary::Identity; 3]).unwrap(),
        ];
        for spec in specs {
            let d = dual(&spec).unwrap();
            for x in &pts {
                let y: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
                let expected = 1.0 - spec.eval(&y).unwrap();
                assert!(
                    (d.eval(x).unwrap() - expected).abs() < 1e-14,
                    "{}",
                    spec.kind_name()
                );
            }
        }
    }

    #[test]
    fn split_examples() {
        let x1 = MultilinearPoly::monomial(mask(1, &[1]));
        let (s, a) = self_dual_split(&x1);
        assert_eq!((s, a.num_terms()), (x1, 0));

        let x1x2 = MultilinearPoly::monomial(mask(2, &[1, 2]));
        let (s, a) = self_dual_split(&x1x2);
        assert_eq!(s, poly(2, &[(&[1], 1, 2), (&[2], 1, 2)]));
        assert_eq!(a, poly(2, &[(&[1], -1, 2), (&[2], -1, 2), (&[1, 2], 1, 1)]));
        assert_eq!(&s + &a, x1x2);

        let half = MultilinearPoly::constant(2, ratio(1, 2)).unwrap();
        let (s, a) = self_dual_split(&half);
        assert_eq!((s, a.num_terms()), (half, 0));
    }
}
