//! Exact interaction indexes for structured function classes.

use num_traits::{One, Zero};

use crate::continuous::NORMALIZATION;
use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::scalar::{ratio, Rational, Scalar};
use crate::set_function::SetFunction;
use crate::simplex::{
    choquet_square_integral_pairwise, choquet_square_integral_simplex, MAX_SIMPLEX_N,
};
use crate::spec::{FunctionSpec, Unary};
use crate::subset::SubsetMask;

/// `B(p, q) = (p−1)!(q−1)!/(p+q−1)!` for integers `p, q ≥ 1`.
pub fn beta_fn(p: usize, q: usize) -> Result<Rational> {
    if p < 1 || q < 1 {
        return Err(Error::invalid(format!(
            "beta function needs p, q >= 1, got ({p}, {q})"
        )));
    }
    // (p−1)!(q−1)!/(p+q−1)! = 1 / (q · C(p+q−1, q)), built up without factorials.
    let mut acc = Rational::one();
    for j in 1..q {
        acc *= ratio(j as i64, (p + j - 1) as i64);
    }
    Ok(acc / ratio((p + q - 1) as i64, 1))
}

/// `𝓘(f, S) = 6^{|S|} Σ_{T⊇S} a(T) B(|S|+1, |T|+1)` for `f = Σ_T a(T) min_{i∈T} x_i`.
///
/// At `S = ∅` this gives `Σ_T a(T)/(|T|+1) = ∫ f`, extending the usual
/// statement from nonempty `S`.
pub fn choquet_interaction(a: &SetFunction<Rational>, s: SubsetMask) -> Result<Rational> {
    if s.n() != a.n() {
        return Err(Error::invalid(
            "subset and capacity have different ground sets",
        ));
    }
    let mut sum = Rational::zero();
    for t in s.supersets() {
        let c = a.get(t);
        if !c.is_zero() {
            sum += c * beta_fn(s.len() + 1, t.len() + 1)?;
        }
    }
    Ok(ratio(6, 1).powi(s.len()) * sum)
}

/// Per-variable factors of the pseudo-multilinear formula.
#[derive(Clone, Debug, PartialEq)]
pub struct UnaryMoments {
    /// `∫₀¹ φ = 𝓘(φ, ∅)`.
    pub m0: Rational,
    /// `12 ∫₀¹ φ(t)(t − ½) dt = 𝓘(φ, {i})`.
    pub m1: Rational,
    /// `∫₀¹ φ²`, used for variances.
    pub sq: Rational,
}

pub fn unary_moments(phi: &Unary) -> UnaryMoments {
    match phi {
        Unary::Identity => UnaryMoments {
            m0: ratio(1, 2),
            m1: Rational::one(),
            sq: ratio(1, 3),
        },
        Unary::Power(c) => {
            let one = Rational::one();
            let two = ratio(2, 1);
            UnaryMoments {
                m0: &one / (c + &one),
                m1: ratio(6, 1) * c / ((c + &one) * (c + &two)),
                sq: &one / (&two * c + &one),
            }
        }
        Unary::Affine {
            intercept: p,
            slope: q,
        } => UnaryMoments {
            m0: p + q / ratio(2, 1),
            m1: q.clone(),
            sq: p * p + p * q + q * q / ratio(3, 1),
        },
        Unary::Tabulated(tab) => {
            let mut m0 = Rational::zero();
            let mut first = Rational::zero();
            let mut sq = Rational::zero();
            for ((a, ya), (b, yb)) in tab.segments() {
                let h = b - a;
                m0 += &h * (ya + yb) / ratio(2, 1);
                // ∫ φ(t) t dt over the segment (Simpson is exact for this quadratic).
                first +=
                    &h * (ya * (ratio(2, 1) * a + b) + yb * (a + ratio(2, 1) * b)) / ratio(6, 1);
                sq += &h * (ya * ya + ya * yb + yb * yb) / ratio(3, 1);
            }
            let m1 = ratio(12, 1) * (first - &m0 / ratio(2, 1));
            UnaryMoments { m0, m1, sq }
        }
    }
}

/// `𝓘(f, S) = Σ_{T⊇S} a(T) Π_{i∈T∖S} m0(φ_i) Π_{i∈S} m1(φ_i)`.
pub fn pseudo_multilinear_interaction(
    g: &MultilinearPoly<Rational>,
    transforms: &[Unary],
    s: SubsetMask,
) -> Result<Rational> {
    if transforms.len() != g.n() || s.n() != g.n() {
        return Err(Error::invalid(
            "transforms, polynomial and subset disagree on n",
        ));
    }
    let moments: Vec<UnaryMoments> = transforms.iter().map(unary_moments).collect();
    Ok(pseudo_with_moments(g, &moments, s))
}

fn pseudo_with_moments(
    g: &MultilinearPoly<Rational>,
    moments: &[UnaryMoments],
    s: SubsetMask,
) -> Rational {
    let lead: Rational = s.positions().map(|p| moments[p].m1.clone()).product();
    if lead.is_zero() {
        return lead;
    }
    let mut sum = Rational::zero();
    for (t, a) in g.terms() {
        if s.is_subset_of(t) {
            let rest: Rational = t
                .difference(s)
                .positions()
                .map(|p| moments[p].m0.clone())
                .product();
            sum += a * rest;
        }
    }
    sum * lead
}

/// `𝓘(f, S)/𝓘(f, ∅) = Π_{i∈S} m1(φ_i)/m0(φ_i)` for `f = Π φ_i`.
pub fn multiplicative_ratio(transforms: &[Unary], s: SubsetMask) -> Result<Rational> {
    if s.n() != transforms.len() {
        return Err(Error::invalid("subset and transforms disagree on n"));
    }
    let mut acc = Rational::one();
    for (i, phi) in transforms.iter().enumerate() {
        let m = unary_moments(phi);
        if m.m0.is_zero() {
            return Err(Error::Degenerate(format!(
                "∫φ_{} = 0, so 𝓘(f, ∅) = 0 and the ratio is undefined",
                i + 1
            )));
        }
        if s.contains(i) {
            acc *= m.m1 / m.m0;
        }
    }
    Ok(acc)
}

/// Best `n`-th approximation of a multiplicative function in product form,
/// `fₙ(x) = scale · Π_i (1 + slope_i (x_i − ½))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductForm {
    pub scale: Rational,
    pub slopes: Vec<Rational>,
}

impl ProductForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.slopes
            .iter()
            .zip(x)
            .fold(self.scale.to_f64(), |acc, (r, &xi)| {
                acc * (1.0 + r.to_f64() * (xi - 0.5))
            })
    }

    /// Expansion into monomial coefficients.
    pub fn to_poly(&self) -> Result<MultilinearPoly<Rational>> {
        let n = self.slopes.len();
        let mut p = MultilinearPoly::constant(n, self.scale.clone())?;
        for (i, r) in self.slopes.iter().enumerate() {
            // factor (1 − r/2) + r x_i
            let mut next = MultilinearPoly::zero(n)?;
            for (s, c) in p.terms() {
                next.add_term(s, c * (Rational::one() - r / ratio(2, 1)));
                next.add_term(s.with(i), c * r);
            }
            p = next;
        }
        Ok(p)
    }
}

pub fn multiplicative_product_form(transforms: &[Unary]) -> Result<ProductForm> {
    let n = transforms.len();
    let mut slopes = Vec::with_capacity(n);
    let mut scale = Rational::one();
    for i in 0..n {
        let single = SubsetMask::from_bits(1 << i, n);
        slopes.push(multiplicative_ratio(transforms, single)?);
        scale *= unary_moments(&transforms[i]).m0;
    }
    Ok(ProductForm { scale, slopes })
}

/// `𝓘(Π x_i^{c_i}, S) = Π_{i∈N} 1/(c_i+1) · Π_{i∈S} 6c_i/(c_i+2)`.
pub fn geometric_mean_interaction(weights: &[Rational], s: SubsetMask) -> Result<Rational> {
    if s.n() != weights.len() {
        return Err(Error::invalid("subset and weights disagree on n"));
    }
    let one = Rational::one();
    let mut acc = Rational::one();
    for (i, c) in weights.iter().enumerate() {
        acc /= c + &one;
        if s.contains(i) {
            acc *= ratio(6, 1) * c / (c + ratio(2, 1));
        }
    }
    Ok(acc)
}

/// `𝓘(f, S)` for a multilinear `f`, straight from the inner-product definition:
/// each variable in `S ∩ T` contributes `∫ x(x−½) = 1/12`, each in `T ∖ S` contributes `∫ x = ½`.
pub fn multilinear_interaction(p: &MultilinearPoly<Rational>, s: SubsetMask) -> Rational {
    let centered_moment = ratio(1, 3) - ratio(1, 4);
    let plain_moment = ratio(1, 2);
    let mut integral = Rational::zero();
    for (t, a) in p.terms() {
        if s.is_subset_of(t) {
            integral += a * centered_moment.powi(s.len()) * plain_moment.powi(t.len() - s.len());
        }
    }
    ratio(NORMALIZATION, 1).powi(s.len()) * integral
}

/// Exact `𝓘(f, S)` for any structured spec.
pub fn structured_interaction(spec: &FunctionSpec, s: SubsetMask) -> Result<Rational> {
    if s.n() != spec.n() {
        return Err(Error::invalid(format!(
            "subset {s} is over n = {}, spec is over n = {}",
            s.n(),
            spec.n()
        )));
    }
    match spec {
        FunctionSpec::Multilinear(p) => Ok(multilinear_interaction(p, s)),
        FunctionSpec::Choquet(a) => choquet_interaction(a, s),
        FunctionSpec::PseudoMultilinear { poly, transforms } => {
            pseudo_multilinear_interaction(poly, transforms, s)
        }
        FunctionSpec::Multiplicative(ts) => {
            let moments: Vec<UnaryMoments> = ts.iter().map(unary_moments).collect();
            Ok(s.complement()
                .positions()
                .map(|p| moments[p].m0.clone())
                .chain(s.positions().map(|p| moments[p].m1.clone()))
                .product())
        }
        FunctionSpec::GeometricMean(c) => geometric_mean_interaction(c, s),
        FunctionSpec::BlackBox(_) => Err(Error::unsupported("black boxes have no closed form")),
    }
}

/// Exact `∫ f²` for any structured spec.
pub fn structured_square_integral(spec: &FunctionSpec) -> Result<Rational> {
    match spec {
        FunctionSpec::Multilinear(p) => Ok(p.square_integral()),
        FunctionSpec::Choquet(a) => {
            if a.n() <= MAX_SIMPLEX_N {
                choquet_square_integral_simplex(a)
            } else {
                Ok(choquet_square_integral_pairwise(a))
            }
        }
        FunctionSpec::PseudoMultilinear { poly, transforms } => {
            let moments: Vec<UnaryMoments> = transforms.iter().map(unary_moments).collect();
            let terms: Vec<_> = poly.terms().collect();
            let mut total = Rational::zero();
            for (s, a) in &terms {
                for (t, b) in &terms {
                    let both = s.intersection(*t);
                    let one_side = s.union(*t).difference(both);
                    let f: Rational = both
                        .positions()
                        .map(|p| moments[p].sq.clone())
                        .chain(one_side.positions().map(|p| moments[p].m0.clone()))
                        .product();
                    total += *a * *b * f;
                }
            }
            Ok(total)
        }
        FunctionSpec::Multiplicative(ts) => Ok(ts.iter().map(|t| unary_moments(t).sq).product()),
        FunctionSpec::GeometricMean(c) => Ok(c
            .iter()
            .map(|c| Rational::one() / (ratio(2, 1) * c + Rational::one()))
            .product()),
        FunctionSpec::BlackBox(_) => Err(Error::unsupported("black boxes have no closed form")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Tabulated;

    fn mask(n: usize, idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, idx).unwrap()
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_fn(1, 1).unwrap(), ratio(1, 1));
        assert_eq!(beta_fn(2, 3).unwrap(), ratio(1, 12));
        assert_eq!(beta_fn(3, 3).unwrap(), ratio(1, 30));
        assert_eq!(beta_fn(3, 2).unwrap(), beta_fn(2, 3).unwrap());
        assert!(beta_fn(0, 2).is_err());
    }

    #[test]
    fn beta_matches_factorial_formula() {
        let fact = |k: usize| (1..=k).map(|i| i as i64).product::<i64>();
        for p in 1..8 {
            for q in 1..8 {
                let expected = ratio(fact(p - 1) * fact(q - 1), fact(p + q - 1));
                assert_eq!(beta_fn(p, q).unwrap(), expected);
            }
        }
    }

    #[test]
    fn choquet_min_examples() {
        let mut a = SetFunction::zeros(2).unwrap();
        a.set(mask(2, &[1, 2]), Rational::one());
        assert_eq!(choquet_interaction(&a, mask(2, &[1])).unwrap(), ratio(1, 2));
        assert_eq!(
            choquet_interaction(&a, mask(2, &[1, 2])).unwrap(),
            ratio(6, 5)
        );
        assert_eq!(choquet_interaction(&a, mask(2, &[])).unwrap(), ratio(1, 3));

        let mut b = SetFunction::zeros(3).unwrap();
        b.set(mask(3, &[1, 2]), Rational::one());
        assert!(choquet_interaction(&b, mask(3, &[3])).unwrap().is_zero());
    }

    #[test]
    fn unary_moment_examples() {
        let id = unary_moments(&Unary::Identity);
        assert_eq!((id.m0, id.m1), (ratio(1, 2), ratio(1, 1)));
        let p = unary_moments(&Unary::Power(ratio(1, 2)));
        assert_eq!((p.m0, p.m1), (ratio(2, 3), ratio(4, 5)));
        let c = unary_moments(&Unary::constant(ratio(3, 7)));
        assert_eq!((c.m0, c.m1), (ratio(3, 7), ratio(0, 1)));
        // Power(1) must agree with Identity.
        assert_eq!(
            unary_moments(&Unary::Power(ratio(1, 1))),
            unary_moments(&Unary::Identity)
        );
    }

    #[test]
    fn tabulated_moments_agree_with_equivalent_affine() {
        let tab = Tabulated::new(vec![
            (ratio(0, 1), ratio(1, 1)),
            (ratio(1, 3), ratio(2, 3)),
            (ratio(1, 1), ratio(0, 1)),
        ])
        .unwrap();
        let affine = Unary::Affine {
            intercept: ratio(1, 1),
            slope: ratio(-1, 1),
        };
        assert_eq!(
            unary_moments(&Unary::Tabulated(tab)),
            unary_moments(&affine)
        );
    }

    #[test]
    fn tabulated_moments_on_a_kinked_function() {
        // φ(t) = 2 min(t, ½): m0 = 3/8 + ... computed by hand:
        // ∫ φ = 1/4 + 1/2 = 3/4, ∫ φ t = 1/12 + 3/8 = 11/24, ∫ φ² = 1/6 + 1/2 = 2/3.
        let tab = Tabulated::new(vec![
            (ratio(0, 1), ratio(0, 1)),
            (ratio(1, 2), ratio(1, 1)),
            (ratio(1, 1), ratio(1, 1)),
        ])
        .unwrap();
        let m = unary_moments(&Unary::Tabulated(tab));
        assert_eq!(m.m0, ratio(3, 4));
        assert_eq!(m.m1, ratio(12, 1) * (ratio(11, 24) - ratio(3, 8)));
        assert_eq!(m.sq, ratio(2, 3));
    }

    #[test]
    fn pseudo_multilinear_examples() {
        let g = MultilinearPoly::monomial(mask(2, &[1, 2]));
        let root = Unary::Power(ratio(1, 2));
        let v = pseudo_multilinear_interaction(&g, &[root.clone(), root], mask(2, &[1])).unwrap();
        assert_eq!(v, ratio(8, 15));
        let v = pseudo_multilinear_interaction(
            &g,
            &[Unary::constant(ratio(2, 1)), Unary::Identity],
            mask(2, &[1]),
        )
        .unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn multiplicative_ratios() {
        let ids = vec![Unary::Identity; 3];
        assert_eq!(
            multiplicative_ratio(&ids, mask(3, &[1, 3])).unwrap(),
            ratio(4, 1)
        );
        assert_eq!(
            multiplicative_ratio(&ids, mask(3, &[])).unwrap(),
            ratio(1, 1)
        );
        let roots = vec![Unary::Power(ratio(1, 2)); 2];
        assert_eq!(
            multiplicative_ratio(&roots, mask(2, &[1])).unwrap(),
            ratio(6, 5)
        );
        let degenerate = vec![Unary::constant(ratio(0, 1)), Unary::Identity];
        assert!(matches!(
            multiplicative_ratio(&degenerate, mask(2, &[2])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn product_form_expands_to_the_function_for_identity_transforms() {
        let form = multiplicative_product_form(&vec![Unary::Identity; 2]).unwrap();
        let p = form.to_poly().unwrap();
        assert_eq!(p, MultilinearPoly::monomial(mask(2, &[1, 2])));
    }

    #[test]
    fn geometric_mean_examples() {
        let half = vec![ratio(1, 2), ratio(1, 2)];
        assert_eq!(
            geometric_mean_interaction(&half, mask(2, &[1])).unwrap(),
            ratio(8, 15)
        );
        assert_eq!(
            geometric_mean_interaction(&half, mask(2, &[])).unwrap(),
            ratio(4, 9)
        );
        let lead = vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)];
        assert_eq!(
            geometric_mean_interaction(&lead, mask(3, &[1])).unwrap(),
            ratio(1, 1)
        );
        assert!(geometric_mean_interaction(&lead, mask(3, &[2]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn square_integrals() {
        let x1x2 = FunctionSpec::Multilinear(MultilinearPoly::monomial(mask(2, &[1, 2])));
        assert_eq!(structured_square_integral(&x1x2).unwrap(), ratio(1, 9));
        let g = FunctionSpec::geometric_mean(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(structured_square_integral(&g).unwrap(), ratio(1, 4));
        let pseudo = FunctionSpec::pseudo_multilinear(
            MultilinearPoly::monomial(mask(2, &[1, 2])),
            vec![Unary::Power(ratio(1, 2)), Unary::Power(ratio(1, 2))],
        )
        .unwrap();
        assert_eq!(structured_square_integral(&pseudo).unwrap(), ratio(1, 4));
    }
}
