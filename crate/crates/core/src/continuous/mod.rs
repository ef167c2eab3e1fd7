//! The interaction index `𝓘(f, S) = 12^{|S|} ∫ f(x) Π_{i∈S}(x_i − ½) dx` and
//! the best `k`-th multilinear approximation built from it.

mod duality;
mod estimators;
mod operators;

pub use duality::{dual, self_dual_split};
pub use estimators::{
    box_volume_measure, estimate, partial_derivative, Estimate, EstimatorKind, FD_STEP,
    ROUNDOFF_FLOOR,
};
pub use operators::{difference_quotient, s_difference, shift};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::closed_forms::structured_interaction;
use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::quadrature::{integrate_simplicial, integrate_tensor, GaussRule, DEFAULT_ORDER};
use crate::scalar::{ratio, Rational, Scalar, Value};
use crate::spec::{FunctionSpec, Smoothness};
use crate::subset::{subsets_of_size_at_most, SubsetMask};
use crate::table::{IndexValue, InteractionTable};

/// The constant `12 = 1/∫(t − ½)² dt` that makes `w_S` unit-norm.
#[cfg(not(feature = "corrupt-normalization"))]
pub const NORMALIZATION: i64 = 12;
/// Deliberately wrong constant, for checking that the verification suite notices.
#[cfg(feature = "corrupt-normalization")]
pub const NORMALIZATION: i64 = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed form for structured specs, Gauss–Legendre for black boxes.
    Auto,
    ClosedForm,
    GaussTensor {
        order: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Relative tolerance for internal consistency checks on floating paths.
    pub tolerance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Auto,
            tolerance: 1e-10,
        }
    }
}

impl IntegratorConfig {
    pub fn new(method: Method) -> Self {
        IntegratorConfig {
            method,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::GaussTensor { order } if order < 1 => {
                Err(Error::invalid("Gauss order must be at least 1"))
            }
            Method::MonteCarlo { samples, .. } if samples < 2 => Err(Error::invalid(
                "Monte Carlo needs at least 2 samples to report a standard error",
            )),
            _ if !(self.tolerance.is_finite() && self.tolerance > 0.0) => {
                Err(Error::invalid("tolerance must be positive"))
            }
            _ => Ok(()),
        }
    }
}

fn check_subset(spec: &FunctionSpec, s: SubsetMask) -> Result<()> {
    if s.n() != spec.n() {
        return Err(Error::invalid(format!(
            "subset {s} is over n = {}, spec is over n = {}",
            s.n(),
            spec.n()
        )));
    }
    Ok(())
}

/// `Π_{i∈S}(x_i − ½)` scaled by `12^{|S|}`.
fn centered_weight(s: SubsetMask, x: &[f64]) -> f64 {
    let scale = (NORMALIZATION as f64).powi(s.len() as i32);
    s.positions().fold(scale, |acc, p| acc * (x[p] - 0.5))
}

fn quadrature_index(spec: &FunctionSpec, s: SubsetMask, order: usize) -> Result<f64> {
    let rule = GaussRule::new(order)?;
    let active = s.union(spec.support());
    let integrand = |x: &[f64]| spec.eval_unchecked(x) * centered_weight(s, x);
    let lattice =
        matches!(spec, FunctionSpec::BlackBox(bb) if bb.smoothness() == Smoothness::Lattice);
    let v = if lattice {
        integrate_simplicial(active, &rule, integrand)
    } else {
        integrate_tensor(active, &rule, integrand)
    };
    if !v.is_finite() {
        return Err(Error::Evaluation(format!(
            "quadrature of {} produced a non-finite value",
            spec.kind_name()
        )));
    }
    Ok(v)
}

/// `𝓘(f, S)` with provenance.
///
/// Structured specs are exact under `Auto` and `ClosedForm`. Choquet specs
/// always use their closed form when quadrature is requested, since the kinks
/// of `min` defeat polynomial exactness.
pub fn interaction(
    spec: &FunctionSpec,
    s: SubsetMask,
    cfg: &IntegratorConfig,
) -> Result<IndexValue> {
    cfg.validate()?;
    check_subset(spec, s)?;
    let exact = |spec| {
        Ok(IndexValue::closed_form(Value::Exact(
            structured_interaction(spec, s)?,
        )))
    };
    match cfg.method {
        Method::Auto if spec.is_structured() => exact(spec),
        Method::Auto => Ok(IndexValue::quadrature(quadrature_index(
            spec,
            s,
            DEFAULT_ORDER,
        )?)),
        Method::ClosedForm => exact(spec),
        Method::GaussTensor { .. } if matches!(spec, FunctionSpec::Choquet(_)) => exact(spec),
        Method::GaussTensor { order } => {
            Ok(IndexValue::quadrature(quadrature_index(spec, s, order)?))
        }
        Method::MonteCarlo { samples, seed } => {
            let e = estimate(spec, s, EstimatorKind::DirectInnerProduct, samples, seed)?;
            Ok(IndexValue::monte_carlo(e.value, e.stderr))
        }
    }
}

/// `𝓘(f, S)` for every `|S| ≤ k`.
pub fn interaction_table(
    spec: &FunctionSpec,
    k: usize,
    cfg: &IntegratorConfig,
) -> Result<InteractionTable> {
    cfg.validate()?;
    let subsets: Vec<SubsetMask> = subsets_of_size_at_most(spec.n(), k)?.collect();
    let values: Vec<IndexValue> = subsets
        .par_iter()
        .map(|&s| interaction(spec, s, cfg))
        .collect::<Result<_>>()?;
    let mut table = InteractionTable::new(spec.n());
    for (s, v) in subsets.into_iter().zip(values) {
        table.insert(s, v)?;
    }
    Ok(table)
}

/// Best `k`-th approximation in both bases.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub k: usize,
    /// Monomial coefficients `a_k(S)`.
    pub poly: MultilinearPoly<Value>,
    /// `𝓘(f, T)` for `|T| ≤ k`, the coefficients of `Π_{i∈T}(x_i − ½)`.
    pub centered: InteractionTable,
}

impl Approximation {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval_f64(x)
    }

    /// Exact coefficients when every index was exact.
    pub fn exact_poly(&self) -> Option<MultilinearPoly<Rational>> {
        let terms: Option<Vec<_>> = self
            .poly
            .terms()
            .map(|(s, c)| c.to_rational().filter(|_| c.is_exact()).map(|r| (s, r)))
            .collect();
        MultilinearPoly::from_terms(self.poly.n(), terms?).ok()
    }

    /// `f_k` as a spec: multilinear when exact, otherwise a smooth black box.
    pub fn to_spec(&self) -> Result<FunctionSpec> {
        if let Some(p) = self.exact_poly() {
            return Ok(FunctionSpec::Multilinear(p));
        }
        let p = self.poly.map(|c| c.to_f64());
        let bb =
            crate::spec::BlackBox::new(p.n(), Smoothness::Smooth, move |x: &[f64]| p.eval_f64(x))?
                .with_support(self.poly.support())?
                .with_label("best approximation");
        Ok(FunctionSpec::BlackBox(bb))
    }
}

/// `f_k = Σ_{|T|≤k} 𝓘(f, T) Π_{i∈T}(x_i − ½)`, expanded to monomials.
pub fn best_k_approx(
    spec: &FunctionSpec,
    k: usize,
    cfg: &IntegratorConfig,
) -> Result<Approximation> {
    let centered = interaction_table(spec, k, cfg)?;
    let poly = centered_to_monomial(&centered)?;
    Ok(Approximation { k, poly, centered })
}

/// `a_k(S) = Σ_{T⊇S, T in table} (−½)^{|T|−|S|} 𝓘(f, T)`.
pub fn centered_to_monomial(table: &InteractionTable) -> Result<MultilinearPoly<Value>> {
    let mut poly = MultilinearPoly::zero(table.n())?;
    let minus_half = Value::from_ratio(-1, 2);
    for (t, v) in table.iter() {
        for s in t.subsets() {
            let c = minus_half.powi(t.len() - s.len()) * v.value().clone();
            poly.add_term(s, c);
        }
    }
    Ok(poly)
}

/// `Σ_{T⊇S} (½)^{|T|−|S|} a(T)`: the index of a multilinear polynomial read off
/// its monomial coefficients.
pub fn index_from_poly_coeffs<T: Scalar>(poly: &MultilinearPoly<T>, s: SubsetMask) -> T {
    let half = T::from_ratio(1, 2);
    poly.terms()
        .filter(|(t, _)| s.is_subset_of(*t))
        .fold(T::zero(), |acc, (t, c)| {
            acc + half.powi(t.len() - s.len()) * c.clone()
        })
}

/// `(D^S p)(½, …, ½)`.
pub fn taylor_at_center<T: Scalar>(poly: &MultilinearPoly<T>, s: SubsetMask) -> T {
    let center = vec![T::from_ratio(1, 2); poly.n()];
    poly.partial(s).eval(&center)
}

/// `w_S(x) = 12^{|S|/2} Π_{i∈S}(x_i − ½)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisW {
    pub subset: SubsetMask,
}

impl BasisW {
    pub fn new(subset: SubsetMask) -> Self {
        BasisW { subset }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let scale = (NORMALIZATION as f64).sqrt().powi(self.subset.len() as i32);
        self.subset
            .positions()
            .fold(scale, |acc, p| acc * (x[p] - 0.5))
    }

    /// `⟨w_S, w_T⟩` by Gauss–Legendre quadrature.
    pub fn inner_product(&self, other: &BasisW, order: usize) -> Result<f64> {
        if self.subset.n() != other.subset.n() {
            return Err(Error::invalid("basis elements over different ground sets"));
        }
        let rule = GaussRule::new(order)?;
        let active = self.subset.union(other.subset);
        Ok(integrate_tensor(active, &rule, |x| {
            self.eval(x) * other.eval(x)
        }))
    }

    /// Exact `⟨w_S, w_T⟩`, for reference.
    pub fn exact_inner_product(&self, other: &BasisW) -> Rational {
        if self.subset == other.subset {
            Rational::one()
        } else {
            Rational::zero()
        }
    }
}

/// Monomial coefficients of `Π_{i∈S}(x_i − ½)`.
pub fn centered_monomial(s: SubsetMask) -> MultilinearPoly<Rational> {
    let mut p = MultilinearPoly::zero(s.n()).expect("valid ground set");
    for r in s.subsets() {
        p.add_term(r, ratio(-1, 2).powi(s.len() - r.len()));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{banzhaf_interaction, multilinear_extension};
    use crate::set_function::SetFunction;
    use crate::spec::BlackBox;

    fn mask(n: usize, idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, idx).unwrap()
    }

    fn x1x2() -> FunctionSpec {
        FunctionSpec::Multilinear(MultilinearPoly::monomial(mask(2, &[1, 2])))
    }

    fn exact(spec: &FunctionSpec, s: SubsetMask) -> Rational {
        interaction(spec, s, &IntegratorConfig::default())
            .unwrap()
            .value()
            .to_rational()
            .unwrap()
    }

    #[test]
    fn product_examples() {
        let f = x1x2();
        assert_eq!(exact(&f, mask(2, &[1, 2])), ratio(1, 1));
        assert_eq!(exact(&f, mask(2, &[1])), ratio(1, 2));
        assert_eq!(exact(&f, mask(2, &[])), ratio(1, 4));
        let c = FunctionSpec::Multilinear(MultilinearPoly::constant(2, ratio(5, 3)).unwrap());
        assert!(exact(&c, mask(2, &[2])).is_zero());
    }

    #[test]
    fn table_examples() {
        let table = interaction_table(&x1x2(), 2, &IntegratorConfig::default()).unwrap();
        assert_eq!(table.len(), 4);
        assert!(table.is_exact());
        let t0 = interaction_table(&x1x2(), 0, &IntegratorConfig::default()).unwrap();
        assert_eq!(t0.len(), 1);

        let g = FunctionSpec::geometric_mean(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let t = interaction_table(&g, 1, &IntegratorConfig::default()).unwrap();
        assert_eq!(
            *t.get(mask(2, &[])).unwrap().value(),
            Value::Exact(ratio(4, 9))
        );
        assert_eq!(
            *t.get(mask(2, &[2])).unwrap().value(),
            Value::Exact(ratio(8, 15))
        );
        let quad = IntegratorConfig::new(Method::GaussTensor { order: 20 });
        let q = interaction(&g, mask(2, &[1]), &quad).unwrap();
        assert!((q.to_f64() - 8.0 / 15.0).abs() < 1e-4);
    }

    #[test]
    fn black_box_quadrature_is_exact_on_polynomials() {
        let bb = x1x2().as_black_box(Smoothness::Smooth).unwrap();
        let spec = FunctionSpec::BlackBox(bb);
        let v = interaction(&spec, mask(2, &[1, 2]), &IntegratorConfig::default()).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-13);
        assert!(matches!(
            interaction(
                &spec,
                mask(2, &[1]),
                &IntegratorConfig::new(Method::ClosedForm)
            ),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn lattice_black_box_uses_the_simplicial_rule() {
        let min = FunctionSpec::min_of(mask(2, &[1, 2])).unwrap();
        let spec = FunctionSpec::BlackBox(min.as_black_box(Smoothness::Lattice).unwrap());
        let v = interaction(&spec, mask(2, &[1, 2]), &IntegratorConfig::default()).unwrap();
        assert!((v.to_f64() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_requires_two_samples() {
        let cfg = IntegratorConfig::new(Method::MonteCarlo {
            samples: 1,
            seed: 0,
        });
        assert!(matches!(
            interaction(&x1x2(), mask(2, &[1]), &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn best_approximation_examples() {
        let approx = best_k_approx(&x1x2(), 1, &IntegratorConfig::default()).unwrap();
        let expected = MultilinearPoly::from_terms(
            2,
            [
                (mask(2, &[]), ratio(-1, 4)),
                (mask(2, &[1]), ratio(1, 2)),
                (mask(2, &[2]), ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(approx.exact_poly().unwrap(), expected);
        let full = best_k_approx(&x1x2(), 2, &IntegratorConfig::default()).unwrap();
        assert_eq!(
            full.exact_poly().unwrap(),
            MultilinearPoly::monomial(mask(2, &[1, 2]))
        );
        let zero = best_k_approx(&x1x2(), 0, &IntegratorConfig::default()).unwrap();
        assert_eq!(
            zero.exact_poly().unwrap(),
            MultilinearPoly::constant(2, ratio(1, 4)).unwrap()
        );
    }

    #[test]
    fn index_from_coefficients_examples() {
        let p: MultilinearPoly<Rational> = MultilinearPoly::monomial(mask(2, &[1, 2]));
        assert_eq!(index_from_poly_coeffs(&p, mask(2, &[1])), ratio(1, 2));
        let majority = SetFunction::from_fn(3, |s| {
            if s.len() >= 2 {
                ratio(1, 1)
            } else {
                ratio(0, 1)
            }
        })
        .unwrap();
        let ext = multilinear_extension(&majority);
        let s = mask(3, &[1]);
        assert_eq!(index_from_poly_coeffs(&ext, s), ratio(1, 2));
        assert_eq!(
            index_from_poly_coeffs(&ext, s),
            banzhaf_interaction(&majority, s).unwrap()
        );
        let c = MultilinearPoly::constant(2, ratio(3, 1)).unwrap();
        assert!(index_from_poly_coeffs(&c, mask(2, &[1])).is_zero());
    }

    #[test]
    fn taylor_examples() {
        let p: MultilinearPoly<Rational> = MultilinearPoly::monomial(mask(2, &[1, 2]));
        assert_eq!(taylor_at_center(&p, mask(2, &[1, 2])), ratio(1, 1));
        assert_eq!(taylor_at_center(&p, mask(2, &[1])), ratio(1, 2));
        let c = MultilinearPoly::constant(2, ratio(3, 1)).unwrap();
        assert!(taylor_at_center(&c, mask(2, &[1])).is_zero());
    }

    #[test]
    fn basis_is_orthonormal() {
        for a in 0..8u64 {
            for b in 0..8u64 {
                let wa = BasisW::new(SubsetMask::new(a, 3).unwrap());
                let wb = BasisW::new(SubsetMask::new(b, 3).unwrap());
                let ip = wa.inner_product(&wb, DEFAULT_ORDER).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn centered_monomial_integrates_against_itself() {
        let s = mask(3, &[1, 3]);
        let p = centered_monomial(s);
        assert_eq!(p.square_integral(), ratio(1, 144));
    }

    #[test]
    fn black_box_support_limits_active_axes() {
        let bb = BlackBox::new(3, Smoothness::Smooth, |x: &[f64]| x[0])
            .unwrap()
            .with_support(mask(3, &[1]))
            .unwrap();
        let spec = FunctionSpec::BlackBox(bb);
        let v = interaction(&spec, mask(3, &[1]), &IntegratorConfig::default()).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-13);
    }
}
