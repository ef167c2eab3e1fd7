//! The function-spec data model: structured function classes with exact
//! coefficients, plus opaque black-box evaluators.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::scalar::{ratio, Rational, Scalar};
use crate::set_function::SetFunction;
use crate::subset::{check_n, check_permutation, full_bits, SubsetMask};

/// Piecewise-linear unary function on `[0,1]` through explicit knots.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    knots: Vec<(Rational, Rational)>,
}

impl Tabulated {
    /// Knots `(t_j, y_j)` must start at `t = 0`, end at `t = 1` and be strictly increasing in `t`.
    pub fn new(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid(
                "tabulated transform needs at least two knots",
            ));
        }
        if !knots[0].0.is_zero() || !knots[knots.len() - 1].0.is_one() {
            return Err(Error::invalid("tabulated knots must span [0, 1]"));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid(
                "tabulated knots must be strictly increasing",
            ));
        }
        Ok(Tabulated { knots })
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    /// Segments `((t0, y0), (t1, y1))`.
    pub fn segments(&self) -> impl Iterator<Item = (&(Rational, Rational), &(Rational, Rational))> {
        self.knots.windows(2).map(|w| (&w[0], &w[1]))
    }

    fn segment_index(&self, t: f64) -> usize {
        let last = self.knots.len() - 2;
        (0..=last)
            .find(|&j| t < self.knots[j + 1].0.to_f64())
            .unwrap_or(last)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let j = self.segment_index(t);
        let (t0, y0) = (&self.knots[j].0, &self.knots[j].1);
        let (t1, y1) = (&self.knots[j + 1].0, &self.knots[j + 1].1);
        let (t0, y0, t1, y1) = (t0.to_f64(), y0.to_f64(), t1.to_f64(), y1.to_f64());
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    pub fn eval_exact(&self, t: &Rational) -> Rational {
        let last = self.knots.len() - 2;
        let j = (0..=last)
            .find(|&j| *t < self.knots[j + 1].0)
            .unwrap_or(last);
        let (t0, y0) = &self.knots[j];
        let (t1, y1) = &self.knots[j + 1];
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    /// Slope of the segment containing `t` (right segment at interior knots).
    pub fn slope(&self, t: f64) -> f64 {
        let j = self.segment_index(t);
        let (t0, y0) = &self.knots[j];
        let (t1, y1) = &self.knots[j + 1];
        ((y1 - y0) / (t1 - t0)).to_f64()
    }

    /// `t ↦ φ(1 − t)`.
    pub fn reflected(&self) -> Tabulated {
        let knots = self
            .knots
            .iter()
            .rev()
            .map(|(t, y)| (Rational::one() - t, y.clone()))
            .collect();
        Tabulated { knots }
    }
}

/// Unary transforms `φ_i` of pseudo-multilinear and multiplicative specs.
#[derive(Clone, Debug, PartialEq)]
pub enum Unary {
    Identity,
    /// `t^c` with `c ≥ 0` (`0^0 = 1`).
    Power(Rational),
    /// `intercept + slope · t`.
    Affine {
        intercept: Rational,
        slope: Rational,
    },
    Tabulated(Tabulated),
}

impl Unary {
    pub fn power(c: Rational) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::invalid("power exponent must be nonnegative"));
        }
        Ok(Unary::Power(c))
    }

    pub fn constant(c: Rational) -> Self {
        Unary::Affine {
            intercept: c,
            slope: Rational::zero(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Unary::Identity => t,
            Unary::Power(c) => {
                if c.is_zero() {
                    1.0
                } else {
                    t.powf(c.to_f64())
                }
            }
            Unary::Affine { intercept, slope } => intercept.to_f64() + slope.to_f64() * t,
            Unary::Tabulated(tab) => tab.eval(t),
        }
    }

    /// Exact value at a rational point, when the transform is rational-valued there.
    pub fn eval_exact(&self, t: &Rational) -> Option<Rational> {
        match self {
            Unary::Identity => Some(t.clone()),
            Unary::Power(c) => {
                if c.is_integer() {
                    let e = num_traits::ToPrimitive::to_usize(&c.to_integer())?;
                    Some(num_traits::pow(t.clone(), e))
                } else {
                    None
                }
            }
            Unary::Affine { intercept, slope } => Some(intercept + slope * t),
            Unary::Tabulated(tab) => Some(tab.eval_exact(t)),
        }
    }

    /// `φ'(t)`; piecewise-linear transforms report the slope of the containing segment.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Unary::Identity => 1.0,
            Unary::Power(c) => {
                if c.is_zero() {
                    0.0
                } else {
                    let c = c.to_f64();
                    c * t.powf(c - 1.0)
                }
            }
            Unary::Affine { slope, .. } => slope.to_f64(),
            Unary::Tabulated(tab) => tab.slope(t),
        }
    }

    /// `t ↦ φ(1 − t)` when it stays within the transform family.
    pub fn reflected(&self) -> Option<Unary> {
        match self {
            Unary::Identity => Some(Unary::Affine {
                intercept: Rational::one(),
                slope: -Rational::one(),
            }),
            Unary::Power(c) if c.is_zero() => Some(Unary::Power(c.clone())),
            Unary::Power(_) => None,
            Unary::Affine { intercept, slope } => Some(Unary::Affine {
                intercept: intercept + slope,
                slope: -slope.clone(),
            }),
            Unary::Tabulated(tab) => Some(Unary::Tabulated(tab.reflected())),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Unary::Identity => false,
            Unary::Power(c) => c.is_zero(),
            Unary::Affine { slope, .. } => slope.is_zero(),
            Unary::Tabulated(tab) => tab.knots().windows(2).all(|w| w[0].1 == w[1].1),
        }
    }
}

/// How regular a black box is, as declared by its author.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    /// All mixed partials exist and are continuous on the open cube.
    Smooth,
    /// Smooth on each simplex `x_{σ(1)} ≤ … ≤ x_{σ(n)}`; kinks only where coordinates tie (min, max, Choquet-like).
    Lattice,
    /// No regularity promised.
    Rough,
}

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Opaque evaluator. The closure must be reentrant: it may be called concurrently.
#[derive(Clone)]
pub struct BlackBox {
    n: usize,
    evaluator: Evaluator,
    smoothness: Smoothness,
    support: SubsetMask,
    label: String,
}

impl BlackBox {
    pub fn new(
        n: usize,
        smoothness: Smoothness,
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_n(n)?;
        Ok(BlackBox {
            n,
            evaluator: Arc::new(evaluator),
            smoothness,
            support: SubsetMask::from_bits(full_bits(n), n),
            label: String::from("black box"),
        })
    }

    /// Declares that the function depends only on the variables in `support`.
    /// Quadrature then collapses the remaining axes.
    pub fn with_support(mut self, support: SubsetMask) -> Result<Self> {
        if support.n() != self.n {
            return Err(Error::invalid("support mask has the wrong ground set size"));
        }
        self.support = support;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn support(&self) -> SubsetMask {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn call(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("smoothness", &self.smoothness)
            .field("support", &self.support)
            .finish()
    }
}

/// A function on `[0,1]^n`.
#[derive(Clone, Debug)]
pub enum FunctionSpec {
    Multilinear(MultilinearPoly<Rational>),
    /// `f(x) = Σ_T a(T) min_{i∈T} x_i`, with `min` over `∅` taken as 1 so that
    /// `f(1_S) = Σ_{T⊆S} a(T)`.
    Choquet(SetFunction<Rational>),
    PseudoMultilinear {
        poly: MultilinearPoly<Rational>,
        transforms: Vec<Unary>,
    },
    Multiplicative(Vec<Unary>),
    /// `Π x_i^{c_i}` with `c_i ≥ 0`, `Σ c_i = 1`.
    GeometricMean(Vec<Rational>),
    BlackBox(BlackBox),
}

impl FunctionSpec {
    pub fn multilinear(poly: MultilinearPoly<Rational>) -> Self {
        FunctionSpec::Multilinear(poly)
    }

    pub fn choquet(a: SetFunction<Rational>) -> Self {
        FunctionSpec::Choquet(a)
    }

    pub fn pseudo_multilinear(
        poly: MultilinearPoly<Rational>,
        transforms: Vec<Unary>,
    ) -> Result<Self> {
        if transforms.len() != poly.n() {
            return Err(Error::invalid(format!(
                "pseudo-multilinear spec needs {} transforms, got {}",
                poly.n(),
                transforms.len()
            )));
        }
        validate_transforms(&transforms)?;
        Ok(FunctionSpec::PseudoMultilinear { poly, transforms })
    }

    pub fn multiplicative(transforms: Vec<Unary>) -> Result<Self> {
        check_n(transforms.len())?;
        validate_transforms(&transforms)?;
        Ok(FunctionSpec::Multiplicative(transforms))
    }

    pub fn geometric_mean(weights: Vec<Rational>) -> Result<Self> {
        check_n(weights.len())?;
        if weights.iter().any(|c| c.is_negative()) {
            return Err(Error::invalid("geometric-mean weights must be nonnegative"));
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "geometric-mean weights must sum to 1, got {total}"
            )));
        }
        Ok(FunctionSpec::GeometricMean(weights))
    }

    pub fn black_box(bb: BlackBox) -> Self {
        FunctionSpec::BlackBox(bb)
    }

    /// The Choquet integral `min_{i∈T} x_i` for a single coalition `T`.
    pub fn min_of(t: SubsetMask) -> Result<Self> {
        let mut a = SetFunction::zeros(t.n())?;
        a.set(t, Rational::one());
        Ok(FunctionSpec::Choquet(a))
    }

    /// `(1/n) Σ x_i`.
    pub fn arithmetic_mean(n: usize) -> Result<Self> {
        let terms = (0..n).map(|p| (SubsetMask::from_bits(1 << p, n), ratio(1, n as i64)));
        Ok(FunctionSpec::Multilinear(MultilinearPoly::from_terms(
            n, terms,
        )?))
    }

    pub fn n(&self) -> usize {
        match self {
            FunctionSpec::Multilinear(p) => p.n(),
            FunctionSpec::Choquet(a) => a.n(),
            FunctionSpec::PseudoMultilinear { poly, .. } => poly.n(),
            FunctionSpec::Multiplicative(t) => t.len(),
            FunctionSpec::GeometricMean(c) => c.len(),
            FunctionSpec::BlackBox(bb) => bb.n(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FunctionSpec::Multilinear(_) => "multilinear",
            FunctionSpec::Choquet(_) => "choquet",
            FunctionSpec::PseudoMultilinear { .. } => "pseudo_multilinear",
            FunctionSpec::Multiplicative(_) => "multiplicative",
            FunctionSpec::GeometricMean(_) => "geometric_mean",
            FunctionSpec::BlackBox(_) => "black_box",
        }
    }

    pub fn is_structured(&self) -> bool {
        !matches!(self, FunctionSpec::BlackBox(_))
    }

    /// Variables the function may depend on. Every variable outside is ineffective.
    pub fn support(&self) -> SubsetMask {
        let n = self.n();
        match self {
            FunctionSpec::Multilinear(p) => p.support(),
            FunctionSpec::Choquet(a) => {
                let bits = a.support().fold(0u64, |acc, (s, _)| acc | s.bits());
                SubsetMask::from_bits(bits, n)
            }
            FunctionSpec::PseudoMultilinear { poly, transforms } => {
                let mut bits = 0u64;
                for (s, _) in poly.terms() {
                    for p in s.positions() {
                        if !transforms[p].is_constant() {
                            bits |= 1 << p;
                        }
                    }
                }
                SubsetMask::from_bits(bits, n)
            }
            FunctionSpec::Multiplicative(ts) => {
                let bits = ts
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| !t.is_constant())
                    .fold(0u64, |acc, (p, _)| acc | 1 << p);
                SubsetMask::from_bits(bits, n)
            }
            FunctionSpec::GeometricMean(c) => {
                let bits = c
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .fold(0u64, |acc, (p, _)| acc | 1 << p);
                SubsetMask::from_bits(bits, n)
            }
            FunctionSpec::BlackBox(bb) => bb.support(),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n()
            )));
        }
        if let Some(i) = x.iter().position(|v| v.is_nan()) {
            return Err(Error::invalid(format!("coordinate x{} is NaN", i + 1)));
        }
        if let Some(i) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!(
                "coordinate x{} = {} lies outside [0, 1]",
                i + 1,
                x[i]
            )));
        }
        Ok(())
    }

    /// `f(x)` for `x ∈ [0,1]^n`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let v = self.eval_unchecked(x);
        if v.is_nan() {
            return Err(Error::Evaluation(format!(
                "{} evaluated to NaN at {x:?}",
                self.kind_name()
            )));
        }
        Ok(v)
    }

    /// Evaluation without argument checks, for integrators that only
    /// generate points inside the cube.
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            FunctionSpec::Multilinear(p) => p.eval_f64(x),
            FunctionSpec::Choquet(a) => a.support().map(|(t, c)| c.to_f64() * min_over(t, x)).sum(),
            FunctionSpec::PseudoMultilinear { poly, transforms } => {
                let phi: Vec<f64> = transforms.iter().zip(x).map(|(t, &v)| t.eval(v)).collect();
                poly.eval_f64(&phi)
            }
            FunctionSpec::Multiplicative(ts) => ts.iter().zip(x).map(|(t, &v)| t.eval(v)).product(),
            FunctionSpec::GeometricMean(c) => c
                .iter()
                .zip(x)
                .map(|(c, &v)| if c.is_zero() { 1.0 } else { v.powf(c.to_f64()) })
                .product(),
            FunctionSpec::BlackBox(bb) => bb.call(x),
        }
    }

    /// Exact `f(x)` at a rational point, for specs that are rational-valued there.
    pub fn eval_exact(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.n() {
            return Err(Error::invalid("point has the wrong dimension"));
        }
        let (zero, one) = (Rational::zero(), Rational::one());
        if x.iter().any(|v| *v < zero || *v > one) {
            return Err(Error::Domain("point lies outside [0, 1]^n".into()));
        }
        let inexact =
            || Error::unsupported(format!("{} is not rational-valued here", self.kind_name()));
        match self {
            FunctionSpec::Multilinear(p) => Ok(p.eval(x)),
            FunctionSpec::Choquet(a) => Ok(a
                .support()
                .map(|(t, c)| {
                    let m = t
                        .positions()
                        .map(|p| &x[p])
                        .min()
                        .cloned()
                        .unwrap_or_else(Rational::one);
                    c * m
                })
                .sum()),
            FunctionSpec::PseudoMultilinear { poly, transforms } => {
                let phi = transforms
                    .iter()
                    .zip(x)
                    .map(|(t, v)| t.eval_exact(v))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(inexact)?;
                Ok(poly.eval(&phi))
            }
            FunctionSpec::Multiplicative(ts) => ts
                .iter()
                .zip(x)
                .map(|(t, v)| t.eval_exact(v))
                .try_fold(Rational::one(), |acc, v| v.map(|v| acc * v))
                .ok_or_else(inexact),
            FunctionSpec::GeometricMean(c) => {
                let mut acc = Rational::one();
                for (c, v) in c.iter().zip(x) {
                    if c.is_zero() {
                        continue;
                    }
                    if !c.is_integer() {
                        return Err(inexact());
                    }
                    acc *= num_traits::pow(
                        v.clone(),
                        num_traits::ToPrimitive::to_usize(&c.to_integer()).ok_or_else(inexact)?,
                    );
                }
                Ok(acc)
            }
            FunctionSpec::BlackBox(_) => Err(inexact()),
        }
    }

    /// `π(f)(x_1, …, x_n) = f(x_{π(1)}, …, x_{π(n)})`, with `perm[i] = π(i)` zero-based.
    ///
    /// Structured specs receive the permutation in their coefficients: the
    /// coefficient of `S` moves to `π(S)` and the transform or weight of
    /// variable `i` moves to `π(i)`.
    pub fn permute(&self, perm: &[usize]) -> Result<FunctionSpec> {
        let n = self.n();
        check_permutation(perm, n)?;
        fn move_items<T: Clone>(items: &[T], perm: &[usize]) -> Vec<T> {
            let mut out: Vec<Option<T>> = vec![None; items.len()];
            for (i, item) in items.iter().enumerate() {
                out[perm[i]] = Some(item.clone());
            }
            out.into_iter().map(|o| o.expect("bijection")).collect()
        }
        Ok(match self {
            FunctionSpec::Multilinear(p) => FunctionSpec::Multilinear(p.permuted(perm)?),
            FunctionSpec::Choquet(a) => {
                let mut out = SetFunction::zeros(n)?;
                for (s, c) in a.support() {
                    out.set(s.permuted(perm)?, c.clone());
                }
                FunctionSpec::Choquet(out)
            }
            FunctionSpec::PseudoMultilinear { poly, transforms } => {
                FunctionSpec::PseudoMultilinear {
                    poly: poly.permuted(perm)?,
                    transforms: move_items(transforms, perm),
                }
            }
            FunctionSpec::Multiplicative(ts) => FunctionSpec::Multiplicative(move_items(ts, perm)),
            FunctionSpec::GeometricMean(c) => FunctionSpec::GeometricMean(move_items(c, perm)),
            FunctionSpec::BlackBox(bb) => {
                let inner = bb.clone();
                let perm_owned = perm.to_vec();
                let wrapped = BlackBox::new(n, bb.smoothness(), move |x: &[f64]| {
                    let y: Vec<f64> = perm_owned.iter().map(|&p| x[p]).collect();
                    inner.call(&y)
                })?
                .with_support(bb.support().permuted(perm)?)?
                .with_label(format!("permuted {}", bb.label()));
                FunctionSpec::BlackBox(wrapped)
            }
        })
    }

    /// Opaque view of the same function, for routing a structured spec through
    /// the numeric paths.
    pub fn as_black_box(&self, smoothness: Smoothness) -> Result<BlackBox> {
        let spec = self.clone();
        Ok(BlackBox::new(self.n(), smoothness, move |x: &[f64]| {
            spec.eval_unchecked(x)
        })?
        .with_support(self.support())?
        .with_label(format!("{} (opaque)", self.kind_name())))
    }
}

fn validate_transforms(ts: &[Unary]) -> Result<()> {
    for (i, t) in ts.iter().enumerate() {
        if let Unary::Power(c) = t {
            if c.is_negative() {
                return Err(Error::invalid(format!(
                    "transform of x{} has a negative exponent",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn min_over(t: SubsetMask, x: &[f64]) -> f64 {
    t.positions().map(|p| x[p]).fold(1.0, f64::min)
}
