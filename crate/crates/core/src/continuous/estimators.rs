//! Monte Carlo estimators of `𝓘(f, S)`.
//!
//! Every estimator draws from a ChaCha8 stream per block of samples (see
//! [`crate::montecarlo`]), so results depend only on the seed.

use rand_chacha::ChaCha8Rng;

use super::operators::difference_unchecked;
use super::NORMALIZATION;
use crate::error::{Error, Result};
use crate::montecarlo::{beta22, open01, run};
use crate::poly::MultilinearPoly;
use crate::scalar::{Rational, Scalar};
use crate::spec::{BlackBox, FunctionSpec, Smoothness, Unary};
use crate::subset::SubsetMask;

/// Central-difference step for black-box derivatives.
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// `12^{|S|} E[f(x) Π_{i∈S}(x_i − ½)]` with `x` uniform.
    DirectInnerProduct,
    /// `E[D^S f(x)]` with `x_i ~ Beta(2,2)` for `i ∈ S`.
    BetaDerivative,
    /// Average `S`-difference over random boxes, divided by the mean box volume.
    BoxVolume,
    /// `E[Q^S_{y−x} f(x)]` with box sides drawn in proportion to their volume.
    DifferenceQuotient,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::DirectInnerProduct,
        EstimatorKind::BetaDerivative,
        EstimatorKind::BoxVolume,
        EstimatorKind::DifferenceQuotient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::DirectInnerProduct => "direct",
            EstimatorKind::BetaDerivative => "beta",
            EstimatorKind::BoxVolume => "box",
            EstimatorKind::DifferenceQuotient => "quotient",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Set when the estimator uses finite differences.
    pub biased: bool,
}

impl Estimate {
    /// `(value − reference)/stderr`. The standard error is floored at
    /// [`ROUNDOFF_FLOOR`] relative to the reference, so estimators whose samples
    /// are all equal in exact arithmetic do not report rounding noise as a
    /// deviation.
    pub fn z_score(&self, reference: f64) -> f64 {
        let gap = self.value - reference;
        let scale = self.stderr.max(ROUNDOFF_FLOOR * (1.0 + reference.abs()));
        gap / scale
    }
}

/// Relative size below which a standard error is floating-point noise.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Mixed partial `D^S f`, prepared once per estimate.
enum Derivative<'a> {
    Poly(MultilinearPoly<f64>),
    Pseudo {
        poly: MultilinearPoly<f64>,
        transforms: &'a [Unary],
    },
    Product(&'a [Unary]),
    Geometric(Vec<f64>),
    /// `D^i` of a Choquet integral: the sum of `a(T)` over coalitions whose
    /// minimum is attained at `i` (ties go to the lowest index).
    ChoquetFirst(Vec<(SubsetMask, f64)>, usize),
    Plain(&'a FunctionSpec),
    Finite(&'a BlackBox),
}

fn to_f64_poly(p: &MultilinearPoly<Rational>) -> MultilinearPoly<f64> {
    p.map(|c| c.to_f64())
}

fn prepare<'a>(spec: &'a FunctionSpec, s: SubsetMask) -> Result<Derivative<'a>> {
    if s.is_empty() {
        return Ok(Derivative::Plain(spec));
    }
    Ok(match spec {
        FunctionSpec::Multilinear(p) => Derivative::Poly(to_f64_poly(&p.partial(s))),
        FunctionSpec::PseudoMultilinear { poly, transforms } => Derivative::Pseudo {
            poly: to_f64_poly(poly),
            transforms,
        },
        FunctionSpec::Multiplicative(ts) => Derivative::Product(ts),
        FunctionSpec::GeometricMean(c) => {
            Derivative::Geometric(c.iter().map(|c| c.to_f64()).collect())
        }
        FunctionSpec::Choquet(a) if s.len() == 1 => {
            let i = s.positions().next().unwrap();
            let terms = a
                .support()
                .filter(|(t, _)| t.contains(i))
                .map(|(t, c)| (t, c.to_f64()))
                .collect();
            Derivative::ChoquetFirst(terms, i)
        }
        FunctionSpec::Choquet(_) => {
            return Err(Error::unsupported(
                "mixed partials of a Choquet integral of order 2 or more are not functions",
            ))
        }
        FunctionSpec::BlackBox(bb) if bb.smoothness() == Smoothness::Smooth => {
            Derivative::Finite(bb)
        }
        FunctionSpec::BlackBox(_) => {
            return Err(Error::unsupported(
                "derivative estimators need a black box declared smooth",
            ))
        }
    })
}

fn choquet_argmin(t: SubsetMask, x: &[f64]) -> usize {
    let mut best = usize::MAX;
    for p in t.positions() {
        if best == usize::MAX || x[p] < x[best] {
            best = p;
        }
    }
    best
}

impl Derivative<'_> {
    fn eval(&self, s: SubsetMask, x: &[f64]) -> f64 {
        match self {
            Derivative::Poly(p) => p.eval_f64(x),
            Derivative::Pseudo { poly, transforms } => poly
                .terms()
                .filter(|(t, _)| s.is_subset_of(*t))
                .map(|(t, c)| {
                    t.positions().fold(*c, |acc, p| {
                        acc * if s.contains(p) {
                            transforms[p].derivative(x[p])
                        } else {
                            transforms[p].eval(x[p])
                        }
                    })
                })
                .sum(),
            Derivative::Product(ts) => ts
                .iter()
                .enumerate()
                .map(|(p, t)| {
                    if s.contains(p) {
                        t.derivative(x[p])
                    } else {
                        t.eval(x[p])
                    }
                })
                .product(),
            Derivative::Geometric(c) => c
                .iter()
                .enumerate()
                .map(|(p, &c)| {
                    if s.contains(p) {
                        if c == 0.0 {
                            0.0
                        } else {
                            c * x[p].powf(c - 1.0)
                        }
                    } else if c == 0.0 {
                        1.0
                    } else {
                        x[p].powf(c)
                    }
                })
                .product(),
            Derivative::ChoquetFirst(terms, i) => terms
                .iter()
                .filter(|(t, _)| choquet_argmin(*t, x) == *i)
                .map(|(_, c)| c)
                .sum(),
            Derivative::Plain(spec) => spec.eval_unchecked(x),
            Derivative::Finite(bb) => central_difference(bb, s, x),
        }
    }

    fn biased(&self) -> bool {
        matches!(self, Derivative::Finite(_))
    }
}

fn central_difference(bb: &BlackBox, s: SubsetMask, x: &[f64]) -> f64 {
    let mut center = x.to_vec();
    let mut h = vec![0.0; x.len()];
    let mut base = x.to_vec();
    for p in s.positions() {
        center[p] = x[p].clamp(FD_STEP, 1.0 - FD_STEP);
        base[p] = center[p] - FD_STEP;
        h[p] = 2.0 * FD_STEP;
    }
    let spec = FunctionSpec::BlackBox(bb.clone());
    let d = difference_unchecked(&spec, s, &h, &base);
    s.positions().fold(d, |acc, _| acc / (2.0 * FD_STEP))
}

/// `D^S f(x)`. Black boxes use central differences with step [`FD_STEP`];
/// the returned flag marks such biased values.
pub fn partial_derivative(spec: &FunctionSpec, s: SubsetMask, x: &[f64]) -> Result<(f64, bool)> {
    if s.n() != spec.n() {
        return Err(Error::invalid("subset and spec disagree on n"));
    }
    spec.eval(x)?;
    let d = prepare(spec, s)?;
    Ok((d.eval(s, x), d.biased()))
}

fn uniform_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| open01(rng)).collect()
}

/// Fills `x_S` and `h_S` with a random box `[x_i, y_i]`, `(x_i, y_i)` uniform on `x ≤ y`.
fn triangle_box(rng: &mut ChaCha8Rng, s: SubsetMask, x: &mut [f64], h: &mut [f64]) {
    for p in s.positions() {
        let (u, v) = (open01(rng), open01(rng));
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        x[p] = lo;
        h[p] = hi - lo;
    }
}

/// Fills `x_S` and `h_S` with a box drawn with density `6 (y_i − x_i)` per axis.
fn volume_weighted_box(rng: &mut ChaCha8Rng, s: SubsetMask, x: &mut [f64], h: &mut [f64]) {
    for p in s.positions() {
        let d = beta22(rng);
        h[p] = d;
        x[p] = open01(rng) * (1.0 - d);
    }
}

/// Monte Carlo estimate of `𝓘(f, S)` from `samples` draws.
pub fn estimate(
    spec: &FunctionSpec,
    s: SubsetMask,
    kind: EstimatorKind,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if s.n() != spec.n() {
        return Err(Error::invalid("subset and spec disagree on n"));
    }
    if samples < 2 {
        return Err(Error::invalid("a standard error needs at least 2 samples"));
    }
    let n = spec.n();
    let size = s.len();
    let mut biased = false;
    let stats = match kind {
        EstimatorKind::DirectInnerProduct => {
            let scale = (NORMALIZATION as f64).powi(size as i32);
            // f(½,…,½) as control variate; it integrates to zero against the weight.
            let center = if size == 0 {
                0.0
            } else {
                spec.eval_unchecked(&vec![0.5; n])
            };
            run(samples, seed, |rng| {
                let x = uniform_point(rng, n);
                let w = s.positions().fold(scale, |acc, p| acc * (x[p] - 0.5));
                (spec.eval_unchecked(&x) - center) * w
            })?
        }
        EstimatorKind::BetaDerivative => {
            let d = prepare(spec, s)?;
            biased = d.biased();
            run(samples, seed, |rng| {
                let mut x = uniform_point(rng, n);
                for p in s.positions() {
                    x[p] = beta22(rng);
                }
                d.eval(s, &x)
            })?
        }
        EstimatorKind::BoxVolume => {
            let scale = 3f64.powi(size as i32);
            run(samples, seed, |rng| {
                let mut x = uniform_point(rng, n);
                let mut h = vec![0.0; n];
                triangle_box(rng, s, &mut x, &mut h);
                scale * difference_unchecked(spec, s, &h, &x)
            })?
        }
        EstimatorKind::DifferenceQuotient => run(samples, seed, |rng| {
            let mut x = uniform_point(rng, n);
            let mut h = vec![0.0; n];
            volume_weighted_box(rng, s, &mut x, &mut h);
            let d = difference_unchecked(spec, s, &h, &x);
            s.positions().fold(d, |acc, p| acc / h[p])
        })?,
    };
    Ok(Estimate {
        value: stats.mean,
        stderr: stats.stderr(),
        samples,
        biased,
    })
}

/// Monte Carlo estimate of `μ(S) = ∫∫_{x_S ≤ y_S} Δ^S_{y−x} v_S(x)`, where
/// `v_S = Π_{i∈S} x_i`; the exact value is `6^{−|S|}`.
pub fn box_volume_measure(size: usize, samples: usize, seed: u64) -> Result<Estimate> {
    if size == 0 || size > crate::subset::MAX_N {
        return Err(Error::invalid("box measure needs 1 ≤ |S| ≤ 63"));
    }
    if samples < 2 {
        return Err(Error::invalid("a standard error needs at least 2 samples"));
    }
    let s = SubsetMask::full(size)?;
    let v_s = FunctionSpec::Multilinear(MultilinearPoly::monomial(s));
    let area = 0.5f64.powi(size as i32);
    let stats = run(samples, seed, |rng| {
        let mut x = vec![0.0; size];
        let mut h = vec![0.0; size];
        triangle_box(rng, s, &mut x, &mut h);
        area * difference_unchecked(&v_s, s, &h, &x)
    })?;
    Ok(Estimate {
        value: stats.mean,
        stderr: stats.stderr(),
        samples,
        biased: false,
    })
}
