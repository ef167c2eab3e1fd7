use num_traits::{One, Signed, Zero};

use super::oracles::{continuous_least_squares, discrete_least_squares};
use super::{Ctx, Gen, Probe, Property};
use crate::closed_forms::{
    beta_fn, geometric_mean_interaction, multiplicative_ratio, pseudo_multilinear_interaction,
    unary_moments,
};
use crate::continuous::{
    best_k_approx, box_volume_measure, dual, estimate, index_from_poly_coeffs, interaction,
    s_difference, self_dual_split, taylor_at_center, BasisW, EstimatorKind, IntegratorConfig,
    Method,
};
use crate::discrete::{
    banzhaf_all, banzhaf_interaction, best_k_approx_discrete, discrete_derivative_average, mobius,
    vertex_game, zeta,
};
use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::quadrature::{integrate_simplicial, GaussRule, DEFAULT_ORDER};
use crate::scalar::{ratio, Rational, Scalar, Value};
use crate::set_function::SetFunction;
use crate::spec::{min_over, BlackBox, FunctionSpec, Smoothness, Unary};
use crate::stats::{fit_report, moments, normalized_index};
use crate::subset::{subsets_of_size_at_most, SubsetMask};

pub(crate) const ALL: &[Property] = &[
    prop("mobius_zeta_inverse", false, mobius_zeta_inverse),
    prop(
        "banzhaf_matches_derivative_average",
        false,
        banzhaf_matches_derivative_average,
    ),
    prop(
        "discrete_best_k_is_least_squares",
        false,
        discrete_best_k_is_least_squares,
    ),
    prop(
        "continuous_best_k_is_least_squares",
        false,
        continuous_best_k_is_least_squares,
    ),
    prop("banzhaf_equivalence", false, banzhaf_equivalence),
    prop("projection", false, projection),
    prop("taylor_at_center", false, taylor_property),
    prop("symmetry", false, symmetry),
    prop("linearity", false, linearity),
    prop("orthonormality", false, orthonormality),
    prop("min_moment", false, min_moment),
    prop("duality", false, duality),
    prop("ineffective_variables", false, ineffective_variables),
    prop("dummy_partition", false, dummy_partition),
    prop("k_additivity", false, k_additivity),
    prop("s_increasingness", false, s_increasingness),
    prop("r_squared_consistency", false, r_squared_consistency),
    prop("closed_form_identities", false, closed_form_identities),
    prop("approximation_mean", false, approximation_mean),
    prop("normalized_index_laws", false, normalized_index_laws),
    prop("reference_statistics", false, reference_statistics),
    prop("estimator_agreement", true, estimator_agreement),
    prop("box_measure", true, box_measure),
    prop(
        "choquet_matches_box_volume",
        true,
        choquet_matches_box_volume,
    ),
    prop(
        "estimators_match_quadrature",
        true,
        estimators_match_quadrature,
    ),
];

const fn prop(name: &'static str, full_only: bool, run: super::PropertyFn) -> Property {
    Property {
        name,
        full_only,
        run,
    }
}

fn auto() -> IntegratorConfig {
    IntegratorConfig::default()
}

fn exact(spec: &FunctionSpec, s: SubsetMask) -> Result<Rational> {
    interaction(spec, s, &auto())?
        .value()
        .exact()
        .cloned()
        .ok_or_else(|| {
            Error::Inconsistent(format!("index of {} at {s} is not exact", spec.kind_name()))
        })
}

fn all_subsets(n: usize) -> Vec<SubsetMask> {
    subsets_of_size_at_most(n, n).expect("valid n").collect()
}

fn sign(size: usize) -> Rational {
    if size % 2 == 1 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn describe(spec: &FunctionSpec) -> String {
    match spec {
        FunctionSpec::Multilinear(p) => format!("multilinear {:?}", p.terms().collect::<Vec<_>>()),
        FunctionSpec::Choquet(a) => format!("choquet {:?}", a.support().collect::<Vec<_>>()),
        other => format!("{other:?}"),
    }
}

fn mobius_zeta_inverse(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(1);
    let max_n = if ctx.full() { 12 } else { 8 };
    for _ in 0..ctx.count(20, 50) {
        let n = 1 + g.index(max_n);
        let v = g.game(n);
        let a = mobius(&v);
        p.check(zeta(&a) == v, || {
            format!("zeta(mobius(v)) != v for n = {n}")
        });
        p.check(mobius(&zeta(&v)) == v, || {
            format!("mobius(zeta(v)) != v for n = {n}")
        });
        if n <= 6 {
            for s in all_subsets(n) {
                let naive: Rational = s
                    .subsets()
                    .map(|t| {
                        if (s.len() - t.len()) % 2 == 0 {
                            v.get(t).clone()
                        } else {
                            -v.get(t).clone()
                        }
                    })
                    .sum();
                p.check(naive == *a.get(s), || {
                    format!("mobius at {s} differs from the alternating sum")
                });
            }
        }
    }
    Ok(())
}

fn banzhaf_matches_derivative_average(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(2);
    let max_n = if ctx.full() { 7 } else { 5 };
    for _ in 0..ctx.count(10, 25) {
        let n = 1 + g.index(max_n);
        let v = g.game(n);
        for s in all_subsets(n) {
            let b = banzhaf_interaction(&v, s)?;
            let d = discrete_derivative_average(&v, s)?;
            p.check(b == d, || {
                format!("n = {n}, S = {s}: Banzhaf {b}, derivative average {d}")
            });
        }
    }
    Ok(())
}

fn discrete_best_k_is_least_squares(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(3);
    let max_n = if ctx.full() { 6 } else { 4 };
    for _ in 0..ctx.count(4, 10) {
        let n = 1 + g.index(max_n);
        let v = g.game(n);
        let banzhaf = banzhaf_all(&v);
        for k in 0..=n {
            let fitted = best_k_approx_discrete(&v, k)?;
            let oracle = discrete_least_squares(&v, k)?;
            p.check(fitted == oracle, || {
                format!("n = {n}, k = {k}: closed form differs from normal equations")
            });
            for (s, c) in fitted.terms().filter(|(s, _)| s.len() == k) {
                p.check(c == banzhaf.get(s), || {
                    format!("n = {n}, k = {k}: top coefficient at {s} is not the Banzhaf index")
                });
            }
        }
    }
    Ok(())
}

fn continuous_best_k_is_least_squares(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(4);
    let max_n = if ctx.full() { 6 } else { 4 };
    for _ in 0..ctx.count(4, 10) {
        let n = 1 + g.index(max_n);
        let poly = g.poly(n, 0.6);
        let spec = FunctionSpec::Multilinear(poly.clone());
        for k in 0..=n {
            let approx = best_k_approx(&spec, k, &auto())?;
            let oracle = continuous_least_squares(&poly, k)?;
            p.check(approx.exact_poly().as_ref() == Some(&oracle), || {
                format!(
                    "n = {n}, k = {k}, f = {}: f_k differs from normal equations",
                    describe(&spec)
                )
            });
        }
    }
    Ok(())
}

fn banzhaf_equivalence(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(5);
    for case in 0..ctx.count(40, 200) {
        let n = 1 + g.index(8);
        let poly = g.poly(n, 0.3);
        let v = vertex_game(&poly)?;
        let banzhaf = banzhaf_all(&v);
        let spec = FunctionSpec::Multilinear(poly.clone());
        for s in all_subsets(n) {
            let i = exact(&spec, s)?;
            p.check(i == *banzhaf.get(s), || {
                format!(
                    "case {case}, S = {s}: 𝓘 = {i}, Banzhaf = {}",
                    banzhaf.get(s)
                )
            });
            let from_coeffs = index_from_poly_coeffs(&poly, s);
            p.check(from_coeffs == *banzhaf.get(s), || {
                format!("case {case}, S = {s}: coefficient formula differs")
            });
        }
        let s = g.subset(n);
        p.check(banzhaf_interaction(&v, s)? == *banzhaf.get(s), || {
            format!("case {case}: batch Banzhaf differs at {s}")
        });
    }
    Ok(())
}

/// Smooth test function `exp(Σ w_i x_i)`.
fn smooth_black_box(g: &mut Gen, n: usize) -> Result<FunctionSpec> {
    let w: Vec<f64> = (0..n).map(|_| 2.0 * g.unit() - 1.0).collect();
    let bb = BlackBox::new(n, Smoothness::Smooth, move |x: &[f64]| {
        w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>().exp()
    })?
    .with_label("exp of a linear form");
    Ok(FunctionSpec::BlackBox(bb))
}

fn projection(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(6);
    for case in 0..ctx.count(10, 50) {
        let n = 1 + g.index(5);
        let spec = g.spec(n);
        for k in 0..=n {
            let approx = best_k_approx(&spec, k, &auto())?;
            let fk = approx.to_spec()?;
            for (s, v) in approx.centered.iter() {
                let back = exact(&fk, s)?;
                p.check(Some(back.clone()) == v.value().to_rational(), || {
                    format!(
                        "case {case}, k = {k}, S = {s}, f = {}: 𝓘(f_k) = {back}, 𝓘(f) = {}",
                        describe(&spec),
                        v.value()
                    )
                });
            }
        }
    }
    for case in 0..ctx.count(2, 6) {
        let n = 1 + g.index(3);
        let spec = smooth_black_box(&mut g, n)?;
        for k in 0..=n {
            let approx = best_k_approx(&spec, k, &auto())?;
            let fk = approx.to_spec()?;
            for (s, v) in approx.centered.iter() {
                let back = interaction(&fk, s, &auto())?.to_f64();
                p.close(back, v.to_f64(), 1e-10, || {
                    format!("quadrature case {case}, k = {k}, S = {s}")
                });
            }
        }
    }
    Ok(())
}

fn taylor_property(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(7);
    for _ in 0..ctx.count(20, 60) {
        let n = 1 + g.index(6);
        let poly = g.poly(n, 0.5);
        for s in all_subsets(n) {
            let t = taylor_at_center(&poly, s);
            let i = index_from_poly_coeffs(&poly, s);
            p.check(t == i, || {
                format!("n = {n}, S = {s}: Taylor {t}, index {i}")
            });
        }
    }
    Ok(())
}

fn symmetry(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(8);
    for _ in 0..ctx.count(20, 60) {
        let n = 1 + g.index(5);
        let spec = g.spec(n);
        let perm = g.permutation(n);
        let moved = spec.permute(&perm)?;
        for s in all_subsets(n) {
            let a = exact(&spec, s)?;
            let b = exact(&moved, s.permuted(&perm)?)?;
            p.check(a == b, || {
                format!("{}, π = {perm:?}, S = {s}: {a} vs {b}", describe(&spec))
            });
        }
        let x = g.point(n);
        let y: Vec<f64> = perm.iter().map(|&q| x[q]).collect();
        let (lhs, rhs) = (moved.eval(&x)?, spec.eval(&y)?);
        p.close(lhs, rhs, 1e-12 * (1.0 + rhs.abs()), || {
            format!("{}: permuted evaluation", describe(&spec))
        });
    }
    Ok(())
}

fn linearity(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(9);
    for _ in 0..ctx.count(20, 60) {
        let n = 1 + g.index(5);
        let (alpha, beta) = (g.rational(), g.rational());
        let (f, h) = (g.poly(n, 0.5), g.poly(n, 0.5));
        let combo = &f.scale(&alpha) + &h.scale(&beta);
        let (a, b) = (g.capacity(n, 3), g.capacity(n, 3));
        let cap = SetFunction::from_fn(n, |s| &alpha * a.get(s) + &beta * b.get(s))?;
        let pairs = [
            (
                FunctionSpec::Multilinear(combo),
                FunctionSpec::Multilinear(f),
                FunctionSpec::Multilinear(h),
            ),
            (
                FunctionSpec::Choquet(cap),
                FunctionSpec::Choquet(a),
                FunctionSpec::Choquet(b),
            ),
        ];
        for (sum, x, y) in &pairs {
            for s in all_subsets(n) {
                let lhs = exact(sum, s)?;
                let rhs = &alpha * exact(x, s)? + &beta * exact(y, s)?;
                p.check(lhs == rhs, || {
                    format!("{}: S = {s}, {lhs} vs {rhs}", sum.kind_name())
                });
            }
        }
    }
    Ok(())
}

fn orthonormality(p: &mut Probe, _ctx: &Ctx) -> Result<()> {
    for n in 1..=4 {
        for s in all_subsets(n) {
            for t in all_subsets(n) {
                let ip = BasisW::new(s).inner_product(&BasisW::new(t), DEFAULT_ORDER)?;
                let expected = if s == t { 1.0 } else { 0.0 };
                p.close(ip, expected, 1e-12, || format!("n = {n}: ⟨w_{s}, w_{t}⟩"));
            }
        }
    }
    Ok(())
}

fn min_moment(p: &mut Probe, _ctx: &Ctx) -> Result<()> {
    let n = 4;
    let rule = GaussRule::new(DEFAULT_ORDER)?;
    for t in all_subsets(n) {
        for s in all_subsets(n) {
            let integrand =
                |x: &[f64]| min_over(t, x) * s.positions().map(|q| x[q] - 0.5).product::<f64>();
            let q = integrate_simplicial(s.union(t), &rule, integrand);
            let expected = if s.is_subset_of(t) {
                (ratio(1, 2).powi(s.len()) * beta_fn(s.len() + 1, t.len() + 1)?).to_f64()
            } else {
                0.0
            };
            p.close(q, expected, 1e-10, || {
                format!("∫ min over {t} times centered {s}")
            });
        }
    }
    Ok(())
}

fn half_sum(
    a: &SetFunction<Rational>,
    b: &SetFunction<Rational>,
    sign: i64,
) -> Result<SetFunction<Rational>> {
    SetFunction::from_fn(a.n(), |s| {
        (a.get(s) + ratio(sign, 1) * b.get(s)) / ratio(2, 1)
    })
}

fn duality(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(10);
    for case in 0..ctx.count(30, 100) {
        let n = 1 + g.index(5);
        let multilinear = case % 2 == 0;
        let spec = if multilinear {
            FunctionSpec::Multilinear(g.poly(n, 0.5))
        } else {
            FunctionSpec::Choquet({
                let terms = 1 + g.index(4);
                g.capacity(n, terms)
            })
        };
        let d = dual(&spec)?;
        for s in all_subsets(n) {
            let (i, id) = (exact(&spec, s)?, exact(&d, s)?);
            let expected = if s.is_empty() {
                Rational::one() - &i
            } else {
                sign(s.len()) * &i
            };
            p.check(id == expected, || {
                format!(
                    "{}, S = {s}: 𝓘(f^d) = {id}, expected {expected}",
                    describe(&spec)
                )
            });
        }
        let x = g.point(n);
        let y: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
        let (lhs, rhs) = (d.eval(&x)?, 1.0 - spec.eval(&y)?);
        p.close(lhs, rhs, 1e-12 * (1.0 + rhs.abs()), || {
            format!("{}: pointwise dual", describe(&spec))
        });

        let (self_dual, anti) = match (&spec, &d) {
            (FunctionSpec::Multilinear(f), _) => {
                let (s, a) = self_dual_split(f);
                (FunctionSpec::Multilinear(s), FunctionSpec::Multilinear(a))
            }
            (FunctionSpec::Choquet(a), FunctionSpec::Choquet(ad)) => (
                FunctionSpec::Choquet(half_sum(a, ad, 1)?),
                FunctionSpec::Choquet(half_sum(a, ad, -1)?),
            ),
            _ => unreachable!("duals stay in class"),
        };
        for s in all_subsets(n) {
            let is = exact(&self_dual, s)?;
            let i = exact(&spec, s)?;
            if s.is_empty() {
                p.check(is == ratio(1, 2), || {
                    format!("self-dual part has 𝓘(∅) = {is}")
                });
            } else if s.len() % 2 == 0 {
                p.check(is.is_zero(), || format!("self-dual part has 𝓘({s}) = {is}"));
                let ia = exact(&anti, s)?;
                p.check(i == ia, || {
                    format!("even S = {s}: 𝓘(f) = {i}, 𝓘(f^a) = {ia}")
                });
            } else {
                p.check(i == is, || {
                    format!("odd S = {s}: 𝓘(f) = {i}, 𝓘(f^s) = {is}")
                });
            }
        }
    }
    Ok(())
}

/// A random spec of a random class in which variable `free` is ineffective.
fn spec_without(g: &mut Gen, n: usize, free: usize) -> Result<FunctionSpec> {
    let full = SubsetMask::full(n)?;
    let rest = full.difference(SubsetMask::from_positions(n, &[free])?);
    let constant = |g: &mut Gen| Unary::constant(g.rational());
    Ok(match g.index(5) {
        0 => FunctionSpec::Multilinear(g.poly_within(rest, 6)),
        1 => FunctionSpec::Choquet(g.capacity_within(rest, 4)),
        2 => {
            let mut ts: Vec<Unary> = (0..n).map(|_| g.unary()).collect();
            ts[free] = constant(g);
            FunctionSpec::pseudo_multilinear(g.poly(n, 0.5), ts)?
        }
        3 => {
            let mut ts: Vec<Unary> = (0..n).map(|_| g.unary()).collect();
            ts[free] = constant(g);
            FunctionSpec::multiplicative(ts)?
        }
        _ => {
            let mut w = g.weights(n - 1);
            w.insert(free, Rational::zero());
            FunctionSpec::geometric_mean(w)?
        }
    })
}

fn ineffective_variables(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(11);
    for _ in 0..ctx.count(20, 60) {
        let n = 2 + g.index(5);
        let free = g.index(n);
        let spec = spec_without(&mut g, n, free)?;
        for s in all_subsets(n).into_iter().filter(|s| s.contains(free)) {
            let i = exact(&spec, s)?;
            p.check(i.is_zero(), || {
                format!(
                    "{}: x{} ineffective but 𝓘({s}) = {i}",
                    describe(&spec),
                    free + 1
                )
            });
        }
    }
    Ok(())
}

fn dummy_partition(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(12);
    for case in 0..ctx.count(20, 60) {
        let n = 2 + g.index(5);
        let full = SubsetMask::full(n)?;
        let a = loop {
            let a = g.subset(n);
            if !a.is_empty() && a != full {
                break a;
            }
        };
        let b = full.difference(a);
        let spec = match case % 3 {
            0 => FunctionSpec::Multilinear(&g.poly_within(a, 4) + &g.poly_within(b, 4)),
            1 => {
                let (ca, cb) = (g.capacity_within(a, 3), g.capacity_within(b, 3));
                FunctionSpec::Choquet(SetFunction::from_fn(n, |s| ca.get(s) + cb.get(s))?)
            }
            _ => {
                let poly = &g.poly_within(a, 4) + &g.poly_within(b, 4);
                FunctionSpec::pseudo_multilinear(poly, (0..n).map(|_| g.unary()).collect())?
            }
        };
        for k in all_subsets(n) {
            if !k.intersection(a).is_empty() && !k.intersection(b).is_empty() {
                let i = exact(&spec, k)?;
                p.check(i.is_zero(), || {
                    format!("{}: partition {a}|{b}, 𝓘({k}) = {i}", describe(&spec))
                });
            }
        }
    }
    Ok(())
}

fn k_additivity(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(13);
    for case in 0..ctx.count(20, 60) {
        let n = 2 + g.index(5);
        let k = 1 + g.index(n - 1);
        let supports: Vec<SubsetMask> = (0..1 + g.index(5))
            .map(|_| loop {
                let c = g.subset(n);
                if c.len() <= k {
                    break c;
                }
            })
            .collect();
        let choquet = case % 2 == 1;
        let components: Vec<FunctionSpec> = supports
            .iter()
            .map(|&c| {
                if choquet {
                    FunctionSpec::Choquet(g.capacity_within(c, 3))
                } else {
                    FunctionSpec::Multilinear(g.poly_within(c, 3))
                }
            })
            .collect();
        let total = if choquet {
            let caps: Vec<&SetFunction<Rational>> = components
                .iter()
                .map(|c| match c {
                    FunctionSpec::Choquet(a) => a,
                    _ => unreachable!(),
                })
                .collect();
            FunctionSpec::Choquet(SetFunction::from_fn(n, |s| {
                caps.iter().map(|a| a.get(s).clone()).sum()
            })?)
        } else {
            let mut sum = MultilinearPoly::zero(n)?;
            for c in &components {
                if let FunctionSpec::Multilinear(q) = c {
                    sum = &sum + q;
                }
            }
            FunctionSpec::Multilinear(sum)
        };
        for s in all_subsets(n) {
            let i = exact(&total, s)?;
            if s.len() > k {
                p.check(i.is_zero(), || {
                    format!("{k}-additive {}: 𝓘({s}) = {i}", describe(&total))
                });
            } else if s.len() == k {
                let mut own = Rational::zero();
                for (c, spec) in supports.iter().zip(&components) {
                    if *c == s {
                        own += exact(spec, s)?;
                    }
                }
                p.check(i == own, || {
                    format!(
                        "{k}-additive {}: 𝓘({s}) = {i}, component gives {own}",
                        describe(&total)
                    )
                });
            }
        }
    }
    Ok(())
}

fn random_box(g: &mut Gen, s: SubsetMask) -> (Vec<f64>, Vec<f64>) {
    let n = s.n();
    let mut x = g.point(n);
    let mut h = vec![0.0; n];
    for q in s.positions() {
        let (u, v) = (g.unit(), g.unit());
        x[q] = u.min(v);
        h[q] = (u - v).abs();
    }
    (x, h)
}

fn s_increasingness(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(14);
    for case in 0..ctx.count(20, 60) {
        let n = 1 + g.index(5);
        let product = case % 2 == 0;
        let spec = if product {
            FunctionSpec::multiplicative((0..n).map(|_| g.increasing_unary()).collect())?
        } else {
            let t = loop {
                let t = g.subset(n);
                if !t.is_empty() {
                    break t;
                }
            };
            FunctionSpec::min_of(t)?
        };
        for s in all_subsets(n).into_iter().filter(|s| !s.is_empty()) {
            let mut increasing = true;
            for _ in 0..8 {
                let (x, h) = random_box(&mut g, s);
                let d = s_difference(&spec, s, &h, &x)?;
                increasing &= d >= -1e-12;
            }
            if product {
                p.check(increasing, || {
                    format!("{}: negative S-difference for S = {s}", describe(&spec))
                });
            }
            if increasing {
                let i = exact(&spec, s)?;
                p.check(!i.is_negative(), || {
                    format!("{}: S-increasing on {s} but 𝓘 = {i}", describe(&spec))
                });
            }
        }
    }
    Ok(())
}

fn r_squared_consistency(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(15);
    let x1x2 = FunctionSpec::Multilinear(MultilinearPoly::monomial(SubsetMask::full(2)?));
    let report = fit_report(&x1x2, 2, &auto())?;
    p.check(report.r_squared[0] == Value::Exact(ratio(6, 7)), || {
        format!("R²_1(x1 x2) = {}", report.r_squared[0])
    });
    for case in 0..ctx.count(10, 30) {
        let n = 1 + g.index(5);
        let spec = if case % 3 == 0 {
            FunctionSpec::Multilinear(g.poly(n, 0.5))
        } else {
            g.spec(n)
        };
        let report = match fit_report(&spec, n, &auto()) {
            Err(Error::Degenerate(_)) => continue,
            other => other?,
        };
        for (j, (r2, ratio_j)) in report.r_squared.iter().zip(&report.explained).enumerate() {
            p.close(r2.to_f64(), ratio_j.to_f64(), 1e-10, || {
                format!("{}: R²_{}", describe(&spec), j + 1)
            });
            p.check(r2.to_f64() >= -1e-12 && r2.to_f64() <= 1.0 + 1e-12, || {
                format!("R²_{} = {r2} outside [0, 1]", j + 1)
            });
        }
        for w in report.r_squared.windows(2) {
            p.check(w[0].to_f64() <= w[1].to_f64() + 1e-12, || {
                format!("{}: R² decreases", describe(&spec))
            });
        }
        if matches!(spec, FunctionSpec::Multilinear(_)) {
            let last = report.r_squared.last().cloned().unwrap_or_else(Value::zero);
            p.check(last == Value::Exact(Rational::one()), || {
                format!("{}: R²_n = {last}", describe(&spec))
            });
        }
    }
    for case in 0..ctx.count(2, 5) {
        let n = 1 + g.index(3);
        let poly = g.poly(n, 0.7);
        let spec = FunctionSpec::Multilinear(poly);
        let bb = FunctionSpec::BlackBox(spec.as_black_box(Smoothness::Smooth)?);
        let (exact_report, numeric) =
            match (fit_report(&spec, n, &auto()), fit_report(&bb, n, &auto())) {
                (Err(Error::Degenerate(_)), _) => continue,
                (a, b) => (a?, b?),
            };
        for (a, b) in exact_report.r_squared.iter().zip(&numeric.r_squared) {
            p.close(b.to_f64(), a.to_f64(), 1e-10, || {
                format!("quadrature case {case}: R²")
            });
        }
    }
    Ok(())
}

fn closed_form_identities(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(16);
    for _ in 0..ctx.count(20, 60) {
        let n = 1 + g.index(5);
        let poly = g.poly(n, 0.5);
        let ids = vec![Unary::Identity; n];
        let weights = g.weights(n);
        let powers: Vec<Unary> = weights.iter().map(|c| Unary::Power(c.clone())).collect();
        let full = MultilinearPoly::monomial(SubsetMask::full(n)?);
        let ts: Vec<Unary> = (0..n).map(|_| g.unary()).collect();
        let product = FunctionSpec::multiplicative(ts.clone())?;
        let nonzero_mean = ts.iter().all(|t| !unary_moments(t).m0.is_zero());
        let base = exact(&product, SubsetMask::empty(n)?)?;
        for s in all_subsets(n) {
            let a = pseudo_multilinear_interaction(&poly, &ids, s)?;
            let b = index_from_poly_coeffs(&poly, s);
            p.check(a == b, || format!("identity transforms at {s}: {a} vs {b}"));
            let a = geometric_mean_interaction(&weights, s)?;
            let b = pseudo_multilinear_interaction(&full, &powers, s)?;
            p.check(a == b, || {
                format!("geometric mean {weights:?} at {s}: {a} vs {b}")
            });
            if nonzero_mean {
                let r = multiplicative_ratio(&ts, s)?;
                let v = exact(&product, s)?;
                p.check(&r * &base == v, || {
                    format!("multiplicative ratio at {s}: {r} · {base} vs {v}")
                });
            }
        }
    }
    Ok(())
}

fn approximation_mean(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(17);
    for _ in 0..ctx.count(10, 40) {
        let n = 1 + g.index(5);
        let spec = g.spec(n);
        let mean = exact(&spec, SubsetMask::empty(n)?)?;
        for k in 0..=n {
            let approx = best_k_approx(&spec, k, &auto())?;
            let mk = approx.exact_poly().map(|q| q.integral());
            p.check(mk.as_ref() == Some(&mean), || {
                format!("{}: E(f_{k}) = {mk:?}, E(f) = {mean}", describe(&spec))
            });
        }
    }
    Ok(())
}

fn normalized_index_laws(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(18);
    for _ in 0..ctx.count(10, 30) {
        let n = 1 + g.index(4);
        let poly = g.poly(n, 0.6);
        let spec = FunctionSpec::Multilinear(poly.clone());
        if moments(&spec, &auto())?.variance.is_zero() {
            continue;
        }
        let a = ratio(g.int(1, 9), g.int(1, 4));
        let b = g.rational();
        let shifted = &poly.scale(&a) + &MultilinearPoly::constant(n, b)?;
        let scaled = FunctionSpec::Multilinear(shifted);
        let d = dual(&spec)?;
        for s in all_subsets(n).into_iter().filter(|s| !s.is_empty()) {
            let r = normalized_index(&spec, s, &auto())?;
            p.check(r.abs() <= 1.0 + 1e-12, || format!("|r({s})| = {r} > 1"));
            let rs = normalized_index(&scaled, s, &auto())?;
            p.close(rs, r, 1e-12, || {
                format!("{}: r({s}) under a·f + b", describe(&spec))
            });
            let rd = normalized_index(&d, s, &auto())?;
            let expected = if s.len() % 2 == 1 { r } else { -r };
            p.close(rd, expected, 1e-12, || {
                format!("{}: r(f^d, {s})", describe(&spec))
            });
        }
    }
    Ok(())
}

fn symmetric_geometric_r(n: usize) -> f64 {
    let nf = n as f64;
    let inner = ((nf + 1.0).powi(2) / (nf * (nf + 2.0))).powi(n as i32) - 1.0;
    3f64.sqrt() / (2.0 * nf + 1.0) / inner.sqrt()
}

fn reference_statistics(p: &mut Probe, _ctx: &Ctx) -> Result<()> {
    for n in 2..=10 {
        let first = SubsetMask::from_positions(n, &[0])?;
        let mean = FunctionSpec::arithmetic_mean(n)?;
        let r_mean = normalized_index(&mean, first, &auto())?;
        p.close(r_mean, 1.0 / (n as f64).sqrt(), 1e-12, || {
            format!("arithmetic mean, n = {n}")
        });

        let min = FunctionSpec::min_of(SubsetMask::full(n)?)?;
        let r_min = normalized_index(&min, first, &auto())?;
        let nf = n as f64;
        p.close(r_min, 3f64.sqrt() / (nf * (nf + 2.0)).sqrt(), 1e-10, || {
            format!("min, n = {n}")
        });
        let sigma = moments(&min, &auto())?.sigma();
        p.close(
            sigma,
            nf.sqrt() / ((nf + 1.0) * (nf + 2.0).sqrt()),
            1e-12,
            || format!("σ(min), n = {n}"),
        );
        let r_max = normalized_index(&dual(&min)?, first, &auto())?;
        p.close(r_max, r_min, 1e-12, || format!("max versus min, n = {n}"));

        let geo = FunctionSpec::geometric_mean(vec![ratio(1, n as i64); n])?;
        let r_geo = normalized_index(&geo, first, &auto())?;
        p.close(r_geo, symmetric_geometric_r(n), 1e-10, || {
            format!("symmetric geometric mean, n = {n}")
        });

        for i in 1..n {
            let other = SubsetMask::from_positions(n, &[i])?;
            for (name, spec, r) in [
                ("mean", &mean, r_mean),
                ("min", &min, r_min),
                ("geometric", &geo, r_geo),
            ] {
                let ri = normalized_index(spec, other, &auto())?;
                p.close(ri, r, 1e-12, || {
                    format!("{name}, n = {n}: r differs between variables")
                });
            }
        }
        p.check(r_mean > r_min && r_mean > r_geo, || {
            format!("n = {n}: ordering fails, mean {r_mean}, min {r_min}, geometric {r_geo}")
        });
        p.check(
            r_min <= 1.0 / nf.sqrt() + 1e-12 && r_geo <= 1.0 / nf.sqrt() + 1e-12,
            || format!("n = {n}: symmetric r exceeds 1/√n"),
        );
    }
    Ok(())
}

const MC_SAMPLES: usize = 100_000;
const MC_SEEDS: u64 = 10;

fn estimator_agreement(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut cases: Vec<(FunctionSpec, SubsetMask)> = Vec::new();
    for n in [2, 3] {
        let min = FunctionSpec::min_of(SubsetMask::full(n)?)?;
        cases.push((min.clone(), SubsetMask::from_indices(n, &[1])?));
        cases.push((min, SubsetMask::from_indices(n, &[1, 2])?));
    }
    let x1x2 = FunctionSpec::Multilinear(MultilinearPoly::monomial(SubsetMask::full(2)?));
    cases.push((x1x2.clone(), SubsetMask::from_indices(2, &[1])?));
    cases.push((x1x2, SubsetMask::full(2)?));
    for (spec, s) in &cases {
        let truth = exact(spec, *s)?.to_f64();
        for kind in EstimatorKind::ALL {
            let mut hits = 0;
            let mut runs = 0;
            for j in 0..MC_SEEDS {
                let e = match estimate(
                    spec,
                    *s,
                    kind,
                    MC_SAMPLES,
                    ctx.seed.wrapping_mul(1000).wrapping_add(j),
                ) {
                    Err(Error::Unsupported(_)) => break,
                    other => other?,
                };
                runs += 1;
                if e.z_score(truth).abs() < 4.0 {
                    hits += 1;
                }
            }
            if runs == 0 {
                continue;
            }
            p.check(hits * 10 >= runs * 9, || {
                format!(
                    "{} at {s}, {}: {hits}/{runs} seeds within 4·stderr of {truth}",
                    describe(spec),
                    kind.name()
                )
            });
        }
    }
    Ok(())
}

fn box_measure(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    for size in 1..=3 {
        let e = box_volume_measure(size, MC_SAMPLES, ctx.seed.wrapping_add(size as u64))?;
        let exact = 6f64.powi(-(size as i32));
        p.check(e.z_score(exact).abs() < 4.0, || {
            format!("|S| = {size}: {} ± {}, expected {exact}", e.value, e.stderr)
        });
    }
    Ok(())
}

fn choquet_matches_box_volume(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(19);
    for case in 0..5 {
        let n = 1 + g.index(5);
        let spec = FunctionSpec::Choquet({
            let terms = 1 + g.index(4);
            g.capacity(n, terms)
        });
        let s = g.subset(n);
        let truth = exact(&spec, s)?.to_f64();
        let e = estimate(
            &spec,
            s,
            EstimatorKind::BoxVolume,
            MC_SAMPLES,
            ctx.seed.wrapping_add(case),
        )?;
        p.check(e.z_score(truth).abs() < 4.0, || {
            format!(
                "{} at {s}: {} ± {}, closed form {truth}",
                describe(&spec),
                e.value,
                e.stderr
            )
        });
    }
    Ok(())
}

fn estimators_match_quadrature(p: &mut Probe, ctx: &Ctx) -> Result<()> {
    let mut g = ctx.gen(20);
    for case in 0..3 {
        let n = 1 + g.index(3);
        let spec = smooth_black_box(&mut g, n)?;
        let s = loop {
            let s = g.subset(n);
            if !s.is_empty() {
                break s;
            }
        };
        let quad = interaction(
            &spec,
            s,
            &IntegratorConfig::new(Method::GaussTensor { order: 12 }),
        )?
        .to_f64();
        for kind in EstimatorKind::ALL {
            let e = estimate(
                &spec,
                s,
                kind,
                MC_SAMPLES,
                ctx.seed.wrapping_add(100 + case),
            )?;
            p.check(e.z_score(quad).abs() < 4.0, || {
                format!(
                    "smooth case {case} at {s}, {}: {} ± {}, quadrature {quad}",
                    kind.name(),
                    e.value,
                    e.stderr
                )
            });
        }
    }
    Ok(())
}
