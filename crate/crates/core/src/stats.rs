//! Mean, standard deviation, normalized interaction index `r(f, S)` and the
//! coefficient of determination `R²_k` of the best `k`-th approximation.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::closed_forms::{structured_interaction, structured_square_integral};
use crate::continuous::{
    centered_to_monomial, interaction, interaction_table, IntegratorConfig, Method, NORMALIZATION,
};
use crate::error::{Error, Result};
use crate::montecarlo::{open01, run};
use crate::quadrature::{integrate_simplicial, integrate_tensor, GaussRule, DEFAULT_ORDER};
use crate::scalar::{Scalar, Value};
use crate::spec::{FunctionSpec, Smoothness};
use crate::subset::SubsetMask;
use crate::table::InteractionTable;

#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    /// `E(f) = ∫ f = 𝓘(f, ∅)`.
    pub mean: Value,
    /// `σ²(f) = ∫ f² − E(f)²`.
    pub variance: Value,
}

impl Moments {
    pub fn sigma(&self) -> f64 {
        self.variance.to_f64().max(0.0).sqrt()
    }
}

fn numeric_moments(spec: &FunctionSpec, cfg: &IntegratorConfig) -> Result<Moments> {
    let (mean, square) = match cfg.method {
        Method::MonteCarlo { samples, seed } => {
            let n = spec.n();
            let stats = run(samples, seed, |rng| {
                let x: Vec<f64> = (0..n).map(|_| open01(rng)).collect();
                spec.eval_unchecked(&x)
            })?;
            let variance = stats.m2 / (stats.count - 1) as f64;
            return Ok(Moments {
                mean: Value::Approx(stats.mean),
                variance: Value::Approx(variance),
            });
        }
        Method::GaussTensor { order } => quadrature_moments(spec, order)?,
        Method::Auto | Method::ClosedForm => quadrature_moments(spec, DEFAULT_ORDER)?,
    };
    if !mean.is_finite() || !square.is_finite() {
        return Err(Error::Evaluation(format!(
            "{} is not square-integrable by quadrature",
            spec.kind_name()
        )));
    }
    Ok(Moments {
        mean: Value::Approx(mean),
        variance: Value::Approx(square - mean * mean),
    })
}

fn quadrature_moments(spec: &FunctionSpec, order: usize) -> Result<(f64, f64)> {
    let rule = GaussRule::new(order)?;
    let active = spec.support();
    let lattice =
        matches!(spec, FunctionSpec::BlackBox(bb) if bb.smoothness() == Smoothness::Lattice);
    let integrate = |g: &(dyn Fn(&[f64]) -> f64 + Sync)| {
        if lattice {
            integrate_simplicial(active, &rule, g)
        } else {
            integrate_tensor(active, &rule, g)
        }
    };
    let mean = integrate(&|x| spec.eval_unchecked(x));
    let square = integrate(&|x| spec.eval_unchecked(x).powi(2));
    Ok((mean, square))
}

/// `E(f)` and `σ²(f)`, exact for structured specs.
pub fn moments(spec: &FunctionSpec, cfg: &IntegratorConfig) -> Result<Moments> {
    cfg.validate()?;
    let exact_path = spec.is_structured() && !matches!(cfg.method, Method::MonteCarlo { .. });
    if exact_path {
        let mean = structured_interaction(spec, SubsetMask::empty(spec.n())?)?;
        let square = structured_square_integral(spec)?;
        let variance = square - &mean * &mean;
        return Ok(Moments {
            mean: Value::Exact(mean),
            variance: Value::Exact(variance),
        });
    }
    if matches!(cfg.method, Method::ClosedForm) {
        return Err(Error::unsupported("black boxes have no closed form"));
    }
    numeric_moments(spec, cfg)
}

fn check_variance(m: &Moments, cfg: &IntegratorConfig) -> Result<()> {
    let degenerate = match &m.variance {
        Value::Exact(v) => v.is_zero(),
        Value::Approx(v) => *v <= cfg.tolerance * (1.0 + m.mean.to_f64().powi(2)),
    };
    if degenerate {
        return Err(Error::Degenerate(
            "σ(f) = 0: the normalized index is undefined for constant functions".into(),
        ));
    }
    Ok(())
}

fn basis_scale(size: usize) -> f64 {
    (NORMALIZATION as f64).sqrt().powi(size as i32)
}

/// `r(f, S) = 𝓘(f, S) / (12^{|S|/2} σ(f))` for `S ≠ ∅`.
pub fn normalized_index(spec: &FunctionSpec, s: SubsetMask, cfg: &IntegratorConfig) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::invalid(
            "the normalized index is defined for nonempty subsets only",
        ));
    }
    let m = moments(spec, cfg)?;
    check_variance(&m, cfg)?;
    let index = interaction(spec, s, cfg)?;
    Ok(index.to_f64() / (basis_scale(s.len()) * m.sigma()))
}

/// `Σ_{1≤|T|≤k} 𝓘(f, T)² / (12^{|T|} σ²)`, exact whenever its inputs are.
fn r_squared_from(table: &InteractionTable, variance: &Value, k: usize) -> Value {
    let total = table
        .iter()
        .filter(|(t, _)| !t.is_empty() && t.len() <= k)
        .fold(Value::zero(), |acc, (t, v)| {
            let i = v.value().clone();
            let weight = Value::from_ratio(1, NORMALIZATION).powi(t.len());
            acc + i.clone() * i * weight
        });
    total / variance.clone()
}

/// `R²_k(f)`; `R²_0 = 0`.
pub fn r_squared(spec: &FunctionSpec, k: usize, cfg: &IntegratorConfig) -> Result<Value> {
    let m = moments(spec, cfg)?;
    check_variance(&m, cfg)?;
    let table = interaction_table(spec, k, cfg)?;
    Ok(r_squared_from(&table, &m.variance, k))
}

#[derive(Clone, Debug)]
pub struct FitReport {
    pub k: usize,
    pub mean: Value,
    pub variance: Value,
    pub sigma: f64,
    /// `r(f, S)` for `1 ≤ |S| ≤ k`.
    pub r_table: BTreeMap<SubsetMask, f64>,
    /// `R²_1, …, R²_k`.
    pub r_squared: Vec<Value>,
    /// `σ²(f_j)/σ²(f)` for `j = 1, …, k`, computed from the expanded approximations.
    pub explained: Vec<Value>,
}

fn restricted(table: &InteractionTable, j: usize) -> Result<InteractionTable> {
    let mut out = InteractionTable::new(table.n());
    for (s, v) in table.iter().filter(|(s, _)| s.len() <= j) {
        out.insert(s, v.clone())?;
    }
    Ok(out)
}

fn agree(a: &Value, b: &Value, tol: f64) -> bool {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => x == y,
        _ => (a.to_f64() - b.to_f64()).abs() <= tol * (1.0 + b.to_f64().abs()),
    }
}

/// Mean, deviation, `r`-table and `R²_j` for `j ≤ k`. Each `R²_j` is checked
/// against the variance of the expanded approximation `f_j`.
pub fn fit_report(spec: &FunctionSpec, k: usize, cfg: &IntegratorConfig) -> Result<FitReport> {
    let m = moments(spec, cfg)?;
    check_variance(&m, cfg)?;
    let sigma = m.sigma();
    let table = interaction_table(spec, k, cfg)?;
    let r_table = table
        .iter()
        .filter(|(s, _)| !s.is_empty())
        .map(|(s, v)| (s, v.to_f64() / (basis_scale(s.len()) * sigma)))
        .collect();
    let mut r_squared = Vec::with_capacity(k);
    let mut explained = Vec::with_capacity(k);
    for j in 1..=k {
        let r2 = r_squared_from(&table, &m.variance, j);
        let fj = centered_to_monomial(&restricted(&table, j)?)?;
        let mean_j = fj.integral();
        let var_j = fj.square_integral() - mean_j.clone() * mean_j;
        let ratio = var_j / m.variance.clone();
        if !agree(&r2, &ratio, cfg.tolerance) {
            return Err(Error::Inconsistent(format!(
                "R²_{j} = {r2} disagrees with σ²(f_{j})/σ²(f) = {ratio}"
            )));
        }
        r_squared.push(r2);
        explained.push(ratio);
    }
    Ok(FitReport {
        k,
        mean: m.mean,
        variance: m.variance,
        sigma,
        r_table,
        r_squared,
        explained,
    })
}
