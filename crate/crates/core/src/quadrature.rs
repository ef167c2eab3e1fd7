//! Gauss–Legendre rules on the unit cube.
//!
//! Two product constructions: a plain tensor rule, and a simplicial rule that
//! splits the cube into the `m!` ordering simplices `x_{σ(1)} ≤ … ≤ x_{σ(m)}`
//! and maps each from the unit cube. The second integrates functions with
//! kinks on coordinate ties (min, max, Choquet integrals) to full precision.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::subset::SubsetMask;

/// Default number of nodes per axis; exact for per-axis degree ≤ 15.
pub const DEFAULT_ORDER: usize = 8;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Result<Self> {
        let order = NonZeroUsize::new(order)
            .ok_or_else(|| Error::invalid("quadrature order must be at least 1"))?;
        let rule = GaussLegendre::new(order);
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .unzip();
        Ok(GaussRule { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Tensor-product rule over the `active` axes; other coordinates sit at ½.
pub fn integrate_tensor<F>(active: SubsetMask, rule: &GaussRule, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = active.n();
    let axes: Vec<usize> = active.positions().collect();
    let m = rule.order();
    if axes.is_empty() {
        return f(&vec![0.5; n]);
    }
    // Split on the first active axis; partial sums are reduced in node order.
    let partials: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut x = vec![0.5; n];
            x[axes[0]] = rule.nodes[first];
            let rest = &axes[1..];
            let mut digits = vec![0usize; rest.len()];
            let mut acc = 0.0;
            loop {
                let mut w = rule.weights[first];
                for (d, &ax) in digits.iter().zip(rest) {
                    x[ax] = rule.nodes[*d];
                    w *= rule.weights[*d];
                }
                acc += w * f(&x);
                if !advance(&mut digits, m) {
                    break;
                }
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

/// Rule adapted to functions that are smooth on each ordering simplex of the
/// `active` axes. Within a simplex the sorted coordinates are
/// `y_k = u_k u_{k+1} ⋯ u_m`, with Jacobian `Π_k u_k^{k−1}`.
pub fn integrate_simplicial<F>(active: SubsetMask, rule: &GaussRule, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = active.n();
    let axes: Vec<usize> = active.positions().collect();
    if axes.len() <= 1 {
        return integrate_tensor(active, rule, f);
    }
    let m = rule.order();
    let orderings = permutations(axes.len());
    let partials: Vec<f64> = orderings
        .par_iter()
        .map(|sigma| {
            let mut x = vec![0.5; n];
            let mut digits = vec![0usize; axes.len()];
            let mut acc = 0.0;
            loop {
                let mut y = 1.0;
                let mut w = 1.0;
                for k in (0..axes.len()).rev() {
                    let u = rule.nodes[digits[k]];
                    y *= u;
                    x[axes[sigma[k]]] = y;
                    w *= rule.weights[digits[k]] * u.powi(k as i32);
                }
                acc += w * f(&x);
                if !advance(&mut digits, m) {
                    break;
                }
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// All permutations of `0..m` in lexicographic order.
pub(crate) fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..m).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: usize) -> SubsetMask {
        SubsetMask::full(n).unwrap()
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussRule::new(8).unwrap();
        let v: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(x, w)| w * x.powi(15))
            .sum();
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        assert!(GaussRule::new(0).is_err());
    }

    #[test]
    fn tensor_product_moments() {
        let rule = GaussRule::new(4).unwrap();
        let v = integrate_tensor(all(3), &rule, |x| x[0] * x[1] * x[1] * x[2]);
        assert!((v - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn simplicial_rule_handles_min() {
        let rule = GaussRule::new(8).unwrap();
        // E[min of 3 uniforms] = 1/4, E[min^2] = 1/10.
        let v = integrate_simplicial(all(3), &rule, |x| x.iter().cloned().fold(1.0, f64::min));
        assert!((v - 0.25).abs() < 1e-14);
        let v = integrate_simplicial(all(3), &rule, |x| {
            let m = x.iter().cloned().fold(1.0, f64::min);
            m * m
        });
        assert!((v - 0.1).abs() < 1e-14);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1).len(), 1);
    }
}
