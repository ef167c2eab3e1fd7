//! Seeded generators of random rationals, games, polynomials and specs.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::MultilinearPoly;
use crate::scalar::{ratio, Rational};
use crate::set_function::SetFunction;
use crate::spec::{FunctionSpec, Tabulated, Unary};
use crate::subset::SubsetMask;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Gen { rng }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// A point of the open unit interval.
    pub fn unit(&mut self) -> f64 {
        self.rng.sample(rand::distributions::Open01)
    }

    pub fn point(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.unit()).collect()
    }

    /// `p/q` with `|p| ≤ 6`, `1 ≤ q ≤ 5`.
    pub fn rational(&mut self) -> Rational {
        ratio(self.int(-6, 6), self.int(1, 5))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// Rational in `[0, 1]` with denominator at most 8.
    pub fn unit_rational(&mut self) -> Rational {
        let q = self.int(1, 8);
        ratio(self.int(0, q), q)
    }

    pub fn subset(&mut self, n: usize) -> SubsetMask {
        let bits = self.rng.gen_range(0..1u64 << n);
        SubsetMask::new(bits, n).expect("bits fit the ground set")
    }

    pub fn subset_within(&mut self, within: SubsetMask) -> SubsetMask {
        let n = within.n();
        SubsetMask::new(self.subset(n).bits() & within.bits(), n).expect("submask")
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut self.rng);
        p
    }

    /// Dense random game.
    pub fn game(&mut self, n: usize) -> SetFunction<Rational> {
        SetFunction::from_fn(n, |_| self.rational()).expect("small n")
    }

    /// Random multilinear polynomial; each monomial is present with probability `density`.
    pub fn poly(&mut self, n: usize, density: f64) -> MultilinearPoly<Rational> {
        let mut p = MultilinearPoly::zero(n).expect("valid n");
        for bits in 0..1u64 << n {
            if self.chance(density) {
                let c = self.nonzero_rational();
                p.set_coeff(SubsetMask::new(bits, n).expect("in range"), c);
            }
        }
        p
    }

    /// Random polynomial using only the variables of `within`.
    pub fn poly_within(&mut self, within: SubsetMask, terms: usize) -> MultilinearPoly<Rational> {
        let mut p = MultilinearPoly::zero(within.n()).expect("valid n");
        for _ in 0..terms {
            let s = self.subset_within(within);
            let c = self.nonzero_rational();
            p.add_term(s, c);
        }
        p
    }

    /// Random capacity with up to `terms` nonzero Möbius coefficients inside `within`.
    pub fn capacity_within(&mut self, within: SubsetMask, terms: usize) -> SetFunction<Rational> {
        let mut a = SetFunction::zeros(within.n()).expect("small n");
        for _ in 0..terms {
            let t = self.subset_within(within);
            let c = a.get(t) + self.nonzero_rational();
            a.set(t, c);
        }
        a
    }

    pub fn capacity(&mut self, n: usize, terms: usize) -> SetFunction<Rational> {
        self.capacity_within(SubsetMask::full(n).expect("valid n"), terms)
    }

    pub fn unary(&mut self) -> Unary {
        match self.index(4) {
            0 => Unary::Identity,
            1 => Unary::Power(ratio(self.int(0, 6), self.int(1, 3))),
            2 => Unary::Affine {
                intercept: self.rational(),
                slope: self.rational(),
            },
            _ => self.tabulated(),
        }
    }

    fn tabulated(&mut self) -> Unary {
        let mut ts: Vec<Rational> = vec![Rational::zero(), Rational::one()];
        for _ in 0..self.int(0, 3) {
            let t = ratio(self.int(1, 9), 10);
            if !ts.contains(&t) {
                ts.push(t);
            }
        }
        ts.sort();
        let knots = ts.into_iter().map(|t| (t, self.rational())).collect();
        Unary::Tabulated(Tabulated::new(knots).expect("sorted knots"))
    }

    /// Nonnegative, nondecreasing transform.
    pub fn increasing_unary(&mut self) -> Unary {
        match self.index(3) {
            0 => Unary::Identity,
            1 => Unary::Power(ratio(self.int(1, 6), self.int(1, 3))),
            _ => Unary::Affine {
                intercept: ratio(self.int(0, 4), self.int(1, 3)),
                slope: ratio(self.int(0, 4), self.int(1, 3)),
            },
        }
    }

    /// Nonnegative rational weights summing to one.
    pub fn weights(&mut self, n: usize) -> Vec<Rational> {
        loop {
            let raw: Vec<i64> = (0..n).map(|_| self.int(0, 4)).collect();
            let total: i64 = raw.iter().sum();
            if total > 0 {
                return raw.into_iter().map(|w| ratio(w, total)).collect();
            }
        }
    }

    /// A random structured spec of any class.
    pub fn spec(&mut self, n: usize) -> FunctionSpec {
        match self.index(5) {
            0 => FunctionSpec::Multilinear(self.poly(n, 0.5)),
            1 => FunctionSpec::Choquet({
                let terms = 1 + self.index(4);
                self.capacity(n, terms)
            }),
            2 => {
                let poly = self.poly(n, 0.4);
                let ts = (0..n).map(|_| self.unary()).collect();
                FunctionSpec::pseudo_multilinear(poly, ts).expect("valid transforms")
            }
            3 => {
                FunctionSpec::multiplicative((0..n).map(|_| self.unary()).collect()).expect("valid")
            }
            _ => FunctionSpec::geometric_mean(self.weights(n)).expect("valid weights"),
        }
    }
}
