use cube_interact::continuous::{dual, index_from_poly_coeffs, taylor_at_center};
use cube_interact::discrete::{
    banzhaf_all, banzhaf_interaction, mobius, multilinear_extension, vertex_game, zeta,
};
use cube_interact::subset::subsets_of_size_at_most;
use cube_interact::{
    best_k_approx, interaction, ratio, FunctionSpec, IntegratorConfig, Method, MultilinearPoly,
    Rational, SetFunction, SubsetMask, Unary, Value,
};
use proptest::prelude::*;

fn exact(v: &Value) -> Rational {
    v.exact().expect("exact path").clone()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(p, q)| ratio(p, q))
}

fn poly(max_n: usize) -> impl Strategy<Value = MultilinearPoly<Rational>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0u64..(1 << n), rational()), 0..8).prop_map(move |terms| {
            let mut p = MultilinearPoly::zero(n).unwrap();
            for (bits, c) in terms {
                p.add_term(SubsetMask::new(bits, n).unwrap(), c);
            }
            p
        })
    })
}

fn game(max_n: usize) -> impl Strategy<Value = SetFunction<Rational>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(rational(), 1 << n)
            .prop_map(move |vals| SetFunction::new(n, vals).unwrap())
    })
}

fn unit_point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, n)
}

fn closed() -> IntegratorConfig {
    IntegratorConfig::new(Method::ClosedForm)
}

fn same_poly(a: &MultilinearPoly<Rational>, b: &MultilinearPoly<Rational>) -> bool {
    let n = a.n();
    SubsetMask::full(n)
        .unwrap()
        .subsets()
        .all(|s| a.coeff(s) == b.coeff(s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_and_zeta_are_inverse(v in game(6)) {
        let back = zeta(&mobius(&v));
        for (s, x) in v.iter() {
            prop_assert_eq!(back.get(s), x);
        }
    }

    #[test]
    fn zeta_evaluates_the_extension_at_vertices(v in game(5)) {
        let ext = multilinear_extension(&v);
        for (s, x) in v.iter() {
            let vertex: Vec<Rational> = (0..v.n()).map(|i| ratio(s.contains(i) as i64, 1)).collect();
            prop_assert_eq!(&ext.eval(&vertex), x);
        }
        let round = vertex_game(&ext).unwrap();
        for (s, x) in v.iter() {
            prop_assert_eq!(round.get(s), x);
        }
    }

    #[test]
    fn continuous_index_equals_banzhaf_index(p in poly(6)) {
        let spec = FunctionSpec::multilinear(p.clone());
        let v = vertex_game(&p).unwrap();
        let all = banzhaf_all(&v);
        for s in SubsetMask::full(p.n()).unwrap().subsets() {
            let cont = exact(interaction(&spec, s, &closed()).unwrap().value());
            prop_assert_eq!(&cont, &banzhaf_interaction(&v, s).unwrap());
            prop_assert_eq!(&cont, all.get(s));
            prop_assert_eq!(&cont, &index_from_poly_coeffs(&p, s));
            prop_assert_eq!(&cont, &taylor_at_center(&p, s));
        }
    }

    #[test]
    fn full_order_approximation_reproduces_the_polynomial(p in poly(5)) {
        let spec = FunctionSpec::multilinear(p.clone());
        let fk = best_k_approx(&spec, p.n(), &closed()).unwrap();
        prop_assert!(same_poly(&fk.exact_poly().unwrap(), &p));
    }

    #[test]
    fn approximations_are_projections(p in poly(5), k in 0usize..5) {
        let k = k.min(p.n());
        let spec = FunctionSpec::multilinear(p.clone());
        let fk = best_k_approx(&spec, k, &closed()).unwrap().to_spec().unwrap();
        let fkk = best_k_approx(&fk, k, &closed()).unwrap().to_spec().unwrap();
        for s in subsets_of_size_at_most(p.n(), k).unwrap() {
            let a = exact(interaction(&spec, s, &closed()).unwrap().value());
            prop_assert_eq!(&exact(interaction(&fk, s, &closed()).unwrap().value()), &a);
            prop_assert_eq!(&exact(interaction(&fkk, s, &closed()).unwrap().value()), &a);
        }
    }

    #[test]
    fn permutation_moves_values_and_indexes(p in poly(5), seed in any::<u64>(), x in unit_point(5)) {
        let n = p.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let spec = FunctionSpec::multilinear(p);
        let moved = spec.permute(&perm).unwrap();
        let x = &x[..n];
        let y: Vec<f64> = (0..n).map(|i| x[perm[i]]).collect();
        prop_assert!((moved.eval(x).unwrap() - spec.eval(&y).unwrap()).abs() < 1e-9);
        for s in SubsetMask::full(n).unwrap().subsets() {
            prop_assert_eq!(
                exact(interaction(&moved, s.permuted(&perm).unwrap(), &closed()).unwrap().value()),
                exact(interaction(&spec, s, &closed()).unwrap().value())
            );
        }
    }

    #[test]
    fn duality_laws(p in poly(5)) {
        let spec = FunctionSpec::multilinear(p.clone());
        let d = dual(&spec).unwrap();
        let dd = dual(&d).unwrap();
        let FunctionSpec::Multilinear(q) = &dd else { panic!("dual of multilinear is multilinear") };
        prop_assert!(same_poly(q, &p));
        for s in SubsetMask::full(p.n()).unwrap().subsets() {
            let a = exact(interaction(&spec, s, &closed()).unwrap().value());
            let b = exact(interaction(&d, s, &closed()).unwrap().value());
            if s.is_empty() {
                prop_assert_eq!(b, ratio(1, 1) - a);
            } else if s.len() % 2 == 1 {
                prop_assert_eq!(b, a);
            } else {
                prop_assert_eq!(b, -a);
            }
        }
    }

    #[test]
    fn index_is_linear(p in poly(4), q_terms in prop::collection::vec((0u64..16, rational()), 0..6), c in rational()) {
        let n = p.n();
        let mut q = MultilinearPoly::zero(n).unwrap();
        for (bits, v) in q_terms {
            q.add_term(SubsetMask::new(bits & ((1 << n) - 1), n).unwrap(), v);
        }
        let combo = &p + &q.scale(&c);
        for s in SubsetMask::full(n).unwrap().subsets() {
            let f = |poly: &MultilinearPoly<Rational>| exact(interaction(&FunctionSpec::multilinear(poly.clone()), s, &closed()).unwrap().value());
            prop_assert_eq!(f(&combo), f(&p) + c.clone() * f(&q));
        }
    }

    #[test]
    fn subset_text_round_trips(n in 1usize..=63, bits in any::<u64>()) {
        let s = SubsetMask::new(bits & (u64::MAX >> (64 - n)), n).unwrap();
        prop_assert_eq!(SubsetMask::parse(n, &s.to_string()).unwrap(), s);
    }

    #[test]
    fn report_order_is_cardinality_then_lexicographic(n in 1usize..=7, k in 0usize..=7) {
        let all: Vec<SubsetMask> = subsets_of_size_at_most(n, k.min(n)).unwrap().collect();
        for w in all.windows(2) {
            prop_assert!(w[0] < w[1]);
            prop_assert!(w[0].len() <= w[1].len());
        }
        let expected: u128 = (0..=k.min(n)).map(|j| cube_interact::subset::binomial(n, j)).sum();
        prop_assert_eq!(all.len() as u128, expected);
    }

    #[test]
    fn multiplicative_indexes_match_the_product_expansion(cs in prop::collection::vec(1i64..=4, 1..=4)) {
        let n = cs.len();
        let transforms: Vec<Unary> = cs.iter().map(|&c| Unary::power(ratio(c, 1)).unwrap()).collect();
        let spec = FunctionSpec::multiplicative(transforms).unwrap();
        // Π x_i^{c_i}: each factor has mean 1/(c+1) and first moment 6c/((c+1)(c+2)) after scaling.
        for s in SubsetMask::full(n).unwrap().subsets() {
            let mut expected = ratio(1, 1);
            for (i, &c) in cs.iter().enumerate() {
                expected *= if s.contains(i) { ratio(6 * c, (c + 1) * (c + 2)) } else { ratio(1, c + 1) };
            }
            prop_assert_eq!(exact(interaction(&spec, s, &closed()).unwrap().value()), expected);
        }
    }
}
