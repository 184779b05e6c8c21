use dpring::algebra::{component_dimension, Field, FreePoly, Monomial, Scalar};
use dpring::construction::{member_with, ConstructionParams, Route, Space, SpanQuery};
use dpring::harness::sample_z;
use dpring::ore::{
    commute_past, mul_by_x, ore_mul, power_x0x, windowed_power, DifferentialAlgebra, OrePoly,
    ShiftAlgebra,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Q: Field = Field::Rationals;

fn word(max_len: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u64..4, 0..=max_len).prop_map(Monomial::new)
}

fn poly_in(field: Field) -> impl Strategy<Value = FreePoly> {
    prop::collection::vec((word(4), -6i64..=6), 0..5).prop_map(move |terms| {
        let mut p = FreePoly::zero(field);
        for (w, c) in terms {
            p.add_term(w, Scalar::from_i64(c, field));
        }
        p
    })
}

fn poly() -> impl Strategy<Value = FreePoly> {
    poly_in(Q)
}

fn ore_poly() -> impl Strategy<Value = OrePoly<FreePoly>> {
    prop::collection::vec((poly(), 0u64..4), 0..3).prop_map(|parts| {
        let alg = ShiftAlgebra::new(Q);
        let mut o = OrePoly::zero();
        for (a, t) in parts {
            o.add_term(&alg, t, a);
        }
        o
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz(a in poly(), b in poly()) {
        let lhs = a.mul(&b).derive();
        let rhs = a.derive().mul(&b).add(&a.mul(&b.derive()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivation_is_linear(a in poly(), b in poly(), c in -5i64..=5) {
        let c = Scalar::from_i64(c, Q);
        prop_assert_eq!(a.scale(&c).add(&b).derive(), a.derive().scale(&c).add(&b.derive()));
    }

    #[test]
    fn derivation_raises_degree_and_keeps_length(w in word(6)) {
        let d = FreePoly::monomial(w.clone(), Q).derive();
        for m in d.monomials() {
            prop_assert_eq!(m.len(), w.len());
            prop_assert_eq!(m.degree(), w.degree() + 1);
        }
    }

    #[test]
    fn free_product_is_associative(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn unity(a in poly()) {
        let one = FreePoly::one(Q);
        prop_assert_eq!(a.mul(&one), a.clone());
        prop_assert_eq!(one.mul(&a), a);
    }

    #[test]
    fn free_poly_text_round_trip(a in poly()) {
        prop_assert_eq!(FreePoly::parse(&a.to_string(), Q).unwrap(), a);
    }

    #[test]
    fn free_poly_text_round_trip_mod_p(a in poly_in(Field::Prime(5))) {
        prop_assert_eq!(FreePoly::parse(&a.to_string(), Field::Prime(5)).unwrap(), a);
    }

    #[test]
    fn ore_poly_text_round_trip(o in ore_poly()) {
        prop_assert_eq!(OrePoly::<FreePoly>::parse(&o.to_string(), Q).unwrap(), o);
    }

    #[test]
    fn closed_form_matches_iteration(a in poly(), n in 0u64..=12) {
        let alg = ShiftAlgebra::new(Q);
        let mut stepped = OrePoly::constant(&alg, a.clone());
        for _ in 0..n {
            stepped = mul_by_x(&alg, &stepped);
        }
        prop_assert_eq!(commute_past(&alg, &a, n), stepped);
    }

    #[test]
    fn ore_product_is_associative(p in ore_poly(), q in ore_poly(), r in ore_poly()) {
        let alg = ShiftAlgebra::new(Q);
        prop_assert_eq!(
            ore_mul(&alg, &ore_mul(&alg, &p, &q), &r),
            ore_mul(&alg, &p, &ore_mul(&alg, &q, &r))
        );
    }

    #[test]
    fn x_times_a_is_a_x_plus_derivative(a in poly()) {
        let alg = ShiftAlgebra::new(Q);
        let lhs = ore_mul(&alg, &OrePoly::x(&alg), &OrePoly::constant(&alg, a.clone()));
        let rhs = OrePoly::term(&alg, a.clone(), 1).add(&alg, &OrePoly::constant(&alg, alg.derive(&a)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn windowed_matches_full(m in 1u64..=12, span in 0u64..=12) {
        let floor = m.saturating_sub(span);
        let full = power_x0x(m, Q, 16).unwrap();
        let window = windowed_power(m, floor, Q).unwrap();
        prop_assert_eq!(window, full.truncate_below(floor));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn certificates_reverify(seed in any::<u64>(), wide in any::<bool>()) {
        let (params, k) = if wide {
            (ConstructionParams::new(2, 2, 2, Q).unwrap(), 2)
        } else {
            (ConstructionParams::new(10, 3, 1, Q).unwrap(), 1)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = sample_z(&mut rng, &params, k, 2).unwrap();
        let dz = z.to_poly(Q).derive();
        let level = params.level(k).unwrap();
        let len = level.z_length();
        let degree = z.to_poly(Q).bidegree().map(|(_, d)| d).unwrap_or(0) + 1;
        let query = SpanQuery::new(Space::B(k), len, degree);
        let budget = Default::default();
        let mut routes = vec![Route::Projection, Route::Localized];
        if component_dimension(len, degree) <= 20_000 {
            routes.push(Route::Full);
        }
        for route in routes {
            let cert = member_with(&dz, &query, &params, route, &budget).unwrap();
            prop_assert!(cert.is_member());
            prop_assert!(cert.verify(&params, &budget).is_ok());
        }
        // pairwise distinct checkpoint letters and no partner word: not a member
        let mut letters = vec![0u64; len];
        for (j, &c) in level.positions().iter().enumerate() {
            letters[c as usize - 1] = j as u64;
        }
        let stray = Monomial::new(letters);
        let query = SpanQuery::new(Space::B(k), len, stray.degree());
        let cert = member_with(&FreePoly::monomial(stray, Q), &query, &params, Route::Projection, &budget).unwrap();
        prop_assert!(!cert.is_member());
        prop_assert!(cert.verify(&params, &budget).is_ok());
    }
}
