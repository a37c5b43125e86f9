use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use surfmap::series::{
    chain_series, chain_values_numeric, characteristic_polynomial, critical_constants, kernel_roots, planar_series,
    planar_value, TruncatedSeries, Var,
};

const ORDER: usize = 6;

fn series() -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(-5i64..=5, ORDER + 1).prop_map(|c| TruncatedSeries::from_integers(&c, ORDER, Var::T))
}

fn unit() -> impl Strategy<Value = TruncatedSeries> {
    (prop_oneof![Just(1i64), Just(-1), Just(2)], prop::collection::vec(-5i64..=5, ORDER)).prop_map(|(c0, rest)| {
        let mut c = vec![c0];
        c.extend(rest);
        TruncatedSeries::from_integers(&c, ORDER, Var::T)
    })
}

/// `m ≥ 2` and a degree set that is legal for it.
fn md() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (2usize..=4, prop::collection::btree_set(1usize..=3, 1..=2))
        .prop_map(|(m, d)| (m, d.into_iter().collect::<Vec<_>>()))
        .prop_filter("D = {1} is degenerate for m = 2", |(m, d)| !(*m == 2 && d == &[1]))
}

proptest! {
    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn reciprocal_inverts(u in unit()) {
        let inv = u.reciprocal().unwrap();
        prop_assert_eq!(&u * &inv, TruncatedSeries::one(ORDER, Var::T));
    }

    #[test]
    fn composition_is_a_ring_map(a in series(), b in series(), inner in series()) {
        // Only series without constant term can be substituted.
        let mut c = inner.coeffs().to_vec();
        c[0] = BigRational::zero();
        let inner = TruncatedSeries::from_coeffs(c, ORDER, Var::T);
        let lhs = (&a * &b).compose(&inner).unwrap();
        let rhs = &a.compose(&inner).unwrap() * &b.compose(&inner).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.compose(&TruncatedSeries::var_series(ORDER, Var::T)).unwrap(), a);
    }

    #[test]
    fn characteristic_polynomial_is_symmetric_and_centred((m, d) in md()) {
        let p = characteristic_polynomial(m, &d).unwrap();
        prop_assert!(p.is_symmetric());
        prop_assert!(p.moment(1).is_zero());
        prop_assert!(p.terms().all(|(_, s)| s.is_nonneg_integral()));
    }

    #[test]
    fn chain_series_have_nonnegative_integer_coefficients((m, d) in md()) {
        let chains = chain_series(m, &d, 5).unwrap();
        for n in -3..=3 {
            prop_assert!(chains.coeff(n).is_nonneg_integral(), "n = {}", n);
            prop_assert_eq!(chains.coeff(n), chains.coeff(-n));
        }
        prop_assert_eq!(chains.coeff(0).coeff(0), BigRational::one());
    }

    #[test]
    fn planar_series_matches_its_value((m, d) in md(), frac in 0.05f64..0.35) {
        let cc = critical_constants(m, &d).unwrap();
        let z = frac * cc.z_c;
        let s = planar_series(m, &d, 24).unwrap();
        let v = planar_value(m, &d, z).unwrap();
        prop_assert!((s.eval_f64(z) - v).abs() < 1e-9 * v, "{} vs {}", s.eval_f64(z), v);
    }

    #[test]
    fn small_roots_reproduce_chain_sums((m, d) in md(), frac in 0.2f64..0.95) {
        let t = frac * critical_constants(m, &d).unwrap().t_c;
        let roots = kernel_roots(m, &d, t).unwrap();
        let direct = chain_values_numeric(m, &d, t, 3).unwrap();
        for (n, &want) in direct.iter().enumerate() {
            prop_assert!(want >= 0.0);
            let got = roots.m_n(n as i64);
            prop_assert!((got - want).abs() <= 1e-8 * want.max(1.0), "n={}: {} vs {}", n, got, want);
        }
    }
}
