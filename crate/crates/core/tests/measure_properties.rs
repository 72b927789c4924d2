mod common;

use common::{measure, multi_index, weight};
use distembed::{Complex64, GeneralizedMeasure};
use proptest::prelude::*;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn combination_is_associative(a in measure(2, 2, 5), b in measure(2, 2, 5), c in measure(2, 2, 5)) {
        let ab = GeneralizedMeasure::linear_combine(&[(one(), &a), (one(), &b)]).unwrap();
        let bc = GeneralizedMeasure::linear_combine(&[(one(), &b), (one(), &c)]).unwrap();
        let left = GeneralizedMeasure::linear_combine(&[(one(), &ab), (one(), &c)]).unwrap();
        let right = GeneralizedMeasure::linear_combine(&[(one(), &a), (one(), &bc)]).unwrap();
        prop_assert_eq!(left.len(), right.len());
        for (x, y) in left.atoms().iter().zip(right.atoms()) {
            prop_assert_eq!(&x.order, &y.order);
            prop_assert_eq!(&x.location, &y.location);
            prop_assert!((x.weight - y.weight).norm() <= 1e-12 * (1.0 + x.weight.norm()));
        }
    }

    #[test]
    fn canonical_form_is_stable(a in measure(2, 2, 8)) {
        let again = a.clone().canonicalize();
        prop_assert_eq!(&again, &a);
        prop_assert!(a.atoms().iter().all(|t| t.weight != Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn derivative_keeps_weights_and_kills_mass(a in measure(2, 1, 6), p in multi_index(2, 2)) {
        let d = a.derivative(&p).unwrap();
        prop_assert_eq!(d.len(), a.len());
        for (x, y) in a.atoms().iter().zip(d.atoms()) {
            prop_assert_eq!(x.weight, y.weight);
            prop_assert_eq!(y.order.clone(), x.order.add(&p));
        }
        if !p.is_zero() {
            prop_assert_eq!(d.total_mass(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn mass_is_linear(a in measure(1, 1, 6), b in measure(1, 1, 6), s in weight(), t in weight()) {
        let combo = GeneralizedMeasure::linear_combine(&[(s, &a), (t, &b)]).unwrap();
        let expect = s * a.total_mass() + t * b.total_mass();
        prop_assert!((combo.total_mass() - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
    }
}
