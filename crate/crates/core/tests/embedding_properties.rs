mod common;

use common::{catalog, measure, measure_with_mass, multi_index, point, real_measure, rel_close};
use distembed::embedding::{self, SpdVerdict};
use distembed::kernels::kernel_deriv_fd_richardson;
use distembed::{Atom, Complex64, Error, GeneralizedMeasure, Kernel, MultiIndex};
use proptest::prelude::*;

fn sign(order: u32) -> f64 {
    if order.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn smooth_stationary() -> Vec<Kernel> {
    vec![
        Kernel::gaussian(1, 1.0, 1.0).unwrap(),
        Kernel::inverse_multiquadric(1, 1.0, 0.5, 1.0).unwrap(),
        Kernel::sinc(),
        Kernel::cosine(),
        Kernel::constant(1, 0.5).unwrap(),
    ]
}

fn gaussian() -> Kernel {
    Kernel::gaussian(1, 1.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reproducing_property(which in 0usize..9, x in point(2, 5.0), y in point(2, 5.0)) {
        let kernels = catalog();
        let k = &kernels[which].1;
        let d = k.dim();
        let delta = GeneralizedMeasure::dirac(&x[..d]).unwrap();
        let v = embedding::embed_eval(k, &delta, &y[..d]).unwrap();
        prop_assert_eq!(v, k.eval(&y[..d], &x[..d]).unwrap());
    }

    #[test]
    fn derivative_atoms_evaluate_through_the_second_slot(
        which in 0usize..5,
        p in multi_index(1, 2),
        x in point(1, 3.0),
        y in point(1, 3.0),
    ) {
        let k = &smooth_stationary()[which];
        let d = GeneralizedMeasure::dirac(&x).unwrap().derivative(&p).unwrap();
        let v = embedding::embed_eval(k, &d, &y).unwrap();
        let zero = MultiIndex::zero(1);
        let exact = k.deriv(&zero, &p, &y, &x).unwrap() * sign(p.order());
        prop_assert_eq!(v, exact);
        let fd = kernel_deriv_fd_richardson(k, &zero, &p, &y, &x).unwrap() * sign(p.order());
        prop_assert!((v - fd).norm() <= 1e-5 * (1.0 + v.norm()), "{k:?} {p:?}: {v} vs {fd}");
    }

    #[test]
    fn stationary_kernels_commute_derivatives(
        which in 0usize..5,
        d in measure(1, 1, 6),
        p in multi_index(1, 2),
        y in point(1, 3.0),
    ) {
        let k = &smooth_stationary()[which];
        let moved = embedding::embed_eval(k, &d.derivative(&p).unwrap(), &y).unwrap();
        let differentiated = embedding::embed_eval_deriv(k, &d, &p, &y).unwrap();
        prop_assert!(rel_close(moved, differentiated, 1e-10), "{moved} vs {differentiated}");
    }

    #[test]
    fn epsilon_shift_adds_squared_mass(mu in real_measure(8, 4.0), eps in prop::sample::select(vec![0.1, 1.0, 10.0])) {
        let k = gaussian();
        let shifted = k.shift_constant(eps * eps).unwrap();
        let lhs = embedding::norm_sq(&shifted, &mu).unwrap();
        let rhs = embedding::norm_sq(&k, &mu).unwrap() + eps * eps * mu.total_mass().norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn centering_preserves_distances_between_equal_masses(
        mu in measure_with_mass(1.0, 6, 3.0),
        nu in measure_with_mass(1.0, 6, 3.0),
        nu0 in measure_with_mass(1.0, 4, 3.0),
    ) {
        let k = gaussian();
        let centered = k.center(&nu0).unwrap();
        let a = embedding::distance(&centered, &mu, &nu).unwrap();
        let b = embedding::distance(&k, &mu, &nu).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0), "{a} vs {b}");
        prop_assert!(embedding::norm(&centered, &nu0).unwrap() <= 1e-10);
    }

    #[test]
    fn derivative_slice_is_an_isometry(
        points in prop::collection::vec((-3.0..3.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..10),
    ) {
        let k = gaussian();
        let e1 = MultiIndex::new(vec![1]);
        let slice = k.derivative_slice(&e1).unwrap();
        let order1: Vec<Atom> = points
            .iter()
            .map(|&(x, re, im)| Atom::new(Complex64::new(re, im), e1.clone(), vec![x]).unwrap())
            .collect();
        let order0: Vec<Atom> = points
            .iter()
            .map(|&(x, re, im)| Atom::new(Complex64::new(re, im), MultiIndex::zero(1), vec![x]).unwrap())
            .collect();
        let d1 = GeneralizedMeasure::from_atoms(1, order1).unwrap();
        let d0 = GeneralizedMeasure::from_atoms(1, order0).unwrap();
        let a = embedding::norm_sq(&k, &d1).unwrap();
        let b = embedding::norm_sq(&slice, &d0).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hermitian_and_cauchy_schwarz(d in measure(1, 2, 10), t in measure(1, 2, 10)) {
        let k = gaussian();
        let dt = embedding::inner(&k, &d, &t).unwrap();
        let td = embedding::inner(&k, &t, &d).unwrap();
        prop_assert!(rel_close(dt, td.conj(), 1e-10));
        let dd = embedding::norm_sq(&k, &d).unwrap();
        let tt = embedding::norm_sq(&k, &t).unwrap();
        prop_assert!(dt.norm_sqr() <= (1.0 + 1e-10) * dd * tt + 1e-14, "{} > {}", dt.norm_sqr(), dd * tt);
    }

    #[test]
    fn inner_is_sesquilinear(
        d in measure(1, 2, 5),
        e in measure(1, 2, 5),
        t in measure(1, 2, 5),
        a in common::weight(),
        b in common::weight(),
    ) {
        let k = gaussian();
        let combo = GeneralizedMeasure::linear_combine(&[(a, &d), (b, &e)]).unwrap();
        let left = embedding::inner(&k, &combo, &t).unwrap();
        let expect = a * embedding::inner(&k, &d, &t).unwrap() + b * embedding::inner(&k, &e, &t).unwrap();
        prop_assert!(rel_close(left, expect, 1e-10));
        let right = embedding::inner(&k, &t, &combo).unwrap();
        let expect = a.conj() * embedding::inner(&k, &t, &d).unwrap() + b.conj() * embedding::inner(&k, &t, &e).unwrap();
        prop_assert!(rel_close(right, expect, 1e-10));
    }
}

#[test]
fn dipole_quotients_converge_linearly() {
    let k = gaussian();
    let dipole = GeneralizedMeasure::dirac(&[0.0]).unwrap().derivative(&MultiIndex::new(vec![1])).unwrap();
    let q = |h: f64| {
        let quotient = GeneralizedMeasure::dipole_quotient(&[0.0], 0, h).unwrap();
        let gap = GeneralizedMeasure::linear_combine(&[(Complex64::new(1.0, 0.0), &quotient), (Complex64::new(1.0, 0.0), &dipole)]).unwrap();
        embedding::norm(&k, &gap).unwrap()
    };
    for h in [1e-2, 5e-3, 2.5e-3] {
        let ratio = q(h / 2.0) / q(h);
        assert!((0.4..=0.6).contains(&ratio), "h = {h}: ratio {ratio}");
    }
}

#[test]
fn embed_eval_deriv_matches_difference_quotient() {
    let k = gaussian();
    let delta = GeneralizedMeasure::dirac(&[0.0]).unwrap();
    let e1 = MultiIndex::new(vec![1]);
    assert_eq!(embedding::embed_eval_deriv(&k, &delta, &e1, &[0.0]).unwrap().norm(), 0.0);
    let h = 1e-5;
    let fd = (embedding::embed_eval(&k, &delta, &[1.0 + h]).unwrap() - embedding::embed_eval(&k, &delta, &[1.0 - h]).unwrap()) / (2.0 * h);
    let exact = embedding::embed_eval_deriv(&k, &delta, &e1, &[1.0]).unwrap();
    assert!((exact - fd).norm() < 1e-6, "{exact} vs {fd}");
    let zero = MultiIndex::zero(1);
    let d = GeneralizedMeasure::dirac(&[0.3]).unwrap().derivative(&e1).unwrap();
    assert_eq!(
        embedding::embed_eval_deriv(&k, &d, &zero, &[1.0]).unwrap(),
        embedding::embed_eval(&k, &d, &[1.0]).unwrap()
    );
}

#[test]
fn orders_beyond_smoothness_are_refused() {
    let laplace = Kernel::laplace(1, 1.0, 1.0).unwrap();
    let dipole = GeneralizedMeasure::dirac(&[0.0]).unwrap().derivative(&MultiIndex::new(vec![1])).unwrap();
    assert!(matches!(embedding::norm(&laplace, &dipole), Err(Error::UnsupportedOrder { .. })));
    let k = Kernel::gaussian(1, 1.0, 1.0).unwrap();
    let sliced = k.derivative_slice(&MultiIndex::new(vec![1])).unwrap();
    assert!(embedding::embed_eval(&sliced, &dipole, &[0.5]).is_ok());
}

#[test]
fn spd_verdicts_on_reference_configurations() {
    let atoms = |xs: &[f64]| -> Vec<Atom> { xs.iter().map(|&x| Atom::dirac(vec![x]).unwrap()).collect() };
    let spread: Vec<f64> = (0..20).map(|i| -4.75 + 0.5 * i as f64).collect();
    let g = embedding::spd_check(&gaussian(), &atoms(&spread), 1e-10).unwrap();
    assert_eq!(g.verdict, SpdVerdict::PositiveDefinite);
    assert_eq!(g.gram_size, 20);
    let c = embedding::spd_check(&Kernel::constant(1, 1.0).unwrap(), &atoms(&[0.0, 1.0]), 1e-10).unwrap();
    assert_eq!(c.verdict, SpdVerdict::SemidefiniteDegenerate);
    let cos = embedding::spd_check(&Kernel::cosine(), &atoms(&[0.0, 0.7, 1.9, 3.1]), 1e-10).unwrap();
    assert_eq!(cos.verdict, SpdVerdict::SemidefiniteDegenerate);
    assert!(cos.min_eigenvalue.abs() <= 1e-10);
}
