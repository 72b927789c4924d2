#![allow(dead_code)]

use distembed::{Atom, Complex64, GeneralizedMeasure, Kernel, MultiIndex};
use proptest::prelude::*;

pub fn multi_index(dim: usize, max_order: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_order, dim)
        .prop_filter("total order bound", move |v| v.iter().sum::<u32>() <= max_order)
        .prop_map(MultiIndex::new)
}

pub fn point(dim: usize, half: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-half..half, dim)
}

pub fn weight() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

pub fn atom(dim: usize, max_order: u32, half: f64) -> impl Strategy<Value = Atom> {
    (weight(), multi_index(dim, max_order), point(dim, half))
        .prop_map(|(w, p, x)| Atom::new(w, p, x).unwrap())
}

pub fn measure(dim: usize, max_order: u32, max_atoms: usize) -> impl Strategy<Value = GeneralizedMeasure> {
    prop::collection::vec(atom(dim, max_order, 3.0), 1..=max_atoms)
        .prop_map(move |atoms| GeneralizedMeasure::from_atoms(dim, atoms).unwrap())
}

/// Order-0 measure with real weights.
pub fn real_measure(max_atoms: usize, half: f64) -> impl Strategy<Value = GeneralizedMeasure> {
    prop::collection::vec((-1.0..1.0f64, -half..half), 1..=max_atoms).prop_map(|pairs| {
        let atoms = pairs
            .into_iter()
            .map(|(w, x)| Atom::new(Complex64::new(w, 0.0), MultiIndex::zero(1), vec![x]).unwrap())
            .collect();
        GeneralizedMeasure::from_atoms(1, atoms).unwrap()
    })
}

/// Order-0 measure on the line with total mass exactly `mass` (the first weight
/// absorbs the rest).
pub fn measure_with_mass(mass: f64, max_atoms: usize, half: f64) -> impl Strategy<Value = GeneralizedMeasure> {
    prop::collection::vec((-1.0..1.0f64, -half..half), 2..=max_atoms).prop_map(move |pairs| {
        let rest: f64 = pairs[1..].iter().map(|p| p.0).sum();
        let atoms = pairs
            .iter()
            .enumerate()
            .map(|(i, &(w, x))| {
                let w = if i == 0 { mass - rest } else { w };
                Atom::new(Complex64::new(w, 0.0), MultiIndex::zero(1), vec![x]).unwrap()
            })
            .collect();
        GeneralizedMeasure::from_atoms(1, atoms).unwrap()
    })
}

/// Every built-in kernel on the line and one of each in the plane where it exists.
pub fn catalog() -> Vec<(&'static str, Kernel)> {
    vec![
        ("gaussian", Kernel::gaussian(1, 1.0, 1.0).unwrap()),
        ("gaussian-2d", Kernel::gaussian(2, 0.7, 1.5).unwrap()),
        ("imq", Kernel::inverse_multiquadric(1, 1.0, 0.5, 1.0).unwrap()),
        ("imq-2d", Kernel::inverse_multiquadric(2, 1.2, 1.0, 1.0).unwrap()),
        ("laplace", Kernel::laplace(1, 1.0, 1.0).unwrap()),
        ("sinc", Kernel::sinc()),
        ("cosine", Kernel::cosine()),
        ("constant", Kernel::constant(1, 0.5).unwrap()),
        ("brownian", Kernel::brownian()),
    ]
}

pub fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}
