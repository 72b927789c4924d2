mod common;

use common::{catalog, multi_index, point};
use std::f64::consts::FRAC_PI_2;

use distembed::kernels::{kernel_deriv_fd, kernel_deriv_fd_richardson};
use distembed::quadrature::gauss_legendre;
use distembed::{Kernel, KernelSpec, MultiIndex, Smoothness};
use proptest::prelude::*;

/// Independent derivative oracle for stationary kernels `ψ(x - y)`:
/// `∂^(p,q) k = (-1)^{|q|} ∂^{p+q} ψ`.
enum Profile {
    /// `ψ(u) = F(‖u‖²)` given the derivatives `F^(k)(s)`.
    Radial(Box<dyn Fn(u32, f64) -> f64>),
    Sinc,
    Cosine,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Truncated Taylor coefficients indexed by exponent tuples `≤ alpha`.
struct Jet<'a> {
    alpha: &'a [u32],
    c: Vec<f64>,
}

impl<'a> Jet<'a> {
    fn zero(alpha: &'a [u32]) -> Self {
        let len = alpha.iter().map(|&a| a as usize + 1).product();
        Jet { alpha, c: vec![0.0; len] }
    }

    fn index(&self, e: &[u32]) -> usize {
        e.iter().zip(self.alpha).fold(0, |acc, (&ei, &ai)| acc * (ai as usize + 1) + ei as usize)
    }

    fn exponents(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &a in self.alpha {
            out = out
                .into_iter()
                .flat_map(|e| (0..=a).map(move |k| [e.clone(), vec![k]].concat()))
                .collect();
        }
        out
    }

    fn mul(&self, other: &Jet<'a>) -> Jet<'a> {
        let mut r = Jet::zero(self.alpha);
        let exps = self.exponents();
        for e in &exps {
            let a = self.c[self.index(e)];
            if a == 0.0 {
                continue;
            }
            for f in &exps {
                let sum: Vec<u32> = e.iter().zip(f).map(|(x, y)| x + y).collect();
                if sum.iter().zip(self.alpha).all(|(s, a)| s <= a) {
                    let i = r.index(&sum);
                    r.c[i] += a * other.c[other.index(f)];
                }
            }
        }
        r
    }
}

fn series_partial(profile: &Profile, alpha: &[u32], u: &[f64]) -> f64 {
    let n: u32 = alpha.iter().sum();
    match profile {
        Profile::Cosine => (u[0] + n as f64 * FRAC_PI_2).cos(),
        Profile::Sinc => {
            // sinc(t) = ½ ∫_{-1}^{1} cos(tξ) dξ
            let (nodes, weights) = gauss_legendre(64);
            0.5 * nodes
                .iter()
                .zip(&weights)
                .map(|(xi, w)| w * xi.powi(n as i32) * (u[0] * xi + n as f64 * FRAC_PI_2).cos())
                .sum::<f64>()
        }
        Profile::Radial(f) => {
            // F(s0 + δ) with δ = Σ 2 u_i t_i + t_i²
            let s0: f64 = u.iter().map(|v| v * v).sum();
            let mut delta = Jet::zero(alpha);
            for i in 0..alpha.len() {
                let mut e = vec![0u32; alpha.len()];
                if alpha[i] >= 1 {
                    e[i] = 1;
                    let k = delta.index(&e);
                    delta.c[k] += 2.0 * u[i];
                }
                if alpha[i] >= 2 {
                    e[i] = 2;
                    let k = delta.index(&e);
                    delta.c[k] += 1.0;
                }
            }
            let mut power = Jet::zero(alpha);
            power.c[0] = 1.0;
            let mut total = Jet::zero(alpha);
            for k in 0..=n {
                let ck = f(k, s0) / factorial(k);
                for (t, p) in total.c.iter_mut().zip(&power.c) {
                    *t += ck * p;
                }
                power = power.mul(&delta);
            }
            let scale: f64 = alpha.iter().map(|&a| factorial(a)).product();
            total.c[total.index(alpha)] * scale
        }
    }
}

fn oracle_catalog() -> Vec<(Kernel, Profile)> {
    let gaussian = |sigma: f64, amp: f64| {
        Profile::Radial(Box::new(move |k, s| amp * (-1.0 / (sigma * sigma)).powi(k as i32) * (-s / (sigma * sigma)).exp()))
    };
    let imq = |c: f64, beta: f64, amp: f64| {
        Profile::Radial(Box::new(move |k, s| {
            let falling: f64 = (0..k).map(|i| -beta - i as f64).product();
            amp * falling * (c * c + s).powf(-beta - k as f64)
        }))
    };
    vec![
        (Kernel::gaussian(1, 1.0, 1.0).unwrap(), gaussian(1.0, 1.0)),
        (Kernel::gaussian(2, 0.7, 1.5).unwrap(), gaussian(0.7, 1.5)),
        (Kernel::inverse_multiquadric(1, 1.0, 0.5, 1.0).unwrap(), imq(1.0, 0.5, 1.0)),
        (Kernel::inverse_multiquadric(2, 1.2, 1.0, 1.0).unwrap(), imq(1.2, 1.0, 1.0)),
        (Kernel::inverse_multiquadric(2, 0.8, 1.5, 2.0).unwrap(), imq(0.8, 1.5, 2.0)),
        (Kernel::sinc(), Profile::Sinc),
        (Kernel::cosine(), Profile::Cosine),
    ]
}

fn smooth_kernels() -> Vec<Kernel> {
    catalog()
        .into_iter()
        .map(|(_, k)| k)
        .filter(|k| k.smoothness().allows(3))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn analytic_derivatives_match_series_oracle(
        which in 0usize..7,
        p in multi_index(2, 3),
        q in multi_index(2, 3),
        x in point(2, 2.0),
        y in point(2, 2.0),
    ) {
        let catalog = oracle_catalog();
        let (k, profile) = &catalog[which];
        let d = k.dim();
        let p = MultiIndex::new(p.entries()[..d].to_vec());
        let q = MultiIndex::new(q.entries()[..d].to_vec());
        let exact = k.deriv(&p, &q, &x[..d], &y[..d]).unwrap();
        let alpha: Vec<u32> = p.add(&q).entries().to_vec();
        let u: Vec<f64> = x[..d].iter().zip(&y[..d]).map(|(a, b)| a - b).collect();
        let sign = if q.order().is_multiple_of(2) { 1.0 } else { -1.0 };
        let oracle = sign * series_partial(profile, &alpha, &u);
        prop_assert!((exact.re - oracle).abs() <= 1e-10 * (1.0 + exact.norm()), "{k:?} {p:?} {q:?}: {exact} vs {oracle}");
        prop_assert_eq!(exact.im, 0.0);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences(
        which in 0usize..7,
        p in multi_index(2, 2),
        q in multi_index(2, 2),
        x in point(2, 2.0),
        y in point(2, 2.0),
    ) {
        let kernels = smooth_kernels();
        let k = &kernels[which % kernels.len()];
        let d = k.dim();
        let p = MultiIndex::new(p.entries()[..d].to_vec());
        let q = MultiIndex::new(q.entries()[..d].to_vec());
        let exact = k.deriv(&p, &q, &x[..d], &y[..d]).unwrap();
        let fd = kernel_deriv_fd_richardson(k, &p, &q, &x[..d], &y[..d]).unwrap();
        prop_assert!((exact - fd).norm() <= 1e-5 * (1.0 + exact.norm()), "{k:?} {p:?} {q:?}: {exact} vs {fd}");
    }

    #[test]
    fn hermitian_symmetry(which in 0usize..9, x in point(2, 5.0), y in point(2, 5.0)) {
        let kernels = catalog();
        let k = &kernels[which].1;
        let d = k.dim();
        let a = k.eval(&x[..d], &y[..d]).unwrap();
        let b = k.eval(&y[..d], &x[..d]).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12);
    }

    #[test]
    fn derivative_slots_are_hermitian(
        p in multi_index(1, 2),
        q in multi_index(1, 2),
        x in point(1, 3.0),
        y in point(1, 3.0),
    ) {
        // ∂^(p,q) k(x, y) = conj(∂^(q,p) k(y, x))
        for k in smooth_kernels().iter().filter(|k| k.dim() == 1) {
            let a = k.deriv(&p, &q, &x, &y).unwrap();
            let b = k.deriv(&q, &p, &y, &x).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}

#[test]
fn finite_difference_error_shrinks_with_step() {
    let k = Kernel::gaussian(1, 1.0, 1.0).unwrap();
    for (p, q, x, y) in [(1u32, 0u32, 0.3, -0.2), (1, 1, 0.0, 0.4), (2, 1, -0.5, 0.7), (2, 2, 1.1, 0.2)] {
        let (p, q) = (MultiIndex::new(vec![p]), MultiIndex::new(vec![q]));
        let exact = k.deriv(&p, &q, &[x], &[y]).unwrap();
        let mut prev = f64::INFINITY;
        for h in [0.2, 0.1, 0.05, 0.025] {
            let err = (kernel_deriv_fd(&k, &p, &q, &[x], &[y], h).unwrap() - exact).norm();
            assert!(err < prev, "{p:?} {q:?} h={h}: {err} !< {prev}");
            // second-order stencil
            if prev.is_finite() {
                assert!(err / prev < 0.3);
            }
            prev = err;
        }
    }
}

#[test]
fn smoothness_is_declared_per_family() {
    assert_eq!(Kernel::laplace(1, 1.0, 1.0).unwrap().smoothness(), Smoothness::Finite(0));
    assert_eq!(Kernel::brownian().smoothness(), Smoothness::Finite(0));
    assert_eq!(Kernel::sinc().smoothness(), Smoothness::Unbounded);
    let z = MultiIndex::zero(1);
    let one = MultiIndex::new(vec![1]);
    assert!(Kernel::brownian().deriv(&one, &z, &[1.0], &[2.0]).is_err());
}

#[test]
fn json_specs_build_the_same_kernels() {
    let cases = [
        (r#"{"family":"gaussian","params":{"sigma":2.0}}"#, Kernel::gaussian(1, 2.0, 1.0).unwrap()),
        (r#"{"family":"sinc"}"#, Kernel::sinc()),
        (r#"{"family":"cosine","params":{"terms":[{"a":2.0,"omega":3.0}]}}"#, Kernel::cosine_series(vec![(2.0, vec![3.0])]).unwrap()),
        (r#"{"family":"imq","params":{"c":0.5,"beta":1.5}}"#, Kernel::inverse_multiquadric(1, 0.5, 1.5, 1.0).unwrap()),
        (r#"{"family":"gaussian","transform":{"shift":0.25}}"#, Kernel::gaussian(1, 1.0, 1.0).unwrap().shift_constant(0.25).unwrap()),
    ];
    for (json, expected) in cases {
        let k = json.parse::<KernelSpec>().unwrap().build().unwrap();
        for (x, y) in [(0.0, 0.0), (0.3, -1.2), (2.0, 0.5)] {
            assert_eq!(k.eval(&[x], &[y]).unwrap(), expected.eval(&[x], &[y]).unwrap(), "{json}");
        }
    }
    assert!(r#"{"family":"nope"}"#.parse::<KernelSpec>().unwrap().build().is_err());
    assert!(r#"{"family":"gaussian","params":{"sigma":-1}}"#.parse::<KernelSpec>().unwrap().build().is_err());
    assert!(r#"{"family":"gaussian","extra":1}"#.parse::<KernelSpec>().is_err());
}
