//! Kernels with analytic mixed partial derivatives.
//!
//! `kernel.deriv(p, q, x, y)` returns `∂^(p,q) k(x, y)`: the multi-index `p`
//! differentiates the first slot and `q` the second. A kernel declares a
//! [`Smoothness`] `m`; derivatives with `|p| ≤ m` and `|q| ≤ m` are available.
//!
//! Stationary catalog kernels `k(x, y) = ψ(x - y)` also expose the spectral
//! measure `Λ` with `ψ(h) = ∫ e^{-i⟨h,ξ⟩} dΛ(ξ)` when it is known in closed form.
//!
//! The Gaussian is `A exp(-‖x - y‖² / σ²)`, with the minus sign.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::{AxisBox, GeneralizedMeasure, MultiIndex};
use crate::spectral::{DensityFamily, SpectralDensity, SpectralMeasure, SpectralSupport};

/// Differentiability class `C^(m,m)` of a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Finite(u32),
    Unbounded,
}

impl Smoothness {
    pub fn allows(self, order: u32) -> bool {
        match self {
            Smoothness::Finite(m) => order <= m,
            Smoothness::Unbounded => true,
        }
    }

    pub fn min(self, other: Smoothness) -> Smoothness {
        match (self, other) {
            (Smoothness::Finite(a), Smoothness::Finite(b)) => Smoothness::Finite(a.min(b)),
            (Smoothness::Finite(a), _) | (_, Smoothness::Finite(a)) => Smoothness::Finite(a),
            _ => Smoothness::Unbounded,
        }
    }

    fn saturating_sub(self, n: u32) -> Smoothness {
        match self {
            Smoothness::Finite(m) => Smoothness::Finite(m.saturating_sub(n)),
            Smoothness::Unbounded => Smoothness::Unbounded,
        }
    }

    fn as_reported(self) -> u32 {
        match self {
            Smoothness::Finite(m) => m,
            Smoothness::Unbounded => u32::MAX,
        }
    }

    pub(crate) fn check(self, order: u32) -> Result<()> {
        if self.allows(order) {
            Ok(())
        } else {
            Err(Error::UnsupportedOrder {
                requested: order,
                available: self.as_reported(),
            })
        }
    }
}

/// A user-supplied kernel.
///
/// Without an analytic derivative (`deriv` returning `None`) the kernel falls back
/// to the Richardson-extrapolated finite-difference stencil, which is markedly less
/// accurate at high orders.
pub trait KernelFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn smoothness(&self) -> Smoothness;
    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64;
    fn deriv(&self, _p: &MultiIndex, _q: &MultiIndex, _x: &[f64], _y: &[f64]) -> Option<Complex64> {
        None
    }
}

#[derive(Clone)]
enum Kind {
    Gaussian { sigma: f64, amplitude: f64 },
    InverseMultiquadric { c: f64, beta: f64, amplitude: f64 },
    Laplace { sigma: f64, amplitude: f64 },
    Sinc,
    Cosine { terms: Vec<(f64, Vec<f64>)> },
    Constant { value: f64 },
    Brownian,
    Sum(Kernel, Kernel),
    Scale(f64, Kernel),
    Shift(f64, Kernel),
    Centered {
        base: Kernel,
        nu0: GeneralizedMeasure,
        nu0_norm_sq: Complex64,
    },
    DerivativeSlice { base: Kernel, p: MultiIndex },
    Custom(Arc<dyn KernelFunction>),
}

/// A positive definite kernel on `R^d`. Cheap to clone.
#[derive(Clone)]
pub struct Kernel {
    dim: usize,
    smoothness: Smoothness,
    kind: Arc<Kind>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel({}, d={}, {:?})", self.name(), self.dim, self.smoothness)
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

impl Kernel {
    fn build(dim: usize, smoothness: Smoothness, kind: Kind) -> Result<Kernel> {
        if dim == 0 {
            return invalid("kernel dimension must be positive");
        }
        Ok(Kernel {
            dim,
            smoothness,
            kind: Arc::new(kind),
        })
    }

    /// `A exp(-‖x - y‖² / σ²)`.
    pub fn gaussian(dim: usize, sigma: f64, amplitude: f64) -> Result<Kernel> {
        let sigma = positive("sigma", sigma)?;
        let amplitude = positive("amplitude", amplitude)?;
        Kernel::build(dim, Smoothness::Unbounded, Kind::Gaussian { sigma, amplitude })
    }

    /// `A (c² + ‖x - y‖²)^{-β}`.
    pub fn inverse_multiquadric(dim: usize, c: f64, beta: f64, amplitude: f64) -> Result<Kernel> {
        let c = positive("c", c)?;
        let beta = positive("beta", beta)?;
        let amplitude = positive("amplitude", amplitude)?;
        Kernel::build(
            dim,
            Smoothness::Unbounded,
            Kind::InverseMultiquadric { c, beta, amplitude },
        )
    }

    /// `A exp(-‖x - y‖ / σ)`; continuous but not differentiable at the diagonal.
    pub fn laplace(dim: usize, sigma: f64, amplitude: f64) -> Result<Kernel> {
        let sigma = positive("sigma", sigma)?;
        let amplitude = positive("amplitude", amplitude)?;
        Kernel::build(dim, Smoothness::Finite(0), Kind::Laplace { sigma, amplitude })
    }

    /// `sin(x - y) / (x - y)` on the real line, with value 1 on the diagonal.
    pub fn sinc() -> Kernel {
        Kernel::build(1, Smoothness::Unbounded, Kind::Sinc).expect("static kernel")
    }

    /// `Σ_j a_j cos(⟨ω_j, x - y⟩)` with `a_j ≥ 0`. A periodic kernel whose spectral
    /// measure is purely atomic.
    pub fn cosine_series(terms: Vec<(f64, Vec<f64>)>) -> Result<Kernel> {
        let Some((_, first)) = terms.first() else {
            return invalid("cosine series needs at least one term");
        };
        let dim = first.len();
        for (a, omega) in &terms {
            if !(*a >= 0.0) || !a.is_finite() {
                return invalid(format!("cosine coefficients must be nonnegative, got {a}"));
            }
            if omega.len() != dim || omega.iter().any(|w| !w.is_finite()) {
                return invalid("cosine frequencies must be finite and share one dimension");
            }
        }
        Kernel::build(dim, Smoothness::Unbounded, Kind::Cosine { terms })
    }

    /// `cos(x - y)` on the real line.
    pub fn cosine() -> Kernel {
        Kernel::cosine_series(vec![(1.0, vec![1.0])]).expect("static kernel")
    }

    /// The constant kernel `c ≥ 0`.
    pub fn constant(dim: usize, value: f64) -> Result<Kernel> {
        if !(value >= 0.0) || !value.is_finite() {
            return invalid(format!("constant kernel value must be nonnegative, got {value}"));
        }
        Kernel::build(dim, Smoothness::Unbounded, Kind::Constant { value })
    }

    /// Brownian motion kernel `min(|x|, |y|)` on the real line.
    pub fn brownian() -> Kernel {
        Kernel::build(1, Smoothness::Finite(0), Kind::Brownian).expect("static kernel")
    }

    pub fn custom(f: Arc<dyn KernelFunction>) -> Result<Kernel> {
        Kernel::build(f.dim(), f.smoothness(), Kind::Custom(f))
    }

    /// `k1 + k2`.
    pub fn sum(k1: &Kernel, k2: &Kernel) -> Result<Kernel> {
        if k1.dim != k2.dim {
            return invalid(format!("cannot add kernels of dimensions {} and {}", k1.dim, k2.dim));
        }
        Kernel::build(
            k1.dim,
            k1.smoothness.min(k2.smoothness),
            Kind::Sum(k1.clone(), k2.clone()),
        )
    }

    /// `a · k` with `a > 0`.
    pub fn scale(&self, a: f64) -> Result<Kernel> {
        let a = positive("scale factor", a)?;
        Kernel::build(self.dim, self.smoothness, Kind::Scale(a, self.clone()))
    }

    /// `k + c` with `c ≥ 0`. With `c = ε²` this is the shift that turns a kernel
    /// characteristic to zero-mass measures into one characteristic to all finite
    /// measures.
    pub fn shift_constant(&self, c: f64) -> Result<Kernel> {
        if !(c >= 0.0) || !c.is_finite() {
            return invalid(format!("constant shift must be nonnegative, got {c}"));
        }
        Kernel::build(self.dim, self.smoothness, Kind::Shift(c, self.clone()))
    }

    /// `k0(x, y) = ⟨δ_x - ν0, δ_y - ν0⟩_k`, the kernel whose embedding agrees with
    /// that of `k` on zero-mass measures but sends `ν0` to zero.
    ///
    /// Expanded: `k(x,y) - Φ(ν0)(x) - conj(Φ(ν0)(y)) + ‖ν0‖²`.
    pub fn center(&self, nu0: &GeneralizedMeasure) -> Result<Kernel> {
        if nu0.dim() != self.dim {
            return invalid(format!(
                "centering measure has dimension {}, kernel has {}",
                nu0.dim(),
                self.dim
            ));
        }
        if !nu0.is_measure() {
            return invalid("centering requires a measure (order-0 atoms only)");
        }
        let mut nu0_norm_sq = Complex64::new(0.0, 0.0);
        for a in nu0.atoms() {
            for b in nu0.atoms() {
                nu0_norm_sq += a.weight * b.weight.conj() * self.eval_unchecked(&b.location, &a.location);
            }
        }
        Kernel::build(
            self.dim,
            self.smoothness,
            Kind::Centered {
                base: self.clone(),
                nu0: nu0.clone(),
                nu0_norm_sq,
            },
        )
    }

    /// The kernel `(x, y) ↦ ∂^(p,p) k(x, y)`, itself positive definite. Its
    /// embedding of `δ_x` is the embedding of `∂^p δ_x` under `k`, up to sign.
    pub fn derivative_slice(&self, p: &MultiIndex) -> Result<Kernel> {
        if p.dim() != self.dim {
            return invalid("multi-index dimension does not match kernel");
        }
        self.smoothness.check(p.order())?;
        Kernel::build(
            self.dim,
            self.smoothness.saturating_sub(p.order()),
            Kind::DerivativeSlice {
                base: self.clone(),
                p: p.clone(),
            },
        )
    }

    /// Base kernel and centering measure, for kernels built by [`Kernel::center`].
    pub(crate) fn centering(&self) -> Option<(&Kernel, &GeneralizedMeasure)> {
        match &*self.kind {
            Kind::Centered { base, nu0, .. } => Some((base, nu0)),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn name(&self) -> String {
        match &*self.kind {
            Kind::Gaussian { .. } => "gaussian".into(),
            Kind::InverseMultiquadric { .. } => "imq".into(),
            Kind::Laplace { .. } => "laplace".into(),
            Kind::Sinc => "sinc".into(),
            Kind::Cosine { .. } => "cosine".into(),
            Kind::Constant { .. } => "constant".into(),
            Kind::Brownian => "brownian".into(),
            Kind::Sum(a, b) => format!("({} + {})", a.name(), b.name()),
            Kind::Scale(s, k) => format!("{s}*{}", k.name()),
            Kind::Shift(c, k) => format!("({} + {c})", k.name()),
            Kind::Centered { base, .. } => format!("centered({})", base.name()),
            Kind::DerivativeSlice { base, p } => format!("d{p:?}{p:?}({})", base.name()),
            Kind::Custom(_) => "custom".into(),
        }
    }

    fn check_points(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.dim || y.len() != self.dim {
            return invalid(format!(
                "points of dimensions {} and {} for a kernel of dimension {}",
                x.len(),
                y.len(),
                self.dim
            ));
        }
        Ok(())
    }

    /// `k(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        self.check_points(x, y)?;
        Ok(self.eval_unchecked(x, y))
    }

    /// `∂^(p,q) k(x, y)`.
    pub fn deriv(&self, p: &MultiIndex, q: &MultiIndex, x: &[f64], y: &[f64]) -> Result<Complex64> {
        self.check_points(x, y)?;
        if p.dim() != self.dim || q.dim() != self.dim {
            return invalid("multi-index dimension does not match kernel");
        }
        self.smoothness.check(p.order())?;
        self.smoothness.check(q.order())?;
        Ok(self.deriv_unchecked(p, q, x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match &*self.kind {
            Kind::Gaussian { sigma, amplitude } => {
                re(amplitude * (-sq_dist(x, y) / (sigma * sigma)).exp())
            }
            Kind::InverseMultiquadric { c, beta, amplitude } => {
                re(amplitude * (c * c + sq_dist(x, y)).powf(-beta))
            }
            Kind::Laplace { sigma, amplitude } => {
                re(amplitude * (-sq_dist(x, y).sqrt() / sigma).exp())
            }
            Kind::Sinc => re(sinc_deriv(x[0] - y[0], 0)),
            Kind::Cosine { terms } => re(terms
                .iter()
                .map(|(a, w)| a * dot_diff(w, x, y).cos())
                .sum()),
            Kind::Constant { value } => re(*value),
            Kind::Brownian => re(x[0].abs().min(y[0].abs())),
            Kind::Sum(a, b) => a.eval_unchecked(x, y) + b.eval_unchecked(x, y),
            Kind::Scale(s, k) => k.eval_unchecked(x, y) * s,
            Kind::Shift(c, k) => k.eval_unchecked(x, y) + c,
            Kind::Centered {
                base,
                nu0,
                nu0_norm_sq,
            } => {
                let mut v = base.eval_unchecked(x, y) + nu0_norm_sq;
                for a in nu0.atoms() {
                    v -= a.weight * base.eval_unchecked(x, &a.location);
                    v -= a.weight.conj() * base.eval_unchecked(&a.location, y);
                }
                v
            }
            Kind::DerivativeSlice { base, p } => base.deriv_unchecked(p, p, x, y),
            Kind::Custom(f) => f.eval(x, y),
        }
    }

    pub(crate) fn deriv_unchecked(
        &self,
        p: &MultiIndex,
        q: &MultiIndex,
        x: &[f64],
        y: &[f64],
    ) -> Complex64 {
        if p.is_zero() && q.is_zero() {
            return self.eval_unchecked(x, y);
        }
        let zero = Complex64::new(0.0, 0.0);
        let re = |v: f64| Complex64::new(v, 0.0);
        // stationary kernels: ∂_x^p ∂_y^q ψ(x - y) = (-1)^{|q|} ψ^{(p+q)}(x - y)
        let stationary_sign = crate::measure::sign_pow(q.order());
        match &*self.kind {
            Kind::Gaussian { sigma, amplitude } => {
                let alpha = p.add(q);
                let u = diff(x, y);
                let s: f64 = u.iter().map(|v| v * v).sum();
                let inv = -1.0 / (sigma * sigma);
                let e = amplitude * (s * inv).exp();
                re(stationary_sign * radial_partial(&u, alpha.entries(), |k| e * inv.powi(k as i32)))
            }
            Kind::InverseMultiquadric { c, beta, amplitude } => {
                let alpha = p.add(q);
                let u = diff(x, y);
                let base = c * c + u.iter().map(|v| v * v).sum::<f64>();
                let f = |k: u32| {
                    let falling: f64 = (0..k).map(|i| -beta - i as f64).product();
                    amplitude * falling * base.powf(-beta - k as f64)
                };
                re(stationary_sign * radial_partial(&u, alpha.entries(), f))
            }
            // smoothness 0: only reachable through the order-0 early return
            Kind::Laplace { .. } | Kind::Brownian => unreachable!("order checked by caller"),
            Kind::Sinc => {
                let n = p.order() + q.order();
                re(stationary_sign * sinc_deriv(x[0] - y[0], n))
            }
            Kind::Cosine { terms } => {
                let alpha = p.add(q);
                let n = alpha.order();
                re(stationary_sign
                    * terms
                        .iter()
                        .map(|(a, w)| a * alpha.monomial(w) * cos_deriv(dot_diff(w, x, y), n))
                        .sum::<f64>())
            }
            Kind::Constant { .. } => zero,
            Kind::Sum(a, b) => a.deriv_unchecked(p, q, x, y) + b.deriv_unchecked(p, q, x, y),
            Kind::Scale(s, k) => k.deriv_unchecked(p, q, x, y) * s,
            Kind::Shift(_, k) => k.deriv_unchecked(p, q, x, y),
            Kind::Centered { base, nu0, .. } => {
                let mut v = base.deriv_unchecked(p, q, x, y);
                if q.is_zero() {
                    let z = MultiIndex::zero(self.dim);
                    for a in nu0.atoms() {
                        v -= a.weight * base.deriv_unchecked(p, &z, x, &a.location);
                    }
                }
                if p.is_zero() {
                    let z = MultiIndex::zero(self.dim);
                    for a in nu0.atoms() {
                        v -= a.weight.conj() * base.deriv_unchecked(&z, q, &a.location, y);
                    }
                }
                v
            }
            Kind::DerivativeSlice { base, p: s } => base.deriv_unchecked(&p.add(s), &q.add(s), x, y),
            Kind::Custom(f) => f
                .deriv(p, q, x, y)
                .unwrap_or_else(|| fd_richardson(self, p, q, x, y)),
        }
    }

    /// True for kernels of the form `ψ(x - y)`.
    pub fn is_stationary(&self) -> bool {
        match &*self.kind {
            Kind::Gaussian { .. }
            | Kind::InverseMultiquadric { .. }
            | Kind::Laplace { .. }
            | Kind::Sinc
            | Kind::Cosine { .. }
            | Kind::Constant { .. } => true,
            Kind::Brownian | Kind::Centered { .. } | Kind::Custom(_) => false,
            Kind::Sum(a, b) => a.is_stationary() && b.is_stationary(),
            Kind::Scale(_, k) | Kind::Shift(_, k) => k.is_stationary(),
            Kind::DerivativeSlice { base, .. } => base.is_stationary(),
        }
    }

    /// The spectral measure `Λ`, when the kernel is stationary and `Λ` is known.
    pub fn spectral_measure(&self) -> Option<SpectralMeasure> {
        let d = self.dim;
        match &*self.kind {
            Kind::Gaussian { sigma, amplitude } => {
                let reach = 20.0 / sigma;
                let domain = AxisBox::cube(d, -reach, reach).ok()?;
                let density = SpectralDensity::new(DensityFamily::Gaussian { sigma: *sigma }, domain, *amplitude);
                SpectralMeasure::new(d, vec![], vec![density]).ok()
            }
            Kind::Sinc => {
                let density = SpectralDensity::new(
                    DensityFamily::Uniform,
                    AxisBox::cube(1, -1.0, 1.0).ok()?,
                    0.5,
                );
                SpectralMeasure::new(1, vec![], vec![density]).ok()
            }
            Kind::Cosine { terms } => {
                let mut atoms = Vec::with_capacity(2 * terms.len());
                for (a, w) in terms {
                    atoms.push((w.clone(), a / 2.0));
                    atoms.push((w.iter().map(|v| -v).collect(), a / 2.0));
                }
                SpectralMeasure::new(d, atoms, vec![]).ok()
            }
            Kind::Constant { value } => SpectralMeasure::new(d, vec![(vec![0.0; d], *value)], vec![]).ok(),
            Kind::Sum(a, b) => a.spectral_measure()?.add(&b.spectral_measure()?).ok(),
            Kind::Scale(s, k) => Some(k.spectral_measure()?.scaled(*s)),
            Kind::Shift(c, k) => k
                .spectral_measure()?
                .add(&SpectralMeasure::new(d, vec![(vec![0.0; d], *c)], vec![]).ok()?)
                .ok(),
            Kind::DerivativeSlice { base, p } => {
                Some(base.spectral_measure()?.times_squared_monomial(p))
            }
            _ => None,
        }
    }

    /// Support of the spectral measure, for stationary kernels.
    pub fn spectral_support(&self) -> Option<SpectralSupport> {
        match &*self.kind {
            Kind::Gaussian { .. } | Kind::Laplace { .. } | Kind::InverseMultiquadric { .. } => {
                Some(SpectralSupport::Full)
            }
            Kind::Sum(a, b) => Some(a.spectral_support()?.union(b.spectral_support()?)),
            Kind::Scale(_, k) => k.spectral_support(),
            Kind::Shift(c, k) if *c > 0.0 => Some(
                k.spectral_support()?
                    .union(SpectralSupport::Atomic(vec![vec![0.0; self.dim]])),
            ),
            Kind::Shift(_, k) => k.spectral_support(),
            Kind::DerivativeSlice { base, p } => match base.spectral_support()? {
                SpectralSupport::Atomic(pts) => Some(SpectralSupport::Atomic(
                    pts.into_iter()
                        .filter(|xi| p.add(p).monomial(xi) != 0.0)
                        .collect(),
                )),
                other => Some(other),
            },
            _ => self.spectral_measure().map(|m| m.support()),
        }
    }
}

fn diff(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn dot_diff(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    w.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| w * (a - b)).sum()
}

/// n-th derivative of cos at t.
fn cos_deriv(t: f64, n: u32) -> f64 {
    match n % 4 {
        0 => t.cos(),
        1 => -t.sin(),
        2 => -t.cos(),
        _ => t.sin(),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `∂^α_u F(‖u‖²)` given `F^{(k)}(‖u‖²)` for every `k`.
///
/// Per coordinate, `d^n/du^n G(u²) = Σ_j n!/(j!(n-2j)!) (2u)^{n-2j} G^{(n-j)}(u²)`,
/// and the coordinates combine by adding the orders of the outer derivative.
fn radial_partial(u: &[f64], alpha: &[u32], outer: impl Fn(u32) -> f64) -> f64 {
    if alpha.iter().all(|&a| a == 0) {
        return outer(0);
    }
    // enumerate j_i ∈ [0, α_i/2] for every coordinate
    let mut js = vec![0u32; alpha.len()];
    let mut total = 0.0;
    loop {
        let mut coef = 1.0;
        let mut k = 0;
        for ((&n, &j), &ui) in alpha.iter().zip(&js).zip(u) {
            let free = n - 2 * j;
            coef *= factorial(n) / (factorial(j) * factorial(free)) * (2.0 * ui).powi(free as i32);
            k += n - j;
        }
        if coef != 0.0 {
            total += coef * outer(k);
        }
        let mut axis = 0;
        loop {
            if axis == js.len() {
                return total;
            }
            if js[axis] < alpha[axis] / 2 {
                js[axis] += 1;
                break;
            }
            js[axis] = 0;
            axis += 1;
        }
    }
}

/// n-th derivative of `sinc(t) = sin t / t`.
fn sinc_deriv(t: f64, n: u32) -> f64 {
    if t.abs() < 6.0 {
        sinc_deriv_series(t, n)
    } else {
        sinc_deriv_leibniz(t, n)
    }
}

/// Termwise derivative of `Σ_k (-1)^k t^{2k} / (2k+1)!`; the k-th term becomes
/// `(-1)^k t^{2k-n} / ((2k+1) (2k-n)!)`.
fn sinc_deriv_series(t: f64, n: u32) -> f64 {
    let mut total = 0.0;
    let mut k = n.div_ceil(2);
    loop {
        let m = 2 * k;
        let sign = crate::measure::sign_pow(k);
        let term = sign * t.powi((m - n) as i32) / ((m + 1) as f64 * factorial(m - n));
        total += term;
        if (m > n + 2 * t.abs() as u32 + 4 && term.abs() <= 1e-17 * total.abs()) || m > n + 300 {
            return total;
        }
        k += 1;
    }
}

/// Leibniz rule on `sin(t) · t^{-1}`.
fn sinc_deriv_leibniz(t: f64, n: u32) -> f64 {
    (0..=n)
        .map(|j| {
            let binom = factorial(n) / (factorial(j) * factorial(n - j));
            let inv = crate::measure::sign_pow(j) * factorial(j) / t.powi(j as i32 + 1);
            binom * cos_deriv(t, n - j + 3) * inv
        })
        .sum()
}

/// Central finite-difference approximation of `∂^(p,q) k(x, y)` using only kernel
/// evaluations. Truncation error is `O(h²)`.
pub fn kernel_deriv_fd(
    k: &Kernel,
    p: &MultiIndex,
    q: &MultiIndex,
    x: &[f64],
    y: &[f64],
    h: f64,
) -> Result<Complex64> {
    if !(h > 0.0) || !h.is_finite() {
        return invalid(format!("finite-difference step must be positive, got {h}"));
    }
    k.check_points(x, y)?;
    if p.dim() != k.dim || q.dim() != k.dim {
        return invalid("multi-index dimension does not match kernel");
    }
    Ok(fd_stencil(k, p, q, x, y, h))
}

/// Default step for a mixed partial of total order `n` around points of
/// magnitude `scale`: `max(1e-4, ((1 + scale) ε)^{1/(n+4)})`, balancing the `O(h⁴)`
/// Richardson truncation against rounding of the shifted arguments.
pub fn default_fd_step(n: u32, scale: f64) -> f64 {
    ((1.0 + scale) * f64::EPSILON).powf(1.0 / (n as f64 + 4.0)).max(1e-4)
}

/// Finite differences with one Richardson level, `(4 D(h/2) - D(h)) / 3`, at the
/// default step. Error `O(h⁴)`.
pub fn kernel_deriv_fd_richardson(
    k: &Kernel,
    p: &MultiIndex,
    q: &MultiIndex,
    x: &[f64],
    y: &[f64],
) -> Result<Complex64> {
    kernel_deriv_fd(k, p, q, x, y, 1.0)?;
    Ok(fd_richardson(k, p, q, x, y))
}

fn fd_richardson(k: &Kernel, p: &MultiIndex, q: &MultiIndex, x: &[f64], y: &[f64]) -> Complex64 {
    let n = p.order() + q.order();
    if n == 0 {
        return k.eval_unchecked(x, y);
    }
    let scale = x.iter().chain(y).fold(0.0f64, |m, v| m.max(v.abs()));
    let h = default_fd_step(n, scale);
    let coarse = fd_stencil(k, p, q, x, y, h);
    let fine = fd_stencil(k, p, q, x, y, h / 2.0);
    (fine * 4.0 - coarse) / 3.0
}

fn fd_stencil(k: &Kernel, p: &MultiIndex, q: &MultiIndex, x: &[f64], y: &[f64], h: f64) -> Complex64 {
    let d = x.len();
    // one axis per coordinate of (x, y); order n uses offsets (n/2 - j) h with
    // weights (-1)^j C(n, j)
    let orders: Vec<u32> = p.entries().iter().chain(q.entries()).copied().collect();
    let active: Vec<usize> = (0..2 * d).filter(|&i| orders[i] > 0).collect();
    if active.is_empty() {
        return k.eval_unchecked(x, y);
    }
    let mut idx = vec![0u32; active.len()];
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut weight = 1.0;
        for (slot, &axis) in active.iter().enumerate() {
            let n = orders[axis];
            let j = idx[slot];
            let offset = (n as f64 / 2.0 - j as f64) * h;
            weight *= crate::measure::sign_pow(j) * factorial(n) / (factorial(j) * factorial(n - j));
            if axis < d {
                xs[axis] = x[axis] + offset;
            } else {
                ys[axis - d] = y[axis - d] + offset;
            }
        }
        total += k.eval_unchecked(&xs, &ys) * weight;
        let mut slot = 0;
        loop {
            if slot == idx.len() {
                let n = orders.iter().sum::<u32>();
                return total / h.powi(n as i32);
            }
            if idx[slot] < orders[active[slot]] {
                idx[slot] += 1;
                break;
            }
            idx[slot] = 0;
            slot += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// One term `a cos(⟨ω, h⟩)` of a cosine series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CosineTerm {
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "unit_frequency")]
    pub omega: Frequency,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn unit_frequency() -> Frequency {
    Frequency::Scalar(1.0)
}

fn default_terms() -> Vec<CosineTerm> {
    vec![CosineTerm {
        a: 1.0,
        omega: Frequency::Scalar(1.0),
    }]
}

/// Parameters accepted in the `"params"` object of a kernel description. Unused
/// fields are ignored by families that do not need them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    #[serde(default = "one_usize")]
    pub dim: usize,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "half")]
    pub beta: f64,
    #[serde(default = "one")]
    pub value: f64,
    #[serde(default = "default_terms")]
    pub terms: Vec<CosineTerm>,
}

fn one_usize() -> usize {
    1
}

impl Default for KernelParams {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelTransform {
    Shift(f64),
    Center(GeneralizedMeasure),
}

/// JSON description of a kernel:
/// `{"family": "gaussian", "params": {...}, "transform": {"shift": c} | {"center": <measure>}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: String,
    #[serde(default)]
    pub params: KernelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<KernelTransform>,
}

impl KernelSpec {
    pub fn family(name: &str) -> KernelSpec {
        KernelSpec {
            family: name.to_string(),
            params: KernelParams::default(),
            transform: None,
        }
    }

    pub fn build(&self) -> Result<Kernel> {
        let p = &self.params;
        let base = match self.family.as_str() {
            "gaussian" => Kernel::gaussian(p.dim, p.sigma, p.amplitude)?,
            "laplace" => Kernel::laplace(p.dim, p.sigma, p.amplitude)?,
            "imq" => Kernel::inverse_multiquadric(p.dim, p.c, p.beta, p.amplitude)?,
            "sinc" => Kernel::sinc(),
            "cosine" => Kernel::cosine_series(
                p.terms
                    .iter()
                    .map(|t| {
                        let w = match &t.omega {
                            Frequency::Scalar(w) => vec![*w],
                            Frequency::Vector(w) => w.clone(),
                        };
                        (t.a, w)
                    })
                    .collect(),
            )?,
            "constant" => Kernel::constant(p.dim, p.value)?,
            "brownian" => Kernel::brownian(),
            other => return invalid(format!("unknown kernel family '{other}'")),
        };
        match &self.transform {
            None => Ok(base),
            Some(KernelTransform::Shift(c)) => base.shift_constant(*c),
            Some(KernelTransform::Center(nu0)) => base.center(nu0),
        }
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("kernel JSON: {e}")))
    }
}
