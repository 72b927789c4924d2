//! Conditionally positive definite kernels on the line.
//!
//! A stationary c.p.d. kernel `ψ(x - y)` has a generalized spectral representation
//! `ψ(h) = ∫ (cos hξ - 1) / ξ² dχ(ξ) + P0(h)` with `χ` symmetric, free of an atom at
//! the origin, and `P0` an even polynomial of degree at most two. On zero-mass
//! measures this gives `Σ μ_i μ̄_j ψ(x_i - x_j) = ∫ |μ̂(ξ)|² / ξ² dχ(ξ) + |C_μ|²`
//! with `|C_μ|² = -2 c2 |Σ μ_i x_i|²`.
//!
//! Families: `-|h|` with `χ = dξ / π` (from `∫ (1 - cos hξ) / ξ² dξ = π|h|`), and
//! `-|h|^α`, `0 < α < 2`, with `dχ = |ξ|^{1-α} dξ / C_α`,
//! `C_α = π / (Γ(1 + α) sin(πα/2))`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::embedding::pairwise_sum;
use crate::error::{invalid, Error, Result};
use crate::measure::GeneralizedMeasure;
use crate::quadrature::{integrate, Budget, QuadratureConfig};

/// Evaluation cap for one spectral form.
pub const CPD_BUDGET: usize = 1 << 22;

/// Relative size of the unresolved tail at which the frequency sweep stops.
pub const TAIL_REL_TOL: f64 = 1e-6;

type Additive = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `ψ(x - y) + c0 + c2 (x - y)² + g(x) + g(y)` with `ψ(h) = -|h|^α`.
#[derive(Clone)]
pub struct CpdKernel {
    alpha: f64,
    c0: f64,
    c2: f64,
    additive: Option<Additive>,
}

impl fmt::Debug for CpdKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CpdKernel")
            .field("alpha", &self.alpha)
            .field("c0", &self.c0)
            .field("c2", &self.c2)
            .field("additive", &self.additive.is_some())
            .finish()
    }
}

impl CpdKernel {
    /// `-|x - y|`.
    pub fn neg_abs() -> CpdKernel {
        CpdKernel {
            alpha: 1.0,
            c0: 0.0,
            c2: 0.0,
            additive: None,
        }
    }

    /// `-|x - y|^α` for `0 < α < 2`.
    pub fn power(alpha: f64) -> Result<CpdKernel> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return invalid(format!("power exponent must lie in (0, 2), got {alpha}"));
        }
        Ok(CpdKernel {
            alpha,
            ..CpdKernel::neg_abs()
        })
    }

    /// Adds the even polynomial `c0 + c2 h²`; `c2 ≤ 0` keeps the form conditionally
    /// positive.
    pub fn with_polynomial(&self, c0: f64, c2: f64) -> Result<CpdKernel> {
        if !c0.is_finite() || !c2.is_finite() || c2 > 0.0 {
            return invalid(format!("polynomial part needs finite c0 and c2 ≤ 0, got c2 = {c2}"));
        }
        Ok(CpdKernel {
            c0: self.c0 + c0,
            c2: self.c2 + c2,
            ..self.clone()
        })
    }

    /// Adds `g(x) + g(y)`, which leaves the form on zero-mass measures unchanged.
    pub fn with_additive(&self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> CpdKernel {
        let g: Additive = match &self.additive {
            None => Arc::new(g),
            Some(prev) => {
                let prev = prev.clone();
                Arc::new(move |x| prev(x) + g(x))
            }
        };
        CpdKernel {
            additive: Some(g),
            ..self.clone()
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let h = x - y;
        let mut v = -h.abs().powf(self.alpha) + self.c0 + self.c2 * h * h;
        if let Some(g) = &self.additive {
            v += g(x) + g(y);
        }
        v
    }

    /// Density of `χ` at `ξ`.
    pub fn chi_density(&self, xi: f64) -> f64 {
        if self.alpha == 1.0 {
            1.0 / PI
        } else {
            xi.abs().powf(1.0 - self.alpha) / self.chi_constant()
        }
    }

    fn chi_constant(&self) -> f64 {
        let a = self.alpha;
        PI / (gamma(1.0 + a) * (PI * a / 2.0).sin())
    }
}

fn check_zero_mass(mu: &GeneralizedMeasure) -> Result<()> {
    if mu.dim() != 1 {
        return Err(Error::UnsupportedConfiguration(format!(
            "conditionally positive definite kernels are implemented on the line, got dimension {}",
            mu.dim()
        )));
    }
    if !mu.is_measure() {
        return invalid("derivative atoms are not allowed in the conditionally positive form");
    }
    let size: f64 = mu.atoms().iter().map(|a| a.weight.norm()).sum();
    let mass = mu.total_mass().norm();
    if mass > 1e-12 * size.max(1.0) {
        return invalid(format!("measure must have zero total mass, got {mass:e}"));
    }
    Ok(())
}

fn real_form(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > 1e-10 * (1.0 + z.norm()) {
        return Err(Error::NumericalInconsistency(format!(
            "{what} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn form_with(mu: &GeneralizedMeasure, f: impl Fn(f64, f64) -> f64) -> Complex64 {
    let atoms = mu.atoms();
    let rows: Vec<Complex64> = atoms
        .iter()
        .map(|a| {
            let row: Vec<Complex64> = atoms
                .iter()
                .map(|b| a.weight * b.weight.conj() * f(a.location[0], b.location[0]))
                .collect();
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&rows)
}

/// `Re Σ μ_i μ̄_j k(x_i, x_j)` on a zero-mass measure.
pub fn cpd_quadratic_form(kc: &CpdKernel, mu: &GeneralizedMeasure) -> Result<f64> {
    check_zero_mass(mu)?;
    real_form(form_with(mu, |x, y| kc.eval(x, y)), "quadratic form")
}

/// `μ̂(ξ)` for a zero-mass measure, written as `Σ μ_j (e^{-i x_j ξ} - 1)` to keep
/// relative accuracy near `ξ = 0`.
fn ft_zero_mass(mu: &GeneralizedMeasure, xi: f64) -> Complex64 {
    mu.atoms()
        .iter()
        .map(|a| {
            let t = a.location[0] * xi;
            let s = (0.5 * t).sin();
            a.weight * Complex64::new(-2.0 * s * s, -t.sin())
        })
        .sum()
}

/// `∫ |μ̂(ξ)|² / ξ² dχ(ξ) + |C_μ|²` by quadrature over frequency.
///
/// `[0, 1]` is integrated directly (after `ξ = t^m` to tame `ξ^{1-α}`), then panels
/// `[R, 2R]` are added until the unresolved tail is below `TAIL_REL_TOL` of the
/// total. The tail is estimated by the mean of `|μ̂|²`, which is `Σ |μ_i|²`, and its
/// oscillating remainder is bounded pairwise.
pub fn cpd_spectral_form(kc: &CpdKernel, mu: &GeneralizedMeasure) -> Result<f64> {
    check_zero_mass(mu)?;
    let atoms = mu.atoms();
    let moment: Complex64 = atoms.iter().map(|a| a.weight * a.location[0]).sum();
    let poly = -2.0 * kc.c2 * moment.norm_sqr();
    if atoms.len() < 2 {
        return Ok(poly);
    }

    let alpha = kc.alpha;
    let c_alpha = if alpha == 1.0 { PI } else { kc.chi_constant() };
    let integrand = |xi: f64| -> f64 {
        let f = ft_zero_mass(mu, xi);
        // symmetric χ: both half-lines
        2.0 * f.norm_sqr() / (xi * xi) * kc.chi_density(xi)
    };
    let budget = Budget::new(CPD_BUDGET);
    let cfg = QuadratureConfig {
        budget: CPD_BUDGET,
        ..QuadratureConfig::default()
    };

    let m = if alpha > 1.0 { (2.0 / (2.0 - alpha)).ceil() } else { 1.0 };
    let mut total = integrate(
        |t: f64| {
            let xi = t.powf(m);
            Ok(integrand(xi) * m * t.powf(m - 1.0))
        },
        0.0,
        1.0,
        &cfg,
        &budget,
    )?;

    let diag: f64 = atoms.iter().map(|a| a.weight.norm_sqr()).sum();
    let mut pairs = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        for b in &atoms[i + 1..] {
            // each unordered pair appears twice in |μ̂|²
            pairs.push((2.0 * (a.weight * b.weight.conj()).norm(), (a.location[0] - b.location[0]).abs()));
        }
    }
    let spread = pairs.iter().fold(0.0f64, |m, &(_, a)| m.max(a));

    let mut r = 1.0f64;
    loop {
        // ∫_R^∞ ξ^{-1-α} dξ = R^{-α} / α, both half-lines
        let power_tail = 2.0 * r.powf(-alpha) / (alpha * c_alpha);
        let estimate = diag * power_tail;
        let oscillation: f64 = pairs
            .iter()
            .map(|&(w, a)| {
                let smooth = power_tail;
                let by_parts = 2.0 * 2.0 * r.powf(-1.0 - alpha) / (a * c_alpha);
                w * smooth.min(by_parts)
            })
            .sum();
        if oscillation < TAIL_REL_TOL * (total + estimate).abs() {
            return Ok(total + estimate + poly);
        }
        let hi = 2.0 * r;
        let panels = ((hi - r) * spread / PI).ceil().max(8.0) as usize;
        let local = QuadratureConfig {
            initial_panels: panels,
            abs_tol: 1e-3 * TAIL_REL_TOL * total.abs(),
            ..cfg
        };
        total += integrate(|xi: f64| Ok(integrand(xi)), r, hi, &local, &budget)?;
        r = hi;
    }
}

/// Outcome of comparing the Brownian covariance `min(|x|, |y|)` with `-|x - y|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianReport {
    /// Fitted `c` in `min-form = c · (-|h|)-form`, if any probe had a nonzero form.
    pub ratio: Option<f64>,
    /// Largest `|min-form - c · (-|h|)-form|` over the remaining probes.
    pub max_residual: f64,
    pub probes: usize,
    pub passed: bool,
    pub rows: Vec<BrownianRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianRow {
    pub brownian_form: f64,
    pub neg_abs_form: f64,
}

/// Fits the constant on the first probe with a nonzero form and checks it on the
/// others. Every probe must be zero-mass with all atoms on one side of the origin.
pub fn brownian_correspondence_check(probes: &[GeneralizedMeasure], tol: f64) -> Result<BrownianReport> {
    if probes.is_empty() {
        return invalid("need at least one probe measure");
    }
    let kc = CpdKernel::neg_abs();
    let mut rows = Vec::with_capacity(probes.len());
    for mu in probes {
        check_zero_mass(mu)?;
        let pos = mu.atoms().iter().any(|a| a.location[0] > 0.0);
        let neg = mu.atoms().iter().any(|a| a.location[0] < 0.0);
        if pos && neg {
            return Err(Error::UnsupportedConfiguration(
                "atoms on both sides of the origin have no fixed correspondence".into(),
            ));
        }
        let brownian = real_form(form_with(mu, |x, y| x.abs().min(y.abs())), "Brownian form")?;
        rows.push(BrownianRow {
            brownian_form: brownian,
            neg_abs_form: cpd_quadratic_form(&kc, mu)?,
        });
    }
    let fit = rows.iter().position(|r| r.neg_abs_form.abs() > 0.0);
    let ratio = fit.map(|i| rows[i].brownian_form / rows[i].neg_abs_form);
    let c = ratio.unwrap_or(0.0);
    let max_residual = rows
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != fit)
        .map(|(_, r)| (r.brownian_form - c * r.neg_abs_form).abs())
        .fold(0.0, f64::max);
    Ok(BrownianReport {
        ratio,
        max_residual,
        probes: probes.len(),
        passed: max_residual <= tol,
        rows,
    })
}
