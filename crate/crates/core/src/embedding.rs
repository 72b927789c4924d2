//! RKHS geometry of atomic generalized measures.
//!
//! An atom `w ∂^p δ_x` embeds as `w̄ (-1)^{|p|} ∂^(0,p) k(·, x)`, so the pairing of
//! two atoms is `w_a w̄_b (-1)^{|p|+|q|} ∂^(q,p) k(y, x)`. Inner products are
//! linear in the first argument and antilinear in the second.
//!
//! Gram sums are evaluated row by row in parallel and reduced pairwise in the
//! canonical atom order, so results do not depend on the thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::Kernel;
use crate::measure::{sign_pow, Atom, GeneralizedMeasure, MultiIndex};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance on the imaginary part and on negativity of `⟨D, D⟩`, relative to scale.
pub const SELF_INNER_TOL: f64 = 1e-10;

/// Pairwise (tree) summation.
pub(crate) fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().fold(ZERO, |acc, &z| acc + z);
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn check_atom(k: &Kernel, a: &Atom) -> Result<()> {
    if a.dim() != k.dim() {
        return invalid(format!(
            "atom of dimension {} for a kernel of dimension {}",
            a.dim(),
            k.dim()
        ));
    }
    k.smoothness().check(a.order.order())
}

fn check_measure(k: &Kernel, d: &GeneralizedMeasure) -> Result<()> {
    if d.dim() != k.dim() {
        return invalid(format!(
            "measure of dimension {} for a kernel of dimension {}",
            d.dim(),
            k.dim()
        ));
    }
    k.smoothness().check(d.max_order())
}

fn check_point(k: &Kernel, y: &[f64]) -> Result<()> {
    if y.len() != k.dim() {
        return invalid(format!("point of dimension {} for a kernel of dimension {}", y.len(), k.dim()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return invalid("point coordinates must be finite");
    }
    Ok(())
}

fn gram_entry_unchecked(k: &Kernel, a: &Atom, b: &Atom) -> Complex64 {
    let sign = sign_pow(a.order.order() + b.order.order());
    a.weight * b.weight.conj() * sign * k.deriv_unchecked(&b.order, &a.order, &b.location, &a.location)
}

/// `⟨Φ(a), Φ(b)⟩ = w_a w̄_b (-1)^{|p|+|q|} ∂^(q,p) k(y, x)` for `a = w_a ∂^p δ_x`,
/// `b = w_b ∂^q δ_y`.
pub fn gram_entry(k: &Kernel, a: &Atom, b: &Atom) -> Result<Complex64> {
    check_atom(k, a)?;
    check_atom(k, b)?;
    Ok(gram_entry_unchecked(k, a, b))
}

fn inner_unchecked(k: &Kernel, d: &[Atom], t: &[Atom]) -> Complex64 {
    let rows: Vec<Complex64> = d
        .par_iter()
        .map(|a| {
            let row: Vec<Complex64> = t.iter().map(|b| gram_entry_unchecked(k, a, b)).collect();
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&rows)
}

/// Under a centered kernel `⟨D, T⟩_{k0} = ⟨D - D(𝟙)ν0, T - T(𝟙)ν0⟩_k`. Pairing the
/// reduced measures under `k` avoids the cancellation inside every `k0` entry, and
/// `ν0` itself reduces to the zero measure exactly.
fn inner_measures(k: &Kernel, d: &GeneralizedMeasure, t: &GeneralizedMeasure) -> Result<Complex64> {
    if let Some((base, nu0)) = k.centering() {
        let one = Complex64::new(1.0, 0.0);
        let d0 = GeneralizedMeasure::linear_combine(&[(one, d), (-d.total_mass(), nu0)])?;
        let t0 = GeneralizedMeasure::linear_combine(&[(one, t), (-t.total_mass(), nu0)])?;
        return inner_measures(base, &d0, &t0);
    }
    Ok(inner_unchecked(k, d.atoms(), t.atoms()))
}

/// `⟨Φ(D), Φ(T)⟩_k`: Hermitian, linear in `D`, antilinear in `T`.
pub fn inner(k: &Kernel, d: &GeneralizedMeasure, t: &GeneralizedMeasure) -> Result<Complex64> {
    check_measure(k, d)?;
    check_measure(k, t)?;
    inner_measures(k, d, t)
}

/// `‖Φ(D)‖_k`.
///
/// Roundoff-level negative values of `⟨D, D⟩` are clamped to zero; anything larger,
/// or a non-negligible imaginary part, is reported as an inconsistency.
pub fn norm(k: &Kernel, d: &GeneralizedMeasure) -> Result<f64> {
    Ok(norm_sq(k, d)?.sqrt())
}

/// `‖Φ(D)‖²_k`, with the same checks as [`norm`].
pub fn norm_sq(k: &Kernel, d: &GeneralizedMeasure) -> Result<f64> {
    check_measure(k, d)?;
    let z = inner_measures(k, d, d)?;
    if z.im.abs() > SELF_INNER_TOL * (1.0 + z.norm()) {
        return Err(Error::NumericalInconsistency(format!(
            "self inner product has imaginary part {:e} (value {z})",
            z.im
        )));
    }
    if z.re >= 0.0 {
        return Ok(z.re);
    }
    // Cauchy–Schwarz bound on the magnitude of the summed terms
    let root: f64 = d
        .atoms()
        .iter()
        .map(|a| gram_entry_unchecked(k, a, a).norm().sqrt())
        .sum();
    let scale = 1.0 + root * root;
    if z.re >= -SELF_INNER_TOL * scale {
        Ok(0.0)
    } else {
        Err(Error::NumericalInconsistency(format!(
            "self inner product is negative: {:e} at scale {scale:e}",
            z.re
        )))
    }
}

/// `d_k(D, T) = ‖Φ(D) - Φ(T)‖_k`.
pub fn distance(k: &Kernel, d: &GeneralizedMeasure, t: &GeneralizedMeasure) -> Result<f64> {
    check_measure(k, d)?;
    check_measure(k, t)?;
    norm(k, &d.difference(t)?)
}

fn eval_deriv_unchecked(k: &Kernel, d: &GeneralizedMeasure, q: &MultiIndex, y: &[f64]) -> Complex64 {
    let terms: Vec<Complex64> = d
        .atoms()
        .iter()
        .map(|a| a.weight * sign_pow(a.order.order()) * k.deriv_unchecked(q, &a.order, y, &a.location))
        .collect();
    pairwise_sum(&terms)
}

/// `Φ(D)(y) = Σ w (-1)^{|p|} ∂^(0,p) k(y, x)`.
pub fn embed_eval(k: &Kernel, d: &GeneralizedMeasure, y: &[f64]) -> Result<Complex64> {
    check_measure(k, d)?;
    check_point(k, y)?;
    Ok(eval_deriv_unchecked(k, d, &MultiIndex::zero(k.dim()), y))
}

/// `∂^q Φ(D)(y) = Σ w (-1)^{|p|} ∂^(q,p) k(y, x)`; needs `|p| + |q| ≤ m` for every atom.
pub fn embed_eval_deriv(k: &Kernel, d: &GeneralizedMeasure, q: &MultiIndex, y: &[f64]) -> Result<Complex64> {
    check_measure(k, d)?;
    check_point(k, y)?;
    if q.dim() != k.dim() {
        return invalid("multi-index dimension does not match kernel");
    }
    k.smoothness().check(d.max_order() + q.order())?;
    Ok(eval_deriv_unchecked(k, d, q, y))
}

/// An RKHS function given implicitly as the embedding of a generalized measure.
#[derive(Clone, Debug)]
pub struct EmbeddedFunction {
    kernel: Kernel,
    source: GeneralizedMeasure,
}

impl EmbeddedFunction {
    pub fn new(kernel: Kernel, source: GeneralizedMeasure) -> Result<EmbeddedFunction> {
        check_measure(&kernel, &source)?;
        Ok(EmbeddedFunction { kernel, source })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn source(&self) -> &GeneralizedMeasure {
        &self.source
    }

    pub fn eval(&self, y: &[f64]) -> Result<Complex64> {
        embed_eval(&self.kernel, &self.source, y)
    }

    pub fn eval_deriv(&self, q: &MultiIndex, y: &[f64]) -> Result<Complex64> {
        embed_eval_deriv(&self.kernel, &self.source, q, y)
    }

    pub fn norm(&self) -> Result<f64> {
        norm(&self.kernel, &self.source)
    }

    /// `⟨self, other⟩_k`; both must share the kernel.
    pub fn inner(&self, other: &EmbeddedFunction) -> Result<Complex64> {
        inner(&self.kernel, &self.source, &other.source)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpdVerdict {
    PositiveDefinite,
    SemidefiniteDegenerate,
    /// A negative eigenvalue beyond tolerance: the kernel implementation is suspect.
    IndefiniteNumerical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpdDiagnostic {
    pub min_eigenvalue: f64,
    pub gram_size: usize,
    pub verdict: SpdVerdict,
}

/// Dense Hermitian Gram matrix `G_ij = ⟨Φ(a_i), Φ(a_j)⟩` of the given atoms.
pub fn gram_matrix(k: &Kernel, atoms: &[Atom]) -> Result<DMatrix<Complex64>> {
    for a in atoms {
        check_atom(k, a)?;
    }
    let n = atoms.len();
    let rows: Vec<Vec<Complex64>> = atoms
        .par_iter()
        .map(|a| atoms.iter().map(|b| gram_entry_unchecked(k, a, b)).collect())
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Smallest eigenvalue of the Gram matrix of the unit-weight atoms.
pub fn spd_check(k: &Kernel, atoms: &[Atom], tol: f64) -> Result<SpdDiagnostic> {
    if atoms.is_empty() {
        return invalid("spd check needs at least one atom");
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let unit: Vec<Atom> = atoms.iter().map(|a| a.with_weight(Complex64::new(1.0, 0.0))).collect();
    let g = gram_matrix(k, &unit)?;
    let hermitian = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigenvalues();
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let verdict = if min_eigenvalue > tol {
        SpdVerdict::PositiveDefinite
    } else if min_eigenvalue >= -tol {
        SpdVerdict::SemidefiniteDegenerate
    } else {
        SpdVerdict::IndefiniteNumerical
    };
    Ok(SpdDiagnostic {
        min_eigenvalue,
        gram_size: atoms.len(),
        verdict,
    })
}
