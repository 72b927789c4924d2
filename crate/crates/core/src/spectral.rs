//! Spectral view of stationary kernels.
//!
//! A stationary kernel `k(x, y) = ψ(x - y)` is described by its spectral measure
//! `Λ`, with `ψ(h) = ∫ e^{-i⟨h,ξ⟩} dΛ(ξ)`. For an atomic generalized measure `D`
//! the squared RKHS norm is `‖D‖²_k = ∫ |D̂(ξ)|² dΛ(ξ)` where
//! `D̂(ξ) = D(e^{-i⟨·,ξ⟩})` (see [`ft_gm`]). This identity holds for the
//! symmetric `Λ` of real-valued kernels, which covers the whole catalog.
//!
//! Whether a stationary kernel is characteristic depends only on the support of
//! `Λ`; [`diagnose_characteristic`] turns a support description into a verdict, and
//! [`periodic_null_distribution`] / [`sinc_null_measure`] build explicit nonzero
//! distributions that a non-characteristic kernel cannot see.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::{Atom, AxisBox, GeneralizedMeasure, MultiIndex};
use crate::quadrature::{integrate_box, Budget, QuadratureConfig};

pub type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Shape of a spectral density, before scaling.
#[derive(Clone)]
pub enum DensityFamily {
    /// `(σ / (2√π))^d exp(-σ² ‖ξ‖² / 4)`: the unit-amplitude Gaussian kernel's density.
    Gaussian { sigma: f64 },
    /// Constant 1 on the domain.
    Uniform,
    /// Any nonnegative function.
    Custom(DensityFn),
}

impl fmt::Debug for DensityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityFamily::Gaussian { sigma } => write!(f, "Gaussian {{ sigma: {sigma} }}"),
            DensityFamily::Uniform => write!(f, "Uniform"),
            DensityFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// `scale · family(ξ) · ξ^monomial` restricted to `domain`.
#[derive(Clone, Debug)]
pub struct SpectralDensity {
    pub family: DensityFamily,
    pub domain: AxisBox,
    pub scale: f64,
    pub monomial: Option<MultiIndex>,
}

impl SpectralDensity {
    pub fn new(family: DensityFamily, domain: AxisBox, scale: f64) -> SpectralDensity {
        SpectralDensity {
            family,
            domain,
            scale,
            monomial: None,
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let base = match &self.family {
            DensityFamily::Gaussian { sigma } => {
                let d = xi.len() as i32;
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                (sigma / (2.0 * PI.sqrt())).powi(d) * (-sigma * sigma * r2 / 4.0).exp()
            }
            DensityFamily::Uniform => 1.0,
            DensityFamily::Custom(f) => f(xi),
        };
        let mono = self.monomial.as_ref().map_or(1.0, |m| m.monomial(xi));
        self.scale * base * mono
    }
}

/// A positive finite measure on `R^d`: nonnegative atoms plus densities on boxes.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    dim: usize,
    atoms: Vec<(Vec<f64>, f64)>,
    densities: Vec<SpectralDensity>,
}

impl SpectralMeasure {
    pub fn new(
        dim: usize,
        atoms: Vec<(Vec<f64>, f64)>,
        densities: Vec<SpectralDensity>,
    ) -> Result<SpectralMeasure> {
        if dim == 0 {
            return invalid("spectral measure dimension must be positive");
        }
        for (xi, w) in &atoms {
            if xi.len() != dim || xi.iter().any(|v| !v.is_finite()) {
                return invalid("spectral atom location must be finite and match the dimension");
            }
            if !(*w >= 0.0) || !w.is_finite() {
                return invalid(format!("spectral atom weight must be nonnegative, got {w}"));
            }
        }
        for dens in &densities {
            if dens.domain.dim() != dim || !dens.domain.is_finite() {
                return invalid("density domain must be a bounded box of matching dimension");
            }
            if !(dens.scale >= 0.0) || !dens.scale.is_finite() {
                return invalid("density scale must be nonnegative");
            }
        }
        Ok(SpectralMeasure {
            dim,
            atoms,
            densities,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    pub fn densities(&self) -> &[SpectralDensity] {
        &self.densities
    }

    pub fn add(&self, other: &SpectralMeasure) -> Result<SpectralMeasure> {
        if self.dim != other.dim {
            return invalid("cannot add spectral measures of different dimensions");
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut densities = self.densities.clone();
        densities.extend(other.densities.iter().cloned());
        SpectralMeasure::new(self.dim, atoms, densities)
    }

    pub fn scaled(&self, s: f64) -> SpectralMeasure {
        SpectralMeasure {
            dim: self.dim,
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w * s)).collect(),
            densities: self
                .densities
                .iter()
                .map(|d| SpectralDensity {
                    scale: d.scale * s,
                    ..d.clone()
                })
                .collect(),
        }
    }

    /// `ξ^{2p} Λ`, the spectral measure of the derived kernel `∂^(p,p) k`.
    pub fn times_squared_monomial(&self, p: &MultiIndex) -> SpectralMeasure {
        let two_p = p.add(p);
        SpectralMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|(x, w)| (x.clone(), w * two_p.monomial(x)))
                .collect(),
            densities: self
                .densities
                .iter()
                .map(|d| SpectralDensity {
                    monomial: Some(match &d.monomial {
                        Some(m) => m.add(&two_p),
                        None => two_p.clone(),
                    }),
                    ..d.clone()
                })
                .collect(),
        }
    }

    /// `Λ(R^d) = ψ(0)`.
    pub fn total_mass(&self) -> Result<f64> {
        let cfg = QuadratureConfig::default();
        let mut total: f64 = self.atoms.iter().map(|(_, w)| w).sum();
        for dens in &self.densities {
            let budget = Budget::new(cfg.budget);
            total += integrate_box(&|xi: &[f64]| Ok(dens.eval(xi)), &dens.domain, &cfg, &budget)?;
        }
        Ok(total)
    }

    /// Support, taking each density to be positive on the interior of its box.
    pub fn support(&self) -> SpectralSupport {
        let mut support = SpectralSupport::Atomic(
            self.atoms
                .iter()
                .filter(|(_, w)| *w > 0.0)
                .map(|(x, _)| x.clone())
                .collect(),
        );
        for dens in &self.densities {
            if dens.scale > 0.0 {
                support = support.union(SpectralSupport::Boxes(vec![dens.domain.clone()]));
            }
        }
        support
    }
}

/// `D̂(ξ) = D(e^{-i⟨·,ξ⟩}) = Σ w · i^{|p|} · ξ^p · e^{-i⟨x,ξ⟩}`.
///
/// Each atom `w ∂^p δ_x` contributes `w (-1)^{|p|} ∂^p_x e^{-i⟨x,ξ⟩}`, and
/// `(-1)^{|p|} (-i)^{|p|} = i^{|p|}`.
pub fn ft_gm(d: &GeneralizedMeasure, xi: &[f64]) -> Result<Complex64> {
    if xi.len() != d.dim() {
        return invalid(format!(
            "frequency of dimension {} for a measure of dimension {}",
            xi.len(),
            d.dim()
        ));
    }
    Ok(ft_unchecked(d.atoms(), xi))
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn ft_unchecked(atoms: &[Atom], xi: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in atoms {
        let phase: f64 = a.location.iter().zip(xi).map(|(x, s)| x * s).sum();
        let e = Complex64::from_polar(1.0, -phase);
        let n = a.order.order();
        let term = if n == 0 {
            a.weight * e
        } else {
            a.weight * I_POWERS[(n % 4) as usize] * a.order.monomial(xi) * e
        };
        acc += term;
    }
    acc
}

/// `∫ |D̂(ξ)|² dΛ(ξ)`, with densities integrated by adaptive Gauss–Legendre.
pub fn spectral_norm_sq(lambda: &SpectralMeasure, d: &GeneralizedMeasure) -> Result<f64> {
    spectral_norm_sq_with(lambda, d, &QuadratureConfig::default())
}

pub fn spectral_norm_sq_with(
    lambda: &SpectralMeasure,
    d: &GeneralizedMeasure,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if lambda.dim() != d.dim() {
        return invalid("spectral measure and generalized measure dimensions differ");
    }
    let atoms = d.atoms();
    let mut total = 0.0;
    for (xi, w) in lambda.atoms() {
        total += w * ft_unchecked(atoms, xi).norm_sqr();
    }
    for dens in lambda.densities() {
        // absolute floor: |D̂|² ≤ S² with S = Σ |w| (1 + R)^{|p|} on the box
        let reach = dens
            .domain
            .bounds()
            .iter()
            .fold(0.0f64, |m, (lo, hi)| m.max(lo.abs()).max(hi.abs()));
        let s: f64 = atoms
            .iter()
            .map(|a| a.weight.norm() * (1.0 + reach).powi(a.order.order() as i32))
            .sum();
        let budget = Budget::new(cfg.budget);
        let mass = integrate_box(&|xi: &[f64]| Ok(dens.eval(xi)), &dens.domain, cfg, &budget)?;
        let local = QuadratureConfig {
            abs_tol: (1e-15 * s * s * mass).max(cfg.abs_tol),
            ..*cfg
        };
        let budget = Budget::new(cfg.budget);
        total += integrate_box(
            &|xi: &[f64]| {
                let rho = dens.eval(xi);
                if rho < 0.0 {
                    return invalid(format!("negative spectral density {rho} at {xi:?}"));
                }
                Ok(ft_unchecked(atoms, xi).norm_sqr() * rho)
            },
            &dens.domain,
            &local,
            &budget,
        )?;
    }
    Ok(total)
}

/// Description of the support of a spectral measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralSupport {
    /// All of `R^d`.
    Full,
    /// A finite union of closed boxes with nonempty interior (bounds may be infinite).
    Boxes(Vec<AxisBox>),
    /// A finite set of points.
    Atomic(Vec<Vec<f64>>),
}

impl SpectralSupport {
    pub fn union(self, other: SpectralSupport) -> SpectralSupport {
        use SpectralSupport::*;
        match (self, other) {
            (Full, _) | (_, Full) => Full,
            (Boxes(mut a), Boxes(b)) => {
                a.extend(b);
                Boxes(a)
            }
            // points do not change interior or full coverage
            (Boxes(a), Atomic(_)) | (Atomic(_), Boxes(a)) => Boxes(a),
            (Atomic(mut a), Atomic(b)) => {
                for p in b {
                    if !a.contains(&p) {
                        a.push(p);
                    }
                }
                Atomic(a)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharacteristicClass {
    /// Characteristic to all integrable distributions of the kernel's order.
    CharacteristicToDl1,
    /// Characteristic to compactly supported distributions, but not to all
    /// integrable ones.
    CharacteristicToCompactOnly,
    /// Some nonzero compactly supported distribution has zero norm.
    NotCharacteristicToCompact,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicVerdict {
    pub class: CharacteristicClass,
    /// The rule that licensed the verdict.
    pub rule: String,
    pub support: String,
    /// `M` in `#{s : |s| ≤ r} ≤ M r`, for atomic supports on the line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_constant: Option<f64>,
    /// Smallest radius from which the growth bound is asserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_from_radius: Option<f64>,
    /// Whether the support is known to be a proper subset of `R^d`.
    pub not_characteristic_to_dl1: bool,
}

/// Smallest `M` with `#{s : |s| ≤ r} ≤ M r` for every radius `r ≥ r_min`, where
/// `r_min` is the smallest positive atom radius (or 1 if every atom sits at the
/// origin). Returns `(M, r_min)`.
pub fn growth_constant(points: &[Vec<f64>]) -> (f64, f64) {
    let mut radii: Vec<f64> = points
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    radii.sort_by(f64::total_cmp);
    let Some(r_min) = radii.iter().copied().find(|&r| r > 0.0) else {
        return (radii.len() as f64, 1.0);
    };
    let mut m = 0.0f64;
    for (i, &r) in radii.iter().enumerate() {
        if r <= 0.0 {
            continue;
        }
        // count including ties at the same radius
        let last_tie = i + radii[i..].iter().take_while(|&&s| s == r).count();
        m = m.max(last_tie as f64 / r);
    }
    (m, r_min)
}

fn boxes_cover_space(boxes: &[AxisBox], dim: usize) -> Result<bool> {
    // coverage by closed boxes is constant on each cell of the endpoint grid, so
    // testing one point per cell (and per cell boundary) is exact
    let mut probes: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut cells = 1usize;
    for axis in 0..dim {
        let mut ends: Vec<f64> = boxes
            .iter()
            .flat_map(|b| [b.bounds()[axis].0, b.bounds()[axis].1])
            .filter(|v| v.is_finite())
            .collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        let mut axis_probes = Vec::with_capacity(2 * ends.len() + 1);
        match (ends.first(), ends.last()) {
            (Some(&lo), Some(&hi)) => {
                axis_probes.push(lo - 1.0);
                for w in ends.windows(2) {
                    axis_probes.push(w[0]);
                    axis_probes.push(0.5 * (w[0] + w[1]));
                }
                axis_probes.push(hi);
                axis_probes.push(hi + 1.0);
            }
            _ => axis_probes.push(0.0),
        }
        cells = cells.saturating_mul(axis_probes.len());
        probes.push(axis_probes);
    }
    if cells > 10_000_000 {
        return Err(Error::UnsupportedConfiguration(
            "too many boxes to decide coverage".into(),
        ));
    }
    let mut idx = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    loop {
        for (axis, &i) in idx.iter().enumerate() {
            point[axis] = probes[axis][i];
        }
        let covered = boxes.iter().any(|b| {
            b.bounds()
                .iter()
                .zip(&point)
                .all(|(&(lo, hi), &v)| lo <= v && v <= hi)
        });
        if !covered {
            return Ok(false);
        }
        let mut axis = 0;
        loop {
            if axis == dim {
                return Ok(true);
            }
            idx[axis] += 1;
            if idx[axis] < probes[axis].len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Decides what the support of `Λ` licenses about the stationary kernel.
///
/// * full support: characteristic to every integrable distribution;
/// * support with interior but not full: uncountable support, hence characteristic
///   to compactly supported distributions only;
/// * atomic support on the line: countable with linear growth `M`, hence some
///   compactly supported distribution is invisible;
/// * atomic support in higher dimension: not full, nothing more is licensed.
pub fn diagnose_characteristic(support: &SpectralSupport, dim: usize) -> Result<CharacteristicVerdict> {
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    let verdict = |class, rule: &str, support: &str, not_dl1| CharacteristicVerdict {
        class,
        rule: rule.to_string(),
        support: support.to_string(),
        growth_constant: None,
        growth_from_radius: None,
        not_characteristic_to_dl1: not_dl1,
    };
    match support {
        SpectralSupport::Full => Ok(verdict(
            CharacteristicClass::CharacteristicToDl1,
            "spectral measure has full support",
            "full",
            false,
        )),
        SpectralSupport::Boxes(boxes) => {
            if boxes.is_empty() {
                return invalid("interval support needs at least one box");
            }
            if let Some(b) = boxes.iter().find(|b| b.dim() != dim) {
                return invalid(format!("box of dimension {} for dimension {dim}", b.dim()));
            }
            if boxes_cover_space(boxes, dim)? {
                return Ok(verdict(
                    CharacteristicClass::CharacteristicToDl1,
                    "union of support boxes covers the whole space",
                    "intervals",
                    false,
                ));
            }
            let rule = if dim == 1 {
                "support is uncountable, so the countable-support growth condition fails; \
                 support is not full"
            } else {
                "support is uncountable, so the kernel is characteristic to compactly \
                 supported distributions; support is not full"
            };
            Ok(verdict(
                CharacteristicClass::CharacteristicToCompactOnly,
                rule,
                "intervals",
                true,
            ))
        }
        SpectralSupport::Atomic(points) => {
            if let Some(p) = points.iter().find(|p| p.len() != dim) {
                return invalid(format!("support point of dimension {} for dimension {dim}", p.len()));
            }
            if points.iter().flatten().any(|v| !v.is_finite()) {
                return invalid("support points must be finite");
            }
            if dim > 1 {
                return Ok(verdict(
                    CharacteristicClass::Inconclusive,
                    "atomic support is not full; compact-support behaviour is not decided \
                     in dimension > 1",
                    "atomic",
                    true,
                ));
            }
            let (m, r0) = growth_constant(points);
            let mut v = verdict(
                CharacteristicClass::NotCharacteristicToCompact,
                "support is countable with linear growth bound",
                "atomic",
                true,
            );
            v.growth_constant = Some(m);
            v.growth_from_radius = Some(r0);
            Ok(v)
        }
    }
}

/// `U([0, T]) - U([T, 2T])`, each uniform law discretized with `nodes` midpoints.
///
/// Its Fourier transform vanishes at every `2πn / T`, so every kernel whose spectral
/// measure lives on that lattice (any `T`-periodic kernel) gives it zero norm,
/// although it is a nonzero compactly supported measure.
pub fn periodic_null_distribution(period: f64, nodes: usize) -> Result<GeneralizedMeasure> {
    if !(period > 0.0) || !period.is_finite() {
        return invalid(format!("period must be positive, got {period}"));
    }
    if nodes < 2 {
        return invalid(format!("need at least 2 nodes, got {nodes}"));
    }
    let first = GeneralizedMeasure::discretize_uniform(&AxisBox::new(vec![(0.0, period)])?, nodes, true)?;
    let second =
        GeneralizedMeasure::discretize_uniform(&AxisBox::new(vec![(period, 2.0 * period)])?, nodes, true)?;
    first.difference(&second)
}

/// `sinc(t) = sin t / t`.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Midpoint quadrature on `[-L, L]` of `f(x) dx` with `f(x) = cos(ωx) sinc²(x/2)`.
///
/// `f̂` is supported in `±[ω - 1, ω + 1]`, disjoint from `[-1, 1]` when `ω > 2`, so the
/// sinc kernel (spectral measure on `[-1, 1]`) barely sees it.
pub fn sinc_null_measure(half_width: f64, nodes: usize, omega: f64) -> Result<GeneralizedMeasure> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return invalid(format!("truncation must be positive, got {half_width}"));
    }
    if nodes < 16 {
        return invalid(format!("need at least 16 nodes, got {nodes}"));
    }
    if !(omega > 2.0) || !omega.is_finite() {
        return invalid(format!("modulation must exceed 2 to clear [-1, 1], got {omega}"));
    }
    let h = 2.0 * half_width / nodes as f64;
    let atoms = (0..nodes)
        .map(|j| {
            let x = -half_width + (j as f64 + 0.5) * h;
            let s = sinc(x / 2.0);
            Atom::new(
                Complex64::new(h * (omega * x).cos() * s * s, 0.0),
                MultiIndex::zero(1),
                vec![x],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    GeneralizedMeasure::from_atoms(1, atoms)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralAtomJson {
    xi: Vec<f64>,
    w: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityParamsJson {
    #[serde(default = "unit")]
    sigma: f64,
    #[serde(default = "unit")]
    scale: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityJson {
    family: String,
    #[serde(rename = "box")]
    domain: Vec<(f64, f64)>,
    #[serde(default)]
    params: Option<DensityParamsJson>,
}

/// JSON description of a spectral measure:
/// `{"atoms": [{"xi": [..], "w": r}], "density": {"family": "gaussian"|"uniform", "box": [[lo, hi], ..], "params": {"sigma": .., "scale": ..}}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSpec {
    #[serde(default)]
    atoms: Vec<SpectralAtomJson>,
    #[serde(default)]
    density: Option<DensityJson>,
}

impl SpectralSpec {
    pub fn build(&self) -> Result<SpectralMeasure> {
        let dim = self
            .atoms
            .first()
            .map(|a| a.xi.len())
            .or_else(|| self.density.as_ref().map(|d| d.domain.len()))
            .ok_or_else(|| Error::InvalidArgument("empty spectral measure".into()))?;
        let atoms = self.atoms.iter().map(|a| (a.xi.clone(), a.w)).collect();
        let densities = match &self.density {
            None => vec![],
            Some(d) => {
                let params = d.params.clone().unwrap_or(DensityParamsJson { sigma: 1.0, scale: 1.0 });
                let family = match d.family.as_str() {
                    "gaussian" => DensityFamily::Gaussian { sigma: params.sigma },
                    "uniform" => DensityFamily::Uniform,
                    other => return invalid(format!("unknown density family '{other}'")),
                };
                vec![SpectralDensity::new(family, AxisBox::new(d.domain.clone())?, params.scale)]
            }
        };
        SpectralMeasure::new(dim, atoms, densities)
    }
}

impl std::str::FromStr for SpectralSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("spectral JSON: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dirac(x: f64) -> GeneralizedMeasure {
        GeneralizedMeasure::dirac(&[x]).unwrap()
    }

    fn cos_lambda() -> SpectralMeasure {
        SpectralMeasure::new(1, vec![(vec![-1.0], 0.5), (vec![1.0], 0.5)], vec![]).unwrap()
    }

    #[test]
    fn ft_examples() {
        for xi in [-3.0, 0.0, 0.7, 10.0] {
            assert_eq!(ft_gm(&dirac(0.0), &[xi]).unwrap(), Complex64::new(1.0, 0.0));
        }
        let dd = dirac(0.0).derivative(&MultiIndex::new(vec![1])).unwrap();
        let v = ft_gm(&dd, &[2.0]).unwrap();
        assert_eq!(v, Complex64::new(0.0, 2.0));
        let v = ft_gm(&dirac(0.0).difference(&dirac(PI)).unwrap(), &[1.0]).unwrap();
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        assert!(ft_gm(&dirac(0.0), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ft_of_derivative_atoms_matches_symbolic_differentiation() {
        // ∂^p δ_x applied to e^{-ixξ} is (-1)^p (-iξ)^p e^{-ixξ}
        let (x, xi) = (0.4, -1.7);
        for p in 0..=3u32 {
            let d = dirac(x).derivative(&MultiIndex::new(vec![p])).unwrap();
            let expected = Complex64::new(-1.0, 0.0).powu(p)
                * Complex64::new(0.0, -xi).powu(p)
                * Complex64::from_polar(1.0, -x * xi);
            let got = ft_gm(&d, &[xi]).unwrap();
            assert!((got - expected).norm() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn spectral_norm_examples() {
        let d = dirac(0.0).difference(&dirac(PI)).unwrap();
        assert_abs_diff_eq!(spectral_norm_sq(&cos_lambda(), &d).unwrap(), 4.0, epsilon = 1e-14);
        for n in [2, 3, 4, 17] {
            let u = GeneralizedMeasure::discretize_uniform(&AxisBox::cube(1, 0.0, 2.0 * PI).unwrap(), n, true)
                .unwrap();
            assert!(spectral_norm_sq(&cos_lambda(), &u).unwrap() < 1e-28);
        }
        assert_abs_diff_eq!(spectral_norm_sq(&cos_lambda(), &dirac(0.0)).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_density_has_unit_mass() {
        let dens = SpectralDensity::new(
            DensityFamily::Gaussian { sigma: 1.3 },
            AxisBox::cube(1, -20.0, 20.0).unwrap(),
            1.0,
        );
        let m = SpectralMeasure::new(1, vec![], vec![dens]).unwrap();
        assert_abs_diff_eq!(m.total_mass().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diagnose_examples() {
        let v = diagnose_characteristic(&SpectralSupport::Full, 1).unwrap();
        assert_eq!(v.class, CharacteristicClass::CharacteristicToDl1);

        let sinc = SpectralSupport::Boxes(vec![AxisBox::cube(1, -1.0, 1.0).unwrap()]);
        let v = diagnose_characteristic(&sinc, 1).unwrap();
        assert_eq!(v.class, CharacteristicClass::CharacteristicToCompactOnly);

        let cos = SpectralSupport::Atomic(vec![vec![-1.0], vec![1.0]]);
        let v = diagnose_characteristic(&cos, 1).unwrap();
        assert_eq!(v.class, CharacteristicClass::NotCharacteristicToCompact);
        assert!(v.not_characteristic_to_dl1);
        assert_eq!(v.growth_constant, Some(2.0));

        let v = diagnose_characteristic(&SpectralSupport::Atomic(vec![vec![0.0, 1.0]]), 2).unwrap();
        assert_eq!(v.class, CharacteristicClass::Inconclusive);

        assert!(diagnose_characteristic(&SpectralSupport::Atomic(vec![vec![0.0, 1.0]]), 1).is_err());
        assert!(diagnose_characteristic(&SpectralSupport::Boxes(vec![]), 1).is_err());
    }

    #[test]
    fn boxes_covering_everything_count_as_full() {
        let inf = f64::INFINITY;
        let halves = SpectralSupport::Boxes(vec![
            AxisBox::new(vec![(-inf, 0.0)]).unwrap(),
            AxisBox::new(vec![(0.0, inf)]).unwrap(),
        ]);
        assert_eq!(
            diagnose_characteristic(&halves, 1).unwrap().class,
            CharacteristicClass::CharacteristicToDl1
        );
        let gap = SpectralSupport::Boxes(vec![
            AxisBox::new(vec![(-inf, 0.0)]).unwrap(),
            AxisBox::new(vec![(0.1, inf)]).unwrap(),
        ]);
        assert_eq!(
            diagnose_characteristic(&gap, 1).unwrap().class,
            CharacteristicClass::CharacteristicToCompactOnly
        );
        let quadrants = SpectralSupport::Boxes(vec![
            AxisBox::new(vec![(-inf, 0.0), (-inf, inf)]).unwrap(),
            AxisBox::new(vec![(0.0, inf), (-inf, 1.0)]).unwrap(),
            AxisBox::new(vec![(0.0, inf), (1.0, inf)]).unwrap(),
        ]);
        assert_eq!(
            diagnose_characteristic(&quadrants, 2).unwrap().class,
            CharacteristicClass::CharacteristicToDl1
        );
    }

    #[test]
    fn growth_constant_on_lattice() {
        // integers 1..=10 and their negatives: count(|s| ≤ r) = 2r
        let pts: Vec<Vec<f64>> = (1..=10).flat_map(|n| [vec![n as f64], vec![-(n as f64)]]).collect();
        assert_eq!(growth_constant(&pts), (2.0, 1.0));
        assert_eq!(growth_constant(&[vec![0.0]]), (1.0, 1.0));
        let (m, r0) = growth_constant(&[vec![0.0], vec![0.5]]);
        assert_eq!((m, r0), (4.0, 0.5));
    }

    #[test]
    fn periodic_null_examples() {
        let d = periodic_null_distribution(2.0 * PI, 4).unwrap();
        assert_eq!(d.len(), 8);
        assert_abs_diff_eq!(d.total_mass().re, 0.0, epsilon = 1e-15);
        assert!(spectral_norm_sq(&cos_lambda(), &d).unwrap() < 1e-28);
        let with_origin = cos_lambda()
            .add(&SpectralMeasure::new(1, vec![(vec![0.0], 1.0)], vec![]).unwrap())
            .unwrap();
        assert!(spectral_norm_sq(&with_origin, &d).unwrap() < 1e-28);
        for n in -5..=5 {
            let v = ft_gm(&d, &[n as f64]).unwrap();
            assert!(v.norm() < 1e-14, "n={n}: {v}");
        }
        assert!(periodic_null_distribution(1.0, 1).is_err());
        assert!(periodic_null_distribution(0.0, 4).is_err());
    }

    #[test]
    fn sinc_null_rejects_bad_parameters() {
        assert!(sinc_null_measure(10.0, 64, 2.0).is_err());
        assert!(sinc_null_measure(10.0, 8, 2.5).is_err());
        assert!(sinc_null_measure(-1.0, 64, 2.5).is_err());
    }

    #[test]
    fn spectral_spec_json() {
        let s: SpectralSpec = r#"{"atoms":[{"xi":[1.0],"w":0.5},{"xi":[-1.0],"w":0.5}]}"#.parse().unwrap();
        let m = s.build().unwrap();
        assert_abs_diff_eq!(m.total_mass().unwrap(), 1.0);
        let s: SpectralSpec = r#"{"density":{"family":"uniform","box":[[-1,1]],"params":{"scale":0.5}}}"#
            .parse()
            .unwrap();
        assert_abs_diff_eq!(s.build().unwrap().total_mass().unwrap(), 1.0, epsilon = 1e-14);
        let bad: SpectralSpec = r#"{"atoms":[{"xi":[1.0],"w":-0.5}]}"#.parse().unwrap();
        assert!(bad.build().is_err());
    }
}
