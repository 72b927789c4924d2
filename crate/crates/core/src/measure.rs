//! Atomic generalized measures.
//!
//! A [`GeneralizedMeasure`] is a finite sum `Σ wᵢ ∂^{pᵢ} δ_{xᵢ}` of weighted point
//! masses and their distributional derivatives on `R^d`. Applied to a smooth test
//! function `f`, the atom `w ∂^p δ_x` yields `w (-1)^{|p|} ∂^p f(x)`.
//!
//! Values are kept in canonical form: atoms are sorted by `(order, location)`,
//! atoms with identical order and bitwise-identical location are merged, and atoms
//! whose weight is exactly zero are dropped.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A multi-index `p ∈ N^d` selecting the mixed partial `∂^p = ∂_1^{p_1} ⋯ ∂_d^{p_d}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit index `e_axis` in dimension `dim`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order `|p|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Componentwise sum. Panics if dimensions differ.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `ξ^p = Π ξ_j^{p_j}`.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .map(|(&p, &x)| x.powi(p as i32))
            .product()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// `(-1)^n` as a real number.
pub(crate) fn sign_pow(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// One term `w ∂^p δ_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub weight: Complex64,
    pub order: MultiIndex,
    pub location: Vec<f64>,
}

impl Atom {
    pub fn new(weight: Complex64, order: MultiIndex, location: Vec<f64>) -> Result<Self> {
        if order.dim() != location.len() {
            return invalid(format!(
                "atom order has dimension {} but location has dimension {}",
                order.dim(),
                location.len()
            ));
        }
        if location.is_empty() {
            return invalid("atoms need dimension at least 1");
        }
        if !weight.re.is_finite() || !weight.im.is_finite() {
            return invalid("atom weight must be finite");
        }
        if location.iter().any(|x| !x.is_finite()) {
            return invalid("atom location must be finite");
        }
        // -0.0 and 0.0 must merge under bitwise comparison.
        let location = location.into_iter().map(|x| x + 0.0).collect();
        Ok(Atom {
            weight,
            order,
            location,
        })
    }

    /// Unit-weight point mass `δ_x`.
    pub fn dirac(location: Vec<f64>) -> Result<Self> {
        let d = location.len();
        Atom::new(Complex64::new(1.0, 0.0), MultiIndex::zero(d), location)
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }

    pub fn with_weight(&self, weight: Complex64) -> Atom {
        Atom {
            weight,
            ..self.clone()
        }
    }

    fn key_cmp(&self, other: &Atom) -> Ordering {
        self.order.cmp(&other.order).then_with(|| {
            self.location
                .iter()
                .zip(&other.location)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    }

    fn same_key(&self, other: &Atom) -> bool {
        self.order == other.order
            && self
                .location
                .iter()
                .zip(&other.location)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxisBox(Vec<(f64, f64)>);

impl AxisBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return invalid("box needs at least one axis");
        }
        for &(lo, hi) in &bounds {
            if lo.is_nan() || hi.is_nan() || !(lo < hi) {
                return invalid(format!("degenerate box axis [{lo}, {hi}]"));
            }
        }
        Ok(AxisBox(bounds))
    }

    /// `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        AxisBox::new(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn volume(&self) -> f64 {
        self.0.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite())
    }
}

/// A finite atomic generalized measure `Σ wᵢ ∂^{pᵢ} δ_{xᵢ}` in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl GeneralizedMeasure {
    /// The zero distribution on `R^dim`.
    pub fn zero(dim: usize) -> Self {
        GeneralizedMeasure {
            dim,
            atoms: Vec::new(),
        }
    }

    /// Builds a measure from arbitrary atoms and brings it into canonical form.
    pub fn from_atoms(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if let Some(a) = atoms.iter().find(|a| a.dim() != dim) {
            return invalid(format!(
                "atom of dimension {} in a measure of dimension {dim}",
                a.dim()
            ));
        }
        Ok(GeneralizedMeasure { dim, atoms }.canonicalize())
    }

    /// Weighted point mass `w δ_x`.
    pub fn point_mass(x: &[f64], w: Complex64) -> Result<Self> {
        let atom = Atom::new(w, MultiIndex::zero(x.len()), x.to_vec())?;
        GeneralizedMeasure::from_atoms(x.len(), vec![atom])
    }

    /// `δ_x`.
    pub fn dirac(x: &[f64]) -> Result<Self> {
        GeneralizedMeasure::point_mass(x, Complex64::new(1.0, 0.0))
    }

    /// Equal-weight point masses at the given points, e.g. an empirical measure.
    pub fn empirical(points: &[Vec<f64>], weight: f64) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        let atoms = points
            .iter()
            .map(|x| Atom::new(Complex64::new(weight, 0.0), MultiIndex::zero(x.len()), x.clone()))
            .collect::<Result<Vec<_>>>()?;
        GeneralizedMeasure::from_atoms(dim, atoms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Highest total derivative order carried by any atom.
    pub fn max_order(&self) -> u32 {
        self.atoms.iter().map(|a| a.order.order()).max().unwrap_or(0)
    }

    /// True when every atom is a plain point mass.
    pub fn is_measure(&self) -> bool {
        self.atoms.iter().all(|a| a.order.is_zero())
    }

    /// Sort, merge coincident atoms and drop exact zeros. Idempotent.
    pub fn canonicalize(mut self) -> Self {
        self.atoms.sort_by(Atom::key_cmp);
        let mut merged: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for atom in self.atoms {
            match merged.last_mut() {
                Some(last) if last.same_key(&atom) => last.weight += atom.weight,
                _ => merged.push(atom),
            }
        }
        merged.retain(|a| a.weight != Complex64::new(0.0, 0.0));
        GeneralizedMeasure {
            dim: self.dim,
            atoms: merged,
        }
    }

    /// Applies `∂^p` to every atom: `∂^p (w ∂^q δ_x) = w ∂^{p+q} δ_x`.
    pub fn derivative(&self, p: &MultiIndex) -> Result<Self> {
        if p.dim() != self.dim {
            return invalid(format!(
                "multi-index of dimension {} applied to a measure of dimension {}",
                p.dim(),
                self.dim
            ));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                weight: a.weight,
                order: a.order.add(p),
                location: a.location.clone(),
            })
            .collect();
        Ok(GeneralizedMeasure {
            dim: self.dim,
            atoms,
        }
        .canonicalize())
    }

    /// `Σ c_k D_k`, canonicalized.
    pub fn linear_combine(terms: &[(Complex64, &GeneralizedMeasure)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return invalid("linear combination of an empty list");
        };
        let dim = first.dim;
        let mut atoms = Vec::with_capacity(terms.iter().map(|(_, m)| m.len()).sum());
        for (c, m) in terms {
            if m.dim != dim {
                return invalid(format!(
                    "cannot combine measures of dimensions {dim} and {}",
                    m.dim
                ));
            }
            atoms.extend(m.atoms.iter().map(|a| a.with_weight(a.weight * c)));
        }
        Ok(GeneralizedMeasure { dim, atoms }.canonicalize())
    }

    /// `self - other`.
    pub fn difference(&self, other: &GeneralizedMeasure) -> Result<Self> {
        GeneralizedMeasure::linear_combine(&[
            (Complex64::new(1.0, 0.0), self),
            (Complex64::new(-1.0, 0.0), other),
        ])
    }

    /// `c · self`.
    pub fn scaled(&self, c: Complex64) -> Self {
        GeneralizedMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| a.with_weight(a.weight * c))
                .collect(),
        }
        .canonicalize()
    }

    /// `D(𝟙)`: the sum of the weights of order-0 atoms. Derivative atoms annihilate
    /// constants.
    pub fn total_mass(&self) -> Complex64 {
        self.atoms
            .iter()
            .filter(|a| a.order.is_zero())
            .map(|a| a.weight)
            .sum()
    }

    /// Midpoint-rule discretization of Lebesgue measure on `bounds` with
    /// `nodes_per_axis` nodes along each axis. With `normalize` the total mass is 1
    /// (the uniform probability measure), otherwise it is the box volume.
    pub fn discretize_uniform(
        bounds: &AxisBox,
        nodes_per_axis: usize,
        normalize: bool,
    ) -> Result<Self> {
        if nodes_per_axis == 0 {
            return invalid("need at least one node per axis");
        }
        if !bounds.is_finite() {
            return invalid("discretization box must be bounded");
        }
        let dim = bounds.dim();
        let count = nodes_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidArgument("too many discretization nodes".into()))?;
        let total = if normalize { 1.0 } else { bounds.volume() };
        let w = Complex64::new(total / count as f64, 0.0);
        let axes: Vec<Vec<f64>> = bounds
            .bounds()
            .iter()
            .map(|&(lo, hi)| {
                let h = (hi - lo) / nodes_per_axis as f64;
                (0..nodes_per_axis)
                    .map(|j| lo + (j as f64 + 0.5) * h)
                    .collect()
            })
            .collect();
        let mut atoms = Vec::with_capacity(count);
        let mut idx = vec![0usize; dim];
        for _ in 0..count {
            let x = idx.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
            atoms.push(Atom::new(w, MultiIndex::zero(dim), x)?);
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < nodes_per_axis {
                    break;
                }
                *slot = 0;
            }
        }
        GeneralizedMeasure::from_atoms(dim, atoms)
    }

    /// The difference quotient `(δ_{x + h e_axis} - δ_x) / h`, whose embedding tends to
    /// the embedding of the dipole `-∂_axis δ_x` as `h → 0`.
    pub fn dipole_quotient(x: &[f64], axis: usize, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return invalid(format!("dipole step must be positive, got {h}"));
        }
        if axis >= x.len() {
            return invalid(format!("axis {axis} out of range for dimension {}", x.len()));
        }
        let mut shifted = x.to_vec();
        shifted[axis] += h;
        let d = x.len();
        let atoms = vec![
            Atom::new(Complex64::new(1.0 / h, 0.0), MultiIndex::zero(d), shifted)?,
            Atom::new(Complex64::new(-1.0 / h, 0.0), MultiIndex::zero(d), x.to_vec())?,
        ];
        GeneralizedMeasure::from_atoms(d, atoms)
    }

    /// Applies the distribution to a test function given through its partial
    /// derivatives: `Σ w (-1)^{|p|} ∂^p f(x)`.
    pub fn apply<F>(&self, mut partial: F) -> Complex64
    where
        F: FnMut(&MultiIndex, &[f64]) -> Complex64,
    {
        self.atoms
            .iter()
            .map(|a| a.weight * sign_pow(a.order.order()) * partial(&a.order, &a.location))
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    w: [f64; 2],
    p: Vec<u32>,
    x: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    dim: usize,
    atoms: Vec<AtomJson>,
}

impl Serialize for GeneralizedMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomJson {
                    w: [a.weight.re, a.weight.im],
                    p: a.order.entries().to_vec(),
                    x: a.location.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeneralizedMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasureJson::deserialize(d)?;
        let atoms = raw
            .atoms
            .into_iter()
            .map(|a| Atom::new(Complex64::new(a.w[0], a.w[1]), MultiIndex(a.p), a.x))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        GeneralizedMeasure::from_atoms(raw.dim, atoms).map_err(serde::de::Error::custom)
    }
}
