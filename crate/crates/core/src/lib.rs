//! Kernel mean embeddings of atomic generalized measures.
//!
//! A generalized measure is a finite sum `Σ w ∂^p δ_x` of weighted point masses and
//! their partial derivatives. Under a positive definite kernel `k` each one embeds
//! as an element of the RKHS of `k`; this crate computes inner products, norms and
//! distances between embeddings, evaluates the embedded functions, builds derived
//! kernels, and diagnoses whether a stationary kernel is characteristic from its
//! spectral measure.
//!
//! ```
//! use distembed::{embedding, GeneralizedMeasure, Kernel, MultiIndex};
//!
//! let k = Kernel::gaussian(1, 1.0, 1.0).unwrap();
//! let dipole = GeneralizedMeasure::dirac(&[0.0]).unwrap().derivative(&MultiIndex::new(vec![1])).unwrap();
//! let v = embedding::embed_eval(&k, &dipole, &[1.0]).unwrap();
//! assert!((v.re + 2.0 * (-1.0f64).exp()).abs() < 1e-14);
//! ```

pub mod cpd;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod measure;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use kernels::{Kernel, KernelSpec, Smoothness};
pub use measure::{Atom, AxisBox, GeneralizedMeasure, MultiIndex};
pub use num_complex::Complex64;
pub use spectral::{SpectralMeasure, SpectralSupport};
