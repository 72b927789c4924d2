//! Browser bindings for three small demos: an embedded function, the spectrum of a
//! periodic null witness, and the decay of uniform laws on growing intervals.
//!
//! The plain functions in [`demo`] do the work and run natively; the exported
//! wrappers only translate errors for JavaScript.

use wasm_bindgen::prelude::*;

pub mod demo {
    use distembed::embedding;
    use distembed::experiments::nonmetrization;
    use distembed::spectral::{ft_gm, periodic_null_distribution};
    use distembed::{Error, GeneralizedMeasure, KernelSpec, Result};

    fn grid(lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
        if samples < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument("need a finite range and at least two samples".into()));
        }
        let step = (hi - lo) / (samples - 1) as f64;
        Ok((0..samples).map(|i| lo + step * i as f64).collect())
    }

    fn parse_measure(json: &str) -> Result<GeneralizedMeasure> {
        serde_json::from_str(json).map_err(|e| Error::InvalidArgument(format!("measure JSON: {e}")))
    }

    /// Real part of `Φ(D)` on an even grid of `[lo, hi]`, for a measure on the line.
    pub fn embedded_curve(kernel: &str, measure: &str, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
        let k = kernel.parse::<KernelSpec>()?.build()?;
        let d = parse_measure(measure)?;
        grid(lo, hi, samples)?
            .into_iter()
            .map(|y| embedding::embed_eval(&k, &d, &[y]).map(|z| z.re))
            .collect()
    }

    pub fn embedding_norm(kernel: &str, measure: &str) -> Result<f64> {
        let k = kernel.parse::<KernelSpec>()?.build()?;
        embedding::norm(&k, &parse_measure(measure)?)
    }

    /// `|D̂(ξ)|²` on `[0, xi_max]` for the witness `U[0, T] - U[T, 2T]`; it vanishes on
    /// the lattice `2πℤ / T`.
    pub fn periodic_null_spectrum(period: f64, nodes: usize, xi_max: f64, samples: usize) -> Result<Vec<f64>> {
        let d = periodic_null_distribution(period, nodes)?;
        grid(0.0, xi_max, samples)?
            .into_iter()
            .map(|xi| ft_gm(&d, &[xi]).map(|z| z.norm_sqr()))
            .collect()
    }

    /// Report of `‖U[0, n]‖²` under the Gaussian for `n = 1, 2, 4, …, n_max`, as JSON.
    pub fn nonmetrization_decay(sigma: f64, n_max: usize) -> Result<String> {
        let ns: Vec<usize> = (0..).map(|k| 1usize << k).take_while(|&n| n <= n_max).collect();
        Ok(nonmetrization(sigma, 1.0, &ns)?.to_json())
    }
}

fn js(e: distembed::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn embedded_curve(kernel: &str, measure: &str, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    demo::embedded_curve(kernel, measure, lo, hi, samples).map_err(js)
}

#[wasm_bindgen]
pub fn embedding_norm(kernel: &str, measure: &str) -> Result<f64, JsError> {
    demo::embedding_norm(kernel, measure).map_err(js)
}

#[wasm_bindgen]
pub fn periodic_null_spectrum(period: f64, nodes: usize, xi_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    demo::periodic_null_spectrum(period, nodes, xi_max, samples).map_err(js)
}

#[wasm_bindgen]
pub fn nonmetrization_decay(sigma: f64, n_max: usize) -> Result<String, JsError> {
    demo::nonmetrization_decay(sigma, n_max).map_err(js)
}
