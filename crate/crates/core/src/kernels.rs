//! Closed-form baseline kernels and the kernel trait shared by the learners.

use serde::{Deserialize, Serialize};

use crate::dataset::{l1_distance, sq_distance, SparseVector};
use crate::error::{Error, Result};
use crate::featuremap::IndexedFeature;

/// A symmetric kernel over points of type `P`.
pub trait Kernel<P: ?Sized>: Send + Sync {
    fn eval(&self, x: &P, y: &P) -> f64;
}

/// exp(−λ‖x − y‖₁) with λ = ln(ψ)/d, i.e. ψ^(−‖x − y‖₁ / d).
///
/// Shares the sharpness parameter ψ with Isolation Kernel; `d` is the
/// dataset's declared dimensionality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laplacian {
    pub psi: f64,
    pub dim: usize,
    lambda: f64,
}

impl Laplacian {
    pub fn new(psi: f64, dim: usize) -> Result<Self> {
        if !(psi >= 2.0) || !psi.is_finite() {
            return Err(Error::Parameter(format!(
                "Laplacian kernel needs psi >= 2, got {psi}"
            )));
        }
        if dim == 0 {
            return Err(Error::Parameter("Laplacian kernel needs d >= 1".into()));
        }
        // real-valued psi is accepted; the learners only use powers of two
        Ok(Self {
            psi,
            dim,
            lambda: psi.ln() / dim as f64,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Kernel<SparseVector> for Laplacian {
    fn eval(&self, x: &SparseVector, y: &SparseVector) -> f64 {
        (-self.lambda * l1_distance(x, y)).exp()
    }
}

/// exp(−γ‖x − y‖²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub gamma: f64,
}

impl Gaussian {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Parameter(format!(
                "Gaussian kernel needs gamma > 0, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }
}

impl Kernel<SparseVector> for Gaussian {
    fn eval(&self, x: &SparseVector, y: &SparseVector) -> f64 {
        (-self.gamma * sq_distance(x, y)).exp()
    }
}

pub fn laplacian(x: &SparseVector, y: &SparseVector, psi: f64, d: usize) -> Result<f64> {
    Ok(Laplacian::new(psi, d)?.eval(x, y))
}

pub fn gaussian(x: &SparseVector, y: &SparseVector, gamma: f64) -> Result<f64> {
    Ok(Gaussian::new(gamma)?.eval(x, y))
}

/// The closed-form kernels, as one persistable type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaselineKernel {
    Laplacian(Laplacian),
    Gaussian(Gaussian),
}

impl Kernel<SparseVector> for BaselineKernel {
    fn eval(&self, x: &SparseVector, y: &SparseVector) -> f64 {
        match self {
            BaselineKernel::Laplacian(k) => k.eval(x, y),
            BaselineKernel::Gaussian(k) => k.eval(x, y),
        }
    }
}

/// Isolation Kernel evaluated on already-mapped points.
///
/// Both features must come from the same mapper.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IsolationKernel;

impl Kernel<IndexedFeature> for IsolationKernel {
    fn eval(&self, x: &IndexedFeature, y: &IndexedFeature) -> f64 {
        debug_assert_eq!(x.t(), y.t());
        let matches = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .filter(|(a, b)| a == b)
            .count();
        matches as f64 / x.t() as f64
    }
}

impl<P: ?Sized, K: Kernel<P>> Kernel<P> for &K {
    fn eval(&self, x: &P, y: &P) -> f64 {
        (**self).eval(x, y)
    }
}
