//! Seeded synthetic datasets for tests, examples and sweeps.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{Dataset, Label, LabeledPoint, SparseVector};
use crate::seeding::stream_rng;

/// Two unit-variance Gaussian classes whose means are `separation` apart
/// along the diagonal. Labels are balanced in expectation.
pub fn two_gaussians(n: usize, dim: usize, separation: f64, seed: u64) -> Dataset {
    let mut rng = stream_rng(seed, 0);
    let offset = separation / (2.0 * (dim as f64).sqrt());
    let points = (0..n)
        .map(|_| {
            let label = if rng.gen_bool(0.5) { Label::Pos } else { Label::Neg };
            let v: Vec<f64> = (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z + label.sign() * offset
                })
                .collect();
            LabeledPoint {
                x: SparseVector::from_dense(&v),
                label,
            }
        })
        .collect();
    Dataset::with_dim("two-gaussians", points, dim)
}

/// Points uniform on [0,1]², labelled +1 inside the disc of radius `radius`
/// around (0.5, 0.5). `flip` is the label-noise rate.
pub fn disc(n: usize, radius: f64, flip: f64, seed: u64) -> Dataset {
    let mut rng = stream_rng(seed, 0);
    let points = (0..n)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let inside = (a - 0.5).powi(2) + (b - 0.5).powi(2) < radius * radius;
            let mut label = if inside { Label::Pos } else { Label::Neg };
            if rng.gen_bool(flip) {
                label = if inside { Label::Neg } else { Label::Pos };
            }
            LabeledPoint {
                x: SparseVector::from_dense(&[a, b]),
                label,
            }
        })
        .collect();
    Dataset::with_dim("disc", points, 2)
}

/// Points uniform on [0,1]^dim.
pub fn uniform(n: usize, dim: usize, seed: u64) -> Vec<SparseVector> {
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            SparseVector::from_dense(&v).with_dim(dim)
        })
        .collect()
}

/// Sparse points: each attribute is present with probability `density`.
pub fn sparse_uniform(n: usize, dim: usize, density: f64, seed: u64) -> Vec<SparseVector> {
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..dim)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-1.0..1.0) } else { 0.0 })
                .collect();
            SparseVector::from_dense(&v).with_dim(dim)
        })
        .collect()
}

/// Wraps unlabeled points as a dataset with all-positive labels.
pub fn unlabeled(name: &str, xs: Vec<SparseVector>, dim: usize) -> Dataset {
    let points = xs
        .into_iter()
        .map(|x| LabeledPoint { x, label: Label::Pos })
        .collect();
    Dataset::with_dim(name, points, dim)
}
