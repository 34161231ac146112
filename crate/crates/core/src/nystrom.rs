//! Nyström approximate feature map for a closed-form kernel.
//!
//! Fitting samples `b` landmarks, eigendecomposes their `b × b` Gram matrix
//! and keeps the top `r` eigenpairs. A point maps to
//! `diag(λ)^(-1/2) Vᵀ (k(x, x_1), …, k(x, x_b))`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SparseVector};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::ops::OpCounter;
use crate::partition::sample_psi;
use crate::seeding::stream_rng;

/// Eigenvalues at or below this are dropped before inverting their square root.
pub const EIGEN_FLOOR: f64 = 1e-10;

pub const NYSTROM_FORMAT: &str = "isokernel-nystrom";
pub const NYSTROM_VERSION: u32 = 1;

const SYMMETRY_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Square dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape {
                expected: format!("{n}x{n}"),
                got: "ragged rows".into(),
            });
        }
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Eigenpairs sorted by descending eigenvalue; `vectors[k]` pairs with `values[k]`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn sym_eigen(m: &SquareMatrix) -> Result<SymEigen> {
    let n = m.n();
    let scale = m.data.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for i in 0..n {
        for j in 0..i {
            if (m.get(i, j) - m.get(j, i)).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Contract(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut a = m.clone();
    let mut v = SquareMatrix::identity(n);
    let total = a.frobenius();
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j) * a.get(i, j))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * total || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J the (p, q) plane rotation
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));
    Ok(SymEigen {
        values: order.iter().map(|&k| a.get(k, k)).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|row| v.get(row, k)).collect())
            .collect(),
    })
}

/// Fitted Nyström map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NystromMap<K> {
    format: String,
    version: u32,
    landmarks: Vec<SparseVector>,
    kernel: K,
    /// Retained eigenvalues, descending.
    eigenvalues: Vec<f64>,
    /// r × b, row-major.
    proj: Vec<f64>,
    b: usize,
    r: usize,
    requested_r: usize,
}

/// Samples `b` landmarks without replacement and builds the rank-`r` map.
pub fn fit_nystrom<K: Kernel<SparseVector>>(
    dataset: &Dataset,
    b: usize,
    r: usize,
    kernel: K,
    seed: u64,
) -> Result<NystromMap<K>> {
    let landmarks = sample_psi(dataset, b, &mut stream_rng(seed, 0))?;
    NystromMap::from_landmarks(landmarks, r, kernel)
}

impl<K: Kernel<SparseVector>> NystromMap<K> {
    /// Builds the map on fixed landmarks.
    pub fn from_landmarks(landmarks: Vec<SparseVector>, r: usize, kernel: K) -> Result<Self> {
        let b = landmarks.len();
        if b == 0 || r == 0 || r > b {
            return Err(Error::Parameter(format!(
                "Nystrom needs 1 <= r <= b and b >= 1 (b = {b}, r = {r})"
            )));
        }
        let gram = SquareMatrix::from_fn(b, |i, j| {
            if i == j {
                kernel.eval(&landmarks[i], &landmarks[i])
            } else {
                kernel.eval(&landmarks[i.min(j)], &landmarks[i.max(j)])
            }
        });
        let eig = sym_eigen(&gram)?;
        let keep: Vec<usize> = (0..r).filter(|&k| eig.values[k] > EIGEN_FLOOR).collect();
        if keep.is_empty() {
            return Err(Error::DegenerateKernel { floor: EIGEN_FLOOR });
        }
        let mut proj = Vec::with_capacity(keep.len() * b);
        for &k in &keep {
            let inv_sqrt = 1.0 / eig.values[k].sqrt();
            proj.extend(eig.vectors[k].iter().map(|v| v * inv_sqrt));
        }
        Ok(Self {
            format: NYSTROM_FORMAT.into(),
            version: NYSTROM_VERSION,
            landmarks,
            kernel,
            eigenvalues: keep.iter().map(|&k| eig.values[k]).collect(),
            proj,
            b,
            r: keep.len(),
            requested_r: r,
        })
    }

    /// Number of landmarks.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Effective rank (may be below the requested rank after the eigen floor).
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn requested_r(&self) -> usize {
        self.requested_r
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn landmarks(&self) -> &[SparseVector] {
        &self.landmarks
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// x̂ ∈ ℝ^r.
    pub fn map(&self, x: &SparseVector) -> Vec<f64> {
        let kx: Vec<f64> = self.landmarks.iter().map(|z| self.kernel.eval(x, z)).collect();
        self.proj
            .chunks_exact(self.b)
            .map(|row| row.iter().zip(&kx).map(|(p, k)| p * k).sum())
            .collect()
    }

    /// Work done by one [`map`](Self::map) call: `b` kernel evaluations and `r·b` products.
    pub fn map_cost(&self) -> OpCounter {
        OpCounter {
            kernel_evals: self.b as u64,
            mults: (self.r * self.b) as u64,
            ..OpCounter::default()
        }
    }
}

impl<K: Serialize> NystromMap<K> {
    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

impl<K: DeserializeOwned> NystromMap<K> {
    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let m: Self = serde_json::from_reader(input)?;
        if m.format != NYSTROM_FORMAT || m.version != NYSTROM_VERSION {
            return Err(Error::Persist(format!(
                "expected {NYSTROM_FORMAT} v{NYSTROM_VERSION}, found {} v{}",
                m.format, m.version
            )));
        }
        if m.proj.len() != m.r * m.b || m.landmarks.len() != m.b {
            return Err(Error::Persist("projection shape does not match b and r".into()));
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

pub fn nystrom_map<K: Kernel<SparseVector>>(nm: &NystromMap<K>, x: &SparseVector) -> Vec<f64> {
    nm.map(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Label, LabeledPoint};
    use crate::kernels::Laplacian;
    use rand::Rng;

    /// k(x, y) = 1 if x == y else 0.
    struct Delta;

    impl Kernel<SparseVector> for Delta {
        fn eval(&self, x: &SparseVector, y: &SparseVector) -> f64 {
            if x == y {
                1.0
            } else {
                0.0
            }
        }
    }

    fn random_points(n: usize, d: usize, seed: u64) -> Vec<SparseVector> {
        let mut rng = stream_rng(seed, 3);
        (0..n)
            .map(|_| SparseVector::from_dense(&(0..d).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<_>>()))
            .collect()
    }

    fn reconstruct(e: &SymEigen) -> SquareMatrix {
        let n = e.values.len();
        SquareMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j]).sum()
        })
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eigen(&SquareMatrix::identity(5)).unwrap();
        assert_eq!(e.values, vec![1.0; 5]);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let m = SquareMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let e = sym_eigen(&m).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vectors[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(e.vectors[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(e.vectors[2], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn random_symmetric_reconstruction() {
        let mut rng = stream_rng(17, 0);
        let mut m = SquareMatrix::zeros(20);
        for i in 0..20 {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let e = sym_eigen(&m).unwrap();
        let rec = reconstruct(&e);
        let err = SquareMatrix::from_fn(20, |i, j| rec.get(i, j) - m.get(i, j)).frobenius();
        assert!(err <= 1e-8 * m.frobenius(), "err {err}");
        for a in 0..20 {
            // M v = λ v
            let mv: Vec<f64> = (0..20).map(|i| (0..20).map(|j| m.get(i, j) * e.vectors[a][j]).sum()).collect();
            for i in 0..20 {
                assert!((mv[i] - e.values[a] * e.vectors[a][i]).abs() <= 1e-8 * m.frobenius());
            }
            for b in 0..20 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot(&e.vectors[a], &e.vectors[b]) - want).abs() <= 1e-8);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn delta_kernel_gives_identity_projection() {
        let lm = random_points(6, 3, 1);
        let nm = NystromMap::from_landmarks(lm.clone(), 6, Delta).unwrap();
        assert_eq!(nm.r(), 6);
        for (j, z) in lm.iter().enumerate() {
            let e: Vec<f64> = (0..6).map(|k| if k == j { 1.0 } else { 0.0 }).collect();
            assert_eq!(nm.map(z), e);
        }
    }

    #[test]
    fn truncated_gram_is_reproduced_on_landmarks() {
        let lm = random_points(30, 4, 2);
        let k = Laplacian::new(16.0, 4).unwrap();
        let r = 10;
        let nm = NystromMap::from_landmarks(lm.clone(), r, k).unwrap();
        let gram = SquareMatrix::from_fn(30, |i, j| k.eval(&lm[i], &lm[j]));
        let e = sym_eigen(&gram).unwrap();
        let feats: Vec<Vec<f64>> = lm.iter().map(|z| nm.map(z)).collect();
        for i in 0..30 {
            for j in 0..30 {
                let truncated: f64 = (0..r).map(|q| e.values[q] * e.vectors[q][i] * e.vectors[q][j]).sum();
                assert!((dot(&feats[i], &feats[j]) - truncated).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn full_rank_is_exact_on_landmarks() {
        let lm = random_points(25, 3, 4);
        let k = Laplacian::new(8.0, 3).unwrap();
        let nm = NystromMap::from_landmarks(lm.clone(), 25, k).unwrap();
        assert_eq!(nm.r(), 25);
        for a in &lm {
            for b in &lm {
                assert!((dot(&nm.map(a), &nm.map(b)) - k.eval(a, b)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn fit_checks_and_degenerate_gram() {
        let d = Dataset::new(
            "n",
            random_points(40, 2, 5)
                .into_iter()
                .map(|x| LabeledPoint { x, label: Label::Pos })
                .collect(),
        );
        let k = Laplacian::new(4.0, 2).unwrap();
        let nm = fit_nystrom(&d, 20, 4, k, 1).unwrap();
        assert_eq!((nm.b(), nm.r()), (20, 4));
        assert!(nm.map(&SparseVector::from_dense(&[100.0, -3.0])).iter().all(|v| v.is_finite()));
        assert!(matches!(fit_nystrom(&d, 41, 4, k, 1), Err(Error::Sample { .. })));
        assert!(fit_nystrom(&d, 10, 11, k, 1).is_err());

        struct Zero;
        impl Kernel<SparseVector> for Zero {
            fn eval(&self, _: &SparseVector, _: &SparseVector) -> f64 {
                0.0
            }
        }
        assert!(matches!(
            NystromMap::from_landmarks(random_points(4, 2, 6), 2, Zero),
            Err(Error::DegenerateKernel { .. })
        ));
    }

    #[test]
    fn persistence_round_trip() {
        let lm = random_points(10, 2, 8);
        let nm = NystromMap::from_landmarks(lm, 3, Laplacian::new(4.0, 2).unwrap()).unwrap();
        let mut buf = Vec::new();
        nm.write_to(&mut buf).unwrap();
        let back: NystromMap<Laplacian> = NystromMap::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, nm);
    }
}
