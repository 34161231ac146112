//! The exact Isolation Kernel feature map.
//!
//! A [`Mapper`] holds `t` partitionings built from independent ψ-samples. A
//! point `x` maps to the index vector φ(x) ∈ [0, ψ)^t, i.e. the positions of
//! the `t` ones in the binary vector Φ(x) ∈ {0,1}^{t×ψ}. Φ itself is never
//! materialised: the kernel is the fraction of matching indices, and a dot
//! product with a `t × ψ` weight matrix is a sum of `t` looked-up weights.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, SparseVector};
use crate::error::{Error, Result};
use crate::ops::OpCounter;
use crate::partition::{sample_psi, Partitioning, Scheme};
use crate::seeding::stream_rng;

pub const MAPPER_FORMAT: &str = "isokernel-mapper";
pub const MAPPER_VERSION: u32 = 1;

/// φ(x): one cell id per partitioning.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexedFeature {
    idx: Vec<u32>,
}

impl IndexedFeature {
    pub fn new(idx: Vec<u32>) -> Self {
        Self { idx }
    }

    /// Number of partitionings.
    pub fn t(&self) -> usize {
        self.idx.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.idx
    }
}

/// Fitted feature map. Frozen after [`fit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mapper {
    format: String,
    version: u32,
    scheme: Scheme,
    t: usize,
    psi: usize,
    seed: u64,
    dim: usize,
    partitionings: Vec<Partitioning>,
}

/// Builds `t` partitionings, each from its own ψ-sample of `dataset`.
///
/// Partitioning `i` draws from stream `i` of `seed`, so the result does not
/// depend on how the work is scheduled.
pub fn fit(dataset: &Dataset, psi: usize, t: usize, scheme: Scheme, seed: u64) -> Result<Mapper> {
    if t == 0 {
        return Err(Error::Parameter("t must be at least 1".into()));
    }
    if psi == 0 {
        return Err(Error::Parameter("psi must be at least 1".into()));
    }
    let partitionings = (0..t)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let sample = sample_psi(dataset, psi, &mut rng)?;
            Ok(Partitioning::build(scheme, sample, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mapper {
        format: MAPPER_FORMAT.into(),
        version: MAPPER_VERSION,
        scheme,
        t,
        psi,
        seed,
        dim: dataset.dim,
        partitionings,
    })
}

impl Mapper {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Dimensionality of the data the mapper was fitted on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn partitionings(&self) -> &[Partitioning] {
        &self.partitionings
    }

    /// Cells present in each partitioning (ψ unless the sample had duplicates).
    pub fn cell_counts(&self) -> Vec<usize> {
        self.partitionings.iter().map(Partitioning::n_cells).collect()
    }

    /// φ(x). Costs `t` assignments.
    pub fn map_point(&self, x: &SparseVector) -> IndexedFeature {
        let mut scratch = Vec::with_capacity(self.psi);
        IndexedFeature {
            idx: self
                .partitionings
                .iter()
                .map(|p| p.assign_with(x, &mut scratch) as u32)
                .collect(),
        }
    }

    /// Maps every point of a dataset (in parallel), keeping order.
    pub fn map_dataset(&self, dataset: &Dataset) -> Vec<IndexedFeature> {
        dataset.points.par_iter().map(|p| self.map_point(&p.x)).collect()
    }

    /// Assignments performed by one [`map_point`](Self::map_point) call.
    pub fn map_cost(&self) -> OpCounter {
        OpCounter {
            assigns: self.t as u64,
            ..OpCounter::default()
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let m: Mapper = serde_json::from_reader(input)?;
        if m.format != MAPPER_FORMAT {
            return Err(Error::Persist(format!(
                "expected a {MAPPER_FORMAT} file, found {:?}",
                m.format
            )));
        }
        if m.version != MAPPER_VERSION {
            return Err(Error::Persist(format!(
                "unsupported mapper version {} (this build reads {MAPPER_VERSION})",
                m.version
            )));
        }
        if m.partitionings.len() != m.t {
            return Err(Error::Persist(format!(
                "header says t = {} but {} partitionings are stored",
                m.t,
                m.partitionings.len()
            )));
        }
        if m.partitionings.iter().any(|p| p.scheme() != m.scheme) {
            return Err(Error::Persist("partitioning scheme differs from header".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

pub fn map_point(mapper: &Mapper, x: &SparseVector) -> IndexedFeature {
    mapper.map_point(x)
}

fn check_same_t(a: &IndexedFeature, b: &IndexedFeature) -> Result<()> {
    if a.t() != b.t() {
        return Err(Error::Provenance(format!(
            "features have t = {} and t = {}",
            a.t(),
            b.t()
        )));
    }
    Ok(())
}

/// Number of partitionings in which the two points share a cell.
pub fn match_count(fa: &IndexedFeature, fb: &IndexedFeature) -> Result<usize> {
    check_same_t(fa, fb)?;
    Ok(fa.idx.iter().zip(&fb.idx).filter(|(a, b)| a == b).count())
}

/// K(x, y) = (1/t) · #{i : φ_i(x) = φ_i(y)}.
pub fn kernel(fa: &IndexedFeature, fb: &IndexedFeature) -> Result<f64> {
    Ok(match_count(fa, fb)? as f64 / fa.t() as f64)
}

/// Primal weights, one row of ψ cells per partitioning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    t: usize,
    psi: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(t: usize, psi: usize) -> Self {
        Self {
            t,
            psi,
            w: vec![0.0; t * psi],
        }
    }

    /// Row-major `t × ψ` values.
    pub fn from_rows(t: usize, psi: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != t * psi {
            return Err(Error::Shape {
                expected: format!("{t}x{psi} = {} values", t * psi),
                got: format!("{} values", w.len()),
            });
        }
        Ok(Self { t, psi, w })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.psi + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.psi..(i + 1) * self.psi]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn nonzeros(&self) -> usize {
        self.w.iter().filter(|v| **v != 0.0).count()
    }

    fn check(&self, f: &IndexedFeature) -> Result<()> {
        if f.t() != self.t {
            return Err(Error::Shape {
                expected: format!("feature with t = {}", self.t),
                got: format!("t = {}", f.t()),
            });
        }
        if let Some(&bad) = f.idx.iter().find(|&&j| j as usize >= self.psi) {
            return Err(Error::Shape {
                expected: format!("cell ids below psi = {}", self.psi),
                got: format!("cell id {bad}"),
            });
        }
        Ok(())
    }
}

/// ⟨w, Φ(x)⟩ as the sum of the `t` weights selected by φ(x).
pub fn efficient_dot(w: &WeightMatrix, f: &IndexedFeature) -> Result<f64> {
    efficient_dot_counted(w, f, &mut OpCounter::default())
}

/// [`efficient_dot`] that also tallies its additions (always `t`).
pub fn efficient_dot_counted(w: &WeightMatrix, f: &IndexedFeature, ops: &mut OpCounter) -> Result<f64> {
    w.check(f)?;
    let mut acc = 0.0;
    for (i, &j) in f.idx.iter().enumerate() {
        acc += w.w[i * w.psi + j as usize];
    }
    ops.adds += f.t() as u64;
    Ok(acc)
}

/// ⟨w, Φ(x)⟩ by expanding Φ(x) and forming all `t·ψ` products.
///
/// Kept as a reference implementation; the summation order matches
/// [`efficient_dot`] so the two agree exactly on finite weights.
pub fn naive_dot(w: &WeightMatrix, f: &IndexedFeature) -> Result<f64> {
    naive_dot_counted(w, f, &mut OpCounter::default())
}

pub fn naive_dot_counted(w: &WeightMatrix, f: &IndexedFeature, ops: &mut OpCounter) -> Result<f64> {
    w.check(f)?;
    let mut acc = 0.0;
    for i in 0..w.t {
        let hot = f.idx[i] as usize;
        for j in 0..w.psi {
            let phi = if j == hot { 1.0 } else { 0.0 };
            acc += w.w[i * w.psi + j] * phi;
        }
    }
    ops.mults += (w.t * w.psi) as u64;
    ops.adds += (w.t * w.psi) as u64;
    Ok(acc)
}

/// w ← w + coeff · Φ(x): touches exactly the `t` selected cells.
pub fn accumulate(w: &mut WeightMatrix, f: &IndexedFeature, coeff: f64) -> Result<()> {
    w.check(f)?;
    for (i, &j) in f.idx.iter().enumerate() {
        w.w[i * w.psi + j as usize] += coeff;
    }
    Ok(())
}

/// Writes `label,h0,…,h{t-1}` rows of cell ids.
pub fn write_features_csv<W: Write>(
    mut out: W,
    rows: impl IntoIterator<Item = (Label, IndexedFeature)>,
    t: usize,
) -> Result<usize> {
    let header: Vec<String> = std::iter::once("label".to_string())
        .chain((0..t).map(|i| format!("h{i}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let mut n = 0;
    for (label, f) in rows {
        let mut line = String::from(match label {
            Label::Pos => "1",
            Label::Neg => "-1",
        });
        for j in f.as_slice() {
            line.push(',');
            line.push_str(&j.to_string());
        }
        writeln!(out, "{line}")?;
        n += 1;
    }
    Ok(n)
}
