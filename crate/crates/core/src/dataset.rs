//! Sparse points, labelled datasets and LIBSVM text ingestion.
//!
//! A LIBSVM line looks like
//!
//! ```text
//! +1 3:0.5 7:1.0   # optional comment
//! ```
//!
//! Attribute ids are 1-based and must be strictly increasing. Explicit zero
//! values are dropped on parse, so a stored entry is never zero.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in ℝ^d stored as strictly increasing (index, value) pairs.
///
/// Indices are 1-based attribute ids; absent attributes are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
    dim: usize,
}

impl SparseVector {
    /// Builds a vector from (index, value) pairs, dropping zero values.
    ///
    /// Fails if the indices are not strictly increasing, are zero, or exceed `dim`.
    pub fn new(entries: impl IntoIterator<Item = (u32, f64)>, dim: usize) -> Result<Self> {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut last = 0u32;
        for (idx, val) in entries {
            if idx == 0 || idx <= last {
                return Err(Error::Format {
                    line: 0,
                    msg: format!("index {idx} is not strictly increasing and 1-based"),
                });
            }
            if idx as usize > dim {
                return Err(Error::Format {
                    line: 0,
                    msg: format!("index {idx} exceeds dimension {dim}"),
                });
            }
            last = idx;
            if val != 0.0 {
                indices.push(idx);
                values.push(val);
            }
        }
        Ok(Self {
            indices,
            values,
            dim,
        })
    }

    /// The all-zero vector of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
            dim,
        }
    }

    /// Converts a dense slice; element `i` becomes attribute `i + 1`.
    pub fn from_dense(dense: &[f64]) -> Self {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                indices.push(i as u32 + 1);
                values.push(v);
            }
        }
        Self {
            indices,
            values,
            dim: dense.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Value of the 1-based attribute `idx` (zero when absent).
    pub fn get(&self, idx: u32) -> f64 {
        match self.indices.binary_search(&idx) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    /// Returns the same vector with a (possibly larger) declared dimension.
    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = self.dim.max(dim);
        self
    }

    pub fn sq_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Dense copy of length `len`; attributes beyond `len` are ignored.
    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (idx, v) in self.iter() {
            let k = idx as usize - 1;
            if k < len {
                out[k] = v;
            }
        }
        out
    }
}

/// Walks the union of both supports, calling `f` on each coordinate pair.
#[inline]
fn merge_fold(a: &SparseVector, b: &SparseVector, mut f: impl FnMut(f64, f64)) {
    let (mut i, mut j) = (0, 0);
    let (ai, av, bi, bv) = (&a.indices, &a.values, &b.indices, &b.values);
    while i < ai.len() && j < bi.len() {
        match ai[i].cmp(&bi[j]) {
            std::cmp::Ordering::Less => {
                f(av[i], 0.0);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                f(0.0, bv[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                f(av[i], bv[j]);
                i += 1;
                j += 1;
            }
        }
    }
    for &v in &av[i..] {
        f(v, 0.0);
    }
    for &v in &bv[j..] {
        f(0.0, v);
    }
}

/// Squared Euclidean distance; missing indices count as zero.
pub fn sq_distance(a: &SparseVector, b: &SparseVector) -> f64 {
    let mut acc = 0.0;
    merge_fold(a, b, |x, y| {
        let d = x - y;
        acc += d * d;
    });
    acc
}

/// Manhattan distance; missing indices count as zero.
pub fn l1_distance(a: &SparseVector, b: &SparseVector) -> f64 {
    let mut acc = 0.0;
    merge_fold(a, b, |x, y| acc += (x - y).abs());
    acc
}

/// Binary class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
}

impl Label {
    /// +1.0 or -1.0.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    /// Label from a raw value under the sign rule: > 0 is positive.
    pub fn from_raw_sign(raw: f64) -> Self {
        if raw > 0.0 {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: SparseVector,
    pub label: Label,
}

/// How raw LIBSVM labels become {+1, -1}.
///
/// Fixed when a training file is loaded and reused for the matching test file
/// so that both halves agree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LabelMap {
    /// Raw > 0 is +1, everything else is -1.
    Sign,
    /// Exactly two raw values; the larger is +1.
    Pair { negative: f64, positive: f64 },
}

impl LabelMap {
    pub fn apply(&self, raw: f64, line: usize) -> Result<Label> {
        match *self {
            LabelMap::Sign => Ok(Label::from_raw_sign(raw)),
            LabelMap::Pair { negative, positive } => {
                if raw == positive {
                    Ok(Label::Pos)
                } else if raw == negative {
                    Ok(Label::Neg)
                } else {
                    Err(Error::Label(format!(
                        "line {line}: raw label {raw} is neither {negative} nor {positive}"
                    )))
                }
            }
        }
    }

    /// Derives the mapping from the distinct raw labels seen in a file.
    pub fn from_observed(raw: &[f64]) -> Result<Self> {
        let mut distinct: Vec<f64> = Vec::new();
        for &r in raw {
            if !distinct.contains(&r) {
                distinct.push(r);
                if distinct.len() > 2 {
                    return Err(Error::Label(format!(
                        "more than two distinct labels ({:?}); only binary tasks are supported",
                        distinct
                    )));
                }
            }
        }
        Ok(match distinct.as_slice() {
            [a, b] => LabelMap::Pair {
                negative: a.min(*b),
                positive: a.max(*b),
            },
            _ => LabelMap::Sign,
        })
    }
}

/// One parsed line before label mapping.
struct RawRecord {
    label: f64,
    entries: Vec<(u32, f64)>,
    max_index: u32,
}

fn parse_record(line: &str, lineno: usize) -> Result<Option<RawRecord>> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut tokens = content.split_whitespace();
    let Some(label_tok) = tokens.next() else {
        return Ok(None);
    };
    let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("label {label_tok:?} is not a number"),
    })?;
    if !label.is_finite() {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("label {label_tok:?} is not finite"),
        });
    }
    let mut entries = Vec::new();
    let mut last = 0u32;
    for tok in tokens {
        let Some((idx_s, val_s)) = tok.split_once(':') else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("token {tok:?} is not <index>:<value>"),
            });
        };
        if idx_s == "qid" {
            continue;
        }
        let idx: u32 = idx_s.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("index {idx_s:?} is not a positive integer"),
        })?;
        let val: f64 = val_s.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("value {val_s:?} is not a number"),
        })?;
        if !val.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("value {val_s:?} is not finite"),
            });
        }
        if idx == 0 {
            return Err(Error::Format {
                line: lineno,
                msg: "attribute ids are 1-based".into(),
            });
        }
        if idx <= last {
            return Err(Error::Format {
                line: lineno,
                msg: format!("index {idx} follows {last}; indices must be strictly increasing"),
            });
        }
        last = idx;
        if val != 0.0 {
            entries.push((idx, val));
        }
    }
    Ok(Some(RawRecord {
        label,
        entries,
        max_index: last,
    }))
}

fn record_to_point(rec: RawRecord, dim: usize, label: Label) -> LabeledPoint {
    let (indices, values) = rec.entries.into_iter().unzip();
    LabeledPoint {
        x: SparseVector {
            indices,
            values,
            dim,
        },
        label,
    }
}

/// Parses a single LIBSVM line using the sign label rule.
pub fn parse_libsvm_line(line: &str, dim_hint: Option<usize>) -> Result<LabeledPoint> {
    let rec = parse_record(line, 1)?.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "empty line".into(),
    })?;
    let dim = (rec.max_index as usize).max(dim_hint.unwrap_or(0));
    let label = Label::from_raw_sign(rec.label);
    Ok(record_to_point(rec, dim, label))
}

/// Serializes one point back to LIBSVM text.
pub fn format_libsvm_line(p: &LabeledPoint) -> String {
    let mut s = String::from(match p.label {
        Label::Pos => "+1",
        Label::Neg => "-1",
    });
    for (i, v) in p.x.iter() {
        let _ = write!(s, " {i}:{v}");
    }
    s
}

/// A labelled collection sharing one dimensionality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<LabeledPoint>,
    pub dim: usize,
    pub name: String,
}

impl Dataset {
    /// Builds a dataset, lifting every point to the common (maximum) dimension.
    pub fn new(name: impl Into<String>, points: Vec<LabeledPoint>) -> Self {
        let dim = points.iter().map(|p| p.x.dim).max().unwrap_or(0);
        Self::with_dim(name, points, dim)
    }

    pub fn with_dim(name: impl Into<String>, mut points: Vec<LabeledPoint>, dim: usize) -> Self {
        let dim = points.iter().map(|p| p.x.dim).max().unwrap_or(0).max(dim);
        for p in &mut points {
            p.x.dim = dim;
        }
        Self {
            points,
            dim,
            name: name.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledPoint> {
        self.points.iter()
    }

    /// Points at the given positions, in that order.
    pub fn subset(&self, positions: &[usize]) -> Dataset {
        Dataset {
            points: positions.iter().map(|&i| self.points[i].clone()).collect(),
            dim: self.dim,
            name: self.name.clone(),
        }
    }

    /// Seeded permutation of the points.
    pub fn shuffle(&self, seed: u64) -> Dataset {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        self.subset(&order)
    }

    /// First `n` points and the rest.
    pub fn split_head(&self, n: usize) -> Result<(Dataset, Dataset)> {
        if n > self.len() {
            return Err(Error::Size {
                requested: n,
                available: self.len(),
            });
        }
        let head = Dataset {
            points: self.points[..n].to_vec(),
            dim: self.dim,
            name: self.name.clone(),
        };
        let tail = Dataset {
            points: self.points[n..].to_vec(),
            dim: self.dim,
            name: self.name.clone(),
        };
        Ok((head, tail))
    }

    /// Seeded partition of positions into `k` near-equal disjoint folds.
    pub fn kfold_indices(&self, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
        if k < 2 {
            return Err(Error::Parameter(format!("k-fold needs k >= 2, got {k}")));
        }
        if self.len() < k {
            return Err(Error::Size {
                requested: k,
                available: self.len(),
            });
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (base, extra) = (self.len() / k, self.len() % k);
        let mut folds = Vec::with_capacity(k);
        let mut start = 0;
        for f in 0..k {
            let size = base + usize::from(f < extra);
            folds.push(order[start..start + size].to_vec());
            start += size;
        }
        Ok(folds)
    }

    /// `k` (train, validate) pairs; validation folds cover every point once.
    pub fn kfold(&self, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
        let folds = self.kfold_indices(k, seed)?;
        Ok((0..k)
            .map(|f| {
                let train: Vec<usize> = folds
                    .iter()
                    .enumerate()
                    .filter(|(g, _)| *g != f)
                    .flat_map(|(_, idx)| idx.iter().copied())
                    .collect();
                (self.subset(&train), self.subset(&folds[f]))
            })
            .collect())
    }
}

/// Reads LIBSVM text.
///
/// With `label_map = None` the mapping is derived from the file (two distinct
/// raw labels map larger to +1; one distinct label falls back to the sign
/// rule; more than two is an error). The mapping used is returned so a test
/// file can be read with the same one.
pub fn read_libsvm<R: BufRead>(
    reader: R,
    name: &str,
    dim_hint: Option<usize>,
    label_map: Option<LabelMap>,
) -> Result<(Dataset, LabelMap)> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(rec) = parse_record(&line, i + 1)? {
            records.push((i + 1, rec));
        }
    }
    let map = match label_map {
        Some(m) => m,
        None => {
            let raw: Vec<f64> = records.iter().map(|(_, r)| r.label).collect();
            LabelMap::from_observed(&raw)?
        }
    };
    let dim = records
        .iter()
        .map(|(_, r)| r.max_index as usize)
        .max()
        .unwrap_or(0)
        .max(dim_hint.unwrap_or(0));
    let mut points = Vec::with_capacity(records.len());
    for (lineno, rec) in records {
        let label = map.apply(rec.label, lineno)?;
        points.push(record_to_point(rec, dim, label));
    }
    Ok((Dataset::with_dim(name, points, dim), map))
}

/// Reads a LIBSVM file from disk. See [`read_libsvm`].
pub fn load_libsvm(
    path: impl AsRef<Path>,
    dim_hint: Option<usize>,
    label_map: Option<LabelMap>,
) -> Result<(Dataset, LabelMap)> {
    let path = path.as_ref();
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = File::open(path)?;
    read_libsvm(BufReader::new(file), &name, dim_hint, label_map)
}

pub fn write_libsvm<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    for p in &dataset.points {
        writeln!(out, "{}", format_libsvm_line(p))?;
    }
    Ok(())
}

/// Per-attribute min-max scaling to [0, 1], fitted on one dataset and applied to others.
///
/// Constant attributes are mapped to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinMaxScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(dataset: &Dataset) -> Self {
        let d = dataset.dim;
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        let mut counts = vec![0usize; d];
        for p in &dataset.points {
            for (idx, v) in p.x.iter() {
                let k = idx as usize - 1;
                mins[k] = mins[k].min(v);
                maxs[k] = maxs[k].max(v);
                counts[k] += 1;
            }
        }
        for k in 0..d {
            // absent entries are zeros
            if counts[k] < dataset.len() {
                mins[k] = mins[k].min(0.0);
                maxs[k] = maxs[k].max(0.0);
            }
        }
        Self { mins, maxs }
    }

    pub fn transform(&self, x: &SparseVector) -> SparseVector {
        let d = self.mins.len();
        let scale = |k: usize, v: f64| {
            let range = self.maxs[k] - self.mins[k];
            if range > 0.0 {
                (v - self.mins[k]) / range
            } else {
                0.0
            }
        };
        let mut entries = Vec::new();
        let mut cursor = x.iter().peekable();
        for k in 0..d.max(x.dim()) {
            let idx = k as u32 + 1;
            let v = match cursor.peek() {
                Some(&(i, v)) if i == idx => {
                    cursor.next();
                    v
                }
                _ => 0.0,
            };
            let s = if k < d { scale(k, v) } else { v };
            if s != 0.0 {
                entries.push((idx, s));
            }
        }
        let (indices, values) = entries.into_iter().unzip();
        SparseVector {
            indices,
            values,
            dim: x.dim(),
        }
    }

    pub fn transform_dataset(&self, dataset: &Dataset) -> Dataset {
        Dataset {
            points: dataset
                .points
                .iter()
                .map(|p| LabeledPoint {
                    x: self.transform(&p.x),
                    label: p.label,
                })
                .collect(),
            dim: dataset.dim,
            name: dataset.name.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn dense_sq(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    fn random_sparse(rng: &mut impl Rng, dim: usize, density: f64) -> SparseVector {
        let dense: Vec<f64> = (0..dim)
            .map(|_| {
                if rng.gen::<f64>() < density {
                    rng.gen_range(-3.0..3.0)
                } else {
                    0.0
                }
            })
            .collect();
        SparseVector::from_dense(&dense)
    }

    #[test]
    fn parses_basic_line() {
        let p = parse_libsvm_line("+1 3:0.5 7:1.0", None).unwrap();
        assert_eq!(p.label, Label::Pos);
        assert_eq!(p.x.iter().collect::<Vec<_>>(), vec![(3, 0.5), (7, 1.0)]);
        assert_eq!(p.x.dim(), 7);
    }

    #[test]
    fn label_only_line_is_zero_vector() {
        let p = parse_libsvm_line("-1", None).unwrap();
        assert_eq!(p.label, Label::Neg);
        assert_eq!(p.x.nnz(), 0);
    }

    #[test]
    fn explicit_zero_is_dropped() {
        let p = parse_libsvm_line("1 2:0 4:3", None).unwrap();
        assert_eq!(p.x.iter().collect::<Vec<_>>(), vec![(4, 3.0)]);
        assert_eq!(p.x.dim(), 4);
    }

    #[test]
    fn dim_hint_only_grows() {
        assert_eq!(parse_libsvm_line("1 4:3", Some(10)).unwrap().x.dim(), 10);
        assert_eq!(parse_libsvm_line("1 4:3", Some(2)).unwrap().x.dim(), 4);
    }

    #[test]
    fn malformed_and_unordered_lines_fail() {
        assert!(matches!(
            parse_libsvm_line("1 3-0.5", None),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_libsvm_line("abc 1:1", None),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_libsvm_line("1 5:1 3:1", None),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            parse_libsvm_line("1 3:1 3:2", None),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            parse_libsvm_line("1 0:1", None),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let text = "+1 1:1\n-1 2:1\n+1 2:x\n";
        match read_libsvm(text.as_bytes(), "t", None, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_mapping_policy() {
        let (d, map) = read_libsvm("2 1:1\n4 1:2\n2 2:1\n".as_bytes(), "t", None, None).unwrap();
        assert_eq!(
            map,
            LabelMap::Pair {
                negative: 2.0,
                positive: 4.0
            }
        );
        let labels: Vec<_> = d.iter().map(|p| p.label).collect();
        assert_eq!(labels, vec![Label::Neg, Label::Pos, Label::Neg]);
        assert_eq!(d.dim, 2);
        assert!(d.iter().all(|p| p.x.dim() == 2));

        assert!(matches!(
            read_libsvm("0 1:1\n1 1:1\n2 1:1\n".as_bytes(), "t", None, None),
            Err(Error::Label(_))
        ));
        // reusing a train mapping on a test file with an unseen label fails
        assert!(read_libsvm("3 1:1\n".as_bytes(), "t", None, Some(map)).is_err());
    }

    #[test]
    fn sq_distance_single_coordinate() {
        let a = SparseVector::new([(1, 3.0)], 1).unwrap();
        let b = SparseVector::zeros(1);
        assert_eq!(sq_distance(&a, &b), 9.0);
    }

    #[test]
    fn sq_distance_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_sparse(&mut rng, 30, 0.3);
            let b = random_sparse(&mut rng, 30, 0.3);
            let oracle = dense_sq(&a.to_dense(30), &b.to_dense(30));
            assert!((sq_distance(&a, &b) - oracle).abs() <= 1e-12);
            assert_eq!(sq_distance(&a, &a), 0.0);
        }
    }

    #[test]
    fn stored_zeros_do_not_change_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_sparse(&mut rng, 20, 0.4);
            let b = random_sparse(&mut rng, 20, 0.4);
            // the same vector written with explicit zeros on every attribute
            let dense_line: String = a
                .to_dense(20)
                .iter()
                .enumerate()
                .map(|(i, v)| format!(" {}:{}", i + 1, v))
                .collect();
            let with_zeros = parse_libsvm_line(&format!("1{dense_line}"), None).unwrap().x;
            assert_eq!(with_zeros.iter().collect::<Vec<_>>(), a.iter().collect::<Vec<_>>());
            assert_eq!(sq_distance(&with_zeros, &b), sq_distance(&a, &b));
            assert_eq!(with_zeros.dot(&b), a.dot(&b));
        }
    }

    #[test]
    fn shuffle_split_and_kfold() {
        let points: Vec<_> = (0..10)
            .map(|i| LabeledPoint {
                x: SparseVector::from_dense(&[i as f64]),
                label: Label::Pos,
            })
            .collect();
        let d = Dataset::new("toy", points);
        assert_eq!(d.shuffle(3), d.shuffle(3));
        assert_ne!(d.shuffle(3), d.shuffle(4));

        let (head, tail) = d.split_head(d.len()).unwrap();
        assert_eq!(head, d);
        assert!(tail.is_empty());
        assert!(matches!(d.split_head(11), Err(Error::Size { .. })));

        let folds = d.kfold_indices(5, 1).unwrap();
        assert!(folds.iter().all(|f| f.len() == 2));
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert!(d.kfold(1, 0).is_err());
        for (train, val) in d.kfold(5, 1).unwrap() {
            assert_eq!(train.len(), 8);
            assert_eq!(val.len(), 2);
        }
    }

    #[test]
    fn minmax_scaler_maps_to_unit_range() {
        let pts = [[-2.0, 0.0], [2.0, 4.0], [0.0, 2.0]]
            .iter()
            .map(|r| LabeledPoint {
                x: SparseVector::from_dense(r),
                label: Label::Neg,
            })
            .collect();
        let d = Dataset::new("s", pts);
        let s = MinMaxScaler::fit(&d);
        let t = s.transform_dataset(&d);
        assert_eq!(t.points[0].x.to_dense(2), vec![0.0, 0.0]);
        assert_eq!(t.points[1].x.to_dense(2), vec![1.0, 1.0]);
        assert_eq!(t.points[2].x.to_dense(2), vec![0.5, 0.5]);
    }

    fn arb_point() -> impl Strategy<Value = LabeledPoint> {
        (
            any::<bool>(),
            proptest::collection::btree_map(1u32..60, -1e6f64..1e6, 0..12),
        )
            .prop_map(|(pos, m)| LabeledPoint {
                x: SparseVector::new(m, 60).unwrap(),
                label: if pos { Label::Pos } else { Label::Neg },
            })
    }

    proptest! {
        #[test]
        fn libsvm_round_trip(p in arb_point()) {
            let back = parse_libsvm_line(&format_libsvm_line(&p), Some(60)).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn distance_triangle_inequality(
            a in proptest::collection::vec(-5.0f64..5.0, 8),
            b in proptest::collection::vec(-5.0f64..5.0, 8),
            c in proptest::collection::vec(-5.0f64..5.0, 8),
        ) {
            let (a, b, c) = (
                SparseVector::from_dense(&a),
                SparseVector::from_dense(&b),
                SparseVector::from_dense(&c),
            );
            let ab = sq_distance(&a, &b).sqrt();
            let bc = sq_distance(&b, &c).sqrt();
            let ac = sq_distance(&a, &c).sqrt();
            prop_assert!(ac <= ab + bc + 1e-9);
            prop_assert_eq!(sq_distance(&a, &b), sq_distance(&b, &a));
        }

        #[test]
        fn kfold_covers_every_index_once(n in 2usize..80, k in 2usize..10, seed in any::<u64>()) {
            prop_assume!(n >= k);
            let d = Dataset::new("p", (0..n).map(|_| LabeledPoint {
                x: SparseVector::zeros(1), label: Label::Pos }).collect());
            let folds = d.kfold_indices(k, seed).unwrap();
            let mut seen = vec![0u8; n];
            for f in &folds {
                prop_assert!(f.len() == n / k || f.len() == n / k + 1);
                for &i in f { seen[i] += 1; }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }
}
