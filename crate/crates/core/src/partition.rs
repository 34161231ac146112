//! The two isolation mechanisms.
//!
//! A [`Partitioning`] is built from ψ sample points and sends every point of
//! ℝ^d to exactly one cell. Two forms exist:
//!
//! * [`ITree`]: a fully grown random tree with axis-parallel splits. Growth stops
//!   only when a node holds one sample point or points that agree on every
//!   attribute, so there is no height limit.
//! * [`VoronoiPartition`]: the Voronoi diagram of the sample under Euclidean
//!   distance; cell `i` belongs to `centers[i]`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SparseVector};
use crate::error::{Error, Result};

/// Which isolation mechanism a partitioning uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    IForest,
    Anne,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::IForest => "iforest",
            Scheme::Anne => "anne",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iforest" | "tree" => Ok(Scheme::IForest),
            "anne" | "voronoi" => Ok(Scheme::Anne),
            other => Err(Error::Parameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Draws `psi` distinct positions out of `n`, uniformly without replacement.
pub fn sample_positions<R: Rng + ?Sized>(n: usize, psi: usize, rng: &mut R) -> Result<Vec<usize>> {
    if psi > n {
        return Err(Error::Sample {
            requested: psi,
            available: n,
        });
    }
    Ok(index::sample(rng, n, psi).into_vec())
}

/// Draws a ψ-point sample of the dataset without replacement.
pub fn sample_psi<R: Rng + ?Sized>(
    dataset: &Dataset,
    psi: usize,
    rng: &mut R,
) -> Result<Vec<SparseVector>> {
    Ok(sample_positions(dataset.len(), psi, rng)?
        .into_iter()
        .map(|i| dataset.points[i].x.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        attr: u32,
        value: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        cell: u32,
    },
}

/// A fully grown isolation tree. Node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ITree {
    nodes: Vec<Node>,
    n_leaves: usize,
}

/// Attributes whose node-local range is non-degenerate, with that range.
///
/// Absent attributes read as zero, so an attribute carried by only some
/// members also has zero in its range.
fn split_candidates(sample: &[SparseVector], members: &[usize]) -> Vec<(u32, f64, f64)> {
    let mut entries: Vec<(u32, f64)> = members
        .iter()
        .flat_map(|&m| sample[m].iter())
        .collect();
    entries.sort_by_key(|e| e.0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let attr = entries[i].0;
        let (mut lo, mut hi, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0usize);
        while i < entries.len() && entries[i].0 == attr {
            lo = lo.min(entries[i].1);
            hi = hi.max(entries[i].1);
            count += 1;
            i += 1;
        }
        if count < members.len() {
            lo = lo.min(0.0);
            hi = hi.max(0.0);
        }
        if lo < hi {
            out.push((attr, lo, hi));
        }
    }
    out
}

/// Uniform draw from the open interval (lo, hi).
///
/// When no float lies strictly inside (adjacent floats) `hi` is returned,
/// which still separates the two values under the `x < p` rule.
fn split_point<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    for _ in 0..64 {
        let p = lo + rng.gen::<f64>() * (hi - lo);
        if p > lo && p < hi {
            return p;
        }
    }
    hi
}

/// Grows an isolation tree on the sample until every point is isolated.
///
/// Leaf ids are dense and assigned depth-first, left subtree first.
pub fn build_itree<R: Rng + ?Sized>(sample: &[SparseVector], rng: &mut R) -> ITree {
    let mut nodes = vec![Node::Leaf { cell: 0 }];
    let mut n_leaves = 0u32;
    // (node slot, member positions); LIFO with left pushed last => left-first DFS
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, (0..sample.len()).collect())];
    while let Some((slot, members)) = stack.pop() {
        let candidates = if members.len() > 1 {
            split_candidates(sample, &members)
        } else {
            Vec::new()
        };
        if candidates.is_empty() {
            nodes[slot] = Node::Leaf { cell: n_leaves };
            n_leaves += 1;
            continue;
        }
        let (attr, lo, hi) = candidates[rng.gen_range(0..candidates.len())];
        let value = split_point(lo, hi, rng);
        let (left_m, right_m): (Vec<usize>, Vec<usize>) =
            members.into_iter().partition(|&m| sample[m].get(attr) < value);
        debug_assert!(!left_m.is_empty() && !right_m.is_empty());
        let left = nodes.len();
        nodes.push(Node::Leaf { cell: 0 });
        let right = nodes.len();
        nodes.push(Node::Leaf { cell: 0 });
        nodes[slot] = Node::Split {
            attr,
            value,
            left: left as u32,
            right: right as u32,
        };
        stack.push((right, right_m));
        stack.push((left, left_m));
    }
    ITree {
        nodes,
        n_leaves: n_leaves as usize,
    }
}

impl ITree {
    /// Leaf reached by descending: left iff `x[attr] < value`.
    pub fn assign(&self, x: &SparseVector) -> usize {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { cell } => return *cell as usize,
                Node::Split {
                    attr,
                    value,
                    left,
                    right,
                } => {
                    at = if x.get(*attr) < *value {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + go(nodes, *left as usize).max(go(nodes, *right as usize))
                }
            }
        }
        go(&self.nodes, 0)
    }
}

pub fn itree_assign(tree: &ITree, x: &SparseVector) -> usize {
    tree.assign(x)
}

/// Voronoi diagram of a sample; cell `i` is the region nearest `centers[i]`.
///
/// Besides the centers it keeps their squared norms and a by-attribute
/// (inverted) copy of the center coordinates, so one assignment costs
/// O(ψ + Σ_{j ∈ supp(x)} #centers using j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "VoronoiRepr", into = "VoronoiRepr")]
pub struct VoronoiPartition {
    centers: Vec<SparseVector>,
    center_sq_norms: Vec<f64>,
    attrs: Vec<u32>,
    starts: Vec<usize>,
    entries: Vec<(u32, f64)>,
}

#[derive(Serialize, Deserialize)]
struct VoronoiRepr {
    centers: Vec<SparseVector>,
}

impl From<VoronoiRepr> for VoronoiPartition {
    fn from(r: VoronoiRepr) -> Self {
        build_voronoi(r.centers)
    }
}

impl From<VoronoiPartition> for VoronoiRepr {
    fn from(v: VoronoiPartition) -> Self {
        VoronoiRepr { centers: v.centers }
    }
}

pub fn build_voronoi(centers: Vec<SparseVector>) -> VoronoiPartition {
    let center_sq_norms = centers.iter().map(SparseVector::sq_norm).collect();
    let mut flat: Vec<(u32, u32, f64)> = centers
        .iter()
        .enumerate()
        .flat_map(|(c, z)| z.iter().map(move |(a, v)| (a, c as u32, v)))
        .collect();
    flat.sort_by_key(|&(a, c, _)| (a, c));
    let mut attrs = Vec::new();
    let mut starts = Vec::new();
    let mut entries = Vec::with_capacity(flat.len());
    for (a, c, v) in flat {
        if attrs.last() != Some(&a) {
            attrs.push(a);
            starts.push(entries.len());
        }
        entries.push((c, v));
    }
    starts.push(entries.len());
    VoronoiPartition {
        centers,
        center_sq_norms,
        attrs,
        starts,
        entries,
    }
}

impl VoronoiPartition {
    pub fn centers(&self) -> &[SparseVector] {
        &self.centers
    }

    pub fn center_sq_norms(&self) -> &[f64] {
        &self.center_sq_norms
    }

    /// ‖z‖² − 2⟨x, z⟩ for every center z, written into `scores`.
    ///
    /// This is the squared distance minus the constant ‖x‖².
    pub fn partial_scores(&self, x: &SparseVector, scores: &mut Vec<f64>) {
        scores.clear();
        scores.extend_from_slice(&self.center_sq_norms);
        for (a, v) in x.iter() {
            if let Ok(k) = self.attrs.binary_search(&a) {
                let m = -2.0 * v;
                for &(c, zv) in &self.entries[self.starts[k]..self.starts[k + 1]] {
                    scores[c as usize] += m * zv;
                }
            }
        }
    }

    /// Nearest center; ties go to the lowest index.
    pub fn assign_with(&self, x: &SparseVector, scratch: &mut Vec<f64>) -> usize {
        self.partial_scores(x, scratch);
        let mut best = 0;
        let mut best_score = f64::INFINITY;
        for (i, &s) in scratch.iter().enumerate() {
            if s < best_score {
                best_score = s;
                best = i;
            }
        }
        best
    }

    pub fn assign(&self, x: &SparseVector) -> usize {
        self.assign_with(x, &mut Vec::with_capacity(self.centers.len()))
    }
}

pub fn voronoi_assign(part: &VoronoiPartition, x: &SparseVector) -> usize {
    part.assign(x)
}

/// One partitioning H of ℝ^d into at most ψ cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum Partitioning {
    #[serde(rename = "iforest")]
    Tree(ITree),
    #[serde(rename = "anne")]
    Voronoi(VoronoiPartition),
}

impl Partitioning {
    /// Builds a partitioning of the given scheme from a ψ-point sample.
    pub fn build<R: Rng + ?Sized>(scheme: Scheme, sample: Vec<SparseVector>, rng: &mut R) -> Self {
        match scheme {
            Scheme::IForest => Partitioning::Tree(build_itree(&sample, rng)),
            Scheme::Anne => Partitioning::Voronoi(build_voronoi(sample)),
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            Partitioning::Tree(_) => Scheme::IForest,
            Partitioning::Voronoi(_) => Scheme::Anne,
        }
    }

    /// Number of cells actually present (≤ ψ).
    pub fn n_cells(&self) -> usize {
        match self {
            Partitioning::Tree(t) => t.n_leaves(),
            Partitioning::Voronoi(v) => v.centers.len(),
        }
    }

    pub fn assign(&self, x: &SparseVector) -> usize {
        match self {
            Partitioning::Tree(t) => t.assign(x),
            Partitioning::Voronoi(v) => v.assign(x),
        }
    }

    /// As [`assign`](Self::assign) but reuses a caller-owned buffer.
    pub fn assign_with(&self, x: &SparseVector, scratch: &mut Vec<f64>) -> usize {
        match self {
            Partitioning::Tree(t) => t.assign(x),
            Partitioning::Voronoi(v) => v.assign_with(x, scratch),
        }
    }
}
