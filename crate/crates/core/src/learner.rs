//! Online learners with the hinge loss.
//!
//! * [`DualModel`]: kernelised OGD. Every margin violation appends a support
//!   vector; prediction sums over all of them.
//! * [`IkModel`]: the same update rule in primal form on the Isolation Kernel
//!   feature map. The score is `(1/t)·⟨w, Φ(x)⟩`, so it equals the dual score
//!   under Isolation Kernel while costing `t` additions regardless of how many
//!   updates were accepted.
//! * [`LinearModel`]: linear OGD on dense features, used on Nyström features.
//!
//! A point triggers an update iff `c·f(x) < 1`. The stored coefficient is
//! `α = η` and enters the score as `α·c`.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, SparseVector};
use crate::error::{Error, Result};
use crate::featuremap::{accumulate, efficient_dot_counted, IndexedFeature, Mapper, WeightMatrix};
use crate::kernels::{BaselineKernel, Kernel};
use crate::nystrom::NystromMap;
use crate::ops::OpCounter;

/// Isolation Kernel scores are multiples of η/t, so c·f = 1 happens often.
/// Without slack, summation order alone would decide those updates.
pub const MARGIN_EPS: f64 = 1e-10;

/// max(0, 1 − c·f).
#[derive(Clone, Copy, Debug, Default)]
pub struct HingeLoss;

impl HingeLoss {
    pub fn loss(score: f64, label: Label) -> f64 {
        (1.0 - label.sign() * score).max(0.0)
    }

    /// d/df of the loss: −c inside the margin, 0 outside.
    pub fn subgradient(score: f64, label: Label) -> f64 {
        if Self::violates(score, label) {
            -label.sign()
        } else {
            0.0
        }
    }

    /// c·f < 1, with scores within [`MARGIN_EPS`] of the margin counted as on it.
    pub fn violates(score: f64, label: Label) -> bool {
        label.sign() * score < 1.0 - MARGIN_EPS
    }
}

/// Sign of the score; zero predicts +1.
pub fn predict_label(score: f64) -> Label {
    if score >= 0.0 {
        Label::Pos
    } else {
        Label::Neg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportVector<P> {
    pub point: P,
    pub label: Label,
    pub alpha: f64,
}

/// Kernel expansion f(x) = Σ α_i c_i K(x_i, x) over an unbounded support set.
#[derive(Clone, Debug)]
pub struct DualModel<P, K> {
    svs: Vec<SupportVector<P>>,
    kernel: K,
    eta: f64,
    ops: OpCounter,
}

impl<P: Clone, K: Kernel<P>> DualModel<P, K> {
    pub fn new(kernel: K, eta: f64) -> Self {
        Self {
            svs: Vec::new(),
            kernel,
            eta,
            ops: OpCounter::default(),
        }
    }

    pub fn from_support_vectors(kernel: K, eta: f64, svs: Vec<SupportVector<P>>) -> Self {
        Self {
            svs,
            kernel,
            eta,
            ops: OpCounter::default(),
        }
    }

    /// f(x); one kernel evaluation per support vector.
    pub fn predict(&mut self, x: &P) -> f64 {
        self.ops.kernel_evals += self.svs.len() as u64;
        let kernel = &self.kernel;
        self.svs
            .iter()
            .map(|sv| sv.alpha * sv.label.sign() * kernel.eval(&sv.point, x))
            .sum()
    }

    /// Scores `x`, then adds it as a support vector if the margin is violated.
    pub fn step(&mut self, x: &P, label: Label) -> f64 {
        let score = self.predict(x);
        if HingeLoss::violates(score, label) {
            self.svs.push(SupportVector {
                point: x.clone(),
                label,
                alpha: self.eta,
            });
        }
        score
    }

    pub fn support_vectors(&self) -> &[SupportVector<P>] {
        &self.svs
    }

    pub fn n_support_vectors(&self) -> usize {
        self.svs.len()
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }
}

pub fn predict_dual<P: Clone, K: Kernel<P>>(m: &mut DualModel<P, K>, x: &P) -> f64 {
    m.predict(x)
}

pub fn ogd_step<P: Clone, K: Kernel<P>>(m: &mut DualModel<P, K>, x: &P, label: Label) -> f64 {
    m.step(x, label)
}

/// Primal weights over the Isolation Kernel feature space.
#[derive(Clone, Debug, PartialEq)]
pub struct IkModel {
    w: WeightMatrix,
    eta: f64,
    accepted: u64,
    ops: OpCounter,
}

impl IkModel {
    pub fn new(t: usize, psi: usize, eta: f64) -> Self {
        Self::from_weights(WeightMatrix::zeros(t, psi), eta, 0)
    }

    pub fn for_mapper(mapper: &Mapper, eta: f64) -> Self {
        Self::new(mapper.t(), mapper.psi(), eta)
    }

    pub fn from_weights(w: WeightMatrix, eta: f64, accepted: u64) -> Self {
        Self {
            w,
            eta,
            accepted,
            ops: OpCounter::default(),
        }
    }

    /// (1/t)·⟨w, Φ(x)⟩; `t` additions.
    pub fn score(&mut self, f: &IndexedFeature) -> Result<f64> {
        let dot = efficient_dot_counted(&self.w, f, &mut self.ops)
            .map_err(|e| Error::Provenance(format!("feature does not match model: {e}")))?;
        Ok(dot / self.w.t() as f64)
    }

    /// Scores, then on a margin violation adds η·c to the `t` selected weights.
    pub fn step(&mut self, f: &IndexedFeature, label: Label) -> Result<f64> {
        let score = self.score(f)?;
        if HingeLoss::violates(score, label) {
            accumulate(&mut self.w, f, self.eta * label.sign())?;
            self.accepted += 1;
        }
        Ok(score)
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.w
    }

    pub fn accepted_updates(&self) -> u64 {
        self.accepted
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }
}

pub fn ik_ogd_step(m: &mut IkModel, f: &IndexedFeature, label: Label) -> Result<f64> {
    m.step(f, label)
}

/// Linear OGD on dense features.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    w: Vec<f64>,
    eta: f64,
    accepted: u64,
    ops: OpCounter,
}

impl LinearModel {
    pub fn new(dim: usize, eta: f64) -> Self {
        Self::from_weights(vec![0.0; dim], eta, 0)
    }

    pub fn from_weights(w: Vec<f64>, eta: f64, accepted: u64) -> Self {
        Self {
            w,
            eta,
            accepted,
            ops: OpCounter::default(),
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.w.len() {
            return Err(Error::Shape {
                expected: format!("feature of length {}", self.w.len()),
                got: format!("length {}", x.len()),
            });
        }
        Ok(())
    }

    pub fn score(&mut self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        self.ops.mults += x.len() as u64;
        Ok(self.w.iter().zip(x).map(|(w, v)| w * v).sum())
    }

    pub fn step(&mut self, x: &[f64], label: Label) -> Result<f64> {
        let score = self.score(x)?;
        if HingeLoss::violates(score, label) {
            let c = self.eta * label.sign();
            for (w, v) in self.w.iter_mut().zip(x) {
                *w += c * v;
            }
            self.accepted += 1;
        }
        Ok(score)
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn accepted_updates(&self) -> u64 {
        self.accepted
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }
}

pub fn nogd_step(m: &mut LinearModel, x: &[f64], label: Label) -> Result<f64> {
    m.step(x, label)
}

/// The four learner configurations compared by the evaluation protocols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearnerKind {
    #[serde(rename = "ogd")]
    Ogd,
    #[serde(rename = "ik-ogd-iforest")]
    IkOgdIForest,
    #[serde(rename = "ik-ogd-anne")]
    IkOgdAnne,
    #[serde(rename = "nogd")]
    Nogd,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Ogd,
        LearnerKind::IkOgdIForest,
        LearnerKind::IkOgdAnne,
        LearnerKind::Nogd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::Ogd => "ogd",
            LearnerKind::IkOgdIForest => "ik-ogd-iforest",
            LearnerKind::IkOgdAnne => "ik-ogd-anne",
            LearnerKind::Nogd => "nogd",
        }
    }

    /// Whether ψ is a per-partitioning sample size (and so bounded by the data size).
    pub fn samples_psi(&self) -> bool {
        matches!(self, LearnerKind::IkOgdIForest | LearnerKind::IkOgdAnne)
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ogd" => Ok(LearnerKind::Ogd),
            "ik-ogd-iforest" | "ik-ogd" => Ok(LearnerKind::IkOgdIForest),
            "ik-ogd-anne" => Ok(LearnerKind::IkOgdAnne),
            "nogd" => Ok(LearnerKind::Nogd),
            other => Err(Error::Parameter(format!(
                "unknown learner {other:?} (expected ogd, ik-ogd-iforest, ik-ogd-anne or nogd)"
            ))),
        }
    }
}

/// A learner driven by the evaluation protocols.
///
/// Points are first turned into the learner's feature type (which may be
/// done in parallel, since the feature map is frozen), then scored and
/// updated strictly in stream order.
pub trait OnlineLearner: Send + Sync {
    type Feature: Send + Sync;

    fn featurize(&self, x: &SparseVector) -> Self::Feature;

    /// Work done by one `featurize` call.
    fn featurize_cost(&self) -> OpCounter;

    fn score(&mut self, f: &Self::Feature) -> Result<f64>;

    fn step(&mut self, f: &Self::Feature, label: Label) -> Result<f64>;

    fn accepted_updates(&self) -> u64;

    /// Work done by `score`/`step` so far.
    fn ops(&self) -> OpCounter;

    fn checkpoint(&self) -> Checkpoint;
}

/// Dual OGD on a closed-form kernel.
pub type OgdLearner = DualModel<SparseVector, BaselineKernel>;

impl OnlineLearner for OgdLearner {
    type Feature = SparseVector;

    fn featurize(&self, x: &SparseVector) -> SparseVector {
        x.clone()
    }

    fn featurize_cost(&self) -> OpCounter {
        OpCounter::default()
    }

    fn score(&mut self, f: &SparseVector) -> Result<f64> {
        Ok(self.predict(f))
    }

    fn step(&mut self, f: &SparseVector, label: Label) -> Result<f64> {
        Ok(DualModel::step(self, f, label))
    }

    fn accepted_updates(&self) -> u64 {
        self.svs.len() as u64
    }

    fn ops(&self) -> OpCounter {
        self.ops
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(
            self.eta,
            self.svs.len() as u64,
            CheckpointModel::Ogd {
                kernel: self.kernel,
                support_vectors: self.svs.clone(),
            },
        )
    }
}

/// IK-OGD: a frozen mapper plus primal weights.
#[derive(Clone, Debug)]
pub struct IkOgd {
    pub mapper: Mapper,
    pub model: IkModel,
}

impl IkOgd {
    pub fn new(mapper: Mapper, eta: f64) -> Self {
        let model = IkModel::for_mapper(&mapper, eta);
        Self { mapper, model }
    }
}

impl OnlineLearner for IkOgd {
    type Feature = IndexedFeature;

    fn featurize(&self, x: &SparseVector) -> IndexedFeature {
        self.mapper.map_point(x)
    }

    fn featurize_cost(&self) -> OpCounter {
        self.mapper.map_cost()
    }

    fn score(&mut self, f: &IndexedFeature) -> Result<f64> {
        self.model.score(f)
    }

    fn step(&mut self, f: &IndexedFeature, label: Label) -> Result<f64> {
        self.model.step(f, label)
    }

    fn accepted_updates(&self) -> u64 {
        self.model.accepted
    }

    fn ops(&self) -> OpCounter {
        self.model.ops
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(
            self.model.eta,
            self.model.accepted,
            CheckpointModel::IkOgd {
                mapper: self.mapper.clone(),
                weights: self.model.w.clone(),
            },
        )
    }
}

/// NOGD: a frozen Nyström map plus linear weights.
#[derive(Clone, Debug)]
pub struct Nogd {
    pub map: NystromMap<BaselineKernel>,
    pub model: LinearModel,
}

impl Nogd {
    pub fn new(map: NystromMap<BaselineKernel>, eta: f64) -> Self {
        let model = LinearModel::new(map.r(), eta);
        Self { map, model }
    }
}

impl OnlineLearner for Nogd {
    type Feature = Vec<f64>;

    fn featurize(&self, x: &SparseVector) -> Vec<f64> {
        self.map.map(x)
    }

    fn featurize_cost(&self) -> OpCounter {
        self.map.map_cost()
    }

    fn score(&mut self, f: &Vec<f64>) -> Result<f64> {
        self.model.score(f)
    }

    fn step(&mut self, f: &Vec<f64>, label: Label) -> Result<f64> {
        self.model.step(f, label)
    }

    fn accepted_updates(&self) -> u64 {
        self.model.accepted
    }

    fn ops(&self) -> OpCounter {
        self.model.ops
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(
            self.model.eta,
            self.model.accepted,
            CheckpointModel::Nogd {
                nystrom: self.map.clone(),
                weights: self.model.w.clone(),
            },
        )
    }
}

pub const CHECKPOINT_FORMAT: &str = "isokernel-model";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Self-contained snapshot of a trained learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub eta: f64,
    pub accepted_updates: u64,
    pub model: CheckpointModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "kebab-case")]
pub enum CheckpointModel {
    Ogd {
        kernel: BaselineKernel,
        support_vectors: Vec<SupportVector<SparseVector>>,
    },
    IkOgd {
        mapper: Mapper,
        weights: WeightMatrix,
    },
    Nogd {
        nystrom: NystromMap<BaselineKernel>,
        weights: Vec<f64>,
    },
}

/// A learner restored from a checkpoint.
pub enum Restored {
    Ogd(OgdLearner),
    IkOgd(IkOgd),
    Nogd(Nogd),
}

impl Restored {
    /// Score of a raw point.
    pub fn score(&mut self, x: &SparseVector) -> Result<f64> {
        match self {
            Restored::Ogd(m) => OnlineLearner::score(m, x),
            Restored::IkOgd(m) => {
                let f = m.featurize(x);
                m.score(&f)
            }
            Restored::Nogd(m) => {
                let f = m.featurize(x);
                m.score(&f)
            }
        }
    }
}

impl Checkpoint {
    fn new(eta: f64, accepted_updates: u64, model: CheckpointModel) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            eta,
            accepted_updates,
            model,
        }
    }

    pub fn restore(self) -> Restored {
        let eta = self.eta;
        match self.model {
            CheckpointModel::Ogd {
                kernel,
                support_vectors,
            } => Restored::Ogd(DualModel::from_support_vectors(kernel, eta, support_vectors)),
            CheckpointModel::IkOgd { mapper, weights } => Restored::IkOgd(IkOgd {
                mapper,
                model: IkModel::from_weights(weights, eta, self.accepted_updates),
            }),
            CheckpointModel::Nogd { nystrom, weights } => Restored::Nogd(Nogd {
                map: nystrom,
                model: LinearModel::from_weights(weights, eta, self.accepted_updates),
            }),
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let c: Checkpoint = serde_json::from_reader(input)?;
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(Error::Persist(format!(
                "expected {CHECKPOINT_FORMAT} v{CHECKPOINT_VERSION}, found {} v{}",
                c.format, c.version
            )));
        }
        Ok(c)
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dataset, LabeledPoint};
    use crate::featuremap::{fit, kernel};
    use crate::kernels::{IsolationKernel, Laplacian};
    use crate::partition::Scheme;
    use crate::seeding::stream_rng;
    use rand::Rng;

    fn stream(n: usize, seed: u64) -> Vec<LabeledPoint> {
        let mut rng = stream_rng(seed, 0);
        (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                let label = if a * a + b * b < 0.4 { Label::Pos } else { Label::Neg };
                LabeledPoint {
                    x: SparseVector::from_dense(&[a, b]),
                    label,
                }
            })
            .collect()
    }

    #[test]
    fn hinge_loss_pieces() {
        assert_eq!(HingeLoss::loss(0.0, Label::Pos), 1.0);
        assert_eq!(HingeLoss::loss(2.0, Label::Pos), 0.0);
        assert_eq!(HingeLoss::loss(0.5, Label::Neg), 1.5);
        assert_eq!(HingeLoss::subgradient(0.5, Label::Neg), 1.0);
        assert_eq!(HingeLoss::subgradient(0.5, Label::Pos), -1.0);
        assert_eq!(HingeLoss::subgradient(1.0, Label::Pos), 0.0);
    }

    #[test]
    fn sign_prediction() {
        assert_eq!(predict_label(0.0), Label::Pos);
        assert_eq!(predict_label(0.7), Label::Pos);
        assert_eq!(predict_label(-1e-300), Label::Neg);
    }

    #[test]
    fn dual_basics() {
        let k = Laplacian::new(4.0, 2).unwrap();
        let mut m: DualModel<SparseVector, Laplacian> = DualModel::new(k, 0.5);
        let z = SparseVector::from_dense(&[0.1, 0.2]);
        assert_eq!(m.predict(&z), 0.0);
        // cold start always adds
        assert_eq!(m.step(&z, Label::Pos), 0.0);
        assert_eq!(m.n_support_vectors(), 1);
        assert_eq!(m.predict(&z), 0.5);
    }

    /// Kernel with K(x, x) = 1 used to pin scores exactly.
    struct Const(f64);
    impl Kernel<u8> for Const {
        fn eval(&self, x: &u8, y: &u8) -> f64 {
            if x == y {
                1.0
            } else {
                self.0
            }
        }
    }

    #[test]
    fn margin_of_exactly_one_is_not_added() {
        let mut m = DualModel::new(Const(0.0), 1.0);
        m.step(&1u8, Label::Pos);
        assert_eq!(m.n_support_vectors(), 1);
        // score for the same point is now exactly 1 => no update
        assert_eq!(m.step(&1u8, Label::Pos), 1.0);
        assert_eq!(m.n_support_vectors(), 1);
    }

    #[test]
    fn dual_prediction_matches_resummation() {
        let pts = stream(20, 1);
        let k = Laplacian::new(8.0, 2).unwrap();
        let mut m = DualModel::new(k, 0.5);
        let mut rng = stream_rng(1, 9);
        let svs: Vec<SupportVector<SparseVector>> = pts
            .iter()
            .map(|p| SupportVector {
                point: p.x.clone(),
                label: p.label,
                alpha: rng.gen_range(0.1..1.0),
            })
            .collect();
        m = DualModel::from_support_vectors(*m.kernel(), 0.5, svs.clone());
        for q in stream(50, 2) {
            let mut oracle = 0.0;
            for sv in &svs {
                let l1: f64 = sv.point.to_dense(2).iter().zip(q.x.to_dense(2)).map(|(a, b)| (a - b).abs()).sum();
                oracle += sv.alpha * sv.label.sign() * (-(8f64.ln() / 2.0) * l1).exp();
            }
            assert!((m.predict(&q.x) - oracle).abs() <= 1e-12);
        }
    }

    #[test]
    fn support_vector_count_matches_replay() {
        let pts = stream(200, 3);
        let k = Laplacian::new(16.0, 2).unwrap();
        let mut m = DualModel::new(k, 0.5);
        for p in &pts {
            m.step(&p.x, p.label);
        }
        // independent replay keeping its own list
        let mut kept: Vec<(SparseVector, f64)> = Vec::new();
        let mut violations = 0;
        for p in &pts {
            let f: f64 = kept.iter().map(|(z, c)| 0.5 * c * k.eval(z, &p.x)).sum();
            if p.label.sign() * f < 1.0 {
                violations += 1;
                kept.push((p.x.clone(), p.label.sign()));
            }
        }
        assert_eq!(m.n_support_vectors(), violations);
    }

    #[test]
    fn ik_cold_start_and_twin() {
        let pts = stream(300, 4);
        let d = Dataset::new("s", pts.clone());
        let mapper = fit(&d, 16, 50, Scheme::Anne, 4).unwrap();
        let mut ik = IkModel::for_mapper(&mapper, 0.5);
        let f0 = mapper.map_point(&pts[0].x);
        assert_eq!(ik.step(&f0, pts[0].label).unwrap(), 0.0);
        assert_eq!(ik.score(&f0).unwrap(), 0.5 * pts[0].label.sign());

        let mut ik = IkModel::for_mapper(&mapper, 0.5);
        let mut twin = DualModel::new(IsolationKernel, 0.5);
        for p in &pts {
            let f = mapper.map_point(&p.x);
            let a = ik.step(&f, p.label).unwrap();
            let b = twin.step(&f, p.label);
            assert!((a - b).abs() <= 1e-9, "a={a:.17} b={b:.17}");
        }
        assert_eq!(ik.accepted_updates() as usize, twin.n_support_vectors());
        assert!(ik.weights().nonzeros() <= ik.accepted_updates() as usize * 50);

        // weight identity: w = Σ η c_i Φ(x_i) over accepted updates
        let mut rebuilt = WeightMatrix::zeros(50, 16);
        for sv in twin.support_vectors() {
            accumulate(&mut rebuilt, &sv.point, 0.5 * sv.label.sign()).unwrap();
        }
        for (a, b) in rebuilt.as_slice().iter().zip(ik.weights().as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
        let _ = kernel(&f0, &f0);
    }

    #[test]
    fn ik_rejects_foreign_features() {
        let mut ik = IkModel::new(3, 4, 0.5);
        assert!(matches!(
            ik.step(&IndexedFeature::new(vec![0, 1]), Label::Pos),
            Err(Error::Provenance(_))
        ));
    }

    #[test]
    fn linear_model_orthonormal_stream() {
        let mut m = LinearModel::new(3, 0.5);
        let e = |i: usize| -> Vec<f64> { (0..3).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
        assert_eq!(m.step(&e(0), Label::Pos).unwrap(), 0.0);
        m.step(&e(1), Label::Neg).unwrap();
        m.step(&e(0), Label::Pos).unwrap(); // score 0.5 < 1 => second update
        m.step(&e(2), Label::Pos).unwrap();
        assert_eq!(m.weights(), &[1.0, -0.5, 0.5]);
        assert_eq!(m.accepted_updates(), 4);
        assert!(m.step(&[1.0], Label::Pos).is_err());
    }

    #[test]
    fn linear_model_matches_sgd_oracle() {
        let mut rng = stream_rng(6, 0);
        let xs: Vec<(Vec<f64>, Label)> = (0..100)
            .map(|_| {
                let v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let l = if rng.gen_bool(0.5) { Label::Pos } else { Label::Neg };
                (v, l)
            })
            .collect();
        let mut m = LinearModel::new(5, 0.5);
        let mut w = [0.0f64; 5];
        for (x, l) in &xs {
            let s = m.step(x, *l).unwrap();
            let f: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            assert!((s - f).abs() <= 1e-12);
            if l.sign() * f < 1.0 {
                for k in 0..5 {
                    w[k] += 0.5 * l.sign() * x[k];
                }
            }
        }
        for k in 0..5 {
            assert!((m.weights()[k] - w[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn checkpoints_restore_scores() {
        let pts = stream(120, 7);
        let d = Dataset::new("s", pts.clone());
        let mut ik = IkOgd::new(fit(&d, 8, 20, Scheme::IForest, 1).unwrap(), 0.5);
        for p in &pts {
            let f = ik.featurize(&p.x);
            OnlineLearner::step(&mut ik, &f, p.label).unwrap();
        }
        let mut buf = Vec::new();
        ik.checkpoint().write_to(&mut buf).unwrap();
        let mut restored = Checkpoint::read_from(buf.as_slice()).unwrap().restore();
        for p in stream(30, 8) {
            let f = ik.featurize(&p.x);
            assert_eq!(restored.score(&p.x).unwrap(), OnlineLearner::score(&mut ik, &f).unwrap());
        }

        let mut ogd: OgdLearner =
            DualModel::new(BaselineKernel::Laplacian(Laplacian::new(8.0, 2).unwrap()), 0.5);
        for p in &pts {
            DualModel::step(&mut ogd, &p.x, p.label);
        }
        let mut buf = Vec::new();
        ogd.checkpoint().write_to(&mut buf).unwrap();
        let c = Checkpoint::read_from(buf.as_slice()).unwrap();
        assert_eq!(c.accepted_updates as usize, ogd.n_support_vectors());
        let mut restored = c.restore();
        for p in stream(30, 9) {
            assert_eq!(restored.score(&p.x).unwrap(), ogd.predict(&p.x));
        }
    }

    #[test]
    fn learner_kind_parsing() {
        for k in LearnerKind::ALL {
            assert_eq!(k.name().parse::<LearnerKind>().unwrap(), k);
        }
        assert!("svm".parse::<LearnerKind>().is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn primal_matches_dual_on_any_stream(seed in 0u64..1000, psi in 2usize..40, t in 1usize..60, anne in proptest::bool::ANY) {
            let pts = stream(150, seed);
            let d = Dataset::new("s", pts.clone());
            let scheme = if anne { Scheme::Anne } else { Scheme::IForest };
            let mapper = fit(&d, psi, t, scheme, seed).unwrap();
            let mut ik = IkModel::for_mapper(&mapper, 0.5);
            let mut twin = DualModel::new(IsolationKernel, 0.5);
            for p in &pts {
                let f = mapper.map_point(&p.x);
                let a = ik.step(&f, p.label).unwrap();
                let b = twin.step(&f, p.label);
                proptest::prop_assert!((a - b).abs() <= 1e-9);
            }
            proptest::prop_assert_eq!(ik.accepted_updates() as usize, twin.n_support_vectors());
        }
    }
}
