//! Experimental protocols: ψ selection by cross-validation, online
//! test-then-train over blocks, batch train/test, and parameter sweeps.
//!
//! Every learner in a comparison sees the same shuffled stream: the shuffle
//! depends only on `ProtocolConfig::seed`, never on the learner kind.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabeledPoint, MinMaxScaler};
use crate::error::{Error, Result};
use crate::featuremap::fit;
use crate::kernels::{BaselineKernel, Laplacian};
use crate::learner::{predict_label, Checkpoint, DualModel, IkOgd, LearnerKind, Nogd, OgdLearner, OnlineLearner};
use crate::nystrom::fit_nystrom;
use crate::ops::OpCounter;
use crate::partition::Scheme;
use crate::seeding::derive_seed;

pub const METRICS_SCHEMA_VERSION: u32 = 1;

const TAG_MAPPER: u64 = 1;
const TAG_LANDMARKS: u64 = 2;
const TAG_FOLDS: u64 = 3;

/// Everything a protocol run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub learner: LearnerKind,
    pub eta: f64,
    pub t: usize,
    pub b: usize,
    pub r: usize,
    pub psi_grid: Vec<usize>,
    /// Fixed ψ; skips cross-validation.
    pub psi: Option<usize>,
    pub block_size: usize,
    pub folds: usize,
    pub seed: u64,
    /// Size of the initial training head in the online protocol.
    /// `None` means half the data.
    pub initial_train: Option<usize>,
    /// Per-attribute min-max scaling fitted on the training part.
    pub normalize: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            learner: LearnerKind::IkOgdIForest,
            eta: 0.5,
            t: 100,
            b: 100,
            r: 20,
            psi_grid: (2..=12).map(|k| 1usize << k).collect(),
            psi: None,
            block_size: 1000,
            folds: 5,
            seed: 0,
            initial_train: None,
            normalize: false,
        }
    }
}

impl ProtocolConfig {
    pub fn for_learner(learner: LearnerKind) -> Self {
        Self {
            learner,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.psi_grid.is_empty() && self.psi.is_none() {
            return bad("psi grid is empty".into());
        }
        if self.block_size == 0 {
            return bad("block size must be at least 1".into());
        }
        if self.folds < 2 {
            return bad(format!("need at least 2 CV folds, got {}", self.folds));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if self.t == 0 {
            return bad("t must be at least 1".into());
        }
        if self.r == 0 || self.r > self.b {
            return bad(format!("need 1 <= r <= b, got r = {}, b = {}", self.r, self.b));
        }
        for &psi in self.psi.iter().chain(&self.psi_grid) {
            if psi < 2 {
                return bad(format!("psi must be at least 2, got {psi}"));
            }
        }
        Ok(())
    }
}

/// Accuracy after one block of the stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockMetrics {
    pub index: usize,
    pub size: usize,
    pub correct: usize,
    pub cumulative_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvScore {
    pub psi: usize,
    pub accuracy: f64,
}

/// Outcome of cross-validated ψ selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub psi: usize,
    pub scores: Vec<CvScore>,
    pub skipped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub schema_version: u32,
    pub protocol: String,
    pub dataset: String,
    pub config: ProtocolConfig,
    pub selected_psi: usize,
    pub cv: Option<CvResult>,
    pub n_train: usize,
    pub blocks: Vec<BlockMetrics>,
    pub n_predictions: usize,
    pub n_correct: usize,
    pub final_accuracy: f64,
    pub train_seconds: f64,
    pub test_seconds: f64,
    pub accepted_updates: u64,
    /// Work spent on all recorded predictions, feature mapping included.
    pub prediction_ops: OpCounter,
    pub ops_per_prediction: f64,
    /// Set when the stream had fewer points than one block.
    pub degenerate: bool,
    /// Whether each recorded prediction was correct, in stream order.
    #[serde(skip)]
    pub correct_log: Vec<bool>,
}

impl Metrics {
    /// Same run up to wall-clock time.
    pub fn same_outcome(&self, other: &Metrics) -> bool {
        let strip = |m: &Metrics| Metrics {
            train_seconds: 0.0,
            test_seconds: 0.0,
            ..m.clone()
        };
        strip(self) == strip(other)
    }
}

enum AnyLearner {
    Ogd(OgdLearner),
    Ik(IkOgd),
    Nogd(Nogd),
}

macro_rules! dispatch {
    ($learner:expr, $l:ident => $body:expr) => {
        match $learner {
            AnyLearner::Ogd($l) => $body,
            AnyLearner::Ik($l) => $body,
            AnyLearner::Nogd($l) => $body,
        }
    };
}

fn laplacian(psi: usize, dim: usize) -> Result<BaselineKernel> {
    Ok(BaselineKernel::Laplacian(Laplacian::new(psi as f64, dim.max(1))?))
}

/// Fits the frozen part of a learner (mapper or landmarks) on `train`.
fn build(cfg: &ProtocolConfig, train: &Dataset, psi: usize) -> Result<AnyLearner> {
    Ok(match cfg.learner {
        LearnerKind::Ogd => AnyLearner::Ogd(DualModel::new(laplacian(psi, train.dim)?, cfg.eta)),
        LearnerKind::IkOgdIForest | LearnerKind::IkOgdAnne => {
            let scheme = if cfg.learner == LearnerKind::IkOgdAnne {
                Scheme::Anne
            } else {
                Scheme::IForest
            };
            let mapper = fit(train, psi, cfg.t, scheme, derive_seed(cfg.seed, TAG_MAPPER))?;
            AnyLearner::Ik(IkOgd::new(mapper, cfg.eta))
        }
        LearnerKind::Nogd => {
            let kernel = laplacian(psi, train.dim)?;
            let map = fit_nystrom(train, cfg.b, cfg.r, kernel, derive_seed(cfg.seed, TAG_LANDMARKS))?;
            AnyLearner::Nogd(Nogd::new(map, cfg.eta))
        }
    })
}

fn featurize_all<L: OnlineLearner>(l: &L, points: &[LabeledPoint]) -> Vec<L::Feature> {
    points.par_iter().map(|p| l.featurize(&p.x)).collect()
}

fn update_all<L: OnlineLearner>(l: &mut L, feats: &[L::Feature], points: &[LabeledPoint]) -> Result<()> {
    for (f, p) in feats.iter().zip(points) {
        l.step(f, p.label)?;
    }
    Ok(())
}

/// One pass of online updates over `points`, in order.
fn train_epoch<L: OnlineLearner>(l: &mut L, points: &[LabeledPoint]) -> Result<()> {
    let feats = featurize_all(l, points);
    update_all(l, &feats, points)
}

/// Scores `points` with the current model; returns the features for reuse
/// and whether each prediction was correct.
fn predict_all<L: OnlineLearner>(
    l: &mut L,
    points: &[LabeledPoint],
    ops: &mut OpCounter,
) -> Result<(Vec<L::Feature>, Vec<bool>)> {
    let feats = featurize_all(l, points);
    let before = l.ops();
    let mut correct = Vec::with_capacity(points.len());
    for (f, p) in feats.iter().zip(points) {
        correct.push(predict_label(l.score(f)?) == p.label);
    }
    *ops += l.ops().saturating_sub(&before);
    *ops += l.featurize_cost() * points.len() as u64;
    Ok((feats, correct))
}

fn accuracy(correct: &[bool]) -> f64 {
    if correct.is_empty() {
        return 0.0;
    }
    correct.iter().filter(|&&c| c).count() as f64 / correct.len() as f64
}

/// Trains on `train` for one epoch at the given ψ and scores `test`.
fn fit_and_score(cfg: &ProtocolConfig, train: &Dataset, test: &Dataset, psi: usize) -> Result<f64> {
    let mut learner = build(cfg, train, psi)?;
    dispatch!(&mut learner, l => {
        train_epoch(l, &train.points)?;
        let (_, correct) = predict_all(l, &test.points, &mut OpCounter::default())?;
        Ok(accuracy(&correct))
    })
}

/// Mean validation accuracy per ψ over `cfg.folds` folds; returns the best ψ
/// (ties go to the smallest).
///
/// For the Isolation Kernel learners a ψ larger than a fold's training part
/// cannot be sampled and is skipped with a warning.
pub fn cv_select_psi(train: &Dataset, cfg: &ProtocolConfig) -> Result<CvResult> {
    cfg.validate()?;
    let folds = train.kfold(cfg.folds, derive_seed(cfg.seed, TAG_FOLDS))?;
    let smallest_fold_train = folds.iter().map(|(tr, _)| tr.len()).min().unwrap_or(0);
    let (grid, skipped): (Vec<usize>, Vec<usize>) = cfg
        .psi_grid
        .iter()
        .partition(|&&psi| !cfg.learner.samples_psi() || psi <= smallest_fold_train);
    for psi in &skipped {
        log::warn!("skipping psi = {psi}: larger than the fold training size {smallest_fold_train}");
    }
    if grid.is_empty() {
        return Err(Error::Config(format!(
            "every psi in the grid exceeds the fold training size {smallest_fold_train}"
        )));
    }
    let cells: Vec<(usize, usize)> = grid
        .iter()
        .flat_map(|&psi| (0..folds.len()).map(move |f| (psi, f)))
        .collect();
    let accs = cells
        .par_iter()
        .map(|&(psi, f)| fit_and_score(cfg, &folds[f].0, &folds[f].1, psi))
        .collect::<Result<Vec<f64>>>()?;
    let scores: Vec<CvScore> = grid
        .iter()
        .enumerate()
        .map(|(g, &psi)| {
            let chunk = &accs[g * folds.len()..(g + 1) * folds.len()];
            CvScore {
                psi,
                accuracy: chunk.iter().sum::<f64>() / chunk.len() as f64,
            }
        })
        .collect();
    let mut best = &scores[0];
    for s in &scores[1..] {
        if s.accuracy > best.accuracy || (s.accuracy == best.accuracy && s.psi < best.psi) {
            best = s;
        }
    }
    Ok(CvResult {
        psi: best.psi,
        scores: scores.clone(),
        skipped,
    })
}

fn resolve_psi(train: &Dataset, cfg: &ProtocolConfig) -> Result<(usize, Option<CvResult>)> {
    match cfg.psi {
        Some(psi) => Ok((psi, None)),
        None => {
            let cv = cv_select_psi(train, cfg)?;
            Ok((cv.psi, Some(cv)))
        }
    }
}

fn scale(cfg: &ProtocolConfig, train: Dataset, rest: Dataset) -> (Dataset, Dataset) {
    if !cfg.normalize {
        return (train, rest);
    }
    let s = MinMaxScaler::fit(&train);
    (s.transform_dataset(&train), s.transform_dataset(&rest))
}

/// The shuffled (initial training head, stream) split used by [`run_online`].
/// Depends only on the data, the seed and `initial_train`.
pub fn online_split(dataset: &Dataset, cfg: &ProtocolConfig) -> Result<(Dataset, Dataset)> {
    let head = cfg.initial_train.unwrap_or(dataset.len() / 2);
    if head == 0 || head >= dataset.len() {
        return Err(Error::Size {
            requested: head + 1,
            available: dataset.len(),
        });
    }
    dataset.shuffle(cfg.seed).split_head(head)
}

/// Online test-then-train.
///
/// After shuffling, the head selects ψ, fixes the mapper or landmarks, and
/// trains the initial model. The rest arrives in blocks: each block is
/// predicted in full with the current model and only then used for updates.
pub fn run_online(dataset: &Dataset, cfg: &ProtocolConfig) -> Result<Metrics> {
    cfg.validate()?;
    let (head, stream) = online_split(dataset, cfg)?;
    let (head, stream) = scale(cfg, head, stream);
    let (psi, cv) = resolve_psi(&head, cfg)?;

    let start = Instant::now();
    let mut learner = build(cfg, &head, psi)?;
    dispatch!(&mut learner, l => train_epoch(l, &head.points))?;
    let mut train_seconds = start.elapsed().as_secs_f64();
    let mut test_seconds = 0.0;

    let mut ops = OpCounter::default();
    let mut log = Vec::with_capacity(stream.len());
    let mut blocks = Vec::new();
    for (index, block) in stream.points.chunks(cfg.block_size).enumerate() {
        let tick = Instant::now();
        let correct = dispatch!(&mut learner, l => {
            let (feats, correct) = predict_all(l, block, &mut ops)?;
            test_seconds += tick.elapsed().as_secs_f64();
            let tick = Instant::now();
            update_all(l, &feats, block)?;
            train_seconds += tick.elapsed().as_secs_f64();
            correct
        });
        log.extend_from_slice(&correct);
        blocks.push(BlockMetrics {
            index,
            size: block.len(),
            correct: correct.iter().filter(|&&c| c).count(),
            cumulative_accuracy: accuracy(&log),
        });
    }
    let accepted = dispatch!(&learner, l => l.accepted_updates());
    Ok(finish(
        "online",
        dataset,
        cfg,
        psi,
        cv,
        head.len(),
        blocks,
        log,
        (train_seconds, test_seconds),
        accepted,
        ops,
        stream.len() < cfg.block_size,
    ))
}

/// Batch protocol: one epoch of online updates over the shuffled training
/// set, then the frozen model is scored on `test`.
pub fn run_batch(train: &Dataset, test: &Dataset, cfg: &ProtocolConfig) -> Result<Metrics> {
    cfg.validate()?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::Size {
            requested: 1,
            available: 0,
        });
    }
    let (train, test) = scale(cfg, train.shuffle(cfg.seed), test.clone());
    let (psi, cv) = resolve_psi(&train, cfg)?;

    let start = Instant::now();
    let mut learner = build(cfg, &train, psi)?;
    dispatch!(&mut learner, l => train_epoch(l, &train.points))?;
    let train_seconds = start.elapsed().as_secs_f64();

    let tick = Instant::now();
    let mut ops = OpCounter::default();
    let log = dispatch!(&mut learner, l => predict_all(l, &test.points, &mut ops).map(|r| r.1))?;
    let test_seconds = tick.elapsed().as_secs_f64();
    let accepted = dispatch!(&learner, l => l.accepted_updates());
    let blocks = vec![BlockMetrics {
        index: 0,
        size: log.len(),
        correct: log.iter().filter(|&&c| c).count(),
        cumulative_accuracy: accuracy(&log),
    }];
    Ok(finish(
        "batch",
        &test,
        cfg,
        psi,
        cv,
        train.len(),
        blocks,
        log,
        (train_seconds, test_seconds),
        accepted,
        ops,
        false,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    protocol: &str,
    data: &Dataset,
    cfg: &ProtocolConfig,
    psi: usize,
    cv: Option<CvResult>,
    n_train: usize,
    blocks: Vec<BlockMetrics>,
    log: Vec<bool>,
    (train_seconds, test_seconds): (f64, f64),
    accepted_updates: u64,
    prediction_ops: OpCounter,
    degenerate: bool,
) -> Metrics {
    let n_correct = log.iter().filter(|&&c| c).count();
    let ops_per_prediction = if log.is_empty() {
        0.0
    } else {
        prediction_ops.total() as f64 / log.len() as f64
    };
    Metrics {
        schema_version: METRICS_SCHEMA_VERSION,
        protocol: protocol.into(),
        dataset: data.name.clone(),
        config: cfg.clone(),
        selected_psi: psi,
        cv,
        n_train,
        blocks,
        n_predictions: log.len(),
        n_correct,
        final_accuracy: accuracy(&log),
        train_seconds,
        test_seconds,
        accepted_updates,
        prediction_ops,
        ops_per_prediction,
        degenerate,
        correct_log: log,
    }
}

/// Selects ψ (unless fixed), fits on the shuffled `train`, runs one epoch and
/// returns the trained model with the ψ used.
pub fn train_model(train: &Dataset, cfg: &ProtocolConfig) -> Result<(Checkpoint, usize)> {
    cfg.validate()?;
    if cfg.normalize {
        return Err(Error::Config("saved models do not carry a scaler; train without normalize".into()));
    }
    let train = train.shuffle(cfg.seed);
    let (psi, _) = resolve_psi(&train, cfg)?;
    let mut learner = build(cfg, &train, psi)?;
    dispatch!(&mut learner, l => {
        train_epoch(l, &train.points)?;
        Ok((l.checkpoint(), psi))
    })
}

/// The parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    T,
    Psi,
    B,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::T => "t",
            SweepAxis::Psi => "psi",
            SweepAxis::B => "b",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" => Ok(SweepAxis::T),
            "psi" => Ok(SweepAxis::Psi),
            "b" => Ok(SweepAxis::B),
            other => Err(Error::Parameter(format!("unknown sweep axis {other:?} (expected t, psi or b)"))),
        }
    }
}

impl SweepAxis {
    /// `base` with this axis set to `value`. A `b` below the configured rank
    /// lowers the rank to `b`.
    pub fn apply(&self, base: &ProtocolConfig, value: usize) -> ProtocolConfig {
        let mut cfg = base.clone();
        match self {
            SweepAxis::T => cfg.t = value,
            SweepAxis::Psi => cfg.psi = Some(value),
            SweepAxis::B => {
                cfg.b = value;
                cfg.r = cfg.r.min(value);
            }
        }
        cfg
    }
}

/// Data a sweep runs on.
pub enum SweepData<'a> {
    Online(&'a Dataset),
    Batch { train: &'a Dataset, test: &'a Dataset },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: usize,
    pub metrics: Metrics,
}

/// One run per value with shared seeds. Runs go in parallel.
pub fn sweep(axis: SweepAxis, values: &[usize], base: &ProtocolConfig, data: SweepData<'_>) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    values
        .par_iter()
        .map(|&value| {
            let cfg = axis.apply(base, value);
            let metrics = match &data {
                SweepData::Online(d) => run_online(d, &cfg)?,
                SweepData::Batch { train, test } => run_batch(train, test, &cfg)?,
            };
            Ok(SweepRow { axis, value, metrics })
        })
        .collect()
}

pub fn write_blocks_csv<W: Write>(m: &Metrics, mut out: W) -> Result<()> {
    writeln!(out, "schema_version,learner,block,size,correct,cumulative_accuracy")?;
    for b in &m.blocks {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            m.schema_version, m.config.learner, b.index, b.size, b.correct, b.cumulative_accuracy
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "schema_version,learner,axis,value,psi,accuracy,train_seconds,test_seconds,accepted_updates,ops_per_prediction,adds,mults,kernel_evals,assigns"
    )?;
    for row in rows {
        let m = &row.metrics;
        let o = &m.prediction_ops;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.schema_version,
            m.config.learner,
            row.axis,
            row.value,
            m.selected_psi,
            m.final_accuracy,
            m.train_seconds,
            m.test_seconds,
            m.accepted_updates,
            m.ops_per_prediction,
            o.adds,
            o.mults,
            o.kernel_evals,
            o.assigns
        )?;
    }
    Ok(())
}

pub fn write_metrics_json<W: Write>(m: &Metrics, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, m)?;
    Ok(())
}
