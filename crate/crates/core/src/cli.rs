//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable or malformed input, mismatched files), 3 numeric error.
//! `ISOKERNEL_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{apply_setting, load_config, parse_list};
use crate::dataset::{load_libsvm, Dataset, LabelMap};
use crate::error::{Error, Result};
use crate::eval::{
    run_batch, run_online, sweep, train_model, write_blocks_csv, write_metrics_json, write_sweep_csv, ProtocolConfig,
    SweepAxis, SweepData,
};
use crate::featuremap::{fit, write_features_csv, Mapper};
use crate::learner::{Checkpoint, CheckpointModel};
use crate::partition::Scheme;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "isokernel", version, about = "Isolation Kernel feature maps and online kernel learners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a feature map on a LIBSVM file.
    FitMap {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "iforest")]
        scheme: Scheme,
        #[arg(long)]
        psi: usize,
        #[arg(long, default_value_t = 100)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the cell ids of every point as CSV.
    Transform {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one learner for one epoch and save the model.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Online test-then-train evaluation.
    EvalOnline {
        /// LIBSVM files, concatenated before shuffling.
        #[arg(long, required = true, num_args = 1..)]
        data: Vec<PathBuf>,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Per-block CSV.
        #[arg(long)]
        out: PathBuf,
        /// JSON summary with the resolved config.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Train on one file, test on another.
    EvalBatch {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// One run per value of t, psi or b.
    Sweep {
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        /// Online mode: the data to stream.
        #[arg(long, num_args = 1.., conflicts_with_all = ["train", "test"])]
        data: Vec<PathBuf>,
        /// Batch mode: training file.
        #[arg(long, requires = "test")]
        train: Option<PathBuf>,
        #[arg(long, requires = "train")]
        test: Option<PathBuf>,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Describe a saved feature map or model.
    Inspect {
        #[arg(long, required_unless_present = "model", conflicts_with = "model")]
        map: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

/// Protocol settings; any flag given overrides the config file.
#[derive(Args, Debug, Default)]
struct ProtocolArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    learner: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    r: Option<String>,
    /// Fixed psi; skips cross-validation.
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    psi_grid: Option<String>,
    #[arg(long)]
    block_size: Option<String>,
    #[arg(long)]
    folds: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    initial_train: Option<String>,
    #[arg(long)]
    normalize: bool,
}

impl ProtocolArgs {
    fn resolve(&self) -> Result<ProtocolConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => ProtocolConfig::default(),
        };
        let flags = [
            ("learner", &self.learner),
            ("eta", &self.eta),
            ("t", &self.t),
            ("b", &self.b),
            ("r", &self.r),
            ("psi", &self.psi),
            ("psi_grid", &self.psi_grid),
            ("block_size", &self.block_size),
            ("folds", &self.folds),
            ("seed", &self.seed),
            ("initial_train", &self.initial_train),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                apply_setting(&mut cfg, key, v)?;
            }
        }
        if self.normalize {
            cfg.normalize = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_DATA
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Loads files with a shared label mapping (taken from the first) and a
/// common dimensionality.
fn load_all(paths: &[PathBuf]) -> Result<Vec<Dataset>> {
    let mut map: Option<LabelMap> = None;
    let mut sets = Vec::with_capacity(paths.len());
    for p in paths {
        let (d, m) = load_libsvm(p, None, map.clone())?;
        map.get_or_insert(m);
        sets.push(d);
    }
    let dim = sets.iter().map(|d| d.dim).max().unwrap_or(0);
    Ok(sets
        .into_iter()
        .map(|d| Dataset::with_dim(d.name, d.points, dim))
        .collect())
}

/// Concatenation of several files; by default the first file is the
/// initial training head of an online run.
fn load_stream(paths: &[PathBuf], cfg: &mut ProtocolConfig) -> Result<Dataset> {
    let sets = load_all(paths)?;
    if sets.len() > 1 && cfg.initial_train.is_none() {
        cfg.initial_train = Some(sets[0].len());
    }
    let name = sets.iter().map(|d| d.name.as_str()).collect::<Vec<_>>().join("+");
    let dim = sets[0].dim;
    let points = sets.into_iter().flat_map(|d| d.points).collect();
    Ok(Dataset::with_dim(name, points, dim))
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::FitMap {
            data,
            scheme,
            psi,
            t,
            seed,
            out,
        } => {
            let (d, _) = load_libsvm(&data, None, None)?;
            let mapper = fit(&d, psi, t, scheme, seed)?;
            mapper.save(&out)?;
            writeln!(stdout, "fitted {scheme} map: t = {t}, psi = {psi}, seed = {seed}, dim = {}", d.dim)?;
        }
        Command::Transform { map, data, out } => {
            let mapper = Mapper::load(&map)?;
            let (d, _) = load_libsvm(&data, None, None)?;
            let feats = mapper.map_dataset(&d);
            let rows = d.points.iter().map(|p| p.label).zip(feats);
            let n = write_features_csv(create(&out)?, rows, mapper.t())?;
            writeln!(stdout, "wrote {n} rows")?;
        }
        Command::Train { data, protocol, out } => {
            let cfg = protocol.resolve()?;
            let (d, _) = load_libsvm(&data, None, None)?;
            let (model, psi) = train_model(&d, &cfg)?;
            model.save(&out)?;
            writeln!(
                stdout,
                "trained {} on {} points: psi = {psi}, accepted updates = {}",
                cfg.learner,
                d.len(),
                model.accepted_updates
            )?;
        }
        Command::EvalOnline {
            data,
            protocol,
            out,
            json,
        } => {
            let mut cfg = protocol.resolve()?;
            let d = load_stream(&data, &mut cfg)?;
            let m = run_online(&d, &cfg)?;
            write_blocks_csv(&m, create(&out)?)?;
            if let Some(j) = json {
                write_metrics_json(&m, create(&j)?)?;
            }
            writeln!(
                stdout,
                "{}: psi = {}, accuracy = {:.4} over {} predictions",
                cfg.learner, m.selected_psi, m.final_accuracy, m.n_predictions
            )?;
        }
        Command::EvalBatch {
            train,
            test,
            protocol,
            out,
            json,
        } => {
            let cfg = protocol.resolve()?;
            let sets = load_all(&[train, test])?;
            let m = run_batch(&sets[0], &sets[1], &cfg)?;
            write_blocks_csv(&m, create(&out)?)?;
            if let Some(j) = json {
                write_metrics_json(&m, create(&j)?)?;
            }
            writeln!(
                stdout,
                "{}: psi = {}, test accuracy = {:.4}",
                cfg.learner, m.selected_psi, m.final_accuracy
            )?;
        }
        Command::Sweep {
            axis,
            values,
            data,
            train,
            test,
            protocol,
            out,
        } => {
            let mut cfg = protocol.resolve()?;
            let values = parse_list("values", &values)?;
            let rows = match (train, test) {
                (Some(tr), Some(te)) => {
                    let sets = load_all(&[tr, te])?;
                    sweep(axis, &values, &cfg, SweepData::Batch {
                        train: &sets[0],
                        test: &sets[1],
                    })?
                }
                _ if !data.is_empty() => {
                    let d = load_stream(&data, &mut cfg)?;
                    sweep(axis, &values, &cfg, SweepData::Online(&d))?
                }
                _ => return Err(Error::Config("sweep needs --data or --train/--test".into())),
            };
            write_sweep_csv(&rows, create(&out)?)?;
            for row in &rows {
                writeln!(stdout, "{} = {}: accuracy = {:.4}", axis, row.value, row.metrics.final_accuracy)?;
            }
        }
        Command::Inspect { map, model } => {
            if let Some(p) = map {
                describe_mapper(&Mapper::load(&p)?, stdout)?;
            } else if let Some(p) = model {
                let c = Checkpoint::load(&p)?;
                writeln!(stdout, "eta: {}", c.eta)?;
                writeln!(stdout, "accepted_updates: {}", c.accepted_updates)?;
                match &c.model {
                    CheckpointModel::Ogd { kernel, support_vectors } => {
                        writeln!(stdout, "learner: ogd")?;
                        writeln!(stdout, "kernel: {kernel:?}")?;
                        writeln!(stdout, "support_vectors: {}", support_vectors.len())?;
                    }
                    CheckpointModel::IkOgd { mapper, weights } => {
                        writeln!(stdout, "learner: ik-ogd")?;
                        describe_mapper(mapper, stdout)?;
                        writeln!(stdout, "nonzero_weights: {}", weights.nonzeros())?;
                    }
                    CheckpointModel::Nogd { nystrom, .. } => {
                        writeln!(stdout, "learner: nogd")?;
                        writeln!(stdout, "kernel: {:?}", nystrom.kernel())?;
                        writeln!(stdout, "b: {}", nystrom.b())?;
                        writeln!(stdout, "r: {} (requested {})", nystrom.r(), nystrom.requested_r())?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn describe_mapper(m: &Mapper, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "scheme: {}", m.scheme())?;
    writeln!(out, "t: {}", m.t())?;
    writeln!(out, "psi: {}", m.psi())?;
    writeln!(out, "seed: {}", m.seed())?;
    writeln!(out, "dim: {}", m.dim())?;
    let counts = m.cell_counts();
    let list: Vec<String> = counts.iter().map(usize::to_string).collect();
    writeln!(out, "cell_counts: {}", list.join(","))?;
    Ok(())
}

fn init_threads() {
    if let Ok(v) = std::env::var("ISOKERNEL_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // fails only if a pool already exists, e.g. on a second call in-process
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => log::warn!("ignoring ISOKERNEL_THREADS={v:?}"),
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    init_threads();
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
