//! Isolation Kernel: a data-dependent kernel with an exact, sparse,
//! finite-dimensional feature map, plus the online learners built on it.
//!
//! The usual path is:
//!
//! 1. load points with [`dataset::load_libsvm`];
//! 2. fit a [`featuremap::Mapper`] (t random partitionings of ψ-samples);
//! 3. map each point to its [`featuremap::IndexedFeature`] (t cell ids);
//! 4. train an [`learner::IkOgd`] learner, whose prediction costs `t`
//!    additions no matter how many updates it has accepted.
//!
//! The [`eval`] module runs the online (test-then-train) and batch protocols
//! against dual OGD and Nyström OGD baselines.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod featuremap;
pub mod kernels;
pub mod learner;
pub mod nystrom;
pub mod ops;
pub mod partition;
pub mod seeding;
pub mod synth;

pub use dataset::{Dataset, Label, LabeledPoint, SparseVector};
pub use error::{Error, Result};
pub use featuremap::{efficient_dot, fit, IndexedFeature, Mapper, WeightMatrix};
pub use kernels::{BaselineKernel, Gaussian, IsolationKernel, Kernel, Laplacian};
pub use learner::{DualModel, IkModel, IkOgd, LearnerKind, LinearModel, Nogd, OnlineLearner};
pub use nystrom::{fit_nystrom, NystromMap};
pub use ops::OpCounter;
pub use partition::{Partitioning, Scheme};
