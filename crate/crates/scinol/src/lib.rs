//! Scale-invariant online learning of linear models.
//!
//! The learners in this crate train linear predictors one example at a time
//! without any learning-rate tuning: their per-trial updates adapt to each
//! feature's observed magnitude, so multiplying a feature column by any
//! constant leaves the prediction sequence unchanged (exactly so for
//! power-of-two factors, which only shift f64 exponents). Classic rate-based
//! baselines (SGD, per-coordinate OGD, AdaGrad, Adam) are included for
//! comparison, along with the tooling a careful empirical study needs:
//!
//! - [`learners`]: the two scale-invariant update rules, univariate and as
//!   d×K grids for multiclass linear models under cross-entropy.
//! - [`baselines`]: rate-based references behind the same trial protocol.
//! - [`history`]: trial-by-trial run records with terminal state, JSON-round-
//!   trippable and self-validating.
//! - [`analysis`]: regret-bound calculators and independent replay checks
//!   that verify per-trial invariants of a recorded run.
//! - [`data`]: deterministic synthetic data, LibSVM/CSV parsing, scaling
//!   transforms, and seeded shuffling utilities.
//! - [`harness`]: the experiment loop tying the above together.
//!
//! Everything is deterministic given the configured seeds; repeated runs
//! produce byte-identical metrics and histories.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod baselines;
pub mod data;
pub mod error;
pub mod features;
pub mod harness;
pub mod history;
pub mod learners;
pub mod loss;
pub mod num;

pub use error::{Error, Result};
pub use features::{dot_predict, FeatureVector, Label, LabeledExample, Prediction};
pub use harness::{metrics_to_csv, run_experiment, ExperimentConfig, MetricsRow, RunOutcome};
pub use history::{HistoryRecorder, LearnerKind, RunHistory};
pub use learners::{
    multivariate_step, MultiScinol1, MultiScinol2, ScalarLearner, Scinol1, Scinol2, VectorLearner,
};
pub use loss::{Gradient, Loss};
