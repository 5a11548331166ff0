//! Online training loop: deterministic epoch shuffling, periodic test-set
//! scoring, and optional trial recording.
//!
//! A run walks the training set once per epoch in an order drawn from
//! [`seeded_rng`]`(seed, EPOCH_BASE + epoch)`, so the sequence of examples a
//! learner sees is a pure function of `(seed, epoch, train)`. Metrics rows are
//! emitted every `metric_every` trials and once more at each epoch boundary,
//! always scoring the test set with the weights frozen at that instant.

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineConfig, BaselineKind};
use crate::data::{permutation, seeded_rng, streams, Dataset, LabelKind};
use crate::error::{Error, Result};
use crate::features::{dot_predict, Label, Prediction};
use crate::history::{HistoryConfig, HistoryRecorder, LearnerKind, RunHistory};
use crate::learners::{
    multivariate_step, MultiScinol1, MultiScinol2, ScalarLearner, Scinol1, Scinol2, VectorLearner,
};
use crate::loss::{Gradient, Loss};

/// Default test-scoring cadence, in trials.
pub const DEFAULT_METRIC_EVERY: usize = 50;

/// Everything needed to reproduce a training run on a given dataset pair.
///
/// Parameter fields are learner-specific and checked strictly: scale-invariant
/// learners require `epsilon` and reject `eta`; baselines require `eta` and
/// reject `epsilon`; `eta_per_dim` is only accepted for `ogd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub learner: LearnerKind,
    pub loss: Loss,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_per_dim: Option<Vec<f64>>,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_metric_every")]
    pub metric_every: usize,
    /// Record every trial for later replay verification. Scalar runs only.
    #[serde(default)]
    pub record_history: bool,
    /// Restart trial clocks at each epoch boundary so per-epoch behaviour of
    /// clocked learners is comparable across epochs.
    #[serde(default)]
    pub reset_t_per_epoch: bool,
}

fn default_epochs() -> usize {
    1
}

fn default_metric_every() -> usize {
    DEFAULT_METRIC_EVERY
}

impl ExperimentConfig {
    pub fn new(learner: LearnerKind, loss: Loss) -> Self {
        ExperimentConfig {
            learner,
            loss,
            epsilon: None,
            eta: None,
            eta_per_dim: None,
            epochs: default_epochs(),
            seed: 0,
            metric_every: default_metric_every(),
            record_history: false,
            reset_t_per_epoch: false,
        }
    }
}

/// One scoring snapshot. `step` counts trials globally across epochs, so rows
/// are strictly increasing in `step`; `cum_*` columns accumulate over the
/// whole run, not per epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub step: u64,
    pub epoch: usize,
    pub avg_test_loss: f64,
    /// Fraction of test labels matched; NaN when labels carry no class
    /// (real-valued targets) or the test set is empty.
    pub test_accuracy: f64,
    pub cum_train_loss: f64,
    /// Cumulative linearized regret against the supplied comparator, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cum_regret: Option<f64>,
}

/// Column header emitted by [`metrics_to_csv`]. The regret column is left
/// empty on rows where no comparator was supplied.
pub const METRICS_HEADER: &str = "step,epoch,avg_test_loss,test_accuracy,cum_train_loss,cum_regret";

/// Serialize metrics rows as CSV. Plain `Display` formatting keeps the bytes
/// identical across runs for identical inputs.
pub fn metrics_to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        let regret = r.cum_regret.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.step, r.epoch, r.avg_test_loss, r.test_accuracy, r.cum_train_loss, regret
        ));
    }
    out
}

/// Result of [`run_experiment`].
#[derive(Debug)]
pub struct RunOutcome {
    pub metrics: Vec<MetricsRow>,
    /// Present iff `record_history` was set.
    pub history: Option<RunHistory>,
}

/// Train `cfg.learner` online on `train`, scoring `test` along the way.
///
/// With a `comparator` the metrics gain a cumulative linearized-regret column
/// Σ g_t(ŷ_t - u·x_t). An empty training set yields empty metrics. All
/// config/dataset incompatibilities surface as errors before the first trial.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    comparator: Option<&[f64]>,
) -> Result<RunOutcome> {
    validate(cfg, train, test, comparator)?;
    match cfg.loss {
        Loss::CrossEntropy { classes } => run_multiclass(cfg, train, test, classes),
        _ => run_scalar(cfg, train, test, comparator),
    }
}

fn run_scalar(
    cfg: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    comparator: Option<&[f64]>,
) -> Result<RunOutcome> {
    let mut learner = build_scalar(cfg, train.dim)?;
    let mut recorder = cfg.record_history.then(|| {
        HistoryRecorder::new(HistoryConfig {
            learner: cfg.learner,
            loss: cfg.loss,
            dim: train.dim,
            epsilon: cfg.epsilon,
            eta: cfg.eta,
        })
    });

    let mut rows = Vec::new();
    let mut step: u64 = 0;
    // Mirrors the learner's trial clock; must be reset in lockstep with it.
    let mut clock: u64 = 0;
    let mut cum_train_loss = 0.0;
    let mut cum_regret = comparator.map(|_| 0.0);

    for epoch in 0..cfg.epochs {
        if cfg.reset_t_per_epoch && epoch > 0 {
            learner.reset_trial_clock();
            clock = 0;
        }
        let mut rng = seeded_rng(cfg.seed, streams::EPOCH_BASE + epoch as u64);
        let order = permutation(train.len(), &mut rng);
        for &idx in &order {
            let ex = &train.examples[idx];
            let trial = learner.begin_trial(&ex.x)?;
            clock += 1;
            let pred = Prediction::Scalar(trial.prediction);
            let loss_value = cfg.loss.value(&ex.y, &pred)?;
            let g = match cfg.loss.subgradient(&ex.y, &pred)? {
                Gradient::Scalar(g) => g,
                Gradient::Vector(_) => return Err(Error::Protocol("vector gradient in scalar run")),
            };
            learner.feedback(g)?;
            step += 1;
            cum_train_loss += loss_value;
            if let (Some(total), Some(u)) = (cum_regret.as_mut(), comparator) {
                *total += g * (trial.prediction - dot_predict(u, &ex.x)?);
            }
            if let Some(rec) = recorder.as_mut() {
                rec.record(clock, &ex.x, &trial, g, Some(ex.y));
            }
            if step.is_multiple_of(cfg.metric_every as u64) {
                let (avg, acc) = evaluate_scalar(&learner.weights(), &cfg.loss, test)?;
                rows.push(MetricsRow {
                    step,
                    epoch,
                    avg_test_loss: avg,
                    test_accuracy: acc,
                    cum_train_loss,
                    cum_regret,
                });
            }
        }
        if !order.is_empty() && rows.last().map(|r| r.step) != Some(step) {
            let (avg, acc) = evaluate_scalar(&learner.weights(), &cfg.loss, test)?;
            rows.push(MetricsRow {
                step,
                epoch,
                avg_test_loss: avg,
                test_accuracy: acc,
                cum_train_loss,
                cum_regret,
            });
        }
    }

    let history = match recorder {
        Some(rec) => Some(rec.finish()?),
        None => None,
    };
    Ok(RunOutcome {
        metrics: rows,
        history,
    })
}

fn run_multiclass(
    cfg: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    classes: usize,
) -> Result<RunOutcome> {
    let eps = cfg.epsilon.expect("validated");
    let mut learner: Box<dyn VectorLearner> = match cfg.learner {
        LearnerKind::Scinol1 => Box::new(MultiScinol1::new(train.dim, classes, eps)?),
        LearnerKind::Scinol2 => Box::new(MultiScinol2::new(train.dim, classes, eps)?),
        _ => unreachable!("validated"),
    };

    let mut rows = Vec::new();
    let mut step: u64 = 0;
    let mut cum_train_loss = 0.0;

    for epoch in 0..cfg.epochs {
        if cfg.reset_t_per_epoch && epoch > 0 {
            learner.reset_trial_clock();
        }
        let mut rng = seeded_rng(cfg.seed, streams::EPOCH_BASE + epoch as u64);
        let order = permutation(train.len(), &mut rng);
        for &idx in &order {
            let out = multivariate_step(learner.as_mut(), &cfg.loss, &train.examples[idx])?;
            step += 1;
            cum_train_loss += out.loss_value;
            if step.is_multiple_of(cfg.metric_every as u64) {
                let (avg, acc) = evaluate_multi(&learner.weights(), classes, &cfg.loss, test)?;
                rows.push(MetricsRow {
                    step,
                    epoch,
                    avg_test_loss: avg,
                    test_accuracy: acc,
                    cum_train_loss,
                    cum_regret: None,
                });
            }
        }
        if !order.is_empty() && rows.last().map(|r| r.step) != Some(step) {
            let (avg, acc) = evaluate_multi(&learner.weights(), classes, &cfg.loss, test)?;
            rows.push(MetricsRow {
                step,
                epoch,
                avg_test_loss: avg,
                test_accuracy: acc,
                cum_train_loss,
                cum_regret: None,
            });
        }
    }

    Ok(RunOutcome {
        metrics: rows,
        history: None,
    })
}

/// Average loss and accuracy of fixed weights on `test`. Empty test sets
/// score (0, NaN); real-valued labels have no accuracy notion and score NaN.
fn evaluate_scalar(w: &[f64], loss: &Loss, test: &Dataset) -> Result<(f64, f64)> {
    if test.is_empty() {
        return Ok((0.0, f64::NAN));
    }
    let mut total = 0.0;
    let mut hits = 0usize;
    let mut graded = 0usize;
    for ex in &test.examples {
        let z = dot_predict(w, &ex.x)?;
        total += loss.value(&ex.y, &Prediction::Scalar(z))?;
        if let Label::Binary(s) = ex.y {
            // Ties at ŷ = 0 predict +1.
            let predicted: i8 = if z >= 0.0 { 1 } else { -1 };
            if predicted == s {
                hits += 1;
            }
            graded += 1;
        }
    }
    let accuracy = if graded == 0 {
        f64::NAN
    } else {
        hits as f64 / graded as f64
    };
    Ok((total / test.len() as f64, accuracy))
}

fn evaluate_multi(w: &[Vec<f64>], classes: usize, loss: &Loss, test: &Dataset) -> Result<(f64, f64)> {
    if test.is_empty() {
        return Ok((0.0, f64::NAN));
    }
    let mut total = 0.0;
    let mut hits = 0usize;
    for ex in &test.examples {
        let mut scores = vec![0.0; classes];
        for &(i, v) in ex.x.entries() {
            for (k, s) in scores.iter_mut().enumerate() {
                *s += w[i][k] * v;
            }
        }
        if let Label::Class(c) = ex.y {
            if argmax(&scores) == c {
                hits += 1;
            }
        }
        total += loss.value(&ex.y, &Prediction::Vector(scores))?;
    }
    let n = test.len() as f64;
    Ok((total / n, hits as f64 / n))
}

/// Index of the largest score; first index wins ties.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    best
}

fn build_scalar(cfg: &ExperimentConfig, dim: usize) -> Result<Box<dyn ScalarLearner>> {
    match cfg.learner {
        LearnerKind::Scinol1 => Ok(Box::new(Scinol1::new(dim, cfg.epsilon.expect("validated"))?)),
        LearnerKind::Scinol2 => Ok(Box::new(Scinol2::new(dim, cfg.epsilon.expect("validated"))?)),
        _ => {
            let kind = baseline_kind(cfg.learner).expect("validated");
            let mut bc = BaselineConfig::new(kind, cfg.eta.expect("validated"));
            bc.eta_per_dim = cfg.eta_per_dim.clone();
            bc.build(dim)
        }
    }
}

fn baseline_kind(kind: LearnerKind) -> Option<BaselineKind> {
    match kind {
        LearnerKind::Sgd => Some(BaselineKind::Sgd),
        LearnerKind::Ogd => Some(BaselineKind::OgdPerDim),
        LearnerKind::Adagrad => Some(BaselineKind::AdaGrad),
        LearnerKind::Adam => Some(BaselineKind::Adam),
        LearnerKind::Scinol1 | LearnerKind::Scinol2 => None,
    }
}

fn validate(
    cfg: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    comparator: Option<&[f64]>,
) -> Result<()> {
    if cfg.epochs == 0 {
        return Err(Error::InvalidConfig("epochs must be at least 1".into()));
    }
    if cfg.metric_every == 0 {
        return Err(Error::InvalidConfig("metric_every must be at least 1".into()));
    }
    if test.dim != train.dim {
        return Err(Error::DimMismatch {
            expected: train.dim,
            got: test.dim,
        });
    }
    if let Some(u) = comparator {
        if u.len() != train.dim {
            return Err(Error::DimMismatch {
                expected: train.dim,
                got: u.len(),
            });
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "comparator" });
        }
    }

    let scale_invariant = cfg.learner.is_scale_invariant();
    if scale_invariant {
        match cfg.epsilon {
            Some(e) if e > 0.0 && e.is_finite() => {}
            Some(e) => {
                return Err(Error::InvalidConfig(format!(
                    "epsilon must be a positive finite number, got {e}"
                )))
            }
            None => {
                return Err(Error::InvalidConfig(format!(
                    "{} requires epsilon",
                    cfg.learner.name()
                )))
            }
        }
        if cfg.eta.is_some() || cfg.eta_per_dim.is_some() {
            return Err(Error::InvalidConfig(format!(
                "{} is rate-free: eta settings are not accepted",
                cfg.learner.name()
            )));
        }
    } else {
        if cfg.eta.is_none() {
            return Err(Error::InvalidConfig(format!(
                "{} requires eta",
                cfg.learner.name()
            )));
        }
        if cfg.epsilon.is_some() {
            return Err(Error::InvalidConfig(format!(
                "epsilon only applies to scale-invariant learners, not {}",
                cfg.learner.name()
            )));
        }
        if cfg.eta_per_dim.is_some() && cfg.learner != LearnerKind::Ogd {
            return Err(Error::InvalidConfig(format!(
                "eta_per_dim only applies to ogd, not {}",
                cfg.learner.name()
            )));
        }
    }

    match cfg.loss {
        Loss::Logistic | Loss::Hinge => {
            expect_labels(train, LabelKind::Binary)?;
            expect_labels(test, LabelKind::Binary)?;
        }
        Loss::Absolute => {
            expect_labels(train, LabelKind::Real)?;
            expect_labels(test, LabelKind::Real)?;
        }
        Loss::CrossEntropy { classes } => {
            if classes < 2 {
                return Err(Error::InvalidConfig(
                    "cross-entropy needs at least 2 classes".into(),
                ));
            }
            if !scale_invariant {
                return Err(Error::InvalidConfig(format!(
                    "cross-entropy needs a multivariate learner (scinol1 or scinol2), not {}",
                    cfg.learner.name()
                )));
            }
            expect_labels(train, LabelKind::Class)?;
            expect_labels(test, LabelKind::Class)?;
            for (name, data) in [("train", train), ("test", test)] {
                if data.num_classes > classes {
                    return Err(Error::InvalidConfig(format!(
                        "{name} set has {} classes but the loss models {classes}",
                        data.num_classes
                    )));
                }
            }
            if cfg.record_history {
                return Err(Error::InvalidConfig(
                    "history recording only covers scalar runs".into(),
                ));
            }
            if comparator.is_some() {
                return Err(Error::InvalidConfig(
                    "comparator regret only covers scalar runs".into(),
                ));
            }
        }
    }
    Ok(())
}

fn expect_labels(data: &Dataset, want: LabelKind) -> Result<()> {
    // Empty datasets carry no labels, so any loss is fine.
    if data.is_empty() || data.label_kind == want {
        Ok(())
    } else {
        Err(Error::LabelMismatch {
            expected: match want {
                LabelKind::Binary => "binary",
                LabelKind::Class => "class",
                LabelKind::Real => "real",
            },
            got: match data.label_kind {
                LabelKind::Binary => "binary",
                LabelKind::Class => "class",
                LabelKind::Real => "real",
            },
        })
    }
}
