//! Online learners whose predictions are invariant to per-feature rescaling.
//!
//! Two algorithm families are implemented, each keeping per-coordinate state
//! (M, G, S²) plus one adaptivity coefficient:
//!
//! * [`Scinol1`]: an additive-potential learner with a shrinking coefficient
//!   β_{t,i} and weights proportional to β·(e^{|θ|/2} − 1).
//! * [`Scinol2`]: a wealth-multiplying learner whose coefficient η_{t,i}
//!   grows or shrinks multiplicatively, with weights clipped through
//!   min{|θ|, 1}.
//!
//! Both read the current input's magnitude into M *before* committing to
//! weights, which is what makes the prediction sequence independent of any
//! fixed positive per-feature scaling. [`MultiScinol1`] and [`MultiScinol2`]
//! extend the same updates to a d×K grid of cells sharing M per feature, for
//! multiclass losses.
//!
//! # Protocol
//!
//! Every trial is two phases: `begin_trial(x)` commits M and returns weights
//! on the support of `x`; `feedback(g)` folds the subgradient into state.
//! The pair must alternate strictly; the learner stores the pending trial so
//! feedback always applies to exactly the input it was quoted for.

use crate::error::{Error, Result};
use crate::features::{FeatureVector, LabeledExample, Prediction};
use crate::loss::{Gradient, Loss};
use crate::num::sign;

mod multi;
mod scinol1;
mod scinol2;

pub use multi::{MultiScinol1, MultiScinol2};
pub use scinol1::{CoordState1, Scinol1};
pub use scinol2::{CoordState2, Scinol2};

/// Exponent cap for e^{|θ|/2} − 1. |θ_t| ≤ √t keeps the argument far below
/// this at any realistic trial count; the counter records if it ever trips.
pub(crate) const EXP_CLAMP: f64 = 700.0;

/// Tolerance on the |g| ≤ 1 gradient contract.
pub(crate) const GRAD_TOL: f64 = 1e-12;

/// Shared sizing/threshold knobs for constructing learners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub dim: usize,
    /// 1 for univariate learners, K ≥ 2 for multiclass grids.
    pub num_outputs: usize,
}

impl LearnerConfig {
    pub fn new(dim: usize) -> Self {
        LearnerConfig {
            epsilon: 1.0,
            dim,
            num_outputs: 1,
        }
    }
}

/// Weights a learner commits to for one trial, restricted to the support of
/// the input (weights off the support multiply zero and are never
/// materialized).
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    /// (index, weight) aligned with the input's entries.
    pub weights: Vec<(usize, f64)>,
    /// ŷ = Σ w_i x_i over the support.
    pub prediction: f64,
}

/// Scalar-output online learner under the two-phase protocol.
pub trait ScalarLearner {
    fn dim(&self) -> usize;

    /// Commits the trial input and returns the weights used to predict on it.
    fn begin_trial(&mut self, x: &FeatureVector) -> Result<Trial>;

    /// Folds the loss subgradient at the quoted prediction into state.
    fn feedback(&mut self, g: f64) -> Result<()>;

    /// Dense snapshot of the current weights, for scoring held-out data.
    /// Pure read: no state moves.
    fn weights(&self) -> Vec<f64>;

    /// Restarts the learner's trial clock (keeps all other state). Only
    /// meaningful for learners whose update rules reference the trial index.
    fn reset_trial_clock(&mut self) {}
}

/// Per-trial commitment of a multiclass learner.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTrial {
    /// (index, K weights) aligned with the input's entries.
    pub weights: Vec<(usize, Vec<f64>)>,
    /// ŷ_k = Σ_i W_{i,k} x_i.
    pub prediction: Vec<f64>,
}

/// Vector-output online learner (one score per class).
pub trait VectorLearner {
    fn dim(&self) -> usize;
    fn classes(&self) -> usize;
    fn begin_trial(&mut self, x: &FeatureVector) -> Result<MultiTrial>;
    fn feedback(&mut self, g: &[f64]) -> Result<()>;
    /// Dense d×K snapshot (rows indexed by feature).
    fn weights(&self) -> Vec<Vec<f64>>;
    fn reset_trial_clock(&mut self) {}
}

/// Everything one multiclass trial produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub prediction: Vec<f64>,
    pub gradient: Vec<f64>,
    pub loss_value: f64,
}

/// Runs one full trial of a vector learner against a cross-entropy loss:
/// begin, predict, differentiate, feed back.
pub fn multivariate_step(
    learner: &mut dyn VectorLearner,
    loss: &Loss,
    example: &LabeledExample,
) -> Result<StepOutcome> {
    let classes = match loss {
        Loss::CrossEntropy { classes } => *classes,
        _ => {
            return Err(Error::InvalidConfig(
                "multivariate_step requires a cross-entropy loss".into(),
            ))
        }
    };
    if classes < 2 {
        return Err(Error::InvalidConfig(
            "multivariate_step requires at least 2 classes".into(),
        ));
    }
    if classes != learner.classes() {
        return Err(Error::DimMismatch {
            expected: learner.classes(),
            got: classes,
        });
    }
    let trial = learner.begin_trial(&example.x)?;
    let prediction = Prediction::Vector(trial.prediction.clone());
    let loss_value = loss.value(&example.y, &prediction)?;
    let gradient = match loss.subgradient(&example.y, &prediction)? {
        Gradient::Vector(g) => g,
        Gradient::Scalar(_) => unreachable!("cross-entropy subgradient is a vector"),
    };
    learner.feedback(&gradient)?;
    Ok(StepOutcome {
        prediction: trial.prediction,
        gradient,
        loss_value,
    })
}

/// Pending half of the two-phase protocol: the input the learner quoted on
/// and the weights it committed, kept so feedback applies to exactly them.
#[derive(Debug, Clone)]
pub(crate) struct PendingTrial {
    pub entries: Vec<(usize, f64)>,
    pub weights: Vec<(usize, f64)>,
}

pub(crate) fn check_gradient(g: f64) -> Result<()> {
    if !g.is_finite() {
        return Err(Error::NonFinite { what: "subgradient" });
    }
    if g.abs() > 1.0 + GRAD_TOL {
        return Err(Error::GradientOutOfRange(g));
    }
    Ok(())
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be positive and finite, got {eps}"
        )));
    }
    Ok(())
}

/// Per-cell weight of the additive-potential learner:
/// w = β·sgn(θ)·(e^{|θ|/2} − 1) / (2√(S² + M²)), with 0/0 := 0 when the
/// cell has never seen a nonzero input.
pub(crate) fn cell_weight_1(g_cum: f64, s2: f64, m: f64, beta: f64, clamps: &mut u64) -> f64 {
    let shat2 = s2 + m * m;
    if shat2 == 0.0 {
        return 0.0;
    }
    let shat = shat2.sqrt();
    let theta = g_cum / shat;
    let mut arg = theta.abs() / 2.0;
    if arg > EXP_CLAMP {
        *clamps += 1;
        arg = EXP_CLAMP;
    }
    beta * sign(theta) * arg.exp_m1() / (2.0 * shat)
}

/// Per-cell weight of the wealth-multiplying learner:
/// w = sgn(θ)·min{|θ|, 1}·η / (2√(S² + M²)), same 0/0 := 0 convention.
pub(crate) fn cell_weight_2(g_cum: f64, s2: f64, m: f64, eta: f64) -> f64 {
    let shat2 = s2 + m * m;
    if shat2 == 0.0 {
        return 0.0;
    }
    let shat = shat2.sqrt();
    let theta = g_cum / shat;
    sign(theta) * theta.abs().min(1.0) * eta / (2.0 * shat)
}

/// β candidate committed when the cell sees a nonzero input at trial `t`:
/// ε(S² + M²) / (x²·t), taken under a running min.
pub(crate) fn beta_candidate(eps: f64, s2: f64, m: f64, xv: f64, t: f64) -> f64 {
    eps * (s2 + m * m) / (xv * xv * t)
}
