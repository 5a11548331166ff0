//! Per-trial run records and their terminal statistics.
//!
//! A [`RunHistory`] captures everything the verification suite needs to
//! replay a run: the input vectors, the weights the learner played, the
//! predictions and the scalar loss gradients. Terminal statistics are
//! defined as a fold over the records in trial order, using the same
//! floating-point operation order as the learners, so a recorded run and
//! its replay agree bitwise.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Label};
use crate::learners::Trial;
use crate::loss::Loss;

/// Which update rule produced a history. Used to pick the matching
/// replay recurrences during verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Scinol1,
    Scinol2,
    Sgd,
    Ogd,
    Adagrad,
    Adam,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Scinol1 => "scinol1",
            LearnerKind::Scinol2 => "scinol2",
            LearnerKind::Sgd => "sgd",
            LearnerKind::Ogd => "ogd",
            LearnerKind::Adagrad => "adagrad",
            LearnerKind::Adam => "adam",
        }
    }

    pub fn is_scale_invariant(self) -> bool {
        matches!(self, LearnerKind::Scinol1 | LearnerKind::Scinol2)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistoryConfig {
    pub learner: LearnerKind,
    pub loss: Loss,
    pub dim: usize,
    /// Initial wealth of the scale-invariant learners; None for baselines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Baseline learning rate; None for the scale-invariant learners.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

/// One trial: input, played weights (nonzero support entries only),
/// prediction, and the scalar loss gradient that came back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub t: u64,
    /// Sparse input, (index, value) with strictly increasing indices.
    pub x: Vec<(usize, f64)>,
    /// Sparse weights on the input support, zero entries dropped.
    pub w: Vec<(usize, f64)>,
    pub yhat: f64,
    pub g: f64,
    /// True label, when the caller wants loss-level regret replays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Label>,
}

impl TrialRecord {
    /// Weight actually played on coordinate i (0 off the recorded support).
    pub fn weight(&self, i: usize) -> f64 {
        self.w
            .iter()
            .find(|&&(j, _)| j == i)
            .map(|&(_, v)| v)
            .unwrap_or(0.0)
    }
}

/// Per-coordinate statistics at the end of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TerminalStats {
    pub dim: usize,
    /// M_i: running max of |x_{t,i}|.
    pub m: Vec<f64>,
    /// G_i: negative cumulative gradient, G_i = -sum_t g_t x_{t,i}.
    pub g_cum: Vec<f64>,
    /// S²_i: sum of squared per-coordinate gradients.
    pub s2: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    /// First trial with a nonzero input on coordinate i, if any.
    pub tau: Vec<Option<u64>>,
    /// The input value at that trial.
    pub x_tau: Vec<Option<f64>>,
}

impl TerminalStats {
    /// Ŝ_i = √(S²_i + M²_i), the scale-adjusted gradient norm.
    pub fn s_hat(&self, i: usize) -> f64 {
        (self.s2[i] + self.m[i] * self.m[i]).sqrt()
    }
}

/// Folds records in order into terminal statistics, mirroring the learner
/// update order exactly: M commit, then the β floor (ScInOL₁), then the
/// gradient accumulators and η (ScInOL₂) from the recorded weights.
pub fn fold_terminal_stats(config: &HistoryConfig, trials: &[TrialRecord]) -> Result<TerminalStats> {
    let dim = config.dim;
    let mut m = vec![0.0f64; dim];
    let mut g_cum = vec![0.0f64; dim];
    let mut s2 = vec![0.0f64; dim];
    let mut tau: Vec<Option<u64>> = vec![None; dim];
    let mut x_tau: Vec<Option<f64>> = vec![None; dim];
    let wants_beta = config.learner == LearnerKind::Scinol1;
    let wants_eta = config.learner == LearnerKind::Scinol2;
    let eps = if wants_beta || wants_eta {
        Some(config.epsilon.ok_or_else(|| {
            Error::InvalidConfig("scale-invariant history requires epsilon".into())
        })?)
    } else {
        None
    };
    let mut beta = eps.map(|e| vec![e; dim]);
    let mut eta = eps.map(|e| vec![e; dim]);
    for rec in trials {
        for &(i, xv) in &rec.x {
            if i >= dim {
                return Err(Error::IndexOutOfBounds { index: i, dim });
            }
            m[i] = m[i].max(xv.abs());
            if xv != 0.0 && tau[i].is_none() {
                tau[i] = Some(rec.t);
                x_tau[i] = Some(xv);
            }
            if wants_beta {
                if let (Some(beta), Some(e)) = (beta.as_mut(), eps) {
                    if xv != 0.0 {
                        let cand = e * (s2[i] + m[i] * m[i]) / (xv * xv * rec.t as f64);
                        beta[i] = beta[i].min(cand);
                    }
                }
            }
        }
        for &(i, xv) in &rec.x {
            let gi = rec.g * xv;
            g_cum[i] -= gi;
            s2[i] += gi * gi;
            if wants_eta {
                if let Some(eta) = eta.as_mut() {
                    eta[i] -= gi * rec.weight(i);
                }
            }
        }
    }
    Ok(TerminalStats {
        dim,
        m,
        g_cum,
        s2,
        beta: if wants_beta { beta } else { None },
        eta: if wants_eta { eta } else { None },
        tau,
        x_tau,
    })
}

/// A complete recorded run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHistory {
    pub config: HistoryConfig,
    pub trials: Vec<TrialRecord>,
    pub terminal_stats: TerminalStats,
}

impl RunHistory {
    /// Refolds the records and checks they reproduce the stored stats.
    pub fn validate(&self) -> Result<()> {
        let folded = fold_terminal_stats(&self.config, &self.trials)?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        for i in 0..self.config.dim {
            let stored = &self.terminal_stats;
            if !close(stored.m[i], folded.m[i])
                || !close(stored.g_cum[i], folded.g_cum[i])
                || !close(stored.s2[i], folded.s2[i])
                || stored.tau[i] != folded.tau[i]
            {
                return Err(Error::HistoryMismatch {
                    t: self.trials.last().map(|r| r.t).unwrap_or(0),
                    coord: i,
                    detail: "terminal stats disagree with the fold of records".into(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunHistory::from_json(&fs::read_to_string(path)?)
    }
}

/// Accumulates trial records during a run and folds the terminal stats
/// when the run ends.
#[derive(Debug, Clone)]
pub struct HistoryRecorder {
    config: HistoryConfig,
    trials: Vec<TrialRecord>,
}

impl HistoryRecorder {
    pub fn new(config: HistoryConfig) -> Self {
        HistoryRecorder {
            config,
            trials: Vec::new(),
        }
    }

    pub fn record(&mut self, t: u64, x: &FeatureVector, trial: &Trial, g: f64, y: Option<Label>) {
        let w = trial
            .weights
            .iter()
            .filter(|&&(_, wv)| wv != 0.0)
            .copied()
            .collect();
        self.trials.push(TrialRecord {
            t,
            x: x.entries().to_vec(),
            w,
            yhat: trial.prediction,
            g,
            y,
        });
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn finish(self) -> Result<RunHistory> {
        let terminal_stats = fold_terminal_stats(&self.config, &self.trials)?;
        Ok(RunHistory {
            config: self.config,
            trials: self.trials,
            terminal_stats,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{ScalarLearner, Scinol1, Scinol2};

    fn fv(dim: usize, entries: &[(usize, f64)]) -> FeatureVector {
        FeatureVector::new(dim, entries.to_vec()).unwrap()
    }

    fn record_run(kind: LearnerKind, eps: f64) -> RunHistory {
        let dim = 3;
        let mut rec = HistoryRecorder::new(HistoryConfig {
            learner: kind,
            loss: Loss::Logistic,
            dim,
            epsilon: Some(eps),
            eta: None,
        });
        let mut l1;
        let mut l2;
        let learner: &mut dyn ScalarLearner = match kind {
            LearnerKind::Scinol1 => {
                l1 = Scinol1::new(dim, eps).unwrap();
                &mut l1
            }
            LearnerKind::Scinol2 => {
                l2 = Scinol2::new(dim, eps).unwrap();
                &mut l2
            }
            _ => unreachable!(),
        };
        let xs: [&[(usize, f64)]; 4] = [
            &[(0, 1.0), (2, -2.0)],
            &[(1, 0.5)],
            &[(0, -4.0), (1, 1.0), (2, 0.25)],
            &[(2, 8.0)],
        ];
        let gs = [-0.5, 1.0, 0.25, -1.0];
        for (t, (entries, &g)) in xs.iter().zip(&gs).enumerate() {
            let x = fv(dim, entries);
            let trial = learner.begin_trial(&x).unwrap();
            learner.feedback(g).unwrap();
            rec.record((t + 1) as u64, &x, &trial, g, None);
        }
        rec.finish().unwrap()
    }

    #[test]
    fn folded_stats_match_learner_state_exactly() {
        let hist = record_run(LearnerKind::Scinol1, 1.0);
        let mut l = Scinol1::new(3, 1.0).unwrap();
        for rec in &hist.trials {
            let x = fv(3, &rec.x);
            l.begin_trial(&x).unwrap();
            l.feedback(rec.g).unwrap();
        }
        for i in 0..3 {
            let c = l.coord(i);
            let s = &hist.terminal_stats;
            assert_eq!(c.m.to_bits(), s.m[i].to_bits());
            assert_eq!(c.g_cum.to_bits(), s.g_cum[i].to_bits());
            assert_eq!(c.s2.to_bits(), s.s2[i].to_bits());
            assert_eq!(c.beta.to_bits(), s.beta.as_ref().unwrap()[i].to_bits());
        }
        assert!(s_hat_positive(&hist));
        hist.validate().unwrap();

        let hist2 = record_run(LearnerKind::Scinol2, 0.5);
        let mut l = Scinol2::new(3, 0.5).unwrap();
        for rec in &hist2.trials {
            let x = fv(3, &rec.x);
            l.begin_trial(&x).unwrap();
            l.feedback(rec.g).unwrap();
        }
        for i in 0..3 {
            let c = l.coord(i);
            let s = &hist2.terminal_stats;
            assert_eq!(c.eta.to_bits(), s.eta.as_ref().unwrap()[i].to_bits());
        }
    }

    fn s_hat_positive(hist: &RunHistory) -> bool {
        (0..hist.config.dim).all(|i| hist.terminal_stats.s_hat(i) > 0.0)
    }

    #[test]
    fn tau_is_first_nonzero_trial() {
        let hist = record_run(LearnerKind::Scinol1, 1.0);
        let s = &hist.terminal_stats;
        assert_eq!(s.tau, vec![Some(1), Some(2), Some(1)]);
        assert_eq!(s.x_tau, vec![Some(1.0), Some(0.5), Some(-2.0)]);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let hist = record_run(LearnerKind::Scinol2, 1.0);
        let text = hist.to_json().unwrap();
        let back = RunHistory::from_json(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(hist.trials.len(), back.trials.len());
        for (a, b) in hist.trials.iter().zip(&back.trials) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.x, b.x);
            assert_eq!(a.w, b.w);
            assert_eq!(a.yhat.to_bits(), b.yhat.to_bits());
            assert_eq!(a.g.to_bits(), b.g.to_bits());
        }
        for i in 0..3 {
            assert_eq!(
                hist.terminal_stats.s_hat(i).to_bits(),
                back.terminal_stats.s_hat(i).to_bits()
            );
        }
    }

    #[test]
    fn validate_rejects_tampered_stats() {
        let mut hist = record_run(LearnerKind::Scinol1, 1.0);
        hist.terminal_stats.s2[1] += 0.5;
        assert!(matches!(
            hist.validate(),
            Err(Error::HistoryMismatch { coord: 1, .. })
        ));
    }

    #[test]
    fn missing_epsilon_is_a_config_error() {
        let cfg = HistoryConfig {
            learner: LearnerKind::Scinol1,
            loss: Loss::Logistic,
            dim: 1,
            epsilon: None,
            eta: None,
        };
        assert!(matches!(
            fold_terminal_stats(&cfg, &[]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn baseline_history_skips_wealth_stats() {
        let cfg = HistoryConfig {
            learner: LearnerKind::Sgd,
            loss: Loss::Logistic,
            dim: 2,
            epsilon: None,
            eta: Some(0.1),
        };
        let stats = fold_terminal_stats(
            &cfg,
            &[TrialRecord {
                t: 1,
                x: vec![(0, 2.0)],
                w: vec![],
                yhat: 0.0,
                g: -0.5,
                y: None,
            }],
        )
        .unwrap();
        assert!(stats.beta.is_none() && stats.eta.is_none());
        assert_eq!(stats.g_cum[0], 1.0);
        assert_eq!(stats.s2[0], 1.0);
        assert_eq!(stats.tau, vec![Some(1), None]);
    }
}
