//! Wealth-multiplying scale-invariant learner.

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::{
    cell_weight_2, check_epsilon, check_gradient, LearnerConfig, PendingTrial, ScalarLearner,
    Trial,
};

/// Per-coordinate state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordState2 {
    /// Running max of |x_{j,i}|.
    pub m: f64,
    /// Negative cumulative gradient.
    pub g_cum: f64,
    /// Σ (g_j x_{j,i})².
    pub s2: f64,
    /// ε-shifted cumulative reward; stays strictly positive because each
    /// trial multiplies it by a factor in [1/2, 3/2].
    pub eta: f64,
}

/// Scale-invariant online learner with weights
/// w_{t,i} = sgn(θ)·min{|θ|, 1}·η_{t−1,i}/(2Ŝ). The weight caps its own
/// per-trial reward swing at η/2, so η never reaches zero.
#[derive(Debug, Clone)]
pub struct Scinol2 {
    eps: f64,
    coords: Vec<CoordState2>,
    pending: Option<PendingTrial>,
}

impl Scinol2 {
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Scinol2 {
            eps: epsilon,
            coords: vec![
                CoordState2 {
                    m: 0.0,
                    g_cum: 0.0,
                    s2: 0.0,
                    eta: epsilon,
                };
                dim
            ],
            pending: None,
        })
    }

    pub fn from_config(cfg: &LearnerConfig) -> Result<Self> {
        Scinol2::new(cfg.dim, cfg.epsilon)
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn coord(&self, i: usize) -> CoordState2 {
        self.coords[i]
    }
}

impl ScalarLearner for Scinol2 {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<Trial> {
        if self.pending.is_some() {
            return Err(Error::Protocol(
                "begin_trial called while a trial is awaiting feedback",
            ));
        }
        if x.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let mut weights = Vec::with_capacity(x.nnz());
        let mut prediction = 0.0;
        for &(i, xv) in x.entries() {
            let c = &mut self.coords[i];
            c.m = c.m.max(xv.abs());
            let w = cell_weight_2(c.g_cum, c.s2, c.m, c.eta);
            weights.push((i, w));
            prediction += w * xv;
        }
        self.pending = Some(PendingTrial {
            entries: x.entries().to_vec(),
            weights: weights.clone(),
        });
        Ok(Trial {
            weights,
            prediction,
        })
    }

    fn feedback(&mut self, g: f64) -> Result<()> {
        check_gradient(g)?;
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        for (&(i, xv), &(_, w)) in pending.entries.iter().zip(&pending.weights) {
            let gi = g * xv;
            let c = &mut self.coords[i];
            c.g_cum -= gi;
            c.s2 += gi * gi;
            c.eta -= gi * w;
            debug_assert!(c.eta > 0.0, "eta must stay positive");
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| cell_weight_2(c.g_cum, c.s2, c.m, c.eta))
            .collect()
    }
}
