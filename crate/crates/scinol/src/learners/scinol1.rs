//! Additive-potential scale-invariant learner.

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::{
    beta_candidate, cell_weight_1, check_epsilon, check_gradient, LearnerConfig, PendingTrial,
    ScalarLearner, Trial,
};

/// Per-coordinate state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordState1 {
    /// Running max of |x_{j,i}|, committed before each trial's weights.
    pub m: f64,
    /// Negative cumulative gradient −Σ_j g_j x_{j,i}.
    pub g_cum: f64,
    /// Σ_j (g_j x_{j,i})².
    pub s2: f64,
    /// Shrinking coefficient, in (0, ε], never below ε/t after t trials.
    pub beta: f64,
}

/// Scale-invariant online learner with weights
/// w_{t,i} = β_{t,i}·sgn(θ)·(e^{|θ|/2} − 1)/(2Ŝ), θ = G/Ŝ, Ŝ = √(S² + M²).
///
/// No learning rate: ε only shifts constants. Per-trial work is O(nnz(x)).
#[derive(Debug, Clone)]
pub struct Scinol1 {
    eps: f64,
    coords: Vec<CoordState1>,
    /// Trials begun; the β update divides by this clock.
    t: u64,
    pending: Option<PendingTrial>,
    exp_clamps: u64,
}

impl Scinol1 {
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Scinol1 {
            eps: epsilon,
            coords: vec![
                CoordState1 {
                    m: 0.0,
                    g_cum: 0.0,
                    s2: 0.0,
                    beta: epsilon,
                };
                dim
            ],
            t: 0,
            pending: None,
            exp_clamps: 0,
        })
    }

    pub fn from_config(cfg: &LearnerConfig) -> Result<Self> {
        Scinol1::new(cfg.dim, cfg.epsilon)
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn coord(&self, i: usize) -> CoordState1 {
        self.coords[i]
    }

    /// Trials begun so far on the internal clock.
    pub fn trials(&self) -> u64 {
        self.t
    }

    /// How often the weight exponent hit its safety cap. Nonzero values mean
    /// the run left the regime where e^{|θ|/2} is representable.
    pub fn exponent_clamp_count(&self) -> u64 {
        self.exp_clamps
    }
}

impl ScalarLearner for Scinol1 {
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
        self.t += 1;
        let t_f = self.t as f64;
        let mut weights = Vec::with_capacity(x.nnz());
        let mut prediction = 0.0;
        for &(i, xv) in x.entries() {
            let c = &mut self.coords[i];
            c.m = c.m.max(xv.abs());
            if xv != 0.0 {
                c.beta = c.beta.min(beta_candidate(self.eps, c.s2, c.m, xv, t_f));
            }
            let w = cell_weight_1(c.g_cum, c.s2, c.m, c.beta, &mut self.exp_clamps);
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
        for &(i, xv) in &pending.entries {
            let gi = g * xv;
            let c = &mut self.coords[i];
            c.g_cum -= gi;
            c.s2 += gi * gi;
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        let mut ignored = 0u64;
        self.coords
            .iter()
            .map(|c| cell_weight_1(c.g_cum, c.s2, c.m, c.beta, &mut ignored))
            .collect()
    }

    fn reset_trial_clock(&mut self) {
        self.t = 0;
    }
}
