//! Multiclass grids: the univariate updates applied per (feature, class)
//! cell, with M shared across classes of the same feature.

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::{
    beta_candidate, cell_weight_1, cell_weight_2, check_epsilon, check_gradient, MultiTrial,
    VectorLearner,
};

#[derive(Debug, Clone, Copy)]
struct Cell1 {
    g_cum: f64,
    s2: f64,
    beta: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cell2 {
    g_cum: f64,
    s2: f64,
    eta: f64,
}

#[derive(Debug, Clone)]
struct MultiPending {
    entries: Vec<(usize, f64)>,
    weights: Vec<(usize, Vec<f64>)>,
}

/// d×K grid of additive-potential cells.
#[derive(Debug, Clone)]
pub struct MultiScinol1 {
    eps: f64,
    classes: usize,
    m: Vec<f64>,
    cells: Vec<Cell1>,
    t: u64,
    pending: Option<MultiPending>,
    exp_clamps: u64,
}

impl MultiScinol1 {
    pub fn new(dim: usize, classes: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if classes == 0 {
            return Err(Error::InvalidConfig("classes must be at least 1".into()));
        }
        Ok(MultiScinol1 {
            eps: epsilon,
            classes,
            m: vec![0.0; dim],
            cells: vec![
                Cell1 {
                    g_cum: 0.0,
                    s2: 0.0,
                    beta: epsilon,
                };
                dim * classes
            ],
            t: 0,
            pending: None,
            exp_clamps: 0,
        })
    }

    /// (M, G, S², β) of cell (feature i, class k).
    pub fn cell(&self, i: usize, k: usize) -> (f64, f64, f64, f64) {
        let c = self.cells[i * self.classes + k];
        (self.m[i], c.g_cum, c.s2, c.beta)
    }

    pub fn exponent_clamp_count(&self) -> u64 {
        self.exp_clamps
    }
}

impl VectorLearner for MultiScinol1 {
    fn dim(&self) -> usize {
        self.m.len()
    }

    fn classes(&self) -> usize {
        self.classes
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<MultiTrial> {
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
        let mut prediction = vec![0.0; self.classes];
        for &(i, xv) in x.entries() {
            self.m[i] = self.m[i].max(xv.abs());
            let m = self.m[i];
            let mut row = Vec::with_capacity(self.classes);
            for (k, pred_k) in prediction.iter_mut().enumerate() {
                let c = &mut self.cells[i * self.classes + k];
                if xv != 0.0 {
                    c.beta = c.beta.min(beta_candidate(self.eps, c.s2, m, xv, t_f));
                }
                let w = cell_weight_1(c.g_cum, c.s2, m, c.beta, &mut self.exp_clamps);
                *pred_k += w * xv;
                row.push(w);
            }
            weights.push((i, row));
        }
        self.pending = Some(MultiPending {
            entries: x.entries().to_vec(),
            weights: weights.clone(),
        });
        Ok(MultiTrial {
            weights,
            prediction,
        })
    }

    fn feedback(&mut self, g: &[f64]) -> Result<()> {
        if g.len() != self.classes {
            return Err(Error::DimMismatch {
                expected: self.classes,
                got: g.len(),
            });
        }
        for &gk in g {
            check_gradient(gk)?;
        }
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        for &(i, xv) in &pending.entries {
            for (k, &gk) in g.iter().enumerate() {
                let gi = gk * xv;
                let c = &mut self.cells[i * self.classes + k];
                c.g_cum -= gi;
                c.s2 += gi * gi;
            }
        }
        Ok(())
    }

    fn weights(&self) -> Vec<Vec<f64>> {
        let mut ignored = 0u64;
        (0..self.dim())
            .map(|i| {
                (0..self.classes)
                    .map(|k| {
                        let c = self.cells[i * self.classes + k];
                        cell_weight_1(c.g_cum, c.s2, self.m[i], c.beta, &mut ignored)
                    })
                    .collect()
            })
            .collect()
    }

    fn reset_trial_clock(&mut self) {
        self.t = 0;
    }
}

/// d×K grid of wealth-multiplying cells.
#[derive(Debug, Clone)]
pub struct MultiScinol2 {
    eps: f64,
    classes: usize,
    m: Vec<f64>,
    cells: Vec<Cell2>,
    pending: Option<MultiPending>,
}

impl MultiScinol2 {
    pub fn new(dim: usize, classes: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if classes == 0 {
            return Err(Error::InvalidConfig("classes must be at least 1".into()));
        }
        Ok(MultiScinol2 {
            eps: epsilon,
            classes,
            m: vec![0.0; dim],
            cells: vec![
                Cell2 {
                    g_cum: 0.0,
                    s2: 0.0,
                    eta: epsilon,
                };
                dim * classes
            ],
            pending: None,
        })
    }

    /// (M, G, S², η) of cell (feature i, class k).
    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn cell(&self, i: usize, k: usize) -> (f64, f64, f64, f64) {
        let c = self.cells[i * self.classes + k];
        (self.m[i], c.g_cum, c.s2, c.eta)
    }
}

impl VectorLearner for MultiScinol2 {
    fn dim(&self) -> usize {
        self.m.len()
    }

    fn classes(&self) -> usize {
        self.classes
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<MultiTrial> {
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
        let mut prediction = vec![0.0; self.classes];
        for &(i, xv) in x.entries() {
            self.m[i] = self.m[i].max(xv.abs());
            let m = self.m[i];
            let mut row = Vec::with_capacity(self.classes);
            for (k, pred_k) in prediction.iter_mut().enumerate() {
                let c = &self.cells[i * self.classes + k];
                let w = cell_weight_2(c.g_cum, c.s2, m, c.eta);
                *pred_k += w * xv;
                row.push(w);
            }
            weights.push((i, row));
        }
        self.pending = Some(MultiPending {
            entries: x.entries().to_vec(),
            weights: weights.clone(),
        });
        Ok(MultiTrial {
            weights,
            prediction,
        })
    }

    fn feedback(&mut self, g: &[f64]) -> Result<()> {
        if g.len() != self.classes {
            return Err(Error::DimMismatch {
                expected: self.classes,
                got: g.len(),
            });
        }
        for &gk in g {
            check_gradient(gk)?;
        }
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        for (&(i, xv), (_, row)) in pending.entries.iter().zip(&pending.weights) {
            for (k, &gk) in g.iter().enumerate() {
                let gi = gk * xv;
                let c = &mut self.cells[i * self.classes + k];
                c.g_cum -= gi;
                c.s2 += gi * gi;
                c.eta -= gi * row[k];
                debug_assert!(c.eta > 0.0, "eta must stay positive");
            }
        }
        Ok(())
    }

    fn weights(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| {
                (0..self.classes)
                    .map(|k| {
                        let c = self.cells[i * self.classes + k];
                        cell_weight_2(c.g_cum, c.s2, self.m[i], c.eta)
                    })
                    .collect()
            })
            .collect()
    }
}
