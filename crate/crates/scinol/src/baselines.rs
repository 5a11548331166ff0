//! Reference online learners: decaying-rate SGD, per-dimension OGD,
//! diagonal AdaGrad, and bias-corrected Adam.
//!
//! Each comes in two forms: a pure step function over dense vectors, used by
//! the verification suite to replay recurrences, and a stateful wrapper
//! implementing [`ScalarLearner`] for the experiment harness. None of these
//! learners is scale-invariant; they are the contrast class for the
//! scale-invariant learners in [`crate::learners`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::learners::{ScalarLearner, Trial};

pub const DEFAULT_ADAM_BETA1: f64 = 0.9;
pub const DEFAULT_ADAM_BETA2: f64 = 0.999;
pub const DEFAULT_STABILITY_DELTA: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Sgd,
    OgdPerDim,
    AdaGrad,
    Adam,
}

/// Hyperparameters for one baseline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    /// Global rate; ignored by OgdPerDim when `eta_per_dim` is set.
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_per_dim: Option<Vec<f64>>,
    #[serde(default = "default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_delta")]
    pub stability_delta: f64,
}

fn default_beta1() -> f64 {
    DEFAULT_ADAM_BETA1
}
fn default_beta2() -> f64 {
    DEFAULT_ADAM_BETA2
}
fn default_delta() -> f64 {
    DEFAULT_STABILITY_DELTA
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind, eta: f64) -> Self {
        BaselineConfig {
            kind,
            eta,
            eta_per_dim: None,
            adam_beta1: DEFAULT_ADAM_BETA1,
            adam_beta2: DEFAULT_ADAM_BETA2,
            stability_delta: DEFAULT_STABILITY_DELTA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eta must be a positive finite number, got {}",
                self.eta
            )));
        }
        if let Some(etas) = &self.eta_per_dim {
            for (i, &e) in etas.iter().enumerate() {
                if !(e >= 0.0 && e.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "per-dimension rate {i} must be finite and nonnegative, got {e}"
                    )));
                }
            }
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1), got {b}"
                )));
            }
        }
        if !(self.stability_delta > 0.0 && self.stability_delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "stability_delta must be a positive finite number, got {}",
                self.stability_delta
            )));
        }
        Ok(())
    }

    pub fn build(&self, dim: usize) -> Result<Box<dyn ScalarLearner>> {
        self.validate()?;
        Ok(match self.kind {
            BaselineKind::Sgd => Box::new(Sgd::new(dim, self.eta)?),
            BaselineKind::OgdPerDim => {
                let etas = match &self.eta_per_dim {
                    Some(etas) => {
                        if etas.len() != dim {
                            return Err(Error::DimMismatch {
                                expected: dim,
                                got: etas.len(),
                            });
                        }
                        etas.clone()
                    }
                    None => vec![self.eta; dim],
                };
                Box::new(OgdPerDim::new(etas)?)
            }
            BaselineKind::AdaGrad => {
                Box::new(AdaGrad::new(dim, self.eta, self.stability_delta)?)
            }
            BaselineKind::Adam => Box::new(Adam::new(
                dim,
                self.eta,
                self.adam_beta1,
                self.adam_beta2,
                self.stability_delta,
            )?),
        })
    }
}

fn check_finite_slice(what: &'static str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what });
    }
    Ok(())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimMismatch { expected, got });
    }
    Ok(())
}

fn check_step_index(t: u64) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidConfig(
            "step index t must be at least 1".into(),
        ));
    }
    Ok(())
}

/// w' = w − (eta/√t)·grad.
pub fn sgd_step(w: &[f64], grad: &[f64], eta: f64, t: u64) -> Result<Vec<f64>> {
    check_len(w.len(), grad.len())?;
    check_finite_slice("sgd gradient", grad)?;
    check_step_index(t)?;
    let rate = eta / (t as f64).sqrt();
    Ok(w.iter().zip(grad).map(|(wi, gi)| wi - rate * gi).collect())
}

/// w'_i = w_i − η_i·grad_i.
pub fn ogd_perdim_step(w: &[f64], grad: &[f64], eta_per_dim: &[f64]) -> Result<Vec<f64>> {
    check_len(w.len(), grad.len())?;
    check_len(w.len(), eta_per_dim.len())?;
    check_finite_slice("ogd gradient", grad)?;
    Ok(w.iter()
        .zip(grad)
        .zip(eta_per_dim)
        .map(|((wi, gi), ei)| wi - ei * gi)
        .collect())
}

/// accum' = accum + grad²; w'_i = w_i − eta·grad_i/(√accum'_i + delta).
pub fn adagrad_step(
    w: &[f64],
    grad: &[f64],
    eta: f64,
    delta: f64,
    accum: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(w.len(), grad.len())?;
    check_len(w.len(), accum.len())?;
    check_finite_slice("adagrad gradient", grad)?;
    if accum.iter().any(|&a| a < 0.0) {
        return Err(Error::InvalidConfig(
            "adagrad accumulator must be nonnegative".into(),
        ));
    }
    let mut accum_next = Vec::with_capacity(w.len());
    let mut w_next = Vec::with_capacity(w.len());
    for ((&wi, &gi), &ai) in w.iter().zip(grad).zip(accum) {
        let a = ai + gi * gi;
        accum_next.push(a);
        w_next.push(wi - eta * gi / (a.sqrt() + delta));
    }
    Ok((w_next, accum_next))
}

/// Bias-corrected Adam step at trial t (1-based):
/// m' = β₁m + (1−β₁)grad; v' = β₂v + (1−β₂)grad²;
/// w' = w − eta·m̂/(√v̂ + delta) with m̂ = m'/(1−β₁ᵗ), v̂ = v'/(1−β₂ᵗ).
#[allow(clippy::too_many_arguments)]
pub fn adam_step(
    w: &[f64],
    grad: &[f64],
    eta: f64,
    t: u64,
    m: &[f64],
    v: &[f64],
    beta1: f64,
    beta2: f64,
    delta: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    check_len(w.len(), grad.len())?;
    check_len(w.len(), m.len())?;
    check_len(w.len(), v.len())?;
    check_finite_slice("adam gradient", grad)?;
    check_step_index(t)?;
    let bc1 = 1.0 - beta1.powi(t as i32);
    let bc2 = 1.0 - beta2.powi(t as i32);
    let mut m_next = Vec::with_capacity(w.len());
    let mut v_next = Vec::with_capacity(w.len());
    let mut w_next = Vec::with_capacity(w.len());
    for ((&wi, &gi), (&mi, &vi)) in w.iter().zip(grad).zip(m.iter().zip(v)) {
        let mn = beta1 * mi + (1.0 - beta1) * gi;
        let vn = beta2 * vi + (1.0 - beta2) * gi * gi;
        let m_hat = mn / bc1;
        let v_hat = vn / bc2;
        w_next.push(wi - eta * m_hat / (v_hat.sqrt() + delta));
        m_next.push(mn);
        v_next.push(vn);
    }
    Ok((w_next, m_next, v_next))
}

fn check_positive_rate(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "eta must be a positive finite number, got {eta}"
        )));
    }
    Ok(())
}

fn check_scalar_gradient(g: f64) -> Result<()> {
    if !g.is_finite() {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct PendingX {
    entries: Vec<(usize, f64)>,
}

fn support_trial(w: &[f64], x: &FeatureVector) -> Trial {
    let mut prediction = 0.0;
    let mut weights = Vec::with_capacity(x.nnz());
    for &(i, xv) in x.entries() {
        prediction += w[i] * xv;
        weights.push((i, w[i]));
    }
    Trial {
        weights,
        prediction,
    }
}

fn guard_begin(
    pending: &Option<PendingX>,
    dim: usize,
    x: &FeatureVector,
) -> Result<()> {
    if pending.is_some() {
        return Err(Error::Protocol(
            "begin_trial called while a trial is awaiting feedback",
        ));
    }
    if x.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            got: x.dim(),
        });
    }
    Ok(())
}

/// OGD with the rate decaying as eta/√t.
#[derive(Debug, Clone)]
pub struct Sgd {
    eta: f64,
    w: Vec<f64>,
    t: u64,
    pending: Option<PendingX>,
}

impl Sgd {
    pub fn new(dim: usize, eta: f64) -> Result<Self> {
        check_positive_rate(eta)?;
        Ok(Sgd {
            eta,
            w: vec![0.0; dim],
            t: 0,
            pending: None,
        })
    }
}

impl ScalarLearner for Sgd {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<Trial> {
        guard_begin(&self.pending, self.dim(), x)?;
        self.t += 1;
        self.pending = Some(PendingX {
            entries: x.entries().to_vec(),
        });
        Ok(support_trial(&self.w, x))
    }

    fn feedback(&mut self, g: f64) -> Result<()> {
        check_scalar_gradient(g)?;
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        let rate = self.eta / (self.t as f64).sqrt();
        for &(i, xv) in &pending.entries {
            self.w[i] -= rate * g * xv;
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }

    fn reset_trial_clock(&mut self) {
        self.t = 0;
    }
}

/// OGD with fixed per-dimension learning rates.
#[derive(Debug, Clone)]
pub struct OgdPerDim {
    eta: Vec<f64>,
    w: Vec<f64>,
    pending: Option<PendingX>,
}

impl OgdPerDim {
    pub fn new(eta_per_dim: Vec<f64>) -> Result<Self> {
        for (i, &e) in eta_per_dim.iter().enumerate() {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "per-dimension rate {i} must be finite and nonnegative, got {e}"
                )));
            }
        }
        let dim = eta_per_dim.len();
        Ok(OgdPerDim {
            eta: eta_per_dim,
            w: vec![0.0; dim],
            pending: None,
        })
    }
}

impl ScalarLearner for OgdPerDim {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<Trial> {
        guard_begin(&self.pending, self.dim(), x)?;
        self.pending = Some(PendingX {
            entries: x.entries().to_vec(),
        });
        Ok(support_trial(&self.w, x))
    }

    fn feedback(&mut self, g: f64) -> Result<()> {
        check_scalar_gradient(g)?;
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        for &(i, xv) in &pending.entries {
            self.w[i] -= self.eta[i] * g * xv;
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }
}

/// Diagonal AdaGrad.
#[derive(Debug, Clone)]
pub struct AdaGrad {
    eta: f64,
    delta: f64,
    w: Vec<f64>,
    accum: Vec<f64>,
    pending: Option<PendingX>,
}

impl AdaGrad {
    pub fn new(dim: usize, eta: f64, delta: f64) -> Result<Self> {
        check_positive_rate(eta)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "stability_delta must be a positive finite number, got {delta}"
            )));
        }
        Ok(AdaGrad {
            eta,
            delta,
            w: vec![0.0; dim],
            accum: vec![0.0; dim],
            pending: None,
        })
    }
}

impl ScalarLearner for AdaGrad {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<Trial> {
        guard_begin(&self.pending, self.dim(), x)?;
        self.pending = Some(PendingX {
            entries: x.entries().to_vec(),
        });
        Ok(support_trial(&self.w, x))
    }

    fn feedback(&mut self, g: f64) -> Result<()> {
        check_scalar_gradient(g)?;
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        for &(i, xv) in &pending.entries {
            let gi = g * xv;
            self.accum[i] += gi * gi;
            self.w[i] -= self.eta * gi / (self.accum[i].sqrt() + self.delta);
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }
}

/// Bias-corrected Adam. The moment estimates decay every trial on every
/// coordinate, so feedback walks the full dimension, not just the support.
#[derive(Debug, Clone)]
pub struct Adam {
    eta: f64,
    beta1: f64,
    beta2: f64,
    delta: f64,
    w: Vec<f64>,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pending: Option<PendingX>,
}

impl Adam {
    pub fn new(dim: usize, eta: f64, beta1: f64, beta2: f64, delta: f64) -> Result<Self> {
        check_positive_rate(eta)?;
        for (name, b) in [("adam_beta1", beta1), ("adam_beta2", beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1), got {b}"
                )));
            }
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "stability_delta must be a positive finite number, got {delta}"
            )));
        }
        Ok(Adam {
            eta,
            beta1,
            beta2,
            delta,
            w: vec![0.0; dim],
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
            pending: None,
        })
    }

    pub fn with_defaults(dim: usize, eta: f64) -> Result<Self> {
        Adam::new(
            dim,
            eta,
            DEFAULT_ADAM_BETA1,
            DEFAULT_ADAM_BETA2,
            DEFAULT_STABILITY_DELTA,
        )
    }
}

impl ScalarLearner for Adam {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn begin_trial(&mut self, x: &FeatureVector) -> Result<Trial> {
        guard_begin(&self.pending, self.dim(), x)?;
        self.t += 1;
        self.pending = Some(PendingX {
            entries: x.entries().to_vec(),
        });
        Ok(support_trial(&self.w, x))
    }

    fn feedback(&mut self, g: f64) -> Result<()> {
        check_scalar_gradient(g)?;
        let pending = self
            .pending
            .take()
            .ok_or(Error::Protocol("feedback without a matching begin_trial"))?;
        let mut grad = vec![0.0; self.w.len()];
        for &(i, xv) in &pending.entries {
            grad[i] = g * xv;
        }
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (i, &gi) in grad.iter().enumerate() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * gi;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * gi * gi;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            self.w[i] -= self.eta * m_hat / (v_hat.sqrt() + self.delta);
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }

    fn reset_trial_clock(&mut self) {
        self.t = 0;
        self.m.iter_mut().for_each(|m| *m = 0.0);
        self.v.iter_mut().for_each(|v| *v = 0.0);
    }
}
