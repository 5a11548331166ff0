//! Numeric verifiers: scalar inequality grids, per-trial progress replay,
//! cumulative increment bounds, and regret measurement on recorded runs.
//!
//! The replay code here deliberately re-derives every recurrence from the
//! recorded inputs instead of calling into the learner implementations, so
//! a learner bug and a verifier bug would have to coincide to go unnoticed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{Label, Prediction};
use crate::history::{LearnerKind, RunHistory};
use crate::loss::Loss;
use crate::num::sign;

use super::potentials::{h_fn, psi1, psi2};

/// Signed violation of lhs ≤ rhs: positive iff violated. Absolute while
/// both sides are within [-1, 1], relative once either side grows past 1,
/// so mixed-scale inequalities are judged evenly.
pub fn violation(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / lhs.abs().max(rhs.abs()).max(1.0)
}

/// Uniform nv×nq grid over the rectangle v_range × q_range.
pub fn grid_points(
    v_range: (f64, f64),
    q_range: (f64, f64),
    nv: usize,
    nq: usize,
) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(nv * nq);
    for a in 0..nv {
        let v = if nv == 1 {
            v_range.0
        } else {
            v_range.0 + (v_range.1 - v_range.0) * a as f64 / (nv - 1) as f64
        };
        for b in 0..nq {
            let q = if nq == 1 {
                q_range.0
            } else {
                q_range.0 + (q_range.1 - q_range.0) * b as f64 / (nq - 1) as f64
            };
            pts.push((v, q));
        }
    }
    pts
}

/// n random (v, q) pairs with v uniform in v_range and q uniform in [-1, 1].
pub fn random_points(n: usize, seed: u64, v_range: (f64, f64)) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (
                rng.gen_range(v_range.0..=v_range.1),
                rng.gen_range(-1.0..=1.0),
            )
        })
        .collect()
}

fn check_q(q: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&q) {
        return Err(Error::GradientOutOfRange(q));
    }
    Ok(())
}

/// Scalar inequality behind the additive learner's per-trial progress:
/// (q·sgn(v)/2)(e^{|v|/2} − 1) + e^z − z ≤ e^{|v|/2} − |v|/2 + q²
/// with z = |v−q|/(2√(1+q²)). Returns the max violation over the points.
pub fn check_core_ineq_1(points: &[(f64, f64)]) -> Result<f64> {
    let mut max_violation = f64::NEG_INFINITY;
    for &(v, q) in points {
        check_q(q)?;
        let z = (v - q).abs() / (2.0 * (1.0 + q * q).sqrt());
        let ev = (0.5 * v.abs()).exp();
        let lhs = 0.5 * q * sign(v) * (ev - 1.0) + z.exp() - z;
        let rhs = ev - 0.5 * v.abs() + q * q;
        max_violation = max_violation.max(violation(lhs, rhs));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    Ok(max_violation)
}

/// Scalar inequality behind the multiplicative learner's progress:
/// exp{½h((v−q)/√(1+q²)) − ½h(v) − ½q²} ≤ 1 − ½q·sgn(v)·min{|v|,1}.
pub fn check_core_ineq_2(points: &[(f64, f64)]) -> Result<f64> {
    let mut max_violation = f64::NEG_INFINITY;
    for &(v, q) in points {
        check_q(q)?;
        let shifted = (v - q) / (1.0 + q * q).sqrt();
        let lhs = (0.5 * h_fn(shifted) - 0.5 * h_fn(v) - 0.5 * q * q).exp();
        let rhs = 1.0 - 0.5 * q * sign(v) * v.abs().min(1.0);
        max_violation = max_violation.max(violation(lhs, rhs));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    Ok(max_violation)
}

#[derive(Debug, Clone, Copy)]
pub struct PerTrialOutcome {
    /// Number of (trial, coordinate) pairs evaluated.
    pub points: usize,
    pub max_violation: f64,
}

struct ReplayCoord {
    m: f64,
    g_cum: f64,
    s2: f64,
    // Wealth term: beta for the additive learner, eta for the multiplicative.
    wealth: f64,
}

fn weight_mismatch(replayed: f64, recorded: f64) -> bool {
    (replayed - recorded).abs() > 1e-9 * replayed.abs().max(recorded.abs()).max(1.0)
}

/// Replays a recorded run with the given learner's recurrences and checks
/// the per-trial progress inequality at every support coordinate.
///
/// Additive learner: w·g·x ≤ ψ_prev(G_prev) − ψ_cur(G_cur) + ε/t, where each
/// potential uses its own stage's (β, Ŝ).
/// Multiplicative learner: η_cur/η_prev ≥ [ψ_cur(G_cur)/ψ_prev(G_prev)]·e^{−δ}
/// with δ = (gx)²/(2(S²_prev + M²_cur)).
///
/// Replayed weights are compared against the recorded ones; divergence means
/// the history was not produced by this learner kind and is a typed error.
pub fn check_per_trial(hist: &RunHistory, kind: LearnerKind, eps: f64) -> Result<PerTrialOutcome> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be a positive finite number, got {eps}"
        )));
    }
    let additive = match kind {
        LearnerKind::Scinol1 => true,
        LearnerKind::Scinol2 => false,
        other => {
            return Err(Error::InvalidConfig(format!(
                "per-trial progress check applies to scale-invariant learners, not {}",
                other.name()
            )))
        }
    };
    let dim = hist.config.dim;
    let mut coords: Vec<ReplayCoord> = (0..dim)
        .map(|_| ReplayCoord {
            m: 0.0,
            g_cum: 0.0,
            s2: 0.0,
            wealth: eps,
        })
        .collect();
    let mut points = 0usize;
    let mut max_violation = f64::NEG_INFINITY;
    for rec in &hist.trials {
        if rec.t == 0 {
            return Err(Error::HistoryMismatch {
                t: 0,
                coord: 0,
                detail: "trial indices are 1-based".into(),
            });
        }
        for &(i, xv) in &rec.x {
            if i >= dim {
                return Err(Error::IndexOutOfBounds { index: i, dim });
            }
            let c = &mut coords[i];
            let gi = rec.g * xv;
            let m_cur = c.m.max(xv.abs());
            let denom2 = c.s2 + m_cur * m_cur;
            let (w, lhs, rhs);
            if additive {
                let s_hat_prev = (c.s2 + c.m * c.m).sqrt();
                let psi_prev = psi1(c.g_cum, c.wealth, s_hat_prev);
                if xv != 0.0 {
                    let cand = eps * denom2 / (xv * xv * rec.t as f64);
                    c.wealth = c.wealth.min(cand);
                }
                w = if denom2 == 0.0 {
                    0.0
                } else {
                    let s_hat = denom2.sqrt();
                    let theta = c.g_cum / s_hat;
                    sign(theta) * c.wealth * (0.5 * theta.abs()).exp_m1() / (2.0 * s_hat)
                };
                let g_new = c.g_cum - gi;
                let s2_new = c.s2 + gi * gi;
                let psi_cur = psi1(g_new, c.wealth, (s2_new + m_cur * m_cur).sqrt());
                lhs = w * gi;
                rhs = psi_prev - psi_cur + eps / rec.t as f64;
                c.g_cum = g_new;
                c.s2 = s2_new;
            } else {
                let s_hat_prev = (c.s2 + c.m * c.m).sqrt();
                let psi_prev = psi2(c.g_cum, s_hat_prev);
                w = if denom2 == 0.0 {
                    0.0
                } else {
                    let s_hat = denom2.sqrt();
                    let theta = c.g_cum / s_hat;
                    sign(theta) * theta.abs().min(1.0) * c.wealth / (2.0 * s_hat)
                };
                let delta = if gi == 0.0 { 0.0 } else { gi * gi / (2.0 * denom2) };
                let g_new = c.g_cum - gi;
                let s2_new = c.s2 + gi * gi;
                let eta_new = c.wealth - gi * w;
                let psi_cur = psi2(g_new, (s2_new + m_cur * m_cur).sqrt());
                // psi_prev >= 1 always, so the ratio is well defined.
                lhs = psi_cur / psi_prev * (-delta).exp();
                rhs = eta_new / c.wealth;
                c.g_cum = g_new;
                c.s2 = s2_new;
                c.wealth = eta_new;
            }
            c.m = m_cur;
            let recorded = rec.weight(i);
            if weight_mismatch(w, recorded) {
                return Err(Error::HistoryMismatch {
                    t: rec.t,
                    coord: i,
                    detail: format!("replayed weight {w} but the record has {recorded}"),
                });
            }
            max_violation = max_violation.max(violation(lhs, rhs));
            points += 1;
        }
    }
    Ok(PerTrialOutcome {
        points,
        max_violation: if points == 0 { 0.0 } else { max_violation },
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaCoord {
    pub coord: usize,
    /// Cumulative increment sum_{t≥τ} (g_t x_{t,i})² / (2(S²_{t−1} + M²_t)).
    pub delta: f64,
    /// ln(Ŝ²_T / x²_τ).
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct DeltaBoundOutcome {
    pub coords: Vec<DeltaCoord>,
    /// Coordinates with no nonzero input; the bound is undefined there.
    pub skipped: Vec<usize>,
    /// Max of delta − bound over evaluated coordinates (absolute).
    pub max_violation: f64,
}

/// Accumulates each coordinate's normalized squared-gradient increments and
/// compares the sum to the logarithm of the terminal-to-first scale ratio.
pub fn check_delta_bound(hist: &RunHistory) -> Result<DeltaBoundOutcome> {
    let dim = hist.config.dim;
    let mut m = vec![0.0f64; dim];
    let mut s2 = vec![0.0f64; dim];
    let mut delta = vec![0.0f64; dim];
    let mut x_tau: Vec<Option<f64>> = vec![None; dim];
    for rec in &hist.trials {
        for &(i, xv) in &rec.x {
            if i >= dim {
                return Err(Error::IndexOutOfBounds { index: i, dim });
            }
            let m_cur = m[i].max(xv.abs());
            if xv != 0.0 && x_tau[i].is_none() {
                x_tau[i] = Some(xv);
            }
            let gi = rec.g * xv;
            if gi != 0.0 {
                delta[i] += gi * gi / (2.0 * (s2[i] + m_cur * m_cur));
            }
            s2[i] += gi * gi;
            m[i] = m_cur;
        }
    }
    let mut coords = Vec::new();
    let mut skipped = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..dim {
        match x_tau[i] {
            None => skipped.push(i),
            Some(x) => {
                let s_hat2 = s2[i] + m[i] * m[i];
                let bound = (s_hat2 / (x * x)).ln();
                coords.push(DeltaCoord {
                    coord: i,
                    delta: delta[i],
                    bound,
                });
                max_violation = max_violation.max(delta[i] - bound);
            }
        }
    }
    Ok(DeltaBoundOutcome {
        max_violation: if coords.is_empty() { 0.0 } else { max_violation },
        coords,
        skipped,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct RegretEstimate {
    /// sum_t g_t · (ŷ_t − u·x_t), the convexity upper bound on regret.
    pub linearized: f64,
    /// sum_t ℓ(ŷ_t, y_t) − ℓ(u·x_t, y_t) when every record carries a label.
    pub true_loss: Option<f64>,
}

/// Measures regret of a recorded run against a fixed comparator u.
/// When labels are present, also evaluates the true loss gap and enforces
/// that it never exceeds the linearized value (convexity).
pub fn linearized_regret(hist: &RunHistory, u: &[f64]) -> Result<RegretEstimate> {
    if u.len() != hist.config.dim {
        return Err(Error::DimMismatch {
            expected: hist.config.dim,
            got: u.len(),
        });
    }
    let mut linearized = 0.0;
    for rec in &hist.trials {
        let mut cmp_pred = 0.0;
        for &(i, xv) in &rec.x {
            if i >= u.len() {
                return Err(Error::IndexOutOfBounds {
                    index: i,
                    dim: u.len(),
                });
            }
            cmp_pred += u[i] * xv;
        }
        linearized += rec.g * (rec.yhat - cmp_pred);
    }
    let all_labeled = hist.trials.iter().all(|r| r.y.is_some());
    let true_loss = if hist.trials.is_empty() {
        Some(0.0)
    } else if hist.config.loss.is_multiclass() || !all_labeled {
        None
    } else {
        let mut gap = 0.0;
        for rec in &hist.trials {
            let y = rec.y.as_ref().expect("checked above");
            let mut cmp_pred = 0.0;
            for &(i, xv) in &rec.x {
                cmp_pred += u[i] * xv;
            }
            gap += hist.config.loss.value(y, &Prediction::Scalar(rec.yhat))?
                - hist.config.loss.value(y, &Prediction::Scalar(cmp_pred))?;
        }
        Some(gap)
    };
    if let Some(t) = true_loss {
        if t > linearized + 1e-9 {
            return Err(Error::RegretOrder {
                true_regret: t,
                linearized,
            });
        }
    }
    Ok(RegretEstimate {
        linearized,
        true_loss,
    })
}

/// Convenience handle for losses stored in histories: evaluates a scalar
/// loss and its subgradient for replay purposes.
pub fn scalar_loss_grad(loss: &Loss, y: &Label, yhat: f64) -> Result<f64> {
    match loss.subgradient(y, &Prediction::Scalar(yhat))? {
        crate::loss::Gradient::Scalar(g) => Ok(g),
        crate::loss::Gradient::Vector(_) => Err(Error::Protocol(
            "scalar replay requires a scalar loss",
        )),
    }
}
