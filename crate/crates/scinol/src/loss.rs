//! Convex losses with subgradients bounded by 1 in max-norm.
//!
//! All losses here are 1-Lipschitz in the prediction, which is what the
//! learners' gradient contract (|g| ≤ 1 per component) relies on. Scalar
//! losses pair with [`Label::Binary`] or [`Label::Real`]; cross-entropy pairs
//! with [`Label::Class`] and vector predictions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Label, Prediction};
use crate::num::{log_sum_exp, sigmoid, sign, softplus};

/// Loss selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// ln(1 + e^{-y·ŷ}) for y ∈ {-1, +1}.
    Logistic,
    /// max{0, 1 - y·ŷ} for y ∈ {-1, +1}.
    Hinge,
    /// |ŷ - y| for real y.
    Absolute,
    /// -ŷ_y + ln Σ_k e^{ŷ_k} over `classes` scores.
    CrossEntropy { classes: usize },
}

/// Subgradient of a loss with respect to the prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum Gradient {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Loss {
    pub fn is_multiclass(&self) -> bool {
        matches!(self, Loss::CrossEntropy { .. })
    }

    /// ℓ(y, ŷ). Nonnegative for every variant.
    pub fn value(&self, y: &Label, yhat: &Prediction) -> Result<f64> {
        match self {
            Loss::Logistic => {
                let (s, z) = binary_scalar(y, yhat)?;
                Ok(softplus(-s * z))
            }
            Loss::Hinge => {
                let (s, z) = binary_scalar(y, yhat)?;
                Ok((1.0 - s * z).max(0.0))
            }
            Loss::Absolute => {
                let (target, z) = real_scalar(y, yhat)?;
                Ok((z - target).abs())
            }
            Loss::CrossEntropy { classes } => {
                let (c, v) = class_vector(y, yhat, *classes)?;
                Ok(log_sum_exp(v) - v[c])
            }
        }
    }

    /// ∂ℓ/∂ŷ, with the deterministic choices at kinks: hinge returns -y at
    /// y·ŷ = 1, absolute returns 0 at ŷ = y.
    pub fn subgradient(&self, y: &Label, yhat: &Prediction) -> Result<Gradient> {
        match self {
            Loss::Logistic => {
                let (s, z) = binary_scalar(y, yhat)?;
                Ok(Gradient::Scalar(-s * sigmoid(-s * z)))
            }
            Loss::Hinge => {
                let (s, z) = binary_scalar(y, yhat)?;
                Ok(Gradient::Scalar(if s * z <= 1.0 { -s } else { 0.0 }))
            }
            Loss::Absolute => {
                let (target, z) = real_scalar(y, yhat)?;
                Ok(Gradient::Scalar(sign(z - target)))
            }
            Loss::CrossEntropy { classes } => {
                let (c, v) = class_vector(y, yhat, *classes)?;
                let mut g = softmax(v);
                g[c] -= 1.0;
                Ok(Gradient::Vector(g))
            }
        }
    }
}

/// Softmax with max-shift so no component overflows.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|&x| (x - m).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn binary_scalar(y: &Label, yhat: &Prediction) -> Result<(f64, f64)> {
    let s = match y {
        Label::Binary(s) => *s as f64,
        other => {
            return Err(Error::LabelMismatch {
                expected: "binary",
                got: other.kind_name(),
            })
        }
    };
    Ok((s, scalar_pred(yhat)?))
}

fn real_scalar(y: &Label, yhat: &Prediction) -> Result<(f64, f64)> {
    let target = match y {
        Label::Real(t) if t.is_finite() => *t,
        Label::Real(_) => return Err(Error::NonFinite { what: "label" }),
        other => {
            return Err(Error::LabelMismatch {
                expected: "real",
                got: other.kind_name(),
            })
        }
    };
    Ok((target, scalar_pred(yhat)?))
}

fn class_vector<'a>(y: &Label, yhat: &'a Prediction, classes: usize) -> Result<(usize, &'a [f64])> {
    let c = match y {
        Label::Class(c) => *c,
        other => {
            return Err(Error::LabelMismatch {
                expected: "class",
                got: other.kind_name(),
            })
        }
    };
    if c >= classes {
        return Err(Error::ClassOutOfRange { class: c, classes });
    }
    let v = match yhat {
        Prediction::Vector(v) => v.as_slice(),
        Prediction::Scalar(_) => {
            return Err(Error::LabelMismatch {
                expected: "vector prediction",
                got: "scalar prediction",
            })
        }
    };
    if v.len() != classes {
        return Err(Error::DimMismatch {
            expected: classes,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "prediction" });
    }
    Ok((c, v))
}

fn scalar_pred(yhat: &Prediction) -> Result<f64> {
    match yhat {
        Prediction::Scalar(z) if z.is_finite() => Ok(*z),
        Prediction::Scalar(_) => Err(Error::NonFinite { what: "prediction" }),
        Prediction::Vector(_) => Err(Error::LabelMismatch {
            expected: "scalar prediction",
            got: "vector prediction",
        }),
    }
}
