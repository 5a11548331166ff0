//! Sparse inputs, labels and predictions for online linear models.
//!
//! A [`FeatureVector`] stores only its nonzero-by-construction entries as
//! `(index, value)` pairs with strictly increasing indices; an absent index
//! means the value 0. Explicit zero entries are allowed (a file may contain
//! them) and every consumer treats them exactly like absent ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse input vector in a fixed ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    /// Builds a vector after validating indices (strictly increasing, within
    /// `dim`) and values (finite).
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        let mut last: Option<usize> = None;
        for &(i, v) in &entries {
            if i >= dim {
                return Err(Error::IndexOutOfBounds { index: i, dim });
            }
            if let Some(prev) = last {
                if i <= prev {
                    return Err(Error::UnsortedIndex { index: i });
                }
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "feature value",
                });
            }
            last = Some(i);
        }
        Ok(FeatureVector { dim, entries })
    }

    /// Converts a dense row, dropping exact zeros.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        FeatureVector::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Value at index `i`, 0 when absent. Binary search over the sorted
    /// entries.
    pub fn get(&self, i: usize) -> f64 {
        match self.entries.binary_search_by_key(&i, |&(idx, _)| idx) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Supervised target attached to an example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Label {
    /// Binary sign label, always -1 or +1.
    Binary(i8),
    /// Class index in 0..K.
    Class(usize),
    /// Real-valued regression target.
    Real(f64),
}

impl Label {
    pub fn binary(sign: i8) -> Result<Self> {
        if sign == 1 || sign == -1 {
            Ok(Label::Binary(sign))
        } else {
            Err(Error::InvalidConfig(format!(
                "binary label must be -1 or +1, got {sign}"
            )))
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Label::Binary(_) => "binary",
            Label::Class(_) => "class",
            Label::Real(_) => "real",
        }
    }
}

/// What a learner emits for one example: a scalar margin for binary or
/// regression models, or one score per class.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// One labeled example.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub x: FeatureVector,
    pub y: Label,
}

/// wᵀx for dense weights against a sparse input. The weight slice must cover
/// the vector's ambient dimension.
pub fn dot_predict(w: &[f64], x: &FeatureVector) -> Result<f64> {
    if w.len() != x.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            got: w.len(),
        });
    }
    Ok(x.entries().iter().map(|&(i, v)| w[i] * v).sum())
}
