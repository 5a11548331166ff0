//! Datasets: synthetic generation, file ingestion (CSV and sparse
//! index:value text), deterministic shuffling/splitting, and diagonal
//! feature scaling for invariance experiments.
//!
//! # Randomness
//! All randomness flows through ChaCha8 keyed by a user seed plus a fixed
//! stream id per purpose (see [`streams`]), so every artifact is a pure
//! function of its seed and alternate-language ports can match draws by
//! following the same convention.

mod csv;
mod libsvm;
mod toy;

pub use csv::{parse_csv, write_csv};
pub use libsvm::{parse_libsvm, write_libsvm};
pub use toy::{gen_toy, standard_normal, ToySidecar, ToySpec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Label, LabeledExample};

/// Fixed ChaCha stream ids, one per source of randomness.
pub mod streams {
    /// Feature draws for synthetic data.
    pub const FEATURES: u64 = 1;
    /// Signs of the generating comparator.
    pub const COMPARATOR_SIGNS: u64 = 2;
    /// Label draws for synthetic data.
    pub const LABELS: u64 = 3;
    /// Train/test split permutation.
    pub const SHUFFLE_SPLIT: u64 = 4;
    /// Per-epoch shuffles use EPOCH_BASE + epoch index.
    pub const EPOCH_BASE: u64 = 16;
}

/// ChaCha8 generator for one (seed, purpose) pair.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fisher-Yates permutation of 0..n, deterministic given the generator.
pub fn permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    /// All labels in {-1, +1}.
    Binary,
    /// Nonnegative integer class ids.
    Class,
    /// Anything else.
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Synthetic(ToySpec),
    File(String),
    Memory,
}

/// Immutable collection of labeled examples sharing one ambient dimension.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub dim: usize,
    pub label_kind: LabelKind,
    /// 2 for binary, max class id + 1 for class labels, 0 for real targets.
    pub num_classes: usize,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(
        examples: Vec<LabeledExample>,
        dim: usize,
        label_kind: LabelKind,
        num_classes: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        for ex in &examples {
            if ex.x.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: ex.x.dim(),
                });
            }
            match (label_kind, &ex.y) {
                (LabelKind::Binary, Label::Binary(_)) => {}
                (LabelKind::Class, Label::Class(c)) => {
                    if *c >= num_classes {
                        return Err(Error::ClassOutOfRange {
                            class: *c,
                            classes: num_classes,
                        });
                    }
                }
                (LabelKind::Real, Label::Real(_)) => {}
                (_, y) => {
                    return Err(Error::LabelMismatch {
                        expected: match label_kind {
                            LabelKind::Binary => "binary",
                            LabelKind::Class => "class",
                            LabelKind::Real => "real",
                        },
                        got: y.kind_name(),
                    })
                }
            }
        }
        Ok(Dataset {
            examples,
            dim,
            label_kind,
            num_classes,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Content equality ignoring provenance.
    pub fn same_content(&self, other: &Dataset) -> bool {
        self.dim == other.dim
            && self.label_kind == other.label_kind
            && self.num_classes == other.num_classes
            && self.examples == other.examples
    }
}

/// Maps raw numeric labels to typed ones: {-1, +1} files become binary,
/// all-nonnegative-integer files become class ids (num_classes = max + 1),
/// anything else stays real-valued.
pub(crate) fn infer_labels(raw: &[f64]) -> (LabelKind, usize, Vec<Label>) {
    if !raw.is_empty() && raw.iter().all(|&v| v == 1.0 || v == -1.0) {
        let labels = raw
            .iter()
            .map(|&v| Label::Binary(if v > 0.0 { 1 } else { -1 }))
            .collect();
        return (LabelKind::Binary, 2, labels);
    }
    if !raw.is_empty() && raw.iter().all(|&v| v >= 0.0 && v.fract() == 0.0 && v < 1e9) {
        let max = raw.iter().copied().fold(0.0f64, f64::max) as usize;
        let labels = raw.iter().map(|&v| Label::Class(v as usize)).collect();
        return (LabelKind::Class, max + 1, labels);
    }
    (
        LabelKind::Real,
        0,
        raw.iter().map(|&v| Label::Real(v)).collect(),
    )
}

/// Diagonal positive scaling of the feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTransform {
    factors: Vec<f64>,
}

impl ScalingTransform {
    pub fn new(factors: Vec<f64>) -> Result<Self> {
        for (i, &a) in factors.iter().enumerate() {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::BadScaleFactor { index: i, value: a });
            }
        }
        Ok(ScalingTransform { factors })
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// Elementwise reciprocal; exact for power-of-two factors.
    pub fn inverse(&self) -> ScalingTransform {
        ScalingTransform {
            factors: self.factors.iter().map(|a| 1.0 / a).collect(),
        }
    }
}

/// x_{t,i} -> a_i·x_{t,i} on every example; labels untouched.
pub fn apply_scaling(data: &Dataset, s: &ScalingTransform) -> Result<Dataset> {
    if s.factors.len() != data.dim {
        return Err(Error::DimMismatch {
            expected: data.dim,
            got: s.factors.len(),
        });
    }
    let examples = data
        .examples
        .iter()
        .map(|ex| {
            let entries = ex
                .x
                .entries()
                .iter()
                .map(|&(i, v)| (i, v * s.factors[i]))
                .collect();
            Ok(LabeledExample {
                x: crate::features::FeatureVector::new(data.dim, entries)?,
                y: ex.y,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(
        examples,
        data.dim,
        data.label_kind,
        data.num_classes,
        data.provenance.clone(),
    )
}

/// Deterministic shuffle then split: train gets ceil(n·fraction) examples,
/// test the remainder.
pub fn shuffle_split(data: &Dataset, seed: u64, train_fraction: f64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train_fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let n = data.len();
    let mut rng = seeded_rng(seed, streams::SHUFFLE_SPLIT);
    let order = permutation(n, &mut rng);
    let n_train = ((n as f64 * train_fraction).ceil() as usize).min(n);
    let pick = |idx: &[usize]| -> Result<Dataset> {
        Dataset::new(
            idx.iter().map(|&i| data.examples[i].clone()).collect(),
            data.dim,
            data.label_kind,
            data.num_classes,
            data.provenance.clone(),
        )
    };
    Ok((pick(&order[..n_train])?, pick(&order[n_train..])?))
}

/// Summary statistics in the style of a dataset table: record and feature
/// counts, class count, and the ratio of the largest to the smallest
/// positive per-column L2 norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    pub features: usize,
    pub classes: usize,
    pub label_kind: LabelKind,
    /// NaN when fewer than one column has a positive norm.
    pub scale_ratio: f64,
}

pub fn dataset_stats(data: &Dataset) -> DatasetStats {
    let mut norm2 = vec![0.0f64; data.dim];
    for ex in &data.examples {
        for &(i, v) in ex.x.entries() {
            norm2[i] += v * v;
        }
    }
    let positive: Vec<f64> = norm2.iter().copied().filter(|&n| n > 0.0).collect();
    let scale_ratio = if positive.is_empty() {
        f64::NAN
    } else {
        let max = positive.iter().copied().fold(f64::MIN, f64::max);
        let min = positive.iter().copied().fold(f64::MAX, f64::min);
        (max / min).sqrt()
    };
    DatasetStats {
        records: data.len(),
        features: data.dim,
        classes: data.num_classes,
        label_kind: data.label_kind,
        scale_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;

    fn tiny(values: &[(&[f64], f64)]) -> Dataset {
        let raw: Vec<f64> = values.iter().map(|&(_, y)| y).collect();
        let (kind, classes, labels) = infer_labels(&raw);
        let examples = values
            .iter()
            .zip(labels)
            .map(|(&(row, _), y)| LabeledExample {
                x: FeatureVector::from_dense(row).unwrap(),
                y,
            })
            .collect();
        Dataset::new(examples, values[0].0.len(), kind, classes, Provenance::Memory).unwrap()
    }

    #[test]
    fn label_inference_policy() {
        assert_eq!(infer_labels(&[1.0, -1.0, 1.0]).0, LabelKind::Binary);
        let (kind, classes, labels) = infer_labels(&[0.0, 3.0, 1.0]);
        assert_eq!(kind, LabelKind::Class);
        assert_eq!(classes, 4);
        assert_eq!(labels[1], Label::Class(3));
        assert_eq!(infer_labels(&[0.5, 1.0]).0, LabelKind::Real);
        // All-ones is binary, not class.
        assert_eq!(infer_labels(&[1.0, 1.0]).0, LabelKind::Binary);
    }

    #[test]
    fn dataset_rejects_inconsistent_rows() {
        let ex = |dim: usize| LabeledExample {
            x: FeatureVector::new(dim, vec![]).unwrap(),
            y: Label::Binary(1),
        };
        assert!(Dataset::new(
            vec![ex(2), ex(3)],
            2,
            LabelKind::Binary,
            2,
            Provenance::Memory
        )
        .is_err());
        let bad_class = LabeledExample {
            x: FeatureVector::new(1, vec![]).unwrap(),
            y: Label::Class(5),
        };
        assert!(matches!(
            Dataset::new(vec![bad_class], 1, LabelKind::Class, 3, Provenance::Memory),
            Err(Error::ClassOutOfRange { class: 5, classes: 3 })
        ));
    }

    #[test]
    fn scaling_is_exact_for_powers_of_two() {
        let data = tiny(&[
            (&[1.5, -0.3, 0.0], 1.0),
            (&[0.1, 7.0, 2.0], -1.0),
        ]);
        let identity = ScalingTransform::new(vec![1.0; 3]).unwrap();
        assert!(apply_scaling(&data, &identity).unwrap().same_content(&data));

        let s = ScalingTransform::new(vec![4.0, 0.5, 1024.0]).unwrap();
        let scaled = apply_scaling(&data, &s).unwrap();
        assert_eq!(scaled.examples[0].x.get(0), 6.0);
        assert_eq!(scaled.examples[1].x.get(1), 3.5);
        let back = apply_scaling(&scaled, &s.inverse()).unwrap();
        for (a, b) in back.examples.iter().zip(&data.examples) {
            for (&(ia, va), &(ib, vb)) in a.x.entries().iter().zip(b.x.entries()) {
                assert_eq!(ia, ib);
                assert_eq!(va.to_bits(), vb.to_bits());
            }
        }

        assert!(matches!(
            ScalingTransform::new(vec![1.0, 0.0]),
            Err(Error::BadScaleFactor { index: 1, .. })
        ));
        let short = ScalingTransform::new(vec![1.0]).unwrap();
        assert!(apply_scaling(&data, &short).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let rows: Vec<(&[f64], f64)> = vec![
            (&[1.0], 1.0),
            (&[2.0], -1.0),
            (&[3.0], 1.0),
        ];
        let data = tiny(&rows);
        let (train, test) = shuffle_split(&data, 7, 2.0 / 3.0).unwrap();
        assert_eq!((train.len(), test.len()), (2, 1));
        let (train2, test2) = shuffle_split(&data, 7, 2.0 / 3.0).unwrap();
        assert!(train.same_content(&train2) && test.same_content(&test2));
        assert!(shuffle_split(&data, 7, 0.0).is_err());
        assert!(shuffle_split(&data, 7, 1.0).is_err());
    }

    #[test]
    fn different_seeds_permute_differently() {
        let rows: Vec<(Vec<f64>, f64)> = (0..100).map(|i| (vec![i as f64], 1.0)).collect();
        let borrowed: Vec<(&[f64], f64)> =
            rows.iter().map(|(r, y)| (r.as_slice(), *y)).collect();
        let data = tiny(&borrowed);
        let (a, _) = shuffle_split(&data, 1, 0.5).unwrap();
        let (b, _) = shuffle_split(&data, 2, 0.5).unwrap();
        assert!(!a.same_content(&b));
        // The split partitions the data: counts are preserved.
        let (train, test) = shuffle_split(&data, 1, 0.5).unwrap();
        assert_eq!(train.len() + test.len(), 100);
    }

    #[test]
    fn stats_report_column_norm_ratio() {
        let data = tiny(&[
            (&[1.0, 10.0, 0.0], 1.0),
            (&[-1.0, 10.0, 0.0], -1.0),
        ]);
        let stats = dataset_stats(&data);
        assert_eq!(stats.records, 2);
        assert_eq!(stats.features, 3);
        assert_eq!(stats.classes, 2);
        // Column norms are sqrt(2) and 10*sqrt(2); the zero column is ignored.
        assert!((stats.scale_ratio - 10.0).abs() < 1e-12);
    }
}
