//! Synthetic data with feature scales spanning six orders of magnitude:
//! d = 21 Gaussian features with standard deviations 2^{i-11} (1-based i),
//! labels drawn from a logistic model whose comparator u has |u_i| = 1/σ_i,
//! so every coordinate carries equal signal despite the wildly uneven
//! scales. The scale ratio σ_max/σ_min is 2^20 ≈ 10^6.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Label, LabeledExample};
use crate::num::sigmoid;

use super::{seeded_rng, streams, Dataset, LabelKind, Provenance};

pub const TOY_DIM: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToySpec {
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
}

impl ToySpec {
    /// σ for 0-based feature index j: 2^{j-10}, so the middle feature has
    /// unit scale and the extremes are 2^{-10} and 2^{10}.
    pub fn sigma(j: usize) -> f64 {
        debug_assert!(j < TOY_DIM);
        2f64.powi(j as i32 - 10)
    }
}

/// Sidecar metadata written next to an emitted toy dataset: the generating
/// spec and comparator, enough to recompute regret offline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToySidecar {
    pub spec: ToySpec,
    pub u: Vec<f64>,
}

/// One standard normal draw via Box-Muller, cosine branch only.
///
/// Convention (fixed so ports can reproduce draws): u1 = 1 - next_f64 in
/// (0, 1], u2 = next_f64 in [0, 1), z = √(-2 ln u1)·cos(2π u2), consuming
/// exactly two generator outputs per sample.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw_examples(
    n: usize,
    u: &[f64],
    features: &mut ChaCha8Rng,
    labels: &mut ChaCha8Rng,
) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = [0.0; TOY_DIM];
        let mut margin = 0.0;
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = ToySpec::sigma(j) * standard_normal(features);
            margin += *cell * u[j];
        }
        let y = if labels.gen::<f64>() < sigmoid(margin) {
            1
        } else {
            -1
        };
        out.push(LabeledExample {
            x: FeatureVector::from_dense(&row)?,
            y: Label::Binary(y),
        });
    }
    Ok(out)
}

/// Generates (train, test, u), a pure function of the spec. Draw order:
/// comparator signs, then all training rows, then all test rows; labels
/// consume their own stream in the same row order.
pub fn gen_toy(spec: &ToySpec) -> Result<(Dataset, Dataset, Vec<f64>)> {
    if spec.n_train == 0 || spec.n_test == 0 {
        return Err(Error::InvalidConfig(
            "toy generation needs at least one train and one test example".into(),
        ));
    }
    let mut signs = seeded_rng(spec.seed, streams::COMPARATOR_SIGNS);
    let u: Vec<f64> = (0..TOY_DIM)
        .map(|j| {
            let s = if signs.gen_bool(0.5) { 1.0 } else { -1.0 };
            s / ToySpec::sigma(j)
        })
        .collect();
    let mut features = seeded_rng(spec.seed, streams::FEATURES);
    let mut labels = seeded_rng(spec.seed, streams::LABELS);
    let train = draw_examples(spec.n_train, &u, &mut features, &mut labels)?;
    let test = draw_examples(spec.n_test, &u, &mut features, &mut labels)?;
    let mk = |examples| {
        Dataset::new(
            examples,
            TOY_DIM,
            LabelKind::Binary,
            2,
            Provenance::Synthetic(*spec),
        )
    };
    Ok((mk(train)?, mk(test)?, u))
}
