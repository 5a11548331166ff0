//! Property tests: loss analytics, scale covariance of the learners, parser
//! round trips, scaling transforms, and generator determinism.

use proptest::prelude::*;

use scinol::data::{
    apply_scaling, gen_toy, parse_csv, parse_libsvm, shuffle_split, write_csv, write_libsvm,
    Dataset, LabelKind, Provenance, ScalingTransform, ToySpec,
};
use scinol::features::{FeatureVector, Label, LabeledExample, Prediction};
use scinol::learners::{ScalarLearner, Scinol1, Scinol2};
use scinol::loss::{softmax, Gradient, Loss};

fn scalar_losses() -> [Loss; 3] {
    [Loss::Logistic, Loss::Hinge, Loss::Absolute]
}

fn label_for(loss: &Loss, sign: i8, target: f64) -> Label {
    match loss {
        Loss::Absolute => Label::Real(target),
        _ => Label::Binary(sign),
    }
}

fn scalar_grad(loss: &Loss, y: &Label, z: f64) -> f64 {
    match loss.subgradient(y, &Prediction::Scalar(z)).unwrap() {
        Gradient::Scalar(g) => g,
        Gradient::Vector(_) => panic!("scalar loss produced a vector gradient"),
    }
}

proptest! {
    /// Every scalar loss has subgradients in [-1, 1] and is 1-Lipschitz in
    /// the prediction.
    #[test]
    fn scalar_losses_are_1_lipschitz(
        a in -60.0..60.0f64,
        b in -60.0..60.0f64,
        sign in prop_oneof![Just(1i8), Just(-1i8)],
        target in -30.0..30.0f64,
    ) {
        for loss in scalar_losses() {
            let y = label_for(&loss, sign, target);
            let la = loss.value(&y, &Prediction::Scalar(a)).unwrap();
            let lb = loss.value(&y, &Prediction::Scalar(b)).unwrap();
            prop_assert!(la >= 0.0 && lb >= 0.0);
            prop_assert!((la - lb).abs() <= (a - b).abs() + 1e-12);
            let g = scalar_grad(&loss, &y, a);
            prop_assert!((-1.0..=1.0).contains(&g));
        }
    }

    /// Convexity: the subgradient at a lower-bounds the loss at b.
    #[test]
    fn subgradient_inequality_holds(
        a in -40.0..40.0f64,
        b in -40.0..40.0f64,
        sign in prop_oneof![Just(1i8), Just(-1i8)],
        target in -20.0..20.0f64,
    ) {
        for loss in scalar_losses() {
            let y = label_for(&loss, sign, target);
            let la = loss.value(&y, &Prediction::Scalar(a)).unwrap();
            let lb = loss.value(&y, &Prediction::Scalar(b)).unwrap();
            let g = scalar_grad(&loss, &y, a);
            prop_assert!(lb >= la + g * (b - a) - 1e-9);
        }
    }

    /// The logistic subgradient matches a central finite difference.
    #[test]
    fn logistic_gradient_matches_finite_difference(
        z in -30.0..30.0f64,
        sign in prop_oneof![Just(1i8), Just(-1i8)],
    ) {
        let y = Label::Binary(sign);
        let h = 1e-6;
        let up = Loss::Logistic.value(&y, &Prediction::Scalar(z + h)).unwrap();
        let down = Loss::Logistic.value(&y, &Prediction::Scalar(z - h)).unwrap();
        let g = scalar_grad(&Loss::Logistic, &y, z);
        prop_assert!((g - (up - down) / (2.0 * h)).abs() < 1e-6);
    }

    /// Two-class cross-entropy on symmetric scores (z/2, -z/2) is logistic
    /// loss in disguise, gradients included.
    #[test]
    fn cross_entropy_two_classes_reduces_to_logistic(
        z in -60.0..60.0f64,
        sign in prop_oneof![Just(1i8), Just(-1i8)],
    ) {
        let ce = Loss::CrossEntropy { classes: 2 };
        let class = Label::Class(if sign == 1 { 0 } else { 1 });
        let scores = Prediction::Vector(vec![z / 2.0, -z / 2.0]);
        let ce_val = ce.value(&class, &scores).unwrap();
        let log_val = Loss::Logistic
            .value(&Label::Binary(sign), &Prediction::Scalar(z))
            .unwrap();
        prop_assert!((ce_val - log_val).abs() <= 1e-12 * log_val.max(1.0));

        let g_log = scalar_grad(&Loss::Logistic, &Label::Binary(sign), z);
        let g_ce = match ce.subgradient(&class, &scores).unwrap() {
            Gradient::Vector(g) => g,
            Gradient::Scalar(_) => panic!("expected a vector gradient"),
        };
        // Chain rule through (z/2, -z/2): dℓ/dz = (g_ce[0] - g_ce[1])/2, and
        // the two components are opposite, so g_ce[0] is the scalar gradient.
        prop_assert!((g_ce[0] - g_log).abs() <= 1e-12);
        prop_assert!((g_ce[0] + g_ce[1]).abs() <= 1e-15);
    }

    /// Cross-entropy gradients sum to zero and never exceed 1 in max-norm.
    #[test]
    fn cross_entropy_gradient_is_unit_bounded(
        scores in prop::collection::vec(-700.0..700.0f64, 2..6),
        pick in 0usize..6,
    ) {
        let classes = scores.len();
        let y = Label::Class(pick % classes);
        let ce = Loss::CrossEntropy { classes };
        let g = match ce.subgradient(&y, &Prediction::Vector(scores)).unwrap() {
            Gradient::Vector(g) => g,
            Gradient::Scalar(_) => panic!("expected a vector gradient"),
        };
        let sum: f64 = g.iter().sum();
        prop_assert!(sum.abs() <= 1e-12);
        prop_assert!(g.iter().all(|x| x.abs() <= 1.0 + 1e-12));
    }

    /// Softmax is a probability vector and keeps the argmax of its input.
    #[test]
    fn softmax_is_a_probability_vector(
        scores in prop::collection::vec(-700.0..700.0f64, 1..6),
    ) {
        let p = softmax(&scores);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let arg = |v: &[f64]| {
            v.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        prop_assert_eq!(arg(&scores), arg(&p));
    }
}

/// Rows of a dense trial sequence plus a matching gradient stream.
fn trial_sequences(
    dim: usize,
    max_len: usize,
) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    prop::collection::vec(
        (
            prop::collection::vec(prop_oneof![Just(0.0), -1e3..1e3f64], dim),
            -1.0..1.0f64,
        ),
        1..max_len,
    )
    .prop_map(|trials| trials.into_iter().unzip())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Multiplying feature columns by powers of two leaves both learners'
    /// prediction streams bitwise unchanged: the state rescales exactly and
    /// every exponent-only f64 operation commutes with the scaling.
    #[test]
    fn learner_predictions_are_invariant_under_pow2_column_scaling(
        (rows, grads) in trial_sequences(4, 30),
        exps in prop::collection::vec(-20i32..20, 4),
    ) {
        let mut plain1 = Scinol1::new(4, 1.0).unwrap();
        let mut scaled1 = Scinol1::new(4, 1.0).unwrap();
        let mut plain2 = Scinol2::new(4, 1.0).unwrap();
        let mut scaled2 = Scinol2::new(4, 1.0).unwrap();
        for (row, &g) in rows.iter().zip(&grads) {
            let x = FeatureVector::from_dense(row).unwrap();
            let scaled_row: Vec<f64> =
                row.iter().zip(&exps).map(|(v, &e)| v * 2f64.powi(e)).collect();
            let xs = FeatureVector::from_dense(&scaled_row).unwrap();

            let t = plain1.begin_trial(&x).unwrap();
            let ts = scaled1.begin_trial(&xs).unwrap();
            prop_assert_eq!(t.prediction.to_bits(), ts.prediction.to_bits());
            plain1.feedback(g).unwrap();
            scaled1.feedback(g).unwrap();

            let t = plain2.begin_trial(&x).unwrap();
            let ts = scaled2.begin_trial(&xs).unwrap();
            prop_assert_eq!(t.prediction.to_bits(), ts.prediction.to_bits());
            plain2.feedback(g).unwrap();
            scaled2.feedback(g).unwrap();
        }
    }

    /// Power-of-two scaling transforms compose exactly: applying a transform
    /// and its inverse reproduces the dataset bit for bit.
    #[test]
    fn pow2_scaling_round_trips_bitwise(
        (rows, _) in trial_sequences(3, 20),
        exps in prop::collection::vec(-30i32..30, 3),
    ) {
        let examples: Vec<LabeledExample> = rows
            .iter()
            .enumerate()
            .map(|(k, row)| LabeledExample {
                x: FeatureVector::from_dense(row).unwrap(),
                y: Label::Binary(if k % 2 == 0 { 1 } else { -1 }),
            })
            .collect();
        let data =
            Dataset::new(examples, 3, LabelKind::Binary, 2, Provenance::Memory).unwrap();
        let factors: Vec<f64> = exps.iter().map(|&e| 2f64.powi(e)).collect();
        let transform = ScalingTransform::new(factors).unwrap();
        let there = apply_scaling(&data, &transform).unwrap();
        let back = apply_scaling(&there, &transform.inverse()).unwrap();
        prop_assert!(back.same_content(&data));
        for (a, b) in data.examples.iter().zip(&back.examples) {
            for (ea, eb) in a.x.entries().iter().zip(b.x.entries()) {
                prop_assert_eq!(ea.0, eb.0);
                prop_assert_eq!(ea.1.to_bits(), eb.1.to_bits());
            }
        }
    }
}

/// Sparse datasets with full-precision values for parser round trips.
fn sparse_dataset(dim: usize) -> impl Strategy<Value = Dataset> {
    let entry = (0..dim, prop_oneof![
        -1e6..1e6f64,
        -1.0..1.0f64,
        Just(1e-300),
        Just(-4.9e-324),
    ]);
    let row = prop::collection::btree_map(entry.0, entry.1, 0..=dim);
    prop::collection::vec((row, prop_oneof![Just(1i8), Just(-1i8)]), 1..12).prop_map(
        move |rows| {
            let mut examples: Vec<LabeledExample> = rows
                .into_iter()
                .map(|(map, sign)| LabeledExample {
                    x: FeatureVector::new(
                        dim,
                        map.into_iter().filter(|&(_, v)| v != 0.0).collect(),
                    )
                    .unwrap(),
                    y: Label::Binary(sign),
                })
                .collect();
            // Pin the last column so the parser reconstructs the same dim.
            examples.push(LabeledExample {
                x: FeatureVector::new(dim, vec![(dim - 1, 1.0)]).unwrap(),
                y: Label::Binary(1),
            });
            Dataset::new(examples, dim, LabelKind::Binary, 2, Provenance::Memory).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// write -> parse preserves every index, value bit, and label.
    #[test]
    fn libsvm_write_parse_round_trip(data in sparse_dataset(5)) {
        let text = write_libsvm(&data);
        let back = parse_libsvm(&text).unwrap();
        prop_assert_eq!(back.dim, data.dim);
        prop_assert_eq!(back.len(), data.len());
        prop_assert_eq!(back.label_kind, LabelKind::Binary);
        for (a, b) in data.examples.iter().zip(&back.examples) {
            prop_assert_eq!(&a.y, &b.y);
            prop_assert_eq!(a.x.entries().len(), b.x.entries().len());
            for (ea, eb) in a.x.entries().iter().zip(b.x.entries()) {
                prop_assert_eq!(ea.0, eb.0);
                prop_assert_eq!(ea.1.to_bits(), eb.1.to_bits());
            }
        }
        // The writer is a fixpoint of the round trip.
        prop_assert_eq!(write_libsvm(&back), text);
    }

    /// CSV keeps values bit-exact too; zeros materialize as dense cells and
    /// drop out again on parse.
    #[test]
    fn csv_write_parse_round_trip(data in sparse_dataset(4)) {
        let text = write_csv(&data);
        let back = parse_csv(&text, None, true).unwrap();
        prop_assert_eq!(back.dim, data.dim);
        prop_assert_eq!(back.len(), data.len());
        for (a, b) in data.examples.iter().zip(&back.examples) {
            prop_assert_eq!(&a.y, &b.y);
            for (ea, eb) in a.x.entries().iter().zip(b.x.entries()) {
                prop_assert_eq!(ea.0, eb.0);
                prop_assert_eq!(ea.1.to_bits(), eb.1.to_bits());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The synthetic generator is a pure function of its spec.
    #[test]
    fn toy_generation_is_pure(
        n_train in 1usize..40,
        n_test in 1usize..40,
        seed in any::<u64>(),
    ) {
        let spec = ToySpec { n_train, n_test, seed };
        let (tr1, te1, u1) = gen_toy(&spec).unwrap();
        let (tr2, te2, u2) = gen_toy(&spec).unwrap();
        prop_assert!(tr1.same_content(&tr2));
        prop_assert!(te1.same_content(&te2));
        prop_assert_eq!(u1, u2);
    }

    /// shuffle_split partitions the examples: nothing lost, nothing added,
    /// sizes as requested, and the split is deterministic in the seed.
    #[test]
    fn shuffle_split_partitions_examples(
        n in 2usize..60,
        fraction in 0.05..0.95f64,
        seed in any::<u64>(),
    ) {
        let examples: Vec<LabeledExample> = (0..n)
            .map(|i| LabeledExample {
                x: FeatureVector::from_dense(&[i as f64 + 1.0]).unwrap(),
                y: Label::Real(i as f64),
            })
            .collect();
        let data =
            Dataset::new(examples, 1, LabelKind::Real, 0, Provenance::Memory).unwrap();
        let (train, test) = shuffle_split(&data, seed, fraction).unwrap();
        prop_assert_eq!(train.len() + test.len(), n);
        let want_train = ((n as f64 * fraction).ceil() as usize).min(n);
        prop_assert_eq!(train.len(), want_train);

        let mut seen: Vec<f64> = train
            .examples
            .iter()
            .chain(&test.examples)
            .map(|ex| match ex.y {
                Label::Real(v) => v,
                _ => unreachable!(),
            })
            .collect();
        seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want: Vec<f64> = (0..n).map(|i| i as f64).collect();
        prop_assert_eq!(seen, want);

        let (train2, _) = shuffle_split(&data, seed, fraction).unwrap();
        prop_assert!(train.same_content(&train2));
    }
}
