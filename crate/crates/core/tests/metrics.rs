use afd_core::classify::{LabelScore, Prediction, SENTIMENT_LABELS};
use afd_core::metrics::{correlate, evaluate, pearson, Aggregation, ScoredDiscussion};
use afd_core::OutcomeLabel;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LABELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Per-label precision, recall and F1 by direct counting, no confusion matrix.
fn brute_force(pairs: &[(&str, &str)], labels: &[&str]) -> (f64, Vec<(f64, f64, f64)>) {
    let acc = pairs.iter().filter(|(g, p)| g == p).count() as f64 / pairs.len() as f64;
    let per = labels
        .iter()
        .map(|l| {
            let tp = pairs.iter().filter(|(g, p)| g == l && p == l).count() as f64;
            let fp = pairs.iter().filter(|(g, p)| g != l && p == l).count() as f64;
            let fn_ = pairs.iter().filter(|(g, p)| g == l && p != l).count() as f64;
            let prec = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let rec = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
            let f1 = if prec + rec > 0.0 { 2.0 * prec * rec / (prec + rec) } else { 0.0 };
            (prec, rec, f1)
        })
        .collect();
    (acc, per)
}

#[test]
fn evaluate_matches_brute_force_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let skew = rng.gen_range(0.0..1.0);
        let pairs: Vec<(&str, &str)> = (0..500)
            .map(|_| {
                let g = *LABELS.choose(&mut rng).unwrap();
                let p = if rng.gen_bool(skew) { g } else { *LABELS.choose(&mut rng).unwrap() };
                (g, p)
            })
            .collect();
        let r = evaluate(&pairs, &LABELS).unwrap();
        let (acc, per) = brute_force(&pairs, &LABELS);
        assert!((r.accuracy - acc).abs() < 1e-9);
        for (m, (p, rc, f)) in r.per_label.iter().zip(&per) {
            assert!((m.precision - p).abs() < 1e-9 && (m.recall - rc).abs() < 1e-9 && (m.f1 - f).abs() < 1e-9);
        }
        let macro_f1 = per.iter().map(|x| x.2).sum::<f64>() / 8.0;
        assert!((r.macro_f1 - macro_f1).abs() < 1e-9);
        for (i, row) in r.confusion.iter().enumerate() {
            assert_eq!(row.iter().sum::<usize>(), pairs.iter().filter(|(g, _)| *g == LABELS[i]).count());
        }
        let trace: usize = (0..8).map(|i| r.confusion[i][i]).sum();
        assert!((r.accuracy - trace as f64 / 500.0).abs() < 1e-12);
    }
}

#[test]
fn hand_computed_two_label_fixture() {
    let mut pairs = Vec::new();
    for (g, p, n) in [("x", "x", 8), ("x", "y", 2), ("y", "x", 3), ("y", "y", 7)] {
        pairs.extend(std::iter::repeat_n((g, p), n));
    }
    let r = evaluate(&pairs, &["x", "y"]).unwrap();
    assert!((r.macro_f1 - 0.7494).abs() < 1e-4);
    assert!((r.per_label[0].f1 - 0.7619).abs() < 1e-4);
    assert!((r.per_label[1].f1 - 0.7368).abs() < 1e-4);
}

#[test]
fn identity_predictions_are_diagonal() {
    let pairs: Vec<(&str, &str)> = LABELS.iter().cycle().take(40).map(|l| (*l, *l)).collect();
    let r = evaluate(&pairs, &LABELS).unwrap();
    assert_eq!((r.accuracy, r.macro_f1), (1.0, 1.0));
    for (i, row) in r.confusion.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            assert_eq!(*c == 0, i != j);
        }
    }
}

fn sentiment(neg: f64) -> Prediction {
    let pos = (1.0 - neg) / 2.0;
    let scores = [pos, neg, 1.0 - neg - pos];
    let (best, _) = scores.iter().enumerate().fold((0, f64::MIN), |b, (i, s)| if *s > b.1 { (i, *s) } else { b });
    Prediction {
        label: SENTIMENT_LABELS[best].into(),
        probability: scores[best],
        explanation: None,
        per_label_scores: Some(SENTIMENT_LABELS.iter().zip(scores).map(|(l, s)| LabelScore { label: l.to_string(), score: s }).collect()),
    }
}

#[test]
fn aligned_and_anti_aligned_sentiment() {
    let outcomes = [OutcomeLabel::Delete, OutcomeLabel::Keep, OutcomeLabel::Delete, OutcomeLabel::Merge, OutcomeLabel::Keep];
    let build = |aligned: bool| -> Vec<ScoredDiscussion> {
        outcomes
            .iter()
            .map(|&o| {
                let negative = (o == OutcomeLabel::Delete) == aligned;
                ScoredDiscussion { outcome: o, sentences: vec![sentiment(if negative { 0.9 } else { 0.1 }); 3] }
            })
            .collect()
    };
    let r = correlate(&build(true), &SENTIMENT_LABELS, Aggregation::MeanProbability).unwrap();
    assert!((r.get("negative", OutcomeLabel::Delete).unwrap() - 1.0).abs() < 1e-9);
    let r = correlate(&build(false), &SENTIMENT_LABELS, Aggregation::MeanProbability).unwrap();
    assert!((r.get("negative", OutcomeLabel::Delete).unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(r.r.len(), 3);
    assert!(r.r.iter().all(|row| row.len() == 8));
    assert!(r.r.iter().flatten().flatten().all(|v| (-1.0..=1.0).contains(v)));
}

proptest! {
    #[test]
    fn permuting_pairs_changes_nothing(seed in any::<u64>(), n in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs: Vec<(&str, &str)> = (0..n).map(|_| (*LABELS.choose(&mut rng).unwrap(), *LABELS.choose(&mut rng).unwrap())).collect();
        let a = evaluate(&pairs, &LABELS).unwrap();
        pairs.shuffle(&mut rng);
        let b = evaluate(&pairs, &LABELS).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pearson_is_affine_invariant(
        xs in prop::collection::vec(-100.0f64..100.0, 3..40),
        scale in 0.01f64..50.0,
        shift in -100.0f64..100.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys: Vec<f64> = xs.iter().map(|x| x * rng.gen_range(-1.0..1.0) + rng.gen_range(-5.0..5.0)).collect();
        let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        match (pearson(&xs, &ys), pearson(&moved, &ys)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b),
            (None, None) => {}
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
