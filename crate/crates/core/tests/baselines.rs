use dfam_core::baselines::{Classifier, ClassifierKind, ClassifierParams};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<String>)> {
    (5usize..40, 1usize..5).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), n),
            prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]).prop_map(String::from), n),
        )
    })
    .prop_filter("two classes", |(_, y)| y.iter().any(|l| l != &y[0]))
}

fn fit(params: ClassifierParams, x: &[Vec<f64>], y: &[String]) -> Classifier {
    Classifier::new(params).unwrap().fit(x, y).unwrap()
}

/// Min-max scaled brute-force k-NN with (distance, index) ordering.
fn knn_oracle(x: &[Vec<f64>], y: &[String], q: &[f64], k: usize) -> String {
    let d = q.len();
    let lo: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let s = |v: f64, j: usize| if hi[j] > lo[j] { (v - lo[j]) / (hi[j] - lo[j]) } else { 0.0 };
    let mut order: Vec<(f64, usize)> = x
        .iter()
        .enumerate()
        .map(|(i, r)| ((0..d).map(|j| (s(r[j], j) - s(q[j], j)).powi(2)).sum(), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = std::collections::BTreeMap::new();
    for &(_, i) in order.iter().take(k) {
        *votes.entry(y[i].clone()).or_insert(0) += 1;
    }
    let top = *votes.values().max().unwrap();
    votes.into_iter().find(|(_, v)| *v == top).unwrap().0
}

proptest! {
    #[test]
    fn full_forest_of_one_equals_tree((x, y) in dataset(), seed in any::<u64>()) {
        let d = x[0].len();
        let dt = fit(ClassifierParams::new(ClassifierKind::DecisionTree), &x, &y);
        let mut p = ClassifierParams::new(ClassifierKind::RandomForest);
        p.tree_count = 1;
        p.bootstrap = false;
        p.max_features = Some(d);
        p.seed = seed;
        let rf = fit(p, &x, &y);
        for q in &x {
            prop_assert_eq!(rf.predict(q).unwrap(), dt.predict(q).unwrap());
        }
    }

    #[test]
    fn unlimited_tree_fits_consistent_data((x, y) in dataset()) {
        let mut p = ClassifierParams::new(ClassifierKind::DecisionTree);
        p.max_depth = None;
        let dt = fit(p, &x, &y);
        for (q, l) in x.iter().zip(&y) {
            // duplicated points with different labels cannot both be fitted
            let dup = x.iter().zip(&y).any(|(r, m)| r == q && m != l);
            if !dup {
                prop_assert_eq!(dt.predict(q).unwrap(), l.as_str());
            }
        }
    }

    #[test]
    fn knn_matches_brute_force((x, y) in dataset(), k in 1usize..4, q in prop::collection::vec(-12.0f64..12.0, 4)) {
        let q = &q[..x[0].len()];
        let mut p = ClassifierParams::new(ClassifierKind::Knn);
        p.k = k;
        let c = fit(p, &x, &y);
        prop_assert_eq!(c.predict(q).unwrap(), knn_oracle(&x, &y, q, k));
    }

    #[test]
    fn naive_bayes_posteriors_normalised((x, y) in dataset(), q in prop::collection::vec(-12.0f64..12.0, 4)) {
        let q = &q[..x[0].len()];
        let c = fit(ClassifierParams::new(ClassifierKind::NaiveBayes), &x, &y);
        let p = c.posteriors(q).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let best = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let idx = c.classes().iter().position(|l| l == c.predict(q).unwrap()).unwrap();
        prop_assert!(p[idx] >= best - 1e-12);
    }

    #[test]
    fn fitted_classifiers_roundtrip_through_serde((x, y) in dataset(), kind in 0usize..4) {
        let kind = [ClassifierKind::NaiveBayes, ClassifierKind::DecisionTree, ClassifierKind::RandomForest, ClassifierKind::Knn][kind];
        let mut p = ClassifierParams::new(kind);
        p.tree_count = 5;
        let c = fit(p, &x, &y);
        let back: Classifier = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        for q in &x {
            prop_assert_eq!(back.predict(q).unwrap(), c.predict(q).unwrap());
        }
    }
}
