use covrt::sim::replication_seed;
use covrt::theory::linear_stump;
use covrt::{
    generate, grow, grow_full, prune_to_leaves, select_alpha, CriterionKind, Dataset, DgpName, DgpSpec, GrowConfig,
    NodeKind,
};

#[test]
fn stump_on_step_data() {
    let data = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap();
    for kind in [CriterionKind::Cart, CriterionKind::Covrt] {
        let tree = grow(&data, &GrowConfig::new(kind, 1).min_node_size(1)).unwrap();
        assert_eq!(tree.n_leaves(), 2);
        let NodeKind::Internal { feature, threshold, left, right } = tree.root().kind else {
            panic!("root should split");
        };
        assert_eq!((feature, threshold), (0, 2.5));
        assert_eq!(tree.node(left).mean, 0.0);
        assert_eq!(tree.node(right).mean, 1.0);
        assert_eq!(tree.predict(&[3.0]).unwrap(), 1.0);
    }
}

/// The population criterion `(1 − s⁴)² / 64` is flat to fourth order at its
/// maximizer 0, so a single draw at N = 10⁵ typically lands about 0.1 away.
/// Across seeds the split points are centred on 0.
#[test]
fn cubic_root_split_is_centred_on_the_zero_of_the_deviation() {
    let reps = 30;
    let splits: Vec<f64> = (0..reps)
        .map(|r| {
            let (data, _) = generate(&DgpSpec::new(DgpName::Cubic1d, 100_000, replication_seed(21, r))).unwrap();
            let tree = grow(&data, &GrowConfig::new(CriterionKind::Covrt, 1)).unwrap();
            let NodeKind::Internal { threshold, .. } = tree.root().kind else {
                panic!("root should split");
            };
            threshold
        })
        .collect();
    let n = splits.len() as f64;
    let mean = splits.iter().sum::<f64>() / n;
    let sd = (splits.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 3.0 * sd / n.sqrt(), "mean split {mean}, sd {sd}");
    assert!(splits.iter().all(|s| s.abs() < 0.25), "{splits:?}");
}

#[test]
fn noiseless_linear_stump_splits_at_the_midpoint() {
    let fit = linear_stump(1.0, 0.0, 100_000, 8).unwrap().unwrap();
    assert!((fit.split_point - 0.5).abs() < 0.01, "split at {}", fit.split_point);
}

#[test]
fn pure_noise_prunes_to_the_root() {
    let reps = 500;
    let mut leaves: Vec<usize> = (0..reps)
        .map(|r| {
            let seed = replication_seed(404, r);
            let (train, _) = generate(&DgpSpec::simple_linear(1.0, 0.0, 200, seed)).unwrap();
            let (validation, _) = generate(&DgpSpec::simple_linear(1.0, 0.0, 200, seed ^ 1)).unwrap();
            let tree = grow_full(&train, CriterionKind::Covrt, 5, seed).unwrap();
            select_alpha(&tree, &train, &validation).unwrap().tree.n_leaves()
        })
        .collect();
    leaves.sort_unstable();
    assert_eq!(leaves[reps as usize / 2], 1, "median leaf count");
}

#[test]
fn prune_to_leaves_keeps_the_largest_fitting_subtree() {
    let (data, _) = generate(&DgpSpec::new(DgpName::Model1, 300, 2)).unwrap();
    let tree = grow_full(&data, CriterionKind::Cart, 5, 0).unwrap();
    let mut previous = f64::INFINITY;
    for budget in 1..=20 {
        let pruned = prune_to_leaves(&tree, &data, budget).unwrap();
        assert!(pruned.n_leaves() <= budget);
        assert!(pruned.training_risk() <= previous + 1e-12);
        previous = pruned.training_risk();
    }
    assert_eq!(prune_to_leaves(&tree, &data, 1).unwrap().n_leaves(), 1);
    assert!(prune_to_leaves(&tree, &data, 0).is_err());
}
