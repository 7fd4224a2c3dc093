//! Brute-force split oracle shared by the oracle tests and the acceptance run.
//! Every candidate is partitioned explicitly and scored from its definition:
//! CART as the two-pass impurity decrease, CovRT as the squared empirical
//! inner product of the centred response with `N_R/N_t − 1{x > s}`.

use covrt::{best_split, CriterionKind, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NODES: usize = 500;
const TOL: f64 = 1e-12;

/// Random node with N ≤ 50 rows and p ≤ 5 features. Half the features take
/// values on a coarse grid so ties between rows are common.
pub fn fuzz_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n = rng.random_range(2..=50);
    let p = rng.random_range(1..=5);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..p)
                .map(|j| if j % 2 == 0 { rng.random_range(0..6) as f64 * 0.25 } else { rng.random::<f64>() })
                .collect()
        })
        .collect();
    let y = (0..n)
        .map(|i| {
            let noise: f64 = rng.random::<f64>() - 0.5;
            if rng.random_bool(0.3) { (i % 3) as f64 } else { 2.0 * rows[i][0] + noise }
        })
        .collect();
    Dataset::from_rows(&rows, y).unwrap()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn risk(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / v.len() as f64
}

struct Scored {
    feature: usize,
    threshold: f64,
    value: f64,
}

fn brute_force(data: &Dataset, criterion: CriterionKind) -> Vec<Scored> {
    let y = data.response();
    let n = y.len() as f64;
    let y_bar = mean(y);
    let mut out = Vec::new();
    for j in 0..data.n_features() {
        let col = data.column(j);
        let mut distinct = col.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        for w in distinct.windows(2) {
            let s = (w[0] + w[1]) / 2.0;
            let left: Vec<f64> = (0..y.len()).filter(|&i| col[i] <= s).map(|i| y[i]).collect();
            let right: Vec<f64> = (0..y.len()).filter(|&i| col[i] > s).map(|i| y[i]).collect();
            let pl = left.len() as f64 / n;
            let pr = right.len() as f64 / n;
            let value = match criterion {
                CriterionKind::Cart => risk(y) - pl * risk(&left) - pr * risk(&right),
                _ => {
                    let inner: f64 = (0..y.len())
                        .map(|i| {
                            let phi = pr - if col[i] > s { 1.0 } else { 0.0 };
                            (y[i] - y_bar) * phi
                        })
                        .sum::<f64>()
                        / n;
                    inner * inner
                }
            };
            out.push(Scored { feature: j, threshold: s, value });
        }
    }
    out
}

fn scale(data: &Dataset) -> f64 {
    risk(data.response()).max(f64::MIN_POSITIVE)
}

/// Runs the scan and the oracle on `NODES` fuzzed nodes and panics on any
/// disagreement beyond a rounding-level tie. Returns (identical, tied).
pub fn check(criterion: CriterionKind, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut identical, mut tied) = (0, 0);
    for node in 0..NODES {
        let data = fuzz_dataset(&mut rng);
        let scored = brute_force(&data, criterion);
        let decision = best_split(&data, &data.root_region(), criterion, &mut rng).unwrap();
        assert_eq!(decision.candidates_evaluated, scored.len(), "node {node}");
        let tol = TOL * scale(&data);
        let max = scored.iter().map(|s| s.value).fold(0.0, f64::max);
        if max <= tol {
            assert!(decision.best.is_none() || decision.best.unwrap().criterion_value <= tol, "node {node}");
            identical += 1;
            continue;
        }
        let best = decision.best.unwrap_or_else(|| panic!("node {node}: oracle max {max} but no split"));
        assert!((best.criterion_value - max).abs() <= tol, "node {node}: {} vs {max}", best.criterion_value);
        let near: Vec<&Scored> = scored.iter().filter(|s| max - s.value <= tol).collect();
        let first = near[0];
        if near.len() == 1 {
            assert_eq!((best.feature, best.threshold), (first.feature, first.threshold), "node {node}");
            identical += 1;
        } else {
            assert!(
                near.iter().any(|s| (s.feature, s.threshold) == (best.feature, best.threshold)),
                "node {node}: chosen split is not among the oracle maximizers"
            );
            if (best.feature, best.threshold) == (first.feature, first.threshold) {
                identical += 1;
            } else {
                tied += 1;
            }
        }
    }
    (identical, tied)
}

