//! The prefix-sum split scan against a brute-force oracle that partitions
//! every candidate explicitly and scores it from its definition.

mod common;

use common::{check, NODES};
use covrt::{best_split, CriterionKind, Dataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn covrt_scan_matches_brute_force() {
    let (identical, tied) = check(CriterionKind::Covrt, 11);
    assert_eq!(identical + tied, NODES);
    assert!(identical >= NODES - 5, "{tied} nodes resolved a rounding-level tie differently");
}

#[test]
fn cart_scan_matches_brute_force() {
    let (identical, tied) = check(CriterionKind::Cart, 12);
    assert_eq!(identical + tied, NODES);
    assert!(identical >= NODES - 5, "{tied} nodes resolved a rounding-level tie differently");
}

#[test]
fn constant_response_has_no_split() {
    let data = Dataset::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0]], vec![4.0; 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for criterion in [CriterionKind::Cart, CriterionKind::Covrt] {
        assert!(best_split(&data, &data.root_region(), criterion, &mut rng).unwrap().best.is_none());
    }
}
