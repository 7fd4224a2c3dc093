//! Depth-limited greedy recursive partitioning.

use crate::data::{mean_and_risk, CriterionKind, Dataset, Node, NodeKind, NodeRegion, Tree};
use crate::error::{Error, Result};
use crate::sim::rng_from_seed;
use crate::split::{best_split, partition_rows};

/// Depth cap used when growing "to maximum depth".
pub const FULL_DEPTH: usize = 64;

pub const DEFAULT_MIN_NODE_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowConfig {
    pub criterion: CriterionKind,
    /// Maximum depth `K`; the root has depth 0.
    pub max_depth: usize,
    /// Nodes with at most this many rows are not split.
    pub min_node_size: usize,
    /// Seeds the generator used by the random splitter.
    pub seed: u64,
}

impl GrowConfig {
    pub fn new(criterion: CriterionKind, max_depth: usize) -> Self {
        Self { criterion, max_depth, min_node_size: DEFAULT_MIN_NODE_SIZE, seed: 0 }
    }

    pub fn min_node_size(mut self, n_min: usize) -> Self {
        self.min_node_size = n_min;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Grows a tree level by level: at each depth every terminal node with more
/// than `min_node_size` rows is split at its best candidate, if it has one.
///
/// Node ids are assigned in breadth-first order.
pub fn grow(data: &Dataset, config: &GrowConfig) -> Result<Tree> {
    if config.min_node_size == 0 {
        return Err(Error::invalid("min_node_size must be at least 1"));
    }
    let mut rng = rng_from_seed(config.seed);
    let y = data.response();
    let stats = |rows: &[usize]| mean_and_risk(rows.iter().map(|&i| y[i])).expect("non-empty node");

    let all: Vec<usize> = (0..data.n_rows()).collect();
    let (mean, risk) = stats(&all);
    let mut nodes = vec![Node::leaf(all.len(), mean, risk, 0)];
    let mut frontier = vec![(0usize, all)];

    for depth in 0..config.max_depth {
        let mut next = Vec::new();
        for (id, rows) in frontier {
            if rows.len() <= config.min_node_size {
                continue;
            }
            let region = NodeRegion::from_parts_unchecked(rows, depth);
            let Some(split) = best_split(data, &region, config.criterion, &mut rng)?.best else {
                continue;
            };
            let (left_rows, right_rows) = partition_rows(data, region.rows(), split.feature, split.threshold);
            debug_assert_eq!(left_rows.len(), split.n_left);
            let left = nodes.len();
            let right = left + 1;
            let (lm, lr) = stats(&left_rows);
            let (rm, rr) = stats(&right_rows);
            nodes.push(Node::leaf(left_rows.len(), lm, lr, depth + 1));
            nodes.push(Node::leaf(right_rows.len(), rm, rr, depth + 1));
            nodes[id].kind = NodeKind::Internal { feature: split.feature, threshold: split.threshold, left, right };
            next.push((left, left_rows));
            next.push((right, right_rows));
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    Ok(Tree::from_parts_unchecked(
        nodes,
        config.criterion,
        config.max_depth,
        config.min_node_size,
        data.column_names().to_vec(),
    ))
}

/// Grows until node size or zero gain stops every branch (depth capped at
/// [`FULL_DEPTH`]).
pub fn grow_full(data: &Dataset, criterion: CriterionKind, min_node_size: usize, seed: u64) -> Result<Tree> {
    grow(data, &GrowConfig { criterion, max_depth: FULL_DEPTH, min_node_size, seed })
}
