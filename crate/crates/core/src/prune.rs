//! Weakest-link cost-complexity pruning.
//!
//! Risks are global fractions: a node contributes `(N_t / N) · R̂_t`, so the
//! leaves of any subtree sum to its training risk `R̂(T)` and the penalized
//! objective is `R̂(T) + α |T|`.

use std::collections::HashSet;

use crate::data::{Dataset, NodeId, Tree};
use crate::error::{Error, Result};
use crate::eval::empirical_l2_risk;

/// One collapse of the weakest-link sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneStep {
    pub critical_alpha: f64,
    /// Nodes (ids of the original tree) turned into leaves at this step.
    /// Usually one; several when their link strengths tie.
    pub collapsed: Vec<NodeId>,
    pub leaves_after: usize,
    pub train_risk_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneSequence {
    pub steps: Vec<PruneStep>,
    pub initial_leaves: usize,
    pub initial_risk: f64,
}

impl PruneSequence {
    /// Number of subtrees in the sequence, the unpruned tree included.
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Subtree after the first `k` steps (`k = 0` is the unpruned tree).
    pub fn subtree(&self, tree: &Tree, k: usize) -> Tree {
        let collapsed: HashSet<NodeId> =
            self.steps[..k].iter().flat_map(|s| s.collapsed.iter().copied()).collect();
        tree.collapse(&collapsed)
    }

    pub fn subtrees(&self, tree: &Tree) -> Vec<Tree> {
        let mut collapsed = HashSet::new();
        let mut out = vec![tree.clone()];
        for step in &self.steps {
            collapsed.extend(step.collapsed.iter().copied());
            out.push(tree.collapse(&collapsed));
        }
        out
    }

    pub fn leaves(&self, k: usize) -> usize {
        if k == 0 {
            self.initial_leaves
        } else {
            self.steps[k - 1].leaves_after
        }
    }

    pub fn train_risk(&self, k: usize) -> f64 {
        if k == 0 {
            self.initial_risk
        } else {
            self.steps[k - 1].train_risk_after
        }
    }

    /// `[lower, upper)` range of α over which subtree `k` is optimal; the last
    /// subtree gets ten times the largest critical α as its upper end.
    pub fn alpha_interval(&self, k: usize) -> (f64, f64) {
        let lower = if k == 0 { 0.0 } else { self.steps[k - 1].critical_alpha };
        let upper = match self.steps.get(k) {
            Some(step) => step.critical_alpha,
            None => self.steps.last().map_or(0.0, |s| s.critical_alpha * 10.0),
        };
        (lower, upper)
    }
}

/// Relative tolerance under which two link strengths count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Builds the nested weakest-link sequence by repeatedly collapsing the
/// internal node(s) minimizing `g(t) = (R(t) − R(T_t)) / (|T_t| − 1)`.
pub fn prune_sequence(tree: &Tree, data: &Dataset) -> Result<PruneSequence> {
    tree.check_dataset(data)?;
    if data.n_rows() != tree.root().n {
        return Err(Error::invalid(format!(
            "tree was grown on {} rows but the dataset has {}",
            tree.root().n,
            data.n_rows()
        )));
    }
    let nodes = tree.nodes();
    let total = tree.root().n as f64;
    let own: Vec<f64> = nodes.iter().map(|n| n.n as f64 / total * n.risk).collect();
    let mut internal: Vec<bool> = nodes.iter().map(|n| !n.is_leaf()).collect();
    let mut branch_risk = vec![0.0; nodes.len()];
    let mut branch_leaves = vec![0usize; nodes.len()];

    let accumulate = |internal: &[bool], branch_risk: &mut [f64], branch_leaves: &mut [usize]| {
        for id in (0..nodes.len()).rev() {
            match nodes[id].children() {
                Some((l, r)) if internal[id] => {
                    branch_risk[id] = branch_risk[l] + branch_risk[r];
                    branch_leaves[id] = branch_leaves[l] + branch_leaves[r];
                }
                _ => {
                    branch_risk[id] = own[id];
                    branch_leaves[id] = 1;
                }
            }
        }
    };

    accumulate(&internal, &mut branch_risk, &mut branch_leaves);
    let mut seq = PruneSequence {
        steps: Vec::new(),
        initial_leaves: branch_leaves[0],
        initial_risk: branch_risk[0],
    };
    let mut previous_alpha = 0.0f64;

    while internal[0] {
        // Internal nodes of the current subtree, with their link strength.
        let mut reachable = vec![false; nodes.len()];
        reachable[0] = true;
        let mut links = Vec::new();
        for id in 0..nodes.len() {
            if !reachable[id] || !internal[id] {
                continue;
            }
            let (l, r) = nodes[id].children().expect("internal");
            reachable[l] = true;
            reachable[r] = true;
            let g = (own[id] - branch_risk[id]) / (branch_leaves[id] - 1) as f64;
            links.push((id, g));
        }
        let g_min = links.iter().map(|&(_, g)| g).fold(f64::INFINITY, f64::min);
        let cutoff = g_min + TIE_TOLERANCE * g_min.abs();
        let mut collapsed = Vec::new();
        for &(id, g) in &links {
            if g <= cutoff {
                internal[id] = false;
                collapsed.push(id);
            }
        }
        // Drop ties nested inside another collapsed node; they are implied.
        let mut covered = vec![false; nodes.len()];
        for id in 0..nodes.len() {
            if covered[id] || (!internal[id] && collapsed.contains(&id)) {
                if let Some((l, r)) = nodes[id].children() {
                    covered[l] = true;
                    covered[r] = true;
                }
            }
        }
        collapsed.retain(|&id| !covered[id]);

        accumulate(&internal, &mut branch_risk, &mut branch_leaves);
        // Link strengths are non-negative in exact arithmetic and the
        // sequence of minima is non-decreasing.
        let alpha = g_min.max(0.0).max(previous_alpha);
        previous_alpha = alpha;
        seq.steps.push(PruneStep {
            critical_alpha: alpha,
            collapsed,
            leaves_after: branch_leaves[0],
            train_risk_after: branch_risk[0],
        });
    }
    Ok(seq)
}

/// Largest subtree of the weakest-link sequence with at most `leaves` leaves.
pub fn prune_to_leaves(tree: &Tree, data: &Dataset, leaves: usize) -> Result<Tree> {
    if leaves == 0 {
        return Err(Error::invalid("target leaf count must be at least 1"));
    }
    let seq = prune_sequence(tree, data)?;
    Ok(seq.subtree(tree, subtree_index_for_leaves(&seq, leaves)))
}

/// Index into the sequence of the largest subtree with at most `leaves` leaves.
pub fn subtree_index_for_leaves(seq: &PruneSequence, leaves: usize) -> usize {
    (0..seq.len()).find(|&k| seq.leaves(k) <= leaves).unwrap_or(seq.len() - 1)
}

/// Result of choosing a subtree on held-out data.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSelection {
    /// Geometric mean of the chosen subtree's α interval.
    pub alpha: f64,
    pub tree: Tree,
    pub validation_risk: f64,
    /// Position of the chosen subtree in the sequence.
    pub index: usize,
}

/// Picks the subtree of the weakest-link sequence with the smallest L2 risk
/// on `validation`; exact ties go to the smaller tree.
pub fn select_alpha(tree: &Tree, train: &Dataset, validation: &Dataset) -> Result<AlphaSelection> {
    tree.check_dataset(validation)?;
    if validation.n_rows() == 0 {
        return Err(Error::empty("validation set has no rows"));
    }
    let seq = prune_sequence(tree, train)?;
    let mut best: Option<(usize, f64, Tree)> = None;
    for (k, subtree) in seq.subtrees(tree).into_iter().enumerate() {
        let risk = empirical_l2_risk(&subtree, validation)?;
        // Later subtrees are smaller, so `<=` breaks ties toward fewer leaves.
        if best.as_ref().is_none_or(|(_, r, _)| risk <= *r) {
            best = Some((k, risk, subtree));
        }
    }
    let (index, validation_risk, tree) = best.expect("sequence contains the unpruned tree");
    let (lo, hi) = seq.alpha_interval(index);
    Ok(AlphaSelection { alpha: (lo * hi).sqrt(), tree, validation_risk, index })
}
