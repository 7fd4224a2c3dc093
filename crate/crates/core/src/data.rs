//! Datasets and the fitted tree structure.
//!
//! A [`Dataset`] stores its features column-major, since every split search
//! scans one covariate at a time. A [`Tree`] is an index-based node store
//! rooted at id 0; it is immutable once grown, and pruning produces new trees.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric design matrix plus response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    response: Vec<f64>,
    column_names: Vec<String>,
    response_name: String,
}

impl Dataset {
    /// Builds a dataset from feature columns. Every column must have the same
    /// length as `response` and every value must be finite.
    pub fn new(
        columns: Vec<Vec<f64>>,
        response: Vec<f64>,
        column_names: Vec<String>,
        response_name: impl Into<String>,
    ) -> Result<Self> {
        if response.is_empty() {
            return Err(Error::empty("dataset has no rows"));
        }
        if columns.is_empty() {
            return Err(Error::empty("dataset has no feature columns"));
        }
        if column_names.len() != columns.len() {
            return Err(Error::invalid(format!(
                "{} column names for {} columns",
                column_names.len(),
                columns.len()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != response.len() {
                return Err(Error::invalid(format!(
                    "column `{}` has {} rows, response has {}",
                    column_names[j],
                    col.len(),
                    response.len()
                )));
            }
            if let Some((i, &v)) = col.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, column: j, value: v });
            }
        }
        if let Some((i, &v)) = response.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, column: columns.len(), value: v });
        }
        Ok(Self { columns, response, column_names, response_name: response_name.into() })
    }

    /// Builds a dataset from row-major feature vectors with default column
    /// names `x1..xp` and response name `y`.
    pub fn from_rows(rows: &[Vec<f64>], response: Vec<f64>) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch { expected: p, got: bad.len() });
        }
        if rows.len() != response.len() {
            return Err(Error::invalid(format!(
                "{} feature rows for {} responses",
                rows.len(),
                response.len()
            )));
        }
        let columns = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::new(columns, response, default_names(p), "y")
    }

    /// Single-covariate convenience constructor.
    pub fn univariate(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(vec![x], y, default_names(1), "y")
    }

    pub fn n_rows(&self) -> usize {
        self.response.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature][row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Copies the given rows (in the given order) into a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::empty("subset with no rows"));
        }
        let columns = self.columns.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect();
        let response = rows.iter().map(|&i| self.response[i]).collect();
        Ok(Self {
            columns,
            response,
            column_names: self.column_names.clone(),
            response_name: self.response_name.clone(),
        })
    }

    /// All row indices as a root region.
    pub fn root_region(&self) -> NodeRegion {
        NodeRegion { rows: (0..self.n_rows()).collect(), depth: 0 }
    }
}

pub(crate) fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

/// The training rows that fall in one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRegion {
    rows: Vec<usize>,
    depth: usize,
}

impl NodeRegion {
    /// Validates that `rows` is a non-empty set of distinct row indices of `data`.
    pub fn new(data: &Dataset, rows: Vec<usize>, depth: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::empty("node region has no rows"));
        }
        let mut seen = HashSet::with_capacity(rows.len());
        for &i in &rows {
            if i >= data.n_rows() {
                return Err(Error::invalid(format!("row index {i} out of range")));
            }
            if !seen.insert(i) {
                return Err(Error::invalid(format!("row index {i} repeated in region")));
            }
        }
        Ok(Self { rows, depth })
    }

    pub(crate) fn from_parts_unchecked(rows: Vec<usize>, depth: usize) -> Self {
        Self { rows, depth }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// Mean and within-node L2 risk of the node mean, `(ȳ, Σ(y - ȳ)² / n)`.
pub fn node_mean_and_risk(data: &Dataset, region: &NodeRegion) -> Result<(f64, f64)> {
    let y = data.response();
    mean_and_risk(region.rows().iter().map(|&i| y[i]))
        .ok_or_else(|| Error::empty("node region has no rows"))
}

/// Two-pass mean and mean squared deviation. Values are shifted by the first
/// element before accumulating, which makes constant inputs come out with
/// exactly zero risk.
pub(crate) fn mean_and_risk<I>(values: I) -> Option<(f64, f64)>
where
    I: Iterator<Item = f64> + Clone,
{
    let mut it = values.clone();
    let reference = it.next()?;
    let mut n = 1usize;
    let mut shifted_sum = 0.0;
    for v in it {
        shifted_sum += v - reference;
        n += 1;
    }
    let shifted_mean = shifted_sum / n as f64;
    let mut ss = 0.0;
    for v in values {
        let d = (v - reference) - shifted_mean;
        ss += d * d;
    }
    Some((reference + shifted_mean, ss / n as f64))
}

/// Splitting rule used to grow a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    /// Impurity gain (empirical L2 risk reduction).
    Cart,
    /// Empirical covariance-squared between the split indicator and the response.
    Covrt,
    /// Feature and threshold drawn uniformly at random; a baseline only.
    Random,
}

impl CriterionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CriterionKind::Cart => "cart",
            CriterionKind::Covrt => "covrt",
            CriterionKind::Random => "random",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cart" => Ok(CriterionKind::Cart),
            "covrt" => Ok(CriterionKind::Covrt),
            "random" => Ok(CriterionKind::Random),
            _ => Err(Error::Unknown { kind: "criterion", name: s.to_string() }),
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Leaf,
    /// Rows with `x[feature] <= threshold` go to `left`.
    Internal { feature: usize, threshold: f64, left: NodeId, right: NodeId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    /// Training rows routed to this node.
    pub n: usize,
    /// Mean training response of the node.
    pub mean: f64,
    /// Within-node L2 risk of `mean`.
    pub risk: f64,
    pub depth: usize,
}

impl Node {
    pub fn leaf(n: usize, mean: f64, risk: f64, depth: usize) -> Self {
        Self { kind: NodeKind::Leaf, n, mean, risk, depth }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf)
    }

    pub fn children(&self) -> Option<(NodeId, NodeId)> {
        match self.kind {
            NodeKind::Leaf => None,
            NodeKind::Internal { left, right, .. } => Some((left, right)),
        }
    }
}

/// A fitted piecewise-constant regression tree. The root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    criterion: CriterionKind,
    max_depth: usize,
    min_node_size: usize,
    column_names: Vec<String>,
}

impl Tree {
    /// Assembles a tree from a node store, checking the structural
    /// invariants: node 0 is the root, every internal node has two distinct
    /// children with larger ids whose counts add up, every node except the root has exactly
    /// one parent, and node depths are consistent.
    pub fn from_parts(
        nodes: Vec<Node>,
        criterion: CriterionKind,
        max_depth: usize,
        min_node_size: usize,
        column_names: Vec<String>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("tree has no nodes"));
        }
        if column_names.is_empty() {
            return Err(Error::invalid("tree has no feature columns"));
        }
        let mut parent_count = vec![0usize; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            if node.n == 0 {
                return Err(Error::invalid(format!("node {id} has no samples")));
            }
            if !node.mean.is_finite() || !node.risk.is_finite() || node.risk < 0.0 {
                return Err(Error::invalid(format!("node {id} has invalid statistics")));
            }
            if let NodeKind::Internal { feature, threshold, left, right } = node.kind {
                if feature >= column_names.len() {
                    return Err(Error::invalid(format!("node {id} splits on unknown feature {feature}")));
                }
                if !threshold.is_finite() {
                    return Err(Error::invalid(format!("node {id} has a non-finite threshold")));
                }
                if left == right || left >= nodes.len() || right >= nodes.len() || left <= id || right <= id {
                    return Err(Error::invalid(format!("node {id} has invalid children")));
                }
                parent_count[left] += 1;
                parent_count[right] += 1;
                if nodes[left].n + nodes[right].n != node.n {
                    return Err(Error::invalid(format!("children of node {id} do not partition its samples")));
                }
                if nodes[left].depth != node.depth + 1 || nodes[right].depth != node.depth + 1 {
                    return Err(Error::invalid(format!("children of node {id} have wrong depth")));
                }
            }
        }
        if nodes[0].depth != 0 || parent_count[0] != 0 {
            return Err(Error::invalid("node 0 is not a root"));
        }
        if let Some(id) = (1..nodes.len()).find(|&id| parent_count[id] != 1) {
            return Err(Error::invalid(format!("node {id} does not have exactly one parent")));
        }
        // One parent per non-root node plus n - 1 edges makes it a tree only
        // if everything is reachable from the root.
        let mut reached = 0;
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            reached += 1;
            if reached > nodes.len() {
                break;
            }
            if let Some((l, r)) = nodes[id].children() {
                stack.push(l);
                stack.push(r);
            }
        }
        if reached != nodes.len() {
            return Err(Error::invalid("node graph is not a rooted tree"));
        }
        Ok(Self { nodes, criterion, max_depth, min_node_size, column_names })
    }

    pub(crate) fn from_parts_unchecked(
        nodes: Vec<Node>,
        criterion: CriterionKind,
        max_depth: usize,
        min_node_size: usize,
        column_names: Vec<String>,
    ) -> Self {
        Self { nodes, criterion, max_depth, min_node_size, column_names }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn criterion(&self) -> CriterionKind {
        self.criterion
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn min_node_size(&self) -> usize {
        self.min_node_size
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_ids(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&id| self.nodes[id].is_leaf()).collect()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Depth of the deepest leaf.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Training L2 risk of the fitted function, from stored leaf statistics:
    /// Σ (n_leaf / N) · risk_leaf.
    pub fn training_risk(&self) -> f64 {
        let total = self.root().n as f64;
        self.nodes.iter().filter(|n| n.is_leaf()).map(|n| n.n as f64 / total * n.risk).sum()
    }

    /// Id of the leaf reached by `point`.
    pub fn leaf_for(&self, point: &[f64]) -> Result<NodeId> {
        self.check_point(point)?;
        Ok(self.descend(|j| point[j]))
    }

    /// Prediction at `point`: the mean of the leaf it lands in.
    pub fn predict(&self, point: &[f64]) -> Result<f64> {
        Ok(self.nodes[self.leaf_for(point)?].mean)
    }

    /// Predictions for every row of `data`.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_dataset(data)?;
        Ok((0..data.n_rows()).map(|i| self.nodes[self.descend(|j| data.value(i, j))].mean).collect())
    }

    /// Rows of `data` reaching each node, indexed by node id.
    pub fn route_rows(&self, data: &Dataset) -> Result<Vec<Vec<usize>>> {
        self.check_dataset(data)?;
        let mut out = vec![Vec::new(); self.nodes.len()];
        out[0] = (0..data.n_rows()).collect();
        // Children always have larger ids than their parent.
        for id in 0..self.nodes.len() {
            if let NodeKind::Internal { feature, threshold, left, right } = self.nodes[id].kind {
                let rows = std::mem::take(&mut out[id]);
                let (l, r): (Vec<usize>, Vec<usize>) =
                    rows.iter().partition(|&&i| data.value(i, feature) <= threshold);
                out[left] = l;
                out[right] = r;
                out[id] = rows;
            }
        }
        Ok(out)
    }

    pub(crate) fn check_dataset(&self, data: &Dataset) -> Result<()> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch { expected: self.n_features(), got: data.n_features() });
        }
        Ok(())
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.n_features() {
            return Err(Error::DimensionMismatch { expected: self.n_features(), got: point.len() });
        }
        if let Some((j, &v)) = point.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, column: j, value: v });
        }
        Ok(())
    }

    fn descend(&self, value: impl Fn(usize) -> f64) -> NodeId {
        let mut id = 0;
        while let NodeKind::Internal { feature, threshold, left, right } = self.nodes[id].kind {
            id = if value(feature) <= threshold { left } else { right };
        }
        id
    }

    /// Number of leaves under each node, indexed by node id.
    pub fn leaf_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            counts[id] = match self.nodes[id].children() {
                None => 1,
                Some((l, r)) => counts[l] + counts[r],
            };
        }
        counts
    }

    /// Returns the tree obtained by turning each listed node into a leaf.
    /// Nodes are renumbered breadth-first, which is the order growth uses.
    pub fn collapse(&self, collapsed: &HashSet<NodeId>) -> Tree {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut queue = std::collections::VecDeque::from([0usize]);
        // `slots[k]` is the old id stored at new id k.
        let mut slots = Vec::new();
        while let Some(old) = queue.pop_front() {
            slots.push(old);
            let node = &self.nodes[old];
            nodes.push(Node::leaf(node.n, node.mean, node.risk, node.depth));
            if !collapsed.contains(&old) {
                if let Some((l, r)) = node.children() {
                    queue.push_back(l);
                    queue.push_back(r);
                }
            }
        }
        // Second pass wires children now that new ids are known.
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (new, &old) in slots.iter().enumerate() {
            new_id[old] = new;
        }
        for (new, &old) in slots.iter().enumerate() {
            if collapsed.contains(&old) {
                continue;
            }
            if let NodeKind::Internal { feature, threshold, left, right } = self.nodes[old].kind {
                nodes[new].kind = NodeKind::Internal {
                    feature,
                    threshold,
                    left: new_id[left],
                    right: new_id[right],
                };
            }
        }
        Tree::from_parts_unchecked(
            nodes,
            self.criterion,
            self.max_depth,
            self.min_node_size,
            self.column_names.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump() -> Tree {
        let nodes = vec![
            Node {
                kind: NodeKind::Internal { feature: 0, threshold: 2.5, left: 1, right: 2 },
                n: 4,
                mean: 0.5,
                risk: 0.25,
                depth: 0,
            },
            Node::leaf(2, 0.0, 0.0, 1),
            Node::leaf(2, 1.0, 0.0, 1),
        ];
        Tree::from_parts(nodes, CriterionKind::Cart, 1, 1, default_names(2)).unwrap()
    }

    #[test]
    fn root_only_tree_predicts_root_mean() {
        let tree = Tree::from_parts(
            vec![Node::leaf(3, 3.5, 1.0, 0)],
            CriterionKind::Covrt,
            0,
            5,
            default_names(2),
        )
        .unwrap();
        assert_eq!(tree.predict(&[-100.0, 7.0]).unwrap(), 3.5);
        assert_eq!(tree.predict(&[0.0, 0.0]).unwrap(), 3.5);
    }

    #[test]
    fn boundary_routes_left() {
        let tree = stump();
        assert_eq!(tree.predict(&[2.5, 9.0]).unwrap(), 0.0);
        assert_eq!(tree.predict(&[2.5000001, 9.0]).unwrap(), 1.0);
    }

    #[test]
    fn predict_rejects_bad_points() {
        let tree = stump();
        assert!(matches!(tree.predict(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(tree.predict(&[f64::NAN, 1.0]), Err(Error::NonFinite { .. })));
        assert!(matches!(tree.predict(&[1.0, f64::INFINITY]), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn mean_and_risk_examples() {
        let d = Dataset::univariate(vec![1.0], vec![5.0]).unwrap();
        assert_eq!(node_mean_and_risk(&d, &d.root_region()).unwrap(), (5.0, 0.0));
        let d = Dataset::univariate(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(node_mean_and_risk(&d, &d.root_region()).unwrap(), (0.5, 0.25));
        let d = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(node_mean_and_risk(&d, &d.root_region()).unwrap(), (0.5, 0.25));
    }

    #[test]
    fn constant_values_have_zero_risk() {
        let d = Dataset::univariate(vec![1.0, 2.0, 3.0], vec![0.1; 3]).unwrap();
        assert_eq!(node_mean_and_risk(&d, &d.root_region()).unwrap(), (0.1, 0.0));
    }

    #[test]
    fn empty_region_is_rejected() {
        let d = Dataset::univariate(vec![1.0], vec![5.0]).unwrap();
        assert!(NodeRegion::new(&d, vec![], 0).is_err());
        assert!(NodeRegion::new(&d, vec![1], 0).is_err());
        assert!(NodeRegion::new(&d, vec![0, 0], 0).is_err());
    }

    #[test]
    fn dataset_rejects_non_finite_and_ragged() {
        assert!(Dataset::univariate(vec![1.0, f64::NAN], vec![0.0, 1.0]).is_err());
        assert!(Dataset::univariate(vec![1.0, 2.0], vec![0.0, f64::INFINITY]).is_err());
        assert!(Dataset::univariate(vec![1.0], vec![0.0, 1.0]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0, 2.0], vec![1.0]], vec![0.0, 1.0]).is_err());
        assert!(Dataset::univariate(vec![], vec![]).is_err());
    }

    #[test]
    fn from_parts_rejects_broken_structure() {
        let names = default_names(1);
        // Child counts do not add up.
        let nodes = vec![
            Node {
                kind: NodeKind::Internal { feature: 0, threshold: 0.0, left: 1, right: 2 },
                n: 5,
                mean: 0.0,
                risk: 0.0,
                depth: 0,
            },
            Node::leaf(2, 0.0, 0.0, 1),
            Node::leaf(2, 0.0, 0.0, 1),
        ];
        assert!(Tree::from_parts(nodes, CriterionKind::Cart, 1, 1, names.clone()).is_err());
        // Orphan node.
        let nodes = vec![Node::leaf(2, 0.0, 0.0, 0), Node::leaf(2, 0.0, 0.0, 1)];
        assert!(Tree::from_parts(nodes, CriterionKind::Cart, 1, 1, names.clone()).is_err());
        // Self loop through the root.
        let nodes = vec![
            Node {
                kind: NodeKind::Internal { feature: 0, threshold: 0.0, left: 0, right: 1 },
                n: 2,
                mean: 0.0,
                risk: 0.0,
                depth: 0,
            },
            Node::leaf(1, 0.0, 0.0, 1),
        ];
        assert!(Tree::from_parts(nodes, CriterionKind::Cart, 1, 1, names).is_err());
    }

    #[test]
    fn collapse_renumbers_breadth_first() {
        let tree = stump();
        let pruned = tree.collapse(&HashSet::from([0]));
        assert_eq!(pruned.n_nodes(), 1);
        assert_eq!(pruned.predict(&[0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(tree.collapse(&HashSet::new()), tree);
    }

    #[test]
    fn leaf_risks_sum_to_training_risk() {
        let tree = stump();
        assert_eq!(tree.training_risk(), 0.0);
        assert_eq!(tree.leaf_counts(), vec![2, 1, 1]);
    }
}
