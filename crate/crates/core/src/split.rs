//! Split search for CART, CovRT and the random baseline.
//!
//! For every covariate the node's rows are sorted once and scanned left to
//! right with running response sums, so each feature costs `O(N_t log N_t)`
//! for the sort and `O(N_t)` for the scan. Candidate thresholds are midpoints
//! between consecutive distinct values; a row goes left iff `x_j <= s`.
//!
//! Both criteria are evaluated from the daughter counts and mean difference:
//!
//! * CART impurity gain: `P_L · P_R · (ȳ_L − ȳ_R)²`
//! * CovRT covariance-squared: `P_L² · P_R² · (ȳ_L − ȳ_R)²`
//!
//! The first is algebraically equal to `I(t) − P_L I(t_L) − P_R I(t_R)` and is
//! non-negative by construction. Responses are shifted by the first row of the
//! node before summing so that a constant node scores exactly zero.

use rand::Rng;

use crate::data::{mean_and_risk, CriterionKind, Dataset, NodeRegion};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub n_left: usize,
    pub n_right: usize,
    /// Sum of left-daughter responses.
    pub sum_left: f64,
    /// Sum of right-daughter responses.
    pub sum_right: f64,
    pub criterion_value: f64,
}

impl SplitCandidate {
    pub fn mean_left(&self) -> f64 {
        self.sum_left / self.n_left as f64
    }

    pub fn mean_right(&self) -> f64 {
        self.sum_right / self.n_right as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDecision {
    /// `None` when there is no candidate or the best value is zero.
    pub best: Option<SplitCandidate>,
    pub criterion: CriterionKind,
    pub candidates_evaluated: usize,
}

/// Response count, sum and sum of squares for one daughter node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideStats {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl SideStats {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        values.into_iter().fold(SideStats::default(), |acc, v| SideStats {
            n: acc.n + 1,
            sum: acc.sum + v,
            sum_sq: acc.sum_sq + v * v,
        })
    }

    fn risk(&self) -> f64 {
        let n = self.n as f64;
        (self.sum_sq / n - (self.sum / n).powi(2)).max(0.0)
    }
}

/// Empirical covariance-squared `P_L² P_R² (ȳ_L − ȳ_R)²` of a split.
pub fn covrt_criterion(n_left: usize, n_right: usize, sum_left: f64, sum_right: f64) -> Result<f64> {
    if n_left == 0 || n_right == 0 {
        return Err(Error::invalid("covariance-squared needs two non-empty daughters"));
    }
    Ok(covrt_value(n_left, n_right, sum_left, sum_right))
}

#[inline]
fn covrt_value(n_left: usize, n_right: usize, sum_left: f64, sum_right: f64) -> f64 {
    let (pl, pr, diff) = balance_and_diff(n_left, n_right, sum_left, sum_right);
    let w = pl * pr;
    w * w * diff * diff
}

#[inline]
fn cart_value(n_left: usize, n_right: usize, sum_left: f64, sum_right: f64) -> f64 {
    let (pl, pr, diff) = balance_and_diff(n_left, n_right, sum_left, sum_right);
    pl * pr * diff * diff
}

#[inline]
fn balance_and_diff(n_left: usize, n_right: usize, sum_left: f64, sum_right: f64) -> (f64, f64, f64) {
    let nl = n_left as f64;
    let nr = n_right as f64;
    let n = nl + nr;
    (nl / n, nr / n, sum_left / nl - sum_right / nr)
}

/// Impurity gain `I(t) − P_L I(t_L) − P_R I(t_R)` from the parent impurity and
/// per-daughter sums. Clamped at zero against rounding.
pub fn cart_impurity_gain(parent_risk: f64, left: SideStats, right: SideStats) -> Result<f64> {
    if left.n == 0 || right.n == 0 {
        return Err(Error::invalid("impurity gain needs two non-empty daughters"));
    }
    let n = (left.n + right.n) as f64;
    let pl = left.n as f64 / n;
    let pr = right.n as f64 / n;
    Ok((parent_risk - pl * left.risk() - pr * right.risk()).max(0.0))
}

/// Threshold strictly between two consecutive distinct values `lo < hi`
/// that keeps `lo` on the left: the midpoint, or `lo` itself when the
/// midpoint rounds onto `hi`.
pub fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo / 2.0 + hi / 2.0;
    if m >= lo && m < hi {
        m
    } else {
        lo
    }
}

/// Candidate thresholds for feature `j` within the region, ascending.
pub fn candidate_thresholds(data: &Dataset, region: &NodeRegion, feature: usize) -> Vec<f64> {
    let col = data.column(feature);
    let mut values: Vec<f64> = region.rows().iter().map(|&i| col[i]).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values.windows(2).map(|w| midpoint(w[0], w[1])).collect()
}

/// Best split of `region` under `criterion`.
///
/// CART and CovRT maximize their criterion over every (feature, midpoint)
/// pair, keeping the first maximum in (feature, threshold) order. RANDOM picks
/// a feature uniformly among those with at least two distinct values in the
/// node and then one of its midpoints uniformly; `rng` is only used there.
pub fn best_split<R: Rng + ?Sized>(
    data: &Dataset,
    region: &NodeRegion,
    criterion: CriterionKind,
    rng: &mut R,
) -> Result<SplitDecision> {
    if region.len() < 2 {
        return Err(Error::invalid(format!("cannot split a node with {} row(s)", region.len())));
    }
    match criterion {
        CriterionKind::Cart => Ok(scan(data, region, criterion, cart_value)),
        CriterionKind::Covrt => Ok(scan(data, region, criterion, covrt_value)),
        CriterionKind::Random => random_split(data, region, rng),
    }
}

struct SortedNode {
    /// (x, shifted y) pairs sorted by x.
    pairs: Vec<(f64, f64)>,
}

impl SortedNode {
    fn new(data: &Dataset, region: &NodeRegion, feature: usize, reference: f64) -> Self {
        let col = data.column(feature);
        let y = data.response();
        let mut pairs: Vec<(f64, f64)> =
            region.rows().iter().map(|&i| (col[i], y[i] - reference)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { pairs }
    }

    /// Calls `visit(threshold, n_left, sum_left)` for every candidate, in
    /// ascending threshold order. Returns the shifted response total.
    fn for_each_candidate(&self, mut visit: impl FnMut(f64, usize, f64)) -> f64 {
        let mut sum_left = 0.0;
        let last = self.pairs.len() - 1;
        for (k, &(x, y)) in self.pairs.iter().enumerate() {
            sum_left += y;
            if k < last {
                let next = self.pairs[k + 1].0;
                if x < next {
                    visit(midpoint(x, next), k + 1, sum_left);
                }
            }
        }
        sum_left
    }
}

fn scan(
    data: &Dataset,
    region: &NodeRegion,
    criterion: CriterionKind,
    value: fn(usize, usize, f64, f64) -> f64,
) -> SplitDecision {
    let y = data.response();
    let reference = y[region.rows()[0]];
    let n = region.len();
    let mut best: Option<SplitCandidate> = None;
    let mut best_value = 0.0;
    let mut evaluated = 0;
    for feature in 0..data.n_features() {
        let sorted = SortedNode::new(data, region, feature, reference);
        let total: f64 = sorted.pairs.iter().map(|p| p.1).sum();
        sorted.for_each_candidate(|threshold, n_left, sum_left| {
            evaluated += 1;
            let n_right = n - n_left;
            let sum_right = total - sum_left;
            let v = value(n_left, n_right, sum_left, sum_right);
            if v > best_value {
                best_value = v;
                best = Some(SplitCandidate {
                    feature,
                    threshold,
                    n_left,
                    n_right,
                    sum_left,
                    sum_right,
                    criterion_value: v,
                });
            }
        });
    }
    // Report sums in the response's own units.
    let best = best.map(|mut c| {
        c.sum_left += reference * c.n_left as f64;
        c.sum_right += reference * c.n_right as f64;
        c
    });
    SplitDecision { best, criterion, candidates_evaluated: evaluated }
}

fn random_split<R: Rng + ?Sized>(data: &Dataset, region: &NodeRegion, rng: &mut R) -> Result<SplitDecision> {
    let per_feature: Vec<Vec<f64>> =
        (0..data.n_features()).map(|j| candidate_thresholds(data, region, j)).collect();
    let evaluated = per_feature.iter().map(Vec::len).sum();
    let eligible: Vec<usize> = (0..per_feature.len()).filter(|&j| !per_feature[j].is_empty()).collect();
    if eligible.is_empty() {
        return Ok(SplitDecision { best: None, criterion: CriterionKind::Random, candidates_evaluated: 0 });
    }
    let feature = eligible[rng.random_range(0..eligible.len())];
    let thresholds = &per_feature[feature];
    let threshold = thresholds[rng.random_range(0..thresholds.len())];
    let split = evaluate_split(data, region, feature, threshold)?;
    // The recorded value is the impurity gain of the drawn split.
    let candidate = SplitCandidate {
        criterion_value: cart_value(split.n_left, split.n_right, split.sum_left, split.sum_right),
        ..split
    };
    Ok(SplitDecision { best: Some(candidate), criterion: CriterionKind::Random, candidates_evaluated: evaluated })
}

/// Daughter counts and sums of an explicit split. `criterion_value` is left at 0.
pub fn evaluate_split(data: &Dataset, region: &NodeRegion, feature: usize, threshold: f64) -> Result<SplitCandidate> {
    if feature >= data.n_features() {
        return Err(Error::DimensionMismatch { expected: data.n_features(), got: feature + 1 });
    }
    let col = data.column(feature);
    let y = data.response();
    let (mut n_left, mut n_right, mut sum_left, mut sum_right) = (0, 0, 0.0, 0.0);
    for &i in region.rows() {
        if col[i] <= threshold {
            n_left += 1;
            sum_left += y[i];
        } else {
            n_right += 1;
            sum_right += y[i];
        }
    }
    if n_left == 0 || n_right == 0 {
        return Err(Error::invalid(format!(
            "split on feature {feature} at {threshold} leaves a daughter empty"
        )));
    }
    Ok(SplitCandidate { feature, threshold, n_left, n_right, sum_left, sum_right, criterion_value: 0.0 })
}

/// Partitions the region's rows by `x_feature <= threshold`.
pub fn partition_rows(data: &Dataset, rows: &[usize], feature: usize, threshold: f64) -> (Vec<usize>, Vec<usize>) {
    let col = data.column(feature);
    rows.iter().partition(|&&i| col[i] <= threshold)
}

/// Result of checking `IG = ĈS / (P_L P_R)` at one split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// Impurity gain computed from within-node risks.
    pub impurity_gain: f64,
    /// Covariance-squared computed from daughter means.
    pub covariance_squared: f64,
    /// `impurity_gain − covariance_squared / (P_L P_R)`.
    pub residual: f64,
    /// Parent impurity, the natural scale for `residual`.
    pub scale: f64,
}

impl IdentityCheck {
    pub fn relative_residual(&self) -> f64 {
        relative_to(self.residual, self.scale)
    }
}

pub(crate) fn relative_to(residual: f64, scale: f64) -> f64 {
    if residual == 0.0 {
        0.0
    } else {
        residual.abs() / scale.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluates both sides of `IG = ĈS/(P_L P_R)` at split `(feature, threshold)`.
/// The impurity gain goes through two-pass within-node risks, the
/// covariance-squared through daughter means, so the two are independent
/// routes to the same number.
pub fn ig_cs_identity_check(
    data: &Dataset,
    region: &NodeRegion,
    feature: usize,
    threshold: f64,
) -> Result<IdentityCheck> {
    let split = evaluate_split(data, region, feature, threshold)?;
    let (left, right) = partition_rows(data, region.rows(), feature, threshold);
    let y = data.response();
    let (_, parent_risk) = mean_and_risk(region.rows().iter().map(|&i| y[i])).expect("non-empty");
    let (mean_l, risk_l) = mean_and_risk(left.iter().map(|&i| y[i])).expect("non-empty");
    let (mean_r, risk_r) = mean_and_risk(right.iter().map(|&i| y[i])).expect("non-empty");
    let n = region.len() as f64;
    let pl = split.n_left as f64 / n;
    let pr = split.n_right as f64 / n;
    let impurity_gain = parent_risk - pl * risk_l - pr * risk_r;
    let diff = mean_l - mean_r;
    let covariance_squared = pl * pl * pr * pr * diff * diff;
    Ok(IdentityCheck {
        impurity_gain,
        covariance_squared,
        residual: impurity_gain - covariance_squared / (pl * pr),
        scale: parent_risk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng_from_seed;

    fn step_data() -> Dataset {
        Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn covrt_criterion_examples() {
        assert_eq!(covrt_criterion(1, 1, 0.0, 1.0).unwrap(), 0.0625);
        assert_eq!(covrt_criterion(3, 5, 6.0, 10.0).unwrap(), 0.0);
        let v = covrt_criterion(2, 1, 0.0, 10.0).unwrap();
        assert!((v - 400.0 / 81.0).abs() < 1e-12);
        assert!(covrt_criterion(0, 1, 0.0, 1.0).is_err());
        assert!(covrt_criterion(1, 0, 0.0, 1.0).is_err());
    }

    #[test]
    fn covrt_criterion_is_symmetric() {
        let a = covrt_criterion(3, 7, 1.5, -2.0).unwrap();
        let b = covrt_criterion(7, 3, -2.0, 1.5).unwrap();
        assert!((a - b).abs() <= 1e-15 * a.abs());
    }

    #[test]
    fn cart_gain_examples() {
        let gain = cart_impurity_gain(
            0.25,
            SideStats::from_values([0.0, 0.0]),
            SideStats::from_values([1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(gain, 0.25);

        let pure = cart_impurity_gain(0.0, SideStats::from_values([3.0]), SideStats::from_values([3.0, 3.0]))
            .unwrap();
        assert_eq!(pure, 0.0);

        let gain = cart_impurity_gain(
            200.0 / 9.0,
            SideStats::from_values([0.0, 0.0]),
            SideStats::from_values([10.0]),
        )
        .unwrap();
        assert!((gain - 200.0 / 9.0).abs() < 1e-12);
        assert!(cart_impurity_gain(1.0, SideStats::default(), SideStats::from_values([1.0])).is_err());
    }

    #[test]
    fn best_split_on_step_data() {
        let d = step_data();
        let mut rng = rng_from_seed(0);
        let cart = best_split(&d, &d.root_region(), CriterionKind::Cart, &mut rng).unwrap();
        let c = cart.best.unwrap();
        assert_eq!((c.feature, c.threshold, c.criterion_value), (0, 2.5, 0.25));
        assert_eq!(cart.candidates_evaluated, 3);

        let cov = best_split(&d, &d.root_region(), CriterionKind::Covrt, &mut rng).unwrap();
        let c = cov.best.unwrap();
        assert_eq!((c.feature, c.threshold, c.criterion_value), (0, 2.5, 0.0625));
        assert_eq!((c.n_left, c.n_right, c.sum_left, c.sum_right), (2, 2, 0.0, 2.0));
    }

    #[test]
    fn constant_response_has_no_split() {
        let d = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![0.1; 4]).unwrap();
        let mut rng = rng_from_seed(0);
        for criterion in [CriterionKind::Cart, CriterionKind::Covrt] {
            let dec = best_split(&d, &d.root_region(), criterion, &mut rng).unwrap();
            assert!(dec.best.is_none());
            assert_eq!(dec.candidates_evaluated, 3);
        }
    }

    #[test]
    fn duplicate_values_collapse_to_unique_midpoints() {
        let d = Dataset::univariate(vec![1.0, 1.0, 2.0, 2.0, 4.0], vec![0.0, 1.0, 0.0, 1.0, 5.0]).unwrap();
        assert_eq!(candidate_thresholds(&d, &d.root_region(), 0), vec![1.5, 3.0]);
        let mut rng = rng_from_seed(0);
        let dec = best_split(&d, &d.root_region(), CriterionKind::Cart, &mut rng).unwrap();
        assert_eq!(dec.candidates_evaluated, 2);
        assert_eq!(dec.best.unwrap().threshold, 3.0);
    }

    #[test]
    fn ties_go_to_smallest_feature_then_threshold() {
        // Both columns separate y identically.
        let d = Dataset::from_rows(
            &[vec![1.0, 10.0], vec![2.0, 20.0], vec![3.0, 30.0], vec![4.0, 40.0]],
            vec![0.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        let mut rng = rng_from_seed(0);
        let c = best_split(&d, &d.root_region(), CriterionKind::Covrt, &mut rng).unwrap().best.unwrap();
        assert_eq!((c.feature, c.threshold), (0, 2.5));

        // Symmetric response: thresholds 1.5 and 3.5 tie; the smaller wins.
        let d = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let c = best_split(&d, &d.root_region(), CriterionKind::Cart, &mut rng).unwrap().best.unwrap();
        assert_eq!(c.threshold, 1.5);
    }

    #[test]
    fn single_row_region_is_an_error() {
        let d = step_data();
        let region = NodeRegion::new(&d, vec![2], 0).unwrap();
        let mut rng = rng_from_seed(0);
        assert!(best_split(&d, &region, CriterionKind::Cart, &mut rng).is_err());
    }

    #[test]
    fn random_split_skips_constant_columns() {
        let d = Dataset::from_rows(
            &[vec![7.0, 1.0], vec![7.0, 2.0], vec![7.0, 3.0]],
            vec![0.0, 1.0, 2.0],
        )
        .unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let c = best_split(&d, &d.root_region(), CriterionKind::Random, &mut rng).unwrap().best.unwrap();
            assert_eq!(c.feature, 1);
            assert!(c.threshold == 1.5 || c.threshold == 2.5);
        }
        let flat = Dataset::univariate(vec![7.0, 7.0], vec![0.0, 1.0]).unwrap();
        assert!(best_split(&flat, &flat.root_region(), CriterionKind::Random, &mut rng).unwrap().best.is_none());
    }

    #[test]
    fn midpoint_of_adjacent_floats_stays_left_closed() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(m >= lo && m < hi);
        assert_eq!(midpoint(1.0, 2.0), 1.5);
    }

    #[test]
    fn identity_on_step_data() {
        let d = step_data();
        let check = ig_cs_identity_check(&d, &d.root_region(), 0, 2.5).unwrap();
        assert_eq!(check.impurity_gain, 0.25);
        assert_eq!(check.covariance_squared, 0.0625);
        assert_eq!(check.residual, 0.0);

        let pure = Dataset::univariate(vec![1.0, 2.0, 3.0], vec![2.0; 3]).unwrap();
        let check = ig_cs_identity_check(&pure, &pure.root_region(), 0, 1.5).unwrap();
        assert_eq!((check.impurity_gain, check.covariance_squared, check.residual), (0.0, 0.0, 0.0));

        assert!(ig_cs_identity_check(&d, &d.root_region(), 0, 10.0).is_err());
    }
}
