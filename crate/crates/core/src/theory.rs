//! Computable pieces of the theory: additive functions and their total
//! variation, the population covariance-squared of a linear component, and
//! numerical checks of the node-wise and global risk bounds and identities.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::data::{mean_and_risk, CriterionKind, Dataset, NodeKind, NodeRegion, Tree};
use crate::error::{Error, Result};
use crate::grow::{grow, GrowConfig};
use crate::sim::{replication_seed, rng_from_seed, standard_normal, uniform_open_closed};
use crate::split::{best_split, candidate_thresholds, covrt_criterion, evaluate_split, ig_cs_identity_check, relative_to};

/// A univariate component `g_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Zero,
    /// `β x`
    Linear { beta: f64 },
    /// `β x²`
    Quadratic { beta: f64 },
    /// `β 1{x > cut}`
    Step { beta: f64, cut: f64 },
    /// `β x 1{x > cut}`
    RampAbove { beta: f64, cut: f64 },
    /// `β √x`
    Sqrt { beta: f64 },
    /// `β sin(πx/2)`
    SinHalfPi { beta: f64 },
    /// `β cos(πx)`
    CosPi { beta: f64 },
    /// `β x³`
    Cubic { beta: f64 },
    /// Linear interpolation between knots, constant outside them.
    PiecewiseLinear { knots: Vec<f64>, values: Vec<f64> },
}

impl Component {
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::invalid("piecewise-linear component needs matching, non-empty knots and values"));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("piecewise-linear knots and values must be finite"));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("piecewise-linear knots must be strictly increasing"));
        }
        Ok(Component::PiecewiseLinear { knots, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Component::Zero => 0.0,
            Component::Linear { beta } => beta * x,
            Component::Quadratic { beta } => beta * x * x,
            Component::Step { beta, cut } => {
                if x > cut {
                    beta
                } else {
                    0.0
                }
            }
            Component::RampAbove { beta, cut } => {
                if x > cut {
                    beta * x
                } else {
                    0.0
                }
            }
            Component::Sqrt { beta } => beta * x.sqrt(),
            Component::SinHalfPi { beta } => beta * (0.5 * PI * x).sin(),
            Component::CosPi { beta } => beta * (PI * x).cos(),
            Component::Cubic { beta } => beta * x * x * x,
            Component::PiecewiseLinear { ref knots, ref values } => interpolate(knots, values, x),
        }
    }

    /// Total variation on `(a, b]`.
    pub fn total_variation(&self, a: f64, b: f64) -> Result<f64> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::invalid(format!("component domain ({a}, {b}] is not a bounded interval")));
        }
        let tv = match *self {
            Component::Zero => 0.0,
            Component::Linear { beta } => beta.abs() * (b - a),
            Component::Cubic { beta } => beta.abs() * (b.powi(3) - a.powi(3)),
            Component::Step { beta, cut } => {
                if a < cut && cut < b {
                    beta.abs()
                } else {
                    0.0
                }
            }
            Component::RampAbove { beta, cut } => {
                if cut >= b {
                    0.0
                } else if cut <= a {
                    beta.abs() * (b - a)
                } else {
                    // Jump from 0 to β·cut, then the linear piece up to b.
                    beta.abs() * (cut.abs() + (b - cut))
                }
            }
            Component::Sqrt { beta } => {
                if a < 0.0 {
                    return Err(Error::invalid("square-root component needs a non-negative domain"));
                }
                beta.abs() * (b.sqrt() - a.sqrt())
            }
            // Turning points at 0, at the odd integers and at the integers.
            Component::Quadratic { .. } => self.variation_through(a, b, [0.0].into_iter()),
            Component::SinHalfPi { .. } => {
                let first = ((a - 1.0) / 2.0).ceil() as i64;
                let last = ((b - 1.0) / 2.0).floor() as i64;
                self.variation_through(a, b, (first..=last).map(|k| 2.0 * k as f64 + 1.0))
            }
            Component::CosPi { .. } => {
                self.variation_through(a, b, (a.ceil() as i64..=b.floor() as i64).map(|k| k as f64))
            }
            Component::PiecewiseLinear { ref knots, .. } => self.variation_through(a, b, knots.iter().copied()),
        };
        if tv.is_finite() {
            Ok(tv)
        } else {
            Err(Error::invalid("component has unbounded variation on its domain"))
        }
    }

    /// Variation of a continuous function monotone between consecutive
    /// turning points.
    fn variation_through(&self, a: f64, b: f64, turns: impl Iterator<Item = f64>) -> f64 {
        let mut points = vec![a];
        points.extend(turns.filter(|&t| a < t && t < b));
        points.push(b);
        points.windows(2).map(|w| (self.eval(w[1]) - self.eval(w[0])).abs()).sum()
    }
}

fn interpolate(knots: &[f64], values: &[f64], x: f64) -> f64 {
    let k = knots.partition_point(|&t| t <= x);
    if k == 0 {
        values[0]
    } else if k == knots.len() {
        values[k - 1]
    } else {
        let w = (x - knots[k - 1]) / (knots[k] - knots[k - 1]);
        values[k - 1] + w * (values[k] - values[k - 1])
    }
}

/// A component with the interval `(a, b]` it is considered on.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub component: Component,
    pub domain: (f64, f64),
}

impl Term {
    pub fn new(component: Component, domain: (f64, f64)) -> Self {
        Self { component, domain }
    }

    pub fn total_variation(&self) -> Result<f64> {
        self.component.total_variation(self.domain.0, self.domain.1)
    }
}

/// `g(x) = intercept + Σ_j g_j(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveFunction {
    pub intercept: f64,
    pub terms: Vec<Term>,
}

impl AdditiveFunction {
    pub fn new(intercept: f64, terms: Vec<Term>) -> Self {
        Self { intercept, terms }
    }

    /// The constant function.
    pub fn constant(value: f64, p: usize) -> Self {
        Self::new(value, (0..p).map(|_| Term::new(Component::Zero, (0.0, 1.0))).collect())
    }

    pub fn n_features(&self) -> usize {
        self.terms.len()
    }

    /// Panics if `x` is shorter than the number of terms.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert!(x.len() >= self.terms.len(), "point has {} coordinates, need {}", x.len(), self.terms.len());
        self.intercept + self.terms.iter().zip(x).map(|(t, &v)| t.component.eval(v)).sum::<f64>()
    }

    fn check_dataset(&self, data: &Dataset) -> Result<()> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch { expected: self.n_features(), got: data.n_features() });
        }
        Ok(())
    }

    /// Empirical L2 risk `(1/|rows|) Σ (y_i − g(x_i))²` over `rows`.
    pub fn empirical_risk(&self, data: &Dataset, rows: &[usize]) -> Result<f64> {
        self.check_dataset(data)?;
        if rows.is_empty() {
            return Err(Error::empty("no rows to evaluate"));
        }
        let y = data.response();
        let mut point = vec![0.0; data.n_features()];
        let mut total = 0.0;
        for &i in rows {
            for (j, v) in point.iter_mut().enumerate() {
                *v = data.value(i, j);
            }
            let r = y[i] - self.eval(&point);
            total += r * r;
        }
        Ok(total / rows.len() as f64)
    }
}

/// `‖g‖_TV` taken as the sum of component variations for this decomposition
/// (an upper bound on the infimum over decompositions).
pub fn tv_norm(f: &AdditiveFunction) -> Result<f64> {
    f.terms.iter().map(Term::total_variation).sum()
}

/// Population covariance-squared of a split at `s` for `g(x) = βx` with `x`
/// uniform on `(a, b]`: `(b − a)^{-2} (∫_a^s β (x − (a+b)/2) dx)²`.
pub fn population_cs_linear(beta: f64, a: f64, b: f64, s: f64) -> Result<f64> {
    if ![beta, a, b, s].iter().all(|v| v.is_finite()) || a >= b {
        return Err(Error::invalid(format!("({a}, {b}] is not a proper interval")));
    }
    if s <= a || s > b {
        return Err(Error::invalid(format!("split point {s} outside ({a}, {b}]")));
    }
    let m = 0.5 * (a + b);
    let integral = 0.5 * beta * ((s - m).powi(2) - (a - m).powi(2));
    Ok((integral / (b - a)).powi(2))
}

/// One line of a check report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive when the checked relation holds with room to spare.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    /// Remarks that are not pass/fail, such as unmet hypotheses.
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.rows.extend(other.rows);
        self.notes.extend(other.notes);
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["check", "instance", "lhs", "rhs", "margin", "pass"])
            .map_err(|e| Error::Io(e.into()))?;
        for r in &self.rows {
            w.write_record([
                r.check.clone(),
                r.instance.clone(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.pass.to_string(),
            ])
            .map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Tolerance on node-wise and global margins.
pub const MARGIN_TOLERANCE: f64 = 1e-10;

/// Relative tolerance on identity residuals.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    /// Positive excess; the inequality is checked.
    Checked,
    /// Excess ≤ 0; nothing to check.
    Vacuous,
    /// Positive excess but `‖g‖_TV = 0`; the bound is undefined.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaNode {
    pub node: usize,
    pub n: usize,
    /// `R̂_t(tree) − R̂_t(g)`.
    pub excess: f64,
    /// Largest covariance-squared over all splits of the node.
    pub covariance_squared: f64,
    /// `excess² / (4 ‖g‖²_TV)`.
    pub bound: f64,
    pub margin: f64,
    pub status: NodeStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub tv: f64,
    pub nodes: Vec<LemmaNode>,
}

impl LemmaReport {
    pub fn violations(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.status == NodeStatus::Degenerate || (n.status == NodeStatus::Checked && n.margin < -MARGIN_TOLERANCE))
            .count()
    }

    pub fn to_check_report(&self, instance: &str) -> CheckReport {
        let mut report = CheckReport::default();
        for node in &self.nodes {
            let pass = match node.status {
                NodeStatus::Checked => node.margin >= -MARGIN_TOLERANCE,
                NodeStatus::Vacuous => true,
                NodeStatus::Degenerate => {
                    report.notes.push(format!("{instance} node {}: positive excess with zero TV", node.node));
                    false
                }
            };
            report.rows.push(CheckRow {
                check: "lemma1".into(),
                instance: format!("{instance}/node{}", node.node),
                lhs: node.covariance_squared,
                rhs: node.bound,
                margin: node.margin,
                pass,
            });
        }
        report
    }
}

/// Checks `ĈS(t) ≥ (R̂_t(tree) − R̂_t(g))² / (4 ‖g‖²_TV)` at every leaf of
/// `tree`, where `ĈS(t)` is the largest covariance-squared over all splits
/// of the leaf's rows. `tree` plays the role of the depth `K − 1` prefix.
pub fn check_lemma1(tree: &Tree, data: &Dataset, g: &AdditiveFunction) -> Result<LemmaReport> {
    g.check_dataset(data)?;
    let tv = tv_norm(g)?;
    let routed = tree.route_rows(data)?;
    let y = data.response();
    // Covariance-squared maximization never draws from the generator.
    let mut rng = rng_from_seed(0);
    let mut nodes = Vec::new();
    for id in tree.leaf_ids() {
        let rows = &routed[id];
        if rows.is_empty() {
            continue;
        }
        let (_, tree_risk) = mean_and_risk(rows.iter().map(|&i| y[i])).expect("non-empty");
        let excess = tree_risk - g.empirical_risk(data, rows)?;
        let covariance_squared = if rows.len() >= 2 {
            let region = NodeRegion::from_parts_unchecked(rows.clone(), tree.node(id).depth);
            best_split(data, &region, CriterionKind::Covrt, &mut rng)?.best.map_or(0.0, |c| c.criterion_value)
        } else {
            0.0
        };
        let (bound, status) = if excess <= 0.0 {
            (0.0, NodeStatus::Vacuous)
        } else if tv == 0.0 {
            (f64::INFINITY, NodeStatus::Degenerate)
        } else {
            (excess * excess / (4.0 * tv * tv), NodeStatus::Checked)
        };
        nodes.push(LemmaNode {
            node: id,
            n: rows.len(),
            excess,
            covariance_squared,
            bound,
            margin: covariance_squared - bound,
            status,
        });
    }
    Ok(LemmaReport { tv, nodes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskBound {
    pub tree_risk: f64,
    pub g_risk: f64,
    pub tv: f64,
    /// `R̂(g) + ‖g‖²_TV / (K + 3)`.
    pub bound: f64,
    pub margin: f64,
}

impl RiskBound {
    pub fn holds(&self) -> bool {
        self.margin >= -MARGIN_TOLERANCE
    }
}

/// Grows a depth-`depth` CovRT tree on `data` and compares its training risk
/// with `R̂(g) + ‖g‖²_TV / (K + 3)`.
pub fn check_thm3(data: &Dataset, g: &AdditiveFunction, depth: usize, min_node_size: usize) -> Result<RiskBound> {
    if depth == 0 {
        return Err(Error::invalid("the risk bound is stated for depth K >= 1"));
    }
    g.check_dataset(data)?;
    let tree = grow(data, &GrowConfig::new(CriterionKind::Covrt, depth).min_node_size(min_node_size))?;
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    let g_risk = g.empirical_risk(data, &rows)?;
    let tv = tv_norm(g)?;
    let tree_risk = tree.training_risk();
    let bound = g_risk + tv * tv / (depth as f64 + 3.0);
    Ok(RiskBound { tree_risk, g_risk, tv, bound, margin: bound - tree_risk })
}

/// Both sides of `ĈS(j, s, t) = |⟨y − ȳ_t, Φ_t⟩_t|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProductCheck {
    pub inner_product_squared: f64,
    pub covariance_squared: f64,
    pub residual: f64,
    /// Parent impurity, used to scale the residual.
    pub scale: f64,
}

impl InnerProductCheck {
    pub fn relative_residual(&self) -> f64 {
        relative_to(self.residual, self.scale)
    }
}

/// Evaluates `⟨y − ȳ_t, Φ_t⟩_t` with `Φ_t(x) = N_R/N_t − 1{x_j > s}` and
/// `⟨a, b⟩_t = (1/N_t) Σ a_i b_i`, and compares its square with `ĈS`.
pub fn check_prop1(data: &Dataset, region: &NodeRegion, feature: usize, threshold: f64) -> Result<InnerProductCheck> {
    let split = evaluate_split(data, region, feature, threshold)?;
    let y = data.response();
    let x = data.column(feature);
    let rows = region.rows();
    let (mean, scale) = mean_and_risk(rows.iter().map(|&i| y[i])).expect("non-empty");
    let n = rows.len() as f64;
    let share_right = split.n_right as f64 / n;
    let inner: f64 = rows
        .iter()
        .map(|&i| {
            let phi = share_right - if x[i] > threshold { 1.0 } else { 0.0 };
            (y[i] - mean) * phi
        })
        .sum::<f64>()
        / n;
    let inner_product_squared = inner * inner;
    let covariance_squared = covrt_criterion(split.n_left, split.n_right, split.sum_left, split.sum_right)?;
    Ok(InnerProductCheck {
        inner_product_squared,
        covariance_squared,
        residual: inner_product_squared - covariance_squared,
        scale,
    })
}

/// A random node for identity checks: `2..=max_rows` rows, `1..=max_features`
/// features, with a split drawn among the midpoints of a non-constant column.
pub fn fuzz_node<R: Rng + ?Sized>(rng: &mut R, max_rows: usize, max_features: usize) -> (Dataset, usize, f64) {
    loop {
        let n = rng.random_range(2..=max_rows.max(2));
        let p = rng.random_range(1..=max_features.max(1));
        let scale = 10f64.powi(rng.random_range(-3..=3));
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random::<f64>()).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| scale * standard_normal(rng)).collect();
        let data = Dataset::from_rows(&rows, y).expect("finite draws");
        let region = data.root_region();
        let eligible: Vec<(usize, Vec<f64>)> = (0..p)
            .map(|j| (j, candidate_thresholds(&data, &region, j)))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        if eligible.is_empty() {
            continue;
        }
        let (j, thresholds) = &eligible[rng.random_range(0..eligible.len())];
        let s = thresholds[rng.random_range(0..thresholds.len())];
        return (data, *j, s);
    }
}

fn fuzz_suite<F>(check: &str, count: usize, seed: u64, f: F) -> Result<CheckReport>
where
    F: Fn(&Dataset, &NodeRegion, usize, f64) -> Result<(f64, f64, f64)> + Sync,
{
    let rows = (0..count as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(replication_seed(seed, r));
            let (data, j, s) = fuzz_node(&mut rng, 50, 5);
            let (lhs, rhs, relative) = f(&data, &data.root_region(), j, s)?;
            Ok(CheckRow {
                check: check.into(),
                instance: format!("node{r}"),
                lhs,
                rhs,
                margin: IDENTITY_TOLERANCE - relative,
                pass: relative < IDENTITY_TOLERANCE,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport { rows, notes: Vec::new() })
}

/// Inner-product identity over `count` random nodes.
pub fn verify_prop1(count: usize, seed: u64) -> Result<CheckReport> {
    fuzz_suite("prop1", count, seed, |data, region, j, s| {
        let c = check_prop1(data, region, j, s)?;
        Ok((c.inner_product_squared, c.covariance_squared, c.relative_residual()))
    })
}

/// `IG = ĈS / (P_L P_R)` over `count` random nodes.
pub fn verify_ig_identity(count: usize, seed: u64) -> Result<CheckReport> {
    fuzz_suite("ig-identity", count, seed, |data, region, j, s| {
        let c = ig_cs_identity_check(data, region, j, s)?;
        let pl = evaluate_split(data, region, j, s)?;
        let share = pl.n_left as f64 * pl.n_right as f64 / (region.len() as f64).powi(2);
        Ok((c.impurity_gain, c.covariance_squared / share, c.relative_residual()))
    })
}

/// Depth-1 CovRT fit to `y = βx (+ noise)` with `x` uniform on `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StumpFit {
    pub split_point: f64,
    pub covariance_squared: f64,
}

/// Draws `n` points of `y = βx + noise_sd·ε` and returns the root CovRT
/// split, or `None` when no split has positive covariance-squared.
pub fn linear_stump(beta: f64, noise_sd: f64, n: usize, seed: u64) -> Result<Option<StumpFit>> {
    let mut rng = rng_from_seed(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = uniform_open_closed(&mut rng);
        let noise = if noise_sd > 0.0 { noise_sd * standard_normal(&mut rng) } else { 0.0 };
        x.push(xi);
        y.push(beta * xi + noise);
    }
    let data = Dataset::univariate(x, y)?;
    let tree = grow(&data, &GrowConfig::new(CriterionKind::Covrt, 1).min_node_size(1))?;
    let NodeKind::Internal { threshold, .. } = tree.root().kind else {
        return Ok(None);
    };
    let split = evaluate_split(&data, &data.root_region(), 0, threshold)?;
    let covariance_squared = covrt_criterion(split.n_left, split.n_right, split.sum_left, split.sum_right)?;
    Ok(Some(StumpFit { split_point: threshold, covariance_squared }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMaximumCheck {
    pub fit: StumpFit,
    /// `β² / 64`, the population maximum on `(0, 1]`.
    pub population_max: f64,
    pub relative_error: f64,
    pub split_deviation: f64,
}

impl LinearMaximumCheck {
    pub fn passes(&self, relative_tolerance: f64, split_tolerance: f64) -> bool {
        self.relative_error <= relative_tolerance && self.split_deviation <= split_tolerance
    }
}

/// Compares the fitted maximum covariance-squared and split point of a
/// noiseless linear stump with `β²/64` at `s = 1/2`.
pub fn check_thm1(beta: f64, n: usize, seed: u64) -> Result<LinearMaximumCheck> {
    if beta == 0.0 {
        return Err(Error::invalid("the closed form needs a non-zero slope"));
    }
    let fit = linear_stump(beta, 0.0, n, seed)?.ok_or_else(|| Error::invalid("no split found"))?;
    let population_max = population_cs_linear(beta, 0.0, 1.0, 0.5)?;
    Ok(LinearMaximumCheck {
        fit,
        population_max,
        relative_error: (fit.covariance_squared - population_max).abs() / population_max,
        split_deviation: (fit.split_point - 0.5).abs(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub beta: f64,
    /// `(N, median |ŝ − 1/2|)` per sample size, in the order given.
    pub median_deviation: Vec<(usize, f64)>,
    /// `None` when the slope is zero and the population maximizer is not unique.
    pub pass: Option<bool>,
}

impl ConvergenceReport {
    pub fn to_check_report(&self) -> CheckReport {
        let mut report = CheckReport::default();
        if self.pass.is_none() {
            report.notes.push("assumption violated: zero slope has no unique optimal split".into());
            return report;
        }
        for w in self.median_deviation.windows(2) {
            let ((n0, d0), (n1, d1)) = (w[0], w[1]);
            report.rows.push(CheckRow {
                check: "thm2".into(),
                instance: format!("n{n0}->n{n1}"),
                lhs: d1,
                rhs: d0,
                margin: d0 - d1,
                pass: d1 <= d0,
            });
        }
        if let Some(&(n, d)) = self.median_deviation.last() {
            if n >= 10_000 {
                report.rows.push(CheckRow {
                    check: "thm2".into(),
                    instance: format!("n{n}"),
                    lhs: d,
                    rhs: 0.05,
                    margin: 0.05 - d,
                    pass: d < 0.05,
                });
            }
        }
        report
    }
}

/// For each sample size, fits `reps` depth-1 CovRT stumps to
/// `y = βx + noise_sd·ε` and records the median of `|ŝ − 1/2|`. Passes when
/// the medians do not increase with `N` and, if the largest `N ≥ 10⁴`, the
/// last median is below 0.05.
pub fn check_thm2_convergence(
    beta: f64,
    noise_sd: f64,
    sample_sizes: &[usize],
    reps: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    if beta == 0.0 {
        return Ok(ConvergenceReport { beta, median_deviation: Vec::new(), pass: None });
    }
    if reps == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let mut median_deviation = Vec::with_capacity(sample_sizes.len());
    for (k, &n) in sample_sizes.iter().enumerate() {
        let base = replication_seed(seed, k as u64);
        let mut deviations = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let fit = linear_stump(beta, noise_sd, n, replication_seed(base, r))?;
                // No split at all counts as the worst possible placement.
                Ok(fit.map_or(0.5, |f| (f.split_point - 0.5).abs()))
            })
            .collect::<Result<Vec<f64>>>()?;
        deviations.sort_by(f64::total_cmp);
        median_deviation.push((n, median_sorted(&deviations)));
    }
    let monotone = median_deviation.windows(2).all(|w| w[1].1 <= w[0].1);
    let small_enough = match median_deviation.last() {
        Some(&(n, d)) if n >= 10_000 => d < 0.05,
        _ => true,
    };
    Ok(ConvergenceReport { beta, median_deviation, pass: Some(monotone && small_enough) })
}

pub(crate) fn median_sorted(values: &[f64]) -> f64 {
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
