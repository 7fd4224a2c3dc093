//! Replicated simulation and benchmark pipelines. Each writes one tidy
//! report row per replication and quantity; means over replications are
//! appended when the report is written.
//!
//! Replication `r` of an experiment seeded with `s` draws everything from
//! `replication_seed(s, r)`, so runs are reproducible regardless of how
//! replications are scheduled across threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::data::{CriterionKind, Dataset, NodeKind, Tree};
use crate::error::{Error, Result};
use crate::eval::{empirical_l2_risk, evaluate};
use crate::grow::{grow, grow_full, GrowConfig, DEFAULT_MIN_NODE_SIZE};
use crate::io::{load_csv, split_dataset, CategoricalPolicy};
use crate::prune::{prune_sequence, select_alpha, subtree_index_for_leaves};
use crate::sim::{generate, replication_seed, DgpName, DgpSpec};
use crate::theory::{
    check_lemma1, check_thm1, check_thm2_convergence, check_thm3, verify_ig_identity, verify_prop1, CheckReport,
    CheckRow, MARGIN_TOLERANCE,
};

/// `depth_or_leaves` for rows whose size was chosen per replication.
pub const SELECTED: i64 = -1;

/// `replication` of the mean rows appended at emit time.
pub const AGGREGATE: i64 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub dataset: String,
    pub method: String,
    pub depth_or_leaves: i64,
    pub metric: String,
    pub value: f64,
    pub replication: i64,
    pub seed: u64,
}

/// (experiment, dataset, method, depth_or_leaves, metric)
type GroupKey<'a> = (&'a str, &'a str, &'a str, i64, &'a str);

impl ReportRow {
    fn key(&self) -> GroupKey<'_> {
        (&self.experiment, &self.dataset, &self.method, self.depth_or_leaves, &self.metric)
    }
}

/// Raw rows of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

pub const REPORT_HEADER: [&str; 8] =
    ["experiment", "dataset", "method", "depth_or_leaves", "metric", "value", "replication", "seed"];

impl ExperimentReport {
    fn from_rows(experiment: &str, seed: u64, mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by(|a, b| a.key().cmp(&b.key()).then(a.replication.cmp(&b.replication)));
        Self { experiment: experiment.to_string(), seed, rows }
    }

    /// Mean of each (dataset, method, depth_or_leaves, metric) group, in key order.
    pub fn means(&self) -> Vec<ReportRow> {
        let mut groups: BTreeMap<GroupKey<'_>, (f64, usize)> = BTreeMap::new();
        for row in &self.rows {
            let entry = groups.entry(row.key()).or_default();
            entry.0 += row.value;
            entry.1 += 1;
        }
        groups
            .into_iter()
            .map(|((experiment, dataset, method, depth_or_leaves, metric), (sum, count))| ReportRow {
                experiment: experiment.to_string(),
                dataset: dataset.to_string(),
                method: method.to_string(),
                depth_or_leaves,
                metric: metric.to_string(),
                value: sum / count as f64,
                replication: AGGREGATE,
                seed: self.seed,
            })
            .collect()
    }

    /// Mean over replications of one group, if present.
    pub fn mean(&self, dataset: &str, method: &str, depth_or_leaves: i64, metric: &str) -> Option<f64> {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.key() == (&self.experiment, dataset, method, depth_or_leaves, metric))
            .map(|r| r.value)
            .collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    /// Raw values of one group in replication order.
    pub fn values(&self, dataset: &str, method: &str, depth_or_leaves: i64, metric: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.key() == (&self.experiment, dataset, method, depth_or_leaves, metric))
            .map(|r| r.value)
            .collect()
    }

    /// Raw rows followed by the per-group means.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(REPORT_HEADER).map_err(io)?;
        for row in self.rows.iter().chain(&self.means()) {
            w.write_record([
                row.experiment.as_str(),
                &row.dataset,
                &row.method,
                &row.depth_or_leaves.to_string(),
                &row.metric,
                &row.value.to_string(),
                &row.replication.to_string(),
                &row.seed.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// `covrt_fixed_depth`, `cart_pruned`, ...
pub fn method_name(criterion: CriterionKind, pruned: bool) -> String {
    format!("{criterion}_{}", if pruned { "pruned" } else { "fixed_depth" })
}

struct RowSink<'a> {
    experiment: &'a str,
    replication: i64,
    seed: u64,
    rows: Vec<ReportRow>,
}

impl<'a> RowSink<'a> {
    fn new(experiment: &'a str, replication: u64, seed: u64) -> Self {
        Self { experiment, replication: replication as i64, seed, rows: Vec::new() }
    }

    fn push(&mut self, dataset: &str, method: &str, depth_or_leaves: i64, metric: &str, value: f64) {
        self.rows.push(ReportRow {
            experiment: self.experiment.to_string(),
            dataset: dataset.to_string(),
            method: method.to_string(),
            depth_or_leaves,
            metric: metric.to_string(),
            value,
            replication: self.replication,
            seed: self.seed,
        });
    }
}

fn replicate<F>(experiment: &str, seed: u64, reps: usize, f: F) -> Result<ExperimentReport>
where
    F: Fn(&mut RowSink<'_>, u64) -> Result<()> + Sync,
{
    let rows = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep_seed = replication_seed(seed, r);
            let mut sink = RowSink::new(experiment, r, rep_seed);
            f(&mut sink, rep_seed)?;
            Ok(sink.rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::from_rows(experiment, seed, rows.into_iter().flatten().collect()))
}

const BOTH: [CriterionKind; 2] = [CriterionKind::Covrt, CriterionKind::Cart];
const ALL_THREE: [CriterionKind; 3] = [CriterionKind::Covrt, CriterionKind::Cart, CriterionKind::Random];

fn stump(data: &Dataset, criterion: CriterionKind, seed: u64) -> Result<Option<(usize, f64)>> {
    let tree = grow(data, &GrowConfig::new(criterion, 1).seed(seed))?;
    Ok(match tree.root().kind {
        NodeKind::Internal { feature, threshold, .. } => Some((feature, threshold)),
        NodeKind::Leaf => None,
    })
}

/// Train/test risk along the pruning path of fully grown trees.
#[derive(Debug, Clone, PartialEq)]
pub struct OverfitConfig {
    pub seed: u64,
    pub reps: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub max_leaves: usize,
    /// Scale of the signal coefficients.
    pub beta: f64,
    pub min_node_size: usize,
}

impl Default for OverfitConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            reps: 500,
            n_train: 3000,
            n_test: 3000,
            max_leaves: 20,
            beta: 1.0,
            min_node_size: DEFAULT_MIN_NODE_SIZE,
        }
    }
}

/// Rows: `l2_risk` on datasets `overfit5/train` and `overfit5/test`, and
/// `gap` on `overfit5`, for every leaf count `1..=max_leaves`.
pub fn run_fig_overfit(config: &OverfitConfig) -> Result<ExperimentReport> {
    replicate("fig-overfit", config.seed, config.reps, |sink, seed| {
        let spec = |n, k| DgpSpec::new(DgpName::Overfit5, n, replication_seed(seed, k)).with("beta", config.beta);
        let (train, _) = generate(&spec(config.n_train, 0))?;
        let (test, _) = generate(&spec(config.n_test, 1))?;
        for criterion in BOTH {
            let tree = grow_full(&train, criterion, config.min_node_size, seed)?;
            let seq = prune_sequence(&tree, &train)?;
            let method = method_name(criterion, true);
            for leaves in 1..=config.max_leaves {
                let pruned = seq.subtree(&tree, subtree_index_for_leaves(&seq, leaves));
                let train_risk = empirical_l2_risk(&pruned, &train)?;
                let test_risk = empirical_l2_risk(&pruned, &test)?;
                let l = leaves as i64;
                sink.push("overfit5/train", &method, l, "l2_risk", train_risk);
                sink.push("overfit5/test", &method, l, "l2_risk", test_risk);
                sink.push("overfit5", &method, l, "gap", test_risk - train_risk);
            }
        }
        Ok(())
    })
}

/// Depth-1 split points on `y = c0 + c1 x + ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityConfig {
    pub seed: u64,
    pub reps: usize,
    pub n: usize,
    pub c0: f64,
    pub c1_values: Vec<f64>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self { seed: 0, reps: 5000, n: 200, c0: 1.0, c1_values: vec![0.0, 0.5, 1.0] }
    }
}

/// Dataset label of one signal strength, e.g. `simple_linear/c1=0.5`.
pub fn signal_label(c1: f64) -> String {
    format!("simple_linear/c1={c1}")
}

/// Rows: `split_point` per method and signal strength.
pub fn run_fig_density(config: &DensityConfig) -> Result<ExperimentReport> {
    replicate("fig-density", config.seed, config.reps, |sink, seed| {
        for (k, &c1) in config.c1_values.iter().enumerate() {
            let draw_seed = replication_seed(seed, k as u64);
            let (data, _) = generate(&DgpSpec::simple_linear(config.c0, c1, config.n, draw_seed))?;
            for criterion in ALL_THREE {
                if let Some((_, s)) = stump(&data, criterion, draw_seed)? {
                    sink.push(&signal_label(c1), &method_name(criterion, false), 1, "split_point", s);
                }
            }
        }
        Ok(())
    })
}

/// Which covariate a depth-1 tree splits on when only `x1` carries signal.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyConfig {
    pub seed: u64,
    pub reps: usize,
    pub n: usize,
    pub c0: f64,
    pub c1_values: Vec<f64>,
    pub noise_covariates: usize,
}

impl Default for AccuracyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            reps: 5000,
            n: 200,
            c0: 1.0,
            c1_values: (0..=10).map(|k| k as f64 / 10.0).collect(),
            noise_covariates: 4,
        }
    }
}

/// Rows: `accuracy` (1 if the root split uses `x1`, else 0) per method and
/// signal strength; the appended means are the selection accuracies.
pub fn run_fig_accuracy(config: &AccuracyConfig) -> Result<ExperimentReport> {
    replicate("fig-accuracy", config.seed, config.reps, |sink, seed| {
        for (k, &c1) in config.c1_values.iter().enumerate() {
            let draw_seed = replication_seed(seed, k as u64);
            let spec = DgpSpec::simple_linear(config.c0, c1, config.n, draw_seed)
                .with("noise_covariates", config.noise_covariates as f64);
            let (data, _) = generate(&spec)?;
            for criterion in ALL_THREE {
                let hit = stump(&data, criterion, draw_seed)?.is_some_and(|(j, _)| j == 0);
                sink.push(&signal_label(c1), &method_name(criterion, false), 1, "accuracy", f64::from(u8::from(hit)));
            }
        }
        Ok(())
    })
}

/// Test risk of fixed-depth and validation-pruned trees on Models 1–4.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Config {
    pub seed: u64,
    pub reps: usize,
    pub models: Vec<DgpName>,
    pub depths: Vec<usize>,
    pub n_train: usize,
    pub n_validation: usize,
    pub n_test: usize,
    pub min_node_size: usize,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            seed: 0,
            reps: 500,
            models: vec![DgpName::Model1, DgpName::Model2, DgpName::Model3, DgpName::Model4],
            depths: vec![3, 4, 5, 6],
            n_train: 300,
            n_validation: 300,
            n_test: 1000,
            min_node_size: DEFAULT_MIN_NODE_SIZE,
        }
    }
}

/// Rows: test `l2_risk` per model, method and depth; pruned trees use
/// `depth_or_leaves = -1`.
pub fn run_table1(config: &Table1Config) -> Result<ExperimentReport> {
    replicate("table1", config.seed, config.reps, |sink, seed| {
        for (m, &model) in config.models.iter().enumerate() {
            let draw = |n, k: u64| generate(&DgpSpec::new(model, n, replication_seed(seed, 3 * m as u64 + k)));
            let (train, _) = draw(config.n_train, 0)?;
            let (validation, _) = draw(config.n_validation, 1)?;
            let (test, _) = draw(config.n_test, 2)?;
            for criterion in BOTH {
                for &depth in &config.depths {
                    let cfg = GrowConfig::new(criterion, depth).min_node_size(config.min_node_size);
                    let tree = grow(&train, &cfg)?;
                    let risk = empirical_l2_risk(&tree, &test)?;
                    sink.push(model.as_str(), &method_name(criterion, false), depth as i64, "l2_risk", risk);
                }
                let full = grow_full(&train, criterion, config.min_node_size, seed)?;
                let selected = select_alpha(&full, &train, &validation)?;
                let risk = empirical_l2_risk(&selected.tree, &test)?;
                sink.push(model.as_str(), &method_name(criterion, true), SELECTED, "l2_risk", risk);
            }
        }
        Ok(())
    })
}

/// Mean test risks of a [`run_table1`] report laid out as a text table.
pub fn format_table1(report: &ExperimentReport, config: &Table1Config) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    let mut out = String::new();
    let _ = writeln!(out, "{:<8}{:>4}{:>9}{:>9}{:>14}{:>14}", "model", "K", "covrt", "cart", "pruned covrt", "pruned cart");
    for model in &config.models {
        for (i, &k) in config.depths.iter().enumerate() {
            let pruned = |c| if i == 0 { cell(report.mean(model.as_str(), &method_name(c, true), SELECTED, "l2_risk")) } else { String::new() };
            let _ = writeln!(
                out,
                "{:<8}{:>4}{:>9}{:>9}{:>14}{:>14}",
                if i == 0 { model.as_str() } else { "" },
                k,
                cell(report.mean(model.as_str(), &method_name(CriterionKind::Covrt, false), k as i64, "l2_risk")),
                cell(report.mean(model.as_str(), &method_name(CriterionKind::Cart, false), k as i64, "l2_risk")),
                pruned(CriterionKind::Covrt),
                pruned(CriterionKind::Cart),
            );
        }
    }
    out
}

/// A benchmark dataset expected as a headered CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealDataset {
    pub name: &'static str,
    pub file: &'static str,
    pub target: &'static str,
    /// Where to get the data and how to shape it.
    pub fetch: &'static str,
}

pub const BOSTON: RealDataset = RealDataset {
    name: "boston",
    file: "boston.csv",
    target: "medv",
    fetch: "export the Boston Housing data (506 rows, e.g. R's MASS::Boston) as CSV with header \
            crim,zn,indus,chas,nox,rm,age,dis,rad,tax,ptratio,black,lstat,medv",
};

pub const AIRFOIL: RealDataset = RealDataset {
    name: "airfoil",
    file: "airfoil.csv",
    target: "sound_pressure",
    fetch: "download airfoil_self_noise.dat from the UCI Machine Learning Repository (1503 rows, \
            tab-separated) and save it comma-separated with header \
            frequency,angle,chord,velocity,thickness,sound_pressure",
};

pub const ABALONE: RealDataset = RealDataset {
    name: "abalone",
    file: "abalone.csv",
    target: "rings",
    fetch: "download abalone.data from the UCI Machine Learning Repository (4177 rows) and prepend the header \
            sex,length,diameter,height,whole_weight,shucked_weight,viscera_weight,shell_weight,rings",
};

pub const TABLE2_DATASETS: [RealDataset; 3] = [BOSTON, AIRFOIL, ABALONE];

impl FromStr for RealDataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TABLE2_DATASETS
            .into_iter()
            .find(|d| d.name.eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown { kind: "dataset", name: s.to_string() })
    }
}

impl RealDataset {
    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(self.file)
    }

    /// Loads the file, or explains how to obtain it.
    pub fn load(&self, path: &Path) -> Result<Dataset> {
        if !path.is_file() {
            return Err(Error::MissingDataset { path: path.to_path_buf(), hint: self.fetch.to_string() });
        }
        load_csv(path, self.target, CategoricalPolicy::OneHot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Config {
    pub seed: u64,
    /// Number of random 2:1:1 partitions.
    pub reps: usize,
    /// Candidate depths for the fixed-depth trees, chosen on validation data.
    pub depths: Vec<usize>,
    pub min_node_size: usize,
}

impl Default for Table2Config {
    fn default() -> Self {
        Self { seed: 0, reps: 100, depths: (1..=10).collect(), min_node_size: DEFAULT_MIN_NODE_SIZE }
    }
}

/// Rows: test `l2_risk` and `r2` per dataset and method. Fixed-depth trees
/// take the depth with the smallest validation risk (ties to the shallower);
/// pruned trees are grown fully and pruned on the validation part.
pub fn run_table2(config: &Table2Config, datasets: &[(RealDataset, PathBuf)]) -> Result<ExperimentReport> {
    if config.depths.is_empty() {
        return Err(Error::invalid("no candidate depths"));
    }
    let loaded = datasets
        .iter()
        .map(|(spec, path)| Ok((spec.name, spec.load(path)?)))
        .collect::<Result<Vec<_>>>()?;
    replicate("table2", config.seed, config.reps, |sink, seed| {
        for (d, (name, data)) in loaded.iter().enumerate() {
            let (train, validation, test) = split_dataset(data, [2.0, 1.0, 1.0], replication_seed(seed, d as u64))?;
            for criterion in BOTH {
                let mut best: Option<(f64, Tree)> = None;
                for &depth in &config.depths {
                    let tree = grow(&train, &GrowConfig::new(criterion, depth).min_node_size(config.min_node_size))?;
                    let risk = empirical_l2_risk(&tree, &validation)?;
                    if best.as_ref().is_none_or(|(r, _)| risk < *r) {
                        best = Some((risk, tree));
                    }
                }
                let (_, fixed) = best.expect("at least one depth");
                let full = grow_full(&train, criterion, config.min_node_size, seed)?;
                let pruned = select_alpha(&full, &train, &validation)?.tree;
                for (tree, is_pruned) in [(fixed, false), (pruned, true)] {
                    let result = evaluate(&tree, &test)?;
                    let method = method_name(criterion, is_pruned);
                    sink.push(name, &method, SELECTED, "l2_risk", result.l2_risk);
                    sink.push(name, &method, SELECTED, "r2", result.r_squared);
                }
            }
        }
        Ok(())
    })
}

/// Named check suites for `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyCheck {
    Prop1,
    IgIdentity,
    Lemma1,
    Thm3,
    Thm1,
    Thm2,
}

impl VerifyCheck {
    pub const ALL: [VerifyCheck; 6] = [
        VerifyCheck::Prop1,
        VerifyCheck::IgIdentity,
        VerifyCheck::Lemma1,
        VerifyCheck::Thm3,
        VerifyCheck::Thm1,
        VerifyCheck::Thm2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerifyCheck::Prop1 => "prop1",
            VerifyCheck::IgIdentity => "ig-identity",
            VerifyCheck::Lemma1 => "lemma1",
            VerifyCheck::Thm3 => "thm3",
            VerifyCheck::Thm1 => "thm1",
            VerifyCheck::Thm2 => "thm2",
        }
    }

    /// Default replication count: fuzzed nodes, seeds per model, or stumps
    /// per sample size.
    pub fn default_reps(self) -> usize {
        match self {
            VerifyCheck::Prop1 | VerifyCheck::IgIdentity => 1000,
            VerifyCheck::Lemma1 | VerifyCheck::Thm3 => 100,
            VerifyCheck::Thm1 => 1,
            VerifyCheck::Thm2 => 200,
        }
    }
}

impl FromStr for VerifyCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VerifyCheck::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "check", name: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides [`VerifyCheck::default_reps`].
    pub reps: Option<usize>,
    /// Training size for the bound suites.
    pub n: usize,
    /// Largest depth `K` for the bound suites.
    pub max_depth: usize,
    /// Node size limit for the bound suites.
    pub min_node_size: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, reps: None, n: 300, max_depth: 6, min_node_size: 1 }
    }
}

const BOUND_MODELS: [DgpName; 4] = [DgpName::Model1, DgpName::Model2, DgpName::Model3, DgpName::Model4];

/// Runs one check suite; the report passes iff it has no violations.
pub fn verify(check: VerifyCheck, config: &VerifyConfig) -> Result<CheckReport> {
    let reps = config.reps.unwrap_or(check.default_reps());
    match check {
        VerifyCheck::Prop1 => verify_prop1(reps, config.seed),
        VerifyCheck::IgIdentity => verify_ig_identity(reps, config.seed),
        VerifyCheck::Lemma1 | VerifyCheck::Thm3 => bound_suite(check, config, reps),
        VerifyCheck::Thm1 => {
            let mut report = CheckReport::default();
            for r in 0..reps as u64 {
                let c = check_thm1(1.0, 100_000, replication_seed(config.seed, r))?;
                report.rows.push(CheckRow {
                    check: "thm1".into(),
                    instance: format!("seed{r}/max_cs"),
                    lhs: c.fit.covariance_squared,
                    rhs: c.population_max,
                    margin: 0.05 - c.relative_error,
                    pass: c.relative_error <= 0.05,
                });
                report.rows.push(CheckRow {
                    check: "thm1".into(),
                    instance: format!("seed{r}/split_point"),
                    lhs: c.fit.split_point,
                    rhs: 0.5,
                    margin: 0.02 - c.split_deviation,
                    pass: c.split_deviation <= 0.02,
                });
            }
            Ok(report)
        }
        VerifyCheck::Thm2 => {
            Ok(check_thm2_convergence(1.0, 1.0, &[100, 1000, 10_000], reps, config.seed)?.to_check_report())
        }
    }
}

fn bound_suite(check: VerifyCheck, config: &VerifyConfig, reps: usize) -> Result<CheckReport> {
    let jobs: Vec<(DgpName, u64)> =
        BOUND_MODELS.iter().flat_map(|&m| (0..reps as u64).map(move |r| (m, r))).collect();
    let parts = jobs
        .into_par_iter()
        .map(|(model, r)| {
            let (data, g) = generate(&DgpSpec::new(model, config.n, replication_seed(config.seed, r)))?;
            let mut report = CheckReport::default();
            for depth in 1..=config.max_depth {
                let instance = format!("{model}/K{depth}/seed{r}");
                if check == VerifyCheck::Lemma1 {
                    let cfg = GrowConfig::new(CriterionKind::Covrt, depth - 1).min_node_size(config.min_node_size);
                    let prefix = grow(&data, &cfg)?;
                    report.extend(check_lemma1(&prefix, &data, &g)?.to_check_report(&instance));
                } else {
                    let b = check_thm3(&data, &g, depth, config.min_node_size)?;
                    report.rows.push(CheckRow {
                        check: "thm3".into(),
                        instance,
                        lhs: b.tree_risk,
                        rhs: b.bound,
                        margin: b.margin,
                        pass: b.margin >= -MARGIN_TOLERANCE,
                    });
                }
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::default();
    for part in parts {
        report.extend(part);
    }
    Ok(report)
}
