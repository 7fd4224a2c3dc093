use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covrt::experiments::{
    format_table1, run_fig_accuracy, run_fig_density, run_fig_overfit, run_table1, run_table2, verify,
    AccuracyConfig, DensityConfig, ExperimentReport, OverfitConfig, RealDataset, Table1Config, Table2Config,
    VerifyCheck, VerifyConfig, TABLE2_DATASETS,
};
use covrt::io::{load_model, read_feature_rows, save_model, write_dataset_csv, write_model};
use covrt::sim::parse_params;
use covrt::{
    evaluate, generate, grow, grow_full, load_csv, prune_to_leaves, select_alpha, CategoricalPolicy, CriterionKind,
    DgpName, DgpSpec, Error, GrowConfig, DEFAULT_MIN_NODE_SIZE,
};

#[derive(Parser)]
#[command(name = "covrt", version, about = "CovRT and CART regression trees")]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replication count, overriding each command's default.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Worker threads for replicated runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a tree on a CSV file and write the model.
    Train(TrainArgs),
    /// Predict every row of a CSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Report L2 risk and R² of a model on a CSV file.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Prune a model to a leaf budget or on validation data.
    Prune(PruneArgs),
    /// Draw a sample from a simulation model.
    Simulate {
        /// model1, model2, model3, model4, overfit5, simple_linear or cubic1d.
        #[arg(long)]
        dgp: String,
        #[arg(long)]
        n: usize,
        /// Model parameter as key=value, e.g. c1=0.5; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Run a replicated experiment and write its report.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Run a numerical check suite; exits 3 on any violation.
    Verify {
        /// prop1, ig-identity, lemma1, thm3, thm1 or thm2.
        check: String,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Headered CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Response column.
    #[arg(long)]
    target: String,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "covrt")]
    criterion: CriterionKind,
    /// Maximum depth; grow until node size or zero gain stops when absent.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MIN_NODE_SIZE)]
    min_node_size: usize,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    model: PathBuf,
    /// Training data the model was grown on.
    #[command(flatten)]
    data: DataArgs,
    /// Keep the largest subtree with at most this many leaves.
    #[arg(long, conflicts_with = "validation")]
    leaves: Option<usize>,
    /// Choose the subtree with the smallest risk on this CSV file.
    #[arg(long, required_unless_present = "leaves")]
    validation: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Train and test risk along the pruning path, 1 to 20 leaves.
    FigOverfit,
    /// Depth-1 split points at three signal strengths.
    FigDensity,
    /// How often a depth-1 tree splits on the signal covariate.
    FigAccuracy,
    /// Fixed-depth and pruned test risk on Models 1 to 4.
    Table1,
    /// Fixed-depth and pruned trees on the benchmark datasets.
    Table2 {
        /// Directory holding boston.csv, airfoil.csv and abalone.csv.
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        /// Subset of datasets to run.
        #[arg(long, value_delimiter = ',')]
        datasets: Vec<RealDataset>,
    },
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(args: &DataArgs) -> covrt::Result<covrt::Dataset> {
    load_csv(&args.data, &args.target, CategoricalPolicy::OneHot)
}

enum Failure {
    Error(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn write_report(report: &ExperimentReport, out: &Option<PathBuf>) -> Result<(), Failure> {
    let mut w = output(out)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Train(args) => {
            let data = load(&args.data)?;
            let tree = match args.depth {
                Some(k) => grow(&data, &GrowConfig::new(args.criterion, k).min_node_size(args.min_node_size).seed(seed))?,
                None => grow_full(&data, args.criterion, args.min_node_size, seed)?,
            };
            save_or_print(&tree, &cli.out)?;
            eprintln!("{} leaves, depth {}, training risk {}", tree.n_leaves(), tree.depth(), tree.training_risk());
        }
        Command::Predict { model, data } => {
            let tree = load_model(&model)?;
            let rows = read_feature_rows(File::open(&data)?, tree.column_names())
                .map_err(|e| with_path(e, &data))?;
            let mut w = output(&cli.out)?;
            writeln!(w, "prediction")?;
            for row in rows {
                writeln!(w, "{}", tree.predict(&row)?)?;
            }
            w.flush()?;
        }
        Command::Evaluate { model, data } => {
            let tree = load_model(&model)?;
            let result = evaluate(&tree, &load(&data)?)?;
            let mut w = output(&cli.out)?;
            writeln!(w, "n,l2_risk,r2\n{},{},{}", result.n, result.l2_risk, result.r_squared)?;
            w.flush()?;
        }
        Command::Prune(args) => {
            let tree = load_model(&args.model)?;
            let train = load(&args.data)?;
            let pruned = match (args.leaves, &args.validation) {
                (Some(leaves), _) => prune_to_leaves(&tree, &train, leaves)?,
                (None, Some(path)) => {
                    let validation = load_csv(path, &args.data.target, CategoricalPolicy::OneHot)?;
                    let selection = select_alpha(&tree, &train, &validation)?;
                    eprintln!("alpha {} validation risk {}", selection.alpha, selection.validation_risk);
                    selection.tree
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            save_or_print(&pruned, &cli.out)?;
            eprintln!("{} leaves", pruned.n_leaves());
        }
        Command::Simulate { dgp, n, params } => {
            let name: DgpName = dgp.parse()?;
            let mut spec = DgpSpec::new(name, n, seed);
            spec.params = parse_params(params.iter().map(String::as_str))?;
            let (data, _) = generate(&spec)?;
            let mut w = output(&cli.out)?;
            write_dataset_csv(&data, &mut w)?;
            w.flush()?;
        }
        Command::Experiment(experiment) => {
            let report = match experiment {
                Experiment::FigOverfit => {
                    let d = OverfitConfig::default();
                    run_fig_overfit(&OverfitConfig { seed, reps: cli.reps.unwrap_or(d.reps), ..d })?
                }
                Experiment::FigDensity => {
                    let d = DensityConfig::default();
                    run_fig_density(&DensityConfig { seed, reps: cli.reps.unwrap_or(d.reps), ..d })?
                }
                Experiment::FigAccuracy => {
                    let d = AccuracyConfig::default();
                    run_fig_accuracy(&AccuracyConfig { seed, reps: cli.reps.unwrap_or(d.reps), ..d })?
                }
                Experiment::Table1 => {
                    let d = Table1Config::default();
                    let config = Table1Config { seed, reps: cli.reps.unwrap_or(d.reps), ..d };
                    let report = run_table1(&config)?;
                    eprint!("{}", format_table1(&report, &config));
                    report
                }
                Experiment::Table2 { data_dir, datasets } => {
                    let chosen = if datasets.is_empty() { TABLE2_DATASETS.to_vec() } else { datasets };
                    let files: Vec<_> = chosen.iter().map(|d| (*d, d.path_in(&data_dir))).collect();
                    let d = Table2Config::default();
                    run_table2(&Table2Config { seed, reps: cli.reps.unwrap_or(d.reps), ..d }, &files)?
                }
            };
            write_report(&report, &cli.out)?;
        }
        Command::Verify { check } => {
            let check: VerifyCheck = check.parse()?;
            let report = verify(check, &VerifyConfig { seed, reps: cli.reps, ..Default::default() })?;
            let mut w = output(&cli.out)?;
            report.write_csv(&mut w)?;
            w.flush()?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            let violations = report.violations();
            eprintln!("{}: {} checks, {violations} violations", check.as_str(), report.rows.len());
            if violations > 0 {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn save_or_print(tree: &covrt::Tree, out: &Option<PathBuf>) -> covrt::Result<()> {
    match out {
        Some(path) => save_model(tree, path),
        None => write_model(tree, io::stdout().lock()),
    }
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv { source, .. } => Error::Csv { path: path.to_path_buf(), source },
        other => other,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(3),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 2 } else { 1 })
        }
    }
}
