//! Command-line front end: synthesize datasets, run online experiments,
//! verify recorded runs, evaluate regret bounds, and summarize datasets.
//!
//! Exit codes: 0 on success, 1 on runtime failure (I/O, bad data, or a
//! failed verification check), 2 on usage errors (clap's default).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use scinol::analysis::{
    check_core_ineq_1, check_core_ineq_2, check_delta_bound, check_per_trial, grid_points,
    linearized_regret, random_points, reports_to_json, scinol1_regret_bound,
    scinol2_regret_bound, CheckReport,
};
use scinol::data::{
    dataset_stats, gen_toy, parse_csv, parse_libsvm, write_libsvm, Dataset, LabelKind,
    ToySidecar, ToySpec,
};
use scinol::harness::{metrics_to_csv, run_experiment, ExperimentConfig};
use scinol::history::{LearnerKind, RunHistory};
use scinol::loss::Loss;

/// Range of the potential argument v = G/Ŝ covered by the inequality checks;
/// |q| ≤ 1 always, and |v| grows like the worst-case gradient sum ratio.
const V_RANGE: (f64, f64) = (-20.0, 20.0);
const CORE_TOL: f64 = 1e-12;
const PER_TRIAL_TOL: f64 = 1e-9;
const DELTA_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "scinol",
    version,
    about = "Scale-invariant online learners for linear models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic mixed-scale binary dataset (LibSVM format).
    Synth(SynthArgs),
    /// Train a learner online, writing metrics and optionally a trial history.
    Run(RunArgs),
    /// Check the numeric invariants of a recorded run.
    Verify(VerifyArgs),
    /// Evaluate the regret bound of a recorded run against a comparator.
    Bound(BoundArgs),
    /// Summarize a dataset file.
    Stats(StatsArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Training examples to draw.
    #[arg(long, default_value_t = 5000)]
    train: usize,
    /// Test examples to draw.
    #[arg(long, default_value_t = 100_000)]
    test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the training split.
    #[arg(long)]
    out_train: PathBuf,
    /// Output path for the test split.
    #[arg(long)]
    out_test: PathBuf,
    /// Optional JSON sidecar recording the generator spec and true weights.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Training data file.
    #[arg(long)]
    train: PathBuf,
    /// Held-out scoring split; without it the training file is scored.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, value_enum)]
    learner: LearnerArg,
    #[arg(long, value_enum, default_value_t = LossArg::Logistic)]
    loss: LossArg,
    /// Class count, required for --loss cross-entropy.
    #[arg(long)]
    classes: Option<usize>,
    /// Wealth floor for scinol1/scinol2.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Learning rate for the baselines.
    #[arg(long)]
    eta: Option<f64>,
    /// JSON array of per-coordinate rates for --learner ogd
    /// (the global --eta then defaults to 1 and is unused).
    #[arg(long)]
    rates: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials between test scorings.
    #[arg(long, default_value_t = 50)]
    metric_every: usize,
    /// Where to write the metrics table (CSV).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Where to write the full trial history (JSON); enables recording.
    #[arg(long)]
    history: Option<PathBuf>,
    /// JSON comparator weights; adds the cum_regret metrics column.
    #[arg(long)]
    comparator: Option<PathBuf>,
    /// Restart trial clocks at each epoch boundary.
    #[arg(long)]
    reset_t_per_epoch: bool,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Recorded run to check.
    #[arg(long)]
    history: PathBuf,
    /// Grid density NxM for the two core inequality checks.
    #[arg(long, default_value = "200x200")]
    grid: String,
    /// Random (v, q) pairs added on top of the grid.
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Recorded run to evaluate.
    #[arg(long)]
    history: PathBuf,
    /// JSON comparator weights (a bare array, or an object with a "u" field).
    #[arg(long)]
    comparator: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// Dataset file to summarize.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    format: FormatArgs,
}

/// Input format options shared by commands that read dataset files.
#[derive(Args)]
struct FormatArgs {
    /// auto picks csv for .csv files and libsvm otherwise.
    #[arg(long, value_enum, default_value_t = FileFormat::Auto)]
    format: FileFormat,
    /// Label column for CSV input, 1-based (default: last column).
    #[arg(long)]
    label_column: Option<usize>,
    /// Treat the first CSV row as a header.
    #[arg(long)]
    has_header: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Auto,
    Libsvm,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LearnerArg {
    Scinol1,
    Scinol2,
    Sgd,
    Ogd,
    Adagrad,
    Adam,
}

impl From<LearnerArg> for LearnerKind {
    fn from(a: LearnerArg) -> Self {
        match a {
            LearnerArg::Scinol1 => LearnerKind::Scinol1,
            LearnerArg::Scinol2 => LearnerKind::Scinol2,
            LearnerArg::Sgd => LearnerKind::Sgd,
            LearnerArg::Ogd => LearnerKind::Ogd,
            LearnerArg::Adagrad => LearnerKind::Adagrad,
            LearnerArg::Adam => LearnerKind::Adam,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossArg {
    Logistic,
    Hinge,
    Absolute,
    CrossEntropy,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Run(args) => run_run(args),
        Command::Verify(args) => run_verify(args),
        Command::Bound(args) => run_bound(args),
        Command::Stats(args) => run_stats(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run_synth(args: SynthArgs) -> Result<ExitCode> {
    let spec = ToySpec {
        n_train: args.train,
        n_test: args.test,
        seed: args.seed,
    };
    let (train, test, u) = gen_toy(&spec)?;
    write_file(&args.out_train, &write_libsvm(&train))?;
    write_file(&args.out_test, &write_libsvm(&test))?;
    if let Some(path) = &args.sidecar {
        let sidecar = ToySidecar { spec, u };
        write_file(path, &serde_json::to_string_pretty(&sidecar)?)?;
    }
    println!("train: {} examples -> {}", train.len(), args.out_train.display());
    println!("test: {} examples -> {}", test.len(), args.out_test.display());
    Ok(ExitCode::SUCCESS)
}

fn run_run(args: RunArgs) -> Result<ExitCode> {
    let train = load_dataset(&args.train, &args.format)?;
    let test = match &args.test {
        Some(path) => load_dataset(path, &args.format)?,
        None => train.clone(),
    };

    let loss = match args.loss {
        LossArg::Logistic => Loss::Logistic,
        LossArg::Hinge => Loss::Hinge,
        LossArg::Absolute => Loss::Absolute,
        LossArg::CrossEntropy => {
            let classes = args
                .classes
                .context("--loss cross-entropy requires --classes")?;
            Loss::CrossEntropy { classes }
        }
    };
    if args.classes.is_some() && args.loss != LossArg::CrossEntropy {
        bail!("--classes only applies to --loss cross-entropy");
    }

    let mut cfg = ExperimentConfig::new(args.learner.into(), loss);
    cfg.epsilon = args.epsilon;
    cfg.eta = args.eta;
    cfg.epochs = args.epochs;
    cfg.seed = args.seed;
    cfg.metric_every = args.metric_every;
    cfg.record_history = args.history.is_some();
    cfg.reset_t_per_epoch = args.reset_t_per_epoch;
    if let Some(path) = &args.rates {
        let text = read_file(path)?;
        let rates: Vec<f64> = serde_json::from_str(&text)
            .with_context(|| format!("parsing per-dim rates from {}", path.display()))?;
        cfg.eta_per_dim = Some(rates);
        cfg.eta = cfg.eta.or(Some(1.0));
    }

    let comparator = match &args.comparator {
        Some(path) => Some(read_comparator(path)?),
        None => None,
    };

    let outcome = run_experiment(&cfg, &train, &test, comparator.as_deref())?;

    if let Some(path) = &args.metrics {
        write_file(path, &metrics_to_csv(&outcome.metrics))?;
    }
    if let Some(path) = &args.history {
        let hist = outcome
            .history
            .as_ref()
            .expect("recording was enabled for this run");
        hist.save(path)?;
    }

    println!("trials: {}", train.len() * cfg.epochs);
    if let Some(last) = outcome.metrics.last() {
        println!("final_avg_test_loss: {}", last.avg_test_loss);
        println!("final_test_accuracy: {}", last.test_accuracy);
        println!("final_cum_train_loss: {}", last.cum_train_loss);
        if let Some(r) = last.cum_regret {
            println!("final_cum_regret: {r}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode> {
    let hist = RunHistory::load(&args.history)
        .with_context(|| format!("loading {}", args.history.display()))?;
    hist.validate()
        .context("history is internally inconsistent")?;

    let (nv, nq) = parse_grid(&args.grid)?;
    let mut pts = grid_points(V_RANGE, (-1.0, 1.0), nv, nq);
    pts.extend(random_points(args.points, args.seed, V_RANGE));

    let mut reports = Vec::new();
    reports.push(CheckReport::new(
        "core_inequality_1",
        pts.len(),
        check_core_ineq_1(&pts)?,
        CORE_TOL,
    ));
    reports.push(CheckReport::new(
        "core_inequality_2",
        pts.len(),
        check_core_ineq_2(&pts)?,
        CORE_TOL,
    ));

    let kind = hist.config.learner;
    if !kind.is_scale_invariant() {
        bail!(
            "per-trial verification applies to scinol1/scinol2 runs, not {}",
            kind.name()
        );
    }
    let eps = hist
        .config
        .epsilon
        .context("history config is missing epsilon")?;
    let progress = check_per_trial(&hist, kind, eps)?;
    reports.push(CheckReport::new(
        "per_trial_progress",
        progress.points,
        progress.max_violation,
        PER_TRIAL_TOL,
    ));
    let delta = check_delta_bound(&hist)?;
    reports.push(CheckReport::new(
        "delta_log_bound",
        delta.coords.len(),
        delta.max_violation,
        DELTA_TOL,
    ));

    for report in &reports {
        println!("{}", report.line());
    }
    if let Some(path) = &args.json {
        write_file(path, &reports_to_json(&reports))?;
    }
    if reports.iter().all(|r| r.pass) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn run_bound(args: BoundArgs) -> Result<ExitCode> {
    let hist = RunHistory::load(&args.history)
        .with_context(|| format!("loading {}", args.history.display()))?;
    hist.validate()
        .context("history is internally inconsistent")?;
    let u = read_comparator(&args.comparator)?;

    let eps = hist
        .config
        .epsilon
        .context("history config is missing epsilon")?;
    let bound = match hist.config.learner {
        LearnerKind::Scinol1 => scinol1_regret_bound(&u, &hist, eps)?,
        LearnerKind::Scinol2 => scinol2_regret_bound(&u, &hist, eps)?,
        other => bail!(
            "regret bounds only exist for scinol1/scinol2 runs, not {}",
            other.name()
        ),
    };
    let regret = linearized_regret(&hist, &u)?;

    println!("learner: {}", hist.config.learner.name());
    println!("trials: {}", hist.trials.len());
    println!("linearized_regret: {}", regret.linearized);
    if let Some(t) = regret.true_loss {
        println!("true_regret: {t}");
    }
    println!("regret_bound: {bound}");
    println!("within_bound: {}", regret.linearized <= bound);
    Ok(ExitCode::SUCCESS)
}

fn run_stats(args: StatsArgs) -> Result<ExitCode> {
    let data = load_dataset(&args.data, &args.format)?;
    let stats = dataset_stats(&data);
    println!("records: {}", stats.records);
    println!("features: {}", stats.features);
    println!("classes: {}", stats.classes);
    println!(
        "label_kind: {}",
        match stats.label_kind {
            LabelKind::Binary => "binary",
            LabelKind::Class => "class",
            LabelKind::Real => "real",
        }
    );
    println!("scale_ratio: {}", stats.scale_ratio);
    Ok(ExitCode::SUCCESS)
}

fn load_dataset(path: &Path, format: &FormatArgs) -> Result<Dataset> {
    let text = read_file(path)?;
    let csv = match format.format {
        FileFormat::Csv => true,
        FileFormat::Libsvm => false,
        FileFormat::Auto => path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    };
    let data = if csv {
        // The parser takes a 0-based label column.
        let label_column = match format.label_column {
            Some(0) => bail!("--label-column is 1-based"),
            Some(c) => Some(c - 1),
            None => None,
        };
        parse_csv(&text, label_column, format.has_header)
    } else {
        parse_libsvm(&text)
    };
    data.with_context(|| format!("parsing {}", path.display()))
}

/// Comparator weights from JSON: either a bare array or an object with a
/// "u" field (the synth sidecar shape).
fn read_comparator(path: &Path) -> Result<Vec<f64>> {
    let text = read_file(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    let array = match &value {
        serde_json::Value::Array(_) => Some(value.clone()),
        serde_json::Value::Object(map) => map.get("u").cloned(),
        _ => None,
    };
    let array = array
        .with_context(|| format!("{}: expected a JSON array or an object with a \"u\" field", path.display()))?;
    let u: Vec<f64> = serde_json::from_value(array)
        .with_context(|| format!("{}: comparator entries must be numbers", path.display()))?;
    Ok(u)
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let parse = |s: &str| -> Result<usize> {
        let n: usize = s.parse().with_context(|| format!("bad grid size {s:?}"))?;
        if n < 2 {
            bail!("grid sides must be at least 2, got {n}");
        }
        Ok(n)
    };
    match text.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => bail!("--grid expects NxM, e.g. 200x200, got {text:?}"),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
