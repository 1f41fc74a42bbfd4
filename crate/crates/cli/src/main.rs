//! Command-line front end: train, predict, evaluate, cross-validate and
//! inspect models. Exit codes: 0 success, 1 usage or validation error,
//! 2 runtime error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use capmine::dataset::{self, Dataset, ItemId, LabelPosition, Transaction};
use capmine::ensemble::{Consolidation, Model, TrainConfig};
use capmine::eval::{crossval, evaluate_split, EvalResult};
use capmine::oracle;
use capmine::predict::{score_report, AggregateFn, Measure, VotingParams};
use capmine::{ExtractionParams, Result};

#[derive(Parser)]
#[command(name = "capmine", version, about = "Associative classifier on CAP-tree rule mining")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it to a file.
    Train(TrainArgs),
    /// Score records with a trained model.
    Predict(PredictArgs),
    /// Train/test evaluation on a single holdout split.
    Eval(EvalArgs),
    /// K-fold cross-validation.
    Crossval(CrossvalArgs),
    /// Print a model file in readable form.
    Inspect(InspectArgs),
    /// Exhaustive CAR mining by brute force (debugging aid).
    #[command(hide = true)]
    MineOracle(MineOracleArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input data file.
    #[arg(long)]
    input: PathBuf,

    /// Input layout.
    #[arg(long, value_enum, default_value_t = Format::Transactions)]
    format: Format,

    /// Label token position in transaction files.
    #[arg(long, value_enum, default_value_t = LabelPos::Last)]
    label_position: LabelPos,

    /// Column separator for tabular files.
    #[arg(long, default_value_t = ',')]
    separator: char,

    /// Zero-based label column for tabular files.
    #[arg(long, default_value_t = 0)]
    label_column: usize,

    /// Cell value treated as missing in tabular files.
    #[arg(long, default_value = "")]
    null_token: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Transactions,
    Tabular,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LabelPos {
    First,
    Last,
}

impl From<LabelPos> for LabelPosition {
    fn from(v: LabelPos) -> Self {
        match v {
            LabelPos::First => LabelPosition::First,
            LabelPos::Last => LabelPosition::Last,
        }
    }
}

#[derive(Args, Clone)]
struct TrainParamsArgs {
    /// Minimum rule support.
    #[arg(long, default_value_t = 0.01)]
    minsup: f64,

    /// Minimum rule confidence.
    #[arg(long, default_value_t = 0.5)]
    minconf: f64,

    /// Minimum rule chi-squared (3.841 is the 1-df critical value at p=0.05).
    #[arg(long, default_value_t = 3.841)]
    minchi2: f64,

    /// Number of bagging partitions.
    #[arg(long, default_value_t = 1)]
    partitions: usize,

    /// Sampling ratio per partition (default: 1/partitions).
    #[arg(long)]
    ratio: Option<f64>,

    /// Consolidation function applied to identical rules across partitions.
    #[arg(long, value_enum, default_value_t = GFn::Max)]
    g: GFn,

    /// Rebalance classes by majority subsampling before training.
    #[arg(long)]
    balance: bool,

    /// Apply database-coverage pruning to each partition's rules.
    #[arg(long)]
    coverage: bool,

    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GFn {
    Max,
    Min,
    Product,
}

impl From<GFn> for Consolidation {
    fn from(v: GFn) -> Self {
        match v {
            GFn::Max => Consolidation::Max,
            GFn::Min => Consolidation::Min,
            GFn::Product => Consolidation::Product,
        }
    }
}

#[derive(Args, Clone)]
struct VotingArgs {
    /// Aggregation over a label's matching rules.
    #[arg(long, value_enum, default_value_t = FFn::Max)]
    f: FFn,

    /// Rule measure fed to the aggregation.
    #[arg(long, value_enum, default_value_t = MVal::Confidence)]
    m: MVal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FFn {
    Max,
    Min,
    Mean,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MVal {
    Confidence,
    OneMinusSupport,
}

impl From<&VotingArgs> for VotingParams {
    fn from(v: &VotingArgs) -> Self {
        VotingParams {
            f: match v.f {
                FFn::Max => AggregateFn::Max,
                FFn::Min => AggregateFn::Min,
                FFn::Mean => AggregateFn::Mean,
            },
            m: match v.m {
                MVal::Confidence => Measure::Confidence,
                MVal::OneMinusSupport => Measure::OneMinusSupport,
            },
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Output model file.
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    params: TrainParamsArgs,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    input: InputArgs,

    /// Treat input as labeled and drop the label before scoring.
    #[arg(long)]
    labeled: bool,

    /// Output score file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,

    #[command(flatten)]
    voting: VotingArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    params: TrainParamsArgs,

    #[command(flatten)]
    voting: VotingArgs,

    /// Fraction of the dataset held out for testing.
    #[arg(long, default_value_t = 0.3)]
    holdout: f64,

    /// Print one tab-separated row per fold instead of the table.
    #[arg(long)]
    tsv: bool,
}

#[derive(Args)]
struct CrossvalArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    params: TrainParamsArgs,

    #[command(flatten)]
    voting: VotingArgs,

    /// Number of folds.
    #[arg(long, default_value_t = 5)]
    folds: usize,

    /// Print one tab-separated row per fold instead of the table.
    #[arg(long)]
    tsv: bool,
}

#[derive(Args)]
struct InspectArgs {
    /// Model file to print.
    model: PathBuf,
}

#[derive(Args)]
struct MineOracleArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, default_value_t = 0.01)]
    minsup: f64,

    #[arg(long, default_value_t = 0.5)]
    minconf: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("capmine: {e}");
            return ExitCode::from(2);
        }
    };

    if let Err(code) = validate(&cli.command) {
        return code;
    }

    let outcome = pool.install(|| run(&cli.command));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("capmine: {e}");
            ExitCode::from(2)
        }
    }
}

/// Parameter range checks; violations are usage errors (exit 1).
fn validate(command: &Command) -> std::result::Result<(), ExitCode> {
    let usage = |msg: String| {
        eprintln!("capmine: {msg}");
        ExitCode::from(1)
    };
    let check_params = |p: &TrainParamsArgs| -> std::result::Result<(), ExitCode> {
        train_config(p)
            .validate()
            .map_err(|e| usage(e.to_string()))
    };
    match command {
        Command::Train(a) => check_params(&a.params),
        Command::Eval(a) => {
            check_params(&a.params)?;
            if !(a.holdout > 0.0 && a.holdout < 1.0) {
                return Err(usage(format!(
                    "holdout must be in (0, 1), got {}",
                    a.holdout
                )));
            }
            Ok(())
        }
        Command::Crossval(a) => {
            check_params(&a.params)?;
            if a.folds < 2 {
                return Err(usage("folds must be at least 2".to_string()));
            }
            Ok(())
        }
        Command::MineOracle(a) => {
            if !(a.minsup > 0.0 && a.minsup <= 1.0) {
                return Err(usage(format!("minsup must be in (0, 1], got {}", a.minsup)));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn run(command: &Command) -> Result<()> {
    match command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Crossval(args) => cmd_crossval(args),
        Command::Inspect(args) => cmd_inspect(args),
        Command::MineOracle(args) => cmd_mine_oracle(args),
    }
}

fn load_input(input: &InputArgs) -> Result<Dataset> {
    match input.format {
        Format::Transactions => {
            dataset::load_transactions(&input.input, input.label_position.into())
        }
        Format::Tabular => dataset::load_tabular(
            &input.input,
            input.separator,
            input.label_column,
            &input.null_token,
        ),
    }
}

fn train_config(p: &TrainParamsArgs) -> TrainConfig {
    TrainConfig {
        n_partitions: p.partitions,
        ratio: p.ratio.unwrap_or(1.0 / p.partitions.max(1) as f64),
        extraction: ExtractionParams {
            minsup: p.minsup,
            minconf: p.minconf,
            minchi2: p.minchi2,
        },
        consolidation: p.g.into(),
        seed: p.seed,
        coverage: p.coverage,
    }
}

fn train_on(d: &Dataset, p: &TrainParamsArgs) -> Result<Model> {
    let cfg = train_config(p);
    let d = if p.balance {
        d.balance_subsample(p.seed)?
    } else {
        d.clone()
    };
    capmine::train(&d, &cfg)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| capmine::Error::Io(path.to_path_buf(), e))
}

fn read_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|e| capmine::Error::Io(path.to_path_buf(), e))?;
    Model::parse_text(&text)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let started = Instant::now();
    let d = load_input(&args.input)?;
    let model = train_on(&d, &args.params)?;
    write_file(&args.model, &model.to_text())?;
    println!(
        "trained {} rules from {} transactions in {:.3}s -> {}",
        model.rules().len(),
        d.len(),
        started.elapsed().as_secs_f64(),
        args.model.display()
    );
    Ok(())
}

/// Reads prediction records and maps their tokens into the model's item id
/// space. Unknown tokens are dropped: they can never match a rule.
fn load_records(model: &Model, args: &PredictArgs) -> Result<Vec<Transaction>> {
    let path = &args.input.input;
    let text = fs::read_to_string(path).map_err(|e| capmine::Error::Io(path.to_path_buf(), e))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<String> = match args.input.format {
            Format::Transactions => {
                let mut tokens: Vec<&str> = line.split_whitespace().collect();
                if args.labeled && !tokens.is_empty() {
                    match args.input.label_position {
                        LabelPos::First => {
                            tokens.remove(0);
                        }
                        LabelPos::Last => {
                            tokens.pop();
                        }
                    }
                }
                tokens.iter().map(|t| t.to_string()).collect()
            }
            Format::Tabular => {
                let cells: Vec<&str> = line.split(args.input.separator).collect();
                if args.labeled && args.input.label_column >= cells.len() {
                    return Err(capmine::Error::parse(
                        Some(path.clone()),
                        lineno + 1,
                        "label column out of range",
                    ));
                }
                cells
                    .iter()
                    .enumerate()
                    .filter(|&(i, cell)| {
                        !(args.labeled && i == args.input.label_column)
                            && *cell != args.input.null_token
                    })
                    .map(|(i, cell)| format!("col{}={}", i, cell))
                    .collect()
            }
        };
        let ids: Vec<ItemId> = tokens
            .iter()
            .filter_map(|t| model.items().lookup(t))
            .map(ItemId)
            .collect();
        records.push(Transaction::new(ids, None));
    }
    Ok(records)
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let records = load_records(&model, args)?;
    let report = score_report(&model, &records, &(&args.voting).into());
    match &args.output {
        Some(path) => write_file(path, &report)?,
        None => print!("{report}"),
    }
    Ok(())
}

fn print_metrics(result: &EvalResult, tsv: bool) {
    if tsv {
        println!("fold\tauroc\taccuracy\tn_test");
        for (i, f) in result.folds.iter().enumerate() {
            println!("{}\t{:.6}\t{:.6}\t{}", i + 1, f.auroc, f.accuracy, f.n_test);
        }
        println!(
            "mean\t{:.6}\t{:.6}\t{}",
            result.auroc, result.accuracy, result.n_test
        );
    } else {
        println!("{:<6} {:>8} {:>10} {:>8}", "fold", "auroc", "accuracy", "n_test");
        for (i, f) in result.folds.iter().enumerate() {
            println!(
                "{:<6} {:>8.4} {:>10.4} {:>8}",
                i + 1,
                f.auroc,
                f.accuracy,
                f.n_test
            );
        }
        println!(
            "{:<6} {:>8.4} {:>10.4} {:>8}",
            "mean", result.auroc, result.accuracy, result.n_test
        );
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let d = load_input(&args.input)?;
    let n_test = ((args.holdout * d.len() as f64).round() as usize)
        .max(1)
        .min(d.len().saturating_sub(1));
    // Deterministic holdout: shuffle indices with the training seed.
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut indices: Vec<usize> = (0..d.len()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.params.seed);
    indices.shuffle(&mut rng);
    let mut test_idx = indices[..n_test].to_vec();
    let mut train_idx = indices[n_test..].to_vec();
    test_idx.sort_unstable();
    train_idx.sort_unstable();

    let train_d = d.subset(&train_idx);
    let test_d = d.subset(&test_idx);
    let model = train_on(&train_d, &args.params)?;
    let fold = evaluate_split(&model, &test_d, &(&args.voting).into())?;
    let result = EvalResult {
        auroc: fold.auroc,
        accuracy: fold.accuracy,
        n_test: fold.n_test,
        folds: vec![fold],
    };
    print_metrics(&result, args.tsv);
    Ok(())
}

fn cmd_crossval(args: &CrossvalArgs) -> Result<()> {
    let d = load_input(&args.input)?;
    let cfg = train_config(&args.params);
    let result = crossval(
        &d,
        args.folds,
        &cfg,
        &(&args.voting).into(),
        args.params.seed,
        args.params.balance,
    )?;
    print_metrics(&result, args.tsv);
    Ok(())
}

fn cmd_inspect(args: &InspectArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let labels = model.labels();

    let priors: Vec<String> = (0..labels.len() as u32)
        .map(|id| format!("{}={:.3}", labels.display(id), model.priors()[id as usize]))
        .collect();
    println!("priors: {}", priors.join(", "));
    let p = model.params();
    println!(
        "params: minsup={} minconf={} minchi2={} partitions={} ratio={} g={} coverage={} seed={}",
        p.extraction.minsup,
        p.extraction.minconf,
        p.extraction.minchi2,
        p.n_partitions,
        p.ratio,
        p.consolidation,
        p.coverage,
        p.seed
    );
    if model.rules().is_empty() {
        println!("model has no rules; predictions fall back to the priors");
        return Ok(());
    }
    for rule in model.rules() {
        let mut names: Vec<&str> = rule
            .antecedent()
            .iter()
            .map(|i| model.items().display(i.0))
            .collect();
        names.sort_unstable();
        println!(
            "{} => {} (sup={:.3}, conf={:.3}, chi2={:.3})",
            names.join(", "),
            labels.display(rule.consequent().0),
            rule.stats().support,
            rule.stats().confidence,
            rule.stats().chi2
        );
    }
    Ok(())
}

fn cmd_mine_oracle(args: &MineOracleArgs) -> Result<()> {
    let d = load_input(&args.input)?;
    let cars = oracle::mine_all_cars(&d, args.minsup, args.minconf)?;
    println!("{} rules", cars.len());
    for rule in &cars {
        let mut names: Vec<&str> = rule
            .antecedent()
            .iter()
            .map(|i| d.items().display(i.0))
            .collect();
        names.sort_unstable();
        println!(
            "{} => {} (sup={:.3}, conf={:.3}, chi2={:.3})",
            names.join(", "),
            d.labels().display(rule.consequent().0),
            rule.stats().support,
            rule.stats().confidence,
            rule.stats().chi2
        );
    }
    Ok(())
}
