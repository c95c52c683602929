//! `sirmine`: mine sub-interval relationships between time-series pairs.
//!
//! Results go to the output stream (or `--output` file), diagnostics to
//! stderr. Runs with identical flags and seeds produce byte-identical
//! output regardless of the worker count.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sir_core::ingest::{self, Dataset, LoadOptions, Preset};
use sir_core::pipeline::{
    find_associated_sirs, mine_all, prune_redundant, score_anomalous_intervals, select_candidates,
    ItemsetMode,
};
use sir_core::significance::{random_normal_series, significance_test};
use sir_core::types::{CandidateConfig, SignificanceConfig};
use sir_core::{
    solve_dp_with_stats, solve_pdp, solve_pdp_with_stats, MeasureEngine, MeasureKind, MinerConfig,
};

#[derive(Parser)]
#[command(
    name = "sirmine",
    version,
    about = "Discover sub-interval relationships (SIRs) between time series",
    long_about = "Discover sub-interval relationships (SIRs): maximal-sum-length sets of \
                  disjoint, sufficiently long, sufficiently strong intervals between pairs \
                  of time series."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine the optimal SIR for one named pair, or for all candidate pairs
    Mine(MineArgs),
    /// Select candidate pairs, prune redundant ones, and mine them all
    Batch(BatchArgs),
    /// Randomization significance test for one pair
    Significance(SignificanceArgs),
    /// Sliding-window activity scores over all mined SIRs
    Anomalies(AnomaliesArgs),
    /// Sets of pairs whose SIRs are simultaneously active
    Associated(AssociatedArgs),
    /// DP vs PDP scaling table on synthetic pairs
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    /// Average product (similarity)
    Ap,
    /// Negative average product (similarity)
    Nap,
    /// Mean squared error (distance)
    Mse,
}

impl From<MeasureArg> for MeasureKind {
    fn from(value: MeasureArg) -> Self {
        match value {
            MeasureArg::Ap => MeasureKind::Ap,
            MeasureArg::Nap => MeasureKind::NAp,
            MeasureArg::Mse => MeasureKind::Mse,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PreprocessArg {
    /// Use the data as loaded
    None,
    /// Global z-score per column
    Zscore,
    /// Deseasonalize, detrend, z-score (needs a period)
    Climate,
    /// Per-segment z-score (needs segment boundaries)
    Fmri,
}

impl From<PreprocessArg> for Preset {
    fn from(value: PreprocessArg) -> Self {
        match value {
            PreprocessArg::None => Preset::None,
            PreprocessArg::Zscore => Preset::ZScore,
            PreprocessArg::Climate => Preset::Climate,
            PreprocessArg::Fmri => Preset::Fmri,
        }
    }
}

#[derive(Args)]
struct InputOpts {
    /// Input CSV: header row of series ids, one row per timestamp
    #[arg(long)]
    input: PathBuf,
    /// Preprocessing applied to every column after loading
    #[arg(long, value_enum, default_value_t = PreprocessArg::None)]
    preprocess: PreprocessArg,
    /// Seasonal period, overriding the `<input>.toml` sidecar
    #[arg(long)]
    period: Option<usize>,
}

#[derive(Args)]
struct MeasureOpts {
    /// Relationship measure
    #[arg(long, value_enum, default_value_t = MeasureArg::Ap)]
    measure: MeasureArg,
    /// Strength threshold (similarity: rel >= tau, distance: rel <= tau)
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Minimum interval length [default: 6, or 10 with --preprocess fmri]
    #[arg(long)]
    lmin: Option<usize>,
}

impl MeasureOpts {
    fn resolve_l_min(&self, preprocess: PreprocessArg) -> usize {
        self.lmin.unwrap_or(match preprocess {
            PreprocessArg::Fmri => 10,
            _ => 6,
        })
    }
}

#[derive(Args)]
struct PipelineOpts {
    /// Keep pairs with |full-length correlation| below this bound
    #[arg(long, default_value_t = 0.25)]
    max_full_corr: f64,
    /// Redundancy threshold on full-length AP between pair endpoints
    #[arg(long, default_value_t = 0.7)]
    redundancy: f64,
    /// Worker count for batch mining (0 = available parallelism)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct OutputOpts {
    /// Write results here instead of the output stream
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    measure: MeasureOpts,
    /// Mine exactly this pair of series ids
    #[arg(long, num_args = 2, value_names = ["ID_A", "ID_B"], required_unless_present = "all", conflicts_with = "all")]
    pair: Option<Vec<String>>,
    /// Mine every candidate pair instead of one named pair
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    pipeline: PipelineOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    measure: MeasureOpts,
    #[command(flatten)]
    pipeline: PipelineOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct SignificanceArgs {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    measure: MeasureOpts,
    /// The pair of series ids to test
    #[arg(long, num_args = 2, value_names = ["ID_A", "ID_B"], required = true)]
    pair: Vec<String>,
    /// Number of null randomizations M
    #[arg(long, default_value_t = 1000)]
    randomizations: usize,
    /// RNG seed; each replicate draws from its own derived stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replace the second series of the pair instead of the first
    #[arg(long)]
    replace_second: bool,
    /// Append the full null sum-length distribution to the record
    #[arg(long)]
    verbose: bool,
    /// Worker count for the null replicates (0 = available parallelism)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct AnomaliesArgs {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    measure: MeasureOpts,
    /// Sliding window length in timestamps
    #[arg(long, default_value_t = 6)]
    window: usize,
    #[command(flatten)]
    pipeline: PipelineOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct AssociatedArgs {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    measure: MeasureOpts,
    /// Minimum number of timestamps on which a set must be co-active
    #[arg(long)]
    min_support: usize,
    /// Minimum number of pairs in a reported set
    #[arg(long, default_value_t = 2)]
    min_set_size: usize,
    /// Report all frequent sets instead of only maximal ones
    #[arg(long)]
    all_itemsets: bool,
    #[command(flatten)]
    pipeline: PipelineOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct BenchArgs {
    /// Series lengths to benchmark, ascending
    #[arg(long, value_delimiter = ',', required = true)]
    lengths: Vec<usize>,
    /// Synthetic pairs per length
    #[arg(long, default_value_t = 3)]
    pairs_per_length: usize,
    /// Seed for the synthetic pairs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Strength threshold
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Minimum interval length
    #[arg(long, default_value_t = 6)]
    lmin: usize,
    /// Relationship measure
    #[arg(long, value_enum, default_value_t = MeasureArg::Ap)]
    measure: MeasureArg,
    #[command(flatten)]
    output: OutputOpts,
}

enum CliError {
    Core(sir_core::Error),
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<sir_core::Error> for CliError {
    fn from(e: sir_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Mine(args) => cmd_mine(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Significance(args) => cmd_significance(args),
        Command::Anomalies(args) => cmd_anomalies(args),
        Command::Associated(args) => cmd_associated(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn load_dataset(opts: &InputOpts) -> Result<Dataset, CliError> {
    let mut dataset = ingest::load_csv(&opts.input, &LoadOptions::default())?;
    if let Some(period) = opts.period {
        dataset.period = Some(period);
    }
    Ok(ingest::preprocess(&dataset, opts.preprocess.into())?)
}

fn miner_config(measure: &MeasureOpts, input: &InputOpts, pipeline: &PipelineOpts) -> MinerConfig {
    MinerConfig {
        tau: measure.tau,
        l_min: measure.resolve_l_min(input.preprocess),
        measure: measure.measure.into(),
        significance: SignificanceConfig::default(),
        candidates: CandidateConfig {
            max_abs_full_corr: pipeline.max_full_corr,
            redundancy_threshold: pipeline.redundancy,
        },
    }
}

fn emit(output: &OutputOpts, lines: Vec<String>) -> Result<(), CliError> {
    match &output.output {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            for line in lines {
                writeln!(file, "{line}")?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for line in lines {
                writeln!(lock, "{line}")?;
            }
        }
    }
    Ok(())
}

fn lookup<'a>(
    dataset: &'a Dataset,
    id: &str,
) -> Result<&'a sir_core::TimeSeries, CliError> {
    dataset
        .get(id)
        .ok_or_else(|| CliError::Core(sir_core::Error::UnknownSeries { id: id.to_string() }))
}

/// Shared candidate-selection + pruning + mining path.
fn mine_candidates(
    dataset: &Dataset,
    config: &MinerConfig,
    workers: usize,
) -> Result<Vec<sir_core::SirResult>, CliError> {
    let candidates = select_candidates(&dataset.series, config)?;
    let kept = prune_redundant(
        &candidates,
        &dataset.series,
        config.candidates.redundancy_threshold,
    )?;
    eprintln!(
        "{} candidate pairs, {} after redundancy pruning",
        candidates.len(),
        kept.len()
    );
    Ok(mine_all(&kept, &dataset.series, config, workers)?)
}

fn cmd_mine(args: MineArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.input)?;
    let config = miner_config(&args.measure, &args.input, &args.pipeline);
    let lines = if args.all {
        mine_candidates(&dataset, &config, args.pipeline.workers)?
            .iter()
            .map(|r| r.to_record())
            .collect()
    } else {
        let ids = args.pair.expect("clap enforces --pair without --all");
        let x = lookup(&dataset, &ids[0])?;
        let y = lookup(&dataset, &ids[1])?;
        let engine = MeasureEngine::build(x, y, config.measure)?;
        vec![solve_pdp(&engine, config.tau, config.l_min).to_record()]
    };
    emit(&args.output, lines)
}

fn cmd_batch(args: BatchArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.input)?;
    let config = miner_config(&args.measure, &args.input, &args.pipeline);
    let results = mine_candidates(&dataset, &config, args.pipeline.workers)?;
    emit(&args.output, results.iter().map(|r| r.to_record()).collect())
}

fn cmd_significance(args: SignificanceArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.input)?;
    let mut config = miner_config(
        &args.measure,
        &args.input,
        &PipelineOpts {
            max_full_corr: 0.25,
            redundancy: 0.7,
            workers: args.workers,
        },
    );
    config.significance = SignificanceConfig {
        num_randomizations: args.randomizations,
        rng_seed: args.seed,
        replace_second: args.replace_second,
    };
    let x = lookup(&dataset, &args.pair[0])?;
    let y = lookup(&dataset, &args.pair[1])?;
    let report = significance_test(x, y, &config, args.workers)?;
    emit(&args.output, vec![report.to_record(args.verbose)])
}

fn cmd_anomalies(args: AnomaliesArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.input)?;
    let n = dataset.n();
    let config = miner_config(&args.measure, &args.input, &args.pipeline);
    let results = mine_candidates(&dataset, &config, args.pipeline.workers)?;
    let scores = score_anomalous_intervals(&results, args.window, n)?;
    let lines = scores
        .iter()
        .enumerate()
        .map(|(idx, score)| format!("{}\t{score:.6}", idx + 1))
        .collect();
    emit(&args.output, lines)
}

fn cmd_associated(args: AssociatedArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.input)?;
    let n = dataset.n();
    let config = miner_config(&args.measure, &args.input, &args.pipeline);
    let results = mine_candidates(&dataset, &config, args.pipeline.workers)?;
    let mode = if args.all_itemsets {
        ItemsetMode::All
    } else {
        ItemsetMode::Maximal
    };
    let sets = find_associated_sirs(&results, n, args.min_support, args.min_set_size, mode)?;
    let lines = sets
        .iter()
        .map(|set| {
            let members = set
                .pairs
                .iter()
                .map(|(a, b)| format!("{a}:{b}"))
                .collect::<Vec<_>>()
                .join(",");
            format!("{}\t{}", set.support, members)
        })
        .collect();
    emit(&args.output, lines)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "--lengths must be strictly ascending".into(),
        ));
    }
    if args.pairs_per_length == 0 {
        return Err(CliError::Usage("--pairs-per-length must be positive".into()));
    }
    let measure: MeasureKind = args.measure.into();
    let mut lines = Vec::new();
    for (li, &n) in args.lengths.iter().enumerate() {
        let mut dp_ops = 0u64;
        let mut pdp_ops = 0u64;
        let mut dp_secs = 0.0f64;
        let mut pdp_secs = 0.0f64;
        for p in 0..args.pairs_per_length {
            let base = args
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add((li * args.pairs_per_length + p) as u64);
            let x = random_normal_series("x", n, 2 * base);
            let y = random_normal_series("y", n, 2 * base + 1);
            let engine = MeasureEngine::build(&x, &y, measure)?;

            let start = Instant::now();
            let (dp_result, dp_stats) = solve_dp_with_stats(&engine, args.tau, args.lmin);
            dp_secs += start.elapsed().as_secs_f64();
            dp_ops += dp_stats.total_ops();

            let start = Instant::now();
            let (pdp_result, pdp_stats) = solve_pdp_with_stats(&engine, args.tau, args.lmin);
            pdp_secs += start.elapsed().as_secs_f64();
            pdp_ops += pdp_stats.total_ops();

            if dp_result.sum_length != pdp_result.sum_length {
                eprintln!(
                    "warning: solver disagreement at N={n} pair {p}: dp={} pdp={}",
                    dp_result.sum_length, pdp_result.sum_length
                );
            }
        }
        lines.push(format!("dp\t{n}\t{dp_ops}\t{dp_secs:.6}"));
        lines.push(format!("pdp\t{n}\t{pdp_ops}\t{pdp_secs:.6}"));
    }
    emit(&args.output, lines)
}
