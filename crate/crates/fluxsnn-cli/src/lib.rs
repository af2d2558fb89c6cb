//! The `fluxsnn` command-line pipeline.
//!
//! Subcommands: `train` (subset selection, one unsupervised epoch,
//! labeling, evaluation of both splits, checkpoint + report + snapshot
//! artifacts), `eval` (re-derive labels from a checkpoint and score one
//! split), `export-weights` (weight-map PGM), and `estimate-jj`
//! (hardware cost).
//!
//! Exit codes: 0 success; 1 usage, data or config errors; 2 degenerate
//! training (no neuron ever fired, so no labels could be assigned).

pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use fluxsnn::config::RunConfig;
use fluxsnn::data::{
    load_checkpoint, load_idx, save_checkpoint, select_subset, write_weight_maps, Split,
};
use fluxsnn::encoding::PixelImage;
use fluxsnn::network::{estimate_jj, run_experiment, JjCostModel, Network, NetworkError};
use fluxsnn::rng::make_rng;
use report::{neuron_reports, split_report, RunReport};

#[derive(Parser)]
#[command(
    name = "fluxsnn",
    version,
    about = "Picosecond-clocked spiking-network simulator with online quantized-STDP training"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Train on the 5% digit-0/1 subset and write checkpoint + report.
    Train(TrainArgs),
    /// Evaluate a checkpoint on one split, re-deriving neuron labels.
    Eval(EvalArgs),
    /// Export a checkpoint's weight maps as a PGM tile.
    ExportWeights(ExportArgs),
    /// Estimate the Josephson-junction count of a network size.
    EstimateJj(EstimateArgs),
}

#[derive(Args)]
pub struct TrainArgs {
    /// Directory holding the four uncompressed MNIST IDX files.
    #[arg(long)]
    pub mnist_dir: PathBuf,
    /// Checkpoint output path.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON run configuration (defaults apply to absent keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run seed; overrides the config file.
    #[arg(long, env = "FLUXSNN_SEED")]
    pub seed: Option<u64>,
    /// Excitatory neuron count {4|9}; overrides the config file.
    #[arg(long)]
    pub neurons: Option<usize>,
    /// Write weight-map PGM snapshots here.
    #[arg(long)]
    pub snapshot_dir: Option<PathBuf>,
    /// Report JSON path (default: `<out>.report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Checkpoint to evaluate.
    #[arg(long)]
    pub model: PathBuf,
    /// Directory holding the four uncompressed MNIST IDX files.
    #[arg(long)]
    pub mnist_dir: PathBuf,
    /// Which split to score.
    #[arg(long, default_value = "test")]
    pub split: SplitArg,
    /// Run seed; overrides the checkpoint's config echo.
    #[arg(long, env = "FLUXSNN_SEED")]
    pub seed: Option<u64>,
    /// Report JSON path (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SplitArg {
    Train,
    Test,
}

#[derive(Args)]
pub struct ExportArgs {
    /// Checkpoint to render.
    #[arg(long)]
    pub model: PathBuf,
    /// PGM output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Input (pixel) count K.
    #[arg(long)]
    pub inputs: usize,
    /// Excitatory neuron count N.
    #[arg(long)]
    pub neurons: usize,
    /// Override cost coefficients as `c_syn,c_quad`.
    #[arg(long)]
    pub costs: Option<String>,
}

/// Exit code for a failed run: 2 for degenerate training, 1 otherwise.
pub fn classify_error(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(NetworkError::UntrainedNetwork) = cause.downcast_ref::<NetworkError>() {
            return 2;
        }
    }
    1
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::ExportWeights(args) => cmd_export_weights(args),
        Command::EstimateJj(args) => cmd_estimate_jj(args),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            Ok(RunConfig::from_json(&text)?)
        }
        None => Ok(RunConfig::default()),
    }
}

type Pool = Vec<(PixelImage, u8)>;

fn load_pools(dir: &Path) -> Result<(Pool, Pool)> {
    let train = load_idx(
        &dir.join("train-images-idx3-ubyte"),
        &dir.join("train-labels-idx1-ubyte"),
    )
    .context("loading train split")?;
    let test = load_idx(
        &dir.join("t10k-images-idx3-ubyte"),
        &dir.join("t10k-labels-idx1-ubyte"),
    )
    .context("loading test split")?;
    Ok((train, test))
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(neurons) = args.neurons {
        ensure!(
            neurons == 4 || neurons == 9,
            "--neurons must be 4 or 9, got {neurons}"
        );
        cfg.n_excitatory = neurons;
    }
    cfg.validate()?;

    let (train_pool, test_pool) = load_pools(&args.mnist_dir)?;
    let result = run_experiment(&cfg, &train_pool, &test_pool)?;

    save_checkpoint(&args.out, &cfg, result.network.synapses())?;

    let mut snapshot_paths = Vec::new();
    if let Some(dir) = &args.snapshot_dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))?;
        for snap in &result.snapshots {
            let path = dir.join(format!("snapshot_{:06}.pgm", snap.iteration));
            write_weight_maps(&path, &snap.matrix, cfg.input_side)?;
            snapshot_paths.push(path.display().to_string());
        }
    }

    let report = RunReport {
        command: "train".to_string(),
        seed: cfg.seed,
        config: cfg,
        train: Some(split_report("train", &result.train_stats)),
        test: Some(split_report("test", &result.test_stats)),
        neurons: neuron_reports(&result.labels),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        checkpoint: Some(args.out.display().to_string()),
        snapshots: snapshot_paths,
    };
    let report_path = args
        .report
        .unwrap_or_else(|| PathBuf::from(format!("{}.report.json", args.out.display())));
    std::fs::write(&report_path, report.to_json())
        .with_context(|| format!("cannot write report {}", report_path.display()))?;
    print!("{}", report.table());
    println!("  checkpoint: {}", args.out.display());
    println!("  report: {}", report_path.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let started = Instant::now();
    let ckpt = load_checkpoint(&args.model)?;
    let mut cfg = ckpt.config.clone();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    // The stored levels under the (possibly re-seeded) config echo.
    let effective = fluxsnn::data::Checkpoint {
        config: cfg.clone(),
        ..ckpt
    };
    let mut network = Network::from_checkpoint(&effective)?;

    let (train_pool, test_pool) = load_pools(&args.mnist_dir)?;
    let shuffle = make_rng(cfg.seed, "data-shuffle")?;
    let train_ds = select_subset(&train_pool, Split::Train, &shuffle)?;
    let labels = network.assign_labels(&train_ds)?;

    let (split_name, stats) = match args.split {
        SplitArg::Train => ("train", network.evaluate(&labels, &train_ds)?),
        SplitArg::Test => {
            let test_ds = select_subset(&test_pool, Split::Test, &shuffle)?;
            ("test", network.evaluate(&labels, &test_ds)?)
        }
    };

    let mut report = RunReport {
        command: "eval".to_string(),
        seed: cfg.seed,
        config: cfg,
        train: None,
        test: None,
        neurons: neuron_reports(&labels),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        checkpoint: Some(args.model.display().to_string()),
        snapshots: vec![],
    };
    match split_name {
        "train" => report.train = Some(split_report("train", &stats)),
        _ => report.test = Some(split_report("test", &stats)),
    }

    match &args.report {
        Some(path) => {
            std::fs::write(path, report.to_json())
                .with_context(|| format!("cannot write report {}", path.display()))?;
            print!("{}", report.table());
        }
        None => {
            println!("{}", report.to_json());
            eprint!("{}", report.table());
        }
    }
    Ok(())
}

fn cmd_export_weights(args: ExportArgs) -> Result<()> {
    let ckpt = load_checkpoint(&args.model)?;
    let network = Network::from_checkpoint(&ckpt)?;
    write_weight_maps(&args.out, network.synapses(), ckpt.config.input_side)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_estimate_jj(args: EstimateArgs) -> Result<()> {
    let model = match &args.costs {
        Some(text) => {
            let (syn, quad) = text
                .split_once(',')
                .context("--costs expects `c_syn,c_quad`")?;
            JjCostModel {
                c_syn_per_synapse: syn.trim().parse().context("bad c_syn")?,
                c_quad_per_neuron_pair: quad.trim().parse().context("bad c_quad")?,
            }
        }
        None => JjCostModel::default(),
    };
    let count = estimate_jj(args.inputs, args.neurons, &model)?;
    println!(
        "estimated JJ count for K={} N={}: {count}",
        args.inputs, args.neurons
    );
    println!(
        "cost model: {:.4} JJs per synapse + {:.4} JJs per neuron pair (total = c_syn*K*N + c_quad*N^2)",
        model.c_syn_per_synapse, model.c_quad_per_neuron_pair
    );
    Ok(())
}
