mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "aadkit", version, about = "Auditory attention decoding from neural recordings")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// Experiment manifest (JSON).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed (synthetic generation).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ridge regularization, relative to the mean Gram diagonal.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lag_min_ms: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lag_max_ms: Option<i64>,
    /// Decoding window durations in seconds, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub windows: Option<Vec<f64>>,
    /// Window hop in seconds.
    #[arg(long, global = true)]
    pub hop: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract envelope or mel features from a mono WAV file.
    Features(FeaturesArgs),
    /// Fit or apply a PCA model.
    #[command(subcommand)]
    Pca(PcaCommand),
    /// Generate a synthetic dataset with known ground truth.
    Synth(SynthArgs),
    /// Leave-one-out attention decoding accuracy per window duration.
    Decode(DecodeArgs),
    /// Decode every layer feature of a manifest.
    LayerSweep(LayerSweepArgs),
    /// Simulated attention switches and transition times.
    Switch(SwitchArgs),
    /// Per-electrode forward-model comparison of two features.
    ForwardCompare(ForwardCompareArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Envelope,
    Mel,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    pub kind: FeatureKind,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Mel band count.
    #[arg(long, default_value_t = 28)]
    pub bands: usize,
    /// Output frame rate in Hz.
    #[arg(long, default_value_t = 100.0)]
    pub rate: f64,
}

#[derive(Subcommand, Debug)]
pub enum PcaCommand {
    /// Fit on FTR1 files, or on both talkers of every manifest trial.
    Fit(PcaFitArgs),
    /// Project an FTR1 file onto a fitted model.
    Apply(PcaApplyArgs),
}

#[derive(Args, Debug)]
pub struct PcaFitArgs {
    #[arg(long = "in", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Manifest feature to fit on (with --manifest).
    #[arg(long)]
    pub feature: Option<String>,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct PcaApplyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 28)]
    pub trials: usize,
    /// Trial length in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 32)]
    pub electrodes: usize,
    #[arg(long, default_value_t = 28)]
    pub features: usize,
    /// Neural noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 1.0)]
    pub attended_gain: f64,
    #[arg(long, default_value_t = 0.3)]
    pub unattended_gain: f64,
    #[arg(long, default_value_t = 0.95)]
    pub ar: f64,
    /// Drive the recording with this many latent sources mixed into the features.
    #[arg(long)]
    pub latent: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub feature_noise: f64,
    /// Write one feature per value, named layer00, layer01, ..., each with
    /// this much extra feature noise.
    #[arg(long, value_delimiter = ',')]
    pub layers: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct PrepArgs {
    /// Disable per-fold feature z-scoring.
    #[arg(long)]
    pub no_zscore: bool,
    /// Reduce features to this many principal components inside each fold.
    #[arg(long)]
    pub pca_k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[arg(long)]
    pub feature: String,
    #[command(flatten)]
    pub prep: PrepArgs,
    /// Average per-trial accuracies instead of pooling windows.
    #[arg(long)]
    pub per_trial: bool,
}

#[derive(Args, Debug)]
pub struct LayerSweepArgs {
    /// Feature name prefix selecting the layers.
    #[arg(long, default_value = "layer")]
    pub prefix: String,
    /// Explicit layer feature names, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub layers: Option<Vec<String>>,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[arg(long)]
    pub per_trial: bool,
}

#[derive(Args, Debug)]
pub struct SwitchArgs {
    #[arg(long)]
    pub feature: String,
    /// Length of each spliced segment in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub segment: f64,
    #[command(flatten)]
    pub prep: PrepArgs,
}

#[derive(Args, Debug)]
pub struct ForwardCompareArgs {
    #[arg(long)]
    pub feature_a: String,
    #[arg(long)]
    pub feature_b: String,
    /// Significance level of the per-electrode paired t-tests.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Components kept for features with more channels than this.
    #[arg(long, default_value_t = 100)]
    pub pca_k: usize,
    #[arg(long)]
    pub no_pca: bool,
    #[arg(long)]
    pub no_zscore: bool,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("AADKIT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("AADKIT_THREADS must be a positive integer, got '{v}'"))?;
        anyhow::ensure!(n > 0, "AADKIT_THREADS must be a positive integer, got '{v}'");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let run = || -> anyhow::Result<()> {
        init_threads()?;
        let g = &cli.global;
        match &cli.command {
            Command::Features(a) => commands::features(g, a),
            Command::Pca(PcaCommand::Fit(a)) => commands::pca_fit(g, a),
            Command::Pca(PcaCommand::Apply(a)) => commands::pca_apply(g, a),
            Command::Synth(a) => commands::synth(g, a),
            Command::Decode(a) => commands::decode(g, a),
            Command::LayerSweep(a) => commands::layer_sweep(g, a),
            Command::Switch(a) => commands::switch(g, a),
            Command::ForwardCompare(a) => commands::forward_compare(g, a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
