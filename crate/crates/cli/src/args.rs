//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use arena_ratings::data_io::FileFormat;
use arena_ratings::prequential::{TreatmentKind, WlMode};

use crate::config::EpsilonSpec;

#[derive(Parser, Debug)]
#[command(
    name = "arena-eval",
    version,
    about = "Rating systems and prequential evaluation for pairwise model battles",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic battle stream with known ground truth.
    Simulate(SimulateArgs),
    /// Replay one system under one treatment and report accuracy metrics.
    Evaluate(EvaluateArgs),
    /// Margin sweep producing a draw/win-loss trade-off curve.
    Sweep(SweepArgs),
    /// Full systems-by-treatments grid with significance tests.
    Ablate(AblateArgs),
    /// Risk-ratio analyses over annotations or rating gaps.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Annotate battle queries through an HTTP completion endpoint.
    Annotate(AnnotateArgs),
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCommand {
    /// Draw risk ratio per annotation score bin.
    RrAnnotations(RrAnnotationsArgs),
    /// Draw risk ratio per rating-gap percentile bin.
    RrGap(RrGapArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Number of models with latent skills.
    #[arg(long, default_value_t = 20)]
    pub models: usize,
    /// Number of battles to generate.
    #[arg(long)]
    pub battles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of latent skills (log-odds scale).
    #[arg(long, default_value_t = 1.0)]
    pub skill_scale: f64,
    /// Mean draw probability.
    #[arg(long, default_value_t = 0.35)]
    pub draw_rate: f64,
    /// Draw risk ratio of difficulty-0 queries (1.0 = no effect).
    #[arg(long, default_value_t = 1.0)]
    pub difficulty0_rr: f64,
    /// Draw risk ratio of subjectivity-0 queries (1.0 = no effect).
    #[arg(long, default_value_t = 1.0)]
    pub subjectivity0_rr: f64,
    /// Draw-probability reduction per unit of skill gap.
    #[arg(long, default_value_t = 0.0)]
    pub gap_coupling: f64,
    #[arg(long)]
    pub out_battles: PathBuf,
    #[arg(long)]
    pub out_annotations: Option<PathBuf>,
    #[arg(long)]
    pub out_truth: Option<PathBuf>,
    /// Output format for battles and annotations.
    #[arg(long, value_parser = parse_file_format)]
    pub file_format: Option<FileFormat>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CommonInputArgs {
    /// Battle log path.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format (inferred from the extension when omitted).
    #[arg(long, value_parser = parse_file_format)]
    pub format: Option<FileFormat>,
    /// Schema mapping JSON path.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Drop "tie (bothbad)" rows instead of folding them into draws.
    #[arg(long)]
    pub drop_bothbad: bool,
    /// Run configuration JSON (flags override its fields).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonInputArgs,
    /// Rating system: elo, glicko2, bradley-terry, trueskill.
    #[arg(long)]
    pub system: Option<String>,
    /// Update treatment.
    #[arg(long, value_parser = parse_treatment, default_value = "apply-all")]
    pub policy: TreatmentKind,
    /// Skip rate for random omission (defaults to the stream draw fraction).
    #[arg(long)]
    pub omit_rate: Option<f64>,
    /// Decision margin, or "calibrate" to tune it on the leading slice.
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<EpsilonSpec>,
    #[arg(long)]
    pub calibration_fraction: Option<f64>,
    /// Win-loss accuracy mode: zero-margin or margin-strict.
    #[arg(long, value_parser = parse_wl_mode)]
    pub wl_mode: Option<WlMode>,
    /// Include the calibration slice in reported metrics.
    #[arg(long)]
    pub include_calibration: bool,
    /// Seed for random-omission skip patterns.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path ("-" for stdout).
    #[arg(long)]
    pub out: PathBuf,
    /// json, csv, or text (inferred from the extension when omitted).
    #[arg(long)]
    pub report_format: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonInputArgs,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, value_parser = parse_treatment, default_value = "apply-all")]
    pub policy: TreatmentKind,
    #[arg(long)]
    pub omit_rate: Option<f64>,
    /// Margin grid as start:end:step (default 0.05:0.45:0.05).
    #[arg(long)]
    pub epsilon_grid: Option<String>,
    #[arg(long)]
    pub calibration_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report_format: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AblateArgs {
    #[command(flatten)]
    pub common: CommonInputArgs,
    /// Comma-separated system list, or "all".
    #[arg(long)]
    pub systems: Option<String>,
    /// Comma-separated treatment list, or "all".
    #[arg(long)]
    pub treatments: Option<String>,
    #[arg(long)]
    pub calibration_fraction: Option<f64>,
    #[arg(long, value_parser = parse_wl_mode)]
    pub wl_mode: Option<WlMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report_format: Option<String>,
    /// Also write the grid as aligned text.
    #[arg(long)]
    pub text_out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RrAnnotationsArgs {
    #[arg(long)]
    pub battles: PathBuf,
    #[arg(long, value_parser = parse_file_format)]
    pub format: Option<FileFormat>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub drop_bothbad: bool,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_parser = parse_file_format)]
    pub annotations_format: Option<FileFormat>,
    /// difficulty or subjectivity.
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report_format: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RrGapArgs {
    #[arg(long)]
    pub battles: PathBuf,
    #[arg(long, value_parser = parse_file_format)]
    pub format: Option<FileFormat>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub drop_bothbad: bool,
    /// System whose online gaps are analyzed.
    #[arg(long, default_value = "bradley-terry")]
    pub system: String,
    /// JSON object mapping model ids to fixed ratings; when given, gaps come
    /// from this table instead of an online replay.
    #[arg(long)]
    pub ratings_table: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report_format: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub battles: PathBuf,
    #[arg(long, value_parser = parse_file_format)]
    pub format: Option<FileFormat>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub drop_bothbad: bool,
    /// HTTP completion endpoint receiving {"prompt": ...} POSTs.
    #[arg(long)]
    pub endpoint: String,
    /// Prompt template file with a {query} placeholder.
    #[arg(long)]
    pub prompt_file: Option<PathBuf>,
    /// Annotate at most this many battles (uniform sample when fewer).
    #[arg(long, default_value_t = 3000)]
    pub limit: usize,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 30)]
    pub timeout: u64,
    /// Retries per battle after the first attempt.
    #[arg(long, default_value_t = 2)]
    pub retries: u32,
    /// Sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_file_format)]
    pub out_format: Option<FileFormat>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn parse_file_format(s: &str) -> Result<FileFormat, String> {
    s.parse().map_err(|e: arena_ratings::Error| e.to_string())
}

fn parse_treatment(s: &str) -> Result<TreatmentKind, String> {
    s.parse().map_err(|e: arena_ratings::Error| e.to_string())
}

fn parse_epsilon(s: &str) -> Result<EpsilonSpec, String> {
    s.parse().map_err(|e: arena_ratings::Error| e.to_string())
}

fn parse_wl_mode(s: &str) -> Result<WlMode, String> {
    match s {
        "zero-margin" | "zero_margin" => Ok(WlMode::ZeroMargin),
        "margin-strict" | "margin_strict" => Ok(WlMode::MarginStrict),
        other => Err(format!("unknown wl mode {other:?}")),
    }
}
