mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use cmtext::labels::LabelConfig;
use cmtext::losses::LossWeights;
use cmtext::reconstruct::{ExpansionMode, ReconstructConfig};

/// Center-mask text representation: labels, reconstruction, evaluation and
/// desk-scale training.
#[derive(Parser, Debug)]
#[command(name = "cmtext", version)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate CM/GAP masks and PMD/RD targets from annotation NDJSON
    Labelgen(LabelgenArgs),
    /// Turn CM probability masks into detection polygons
    Reconstruct(ReconstructArgs),
    /// Score detections against ground truth (P/R/F at an IoU threshold)
    Evaluate(EvaluateArgs),
    /// Time reconstruction against pixel-level kernel expansion
    Bench(BenchArgs),
    /// Write seeded synthetic scenes as annotation NDJSON
    Synth(SynthArgs),
    /// Fit free predictions to the labels of one scene by gradient descent
    TrainDesk(TrainArgs),
    /// Compare analytic loss gradients against finite differences
    Gradcheck(GradcheckArgs),
}

#[derive(Args, Debug, Clone)]
struct LabelOpts {
    /// Shrink ratio: the CM is the text polygon offset inward by mu * PMD
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Number of sampled center points per instance (odd)
    #[arg(long, default_value_t = 5)]
    centers: usize,
    /// Downsample factor between image pixels and label cells
    #[arg(long, default_value_t = 4)]
    scale: usize,
}

impl LabelOpts {
    fn config(&self) -> Result<LabelConfig, CliError> {
        let cfg = LabelConfig {
            mu: self.mu,
            n_centers: self.centers,
            scale: self.scale,
        };
        cfg.validate().map_err(CliError::invalid)?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Expansion {
    /// Expand by the CM contour's own PMD
    Literal,
    /// Expand by PMD * mu / (1 - mu)
    MuCorrected,
}

#[derive(Args, Debug, Clone)]
struct ReconOpts {
    /// Binarization threshold on CM probability
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Components with fewer cells are discarded
    #[arg(long, default_value_t = 16)]
    min_area: usize,
    /// Expansion rule for the CM contour
    #[arg(long, value_enum, default_value_t = Expansion::Literal)]
    expansion: Expansion,
}

impl ReconOpts {
    fn config(&self, mu: f64, scale: usize) -> Result<ReconstructConfig, CliError> {
        let cfg = ReconstructConfig {
            threshold: self.threshold,
            min_area: self.min_area,
            mu,
            scale: scale as f64,
            expansion: match self.expansion {
                Expansion::Literal => ExpansionMode::Literal,
                Expansion::MuCorrected => ExpansionMode::MuCorrected,
            },
        };
        cfg.validate().map_err(CliError::invalid)?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
struct WeightOpts {
    /// Weight of the CM dice loss
    #[arg(long, default_value_t = 0.25)]
    lambda_cm: f64,
    /// Weight of the GAP dice loss
    #[arg(long, default_value_t = 0.25)]
    lambda_gap: f64,
    /// Weight of the PMD ratio loss
    #[arg(long, default_value_t = 0.25)]
    lambda_pmd: f64,
    /// Weight of the RD ratio loss
    #[arg(long, default_value_t = 0.25)]
    lambda_rd: f64,
}

impl WeightOpts {
    fn weights(&self) -> Result<LossWeights, CliError> {
        let all = [self.lambda_cm, self.lambda_gap, self.lambda_pmd, self.lambda_rd];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(CliError::Invalid(format!("loss weights must be finite and non-negative, got {all:?}")));
        }
        Ok(LossWeights {
            cm: self.lambda_cm,
            gap: self.lambda_gap,
            pmd: self.lambda_pmd,
            rd: self.lambda_rd,
        })
    }
}

#[derive(Args, Debug)]
struct LabelgenArgs {
    /// Annotation NDJSON file
    #[arg(long)]
    input: PathBuf,
    /// Output directory for masks and labels.ndjson
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    label: LabelOpts,
    /// Also write a gray overlay per image (text 128, CM 255)
    #[arg(long)]
    dump_overlay: bool,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    /// CM masks (PGM or SOFTMASK files, or directories of them)
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Detection NDJSON output file
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    recon: ReconOpts,
    /// Shrink ratio used by the mu-corrected expansion
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Factor from mask cells to output pixel coordinates
    #[arg(long, default_value_t = 4)]
    scale: usize,
    /// Directory for gray overlays of CM (255) and detections (128)
    #[arg(long)]
    dump_overlay: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Detection NDJSON (annotation NDJSON is accepted too, scored 1.0)
    #[arg(long)]
    dets: PathBuf,
    /// Ground-truth annotation NDJSON
    #[arg(long)]
    gt: PathBuf,
    /// IoU needed for a match
    #[arg(long, default_value_t = 0.5)]
    iou: f64,
    /// Write the result as JSON to this file
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Side length of the square grid
    #[arg(long, default_value_t = 640)]
    size: usize,
    /// Text instances in the scene
    #[arg(long, default_value_t = 10)]
    instances: usize,
    /// Timed runs per method
    #[arg(long, default_value_t = 100)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report as CSV to this file
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SceneOpts {
    #[arg(long, default_value_t = 640)]
    width: usize,
    #[arg(long, default_value_t = 640)]
    height: usize,
    /// Axis-aligned rectangles per scene
    #[arg(long, default_value_t = 3)]
    rects: usize,
    /// Rotated rectangles per scene
    #[arg(long, default_value_t = 2)]
    rotated: usize,
    /// Annular sectors (curved text) per scene
    #[arg(long, default_value_t = 1)]
    sectors: usize,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Number of scenes
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[command(flatten)]
    scene: SceneOpts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Annotation NDJSON output file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Annotation NDJSON; without it a synthetic scene is used
    #[arg(long)]
    input: Option<PathBuf>,
    /// Image id to train on (default: the first record)
    #[arg(long)]
    image: Option<String>,
    /// Synthetic scene size when no input is given
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 500)]
    steps: usize,
    /// Learning rate
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    label: LabelOpts,
    #[command(flatten)]
    weights: WeightOpts,
    #[command(flatten)]
    recon: ReconOpts,
    /// Write the per-step loss trace as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Directory for the fitted CM (SOFTMASK) and its detections
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GradcheckArgs {
    /// Annotation NDJSON; without it seeded synthetic scenes are used
    #[arg(long)]
    input: Option<PathBuf>,
    /// Synthetic scene size in pixels (64 at scale 4 gives a 16x16 label grid)
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Number of synthetic scenes
    #[arg(long, default_value_t = 20)]
    scenes: usize,
    /// Finite-difference step
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    /// Largest relative error that still passes
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    label: LabelOpts,
    #[command(flatten)]
    weights: WeightOpts,
}

/// Exit 1 for bad arguments or configuration, 2 for bad or unusable data.
#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }

    fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let result = match cli.command {
        Command::Labelgen(a) => commands::labelgen(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Bench(a) => commands::bench(a),
        Command::Synth(a) => commands::synth(a),
        Command::TrainDesk(a) => commands::train_desk(a),
        Command::Gradcheck(a) => commands::gradcheck(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
