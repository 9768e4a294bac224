use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "egoforge",
    version,
    about = "Scheduling, fusion and evaluation for egocentric video forecasting tracks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Plain,
    Csv,
    Json,
}

impl From<OutFormat> for egoforge_core::report::Format {
    fn from(f: OutFormat) -> Self {
        use egoforge_core::report::Format;
        match f {
            OutFormat::Plain => Format::Plain,
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a snippet schedule, or the clips inside an observable window.
    Schedule(ScheduleArgs),
    /// Score predictions against ground truth.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Combine features or prediction lists.
    #[command(subcommand)]
    Fuse(FuseCommand),
    /// Multi-clips voting over per-clip score matrices.
    Vote(VoteArgs),
    /// Write a seeded synthetic dataset with perfect predictions.
    Synth(SynthArgs),
    /// Train a toy linear head on synthetic data.
    Train(TrainArgs),
    /// Render bundled result tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClipMode {
    Sliding,
    Center,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Video length in frames, counted at --fps.
    #[arg(long)]
    pub num_frames: Option<u64>,
    #[arg(long, default_value_t = 15.0)]
    pub fps: f64,
    #[arg(long, default_value_t = 16)]
    pub snippet_len: u32,
    #[arg(long, default_value_t = 8)]
    pub stride: u32,
    /// Observable-window length in seconds; switches to clip mode.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// End time of the previous clip (clip mode).
    #[arg(long)]
    pub end: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub clip_len: f64,
    #[arg(long, default_value_t = 1.0)]
    pub clip_stride: f64,
    #[arg(long, value_enum, default_value_t = ClipMode::Sliding)]
    pub mode: ClipMode,
    #[arg(long, value_enum, default_value_t = OutFormat::Plain)]
    pub format: OutFormat,
}

#[derive(Debug, Args)]
pub struct GtPred {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, value_enum, default_value_t = OutFormat::Plain)]
    pub format: OutFormat,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Moment queries: Recall@k at a tIoU and average mAP.
    Mq {
        #[command(flatten)]
        io: GtPred,
        /// mAP thresholds: comma list or start:end:step.
        #[arg(long, default_value = "0.1:0.5:0.1")]
        tiou: String,
        #[arg(long, default_value = "1")]
        recall_k: String,
        /// tIoU for the recall metric.
        #[arg(long, default_value_t = 0.5)]
        recall_tiou: f64,
    },
    /// Natural language queries: Rk@tIoU.
    Nlq {
        #[command(flatten)]
        io: GtPred,
        #[arg(long, default_value = "0.3,0.5")]
        tiou: String,
        #[arg(long, default_value = "1,5")]
        recall_k: String,
    },
    /// Future hands: mean and contact displacement per hand.
    Fhp {
        #[command(flatten)]
        io: GtPred,
    },
    /// Long-term anticipation: ED@Z for verb, noun and action.
    Lta {
        #[command(flatten)]
        io: GtPred,
        /// Expected horizon; must match the ground truth.
        #[arg(long)]
        z: Option<usize>,
        /// Candidates considered per forecast.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Short-term anticipation: top-k mAP under four criteria.
    Sta {
        #[command(flatten)]
        io: GtPred,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        #[arg(long, default_value_t = 0.25)]
        ttc_tol: f64,
        #[arg(long, default_value_t = 0.5)]
        box_iou: f64,
    },
    /// State-change object detection: AP, AP50, AP75.
    Scod {
        #[command(flatten)]
        io: GtPred,
        /// IoU thresholds averaged into AP.
        #[arg(long, default_value = "0.5:0.95:0.05")]
        tiou: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum FuseCommand {
    /// Concatenate a verb and a noun feature file row by row.
    Pre {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge two MQ or NLQ prediction files with temporal NMS.
    Post {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "0.5")]
        tiou: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Keep each source's top-k boxes, splice, then suppress overlaps.
    Sta {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        #[arg(long, default_value_t = 0.75)]
        nms_iou: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VoteMode {
    MeanProb,
    Majority,
}

#[derive(Debug, Args)]
pub struct VoteArgs {
    /// Per-clip score matrices (lta-clips schema).
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, value_enum, default_value_t = VoteMode::MeanProb)]
    pub mode: VoteMode,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// JSON generator settings; --seed overrides its seed.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub num_videos: Option<usize>,
    #[arg(long)]
    pub z: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainTask {
    /// Action classifier on anticipation windows.
    Lta,
    /// Hand coordinate regressor.
    Fhp,
    /// Classifier plus a center-clip vs voting comparison.
    Vote,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value_t = TrainTask::Lta)]
    pub task: TrainTask,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the trained head as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON synthetic-data settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Enables momentum SGD.
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub num_videos: Option<usize>,
    /// Voting windows in seconds (vote task).
    #[arg(long, default_value = "2,4,8,16")]
    pub alpha: String,
    #[arg(long, default_value_t = 2.0)]
    pub clip_len: f64,
    #[arg(long, default_value_t = 1.0)]
    pub clip_stride: f64,
    #[arg(long, value_enum, default_value_t = OutFormat::Plain)]
    pub format: OutFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Table name, or "all".
    #[arg(long, default_value = "all")]
    pub table: String,
    #[arg(long, value_enum, default_value_t = OutFormat::Plain)]
    pub format: OutFormat,
}
