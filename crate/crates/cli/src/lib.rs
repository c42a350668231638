//! Command-line harness around the `pmmknn` library: cross-validation,
//! grid tuning, batch classification and the five-dataset benchmark.
//!
//! Exit codes: 0 on success, 1 on runtime failures (missing files, failed
//! fits), 2 on usage or configuration errors.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod report;

pub use commands::{cmd_bench_all, cmd_classify, cmd_cv, cmd_tune};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    Usage(String),
    /// Failure while running a valid configuration; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl From<pmmknn::Error> for CliError {
    fn from(e: pmmknn::Error) -> Self {
        match e {
            pmmknn::Error::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Vector,
    #[value(name = "per-dim")]
    PerDim,
}

impl From<ScopeArg> for pmmknn::classifier::SupportScope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::Vector => pmmknn::classifier::SupportScope::Vector,
            ScopeArg::PerDim => pmmknn::classifier::SupportScope::PerDimension,
        }
    }
}

impl ScopeArg {
    pub fn name(&self) -> &'static str {
        match self {
            ScopeArg::Vector => "vector",
            ScopeArg::PerDim => "per-dim",
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pmmknn",
    version,
    about = "Power Muirhead Mean k-nearest-neighbors benchmark harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cross-validate one dataset with the requested classifiers.
    Cv(CvArgs),
    /// Grid-search PMM-KNN's (k, r) by cross-validation accuracy.
    Tune(TuneArgs),
    /// Train on a dataset and label the rows of a query CSV.
    Classify(ClassifyArgs),
    /// Run the full five-dataset benchmark against the reference results.
    BenchAll(BenchAllArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CvArgs {
    /// Dataset id: iris, wbc, digits, satellite or eeg.
    #[arg(long)]
    pub dataset: String,
    /// Dataset variant: standard, or downsampled where defined.
    #[arg(long, default_value = "standard")]
    pub variant: String,
    /// Comma-separated subset of pmm-knn,knn,gnb.
    #[arg(long, default_value = "pmm-knn,knn,gnb")]
    pub classifiers: String,
    /// Neighborhood size for pmm-knn and knn.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Ones-chain length of the PMM exponent vector (1 <= r <= k).
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Full exponent vector as a comma list (length k); overrides --r.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ScopeArg::Vector)]
    pub support_scope: ScopeArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TuneArgs {
    #[arg(long)]
    pub dataset: String,
    #[arg(long, default_value = "standard")]
    pub variant: String,
    /// Comma-separated k grid.
    #[arg(long, default_value = "1,3,5,7,9,11,13,15")]
    pub k_grid: String,
    /// Comma-separated r grid; cells with r > k are dropped.
    #[arg(long, default_value = "1,2,3,4,5,6,7")]
    pub r_grid: String,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ScopeArg::Vector)]
    pub support_scope: ScopeArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ClassifyArgs {
    /// Training dataset id.
    #[arg(long)]
    pub dataset: String,
    #[arg(long, default_value = "standard")]
    pub variant: String,
    /// Exactly one of pmm-knn, knn, gnb.
    #[arg(long, default_value = "pmm-knn")]
    pub classifiers: String,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, value_enum, default_value_t = ScopeArg::Vector)]
    pub support_scope: ScopeArg,
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
    /// CSV of unlabeled feature rows (no header), one query per line.
    pub input: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct BenchAllArgs {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
}

/// Parses a comma list of usizes ("3,5,7").
pub fn parse_usize_list(text: &str, what: &str) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse()
                .map_err(|_| CliError::Usage(format!("{what}: {part:?} is not an integer")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{what} is empty")));
    }
    Ok(out)
}

/// Parses a comma list of floats ("1,0.5,0").
pub fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse()
                .map_err(|_| CliError::Usage(format!("{what}: {part:?} is not a number")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{what} is empty")));
    }
    Ok(out)
}
