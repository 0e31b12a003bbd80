//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::kernels::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wexsys",
    version,
    about = "Dual systems and exactness diagnostics for weighted exponential systems"
)]
pub struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for report.json and CSV tables; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a weight against the exactness window.
    Classify(ClassifyArgs),
    /// Tabulate the dual coefficients a_{n,j}.
    Coeffs(CoeffsArgs),
    /// Check vanishing orders and biorthogonality over a window.
    Verify(VerifyArgs),
    /// Sweep alpha and run divergence and frame probes.
    Scan(ScanArgs),
    /// Fit coefficient growth and report the Schauder obstruction.
    Growth(GrowthArgs),
    /// Run the full acceptance suite.
    Report,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub m: Option<i64>,
    /// Excluded indices; M is taken as their count.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub exclude: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub exclude: Option<Vec<i64>>,
    /// Half-width N of the index window [-N, N].
    #[arg(long)]
    pub window: Option<i64>,
    /// Use exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub exclude: Option<Vec<i64>>,
    #[arg(long)]
    pub window: Option<i64>,
    #[arg(long)]
    pub exact: bool,
    /// Highest derivative order examined (default M + 2).
    #[arg(long)]
    pub max_m_check: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub exclude: Option<Vec<i64>>,
    /// `lo:hi:step` or a comma-separated list (default M-3/2 : M+3/2 : 1/4).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_grid: Option<String>,
    /// Any of minimality, witness, frame.
    #[arg(long, value_delimiter = ',')]
    pub probes: Option<Vec<String>>,
    /// Largest Gram truncation for the frame probe.
    #[arg(long)]
    pub window: Option<i64>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub exclude: Option<Vec<i64>>,
    #[arg(long)]
    pub n_max: Option<i64>,
    /// Weight for the obstruction series (default M).
    #[arg(long)]
    pub alpha: Option<f64>,
}

/// Values read from `--config`; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub m: Option<i64>,
    pub exclude: Option<Vec<i64>>,
    pub window: Option<i64>,
    pub n_max: Option<i64>,
    pub exact: Option<bool>,
    pub max_m_check: Option<u32>,
    pub alpha_grid: Option<String>,
    pub probes: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<ToleranceConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError::Usage(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
    Io(String),
}

/// Validated settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Common {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tolerance: ToleranceConfig,
}

/// Flag value if given, else the file value, else the default.
pub fn layer<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_config_rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("alpha = 1.0\nbogus = 2").is_err());
        let c: FileConfig =
            toml::from_str("exclude = [0, 1]\n[tolerance]\nabs_tol = 1e-13").unwrap();
        assert_eq!(c.exclude, Some(vec![0, 1]));
        assert_eq!(c.tolerance.unwrap().abs_tol, 1e-13);
    }

    #[test]
    fn precedence() {
        assert_eq!(layer(Some(1), Some(2), 3), 1);
        assert_eq!(layer(None, Some(2), 3), 2);
        assert_eq!(layer(None::<i32>, None, 3), 3);
    }
}
