//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or consistency failure, 2 usage
//! error, 3 I/O error.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use config::{Cli, Command, FileConfig, Format};

use crate::error::Error;
use crate::report::ReportDocument;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Io(String),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Failed(_) => EXIT_VERIFICATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Accuracy { .. } | Error::Numerical(_) | Error::Arithmetic(_) => {
                CliError::Failed(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        match e {
            config::ConfigError::Usage(m) => CliError::Usage(m),
            config::ConfigError::Io(m) => CliError::Io(m),
        }
    }
}

/// A named CSV table produced by a command.
pub(crate) struct Table {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// What a command hands back for writing.
pub(crate) struct Output {
    pub report: ReportDocument,
    pub tables: Vec<Table>,
    /// Lines for stderr.
    pub log: Vec<String>,
}

/// Parses `args`, runs the command and writes its output. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "wexsys: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let common = config::Common {
        format: config::layer(cli.format, file.format, Format::Json),
        out: cli.out.clone().or_else(|| file.out.clone()),
        seed: config::layer(cli.seed, file.seed, crate::acceptance::DEFAULT_SEED),
        tolerance: file.tolerance.unwrap_or_default(),
    };
    common.tolerance.validate()?;
    let output = commands::dispatch(&cli.command, &file, &common)?;
    deliver(&output, &common, stdout, stderr)
}

fn deliver(
    output: &Output,
    common: &config::Common,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    for line in &output.log {
        writeln!(stderr, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    for failure in &output.report.failures {
        writeln!(stderr, "failure: {failure}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    emit(output, common, stdout)?;
    Ok(if output.report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

fn emit(output: &Output, common: &config::Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let json = output.report.to_json_pretty()?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &common.out {
        None => {
            if common.format.json() {
                writeln!(stdout, "{json}").map_err(io)?;
            } else if let Some(first) = output.tables.first() {
                stdout.write_all(&first.bytes).map_err(io)?;
            }
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            if common.format.json() {
                write_file(&dir.join("report.json"), format!("{json}\n").as_bytes())?;
            }
            if common.format.csv() {
                for t in &output.tables {
                    write_file(&dir.join(format!("{}.csv", t.name)), &t.bytes)?;
                }
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::ToleranceConfig;

    fn common() -> config::Common {
        config::Common {
            format: Format::Json,
            out: None,
            seed: 0,
            tolerance: ToleranceConfig::default(),
        }
    }

    fn output(failures: Vec<String>) -> Output {
        let report = ReportDocument::new(
            "verify",
            &serde_json::json!({}),
            &ToleranceConfig::default(),
            &serde_json::json!({}),
            failures,
        )
        .unwrap();
        Output {
            report,
            tables: vec![],
            log: vec![],
        }
    }

    #[test]
    fn failed_report_exits_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = deliver(
            &output(vec!["n = 3: order 1".into()]),
            &common(),
            &mut out,
            &mut err,
        )
        .unwrap();
        assert_eq!(code, EXIT_VERIFICATION);
        assert!(String::from_utf8(err).unwrap().contains("n = 3: order 1"));
        let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(json["pass"], false);
        let code = deliver(&output(vec![]), &common(), &mut Vec::new(), &mut Vec::new()).unwrap();
        assert_eq!(code, EXIT_OK);
    }

    #[test]
    fn error_categories_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::domain("x")).exit_code(), EXIT_USAGE);
        assert_eq!(
            CliError::from(Error::Numerical("x".into())).exit_code(),
            EXIT_VERIFICATION
        );
        assert_eq!(
            CliError::from(config::ConfigError::Io("x".into())).exit_code(),
            EXIT_IO
        );
    }
}
