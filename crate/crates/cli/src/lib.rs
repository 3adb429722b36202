//! Library side of the `tfd` command-line tool.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;

use std::fmt;

use clap::Parser;
use tfd_core::TfdError;

use crate::args::{Cli, Command};
use crate::config::ConfigFile;
use crate::output::write_file;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<TfdError> for Failure {
    fn from(e: TfdError) -> Self {
        match e {
            TfdError::ConvergenceFailure(_) | TfdError::ZeroNorm => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("tfd {}: {f}", cli.command.name());
            f.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let max_dim = config::max_dim()?;
    let name = cli.command.name();
    let (outcome, code) = match &cli.command {
        Command::Vacuum(a) => (commands::vacuum(&file.resolve(name, a)?, max_dim)?, EXIT_OK),
        Command::Pdc(a) => (commands::pdc(&file.resolve(name, a)?, max_dim)?, EXIT_OK),
        Command::Project(a) => (commands::project(&file.resolve(name, a)?, max_dim)?, EXIT_OK),
        Command::Sweep(a) => (commands::sweep(&file.resolve(name, a)?, max_dim)?, EXIT_OK),
        Command::Example(a) => (commands::example(&file.resolve(name, a)?, max_dim)?, EXIT_OK),
        Command::Selftest(a) => {
            let (outcome, passed) = selftest::selftest(&file.resolve(name, a)?)?;
            (outcome, if passed { EXIT_OK } else { EXIT_NUMERICAL })
        }
    };
    let json = outcome.report.to_json();
    if cli.format.json() {
        write_file(&cli.out_dir, &format!("{name}.json"), &json)?;
    }
    if let (true, Some(table)) = (cli.format.csv(), &outcome.table) {
        write_file(&cli.out_dir, &format!("{name}.csv"), &table.to_csv())?;
    }
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    print!("{json}");
    if code != EXIT_OK {
        eprintln!("tfd {name}: one or more checks failed");
    }
    Ok(code)
}
