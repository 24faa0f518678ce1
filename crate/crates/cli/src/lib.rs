//! Command-line front end: loads an instance file, runs one command and
//! prints an exact report.
//!
//! Exit codes: 0 affirmative, 1 negative with witness, 2 usage, 3 parse
//! error, 4 universe mismatch, 5 invariant violation, 6 missing section or
//! name, 7 other computational error.

mod commands;
mod error;
pub mod instance;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use error::{CliError, ErrorKind};
pub use instance::Instance;

pub const COMMANDS: [&str; 20] = [
    "eval",
    "ac-check",
    "decompose",
    "control",
    "orthogonal",
    "separator",
    "singular-witness",
    "seq-eval",
    "limsup",
    "quasidisjoint",
    "bounds",
    "sandwich",
    "adfamily",
    "census",
    "cc",
    "inner",
    "psi",
    "usa",
    "wc-check",
    "density",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(name = "charge-lab", about = "Exact computations with charges on representable Boolean algebras")]
pub struct Args {
    /// One of: eval, ac-check, decompose, control, orthogonal, separator,
    /// singular-witness, seq-eval, limsup, quasidisjoint, bounds, sandwich,
    /// adfamily, census, cc, inner, psi, usa, wc-check, density.
    pub command: String,
    /// Names of instance entries the command works on.
    pub operands: Vec<String>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long = "t")]
    pub t: Option<String>,
    /// Comma-separated member indices.
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
}

/// Ordered key/value lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let sep = match format {
            ReportFormat::Text => ": ",
            ReportFormat::Tsv => "\t",
        };
        self.lines.iter().map(|(k, v)| format!("{k}{sep}{v}\n")).collect()
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { ErrorKind::Usage.exit_code() } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    match execute(&args) {
        Ok((report, negative)) => {
            Outcome { stdout: report.render(args.report), stderr: String::new(), code: i32::from(negative) }
        }
        Err(e) => Outcome { stdout: String::new(), stderr: format!("{e}\n"), code: e.kind.exit_code() },
    }
}

/// Runs a parsed command. The flag is true for negative verdicts.
pub fn execute(args: &Args) -> Result<(Report, bool), CliError> {
    if !COMMANDS.contains(&args.command.as_str()) {
        return Err(CliError::new(ErrorKind::Usage, format!("unknown command `{}`", args.command)));
    }
    if args.command == "adfamily" {
        return commands::adfamily(args);
    }
    let path = args
        .instance
        .as_ref()
        .ok_or_else(|| CliError::new(ErrorKind::Usage, format!("`{}` needs --instance <path>", args.command)))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(ErrorKind::Usage, format!("cannot read {}: {e}", path.display())))?;
    let instance =
        Instance::parse(&text).map_err(|e| CliError { message: format!("{}: {}", path.display(), e.message), ..e })?;
    commands::dispatch(args, &instance)
}
