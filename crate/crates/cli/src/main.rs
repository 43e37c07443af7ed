//! `hurwitz`: command-line front end over hurwitz-core.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Format};

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(hurwitz_core::Error),
    Config(String),
}

impl From<hurwitz_core::Error> for CliError {
    fn from(e: hurwitz_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use hurwitz_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::BudgetExceeded(_) => EXIT_BUDGET,
                E::Verification(_) => EXIT_VERIFICATION,
                E::InvalidGroup(_)
                | E::Parse { .. }
                | E::GroupTooLarge { .. }
                | E::LatticeTooLarge { .. }
                | E::InvalidSetup(_)
                | E::IndexOutOfRange { .. }
                | E::Precondition(_)
                | E::Json(_) => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            },
        }
    }
}

/// A command's result: a table for CSV/text and a JSON value.
pub struct Report {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    pub text: Option<String>,
    /// A verification suite ran but did not pass.
    pub failed: bool,
}

impl Report {
    pub fn new(headers: Vec<&'static str>, rows: Vec<Vec<String>>, json: Value) -> Self {
        Report {
            headers,
            rows,
            json,
            text: None,
            failed: false,
        }
    }
}

fn render(cli: &Cli, report: &Report) -> Result<Vec<u8>, CliError> {
    let config = serde_json::to_value(cli).map_err(|e| CliError::Config(e.to_string()))?;
    let version = env!("CARGO_PKG_VERSION");
    let header = format!("# hurwitz {version} {config}\n");
    let mut out = Vec::new();
    match cli.format {
        Format::Json => {
            let doc = json!({
                "tool": "hurwitz",
                "version": version,
                "config": config,
                "result": report.json,
            });
            serde_json::to_writer_pretty(&mut out, &doc)
                .map_err(|e| CliError::Config(e.to_string()))?;
            out.push(b'\n');
        }
        Format::Csv => {
            out.extend_from_slice(header.as_bytes());
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&report.headers)?;
            for r in &report.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Format::Text => {
            out.extend_from_slice(header.as_bytes());
            match &report.text {
                Some(t) => out.extend_from_slice(t.as_bytes()),
                None => out.extend_from_slice(aligned(report).as_bytes()),
            }
        }
    }
    Ok(out)
}

fn aligned(report: &Report) -> String {
    let mut widths: Vec<usize> = report.headers.iter().map(|h| h.len()).collect();
    for r in &report.rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(report.headers.clone());
    for r in &report.rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let report = commands::dispatch(cli)?;
    let bytes = render(cli, &report)?;
    match &cli.output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
    }
    Ok(if report.failed { EXIT_VERIFICATION } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
