//! The `scarf` command line: argument parsing, the subcommands, and their
//! JSON/CSV output.

pub mod args;
pub mod commands;
pub mod expr;
pub mod output;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use args::{Command, OutputOpts};
use output::{write_atomic, Document};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

/// What a subcommand produced: the main document, any side files, and lines
/// meant for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub doc: Document,
    pub extra_files: Vec<(PathBuf, Document)>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(doc: Document) -> Self {
        Self {
            doc,
            extra_files: Vec::new(),
            notes: Vec::new(),
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Coeffs(a) => commands::coeffs(a),
        Command::Poles(a) => commands::poles(a),
        Command::Boundstates(a) => commands::boundstates(a),
        Command::Zeros(a) => commands::zeros(a),
        Command::DetS(a) => commands::det_s(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Report(a) => report::report(a),
    }
}

fn output_opts(cmd: &Command) -> &OutputOpts {
    match cmd {
        Command::Coeffs(a) => &a.output,
        Command::Poles(a) => &a.output,
        Command::Boundstates(a) => &a.output,
        Command::Zeros(a) => &a.output,
        Command::DetS(a) => &a.output,
        Command::Oracle(a) => &a.output,
        Command::Report(a) => &a.output,
    }
}

/// Runs a command and writes its output. Nothing is written unless the
/// whole computation succeeded.
pub fn run(cmd: &Command) -> Result<(), CliError> {
    let out = execute(cmd)?;
    let opts = output_opts(cmd);
    let format = opts.format();
    let io_err = |e: std::io::Error| CliError::Compute(format!("writing output: {e}"));
    let main = out.doc.render(format).map_err(io_err)?;
    let extras = out
        .extra_files
        .iter()
        .map(|(p, d)| d.render(format).map(|b| (p, b)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err)?;
    for note in &out.notes {
        eprintln!("{note}");
    }
    for (path, bytes) in extras {
        write_atomic(path, &bytes).map_err(io_err)?;
    }
    match &opts.out {
        Some(path) => write_atomic(path, &main).map_err(io_err)?,
        None => std::io::stdout().lock().write_all(&main).map_err(io_err)?,
    }
    Ok(())
}
