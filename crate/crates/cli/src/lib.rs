//! Command-line front end for `alexsheaf`: reads a sectioned text document
//! describing a poset, sheaves, morphisms, opens and sections, runs one
//! computation or verification, and prints a report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the report
//! carries a witness), 2 for unreadable input or bad usage.

pub mod commands;
pub mod document;
pub mod error;
pub mod model;
pub mod normalize;
pub mod report;

use std::path::PathBuf;

use alexsheaf::{Field, DEFAULT_MAX_ELEMENTS};
use clap::{Args, Parser, Subcommand};

use crate::commands::Settings;
use crate::error::CliError;
use crate::model::Model;
use crate::report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "alexsheaf",
    version,
    about = "Exact computations with cellular sheaves on finite posets"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Scalar field, `q` or `fp:<prime>`; overrides the document's setting.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<Field>,
    /// Seed for sampled covers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Refuse to enumerate open sets of larger posets.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ELEMENTS)]
    pub max_elements: usize,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate the document and run every verification suite.
    Check { file: PathBuf },
    /// Sections over an open set: dimension and canonical basis.
    Sections {
        file: PathBuf,
        /// Union of `star:x`, `open:NAME` and bare elements, comma-separated.
        #[arg(long)]
        open: String,
        #[arg(long)]
        sheaf: Option<String>,
    },
    /// Compare the direct-limit stalk with the value at a point.
    Stalk {
        file: PathBuf,
        /// Defaults to every point.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        sheaf: Option<String>,
    },
    /// Collapse the preorder to its poset of equivalence classes.
    Quotient { file: PathBuf },
    /// Check naturality and classify a morphism.
    Morphism {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Glue named local sections over the union of their opens.
    Glue {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        sections: Vec<String>,
    },
    /// List every open set.
    Opens { file: PathBuf },
}

fn parse_field(text: &str) -> Result<Field, String> {
    text.parse::<Field>().map_err(|e| e.to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Sections { .. } => "sections",
            Command::Stalk { .. } => "stalk",
            Command::Quotient { .. } => "quotient",
            Command::Morphism { .. } => "morphism",
            Command::Glue { .. } => "glue",
            Command::Opens { .. } => "opens",
        }
    }

    fn file(&self) -> &PathBuf {
        match self {
            Command::Check { file }
            | Command::Sections { file, .. }
            | Command::Stalk { file, .. }
            | Command::Quotient { file }
            | Command::Morphism { file, .. }
            | Command::Glue { file, .. }
            | Command::Opens { file } => file,
        }
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs a parsed command against document text.
pub fn execute(cli: &Cli, text: &str) -> Result<Report, CliError> {
    let settings = Settings {
        seed: cli.global.seed,
        max_elements: cli.global.max_elements,
    };
    let doc = document::parse(text)?;
    let model = Model::new(doc, cli.global.field)?;
    let result = match &cli.command {
        Command::Check { .. } => commands::check(&model, &settings),
        Command::Sections { open, sheaf, .. } => {
            commands::sections(&model, &settings, open, sheaf.as_deref())
        }
        Command::Stalk { point, sheaf, .. } => {
            commands::stalk(&model, &settings, point.as_deref(), sheaf.as_deref())
        }
        Command::Quotient { .. } => commands::quotient(&model, &settings),
        Command::Morphism { name, .. } => commands::morphism(&model, &settings, name.as_deref()),
        Command::Glue { sections, .. } => commands::glue(&model, &settings, sections),
        Command::Opens { .. } => commands::opens(&model, &settings),
    };
    result.or_else(|e| commands::failure_report(cli.command.name(), &settings, e))
}

/// Parses arguments, reads the document and renders the outcome.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let path = cli.command.file();
    let result = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
        .and_then(|text| execute(&cli, &text));
    match result {
        Ok(report) => Outcome {
            code: report.exit_code(),
            stdout: if cli.global.json {
                report.to_json()
            } else {
                report.to_text()
            },
            stderr: String::new(),
        },
        Err(e) => {
            let message = match e.location() {
                Some(_) => format!("error: {}: {e}", path.display()),
                None => format!("error: {e}"),
            };
            let stdout = if cli.global.json {
                let mut report = Report::new(cli.command.name(), cli.global.seed);
                report.error("input", message.trim_start_matches("error: "));
                if let Some((line, col)) = e.location() {
                    report.set("location", serde_json::json!({"line": line, "column": col}));
                }
                report.to_json()
            } else {
                String::new()
            };
            Outcome {
                code: e.exit_code(),
                stdout,
                stderr: message + "\n",
            }
        }
    }
}
