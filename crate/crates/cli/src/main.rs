mod args;
mod commands;
mod input;

use std::fmt::Display;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};
use testspaces::{Classify, ErrorClass};

use args::{Cli, Format};

pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            class: ErrorClass::Validation,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.class {
            ErrorClass::Validation => 2,
            ErrorClass::CapExceeded => 3,
            ErrorClass::Undecided => 4,
        }
    }

    fn to_json(&self) -> Value {
        let class = match self.class {
            ErrorClass::Validation => "validation",
            ErrorClass::CapExceeded => "cap_exceeded",
            ErrorClass::Undecided => "undecided",
        };
        json!({"error": {"class": class, "message": self.message}})
    }
}

/// Converts library errors, keeping their class.
pub trait OrFail<T> {
    fn or_fail(self) -> Result<T, CliError>;
}

impl<T, E: Classify + Display> OrFail<T> for Result<T, E> {
    fn or_fail(self) -> Result<T, CliError> {
        self.map_err(|e| CliError {
            class: e.class(),
            message: e.to_string(),
        })
    }
}

/// What a command produced: a JSON result, optionally with a CSV rendering.
pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
}

impl Output {
    pub fn json(result: Value) -> Self {
        Output { result, csv: None }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    let config = serde_json::to_value(cli).expect("config serializes");
    let started = Instant::now();
    let out = commands::dispatch(&cli.command)?;
    let elapsed_ms = started.elapsed().as_millis() as u64;
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "elapsed_ms": elapsed_ms,
    });
    Ok(match (cli.format, out.csv) {
        (Format::Csv, Some(csv)) => format!(
            "# {}\n{csv}",
            json!({"version": meta["version"], "config": meta["config"]})
        ),
        (Format::Csv, None) => return Err(CliError::validation("this command has no CSV output")),
        (Format::Json, _) => {
            let doc = json!({"meta": meta, "result": out.result});
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("output serializes"))
        }
    })
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail(CliError::validation(e.to_string().trim_end()));
        }
    };
    let text = match run(&cli) {
        Ok(text) => text,
        Err(e) => return fail(e),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => fail(CliError::validation(message)),
    }
}
