//! `sinkhorn` command-line tool.
//!
//! Exit status: 0 on success, 2 for a negative mathematical outcome
//! (no convergence, no finite termination, no nonzero diagonal, a
//! counterexample found), 1 for invalid input or I/O failure.

mod args;
mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use args::{Cli, Command, OutputFormat};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Scale(a) => commands::scale(a),
        Command::Classify(a) => commands::classify_cmd(a),
        Command::Support(a) => commands::support(a),
        Command::Falsify(a) => commands::falsify(a),
        Command::LemmaCheck(a) => commands::lemma_check(a),
        Command::Gen(a) => commands::gen(a),
    };
    match outcome {
        Ok(outcome) => {
            let rendered = match cli.output {
                OutputFormat::Text => outcome.text,
                OutputFormat::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&outcome.json).expect("values serialize"))
                }
            };
            // A closed pipe (e.g. `| head`) is not an error of ours.
            let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
            if outcome.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
