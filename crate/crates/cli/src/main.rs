// SPDX-License-Identifier: Apache-2.0
//! `tropvert`: scattering diagrams, tropical counts and curve invariants
//! from the command line.
//!
//! Exit codes: 0 success, 1 other failure (including failed verification
//! checks), 2 invalid configuration, 3 no generic perturbation found,
//! 4 truncation order too small.

mod args;
mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::Value;

use args::*;
use commands::{execute, schema, ChecksFailed, SchemaError, Task};

#[derive(Parser, Debug)]
#[command(name = "tropvert", version, about = "Exact scattering diagrams and curve counts in the tropical vertex group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    Scatter(ScatterArgs),
    Commutator(CommutatorArgs),
    Gw(GwArgs),
    GradedGw(GradedGwArgs),
    TropicalCount(TropicalCountArgs),
    Bps(BpsArgs),
    Multicover(MulticoverArgs),
    Verify(VerifyArgs),
    /// Run a JSON configuration: {"command": ..., <options>, "output": ...}.
    Run {
        /// Configuration path, or "-" for standard input.
        config: String,
    },
}

/// Splits a configuration document into its task and output options.
fn load_config(src: &str) -> Result<(Task, OutputArgs)> {
    let text = if src == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(src).with_context(|| format!("cannot read {src}"))?
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| schema(format!("{src}: {e}")))?;
    let Value::Object(mut obj) = value else {
        return Err(schema("a configuration must be a JSON object"));
    };
    let command = match obj.remove("command") {
        Some(Value::String(c)) => c,
        Some(_) => return Err(schema("\"command\" must be a string")),
        None => return Err(schema("missing \"command\"")),
    };
    let mut out_obj = serde_json::Map::new();
    for key in OutputArgs::KEYS {
        if let Some(v) = obj.remove(key) {
            out_obj.insert(key.to_string(), v);
        }
    }
    let out: OutputArgs = serde_json::from_value(Value::Object(out_obj)).map_err(|e| schema(e.to_string()))?;
    Ok((Task::from_config(&command, Value::Object(obj))?, out))
}

/// Command-line output flags take precedence over the configuration.
fn merge(cli: OutputArgs, cfg: OutputArgs) -> OutputArgs {
    let pick = |a: Option<PathBuf>, b: Option<PathBuf>| a.or(b);
    OutputArgs {
        output: pick(cli.output, cfg.output),
        format: cli.format.or(cfg.format),
        svg: pick(cli.svg, cfg.svg),
        curves: pick(cli.curves, cfg.curves),
        emit_curves: cfg.emit_curves,
        emit_svg: cfg.emit_svg,
    }
}

fn run(cli: Cli) -> Result<Option<ChecksFailed>> {
    let (task, out) = match cli.command {
        Command::Scatter(a) => (Task::Scatter(a), cli.out),
        Command::Commutator(a) => (Task::Commutator(a), cli.out),
        Command::Gw(a) => (Task::Gw(a), cli.out),
        Command::GradedGw(a) => (Task::GradedGw(a), cli.out),
        Command::TropicalCount(a) => (Task::TropicalCount(a), cli.out),
        Command::Bps(a) => (Task::Bps(a), cli.out),
        Command::Multicover(a) => (Task::Multicover(a), cli.out),
        Command::Verify(a) => (Task::Verify(a), cli.out),
        Command::Run { config } => {
            let (task, cfg_out) = load_config(&config)?;
            (task, merge(cli.out, cfg_out))
        }
    };
    let outcome = execute(&task, &out)?;
    output::commit(&outcome.artifacts)?;
    Ok(outcome.failure)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<SchemaError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<tropvert::Error>() {
        Some(tropvert::Error::Genericity { .. }) => 3,
        Some(tropvert::Error::InsufficientOrder { .. }) => 4,
        Some(
            tropvert::Error::InvalidArgument(_)
            | tropvert::Error::Parse(_)
            | tropvert::Error::Json(_)
            | tropvert::Error::UnknownVariable(_)
            | tropvert::Error::InvalidContext(_)
            | tropvert::Error::InvalidWall(_)
            | tropvert::Error::ZeroVector,
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failed)) => {
            eprintln!("tropvert: {failed}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("tropvert: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kinds() {
        let generic = anyhow::Error::from(tropvert::Error::Genericity { attempts: 32, last_seed: 31 });
        assert_eq!(exit_code(&generic), 3);
        let order = anyhow::Error::from(tropvert::Error::InsufficientOrder { have: 4, need: 5 });
        assert_eq!(exit_code(&order), 4);
        assert!(format!("{order}").contains('5'));
        assert_eq!(exit_code(&schema("bad")), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 1);
    }

    #[test]
    fn config_splits_output_keys() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"command":"bps","series":["9","63/4",55],"w":1,"output":"x.json","emit_svg":false}"#)
            .unwrap();
        let (task, out) = load_config(p.to_str().unwrap()).unwrap();
        assert!(matches!(task, Task::Bps(ref b) if b.series.len() == 3));
        assert_eq!(out.output, Some(PathBuf::from("x.json")));
    }

    #[test]
    fn config_rejects_unknown_keys_and_commands() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"command":"gw","l1":3,"l2":3,"order":6,"bogus":1}"#).unwrap();
        let err = load_config(p.to_str().unwrap()).err().unwrap();
        assert_eq!(exit_code(&err), 2);
        std::fs::write(&p, r#"{"command":"nope"}"#).unwrap();
        assert_eq!(exit_code(&load_config(p.to_str().unwrap()).err().unwrap()), 2);
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
