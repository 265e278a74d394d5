mod cli;
mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tefdyn::Error;

use crate::cli::Cli;

/// Flag tokens for the entries of a `--config` JSON object.
fn config_tokens(path: &std::path::Path) -> Result<Vec<OsString>, Error> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let object = value
        .as_object()
        .ok_or_else(|| Error::PreconditionViolated("config file must hold a JSON object".into()))?;
    let mut tokens = Vec::new();
    for (key, value) in object {
        let flag = OsString::from(format!("--{key}"));
        let text = match value {
            serde_json::Value::Bool(true) => {
                tokens.push(flag);
                continue;
            }
            serde_json::Value::Bool(false) | serde_json::Value::Null => continue,
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Array(items) => items
                .iter()
                .map(|v| v.as_str().map_or_else(|| v.to_string(), str::to_string))
                .collect::<Vec<_>>()
                .join(","),
            other => other.to_string(),
        };
        tokens.push(flag);
        tokens.push(OsString::from(text));
    }
    Ok(tokens)
}

/// `--config FILE` or `--config=FILE`, looked up before clap runs so that
/// required flags may come from the file.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let arg = arg.to_str()?;
        if arg == "--" {
            break;
        }
        if arg == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

fn parse(args: Vec<OsString>) -> Result<Cli, clap::Error> {
    let Some(path) = config_path(&args) else {
        return Cli::try_parse_from(args);
    };
    let tokens = config_tokens(&path).map_err(|e| {
        clap::Error::raw(
            clap::error::ErrorKind::InvalidValue,
            format!("cannot use config {}: {e}\n", path.display()),
        )
    })?;
    // Config values go right after the subcommand name, so explicit flags
    // later on the line override them.
    let names = Cli::subcommand_names();
    let at = args
        .iter()
        .skip(1)
        .position(|a| names.iter().any(|n| a == n.as_str()))
        .map_or(args.len(), |i| i + 2);
    let mut merged = args[..at].to_vec();
    merged.extend(tokens);
    merged.extend_from_slice(&args[at..]);
    Cli::try_parse_from(merged)
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match commands::run(&cli.command, cli.threads) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={message}", e.kind());
            ExitCode::from(1)
        }
    }
}
