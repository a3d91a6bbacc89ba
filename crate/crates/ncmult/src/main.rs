use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ncmult::config::UsageError;
use ncmult::{experiments, parse_overrides, run, Request, RunError, EXIT_USAGE};

/// Runs one experiment and writes CSV tables plus `manifest.txt`.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// usage error.
#[derive(Parser, Debug)]
#[command(name = "ncmult", version)]
struct Cli {
    /// Experiment name, or `list` to print the catalog.
    experiment: String,

    /// File of `key = value` lines; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output directory [default: results/<experiment>].
    #[arg(long)]
    out: Option<PathBuf>,

    /// Parameter overrides, `--key value` or `key=value`. These win over the
    /// config file.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "PARAMS")]
    params: Vec<String>,
}

fn list() {
    for e in experiments::catalog() {
        let flag = if e.exploratory { " (exploratory)" } else { "" };
        println!("{:2}  {:24} {}{flag}", e.criterion, e.name, e.tag);
        for p in e.schema {
            println!("      --{} {:<18} {}", p.key, p.default, p.help);
        }
        for o in e.outputs {
            println!("      -> {o}");
        }
    }
}

/// Once the first parameter is seen clap collects everything after it, so
/// the run options may still be sitting in `params`.
fn split_run_options(cli: &mut Cli) -> Result<(), UsageError> {
    let mut rest = Vec::new();
    let mut it = std::mem::take(&mut cli.params).into_iter();
    while let Some(a) = it.next() {
        let (flag, inline) = match a.split_once('=') {
            Some((f, v)) if f.starts_with("--") => (f.to_string(), Some(v.to_string())),
            _ => (a.clone(), None),
        };
        if !matches!(flag.as_str(), "--config" | "--seed" | "--out") {
            rest.push(a);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().ok_or_else(|| UsageError(format!("missing value for `{flag}`")))?,
        };
        match flag.as_str() {
            "--config" => cli.config = Some(value.into()),
            "--out" => cli.out = Some(value.into()),
            _ => cli.seed = Some(value.parse().map_err(|_| UsageError(format!("invalid seed `{value}`")))?),
        }
    }
    cli.params = rest;
    Ok(())
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    if cli.experiment == "list" {
        list();
        return ExitCode::SUCCESS;
    }
    let overrides = match split_run_options(&mut cli).and_then(|()| parse_overrides(&cli.params)) {
        Ok(o) => o,
        Err(UsageError(e)) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let req = Request { experiment: cli.experiment, config_file: cli.config, seed: cli.seed, out: cli.out, overrides };
    match run(&req) {
        Ok(r) => {
            for c in &r.outcome.checks {
                let kind = if c.hard { "" } else { " (soft)" };
                println!("{}{kind}: {} {}", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
            }
            println!("wrote {} files to {}", r.written.len(), r.config.out.display());
            ExitCode::from(ncmult::exit_code(r.experiment, &r.outcome) as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(RunError::exit_code(&e) as u8)
        }
    }
}
