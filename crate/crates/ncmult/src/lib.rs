//! Experiment runner for `ncmult-core`: configuration, text formats, the
//! experiment catalog and deterministic CSV output.

pub mod config;
pub mod experiments;
pub mod formats;
pub mod output;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use config::{parse_config_text, ExperimentConfig, Params, UsageError};
use experiments::Experiment;
use output::Outcome;

pub const DEFAULT_SEED: u64 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// What the command line asked for, before validation.
#[derive(Debug, Clone, Default)]
pub struct Request {
    pub experiment: String,
    pub config_file: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// `key value` overrides in command-line order.
    pub overrides: Vec<(String, String)>,
}

/// Turns trailing arguments into `(key, value)` pairs. Accepts `--key value`,
/// `--key=value` and `key=value`.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, UsageError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(key) = a.strip_prefix("--") {
            if let Some((k, v)) = key.split_once('=') {
                out.push((k.to_string(), v.to_string()));
            } else {
                let v = it.next().ok_or_else(|| UsageError(format!("missing value for `--{key}`")))?;
                out.push((key.to_string(), v.clone()));
            }
        } else if let Some((k, v)) = a.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            return Err(UsageError(format!("unexpected argument `{a}`; use `--key value`")));
        }
    }
    if let Some((k, _)) = out.iter().find(|(k, _)| k.is_empty()) {
        return Err(UsageError(format!("empty key in `{k}=`")));
    }
    Ok(out)
}

/// Validates a request against the catalog and the experiment's schema.
/// Precedence: schema defaults, then the config file, then `--key value`
/// overrides, then `--seed`.
pub fn resolve(req: &Request) -> Result<(&'static Experiment, ExperimentConfig), UsageError> {
    let exp = experiments::find(&req.experiment).ok_or_else(|| {
        let names: Vec<&str> = experiments::catalog().iter().map(|e| e.name).collect();
        UsageError(format!("unknown experiment `{}`; available: {}", req.experiment, names.join(", ")))
    })?;
    let mut pairs = Vec::new();
    if let Some(path) = &req.config_file {
        let text = fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        pairs.extend(parse_config_text(&text)?);
    }
    pairs.extend(req.overrides.iter().cloned());
    let (params, file_seed) = Params::resolve(exp.schema, &pairs)?;
    let seed = req.seed.or(file_seed).unwrap_or(DEFAULT_SEED);
    let out = req.out.clone().unwrap_or_else(|| PathBuf::from("results").join(exp.name));
    Ok((exp, ExperimentConfig { experiment: exp.name.to_string(), params, seed, out }))
}

/// Runs an experiment without touching the filesystem.
pub fn execute(exp: &Experiment, cfg: &ExperimentConfig) -> Result<Outcome, String> {
    (exp.run)(&cfg.params, cfg.seed)
}

/// Exit status for a finished run.
pub fn exit_code(exp: &Experiment, outcome: &Outcome) -> i32 {
    if exp.exploratory || outcome.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// The resolved configuration as a config file, followed by check results as
/// comments. Contains nothing that varies between identical runs.
pub fn manifest(exp: &Experiment, cfg: &ExperimentConfig, outcome: &Outcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# experiment: {}", exp.name);
    let _ = writeln!(s, "# checks: {}", exp.tag);
    let _ = writeln!(s, "# criterion: {}{}", exp.criterion, if exp.exploratory { " (exploratory)" } else { "" });
    let _ = writeln!(s, "seed = {}", cfg.seed);
    for (k, v) in cfg.params.raw_pairs() {
        let _ = writeln!(s, "{k} = {v}");
    }
    for t in &outcome.tables {
        let _ = writeln!(s, "# file: {}.csv ({} rows)", t.name, t.rows.len());
    }
    for (name, _) in &outcome.artifacts {
        let _ = writeln!(s, "# file: {name}");
    }
    for c in &outcome.checks {
        let kind = if c.hard { "" } else { " (soft)" };
        let _ = writeln!(s, "# check {}{kind}: {} {}", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    let _ = writeln!(s, "# status: {}", if exit_code(exp, outcome) == EXIT_PASS { "pass" } else { "FAIL" });
    s
}

#[derive(Debug)]
pub enum RunError {
    Usage(UsageError),
    /// The experiment could not produce a result.
    Failed(String),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Failed(_) | RunError::Io(_) => EXIT_FAIL,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(e) => write!(f, "usage error: {e}"),
            RunError::Failed(e) => write!(f, "experiment failed: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

pub struct RunResult {
    pub experiment: &'static Experiment,
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    pub written: Vec<PathBuf>,
}

/// Resolves, runs and writes one experiment.
pub fn run(req: &Request) -> Result<RunResult, RunError> {
    let (exp, cfg) = resolve(req).map_err(RunError::Usage)?;
    let outcome = execute(exp, &cfg).map_err(RunError::Failed)?;
    let written = output::write_run(&cfg.out, &manifest(exp, &cfg, &outcome), &outcome).map_err(RunError::Io)?;
    Ok(RunResult { experiment: exp, config: cfg, outcome, written })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn override_forms() {
        let o = parse_overrides(&strings(&["--n", "4", "--p=inf", "group=dihedral4"])).unwrap();
        assert_eq!(o, vec![("n".into(), "4".into()), ("p".into(), "inf".into()), ("group".into(), "dihedral4".into())]);
        assert!(parse_overrides(&strings(&["--n"])).is_err());
        assert!(parse_overrides(&strings(&["stray"])).is_err());
        assert!(parse_overrides(&strings(&["=3"])).is_err());
    }

    #[test]
    fn resolution_precedence() {
        let dir = std::env::temp_dir().join(format!("ncmult-resolve-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.cfg");
        fs::write(&cfg, "instances = 7\nseed = 5\n").unwrap();
        let mut req = Request { experiment: "theoremB-suite".into(), config_file: Some(cfg), ..Default::default() };
        let (_, c) = resolve(&req).unwrap();
        assert_eq!((c.params.int("instances"), c.seed), (7, 5));
        req.overrides = vec![("instances".into(), "3".into())];
        req.seed = Some(9);
        let (_, c) = resolve(&req).unwrap();
        assert_eq!((c.params.int("instances"), c.seed), (3, 9));
        req.overrides = vec![("bogus".into(), "1".into())];
        assert!(resolve(&req).unwrap_err().0.contains("`bogus`"));
        req.experiment = "nope".into();
        assert!(resolve(&req).is_err());
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn manifest_reparses_as_config() {
        let req = Request { experiment: "jodeit".into(), overrides: vec![("symbols".into(), "3".into())], ..Default::default() };
        let (exp, cfg) = resolve(&req).unwrap();
        let outcome = execute(exp, &cfg).unwrap();
        assert!(outcome.passed());
        let text = manifest(exp, &cfg, &outcome);
        let (params, seed) = Params::resolve(exp.schema, &parse_config_text(&text).unwrap()).unwrap();
        assert_eq!(params, cfg.params);
        assert_eq!(seed, Some(cfg.seed));
    }
}
