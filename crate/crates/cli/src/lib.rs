//! The `signdeg` command-line workbench.
//!
//! Each run writes `<out>/<command>/<hash>/{manifest.json, result.*}`,
//! where the hash covers the canonical argument list. Exit codes: 0 ok,
//! 1 a deterministic check failed, 2 usage error, 3 size limit.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use signdeg::par::{with_jobs, Execution};

use args::{Cli, Command};
use error::{usage, CliError};
use output::{now_ms, out_root, write_run, RunManifest};

/// Parses, runs and reports; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn parse(args: &[String]) -> Result<Result<Cli, i32>, CliError> {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Ok(Err(e.exit_code()));
        }
    };
    let Some(path) = cli.config.clone() else {
        return Ok(Ok(cli));
    };
    let merged = merge_config(args, &path)?;
    Ok(Cli::try_parse_from(&merged).map_err(|e| {
        let _ = e.print();
        e.exit_code()
    }))
}

/// Appends `--key value` for each config line whose flag is not on the command line.
pub fn merge_config(args: &[String], path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = args.to_vec();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let flag = format!("--{}", key.trim());
        let present = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !present {
            out.push(flag);
            out.push(value.trim().to_string());
        }
    }
    Ok(out)
}

fn execution(jobs: Option<usize>) -> Execution {
    match jobs {
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    }
}

fn execute(args: &[String]) -> Result<i32, CliError> {
    let cli = match parse(args)? {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let exec = execution(cli.jobs);
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, exec, cli.jobs);
    }
    let started = now_ms();
    let (argv, outcome) = with_jobs(exec, cli.jobs, || commands::dispatch(&cli.command, exec))?;
    let root = out_root(cli.out.as_deref());
    let dir = write_run(&root, &argv.0[0], &argv.0, &outcome, started)?;
    say(&format!("{}\nwrote {}", outcome.summary, dir.join(outcome.artifact.file_name()).display()));
    Ok(if outcome.ok { 0 } else { 1 })
}

/// Re-runs the manifest's canonical arguments and compares the result bytes.
fn replay(manifest: &Path, exec: Execution, jobs: Option<usize>) -> Result<i32, CliError> {
    let text = fs::read_to_string(manifest).map_err(|e| usage(format!("cannot read {}: {e}", manifest.display())))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| usage(format!("not a run manifest: {e}")))?;
    let mut argv = vec!["signdeg".to_string()];
    argv.extend(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| usage(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage("manifest records a replay"));
    }
    let (canonical, outcome) = with_jobs(exec, jobs, || commands::dispatch(&cli.command, exec))?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let recorded = fs::read(dir.join(outcome.artifact.file_name()))?;
    let fresh = outcome.artifact.render();
    if canonical.0 != m.argv {
        return Err(CliError::Check("canonical arguments changed on replay".into()));
    }
    if recorded != fresh.as_bytes() {
        return Err(CliError::Check(format!(
            "{} differs from the recorded result",
            outcome.artifact.file_name()
        )));
    }
    say(&format!("replay of {} is byte-identical", m.argv.join(" ")));
    Ok(0)
}

/// Stdout line that tolerates a closed pipe; the artifacts are already on disk.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
