use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use signdeg::exactlp::rational::format_rational;
use signdeg::exactlp::{parse_rational, Rational};

use crate::error::{usage, CliError};
use crate::output::Format;

#[derive(Debug, Clone, Parser)]
#[command(name = "signdeg", version, about = "Exact threshold degree, rational approximation and hard-halfspace checks")]
pub struct Cli {
    /// Root for run directories (default: $SIGNDEG_OUT, then ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent seeds and cells; 1 runs sequentially.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// File of `key=value` lines used as defaults for flags not given.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Threshold degree with witness and lower-degree Farkas certificates.
    Degthr(DegthrArgs),
    /// Certified bracket for R⁺(f, d).
    Rapprox(RapproxArgs),
    /// Run one family of checks over seeds or parameters.
    Verify(VerifyArgs),
    /// Generate a CSV table.
    Table(TableArgs),
    /// End-to-end report for one random hard halfspace.
    Report(ReportArgs),
    /// Re-run a manifest and compare the result byte for byte.
    Replay(ReplayArgs),
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Inclusive seed range `a..b`, or a single seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeds {
    pub start: u64,
    pub end: u64,
}

impl Seeds {
    pub fn list(self) -> Vec<u64> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for Seeds {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let err = || format!("expected `a..b` or a single seed, found `{s}`");
        let (a, b) = s.split_once("..").unwrap_or((s, s));
        let start: u64 = a.trim().parse().map_err(|_| err())?;
        let end: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| err())?;
        if end < start {
            return Err(err());
        }
        Ok(Self { start, end })
    }
}

impl Display for Seeds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// `a,b,c` or an inclusive range `a..b`.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    let err = || usage(format!("expected `a,b,c` or `a..b`, found `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| err())?;
        let b: usize = b.trim().parse().map_err(|_| err())?;
        if b < a {
            return Err(err());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| err())).collect()
}

pub fn list_text(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Args)]
pub struct DegthrArgs {
    /// Function spec, e.g. `maj:3`, `parity:2`, `halfspace:1,2,-4`, or a JSON file.
    #[arg(long = "fn")]
    pub function: String,
}

#[derive(Debug, Clone, Args)]
pub struct RapproxArgs {
    #[arg(long = "fn", conflicts_with = "grid", required_unless_present = "grid")]
    pub function: Option<String>,
    /// Use sign on {±1, …, ±N} instead of a function spec.
    #[arg(long, alias = "N")]
    pub grid: Option<usize>,
    #[arg(long)]
    pub d: u32,
    /// Bracket width (default 2^-30).
    #[arg(long, value_parser = rational)]
    pub tol: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Resheto,
    MomentMatch,
    Reduction,
    Brs,
    Converse,
    KpDensity,
    Parseval,
    Symmetrization,
    ZeroLaw,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::Resheto => "resheto",
            Theorem::MomentMatch => "moment-match",
            Theorem::Reduction => "reduction",
            Theorem::Brs => "brs",
            Theorem::Converse => "converse",
            Theorem::KpDensity => "kp-density",
            Theorem::Parseval => "parseval",
            Theorem::Symmetrization => "symmetrization",
            Theorem::ZeroLaw => "zero-law",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub id: Theorem,
    /// Dimension, or a list `a,b,c` / range `a..b` where several are swept.
    #[arg(long)]
    pub n: Option<String>,
    /// Largest sign-grid size.
    #[arg(long = "N")]
    pub grid: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    #[arg(long, value_parser = rational)]
    pub zeta: Option<Rational>,
    #[arg(long)]
    pub seeds: Option<Seeds>,
    #[arg(long)]
    pub cutoff: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_parser = rational)]
    pub tol: Option<Rational>,
    #[arg(long)]
    pub dmax: Option<u32>,
    #[arg(long = "fn")]
    pub function: Option<String>,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl VerifyArgs {
    /// Flags that were given, by name.
    pub fn given(&self) -> Vec<&'static str> {
        let mut v = vec![];
        let mut add = |name, present: bool| {
            if present {
                v.push(name)
            }
        };
        add("n", self.n.is_some());
        add("N", self.grid.is_some());
        add("k", self.k.is_some());
        add("eps", self.eps.is_some());
        add("zeta", self.zeta.is_some());
        add("seeds", self.seeds.is_some());
        add("cutoff", self.cutoff.is_some());
        add("d", self.d.is_some());
        add("trials", self.trials.is_some());
        add("tol", self.tol.is_some());
        add("dmax", self.dmax.is_some());
        add("fn", self.function.is_some());
        add("cap", self.cap.is_some());
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    SignGridR,
    MajRdeg,
    DegthrConj,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub kind: TableKind,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long = "N")]
    pub grid: Option<usize>,
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    #[arg(long)]
    pub dmax: Option<u32>,
    #[arg(long, value_parser = rational)]
    pub tol: Option<Rational>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub mmax: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl TableArgs {
    pub fn given(&self) -> Vec<&'static str> {
        [
            ("n", self.n.is_some()),
            ("N", self.grid.is_some()),
            ("eps", self.eps.is_some()),
            ("dmax", self.dmax.is_some()),
            ("tol", self.tol.is_some()),
            ("family", self.family.is_some()),
            ("mmax", self.mmax.is_some()),
        ]
        .into_iter()
        .filter(|(_, p)| *p)
        .map(|(n, _)| n)
        .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    #[arg(long, value_parser = rational)]
    pub zeta: Option<Rational>,
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Bracket degree.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_parser = rational)]
    pub tol: Option<Rational>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest degree tried for the conjunction lower bound.
    #[arg(long)]
    pub dmax: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Path to a `manifest.json`.
    pub manifest: PathBuf,
}

/// Canonical argument list under construction.
#[derive(Debug, Clone, Default)]
pub struct Argv(pub Vec<String>);

impl Argv {
    pub fn new(words: &[&str]) -> Self {
        Self(words.iter().map(|s| s.to_string()).collect())
    }

    pub fn flag(&mut self, name: &str, value: impl Display) -> &mut Self {
        self.0.push(format!("--{name}"));
        self.0.push(value.to_string());
        self
    }

    pub fn rational(&mut self, name: &str, value: &Rational) -> &mut Self {
        self.flag(name, format_rational(value))
    }
}

/// Rejects flags that the selected check or table does not read.
pub fn only(given: &[&str], allowed: &[&str], what: &str) -> Result<(), CliError> {
    match given.iter().find(|g| !allowed.contains(g)) {
        Some(g) => Err(usage(format!("--{g} is not used by {what}"))),
        None => Ok(()),
    }
}
