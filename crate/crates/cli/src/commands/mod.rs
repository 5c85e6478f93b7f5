mod table;
mod verify;

use std::time::Instant;

use num_traits::Signed;
use serde_json::{json, Value};
use signdeg::exactlp::rational::{format_rational, Fraction};
use signdeg::exactlp::Rational;
use signdeg::hardhs::{hardness_report, ReportParams};
use signdeg::par::Execution;
use signdeg::rapprox::{default_tolerance, rplus_bracket, sign_grid_function};
use signdeg::signrep::{threshold_degree, MAX_DEGTHR_POINTS};

use crate::args::{Argv, Command, DegthrArgs, RapproxArgs, ReportArgs};
use crate::error::{usage, CliError};
use crate::output::{doc, Artifact, Outcome, Stage};
use crate::spec::parse_function;

pub use table::table;
pub use verify::verify;

/// Runs a command without touching the filesystem. The canonical argument
/// list starts with the command name.
pub fn dispatch(cmd: &Command, exec: Execution) -> Result<(Argv, Outcome), CliError> {
    match cmd {
        Command::Degthr(a) => degthr(a),
        Command::Rapprox(a) => rapprox(a),
        Command::Verify(a) => verify(a, exec),
        Command::Table(a) => table(a, exec),
        Command::Report(a) => report(a, exec),
        Command::Replay(_) => Err(usage("replay cannot be nested")),
    }
}

/// Stage list with a running clock.
pub(crate) struct Stages {
    list: Vec<Stage>,
    clock: Instant,
}

impl Stages {
    pub fn new() -> Self {
        Self {
            list: vec![],
            clock: Instant::now(),
        }
    }

    pub fn record(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.list.push(Stage {
            name: name.to_string(),
            passed,
            detail,
            elapsed: self.clock.elapsed(),
        });
        self.clock = Instant::now();
    }

    pub fn into_vec(self) -> Vec<Stage> {
        self.list
    }
}

pub(crate) fn frac(r: &Rational) -> String {
    Fraction(r).to_string()
}

pub(crate) fn rjson(r: &Rational) -> Value {
    json!(format_rational(r))
}

fn degthr(a: &DegthrArgs) -> Result<(Argv, Outcome), CliError> {
    let f = parse_function(&a.function)?;
    let mut stages = Stages::new();
    let cert = threshold_degree(&f.function, &f.id)?;
    stages.record("solve", true, None);
    let checked = cert.verify(&f.function);
    stages.record("certificate", checked.is_ok(), checked.as_ref().err().map(|e| e.to_string()));
    let ok = checked.is_ok();
    let summary = format!("degthr({}) = {}", f.id, cert.degree);
    let artifact = Artifact::Json(doc(vec![
        ("function_id", json!(f.id)),
        ("points", json!(f.function.len())),
        ("degree", json!(cert.degree)),
        ("certificate_verified", json!(ok)),
        ("certificate", serde_json::to_value(&cert)?),
    ]));
    let mut argv = Argv::new(&["degthr"]);
    argv.flag("fn", &f.id);
    Ok((
        argv,
        Outcome {
            summary,
            artifact,
            stages: stages.into_vec(),
            ok,
            seeds: vec![],
        },
    ))
}

fn rapprox(a: &RapproxArgs) -> Result<(Argv, Outcome), CliError> {
    let mut argv = Argv::new(&["rapprox"]);
    let (id, f) = match (a.grid, &a.function) {
        (Some(n), _) => {
            if n == 0 {
                return Err(usage("--grid needs N ≥ 1"));
            }
            if 2 * n > MAX_DEGTHR_POINTS {
                return Err(CliError::Limit(format!("grid of {} points", 2 * n)));
            }
            argv.flag("grid", n);
            (format!("sign-grid:{n}"), sign_grid_function(n))
        }
        (None, Some(spec)) => {
            let f = parse_function(spec)?;
            argv.flag("fn", &f.id);
            (f.id, f.function)
        }
        (None, None) => return Err(usage("give --fn or --grid")),
    };
    if f.len() > MAX_DEGTHR_POINTS {
        return Err(CliError::Limit(format!(
            "domain has {} points, limit is {MAX_DEGTHR_POINTS}",
            f.len()
        )));
    }
    let tol = a.tol.clone().unwrap_or_else(default_tolerance);
    argv.flag("d", a.d).rational("tol", &tol);
    let mut stages = Stages::new();
    let bracket = rplus_bracket(&f, a.d, &tol, &id)?;
    stages.record("bisection", true, Some(format!("{} LP solves", bracket.lp_solves)));
    let checked = bracket.verify(&f);
    stages.record("checker", checked.is_ok(), checked.as_ref().err().map(|e| e.to_string()));
    let summary = format!("R+({id}, {}) in [{}, {}]", a.d, frac(&bracket.lo), frac(&bracket.hi));
    let artifact = Artifact::Json(doc(vec![
        ("function_id", json!(id)),
        ("degree", json!(a.d)),
        ("lo", rjson(&bracket.lo)),
        ("hi", rjson(&bracket.hi)),
        ("checker_verified", json!(checked.is_ok())),
        ("bracket", serde_json::to_value(&bracket)?),
    ]));
    Ok((
        argv,
        Outcome {
            summary,
            artifact,
            ok: checked.is_ok(),
            stages: stages.into_vec(),
            seeds: vec![],
        },
    ))
}

fn report(a: &ReportArgs, exec: Execution) -> Result<(Argv, Outcome), CliError> {
    let defaults = ReportParams::default();
    let params = ReportParams {
        eps: a.eps.clone().unwrap_or(defaults.eps),
        zeta: a.zeta.clone().unwrap_or(defaults.zeta),
        cutoff: a.cutoff.unwrap_or(defaults.cutoff),
        degree: a.d.unwrap_or(defaults.degree),
        tol: a.tol.clone().unwrap_or(defaults.tol),
        trials: a.trials.unwrap_or(defaults.trials),
        converse_dmax: a.dmax.unwrap_or(defaults.converse_dmax),
    };
    let mut argv = Argv::new(&["report"]);
    argv.flag("n", a.n)
        .flag("k", a.k)
        .flag("seed", a.seed)
        .rational("eps", &params.eps)
        .rational("zeta", &params.zeta)
        .flag("cutoff", params.cutoff)
        .flag("d", params.degree)
        .rational("tol", &params.tol)
        .flag("trials", params.trials)
        .flag("dmax", params.converse_dmax);
    let run = hardness_report(a.n, a.k, a.seed, &params, exec)?;
    let r = &run.report;
    let stages = run
        .timings
        .iter()
        .map(|(name, elapsed)| {
            let (passed, detail) = match name.as_str() {
                "spectrum" => (r.spectrum.pass, None),
                "moment_matching" => (r.moment_matching.passed, r.moment_matching.detail.clone()),
                "reduction" => r
                    .reduction
                    .as_ref()
                    .map_or((true, Some("skipped".into())), |s| (s.passed, s.detail.clone())),
                "brackets" => (!r.brackets.applicable || !r.brackets.margin.is_negative(), None),
                _ => (true, None),
            };
            Stage {
                name: name.clone(),
                passed,
                detail,
                elapsed: *elapsed,
            }
        })
        .collect();
    let summary = format!(
        "hard:{},{},{}: spectrum {}, moment matching {}, degthr(h∧h) ≥ {}, consistent = {}",
        a.n,
        a.k,
        a.seed,
        if r.spectrum.pass { "pass" } else { "fail" },
        if r.moment_matching.passed { "pass" } else { "fail" },
        r.degthr_conjunction_lower,
        r.consistent
    );
    Ok((
        argv,
        Outcome {
            summary,
            artifact: Artifact::Json(serde_json::to_value(r)?),
            stages,
            ok: r.consistent,
            seeds: vec![a.seed],
        },
    ))
}
