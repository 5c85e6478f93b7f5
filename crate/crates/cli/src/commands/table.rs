//! `table <kind>`: CSV tables with exact `num/den` cells.

use num_traits::Zero;
use serde_json::json;
use signdeg::boolfn::{block_symmetrize, conjunction, majority, monomial_basis, Block};
use signdeg::exactlp::rational::{pow2_neg, ratio};
use signdeg::exactlp::{verify_farkas, Rational};
use signdeg::par::{self, Execution};
use signdeg::rapprox::{rdeg, rplus_lp, rplus_sign_grid};
use signdeg::signrep::{threshold_degree, to_dense};

use super::{frac, Stages};
use crate::args::{list_text, only, parse_list, Argv, TableArgs, TableKind};
use crate::error::{usage, CliError};
use crate::output::{doc, Artifact, Format, Outcome, Table};

/// Bracket cell `lo..hi`.
fn bracket_cell(lo: &Rational, hi: &Rational) -> String {
    format!("{}..{}", frac(lo), frac(hi))
}

pub fn table(a: &TableArgs, exec: Execution) -> Result<(Argv, Outcome), CliError> {
    let given = a.given();
    let mut stages = Stages::new();
    let (kind, mut argv, t, notes) = match a.kind {
        TableKind::SignGridR => {
            only(&given, &["N", "dmax", "tol"], "table sign-grid-r")?;
            let (argv, t, notes) = sign_grid_r(a, exec)?;
            ("sign-grid-r", argv, t, notes)
        }
        TableKind::MajRdeg => {
            only(&given, &["n", "eps"], "table maj-rdeg")?;
            let (argv, t, notes) = maj_rdeg(a, exec)?;
            ("maj-rdeg", argv, t, notes)
        }
        TableKind::DegthrConj => {
            only(&given, &["family", "mmax"], "table degthr-conj")?;
            let (argv, t, notes) = degthr_conj(a, exec)?;
            ("degthr-conj", argv, t, notes)
        }
    };
    let format = a.format.unwrap_or(Format::Csv);
    argv.flag("format", format.name());
    let mut ok = true;
    for (name, passed, deterministic) in &notes {
        stages.record(name, *passed, None);
        ok &= *passed || !deterministic;
    }
    let artifact = match format {
        Format::Csv => Artifact::Csv(t.to_csv()?),
        Format::Json => Artifact::Json(doc(vec![("table", json!(kind)), ("rows", t.to_json())])),
    };
    let mut summary = format!("table {kind}: {} rows", t.rows.len());
    for (name, passed, _) in &notes {
        summary.push_str(&format!(", {name} {}", if *passed { "yes" } else { "no" }));
    }
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

/// `(name, passed, deterministic)`: only deterministic notes affect the exit code.
type Notes = Vec<(&'static str, bool, bool)>;

fn sign_grid_r(a: &TableArgs, exec: Execution) -> Result<(Argv, Table, Notes), CliError> {
    let nmax = a.grid.unwrap_or(16);
    let dmax = a.dmax.unwrap_or(nmax as u32);
    let tol = a.tol.clone().unwrap_or_else(|| pow2_neg(10));
    if nmax == 0 || nmax > 24 || dmax == 0 {
        return Err(CliError::Limit("need 1 ≤ N ≤ 24 and dmax ≥ 1".into()));
    }
    let mut argv = Argv::new(&["table", "sign-grid-r"]);
    argv.flag("N", nmax).flag("dmax", dmax).rational("tol", &tol);
    let cells: Vec<(usize, u32)> = (1..=nmax).flat_map(|n| (1..=dmax).map(move |d| (n, d))).collect();
    let brackets = par::map(exec, &cells, |&(n, d)| rplus_sign_grid(n, d, &tol))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["N".to_string()];
    header.extend((1..=dmax).map(|d| format!("d{d}")));
    let mut t = Table {
        header,
        rows: vec![],
    };
    let two_tol = &tol + &tol;
    let mut monotone = true;
    let mut zero_law = true;
    for (row, chunk) in brackets.chunks(dmax as usize).enumerate() {
        let n = row + 1;
        let mut cells = vec![n.to_string()];
        for (j, b) in chunk.iter().enumerate() {
            if j > 0 && b.hi > &chunk[j - 1].hi + &two_tol {
                monotone = false;
            }
            zero_law &= b.hi.is_zero() == (b.degree as usize >= n);
            cells.push(bracket_cell(&b.lo, &b.hi));
        }
        t.rows.push(cells);
    }
    Ok((argv, t, vec![("nonincreasing_rows", monotone, true), ("zero_iff_d_ge_N", zero_law, true)]))
}

fn maj_rdeg(a: &TableArgs, exec: Execution) -> Result<(Argv, Table, Notes), CliError> {
    let ns = match &a.n {
        Some(s) => parse_list(s)?,
        None => vec![2, 4, 8],
    };
    let eps = a.eps.clone().unwrap_or_else(|| ratio(1, 3));
    if ns.iter().any(|&n| n == 0 || n > 64) {
        return Err(CliError::Limit("need 1 ≤ n ≤ 64".into()));
    }
    if eps.is_zero() || eps >= Rational::from_integer(1.into()) {
        return Err(usage("--eps must lie in (0, 1)"));
    }
    let mut argv = Argv::new(&["table", "maj-rdeg"]);
    argv.flag("n", list_text(&ns)).rational("eps", &eps);
    // MAJ_n is symmetric, so its weight grid {0, …, n} has the same R⁺.
    let results = par::map(exec, &ns, |&n| -> Result<_, CliError> {
        let g = block_symmetrize(&majority(n), &[Block::Cube(n)])?;
        let r = rdeg(&g, &eps, n as u32, &format!("maj:{n}"))?;
        let mut ok = r.witness.max_error(&g)? <= eps;
        for (d, y) in r.lower_certificates.iter().enumerate() {
            let lp = rplus_lp(&g, &monomial_basis(g.domain(), d as u32), &eps);
            ok &= verify_farkas(&lp, &to_dense(y, lp.num_constraints())).is_ok();
        }
        Ok((n, r.degree, ok))
    });
    let mut t = Table::new(&["n", "eps", "rdeg", "certified"]);
    let mut certified = true;
    let mut degrees = vec![];
    for r in results {
        let (n, d, ok) = r?;
        certified &= ok;
        degrees.push((n, d));
        t.push(vec![n.to_string(), frac(&eps), d.to_string(), ok.to_string()]);
    }
    degrees.sort();
    let nondecreasing = degrees.windows(2).all(|w| w[0].1 <= w[1].1);
    Ok((argv, t, vec![("certified", certified, true), ("nondecreasing", nondecreasing, false)]))
}

fn degthr_conj(a: &TableArgs, exec: Execution) -> Result<(Argv, Table, Notes), CliError> {
    let family = a.family.clone().unwrap_or_else(|| "maj".into());
    if family != "maj" {
        return Err(usage(format!("unknown family `{family}` (only `maj` is available)")));
    }
    let mmax = a.mmax.unwrap_or(5);
    if mmax == 0 || mmax > 10 {
        return Err(CliError::Limit("need 1 ≤ mmax ≤ 10".into()));
    }
    let mut argv = Argv::new(&["table", "degthr-conj"]);
    argv.flag("family", &family).flag("mmax", mmax);
    let ms: Vec<usize> = (1..=mmax).collect();
    // Both factors are symmetric, so the (m+1)² grid of block weights has
    // the same threshold degree as the 2m-cube; small m are also solved on the cube.
    let results = par::map(exec, &ms, |&m| -> Result<_, CliError> {
        let f = conjunction(&majority(m), &majority(m));
        let g = block_symmetrize(&f, &[Block::Cube(m), Block::Cube(m)])?;
        let id = format!("conj:maj:{m},maj:{m}");
        let cert = threshold_degree(&g, &id)?;
        let verified = cert.verify(&g).is_ok();
        let cube = if 2 * m <= 6 {
            let c = threshold_degree(&f, &id)?;
            Some((c.degree, c.verify(&f).is_ok()))
        } else {
            None
        };
        Ok((m, cert.degree, verified, cube))
    });
    let mut t = Table::new(&["m", "degthr", "certificate_verified", "cube_degthr"]);
    let mut verified = true;
    let mut agree = true;
    for r in results {
        let (m, d, ok, cube) = r?;
        verified &= ok;
        if let Some((cd, cok)) = cube {
            verified &= cok;
            agree &= cd == d;
        }
        t.push(vec![
            m.to_string(),
            d.to_string(),
            ok.to_string(),
            cube.map(|c| c.0.to_string()).unwrap_or_default(),
        ]);
    }
    Ok((argv, t, vec![("certificates_verified", verified, true), ("cube_agrees", agree, true)]))
}
