//! `verify <id>`: per-seed rows, aggregate frequencies, and an exit code
//! driven only by the deterministic checks.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Map, Value};
use signdeg::boolfn::{
    binary_entropy_bound_check, block_symmetrize, conjunction, halfspace_to_function, majority, parity_char, Block,
    BooleanFunction, Halfspace, PointSet,
};
use signdeg::exactlp::rational::pow2_neg;
use signdeg::exactlp::Rational;
use signdeg::fourier::{inverse_wht, parseval_check, wht, wht_boolean};
use signdeg::hardhs::{
    build_moment_matched, build_partition, canonical_form, class_sizes_match_spectrum, low_order_family,
    partition_is_valid, random_reduction_polynomial, reduction_consistency, reduction_range, sample_weights,
    univariate_reduce, verify_spectrum_bounds, HardError, MomentMatchedFamily, MAX_PARTITION_DIM, MAX_PARTITION_K,
};
use signdeg::par::{self, Execution};
use signdeg::rapprox::{rdeg, rplus_bracket, sign_grid_function};
use signdeg::signrep::{brs_conjunction_polynomial, krause_pudlak, sign_represents, threshold_degree, threshold_density, DensityOutcome};

use super::{frac, Stages};
use crate::args::{list_text, only, parse_list, Argv, Seeds, Theorem, VerifyArgs};
use crate::error::{usage, CliError};
use crate::output::{doc, verdict, Artifact, Format, Outcome, Table};
use crate::spec::parse_function;

/// Largest `n` for the `O(4ⁿ)` definitional Fourier oracle.
pub const MAX_ORACLE_DIM: usize = 12;

/// What one check produced before rendering.
struct Checked {
    table: Table,
    /// Named frequencies and other summary values.
    aggregate: Vec<(&'static str, Value)>,
    /// Failures of deterministic checks, one message each.
    failures: Vec<String>,
    seeds: Vec<u64>,
}

impl Checked {
    fn new(header: &[&str]) -> Self {
        Self {
            table: Table::new(header),
            aggregate: vec![],
            failures: vec![],
            seeds: vec![],
        }
    }
}

fn yes(b: bool) -> String {
    b.to_string()
}

fn frequency(hits: usize, total: usize) -> Value {
    json!(format!("{hits}/{total}"))
}

pub fn verify(a: &VerifyArgs, exec: Execution) -> Result<(Argv, Outcome), CliError> {
    let name = a.id.name();
    let mut argv = Argv::new(&["verify", name]);
    let given = a.given();
    let what = format!("verify {name}");
    let mut stages = Stages::new();
    let checked = match a.id {
        Theorem::Resheto => {
            only(&given, &["n", "k", "eps", "zeta", "seeds"], &what)?;
            resheto(a, &mut argv, exec)?
        }
        Theorem::MomentMatch => {
            only(&given, &["n", "k", "cutoff", "seeds"], &what)?;
            moment_match(a, &mut argv, exec)?
        }
        Theorem::Reduction => {
            only(&given, &["n", "k", "d", "cutoff", "trials", "seeds"], &what)?;
            reduction(a, &mut argv, exec)?
        }
        Theorem::Brs => {
            only(&given, &["n", "eps", "seeds"], &what)?;
            brs(a, &mut argv, exec)?
        }
        Theorem::Converse => {
            only(&given, &["n", "tol", "seeds"], &what)?;
            converse(a, &mut argv, exec)?
        }
        Theorem::KpDensity => {
            only(&given, &["fn", "cap"], &what)?;
            kp_density(a, &mut argv, exec)?
        }
        Theorem::Parseval => {
            only(&given, &["n", "trials", "seeds"], &what)?;
            parseval(a, &mut argv, exec)?
        }
        Theorem::Symmetrization => {
            only(&given, &["n", "dmax", "tol"], &what)?;
            symmetrization(a, &mut argv, exec)?
        }
        Theorem::ZeroLaw => {
            only(&given, &["N", "dmax", "tol"], &what)?;
            zero_law(a, &mut argv, exec)?
        }
    };
    let format = a.format.unwrap_or(Format::Json);
    argv.flag("format", format.name());
    let ok = checked.failures.is_empty();
    stages.record(
        name,
        ok,
        (!ok).then(|| checked.failures.join("; ")),
    );
    let artifact = match format {
        Format::Csv => Artifact::Csv(checked.table.to_csv()?),
        Format::Json => {
            let aggregate: Map<String, Value> = checked
                .aggregate
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            Artifact::Json(doc(vec![
                ("check", json!(name)),
                ("rows", checked.table.to_json()),
                ("aggregate", Value::Object(aggregate)),
                ("deterministic_failures", json!(checked.failures)),
                ("deterministic", verdict(ok)),
            ]))
        }
    };
    let mut summary = format!("verify {name}: {} rows", checked.table.rows.len());
    for (k, v) in &checked.aggregate {
        summary.push_str(&format!(", {k} {}", v.as_str().map_or(v.to_string(), str::to_string)));
    }
    summary.push_str(if ok { ", deterministic checks pass" } else { ", DETERMINISTIC CHECKS FAIL" });
    Ok((
        argv,
        Outcome {
            summary,
            artifact,
            stages: stages.into_vec(),
            ok,
            seeds: checked.seeds,
        },
    ))
}

fn single_n(a: &VerifyArgs, default: usize) -> Result<usize, CliError> {
    match &a.n {
        None => Ok(default),
        Some(s) => s.trim().parse().map_err(|_| usage(format!("--n expects one number here, found `{s}`"))),
    }
}

fn partition_dims(n: usize, k: u32) -> Result<(), CliError> {
    if n > MAX_PARTITION_DIM || k > MAX_PARTITION_K {
        return Err(CliError::Limit(format!(
            "need n ≤ {MAX_PARTITION_DIM} and k ≤ {MAX_PARTITION_K}"
        )));
    }
    Ok(())
}

fn resheto(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let n = single_n(a, 14)?;
    let k = a.k.unwrap_or(1);
    let eps = a.eps.clone().unwrap_or_else(|| Rational::new(1.into(), 4.into()));
    let zeta = a.zeta.clone().unwrap_or_else(|| Rational::new(1.into(), 5.into()));
    let seeds = a.seeds.unwrap_or(Seeds { start: 0, end: 99 });
    partition_dims(n, k)?;
    argv.flag("n", n).flag("k", k).rational("eps", &eps).rational("zeta", &zeta).flag("seeds", seeds);
    let list = seeds.list();
    let results = par::map(exec, &list, |&seed| -> Result<_, HardError> {
        let p = build_partition(&sample_weights(n, k, seed))?;
        let valid = partition_is_valid(&p) && class_sizes_match_spectrum(&p);
        let report = verify_spectrum_bounds(&p, &eps, &zeta, Execution::Sequential)?;
        Ok((seed, valid, report))
    });
    let mut out = Checked::new(&[
        "seed",
        "partition_valid",
        "spectrum_pass",
        "worst_class",
        "worst_set",
        "worst_deviation",
        "max_order",
        "exponent",
    ]);
    let mut passes = 0;
    for r in results {
        let (seed, valid, rep) = r?;
        if !valid {
            out.failures.push(format!("seed {seed}: partition is invalid"));
        }
        passes += rep.pass as usize;
        out.table.push(vec![
            seed.to_string(),
            yes(valid),
            yes(rep.pass),
            rep.worst.s.to_string(),
            format!("{:#x}", rep.worst.set),
            frac(&rep.worst.deviation),
            rep.max_order.to_string(),
            rep.exponent.to_string(),
        ]);
    }
    out.aggregate.push(("spectrum_pass_frequency", frequency(passes, list.len())));
    out.seeds = list;
    Ok(out)
}

/// Moments `E_{μ_s}[Π_{i∈A} xᵢ]` recomputed from the raw support and weights.
fn moments_agree(fam: &MomentMatchedFamily) -> bool {
    let mut monomials = vec![0u64];
    monomials.extend(low_order_family(fam.n(), fam.cutoff));
    let table: Vec<Vec<Rational>> = fam
        .classes
        .iter()
        .map(|c| {
            monomials
                .iter()
                .map(|&m| {
                    c.points
                        .iter()
                        .zip(&c.weights)
                        .filter(|(&x, _)| x as u64 & m == m)
                        .fold(Rational::zero(), |acc, (_, w)| acc + w)
                })
                .collect()
        })
        .collect();
    let distributions = fam
        .classes
        .iter()
        .all(|c| c.weights.iter().all(|w| *w >= Rational::zero()) && c.weights.iter().sum::<Rational>() == Rational::one());
    distributions && table.iter().all(|row| *row == table[0])
}

enum Matching {
    Built(Box<MomentMatchedFamily>),
    Hypothesis(String),
    Error(String),
}

fn try_family(n: usize, k: u32, cutoff: u32, seed: u64) -> Result<Matching, CliError> {
    let p = build_partition(&sample_weights(n, k, seed))?;
    Ok(match build_moment_matched(&p, cutoff, Execution::Sequential) {
        Ok(f) => Matching::Built(Box::new(f)),
        Err(e @ (HardError::HypothesisViolated { .. } | HardError::EmptyClass { .. })) => Matching::Hypothesis(e.to_string()),
        Err(HardError::TooLarge(m)) => return Err(CliError::Limit(m)),
        Err(e) => Matching::Error(e.to_string()),
    })
}

fn moment_match(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let n = single_n(a, 12)?;
    let k = a.k.unwrap_or(1);
    let cutoff = a.cutoff.unwrap_or(k);
    let seeds = a.seeds.unwrap_or(Seeds { start: 0, end: 49 });
    partition_dims(n, k)?;
    argv.flag("n", n).flag("k", k).flag("cutoff", cutoff).flag("seeds", seeds);
    let list = seeds.list();
    let results = par::map(exec, &list, |&seed| {
        try_family(n, k, cutoff, seed).map(|m| match m {
            Matching::Built(f) => (seed, "matched", Some(moments_agree(&f)), String::new()),
            Matching::Hypothesis(d) => (seed, "hypothesis_failed", None, d),
            Matching::Error(d) => (seed, "error", None, d),
        })
    });
    let mut out = Checked::new(&["seed", "status", "moments_equal", "detail"]);
    let mut matched = 0;
    for r in results {
        let (seed, status, equal, detail) = r?;
        match (status, equal) {
            ("matched", Some(true)) => matched += 1,
            ("matched", _) => out.failures.push(format!("seed {seed}: moments differ across classes")),
            ("error", _) => out.failures.push(format!("seed {seed}: {detail}")),
            _ => {}
        }
        out.table.push(vec![
            seed.to_string(),
            status.to_string(),
            equal.map(yes).unwrap_or_default(),
            detail,
        ]);
    }
    out.aggregate.push(("hypotheses_pass_frequency", frequency(matched, list.len())));
    out.seeds = list;
    Ok(out)
}

fn reduction(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let n = single_n(a, 12)?;
    let k = a.k.unwrap_or(1);
    let d = a.d.unwrap_or(k);
    let cutoff = a.cutoff.unwrap_or(d);
    let trials = a.trials.unwrap_or(20);
    let seeds = a.seeds.unwrap_or(Seeds { start: 0, end: 9 });
    partition_dims(n, k)?;
    if d > cutoff {
        return Err(usage(format!("--d {d} exceeds --cutoff {cutoff}")));
    }
    if d as usize + 1 >= reduction_range(k).len() {
        return Err(usage(format!(
            "degree {d} leaves no check point among the {} residues",
            reduction_range(k).len()
        )));
    }
    argv.flag("n", n)
        .flag("k", k)
        .flag("d", d)
        .flag("cutoff", cutoff)
        .flag("trials", trials)
        .flag("seeds", seeds);
    let list = seeds.list();
    let results = par::map(exec, &list, |&seed| -> Result<_, CliError> {
        let fam = match try_family(n, k, cutoff, seed)? {
            Matching::Built(f) => f,
            Matching::Hypothesis(_) => return Ok((seed, false, 0, None, vec![])),
            Matching::Error(e) => return Ok((seed, false, 0, None, vec![e])),
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let mut passed = 0;
        let mut errors = vec![];
        for trial in 0..trials {
            let poly = random_reduction_polynomial(n, d, 6, &mut rng);
            match reduction_consistency(&poly, &fam) {
                Ok(c) if c.passed() => passed += 1,
                Ok(c) => errors.push(format!("trial {trial}: mismatch at {:?}", c.mismatches)),
                Err(e) => errors.push(format!("trial {trial}: {e}")),
            }
        }
        let canonical = (cutoff >= 1).then(|| {
            univariate_reduce(&canonical_form(&fam), &fam)
                .is_ok_and(|p| p.univariate_coeffs() == vec![Rational::zero(), Rational::one()])
        });
        if canonical == Some(false) {
            errors.push("canonical form does not reduce to P(s) = s".into());
        }
        Ok((seed, true, passed, canonical, errors))
    });
    let mut out = Checked::new(&["seed", "verified_family", "trials_passed", "canonical_identity"]);
    let mut verified = 0;
    for r in results {
        let (seed, built, passed, canonical, errors) = r?;
        verified += built as usize;
        out.failures.extend(errors.into_iter().map(|e| format!("seed {seed}: {e}")));
        out.table.push(vec![
            seed.to_string(),
            yes(built),
            if built { format!("{passed}/{trials}") } else { String::new() },
            canonical.map(yes).unwrap_or_default(),
        ]);
    }
    out.aggregate.push(("verified_family_frequency", frequency(verified, list.len())));
    out.seeds = list;
    Ok(out)
}

/// A random halfspace on at most `nmax` variables that is not constant.
///
/// Odd constant and even weights keep the form away from zero.
pub fn random_halfspace(rng: &mut impl Rng, nmax: usize) -> (Halfspace, BooleanFunction) {
    let n = rng.random_range(1..=nmax);
    loop {
        let mut c = vec![BigInt::from(2 * rng.random_range(-4i64..=4) + 1)];
        c.extend((0..n).map(|_| BigInt::from(2 * rng.random_range(-4i64..=4))));
        let h = Halfspace::new(c);
        let f = halfspace_to_function(&h, &PointSet::cube(n)).expect("odd forms never vanish");
        let t = f.count_true();
        if t > 0 && t < f.len() {
            return (h, f);
        }
    }
}

fn coeff_text(h: &Halfspace) -> String {
    h.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn brs(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let n = single_n(a, 4)?;
    let eps = a.eps.clone().unwrap_or_else(|| Rational::new(1.into(), 3.into()));
    let seeds = a.seeds.unwrap_or(Seeds { start: 0, end: 19 });
    if n == 0 || n > 6 {
        return Err(CliError::Limit("brs pairs need 1 ≤ n ≤ 6".into()));
    }
    if eps >= Rational::new(1.into(), 2.into()) || eps <= Rational::zero() {
        return Err(usage("--eps must lie in (0, 1/2)"));
    }
    argv.flag("n", n).rational("eps", &eps).flag("seeds", seeds);
    let list = seeds.list();
    let results = par::map(exec, &list, |&seed| -> Result<_, CliError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (hf, f) = random_halfspace(&mut rng, n);
        let (hg, g) = random_halfspace(&mut rng, n);
        let rf = rdeg(&f, &eps, f.domain().dim() as u32, "f")?;
        let rg = rdeg(&g, &eps, g.domain().dim() as u32, "g")?;
        let errors_ok = rf.witness.max_error(&f)? <= eps && rg.witness.max_error(&g)? <= eps;
        let d = rf.degree.max(rg.degree);
        let poly = brs_conjunction_polynomial(&rf.witness.p, &rf.witness.q, f.domain(), &rg.witness.p, &rg.witness.q, g.domain())?;
        let h = conjunction(&f, &g);
        let represents = sign_represents(&h, &poly);
        Ok((seed, hf, hg, rf.degree, rg.degree, poly.degree(), h.len(), errors_ok && represents && poly.degree() <= 2 * d))
    });
    let mut out = Checked::new(&["seed", "f", "g", "deg_f", "deg_g", "output_degree", "points", "sign_represents"]);
    for r in results {
        let (seed, hf, hg, df, dg, deg, points, ok) = r?;
        if !ok {
            out.failures.push(format!("seed {seed}: conjunction not sign-represented within degree {}", 2 * df.max(dg)));
        }
        out.table.push(vec![
            seed.to_string(),
            coeff_text(&hf),
            coeff_text(&hg),
            df.to_string(),
            dg.to_string(),
            deg.to_string(),
            points.to_string(),
            yes(ok),
        ]);
    }
    out.seeds = list;
    Ok(out)
}

fn converse(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let n = single_n(a, 3)?;
    let tol = a.tol.clone().unwrap_or_else(|| pow2_neg(10));
    let seeds = a.seeds.unwrap_or(Seeds { start: 0, end: 9 });
    if n == 0 || n > 4 {
        return Err(CliError::Limit("converse pairs need 1 ≤ n ≤ 4".into()));
    }
    argv.flag("n", n).rational("tol", &tol).flag("seeds", seeds);
    let list = seeds.list();
    let results = par::map(exec, &list, |&seed| -> Result<_, CliError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (hf, f) = random_halfspace(&mut rng, n);
        let (hg, g) = random_halfspace(&mut rng, n);
        let h = conjunction(&f, &g);
        let cert = threshold_degree(&h, "f∧g")?;
        cert.verify(&h)?;
        let d = cert.degree;
        let bf = rplus_bracket(&f, 4 * d, &tol, "f")?;
        let bg = rplus_bracket(&g, 2 * d, &tol, "g")?;
        let sum = &bf.hi + &bg.hi;
        Ok((seed, hf, hg, d, bf.hi, bg.hi, sum))
    });
    let mut out = Checked::new(&["seed", "f", "g", "degthr", "hi_f_4d", "hi_g_2d", "sum", "below_one"]);
    for r in results {
        let (seed, hf, hg, d, a4, b2, sum) = r?;
        let ok = sum < Rational::one();
        if !ok {
            out.failures.push(format!("seed {seed}: bracket sum {} is not below 1", frac(&sum)));
        }
        out.table.push(vec![
            seed.to_string(),
            coeff_text(&hf),
            coeff_text(&hg),
            d.to_string(),
            frac(&a4),
            frac(&b2),
            frac(&sum),
            yes(ok),
        ]);
    }
    out.seeds = list;
    Ok(out)
}

fn kp_density(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let f = parse_function(a.function.as_deref().unwrap_or("parity:2"))?;
    let cert = threshold_degree(&f.function, &f.id)?;
    cert.verify(&f.function)?;
    let bound = 1usize
        .checked_shl(cert.degree)
        .ok_or_else(|| CliError::Limit("2^degthr overflows".into()))?;
    let cap = a.cap.unwrap_or(bound - 1);
    argv.flag("fn", &f.id).flag("cap", cap);
    let kp = krause_pudlak(&f.function)?;
    let res = threshold_density(&kp, &format!("kp:{}", f.id), cap, exec)?;
    let (outcome, ok) = match &res.outcome {
        DensityOutcome::ExceedsCap => (format!("no family of size ≤ {cap}"), true),
        DensityOutcome::Found { family, .. } => (format!("family of size {}", family.len()), family.len() >= bound),
    };
    let mut out = Checked::new(&["function", "degthr", "kp_points", "cap", "families_rejected", "outcome", "required_density"]);
    if !ok {
        out.failures.push(format!("{outcome} is below 2^degthr = {bound}"));
    }
    out.table.push(vec![
        f.id.clone(),
        cert.degree.to_string(),
        kp.len().to_string(),
        cap.to_string(),
        res.families_rejected.to_string(),
        outcome,
        bound.to_string(),
    ]);
    let lower = match res.density() {
        Some(d) => d,
        None => cap + 1,
    };
    out.aggregate.push(("density_lower_bound", json!(lower.to_string())));
    Ok(out)
}

/// `f̂(S) = 2^{−n} Σ_x f(x) χ_S(x)`, one sum per `S`.
fn fourier_oracle(n: usize, values: &[Rational]) -> Vec<Rational> {
    let den = Rational::from_integer(BigInt::one() << n);
    (0..1u64 << n)
        .map(|s| {
            let total = values.iter().enumerate().fold(Rational::zero(), |acc, (x, v)| {
                if parity_char(s, x as u64) < 0 {
                    acc - v
                } else {
                    acc + v
                }
            });
            total / &den
        })
        .collect()
}

fn parseval(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let n = single_n(a, 8)?;
    let trials = a.trials.unwrap_or(50);
    let seeds = a.seeds.unwrap_or(Seeds { start: 0, end: 0 });
    if n > MAX_ORACLE_DIM {
        return Err(CliError::Limit(format!("the definitional oracle needs n ≤ {MAX_ORACLE_DIM}")));
    }
    argv.flag("n", n).flag("trials", trials).flag("seeds", seeds);
    let cells: Vec<(u64, usize)> = seeds.list().into_iter().flat_map(|s| (0..trials).map(move |t| (s, t))).collect();
    let results = par::map(exec, &cells, |&(seed, trial)| -> Result<_, CliError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let f = BooleanFunction::from_index_fn(PointSet::cube(n), |_| if rng.random::<bool>() { 1 } else { -1 });
        let spec = wht_boolean(&f)?;
        let values: Vec<Rational> = f.values().iter().map(|&v| Rational::from_integer(v.into())).collect();
        let oracle = fourier_oracle(n, &values) == spec.coeffs();
        let boolean_parseval = spec.sum_of_squares() == Rational::one() && parseval_check(&values, &spec);
        let inversion = inverse_wht(&spec) == values;
        // A rational-valued table exercises the general identities as well.
        let table: Vec<Rational> = (0..1usize << n)
            .map(|_| Rational::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=7).into()))
            .collect();
        let rs = wht(n, &table)?;
        let general = fourier_oracle(n, &table) == rs.coeffs() && parseval_check(&table, &rs) && inverse_wht(&rs) == table;
        Ok((seed, trial, oracle, boolean_parseval, inversion, general))
    });
    let mut out = Checked::new(&["seed", "trial", "oracle", "parseval", "inversion", "rational_table"]);
    for r in results {
        let (seed, trial, o, p, i, g) = r?;
        if !(o && p && i && g) {
            out.failures.push(format!("seed {seed} trial {trial}"));
        }
        out.table.push(vec![seed.to_string(), trial.to_string(), yes(o), yes(p), yes(i), yes(g)]);
    }
    let entropy = (1..=n as u64).all(|m| (0..=m / 2).all(|k| binary_entropy_bound_check(m, k)));
    if !entropy {
        out.failures.push("binary entropy bound".into());
    }
    out.aggregate.push(("entropy_bound", verdict(entropy)));
    out.seeds = seeds.list();
    Ok(out)
}

fn symmetrization(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let ns = match &a.n {
        Some(s) => parse_list(s)?,
        None => (1..=8).collect(),
    };
    let dmax = a.dmax.unwrap_or(3);
    let tol = a.tol.clone().unwrap_or_else(|| pow2_neg(12));
    if ns.iter().any(|&n| n == 0 || n > 10) {
        return Err(CliError::Limit("majority cubes need 1 ≤ n ≤ 10".into()));
    }
    argv.flag("n", list_text(&ns)).flag("dmax", dmax).rational("tol", &tol);
    let cells: Vec<(usize, u32)> = ns.iter().flat_map(|&n| (0..=dmax).map(move |d| (n, d))).collect();
    let results = par::map(exec, &cells, |&(n, d)| -> Result<_, CliError> {
        let f = majority(n);
        let g = block_symmetrize(&f, &[Block::Cube(n)])?;
        let id = format!("maj:{n}");
        let cube = rplus_bracket(&f, d, &tol, &id)?;
        let grid = rplus_bracket(&g, d, &tol, &id)?;
        Ok((n, d, cube, grid))
    });
    let two_tol = &tol + &tol;
    let mut out = Checked::new(&["n", "d", "cube_lo", "cube_hi", "grid_lo", "grid_hi", "overlap"]);
    for r in results {
        let (n, d, c, g) = r?;
        let lo = (&c.lo).max(&g.lo);
        let hi = (&c.hi).min(&g.hi);
        let ok = *lo <= hi + &two_tol;
        if !ok {
            out.failures.push(format!("n = {n}, d = {d}: brackets are apart"));
        }
        out.table.push(vec![n.to_string(), d.to_string(), frac(&c.lo), frac(&c.hi), frac(&g.lo), frac(&g.hi), yes(ok)]);
    }
    Ok(out)
}

fn zero_law(a: &VerifyArgs, argv: &mut Argv, exec: Execution) -> Result<Checked, CliError> {
    let nmax = a.grid.unwrap_or(12);
    let dmax = a.dmax.unwrap_or(nmax as u32 + 1);
    let tol = a.tol.clone().unwrap_or_else(|| pow2_neg(20));
    if nmax == 0 || nmax > 24 {
        return Err(CliError::Limit("sign grids need 1 ≤ N ≤ 24".into()));
    }
    argv.flag("N", nmax).flag("dmax", dmax).rational("tol", &tol);
    let cells: Vec<(usize, u32)> = (1..=nmax).flat_map(|n| (0..=dmax).map(move |d| (n, d))).collect();
    let results = par::map(exec, &cells, |&(n, d)| rplus_bracket(&sign_grid_function(n), d, &tol, &format!("sign-grid:{n}")));
    let two_tol = &tol + &tol;
    let mut out = Checked::new(&["N", "d", "lo", "hi", "zero"]);
    let mut prev: Option<(usize, Rational)> = None;
    for ((n, d), r) in cells.iter().zip(results) {
        let b = r?;
        let zero = b.hi.is_zero();
        if zero != (*d as usize >= *n) {
            out.failures.push(format!("N = {n}, d = {d}: hi = {} but zero is expected iff d ≥ N", frac(&b.hi)));
        }
        if let Some((pn, ph)) = &prev {
            if pn == n && b.hi > ph + &two_tol {
                out.failures.push(format!("N = {n}, d = {d}: hi increases"));
            }
        }
        out.table.push(vec![n.to_string(), d.to_string(), frac(&b.lo), frac(&b.hi), yes(zero)]);
        prev = Some((*n, b.hi));
    }
    out.aggregate.push(("cells", json!(cells.len().to_string())));
    Ok(out)
}
