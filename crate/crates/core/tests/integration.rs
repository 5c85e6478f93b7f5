use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use signdeg::boolfn::{
    block_symmetrize, conjunction, halfspace_to_function, majority, Block, BooleanFunction, Halfspace,
    PointSet,
};
use signdeg::exactlp::rational::{pow2_neg, ratio};
use signdeg::exactlp::Rational;
use signdeg::fourier::{boolean_correlation, wht_boolean};
use signdeg::hardhs::{
    build_moment_matched, build_partition, canonical_form, hardness_report, random_reduction_polynomial,
    reduction_consistency, sample_weights, ReportParams,
};
use signdeg::par::Execution;
use signdeg::rapprox::{rdeg, rplus_bracket, rplus_relation_check, sign_grid_function, sign_grid_table};
use signdeg::signrep::{
    brs_conjunction_polynomial, krause_pudlak, sign_represents, threshold_degree, threshold_density,
    DensityOutcome,
};

fn cube_halfspace(c: &[i64]) -> (Halfspace, BooleanFunction) {
    let h = Halfspace::from_i64(c);
    let f = halfspace_to_function(&h, &PointSet::cube(c.len() - 1)).unwrap();
    (h, f)
}

#[test]
fn halfspace_is_represented_by_its_own_form() {
    let (h, f) = cube_halfspace(&[-3, 2, 4, -2, 2, 6]);
    assert!(sign_represents(&f, &h.to_polynomial()));
    let cert = threshold_degree(&f, "h").unwrap();
    assert_eq!(cert.degree, 1);
    cert.verify(&f).unwrap();
}

#[test]
fn brs_polynomial_sign_represents_conjunction_of_halfspaces() {
    let (_, f) = cube_halfspace(&[1, 2, -4, 2, 6]);
    let (_, g) = cube_halfspace(&[-1, 2, 2, -4, 2]);
    let third = ratio(1, 3);
    let rf = rdeg(&f, &third, 4, "f").unwrap();
    let rg = rdeg(&g, &third, 4, "g").unwrap();
    let poly = brs_conjunction_polynomial(
        &rf.witness.p,
        &rf.witness.q,
        f.domain(),
        &rg.witness.p,
        &rg.witness.q,
        g.domain(),
    )
    .unwrap();
    let fg = conjunction(&f, &g);
    assert_eq!(fg.len(), 256);
    assert!(sign_represents(&fg, &poly));
    assert!(poly.degree() <= 2 * rf.degree.max(rg.degree));
}

#[test]
fn majority_brackets_agree_on_cube_and_weight_grid() {
    let tol = pow2_neg(10);
    for n in [3, 4] {
        let f = majority(n);
        let g = block_symmetrize(&f, &[Block::Cube(n)]).unwrap();
        for d in 0..=2 {
            let cube = rplus_bracket(&f, d, &tol, "cube").unwrap();
            let grid = rplus_bracket(&g, d, &tol, "grid").unwrap();
            cube.verify(&f).unwrap();
            grid.verify(&g).unwrap();
            let slack = &tol + &tol;
            assert!(cube.lo <= &grid.hi + &slack && grid.lo <= &cube.hi + &slack, "n={n} d={d}");
        }
    }
}

#[test]
fn sign_grid_table_is_monotone_and_independent_of_execution() {
    let tol = pow2_neg(10);
    let ns: Vec<usize> = (1..=8).collect();
    let seq = sign_grid_table(&ns, 8, &tol, Execution::Sequential).unwrap();
    let par = sign_grid_table(&ns, 8, &tol, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    for row in seq.chunks(9) {
        let n = row[0].n;
        for (d, cell) in row.iter().enumerate() {
            assert_eq!(cell.bracket.hi.is_zero(), d >= n, "N={n} d={d}");
            if d > 0 {
                assert!(cell.bracket.hi <= &row[d - 1].bracket.hi + &tol + &tol);
            }
        }
    }
    assert!(rplus_relation_check(&sign_grid_function(8), 3, &tol).unwrap());
}

#[test]
fn majority_rational_degree_grows_with_n() {
    let third = ratio(1, 3);
    let mut last = 0;
    for n in [4, 8, 16] {
        let g = block_symmetrize(&majority(n), &[Block::Cube(n)]).unwrap();
        let r = rdeg(&g, &third, n as u32, "maj").unwrap();
        assert!(r.witness.max_error(&g).unwrap() <= third);
        assert!(r.degree >= last);
        last = r.degree;
    }
}

#[test]
fn krause_pudlak_of_and_needs_more_than_one_character() {
    // degthr(AND) = 1, so dns(AND^KP) ≥ 2: no single character works.
    let and = BooleanFunction::from_index_fn(PointSet::cube(2), |x| if x == 3 { -1 } else { 1 });
    assert_eq!(threshold_degree(&and, "and").unwrap().degree, 1);
    let kp = krause_pudlak(&and).unwrap();
    assert_eq!(kp.len(), 64);
    let r = threshold_density(&kp, "and^KP", 1, Execution::Parallel).unwrap();
    assert_eq!(r.outcome, DensityOutcome::ExceedsCap);
    assert_eq!(r.families_rejected, 64);
}

#[test]
fn fourier_coefficients_are_correlations_with_characters() {
    let f = majority(5);
    let spec = wht_boolean(&f).unwrap();
    for s in 0..32u64 {
        let chi_s = BooleanFunction::from_index_fn(PointSet::cube(5), |x| {
            if (x as u64 & s).count_ones() % 2 == 1 {
                -1
            } else {
                1
            }
        });
        assert_eq!(spec.coeff(s as usize), &boolean_correlation(&f, &chi_s, f.domain()).unwrap(), "S={s:b}");
    }
}

#[test]
fn hard_instance_pipeline_on_twelve_bits() {
    let fam = (0..20)
        .find_map(|seed| {
            let p = build_partition(&sample_weights(12, 1, seed)).ok()?;
            build_moment_matched(&p, 1, Execution::Parallel).ok()
        })
        .expect("some seed passes the per-class hypotheses");
    // Moments recomputed from the supports, independent of the stored ones.
    for &a in &fam.family {
        let first = fam.classes[0].moment(a);
        for c in &fam.classes {
            assert_eq!(c.weights.iter().sum::<Rational>(), Rational::one());
            assert_eq!(c.moment(a), first, "class {} mask {a:b}", c.s);
        }
    }
    let canonical = reduction_consistency(&canonical_form(&fam), &fam).unwrap();
    assert!(canonical.passed());
    assert_eq!(canonical.reduced.univariate_coeffs(), vec![Rational::zero(), Rational::one()]);
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for _ in 0..10 {
        let poly = random_reduction_polynomial(12, 1, 5, &mut rng);
        assert!(reduction_consistency(&poly, &fam).unwrap().passed());
    }
}

#[test]
fn hardness_report_is_consistent_and_deterministic() {
    let params = ReportParams::default();
    let a = hardness_report(10, 1, 0, &params, Execution::Parallel).unwrap();
    let b = hardness_report(10, 1, 0, &params, Execution::Sequential).unwrap();
    assert!(a.report.consistent);
    assert_eq!(a.report, b.report);
    assert_eq!(a.report.class_sizes.iter().sum::<usize>(), 1 << 10);
}
