use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use signdeg::boolfn::{
    block_symmetrize, conjunction, halfspace_to_function, monomial_basis, parity_char, symmetrize_polynomial, Block,
    BooleanFunction, Halfspace, PointSet, Polynomial,
};
use signdeg::exactlp::rational::{format_rational, pow2_neg, ratio};
use signdeg::exactlp::{
    check_feasible, is_strictly_diagonally_dominant, parse_rational, solve_linear_system, verify_farkas, verify_point,
    FeasibilityOutcome, LinearProgram, Rational, RationalMatrix,
};
use signdeg::fourier::{inverse_wht, wht};
use signdeg::hardhs::{
    build_moment_matched, build_partition, class_sizes_match_spectrum, partition_from_sets, partition_is_valid,
    random_reduction_polynomial, sample_weights, univariate_reduce, zero_correlation_distribution, HardError,
};
use signdeg::par::Execution;
use signdeg::rapprox::rplus_bracket;
use signdeg::signrep::{sign_represents, threshold_degree};

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
}

fn square(n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(rational(), n), n)
}

fn table(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { -1 } else { 1 }), 1 << n)
}

fn cube_fn(n: usize, values: &[i8]) -> BooleanFunction {
    BooleanFunction::from_values(PointSet::cube(n), values).unwrap()
}

fn int_lp(rows: &[(Vec<i64>, i64)], vars: usize) -> LinearProgram {
    LinearProgram::from_rows(
        vars,
        rows.iter()
            .map(|(a, b)| (a.iter().map(|&x| Rational::from_integer(x.into())).collect(), Rational::from_integer((*b).into())))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_round_trip((rows, b) in (1usize..=50).prop_flat_map(|n| (square(n), prop::collection::vec(rational(), n)))) {
        let a = RationalMatrix::from_rows(rows).unwrap();
        if let Ok(x) = solve_linear_system(&a, &b) {
            prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
        }
    }

    #[test]
    fn dominant_matrices_are_solvable(
        n in 1usize..=100,
        off in prop::collection::vec(-3i64..=3, 100 * 100),
        slack in prop::collection::vec(1i64..=5, 100),
        signs in prop::collection::vec(any::<bool>(), 100),
        rhs in prop::collection::vec(-10i64..=10, 100),
    ) {
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let mut sum = 0;
            for j in (0..n).filter(|&j| j != i) {
                rows[i][j] = Rational::from_integer(off[i * 100 + j].into());
                sum += off[i * 100 + j].abs();
            }
            let d = sum + slack[i];
            rows[i][i] = Rational::from_integer((if signs[i] { d } else { -d }).into());
        }
        let a = RationalMatrix::from_rows(rows).unwrap();
        prop_assert!(is_strictly_diagonally_dominant(&a));
        let b: Vec<Rational> = rhs[..n].iter().map(|&v| Rational::from_integer(v.into())).collect();
        let x = solve_linear_system(&a, &b).unwrap();
        prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_outcomes_carry_valid_certificates(
        vars in 1usize..=6,
        raw in prop::collection::vec((prop::collection::vec(-4i64..=4, 6), -6i64..=6), 1..=12),
    ) {
        let rows: Vec<(Vec<i64>, i64)> = raw.into_iter().map(|(a, b)| (a[..vars].to_vec(), b)).collect();
        let lp = int_lp(&rows, vars);
        let out = check_feasible(&lp);
        match &out {
            FeasibilityOutcome::Feasible { point } => prop_assert!(verify_point(&lp, point).is_ok()),
            FeasibilityOutcome::Infeasible { certificate } => prop_assert!(verify_farkas(&lp, certificate).is_ok()),
        }
        prop_assert_eq!(check_feasible(&lp), out);
    }

    #[test]
    fn rationals_round_trip_through_text(r in rational()) {
        let text = format_rational(&r);
        prop_assert_eq!(parse_rational(&text).unwrap(), r);
    }

    #[test]
    fn conjunction_is_pointwise_and(a in 1usize..=4, b in 1usize..=4, fs in table(4), gs in table(4)) {
        let f = cube_fn(a, &fs[..1 << a]);
        let g = cube_fn(b, &gs[..1 << b]);
        let h = conjunction(&f, &g);
        prop_assert_eq!(h.len(), f.len() * g.len());
        for x in 0..f.len() {
            for y in 0..g.len() {
                let both = f.is_true(x) && g.is_true(y);
                prop_assert_eq!(h.is_true(x + y * f.len()), both);
            }
        }
    }

    #[test]
    fn halfspace_scaling_keeps_the_function(
        n in 1usize..=6,
        c0 in -6i64..=6,
        w in prop::collection::vec(-5i64..=5, 6),
        factor in 1i64..=50,
    ) {
        let mut c = vec![2 * c0 + 1];
        c.extend(w[..n].iter().map(|v| 2 * v));
        let h = Halfspace::from_i64(&c);
        let f = halfspace_to_function(&h, &PointSet::cube(n)).unwrap();
        let g = halfspace_to_function(&h.scaled(&BigInt::from(factor)), &PointSet::cube(n)).unwrap();
        prop_assert_eq!(f, g);
    }

    #[test]
    fn symmetrization_is_the_orbit_average(n in 1usize..=5, coeffs in prop::collection::vec(rational(), 32)) {
        let phi = Polynomial::from_terms(
            n,
            (0..1usize << n).map(|m| ((0..n).map(|i| ((m >> i) & 1) as u32).collect(), coeffs[m].clone())),
        );
        let p = symmetrize_polynomial(&phi, n);
        // The permutation orbit of x is every point of the same weight.
        let mut by_weight: BTreeMap<u32, (Rational, usize)> = BTreeMap::new();
        for x in 0..1usize << n {
            let pt: Vec<i64> = (0..n).map(|i| ((x >> i) & 1) as i64).collect();
            let e = by_weight.entry(x.count_ones()).or_insert((Rational::zero(), 0));
            e.0 += phi.eval(&pt);
            e.1 += 1;
        }
        for (t, (sum, count)) in by_weight {
            let avg = sum / Rational::from_integer(count.into());
            prop_assert_eq!(p.eval(&[t as i64]), avg);
        }
    }

    #[test]
    fn block_symmetrize_reads_back(a in 1usize..=4, b in 1usize..=4, vals in table(5)) {
        // F depends only on the two block weights.
        let f = BooleanFunction::from_index_fn(PointSet::cube(a + b), |x| {
            let wa = (x & ((1 << a) - 1)).count_ones() as usize;
            let wb = (x >> a).count_ones() as usize;
            vals[wa * 5 + wb]
        });
        let g = block_symmetrize(&f, &[Block::Cube(a), Block::Cube(b)]).unwrap();
        prop_assert_eq!(g.len(), (a + 1) * (b + 1));
        for x in 0..f.len() {
            let wa = (x & ((1 << a) - 1)).count_ones() as i64;
            let wb = (x >> a).count_ones() as i64;
            prop_assert_eq!(g.at(&[wa, wb]), Some(f.value(x)));
        }
    }

    #[test]
    fn wht_inverts_and_is_linear(
        n in 0usize..=6,
        u in prop::collection::vec(rational(), 64),
        v in prop::collection::vec(rational(), 64),
        a in rational(),
        b in rational(),
    ) {
        let len = 1 << n;
        let (u, v) = (&u[..len], &v[..len]);
        let su = wht(n, u).unwrap();
        let sv = wht(n, v).unwrap();
        prop_assert_eq!(inverse_wht(&su), u.to_vec());
        let mix: Vec<Rational> = u.iter().zip(v).map(|(x, y)| &a * x + &b * y).collect();
        let sm = wht(n, &mix).unwrap();
        for s in 0..len {
            prop_assert_eq!(sm.coeff(s), &(&a * su.coeff(s) + &b * sv.coeff(s)));
        }
    }

    #[test]
    fn indicator_mean_is_support_fraction(n in 0usize..=8, bits in prop::collection::vec(any::<bool>(), 256)) {
        let vals: Vec<Rational> = bits[..1 << n].iter().map(|&b| Rational::from_integer(u8::from(b).into())).collect();
        let support = bits[..1 << n].iter().filter(|&&b| b).count();
        let s = wht(n, &vals).unwrap();
        prop_assert_eq!(s.coeff(0), &Rational::new(support.into(), (1usize << n).into()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn degree_certificates_close_and_shrink_on_subdomains(
        n in 1usize..=3,
        vals in table(3),
        keep in prop::collection::vec(any::<bool>(), 8),
        scale in (1i64..=30, 1i64..=30),
    ) {
        let f = cube_fn(n, &vals[..1 << n]);
        let cert = threshold_degree(&f, "f").unwrap();
        prop_assert!(cert.verify(&f).is_ok());
        prop_assert!(sign_represents(&f, &cert.witness.scale(&ratio(scale.0, scale.1))));
        let idx: Vec<usize> = (0..f.len()).filter(|&i| keep[i]).collect();
        prop_assume!(!idx.is_empty());
        let sub = f.restrict(&idx);
        let sub_cert = threshold_degree(&sub, "f|S").unwrap();
        prop_assert!(sub_cert.verify(&sub).is_ok());
        prop_assert!(sub_cert.degree <= cert.degree);
    }

    #[test]
    fn brackets_are_sound_and_monotone(
        n in 1usize..=3,
        vals in table(3),
        keep in prop::collection::vec(any::<bool>(), 8),
    ) {
        let f = cube_fn(n, &vals[..1 << n]);
        let tol = pow2_neg(6);
        let mut prev: Option<Rational> = None;
        for d in 0..=n as u32 {
            let b = rplus_bracket(&f, d, &tol, "f").unwrap();
            prop_assert!(b.verify(&f).is_ok());
            prop_assert!(!b.lo.is_negative() && b.lo <= b.hi && b.hi <= Rational::one());
            prop_assert!(&b.hi - &b.lo <= tol);
            if let Some(p) = &prev {
                prop_assert!(b.hi <= p + &tol + &tol);
            }
            prev = Some(b.hi.clone());
        }
        let idx: Vec<usize> = (0..f.len()).filter(|&i| keep[i]).collect();
        prop_assume!(!idx.is_empty());
        let sub = f.restrict(&idx);
        let full = rplus_bracket(&f, 1, &tol, "f").unwrap();
        let part = rplus_bracket(&sub, 1, &tol, "f|S").unwrap();
        prop_assert!(full.lo >= &part.lo - &tol);
    }

    #[test]
    fn partitions_follow_the_residue_rule(n in 1usize..=10, k in 0u32..=2, seed in any::<u64>()) {
        let w = sample_weights(n, k, seed);
        prop_assert_eq!(&sample_weights(n, k, seed), &w);
        let p = build_partition(&w).unwrap();
        prop_assert!(partition_is_valid(&p));
        prop_assert!(class_sizes_match_spectrum(&p));
        let modulus = 1u64 << (k + 1);
        for s in 0..modulus {
            for &x in p.class(s) {
                let sum: u64 = (0..n).filter(|&i| x >> i & 1 == 1).map(|i| w.weights[i]).sum();
                prop_assert_eq!(sum % modulus, s);
            }
        }
    }

    #[test]
    fn set_partitions_match_the_bit_decomposition(n in 1usize..=8, membership in prop::collection::vec(0u8..8, 8)) {
        // Coordinate j lies in S_i iff bit i of membership[j] is set; three sets means k = 2.
        let sets: Vec<Vec<usize>> = (0..3).map(|i| (0..n).filter(|&j| membership[j] >> i & 1 == 1).collect()).collect();
        let p = partition_from_sets(n, &sets).unwrap();
        for x in 0u64..1 << n {
            let s: u64 = sets
                .iter()
                .enumerate()
                .map(|(i, set)| (1u64 << i) * set.iter().filter(|&&j| x >> j & 1 == 1).count() as u64)
                .sum::<u64>()
                % 8;
            prop_assert!(p.class(s).contains(&(x as u32)));
        }
    }

    #[test]
    fn zero_correlation_when_hypotheses_hold(
        n in 3usize..=6,
        members in prop::collection::vec(any::<bool>(), 64),
        vals in table(6),
        sets in prop::collection::vec(1u64..64, 1..=3),
    ) {
        let points: Vec<Vec<i64>> = (0..1usize << n)
            .filter(|&x| members[x])
            .map(|x| (0..n).map(|i| ((x >> i) & 1) as i64).collect())
            .collect();
        prop_assume!(points.len() >= 4);
        let masks: Vec<u64> = points.iter().map(|p| p.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum()).collect();
        let x = PointSet::from_points(n, points).unwrap();
        let f = BooleanFunction::from_index_fn(x.clone(), |i| vals[masks[i] as usize]);
        let chis: Vec<BooleanFunction> = sets
            .iter()
            .map(|&s| BooleanFunction::from_index_fn(x.clone(), |i| parity_char(s & ((1 << n) - 1), masks[i])))
            .collect();
        match zero_correlation_distribution(&x, &f, &chis) {
            Ok((mu, cert)) => {
                prop_assert!(mu.iter().all(|m| !m.is_negative()));
                prop_assert_eq!(mu.iter().sum::<Rational>(), Rational::one());
                for c in &chis {
                    let corr: Rational = (0..x.len()).map(|i| &mu[i] * Rational::from_integer((f.value(i) * c.value(i)).into())).sum();
                    prop_assert!(corr.is_zero());
                }
                prop_assert!(cert.alpha.iter().map(|a| a.abs()).sum::<Rational>() < Rational::one());
            }
            Err(HardError::HypothesisViolated { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn matched_families_have_equal_moments_and_reduce_without_raising_degree(seed in 0u64..400) {
        let p = build_partition(&sample_weights(10, 1, seed)).unwrap();
        let fam = match build_moment_matched(&p, 1, Execution::Sequential) {
            Ok(f) => f,
            Err(HardError::HypothesisViolated { .. } | HardError::EmptyClass { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for a in std::iter::once(0u64).chain((0..10).map(|i| 1 << i)) {
            let first = fam.classes[0].moment(a);
            prop_assert!(fam.classes.iter().all(|c| c.moment(a) == first));
        }
        let poly = random_reduction_polynomial(10, 1, 6, &mut ChaCha20Rng::seed_from_u64(seed));
        let reduced = univariate_reduce(&poly, &fam).unwrap();
        prop_assert!(reduced.degree() <= poly.degree());
    }
}

#[test]
fn full_degree_basis_has_two_to_the_n_monomials() {
    for n in 0..=8 {
        assert_eq!(monomial_basis(&PointSet::cube(n), n as u32).len(), 1 << n);
    }
}
