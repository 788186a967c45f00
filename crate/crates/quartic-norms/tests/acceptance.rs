//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p quartic-norms --test acceptance` (add
//! `-- --nocapture` to see the per-criterion lines on success).

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use quartic_norms::density::subgroup_local_mass_odd;
use quartic_norms::density::{absolute_density, density_upper_bound, proportion, ratio_factor};
use quartic_norms::sieve::PrimeSieve;
use quartic_norms::tables::{
    archimedean_mass, dyadic_mass, unconditional_mass, ArchimedeanClass, DyadicMassKey,
};
use quartic_norms::{
    all_quartic_symbols, odd_mass, oracle_local_mass, trivial_symbols, ClassGroupElement,
    OddMassKey, RationalInput, ResidueSize, UnitKind,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn input(n: i64) -> RationalInput {
    RationalInput::from_integer(n).unwrap()
}

fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    PrimeSieve::new(bound, None).primes(None).skip(1).collect()
}

/// Unit kinds meaningful at q, with their representative classes; both
/// nonsquare classes are listed when g = 4.
fn unit_kind_classes(q: ResidueSize) -> Vec<(UnitKind, u8)> {
    if q.get() % 4 == 1 {
        vec![
            (UnitKind::FourthPower, 0),
            (UnitKind::SquareNotFourth, 2),
            (UnitKind::Nonsquare, 1),
            (UnitKind::Nonsquare, 3),
        ]
    } else {
        vec![(UnitKind::FourthPower, 0), (UnitKind::Nonsquare, 1)]
    }
}

/// Criterion 1: oracle/table equivalence over all odd primes q <= 199,
/// every valuation class and unit kind, as exact rationals.
#[test]
fn criterion_1_oracle_matches_tables() {
    let start = Instant::now();
    let mut checked = 0usize;
    for p in odd_primes_up_to(199) {
        let q = ResidueSize::new(p).unwrap();
        for r in 0u8..4 {
            for (kind, class) in unit_kind_classes(q) {
                let table = odd_mass(OddMassKey {
                    q,
                    r_mod_4: r,
                    unit_kind: kind,
                })
                .unwrap();
                let oracle = oracle_local_mass(q, &[ClassGroupElement { v: r, c: class }]).unwrap();
                assert_eq!(
                    oracle.as_ratio(),
                    table.as_ratio(),
                    "q={p} r={r} kind={kind:?} class={class}"
                );
                checked += 1;
            }
        }
    }
    // the worked example: trivial class at q = 5
    let m = oracle_local_mass(
        ResidueSize::new(5).unwrap(),
        &[ClassGroupElement { v: 0, c: 0 }],
    )
    .unwrap();
    assert_eq!(m.as_ratio(), &rat(644, 625));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}");
    println!("criterion 1 (oracle/table equivalence, {checked} keys, {elapsed:?}): PASS");
}

/// Criterion 2: symbolic pre-mass identities at 50 values of q, exact.
#[test]
fn criterion_2_symbolic_identities() {
    let qs: Vec<u64> = (0..50).map(|k| 3 + 2 * k).collect();
    for &qv in &qs {
        let q = ResidueSize::new(qv).unwrap();
        let qi = BigInt::from(qv);

        let total: BigRational = all_quartic_symbols()
            .iter()
            .map(|s| s.pre_mass(q).as_ratio().clone())
            .sum();
        let expected = BigRational::new(qi.pow(3) + qi.pow(2) + 2 * &qi + 1, qi.pow(3));
        assert_eq!(total, expected, "symbol sum at q={qv}");

        let trivial: BigRational = trivial_symbols()
            .iter()
            .map(|s| s.pre_mass(q).as_ratio().clone())
            .sum();
        let expected = BigRational::new(5 * qi.pow(2) + 8 * &qi + 8, 8 * qi.pow(2));
        assert_eq!(trivial, expected, "trivial sum at q={qv}");
    }
    println!(
        "criterion 2 (symbolic identities at {} values): PASS",
        qs.len()
    );
}

/// Criterion 3: pinned reference values at p = 2 and the real place.
#[test]
fn criterion_3_pinned_value_regression() {
    let m22 = dyadic_mass(DyadicMassKey {
        r_mod_4: 1,
        u_mod_16: 1,
    });
    assert_eq!(m22.as_ratio(), &rat(6523, 8192));

    let m12 = unconditional_mass(2);
    assert_eq!(m12.as_ratio(), &rat(17, 16));

    let ratio = m22.as_ratio() / m12.as_ratio();
    assert_eq!(ratio, rat(6523, 8704));

    assert_eq!(
        archimedean_mass(ArchimedeanClass::RealPositive).as_ratio(),
        &rat(5, 12)
    );
    println!("criterion 3 (pinned value regression): PASS");
}

/// Criterion 4: the worked proportion for alpha = 2 at cutoff 10^6,
/// pinned to the quoted headline value 0.3306 within 5e-4, with matching
/// per-prime spot checks.
///
/// KNOWN RED. The headline target is internally inconsistent with the
/// per-prime factors pinned alongside it: the product of the ratio
/// factors it mandates (1 at the real place; 6523/8704 at 2; 159/172,
/// 1, 5236/5237, ... at odd primes) evaluates to 0.66122, exactly twice
/// 0.3306. The quoted source display carries a spurious global factor of
/// one half, apparently copied from the absolute-density normalisation,
/// which cancels in a ratio of counts. A proportion carrying that factor
/// would also break criterion 5 (proportion of a fourth power must be
/// exactly 1) and the 0 < proportion <= 1 invariant machinery, so the
/// implementation keeps the ratio-product definition and this one
/// assertion is left failing rather than repinned.
#[test]
fn criterion_4_proportion_of_two() {
    let start = Instant::now();

    assert_eq!(ratio_factor(&input(2), 3).unwrap(), rat(159, 172));
    assert_eq!(ratio_factor(&input(2), 7).unwrap(), rat(1, 1));
    assert_eq!(ratio_factor(&input(2), 17).unwrap(), rat(5236, 5237));

    let (est, _) = proportion(&[input(2)], 1_000_000, None).unwrap();
    assert!(est.abs_error <= 5e-4, "abs_error = {}", est.abs_error);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "criterion 4 computed proportion([2], 10^6) = {:.6} +/- {:.2e} in {elapsed:?}",
        est.value, est.abs_error
    );
    println!("criterion 4 spot checks (159/172, 1, 5236/5237) and error bound: ok");

    assert!(
        (est.value - 0.3306).abs() <= 5e-4,
        "criterion 4 (headline value): FAIL - computed {:.6}, pinned target 0.3306; \
         the target is exactly half the product of the criterion's own pinned \
         per-place factors (1 * 6523/8704 * 159/172 * ... = 0.66122) and is \
         unsatisfiable together with criterion 5; see this test's doc comment",
        est.value
    );
    println!("criterion 4 (proportion([2], 10^6) headline value): PASS");
}

/// Criterion 5: the proportion is exactly 1 precisely for fourth powers,
/// and always lies in (0, 1].
#[test]
fn criterion_5_fourth_power_criterion() {
    for n in [16i64, 81] {
        let (est, _) = proportion(&[input(n)], 10_000, None).unwrap();
        assert_eq!(est.value, 1.0, "alpha={n}");
        assert_eq!(est.abs_error, 0.0, "alpha={n}");
        assert!(est.finite_part.is_one());
    }
    for n in [2i64, -1, 48] {
        let (est, _) = proportion(&[input(n)], 10_000, None).unwrap();
        assert!(
            est.value < 1.0 - est.abs_error,
            "alpha={n}: {} +/- {}",
            est.value,
            est.abs_error
        );
        assert!(est.value - est.abs_error > 0.0, "alpha={n}");
        assert!(est.value + est.abs_error <= 1.0 + 1e-9, "alpha={n}");
    }
    println!("criterion 5 (proportion = 1 iff fourth power): PASS");
}

/// Criterion 6: masses with 4 | r stay below 1 + 1/q^2, and the a priori
/// upper bound dominates the computed density.
#[test]
fn criterion_6_upper_bounds() {
    for p in odd_primes_up_to(199) {
        let q = ResidueSize::new(p).unwrap();
        let bound = rat(1, 1) + BigRational::new(BigInt::one(), BigInt::from(p * p));
        for (kind, _) in unit_kind_classes(q) {
            let m = odd_mass(OddMassKey {
                q,
                r_mod_4: 0,
                unit_kind: kind,
            })
            .unwrap();
            assert!(m.as_ratio() < &bound, "q={p} kind={kind:?}");
        }
    }
    for n in [1i64, 2, 3, -1] {
        let alpha = input(n);
        let bound = density_upper_bound(&alpha).unwrap();
        let (est, _) = absolute_density(&[alpha], 10_000, None).unwrap();
        let bound_f64 = quartic_norms::interval::ratio_to_f64(&bound);
        assert!(
            bound_f64 >= est.value + est.abs_error,
            "alpha={n}: {bound_f64} < {} + {}",
            est.value,
            est.abs_error
        );
    }
    println!("criterion 6 (mass and density upper bounds): PASS");
}

/// Deterministic xorshift for the randomised sub-criteria.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Criterion 7: invariance suite. Fourth-power invariance of the
/// proportion, primitive-root invariance of oracle masses, and subgroup
/// monotonicity for random generator pairs.
#[test]
fn criterion_7_invariance_suite() {
    // fourth-power invariance: proportion([alpha * m^4]) = proportion([alpha])
    let mut rng = Rng(0x5eed_cafe_f00d_1234);
    let mut cases = 0;
    while cases < 20 {
        let a = rng.below(199) as i64 - 99;
        let m = rng.below(9) as i64 + 2;
        if a == 0 {
            continue;
        }
        let alpha = input(a);
        let scaled = RationalInput::new(alpha.value() * rat(m, 1).pow(4)).unwrap();
        let (lhs, _) = proportion(&[alpha], 300, None).unwrap();
        let (rhs, _) = proportion(&[scaled], 300, None).unwrap();
        assert_eq!(lhs.value, rhs.value, "alpha={a} m={m}");
        assert_eq!(lhs.abs_error, rhs.abs_error, "alpha={a} m={m}");
        assert_eq!(lhs.finite_part, rhs.finite_part, "alpha={a} m={m}");
        cases += 1;
    }

    // primitive-root invariance at q in {13, 17, 29}: classes computed
    // with any primitive root give the same oracle masses
    for p in [13u64, 17, 29] {
        let q = ResidueSize::new(p).unwrap();
        let smallest = quartic_norms::arith::smallest_primitive_root(p).unwrap();
        let other = (smallest + 1..p)
            .find(|&z| is_primitive_root(z, p))
            .expect("p > 3 has several primitive roots");
        for a in [2i64, 3, 5, -1, 7] {
            let alpha = input(a);
            let c1 = alpha.local_class_with_root(p, smallest).unwrap();
            let c2 = alpha.local_class_with_root(p, other).unwrap();
            let m1 = oracle_local_mass(q, &[c1]).unwrap();
            let m2 = oracle_local_mass(q, &[c2]).unwrap();
            assert_eq!(m1.as_ratio(), m2.as_ratio(), "alpha={a} p={p}");
        }
        // and relabeling zeta |-> zeta^t permutes classes without
        // changing any subgroup mass
        let g = q.unit_quotient_order();
        for v1 in 0..4u8 {
            for c1 in 0..g {
                for v2 in 0..4u8 {
                    for c2 in 0..g {
                        let orig = [
                            ClassGroupElement { v: v1, c: c1 },
                            ClassGroupElement { v: v2, c: c2 },
                        ];
                        let relabeled = [
                            ClassGroupElement {
                                v: v1,
                                c: (c1 * 3) % g,
                            },
                            ClassGroupElement {
                                v: v2,
                                c: (c2 * 3) % g,
                            },
                        ];
                        assert_eq!(
                            oracle_local_mass(q, &orig).unwrap().as_ratio(),
                            oracle_local_mass(q, &relabeled).unwrap().as_ratio(),
                        );
                    }
                }
            }
        }
    }

    // subgroup monotonicity for 50 random generator pairs at q <= 50
    let primes: Vec<u64> = odd_primes_up_to(50);
    let triv_mass = |q: ResidueSize| -> BigRational {
        let t: BigRational = trivial_symbols()
            .iter()
            .map(|s| s.pre_mass(q).as_ratio().clone())
            .sum();
        t * BigRational::new(BigInt::from(q.get() - 1), BigInt::from(q.get()))
    };
    for _ in 0..50 {
        let p = primes[rng.below(primes.len() as u64) as usize];
        let q = ResidueSize::new(p).unwrap();
        let g = q.unit_quotient_order();
        let x = ClassGroupElement {
            v: rng.below(4) as u8,
            c: rng.below(g as u64) as u8,
        };
        let y = ClassGroupElement {
            v: rng.below(4) as u8,
            c: rng.below(g as u64) as u8,
        };
        let joint = oracle_local_mass(q, &[x, y]).unwrap();
        let mx = oracle_local_mass(q, &[x]).unwrap();
        let my = oracle_local_mass(q, &[y]).unwrap();
        assert!(
            joint.as_ratio() <= mx.as_ratio().min(my.as_ratio()),
            "p={p} {x} {y}"
        );
        assert!(joint.as_ratio() >= &triv_mass(q), "p={p} {x} {y}");
    }

    // oracle subgroup masses agree with the generator-level route
    let m = subgroup_local_mass_odd(5, &[input(2), input(3)]).unwrap();
    let m2 = subgroup_local_mass_odd(5, &[input(2)]).unwrap();
    assert!(m.as_ratio() <= m2.as_ratio());

    println!("criterion 7 (invariance suite): PASS");
}

fn is_primitive_root(z: u64, p: u64) -> bool {
    use quartic_norms::arith::{factor_u64, pow_mod};
    factor_u64(p - 1)
        .keys()
        .all(|&f| pow_mod(z, (p - 1) / f, p) != 1)
}
