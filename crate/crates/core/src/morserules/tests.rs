use num_bigint::BigUint;

use super::*;
use crate::chaincore::SimplicialComplex;
use crate::homology::{CycleOrder, DimSummary, HomologySummary};
use crate::levelset::{SweepEntry, SweepKind};

fn summary(betti: &[usize]) -> HomologySummary {
    HomologySummary::new(
        CoefficientSpec::Rationals,
        betti
            .iter()
            .map(|&b| DimSummary {
                betti: b,
                torsion: Vec::new(),
            })
            .collect(),
    )
}

fn table(levels_and_betti: &[(f64, &[usize])]) -> SweepTable {
    let entries: Vec<SweepEntry> = levels_and_betti
        .iter()
        .map(|(l, b)| SweepEntry {
            level: Level::Float(*l),
            summary: summary(b),
        })
        .collect();
    let jumps = entries
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].summary != w[1].summary)
        .map(|(i, _)| i)
        .collect();
    SweepTable {
        kind: SweepKind::LevelSet,
        entries,
        jumps,
    }
}

#[test]
fn deltas_for_saddle_in_three_manifolds() {
    // attaching S^1 x D^1 to S^2 in T^3 turns the level T^2: j_1 = 2
    let rule = allowed_deltas(1, 3).unwrap();
    assert!(rule.check(&[0, 2, 0]).is_empty());
    assert!(rule.check(&[0, 1, 0]).is_empty());
    assert!(!rule.check(&[0, 3, 0]).is_empty());
    // j_1 = 0 forces j_0 = -1 (the S^2 | S^2 -> S^2 merge)
    assert!(rule.check(&[-1, 0, -1]).is_empty());
    assert!(!rule.check(&[-2, 0, 0]).is_empty());
    // j_0 and j_1 cannot both be active
    assert!(!rule.check(&[-1, 1, 0]).is_empty());
}

#[test]
fn deltas_for_index_one_in_four_manifolds() {
    // S^3 -> S^2 x S^1: deltas (0, 1, 1, 0); 2k != m-1 so j_1 = 1 only
    let rule = allowed_deltas(1, 4).unwrap();
    assert!(rule.check(&[0, 1, 1, 0]).is_empty());
    assert!(!rule.check(&[0, 2, 0, 0]).is_empty());
}

#[test]
fn middle_dimension_is_rejected() {
    assert!(matches!(
        allowed_deltas(1, 2),
        Err(RuleError::MiddleDimension(1))
    ));
    assert!(matches!(
        allowed_deltas(2, 4),
        Err(RuleError::MiddleDimension(2))
    ));
}

#[test]
fn mirrored_rule_accepts_negated_deltas() {
    let low = allowed_deltas(1, 3).unwrap();
    let high = allowed_deltas(2, 3).unwrap();
    assert!(high.mirrored);
    for j0 in -2i64..=2 {
        for j1 in -2i64..=2 {
            for j2 in -2i64..=2 {
                let v = [j0, j1, j2];
                let neg = [-j0, -j1, -j2];
                assert_eq!(
                    low.check(&v).is_empty(),
                    high.check(&neg).is_empty(),
                    "deltas {v:?}"
                );
            }
        }
    }
    // the admissible dimension set is symmetric in k <-> m-k
    assert_eq!(low.allowed_dims(), high.allowed_dims());
}

#[test]
fn verdict_perfect_morse_surface_may_not_change() {
    let q = LevelPassQuery::new(2, vec![CriticalPointRecord::new(2.0, 1)]);
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::MayNotChange);
    assert_eq!(v.rule, "ex:nonor");
    assert_eq!(
        v.witness,
        Some(Witness::Counterexample("RP(2) perfect Morse".into()))
    );
}

fn cotangent_s2_bundle(e: i64) -> BundleContext {
    BundleContext {
        rank: 2,
        base_closed: true,
        base_orientable: true,
        bundle_orientable: true,
        euler_number: Some(e),
        trivial_outside_disk: true,
        is_cotangent: e == 2,
    }
}

#[test]
fn verdict_global_max_over_sphere_must_change_mod_2() {
    let q = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(1.5, 2).global_max(true)],
    )
    .with_bundle(cotangent_s2_bundle(2));
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::MustChange);
    assert_eq!(v.rule, "thm:closed_manifold(1)");
    assert_eq!(
        v.witness,
        Some(Witness::Coefficients(CoefficientSpec::IntegersMod(2)))
    );
}

#[test]
fn verdict_hopf_bundle_may_not_change() {
    let q = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(1.0, 2).global_max(true)],
    )
    .with_bundle(cotangent_s2_bundle(1));
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::MayNotChange);
    assert_eq!(v.rule, "remark:hopf");
    assert_eq!(v.witness, Some(Witness::Counterexample("Hopf bundle".into())));
}

#[test]
fn verdict_planar_nbody_indices_must_change() {
    // reduced planar n-body: m = 4n-6, indices at most 2n-4 < m/2
    for n in [3usize, 4, 5] {
        let m = 4 * n - 6;
        let q = LevelPassQuery::new(m, vec![CriticalPointRecord::new(0.0, 2 * n - 4)]);
        let v = verdict(&q).unwrap();
        assert_eq!(v.outcome, Outcome::MustChange, "n={n}");
        assert_eq!(v.rule, "thm:level");
    }
}

#[test]
fn verdict_adams_rule_for_rank_five() {
    let q = LevelPassQuery::new(
        10,
        vec![CriticalPointRecord::new(0.0, 5)],
    )
    .with_bundle(BundleContext {
        rank: 5,
        base_closed: false,
        base_orientable: true,
        bundle_orientable: true,
        euler_number: None,
        trivial_outside_disk: true,
        is_cotangent: false,
    });
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::MustChange);
    assert_eq!(v.rule, "prop:adams");
}

#[test]
fn verdict_zero_euler_uses_real_witness() {
    let q = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(0.0, 2).global_max(true)],
    )
    .with_bundle(BundleContext {
        euler_number: Some(0),
        is_cotangent: false,
        trivial_outside_disk: false,
        ..cotangent_s2_bundle(0)
    });
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::MustChange);
    assert_eq!(v.rule, "thm:closed_manifold(1)");
    assert_eq!(v.witness, Some(Witness::RealCoefficients));
}

#[test]
fn verdict_two_maxima_need_nonzero_euler() {
    let max = |v: f64| CriticalPointRecord::new(v, 2).global_max(true);
    let q2 = LevelPassQuery::new(4, vec![max(1.0).with_count(2)])
        .with_bundle(cotangent_s2_bundle(2));
    let v = verdict(&q2).unwrap();
    assert_eq!(v.outcome, Outcome::MustChange);
    assert_eq!(v.rule, "thm:closed_manifold(2)");

    // e = 0 and two maxima: no rule applies
    let q0 = LevelPassQuery::new(4, vec![max(1.0).with_count(2)]).with_bundle(BundleContext {
        euler_number: Some(0),
        is_cotangent: false,
        trivial_outside_disk: false,
        ..cotangent_s2_bundle(0)
    });
    assert_eq!(verdict(&q0).unwrap().outcome, Outcome::NoRule);
}

#[test]
fn verdict_three_global_maxima_must_change() {
    let q = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(1.0, 2).global_max(true).with_count(3)],
    )
    .with_bundle(BundleContext {
        euler_number: None,
        base_closed: false,
        ..cotangent_s2_bundle(0)
    });
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::MustChange);
    assert_eq!(v.rule, "cor:many_global_maxima");
}

#[test]
fn verdict_unknown_euler_is_no_rule() {
    let q = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(1.0, 2).global_max(true)],
    )
    .with_bundle(BundleContext {
        euler_number: None,
        base_closed: false,
        trivial_outside_disk: false,
        ..cotangent_s2_bundle(0)
    });
    assert_eq!(verdict(&q).unwrap().outcome, Outcome::NoRule);
}

#[test]
fn verdict_without_assumptions_is_no_rule() {
    let mut q = LevelPassQuery::new(3, vec![CriticalPointRecord::new(0.0, 1)]);
    q.assumptions_hold = false;
    let v = verdict(&q).unwrap();
    assert_eq!(v.outcome, Outcome::NoRule);
    assert!(v.reason.is_some());
}

#[test]
fn verdict_rejects_bad_indices() {
    let q = LevelPassQuery::new(2, vec![CriticalPointRecord::new(0.0, 5)]);
    assert!(matches!(
        verdict(&q),
        Err(RuleError::IndexOutOfRange { index: 5, m: 2 })
    ));
}

#[test]
fn verdict_is_invariant_under_mirroring() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let m = rng.gen_range(1..=10usize);
        let n_points = rng.gen_range(1..=3usize);
        let points: Vec<CriticalPointRecord> = (0..n_points)
            .map(|i| {
                let mut p = CriticalPointRecord::new(i as f64, rng.gen_range(0..=m));
                p.count = rng.gen_range(1..=3);
                p.is_global_max_of_v = match rng.gen_range(0..3) {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                };
                p
            })
            .collect();
        let mut q = LevelPassQuery::new(m, points);
        if m % 2 == 0 && rng.gen_bool(0.4) {
            let rank = m / 2;
            q = q.with_bundle(BundleContext {
                rank,
                base_closed: true,
                base_orientable: true,
                bundle_orientable: true,
                euler_number: rng.gen_bool(0.5).then(|| rng.gen_range(-3..=3)),
                trivial_outside_disk: rng.gen_bool(0.5),
                is_cotangent: false,
            });
        }
        let v1 = verdict(&q).unwrap();
        let v2 = verdict(&q.mirrored()).unwrap();
        assert_eq!(v1.outcome, v2.outcome, "query {q:?}");
    }
}

#[test]
fn maxima_rule_sets() {
    assert_eq!(maxima_delta_rule(false), vec![-1]);
    assert_eq!(maxima_delta_rule(true), vec![-1, 0, 1]);
}

#[test]
fn conformance_middle_dimension_is_exempt() {
    // torus sweep: saddles have k = 1 = m/2 on a surface
    let t = table(&[
        (-3.0, &[1, 0]),
        (-1.0, &[2, 2]),
        (1.0, &[1, 1]),
    ]);
    let declared = vec![
        (-2.0, vec![CriticalPointRecord::new(-2.0, 1)]),
        (0.0, vec![CriticalPointRecord::new(0.0, 1)]),
    ];
    let report = check_conformance(&t, &declared, 2).unwrap();
    assert!(report.is_conformant());
    assert!(report
        .entries
        .iter()
        .all(|e| matches!(e.status, ConformanceStatus::Exempt(_))));
}

#[test]
fn conformance_flags_misaligned_jumps() {
    let t = table(&[(0.0, &[1, 0]), (1.0, &[2, 0])]);
    let report = check_conformance(&t, &[], 3).unwrap();
    assert!(matches!(
        report.entries[0].status,
        ConformanceStatus::Misaligned(_)
    ));
    assert!(report.is_conformant()); // misalignment is not fatal
}

#[test]
fn conformance_detects_violations() {
    // an index-1 pass in m = 4 must not change b_0
    let t = table(&[(0.0, &[1, 0, 0, 0]), (1.0, &[2, 0, 0, 0])]);
    let declared = vec![(0.5, vec![CriticalPointRecord::new(0.5, 1)])];
    let report = check_conformance(&t, &declared, 4).unwrap();
    assert_eq!(report.violations(), 1);
}

#[test]
fn conformance_checks_quiet_passes_too() {
    // a declared index-1 point (k != m/2) with no observed jump violates
    // the must-change increments
    let t = table(&[(0.0, &[1, 0, 0]), (1.0, &[1, 0, 0])]);
    let declared = vec![(0.5, vec![CriticalPointRecord::new(0.5, 1)])];
    let report = check_conformance(&t, &declared, 3).unwrap();
    assert_eq!(report.violations(), 1);
}

#[test]
fn middle_dim_criterion_on_two_arcs() {
    // U = two disjoint arcs; a point difference across components has
    // infinite order, within one component it bounds
    let u = SimplicialComplex::new_closed(4, [vec![0, 1], vec![2, 3]]).to_cell_complex();
    let cross = CycleChain::new(0, vec![(0, 1), (2, -1)]);
    let within = CycleChain::new(0, vec![(0, 1), (1, -1)]);
    assert_eq!(
        middle_dim_criterion(&u, &within, &cross).unwrap(),
        MiddleDimVerdict::Different
    );
    assert_eq!(
        middle_dim_criterion(&u, &cross, &cross.clone()).unwrap(),
        MiddleDimVerdict::Inconclusive
    );
    // equal finite orders are inconclusive
    assert_eq!(
        middle_dim_criterion(&u, &within, &within.clone()).unwrap(),
        MiddleDimVerdict::Inconclusive
    );
    // sanity: the orders really are 1 and infinity
    assert_eq!(
        crate::homology::cycle_class_order(&u, &within).unwrap(),
        CycleOrder::Finite(BigUint::from(1u32))
    );
    assert_eq!(
        crate::homology::cycle_class_order(&u, &cross).unwrap(),
        CycleOrder::Infinite
    );
}
