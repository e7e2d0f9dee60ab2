use std::collections::BTreeSet;

use super::*;
use crate::chaincore::{pair_index, CellId, CoefficientSpec};
use crate::homology::{
    cycle_class_order, homology, homology_field, homology_integral, relative_homology,
    CycleOrder,
};
use crate::morserules::{verdict, Outcome, Witness};

fn all_coeffs() -> Vec<CoefficientSpec> {
    vec![
        CoefficientSpec::Rationals,
        CoefficientSpec::PrimeField(2),
        CoefficientSpec::PrimeField(3),
        CoefficientSpec::PrimeField(5),
        CoefficientSpec::PrimeField(7),
        CoefficientSpec::Integers,
        CoefficientSpec::IntegersMod(2),
        CoefficientSpec::IntegersMod(3),
        CoefficientSpec::IntegersMod(4),
    ]
}

#[test]
fn reference_spaces_have_documented_homology() {
    let lens4 = reference_complex(&ReferenceSpace::Lens(4));
    let h = homology_integral(&lens4);
    assert_eq!(h.betti_vector(4), vec![1, 0, 0, 1]);
    assert_eq!(h.torsion(1), &[4]);

    let rp2 = reference_complex(&ReferenceSpace::Rp2);
    assert_eq!(
        homology_field(&rp2, &CoefficientSpec::PrimeField(2)).unwrap(),
        vec![1, 1, 1]
    );

    let s3 = reference_complex(&ReferenceSpace::Sphere(3));
    assert_eq!(
        homology_field(&s3, &CoefficientSpec::Rationals).unwrap(),
        vec![1, 0, 0, 1]
    );

    let t2 = reference_complex(&ReferenceSpace::Torus2);
    assert_eq!(
        homology_field(&t2, &CoefficientSpec::Rationals).unwrap(),
        vec![1, 2, 1]
    );

    let g2 = reference_complex(&ReferenceSpace::Genus(2));
    assert_eq!(
        homology_field(&g2, &CoefficientSpec::Rationals).unwrap(),
        vec![1, 4, 1]
    );

    let s2s1 = reference_complex(&ReferenceSpace::S2xS1);
    let h = homology_integral(&s2s1);
    assert_eq!(h.betti_vector(4), vec![1, 1, 1, 1]);
    assert!(h.torsion(1).is_empty());
}

#[test]
fn reference_names_parse() {
    assert!(reference_complex_by_name("sphere:2").is_ok());
    assert!(reference_complex_by_name("lens:4").is_ok());
    assert!(reference_complex_by_name("genus:3").is_ok());
    assert!(reference_complex_by_name("rp2").is_ok());
    assert!(reference_complex_by_name("lens:0").is_err());
    assert!(reference_complex_by_name("kuehnel_cp2").is_err());
    assert!(reference_complex_by_name("nonsense").is_err());
}

#[test]
fn untwisted_bundle_matches_the_product_in_every_coefficient_system() {
    let base = surfaces::sphere_octahedron();
    let bundle = circle_bundle(&base, 0).unwrap();
    assert!(bundle.validate().is_valid());
    let product = crate::chaincore::product_complex(
        &base.complex.to_cell_complex(),
        &circle_cw(),
    );
    for coeff in all_coeffs() {
        assert_eq!(
            homology(&bundle, &coeff).unwrap().dims,
            homology(&product, &coeff).unwrap().dims,
            "{coeff}"
        );
    }
}

#[test]
fn twisted_bundles_over_the_sphere() {
    let base = surfaces::sphere_octahedron();
    // e = 2: the unit cotangent bundle of S^2, i.e. RP^3
    let rp3 = circle_bundle(&base, 2).unwrap();
    assert!(rp3.validate().is_valid());
    let h = homology_integral(&rp3);
    assert_eq!(h.betti_vector(4), vec![1, 0, 0, 1]);
    assert_eq!(h.torsion(1), &[2]);

    // e = 1: the Hopf bundle, S^3
    let s3 = circle_bundle(&base, 1).unwrap();
    let h = homology_integral(&s3);
    assert_eq!(h.betti_vector(4), vec![1, 0, 0, 1]);
    assert!(h.torsion(1).is_empty());

    // a genus-2 base keeps its surface classes: H_1 = Z^4 + Z_e
    let g2 = torus_like_genus2();
    let bundle = circle_bundle(&g2, 3).unwrap();
    let h = homology_integral(&bundle);
    assert_eq!(h.betti(1), 4);
    assert_eq!(h.torsion(1), &[3]);
}

fn torus_like_genus2() -> SurfaceModel {
    let (surface, _) = surfaces::genus2_with_height(6, 8).unwrap();
    surface
}

#[test]
fn fiber_order_equals_the_euler_number() {
    let base = surfaces::sphere_octahedron();
    for (e, expected) in [
        (0i64, CycleOrder::Infinite),
        (1, CycleOrder::Finite(1u32.into())),
        (2, CycleOrder::Finite(2u32.into())),
        (3, CycleOrder::Finite(3u32.into())),
        (-2, CycleOrder::Finite(2u32.into())),
    ] {
        let bundle = circle_bundle(&base, e).unwrap();
        let fiber = circle_bundle_fiber(&base);
        assert_eq!(cycle_class_order(&bundle, &fiber).unwrap(), expected, "e={e}");
    }
}

#[test]
fn collapsed_bundle_over_a_disk_is_a_three_sphere() {
    let model = collapsed_circle_bundle(&surfaces::disk(6)).unwrap();
    assert!(model.validate().is_valid());
    let h = homology_integral(&model);
    assert_eq!(h.betti_vector(4), vec![1, 0, 0, 1]);
    for l in 0..4 {
        assert!(h.torsion(l).is_empty());
    }
    // cross-check against the lens-space reference L(1,1) = S^3
    let s3 = reference_complex(&ReferenceSpace::Lens(1));
    for coeff in all_coeffs() {
        assert_eq!(
            homology(&model, &coeff).unwrap().dims,
            homology(&s3, &coeff).unwrap().dims,
            "{coeff}"
        );
    }
}

#[test]
fn collapsed_bundle_over_a_band_is_s2_x_s1() {
    let model = collapsed_circle_bundle(&surfaces::annulus(3, 8)).unwrap();
    assert!(model.validate().is_valid());
    let h = homology_integral(&model);
    assert_eq!(h.betti_vector(4), vec![1, 1, 1, 1]);
    assert!(h.torsion(1).is_empty());
}

#[test]
fn bundle_constructors_reject_wrong_bases() {
    assert!(matches!(
        circle_bundle(&surfaces::disk(4), 1),
        Err(MechanicsError::BaseNotClosed)
    ));
    assert!(matches!(
        collapsed_circle_bundle(&surfaces::sphere_octahedron()),
        Err(MechanicsError::BaseClosed)
    ));
}

/// The trivialized-bundle pair over a base with boundary has the relative
/// homology of the product pair (frozen from the hand Kunneth computation).
#[test]
fn trivialized_pair_matches_the_product_pair() {
    for (base, expected) in [
        (surfaces::disk(5), vec![0usize, 0, 1, 1]),
        (surfaces::annulus(3, 6), vec![0, 1, 2, 1]),
    ] {
        let base_cc = base.complex.to_cell_complex();
        let fiber = circle_cw();
        let total = crate::chaincore::product_complex(&base_cc, &fiber);
        // boundary part: cells (sigma x anything) with sigma in the
        // boundary subcomplex
        let bverts = base.boundary_vertices();
        let bedges = base.boundary_edges();
        let in_boundary = |d: usize, idx: usize| -> bool {
            match d {
                0 => bverts.contains(&idx),
                1 => {
                    let e = &base.complex.simplices(1)[idx];
                    bedges.contains(&(e[0], e[1]))
                }
                _ => false,
            }
        };
        let mut a: BTreeSet<CellId> = BTreeSet::new();
        for d in 0..=total.dim().unwrap() {
            for p in 0..=d.min(2) {
                let q = d - p;
                if q > 1 {
                    continue;
                }
                for ia in 0..base_cc.cell_count(p) {
                    if !in_boundary(p, ia) {
                        continue;
                    }
                    for ib in 0..fiber.cell_count(q) {
                        let idx = pair_index(&base_cc, &fiber, d, p, ia, q, ib);
                        a.insert(CellId::new(d, idx));
                    }
                }
            }
        }
        let h = relative_homology(&total, &a, &CoefficientSpec::Rationals).unwrap();
        assert_eq!(h.betti_vector(4), expected);
    }
}

#[test]
fn pendulum_trichotomy_of_integral_h1() {
    let band = pendulum_scenario(&num_rational::BigRational::new(0.into(), 1.into())).unwrap();
    let disk = pendulum_scenario(&num_rational::BigRational::new(1.into(), 1.into())).unwrap();
    let full = pendulum_scenario(&num_rational::BigRational::new(2.into(), 1.into())).unwrap();
    let h_band = homology_integral(&band.level_model);
    let h_disk = homology_integral(&disk.level_model);
    let h_full = homology_integral(&full.level_model);
    // H_1 = Z, 0, Z_2 respectively
    assert_eq!(h_band.betti(1), 1);
    assert!(h_band.torsion(1).is_empty());
    assert_eq!(h_disk.betti(1), 0);
    assert!(h_disk.torsion(1).is_empty());
    assert_eq!(h_full.betti(1), 0);
    assert_eq!(h_full.torsion(1), &[2]);

    // verdicts: both maxima force a change; the top pass carries Z_2
    let v_low = verdict(&band.lower_max_query).unwrap();
    assert_eq!(v_low.outcome, Outcome::MustChange);
    assert_eq!(v_low.rule, "cor:not_global_maximum");
    let v_top = verdict(&band.upper_max_query).unwrap();
    assert_eq!(v_top.outcome, Outcome::MustChange);
    assert_eq!(v_top.rule, "thm:closed_manifold(1)");
    assert_eq!(
        v_top.witness,
        Some(Witness::Coefficients(CoefficientSpec::IntegersMod(2)))
    );
}

/// The observed b_1 change at the pendulum's global maximum (S^3 above,
/// RP^3 below over Q: both have b_1 = 0, so j_1 = 0) sits in the
/// admissible set for a global maximum.
#[test]
fn maxima_rule_admits_the_pendulum_observation() {
    use crate::morserules::maxima_delta_rule;
    let disk = pendulum_scenario(&num_rational::BigRational::new(1.into(), 1.into())).unwrap();
    let full = pendulum_scenario(&num_rational::BigRational::new(2.into(), 1.into())).unwrap();
    let q = CoefficientSpec::Rationals;
    let below = homology(&disk.level_model, &q).unwrap();
    let above = homology(&full.level_model, &q).unwrap();
    let j1 = above.betti(1) as i64 - below.betti(1) as i64;
    assert!(maxima_delta_rule(true).contains(&j1));
    // the non-global pass S^2 x S^1 -> S^3 drops b_1 by one
    let band = pendulum_scenario(&num_rational::BigRational::new(0.into(), 1.into())).unwrap();
    let b_band = homology(&band.level_model, &q).unwrap();
    let j1_low = below.betti(1) as i64 - b_band.betti(1) as i64;
    assert_eq!(maxima_delta_rule(false), vec![j1_low]);
}

#[test]
fn rtbp_low_energy_hill_region_has_three_components() {
    let s = rtbp_scenario(0.2, ((-2.0, 2.0), (-2.0, 2.0)), 101).unwrap();
    let below_all = s.suggested_levels()[0];
    let sub = s.grid.sublevel(below_all);
    let betti =
        homology_field(&sub.complex, &CoefficientSpec::Rationals).unwrap();
    assert_eq!(betti[0], 3);
}
