use num_rational::BigRational;

use super::*;
use crate::chaincore::{CellComplex, CellId, SimplicialComplex};
use crate::homology::homology_field;
use crate::mechanics::surfaces::torus_height_field;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn ratq(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn field_on(base: SimplicialComplex, values: &[i64]) -> PLScalarField {
    PLScalarField::new(base, values.iter().map(|&v| rat(v)).collect()).unwrap()
}

fn betti_q(c: &CellComplex) -> Vec<usize> {
    homology_field(c, &crate::chaincore::CoefficientSpec::Rationals).unwrap()
}

/// b_0 by union-find on the 1-skeleton; independent of the matrix pipeline.
fn components_oracle(c: &CellComplex) -> usize {
    let n = c.cell_count(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in 0..c.cell_count(1) {
        let ends: Vec<usize> = c.boundary_of(CellId::new(1, e)).map(|(f, _)| f).collect();
        if ends.len() == 2 {
            let (a, b) = (find(&mut parent, ends[0]), find(&mut parent, ends[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

#[test]
fn slice_of_one_triangle_is_an_edge() {
    let f = field_on(SimplicialComplex::full_simplex(2), &[0, 1, 2]);
    let slice = f.slice(&ratq(1, 2)).unwrap();
    assert!(slice.validate().is_valid());
    assert_eq!(slice.cell_counts(), vec![2, 1]);
    assert_eq!(betti_q(&slice), vec![1, 0]);
}

#[test]
fn slice_of_tetrahedron_boundary_is_a_circle() {
    let f = field_on(SimplicialComplex::simplex_boundary(3), &[0, 1, 2, 3]);
    let slice = f.slice(&ratq(3, 2)).unwrap();
    assert!(slice.validate().is_valid());
    assert_eq!(betti_q(&slice), vec![1, 1]);
    assert_eq!(components_oracle(&slice), 1);
}

#[test]
fn torus_middle_band_slices_into_two_circles() {
    let f = torus_height_field(8, 8);
    let slice = f.slice(&rat(0)).unwrap();
    assert!(slice.validate().is_valid());
    assert_eq!(betti_q(&slice), vec![2, 2]);
    assert_eq!(components_oracle(&slice), 2);
}

#[test]
fn slice_rejects_vertex_levels_only_without_perturbation() {
    let strict = field_on(SimplicialComplex::full_simplex(2), &[0, 1, 2]).with_perturbation(false);
    assert!(matches!(
        strict.slice(&rat(1)),
        Err(LevelsetError::LevelHitsVertex { vertex: 1, .. })
    ));
    let perturbed = field_on(SimplicialComplex::full_simplex(2), &[0, 1, 2]);
    // with perturbation the tied vertex counts as above the level
    let slice = perturbed.slice(&rat(1)).unwrap();
    assert_eq!(betti_q(&slice), vec![1, 0]);
}

#[test]
fn region_of_one_triangle_is_contractible() {
    let f = field_on(SimplicialComplex::full_simplex(2), &[0, 1, 2]);
    let region = f.region(Some(&ratq(1, 2)), Some(&ratq(3, 2))).unwrap();
    assert!(region.complex.validate().is_valid());
    assert_eq!(region.complex.euler_characteristic(), 1);
    assert_eq!(betti_q(&region.complex), vec![1, 0, 0]);
    assert!(!region.lower_cap.is_empty() && !region.upper_cap.is_empty());
}

#[test]
fn sphere_band_missing_both_poles_is_an_annulus() {
    let f = field_on(SimplicialComplex::simplex_boundary(3), &[0, 1, 2, 3]);
    let region = f.region(Some(&ratq(1, 2)), Some(&ratq(5, 2))).unwrap();
    assert!(region.complex.validate().is_valid());
    assert_eq!(betti_q(&region.complex), vec![1, 1, 0]);
}

#[test]
fn full_range_region_is_the_whole_complex() {
    let f = torus_height_field(6, 6);
    let (lo, hi) = f.value_range().unwrap();
    let region = f
        .region(Some(&(lo - rat(1))), Some(&(hi + rat(1))))
        .unwrap();
    assert_eq!(
        region.complex.euler_characteristic(),
        f.base().to_cell_complex().euler_characteristic()
    );
    assert_eq!(
        region.complex.cell_counts(),
        f.base().to_cell_complex().cell_counts()
    );
    assert!(region.lower_cap.is_empty() && region.upper_cap.is_empty());
}

#[test]
fn torus_sublevel_below_first_saddle_is_a_disk() {
    let f = torus_height_field(8, 8);
    // smooth critical values: -3, -1, 1, 3
    let sub = f.sublevel(&rat(-2)).unwrap();
    assert!(sub.complex.validate().is_valid());
    assert_eq!(betti_q(&sub.complex), vec![1, 0, 0]);
    // above the maximum the sublevel is everything
    let all = f.sublevel(&rat(4)).unwrap();
    assert_eq!(betti_q(&all.complex), vec![1, 2, 1]);
}

#[test]
fn sweep_of_sphere_heights_is_constant() {
    let f = field_on(SimplicialComplex::simplex_boundary(3), &[0, 1, 2, 3]);
    let levels = vec![ratq(1, 2), ratq(3, 2), ratq(5, 2)];
    let table = sweep_pl(
        &f,
        &levels,
        &crate::chaincore::CoefficientSpec::Rationals,
        SweepKind::LevelSet,
    )
    .unwrap();
    assert!(table.jumps.is_empty());
    for e in &table.entries {
        assert_eq!(e.summary.betti_vector(2), vec![1, 1]);
    }
}

#[test]
fn sweep_of_torus_heights_counts_components_1_2_1() {
    let f = torus_height_field(8, 8);
    let levels = vec![rat(-2), rat(0), rat(2)];
    let table = sweep_pl(
        &f,
        &levels,
        &crate::chaincore::CoefficientSpec::Rationals,
        SweepKind::LevelSet,
    )
    .unwrap();
    assert_eq!(table.betti_series(0), vec![1, 2, 1]);
    assert_eq!(table.jumps, vec![0, 1]);
    let csv = table.to_csv();
    assert!(csv.starts_with("level,b0,b1"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn slices_of_f_and_minus_f_agree() {
    let f = torus_height_field(6, 8);
    let g = f.negated();
    for a in [ratq(-5, 2), ratq(1, 3), ratq(3, 2)] {
        let s1 = f.slice(&a).unwrap();
        let s2 = g.slice(&(-a.clone())).unwrap();
        assert_eq!(betti_q(&s1), betti_q(&s2), "level {a}");
    }
}

/// Slices of closed PL manifolds are closed pseudomanifolds: every
/// codimension-one slice cell lies in exactly two top cells.
#[test]
fn slices_are_pseudomanifolds() {
    let torus = torus_height_field(6, 6);
    let sphere = field_on(SimplicialComplex::simplex_boundary(4), &[0, 1, 2, 3, 4]);
    for (slice, top) in [
        (torus.slice(&ratq(1, 3)).unwrap(), 1usize),
        (sphere.slice(&ratq(5, 2)).unwrap(), 2usize),
    ] {
        let mut cofaces = vec![0usize; slice.cell_count(top - 1)];
        for c in 0..slice.cell_count(top) {
            for (f, _) in slice.boundary_of(CellId::new(top, c)) {
                cofaces[f] += 1;
            }
        }
        assert!(cofaces.iter().all(|&n| n == 2));
    }
}

#[test]
fn critical_vertices_of_sphere_by_index() {
    let f = field_on(SimplicialComplex::simplex_boundary(3), &[0, 1, 2, 3]);
    let crits: Vec<_> = f
        .critical_vertices()
        .unwrap()
        .into_iter()
        .filter(|c| c.is_critical())
        .collect();
    assert_eq!(crits.len(), 2);
    assert_eq!(crits[0].index(), Some(0));
    assert_eq!(crits[1].index(), Some(2));
}

#[test]
fn critical_vertices_of_the_standing_torus() {
    let f = torus_height_field(8, 8);
    let crits: Vec<_> = f
        .critical_vertices()
        .unwrap()
        .into_iter()
        .filter(|c| c.is_critical())
        .collect();
    let mut indices: Vec<usize> = crits.iter().filter_map(|c| c.index()).collect();
    indices.sort_unstable();
    assert_eq!(indices, vec![0, 1, 1, 2]);
    let values = f.critical_values().unwrap();
    assert_eq!(values.len(), 4);
    // auto levels interleave: 5 levels around 4 critical values
    assert_eq!(f.auto_levels().unwrap().len(), 5);
}

#[test]
fn grid_sublevel_component_jumps_happen_at_saddles() {
    // two wells merging through one saddle: f = (x^2 - 1)^2 + y^2
    let g = grid::GridField::sample(
        41,
        41,
        (-2.0, -2.0),
        (0.1, 0.1),
        |x, y| (x * x - 1.0).powi(2) + y * y,
        |_, _| false,
    );
    let crits = g.critical_points();
    let saddle = crits
        .iter()
        .find(|c| c.pattern == grid::PatternKind::Saddle)
        .expect("saddle detected");
    assert_eq!(saddle.index, Some(1));
    let minima = crits
        .iter()
        .filter(|c| c.pattern == grid::PatternKind::Minimum)
        .count();
    assert_eq!(minima, 2);
    let table = grid::sweep_grid(
        &g,
        &[0.5, 1.5],
        &crate::chaincore::CoefficientSpec::Rationals,
    )
    .unwrap();
    assert_eq!(table.betti_series(0), vec![2, 1]);
    // the only jump interval brackets the saddle value (1.0)
    assert_eq!(table.jumps, vec![0]);
    assert!(saddle.value > 0.5 && saddle.value < 1.5);
}

#[test]
fn value_count_mismatch_is_rejected() {
    let base = SimplicialComplex::full_simplex(2);
    assert!(matches!(
        PLScalarField::new(base, vec![rat(0)]),
        Err(LevelsetError::ValueCount { vertices: 3, values: 1 })
    ));
}

#[test]
fn bad_band_is_rejected() {
    let f = field_on(SimplicialComplex::full_simplex(2), &[0, 1, 2]);
    assert!(matches!(
        f.region(Some(&rat(2)), Some(&rat(1))),
        Err(LevelsetError::BadBand { .. })
    ));
}
