use std::collections::BTreeSet;

use thiserror::Error;

use super::complex::{CellComplex, CellId, ComplexBuilder};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubcomplexError {
    #[error("subcomplex is not closed under faces: cell {cell} has face {face} outside the set")]
    NotFaceClosed { cell: CellId, face: CellId },
    #[error("cell {0} does not exist in the complex")]
    MissingCell(CellId),
}

/// Cartesian product of complexes. Cells are pairs `(a, b)` graded by the sum
/// of dimensions; the boundary follows the graded Leibniz rule with sign
/// `(-1)^{dim a}` on the second factor.
///
/// Within dimension `d` of the product, cells are ordered by the dimension `p`
/// of the first factor, then by first-factor index, then by second-factor
/// index. `pair_index` reproduces that addressing.
pub fn product_complex(a: &CellComplex, b: &CellComplex) -> CellComplex {
    let da = a.dim().map_or(0, |d| d + 1);
    let db = b.dim().map_or(0, |d| d + 1);
    if a.is_empty() || b.is_empty() {
        return CellComplex::empty();
    }
    let mut builder = ComplexBuilder::new();
    let labeled = has_labels(a) || has_labels(b);
    for d in 0..(da + db).saturating_sub(1) {
        for p in block_range(d, da, db) {
            let q = d - p;
            for ia in 0..a.cell_count(p) {
                for ib in 0..b.cell_count(q) {
                    let mut boundary = Vec::new();
                    // faces from the first factor keep the second fixed
                    if p > 0 {
                        for (fa, ca) in a.boundary_of(CellId::new(p, ia)) {
                            let face = pair_index(a, b, d - 1, p - 1, fa, q, ib);
                            boundary.push((face, ca));
                        }
                    }
                    // faces from the second factor pick up (-1)^p
                    if q > 0 {
                        let sign = if p % 2 == 0 { 1 } else { -1 };
                        for (fb, cb) in b.boundary_of(CellId::new(q, ib)) {
                            let face = pair_index(a, b, d - 1, p, ia, q - 1, fb);
                            boundary.push((face, sign * cb));
                        }
                    }
                    let label = if labeled {
                        let la = a
                            .label(CellId::new(p, ia))
                            .map_or_else(|| format!("{p}:{ia}"), str::to_owned);
                        let lb = b
                            .label(CellId::new(q, ib))
                            .map_or_else(|| format!("{q}:{ib}"), str::to_owned);
                        Some(format!("({la})x({lb})"))
                    } else {
                        None
                    };
                    builder.add_cell(d, &boundary, label);
                }
            }
        }
    }
    builder.build()
}

fn has_labels(c: &CellComplex) -> bool {
    (0..=c.dim().unwrap_or(0)).any(|d| c.cells(d).any(|cell| cell.label.is_some()))
}

fn block_range(d: usize, da: usize, db: usize) -> std::ops::RangeInclusive<usize> {
    let lo = d.saturating_sub(db.saturating_sub(1));
    let hi = d.min(da.saturating_sub(1));
    lo..=hi
}

/// Dense index of the product cell `(p, ia) x (q, ib)` within product
/// dimension `d = p + q`.
pub fn pair_index(
    a: &CellComplex,
    b: &CellComplex,
    d: usize,
    p: usize,
    ia: usize,
    q: usize,
    ib: usize,
) -> usize {
    debug_assert_eq!(p + q, d);
    let da = a.dim().map_or(0, |x| x + 1);
    let db = b.dim().map_or(0, |x| x + 1);
    let mut offset = 0;
    for pp in block_range(d, da, db) {
        if pp == p {
            break;
        }
        offset += a.cell_count(pp) * b.cell_count(d - pp);
    }
    offset + ia * b.cell_count(q) + ib
}

/// Disjoint union; indices of `a` come first in every dimension.
pub fn disjoint_union(a: &CellComplex, b: &CellComplex) -> CellComplex {
    let mut builder = ComplexBuilder::new();
    let top = a
        .dim()
        .map_or(0, |d| d + 1)
        .max(b.dim().map_or(0, |d| d + 1));
    for d in 0..top {
        for idx in 0..a.cell_count(d) {
            let id = CellId::new(d, idx);
            let boundary: Vec<_> = a.boundary_of(id).collect();
            builder.add_cell(d, &boundary, a.label(id).map(str::to_owned));
        }
        let off = if d > 0 { a.cell_count(d - 1) } else { 0 };
        for idx in 0..b.cell_count(d) {
            let id = CellId::new(d, idx);
            let boundary: Vec<_> = b.boundary_of(id).map(|(f, c)| (f + off, c)).collect();
            builder.add_cell(d, &boundary, b.label(id).map(str::to_owned));
        }
    }
    builder.build()
}

/// Collapses a face-closed subcomplex to a single new base vertex.
///
/// Cells of `s` are removed, their incidences dropped from every surviving
/// boundary chain, and one fresh vertex is appended (the image of the
/// collapsed part). Reduced homology of the result equals the relative
/// homology `H(X, A)` in degrees >= 1.
///
/// An empty `s` returns the complex unchanged.
pub fn collapse_subcomplex(
    c: &CellComplex,
    s: &BTreeSet<CellId>,
) -> Result<CellComplex, SubcomplexError> {
    check_face_closed(c, s)?;
    if s.is_empty() {
        return Ok(c.clone());
    }
    let top = c.dim().map_or(0, |d| d + 1);
    // new index of every surviving cell, per dimension
    let mut remap: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    for d in 0..top {
        let mut next = 0;
        let mut map = Vec::with_capacity(c.cell_count(d));
        for idx in 0..c.cell_count(d) {
            if s.contains(&CellId::new(d, idx)) {
                map.push(None);
            } else {
                map.push(Some(next));
                next += 1;
            }
        }
        remap.push(map);
    }
    let mut builder = ComplexBuilder::new();
    for d in 0..top {
        for idx in 0..c.cell_count(d) {
            let id = CellId::new(d, idx);
            if remap[d][idx].is_none() {
                continue;
            }
            let boundary: Vec<_> = c
                .boundary_of(id)
                .filter_map(|(f, coeff)| remap[d - 1][f].map(|nf| (nf, coeff)))
                .collect();
            builder.add_cell(d, &boundary, c.label(id).map(str::to_owned));
        }
    }
    builder.add_cell(0, &[], Some("basepoint".into()));
    Ok(builder.build())
}

/// Verifies that every face of every cell in `s` is itself in `s`.
pub fn check_face_closed(c: &CellComplex, s: &BTreeSet<CellId>) -> Result<(), SubcomplexError> {
    for &id in s {
        if id.idx >= c.cell_count(id.dim) {
            return Err(SubcomplexError::MissingCell(id));
        }
        for (f, _) in c.boundary_of(id) {
            let face = CellId::new(id.dim - 1, f);
            if !s.contains(&face) {
                return Err(SubcomplexError::NotFaceClosed { cell: id, face });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincore::SimplicialComplex;

    fn interval() -> CellComplex {
        // two vertices, one edge
        let mut b = ComplexBuilder::new();
        b.add_cell(0, &[], None);
        b.add_cell(0, &[], None);
        b.add_cell(1, &[(0, -1), (1, 1)], None);
        b.build()
    }

    fn circle_cw() -> CellComplex {
        let mut b = ComplexBuilder::new();
        b.add_cell(0, &[], None);
        b.add_cell(1, &[], None);
        b.build()
    }

    #[test]
    fn interval_times_interval_is_a_square() {
        let sq = product_complex(&interval(), &interval());
        assert!(sq.validate().is_valid());
        assert_eq!(sq.cell_counts(), vec![4, 4, 1]);
        assert_eq!(sq.euler_characteristic(), 1);
    }

    #[test]
    fn torus_cw_from_two_circles() {
        let t2 = product_complex(&circle_cw(), &circle_cw());
        assert!(t2.validate().is_valid());
        assert_eq!(t2.cell_counts(), vec![1, 2, 1]);
        assert_eq!(t2.euler_characteristic(), 0);
    }

    #[test]
    fn euler_characteristic_is_multiplicative() {
        let s2 = SimplicialComplex::simplex_boundary(3).to_cell_complex();
        let t2 = product_complex(&circle_cw(), &circle_cw());
        let prod = product_complex(&s2, &t2);
        assert!(prod.validate().is_valid());
        assert_eq!(
            prod.euler_characteristic(),
            s2.euler_characteristic() * t2.euler_characteristic()
        );
    }

    #[test]
    fn product_with_point_is_identity_up_to_relabeling() {
        let s2 = SimplicialComplex::simplex_boundary(3).to_cell_complex();
        let p = CellComplex::point();
        let prod = product_complex(&s2, &p);
        assert_eq!(prod.cell_counts(), s2.cell_counts());
        for d in 1..=s2.dim().unwrap() {
            for idx in 0..s2.cell_count(d) {
                let lhs: Vec<_> = prod.boundary_of(CellId::new(d, idx)).collect();
                let rhs: Vec<_> = s2.boundary_of(CellId::new(d, idx)).collect();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn disjoint_union_adds_counts() {
        let s2 = SimplicialComplex::simplex_boundary(3).to_cell_complex();
        let both = disjoint_union(&s2, &s2);
        assert!(both.validate().is_valid());
        assert_eq!(both.euler_characteristic(), 4);
        assert_eq!(both.cell_counts(), vec![8, 12, 8]);

        let with_empty = disjoint_union(&s2, &CellComplex::empty());
        assert_eq!(with_empty, s2);

        let two_points = disjoint_union(&CellComplex::point(), &CellComplex::point());
        assert_eq!(two_points.cell_count(0), 2);
    }

    #[test]
    fn collapsing_disk_boundary_gives_a_sphere() {
        // one triangle with its full boundary
        let disk = SimplicialComplex::full_simplex(2).to_cell_complex();
        let boundary: BTreeSet<CellId> = (0..3)
            .map(|i| CellId::new(0, i))
            .chain((0..3).map(|i| CellId::new(1, i)))
            .collect();
        let quotient = collapse_subcomplex(&disk, &boundary).unwrap();
        assert!(quotient.validate().is_valid());
        assert_eq!(quotient.euler_characteristic(), 2);
        // 2-cell survives with an empty boundary chain
        assert_eq!(quotient.boundary_of(CellId::new(2, 0)).count(), 0);
    }

    #[test]
    fn collapsing_everything_gives_a_point() {
        let disk = SimplicialComplex::full_simplex(2).to_cell_complex();
        let everything: BTreeSet<CellId> = (0..=2)
            .flat_map(|d| (0..disk.cell_count(d)).map(move |i| CellId::new(d, i)))
            .collect();
        let q = collapse_subcomplex(&disk, &everything).unwrap();
        assert_eq!(q.cell_counts(), vec![1]);
    }

    #[test]
    fn collapse_rejects_non_face_closed_sets() {
        let disk = SimplicialComplex::full_simplex(2).to_cell_complex();
        let just_the_triangle: BTreeSet<CellId> = [CellId::new(2, 0)].into();
        let err = collapse_subcomplex(&disk, &just_the_triangle).unwrap_err();
        assert!(matches!(err, SubcomplexError::NotFaceClosed { .. }));
    }

    #[test]
    fn collapse_of_empty_set_is_identity() {
        let disk = SimplicialComplex::full_simplex(2).to_cell_complex();
        let q = collapse_subcomplex(&disk, &BTreeSet::new()).unwrap();
        assert_eq!(q, disk);
    }
}
