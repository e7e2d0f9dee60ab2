//! Triangulated surfaces: builders and the link-condition validator.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::chaincore::SimplicialComplex;
use crate::levelset::PLScalarField;

use super::MechanicsError;

/// A triangulated orientable surface, possibly with boundary circles.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    pub complex: SimplicialComplex,
    /// Boundary circles as cyclic vertex lists (consecutive = edge).
    pub boundary_loops: Vec<Vec<usize>>,
}

impl SurfaceModel {
    pub fn closed(c: SimplicialComplex) -> Self {
        SurfaceModel {
            complex: c,
            boundary_loops: Vec::new(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    /// Vertex set of the boundary loops.
    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.boundary_loops.iter().flatten().copied().collect()
    }

    /// Edge set of the boundary loops (sorted pairs).
    pub fn boundary_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for loop_ in &self.boundary_loops {
            let n = loop_.len();
            for i in 0..n {
                let (a, b) = (loop_[i], loop_[(i + 1) % n]);
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }

    /// Checks the surface conditions: every edge lies in one or two
    /// triangles, the single-triangle edges are exactly the declared
    /// boundary, interior vertex links are circles and boundary vertex
    /// links are arcs.
    pub fn validate(&self) -> Result<(), MechanicsError> {
        let c = &self.complex;
        if c.dim() != 2 {
            return Err(MechanicsError::NotASurface("dimension is not 2".into()));
        }
        let mut edge_tris: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in c.simplices(2) {
            for pair in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                *edge_tris.entry(pair).or_insert(0) += 1;
            }
        }
        let declared = self.boundary_edges();
        for e in c.simplices(1) {
            let key = (e[0], e[1]);
            let count = edge_tris.get(&key).copied().unwrap_or(0);
            match count {
                1 => {
                    if !declared.contains(&key) {
                        return Err(MechanicsError::NotASurface(format!(
                            "edge {key:?} is a free boundary edge but not declared"
                        )));
                    }
                }
                2 => {
                    if declared.contains(&key) {
                        return Err(MechanicsError::NotASurface(format!(
                            "declared boundary edge {key:?} is interior"
                        )));
                    }
                }
                n => {
                    return Err(MechanicsError::NotASurface(format!(
                        "edge {key:?} lies in {n} triangles"
                    )))
                }
            }
        }
        let boundary_vs = self.boundary_vertices();
        for v in 0..c.n_vertices() {
            let (link, _) = c.vertex_link(v);
            let nv = link.simplex_count(0);
            let ne = link.simplex_count(1);
            let mut degree = vec![0usize; nv];
            for e in link.simplices(1) {
                degree[e[0]] += 1;
                degree[e[1]] += 1;
            }
            let ok = if boundary_vs.contains(&v) {
                // an arc: two endpoints of degree 1, interior degree 2
                ne + 1 == nv
                    && degree.iter().filter(|&&d| d == 1).count() == 2
                    && degree.iter().all(|&d| d >= 1 && d <= 2)
            } else {
                // a single circle
                nv >= 3 && ne == nv && degree.iter().all(|&d| d == 2)
            };
            if !ok {
                return Err(MechanicsError::NotASurface(format!(
                    "link of vertex {v} is not a {}",
                    if boundary_vs.contains(&v) { "boundary arc" } else { "circle" }
                )));
            }
        }
        Ok(())
    }
}

/// The 6-vertex (minimal) triangulation of the projective plane.
pub fn rp2_six_vertex() -> SimplicialComplex {
    SimplicialComplex::new_closed(
        6,
        [
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 5],
            vec![0, 1, 5],
            vec![1, 2, 4],
            vec![2, 3, 5],
            vec![1, 3, 4],
            vec![2, 4, 5],
            vec![1, 3, 5],
        ],
    )
}

/// The octahedron sphere: 6 vertices, 8 faces.
pub fn sphere_octahedron() -> SurfaceModel {
    SurfaceModel::closed(SimplicialComplex::new_closed(
        6,
        [
            vec![0, 2, 4],
            vec![1, 2, 4],
            vec![1, 3, 4],
            vec![0, 3, 4],
            vec![0, 2, 5],
            vec![1, 2, 5],
            vec![1, 3, 5],
            vec![0, 3, 5],
        ],
    ))
}

/// Fan-triangulated disk: center vertex 0, rim `1..=n`.
pub fn disk(n: usize) -> SurfaceModel {
    assert!(n >= 3);
    let tris = (1..=n).map(|i| vec![0, i, i % n + 1]);
    SurfaceModel {
        complex: SimplicialComplex::new_closed(n + 1, tris),
        boundary_loops: vec![(1..=n).collect()],
    }
}

/// Annulus: `rows >= 2` rings of `cols >= 4` vertices, wrapped in the
/// column direction. Vertex `(r, c)` has index `r * cols + c`.
pub fn annulus(rows: usize, cols: usize) -> SurfaceModel {
    assert!(rows >= 2 && cols >= 4);
    let vid = |r: usize, c: usize| r * cols + c % cols;
    let mut tris = Vec::new();
    for r in 0..rows - 1 {
        for c in 0..cols {
            tris.push(vec![vid(r, c), vid(r + 1, c), vid(r + 1, c + 1)]);
            tris.push(vec![vid(r, c), vid(r + 1, c + 1), vid(r, c + 1)]);
        }
    }
    SurfaceModel {
        complex: SimplicialComplex::new_closed(rows * cols, tris),
        boundary_loops: vec![
            (0..cols).map(|c| vid(0, c)).collect(),
            (0..cols).map(|c| vid(rows - 1, c)).collect(),
        ],
    }
}

/// Grid torus: `p x q` vertices wrapped in both directions, `p, q >= 4`.
pub fn torus_grid(p: usize, q: usize) -> SurfaceModel {
    assert!(p >= 4 && q >= 4);
    let vid = |i: usize, j: usize| (i % p) * q + j % q;
    let mut tris = Vec::new();
    for i in 0..p {
        for j in 0..q {
            tris.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            tris.push(vec![vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    SurfaceModel::closed(SimplicialComplex::new_closed(p * q, tris))
}

/// Height of the "standing" torus embedding on the `p x q` grid:
/// `z(i, j) = (R + r cos(2 pi i / p)) sin(2 pi j / q)` with `R=2, r=1`.
/// Exact rationals obtained from the f64 samples.
pub fn torus_height_values(p: usize, q: usize) -> Vec<BigRational> {
    let mut values = Vec::with_capacity(p * q);
    for i in 0..p {
        for j in 0..q {
            let u = 2.0 * std::f64::consts::PI * i as f64 / p as f64;
            let v = 2.0 * std::f64::consts::PI * j as f64 / q as f64;
            let z = (2.0 + u.cos()) * v.sin();
            values.push(BigRational::from_float(z).expect("finite sample"));
        }
    }
    values
}

/// The standing torus as a PL field (4 smooth critical points: bottom,
/// two inner saddles, top).
pub fn torus_height_field(p: usize, q: usize) -> PLScalarField {
    let surface = torus_grid(p, q);
    PLScalarField::new(surface.complex, torus_height_values(p, q)).expect("value count")
}

/// Glues two closed surfaces along one removed triangle each (a connected
/// sum). The triangle vertices are identified in the orientation that keeps
/// the result orientable; the choice is verified homologically.
pub fn connected_sum(
    a: &SurfaceModel,
    tri_a: usize,
    b: &SurfaceModel,
    tri_b: usize,
) -> Result<(SurfaceModel, Vec<usize>), MechanicsError> {
    assert!(a.is_closed() && b.is_closed());
    let ta = a.complex.simplices(2)[tri_a].clone();
    let tb = b.complex.simplices(2)[tri_b].clone();
    // candidate identifications of the boundary triangles
    let matchings = [
        [(0usize, 0usize), (1, 2), (2, 1)],
        [(0, 0), (1, 1), (2, 2)],
    ];
    for matching in matchings {
        let built = glue_with_matching(a, tri_a, &ta, b, tri_b, &tb, &matching);
        if built.0.validate().is_err() {
            continue;
        }
        // orientable iff H_2 = Z (equivalently, torsion-free H_1)
        let h = crate::homology::homology_integral(&built.0.complex.to_cell_complex());
        if h.betti(2) == 1 && h.torsion(1).is_empty() {
            return Ok(built);
        }
    }
    Err(MechanicsError::NotASurface(
        "no orientable gluing found".into(),
    ))
}

/// Performs the gluing with an explicit vertex matching; returns the glued
/// surface and the map from old `b`-vertex index to new index.
fn glue_with_matching(
    a: &SurfaceModel,
    tri_a: usize,
    ta: &[usize],
    b: &SurfaceModel,
    tri_b: usize,
    tb: &[usize],
    matching: &[(usize, usize); 3],
) -> (SurfaceModel, Vec<usize>) {
    let na = a.complex.n_vertices();
    // b-vertices map after na, except the matched triangle vertices
    let mut b_map: Vec<usize> = Vec::with_capacity(b.complex.n_vertices());
    let matched: BTreeMap<usize, usize> = matching
        .iter()
        .map(|&(ia, ib)| (tb[ib], ta[ia]))
        .collect();
    let mut next = na;
    for v in 0..b.complex.n_vertices() {
        match matched.get(&v) {
            Some(&target) => b_map.push(target),
            None => {
                b_map.push(next);
                next += 1;
            }
        }
    }
    let mut tris: Vec<Vec<usize>> = Vec::new();
    for (i, t) in a.complex.simplices(2).iter().enumerate() {
        if i != tri_a {
            tris.push(t.clone());
        }
    }
    for (i, t) in b.complex.simplices(2).iter().enumerate() {
        if i != tri_b {
            tris.push(t.iter().map(|&v| b_map[v]).collect());
        }
    }
    (
        SurfaceModel::closed(SimplicialComplex::new_closed(next, tris)),
        b_map,
    )
}

/// A genus-2 surface with a height function: two standing tori stacked
/// vertically and tubed together near the middle.
pub fn genus2_with_height(p: usize, q: usize) -> Result<(SurfaceModel, Vec<BigRational>), MechanicsError> {
    let upper = torus_grid(p, q);
    let lower = torus_grid(p, q);
    let shift = BigRational::from_integer(5.into());
    let mut upper_vals: Vec<BigRational> = torus_height_values(p, q)
        .into_iter()
        .map(|v| v + &shift)
        .collect();
    let lower_vals: Vec<BigRational> = torus_height_values(p, q)
        .into_iter()
        .map(|v| v - &shift)
        .collect();
    // glue a triangle near the bottom of the upper torus to one near the
    // top of the lower torus: pick triangles whose vertices sit at the
    // extreme ring (j = 3q/4 has sin = -1; j = q/4 has sin = +1)
    let tri_near = |surface: &SurfaceModel, i0: usize, j0: usize| -> usize {
        let target = [
            (i0 % p) * q + j0 % q,
            ((i0 + 1) % p) * q + j0 % q,
            ((i0 + 1) % p) * q + (j0 + 1) % q,
        ];
        let mut key: Vec<usize> = target.to_vec();
        key.sort_unstable();
        surface
            .complex
            .simplices(2)
            .iter()
            .position(|t| *t == key)
            .expect("grid triangle present")
    };
    let tri_up = tri_near(&upper, 0, 3 * q / 4);
    let tri_low = tri_near(&lower, 0, q / 4);
    let merged = upper.complex.simplices(2)[tri_up].clone();
    let (glued, b_map) = connected_sum(&upper, tri_up, &lower, tri_low)?;
    // merged vertices take fresh values near the middle of the gap
    let zero = BigRational::from_integer(0.into());
    let mut values = vec![zero; glued.complex.n_vertices()];
    for (v, val) in upper_vals.drain(..).enumerate() {
        values[v] = val;
    }
    for (v, val) in lower_vals.into_iter().enumerate() {
        values[b_map[v]] = val;
    }
    for (n, v) in merged.into_iter().enumerate() {
        values[v] = BigRational::new((n as i64).into(), 10.into());
    }
    Ok((glued, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincore::CoefficientSpec;
    use crate::homology::{homology_field, homology_integral};

    #[test]
    fn builders_validate_as_surfaces() {
        sphere_octahedron().validate().unwrap();
        disk(5).validate().unwrap();
        annulus(3, 6).validate().unwrap();
        torus_grid(4, 4).validate().unwrap();
        SurfaceModel::closed(rp2_six_vertex()).validate().unwrap();
    }

    #[test]
    fn validator_rejects_broken_surfaces() {
        // two triangles sharing an edge, plus a third on the same edge
        let c = SimplicialComplex::new_closed(
            5,
            [vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]],
        );
        assert!(SurfaceModel::closed(c).validate().is_err());
        // undeclared boundary
        let single = SimplicialComplex::new_closed(3, [vec![0, 1, 2]]);
        assert!(SurfaceModel::closed(single).validate().is_err());
    }

    #[test]
    fn torus_grid_homology() {
        let t = torus_grid(5, 4);
        let b = homology_field(&t.complex.to_cell_complex(), &CoefficientSpec::Rationals).unwrap();
        assert_eq!(b, vec![1, 2, 1]);
    }

    #[test]
    fn annulus_homology() {
        let a = annulus(3, 6);
        let b = homology_field(&a.complex.to_cell_complex(), &CoefficientSpec::Rationals).unwrap();
        assert_eq!(b, vec![1, 1, 0]);
    }

    #[test]
    fn genus2_is_an_orientable_genus_two_surface() {
        let (surface, values) = genus2_with_height(6, 8).unwrap();
        surface.validate().unwrap();
        let cc = surface.complex.to_cell_complex();
        assert_eq!(cc.euler_characteristic(), -2);
        let h = homology_integral(&cc);
        assert_eq!(h.betti_vector(3), vec![1, 4, 1]);
        assert!(h.torsion(1).is_empty());
        assert_eq!(values.len(), surface.complex.n_vertices());
    }
}
