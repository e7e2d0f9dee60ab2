//! Scenario builders: reference spaces, twisted and collapsed circle
//! bundles, and the worked mechanical systems (quadratic spherical
//! pendulum, planar restricted 3-body problem, planar n-body queries).

pub mod surfaces;

mod nbody;
mod pendulum;
mod rtbp;

pub use nbody::nbody_query;
pub use pendulum::{pendulum_critical_values, pendulum_scenario, PendulumRegime, PendulumScenario};
pub use rtbp::{rtbp_potential_value, rtbp_scenario, Equilibrium, RtbpScenario};
pub use surfaces::{
    annulus, connected_sum, disk, genus2_with_height, rp2_six_vertex, sphere_octahedron,
    torus_grid, torus_height_field, SurfaceModel,
};

use thiserror::Error;

use crate::chaincore::{product_complex, CellComplex, ComplexBuilder, SimplicialComplex};
use crate::homology::{CycleChain, HomologyError};
use crate::levelset::LevelsetError;

#[derive(Debug, Error)]
pub enum MechanicsError {
    #[error("unknown reference space {0:?}")]
    UnknownReference(String),
    #[error("not a valid surface: {0}")]
    NotASurface(String),
    #[error("circle bundles need a closed base (got boundary loops)")]
    BaseNotClosed,
    #[error("collapsed bundles need a base with boundary; use circle_bundle for closed bases")]
    BaseClosed,
    #[error("energy {0} is a critical value")]
    CriticalEnergy(String),
    #[error("mass ratio {0} must lie strictly between 0 and 1")]
    BadMassRatio(f64),
    #[error("n-body scenarios need n >= 2 (got {0})")]
    TooFewBodies(usize),
    #[error("grid too coarse: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Levelset(#[from] LevelsetError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Reference spaces with documented homology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReferenceSpace {
    /// Boundary of the (n+1)-simplex.
    Sphere(usize),
    /// One-vertex CW torus.
    Torus2,
    /// 6-vertex triangulated projective plane.
    Rp2,
    /// Lens space L(k,1); `L(1,1)` is the 3-sphere, `L(2,1)` is RP^3.
    Lens(u64),
    /// Product CW structure on S^2 x S^1.
    S2xS1,
    /// One-vertex CW surface of genus g.
    Genus(usize),
}

pub fn reference_complex(space: &ReferenceSpace) -> CellComplex {
    match space {
        ReferenceSpace::Sphere(n) => SimplicialComplex::simplex_boundary(n + 1).to_cell_complex(),
        ReferenceSpace::Torus2 => genus_cw(1),
        ReferenceSpace::Rp2 => surfaces::rp2_six_vertex().to_cell_complex(),
        ReferenceSpace::Lens(k) => lens_cw(*k),
        ReferenceSpace::S2xS1 => {
            let mut s2 = ComplexBuilder::new();
            s2.add_cell(0, &[], None);
            s2.add_cell(2, &[], None);
            product_complex(&s2.build(), &circle_cw())
        }
        ReferenceSpace::Genus(g) => genus_cw(*g),
    }
}

/// Parses `sphere:<n> | torus2 | rp2 | lens:<k> | s2xs1 | genus:<g>`.
pub fn reference_complex_by_name(name: &str) -> Result<CellComplex, MechanicsError> {
    let space = match name {
        "torus2" => ReferenceSpace::Torus2,
        "rp2" => ReferenceSpace::Rp2,
        "s2xs1" => ReferenceSpace::S2xS1,
        other => {
            if let Some(n) = other.strip_prefix("sphere:") {
                ReferenceSpace::Sphere(
                    n.parse()
                        .map_err(|_| MechanicsError::UnknownReference(name.into()))?,
                )
            } else if let Some(k) = other.strip_prefix("lens:") {
                let k: u64 = k
                    .parse()
                    .map_err(|_| MechanicsError::UnknownReference(name.into()))?;
                if k == 0 {
                    return Err(MechanicsError::UnknownReference(name.into()));
                }
                ReferenceSpace::Lens(k)
            } else if let Some(g) = other.strip_prefix("genus:") {
                ReferenceSpace::Genus(
                    g.parse()
                        .map_err(|_| MechanicsError::UnknownReference(name.into()))?,
                )
            } else {
                // kuehnel_cp2 is reserved but not built
                return Err(MechanicsError::UnknownReference(name.into()));
            }
        }
    };
    Ok(reference_complex(&space))
}

pub(crate) fn circle_cw() -> CellComplex {
    let mut b = ComplexBuilder::new();
    b.add_cell(0, &[], Some("v".into()));
    b.add_cell(1, &[], Some("f".into()));
    b.build()
}

/// Lens space L(k,1): one cell per dimension, the 2-cell wrapping the
/// 1-cell k times.
fn lens_cw(k: u64) -> CellComplex {
    let mut b = ComplexBuilder::new();
    b.add_cell(0, &[], None);
    b.add_cell(1, &[], None);
    b.add_cell(2, &[(0, k as i64)], None);
    b.add_cell(3, &[], None);
    b.build()
}

/// One-vertex CW surface of genus g: 2g loops and one 2-cell whose
/// attaching word is the product of commutators (boundary zero at chain
/// level).
fn genus_cw(g: usize) -> CellComplex {
    let mut b = ComplexBuilder::new();
    b.add_cell(0, &[], None);
    for _ in 0..2 * g {
        b.add_cell(1, &[], None);
    }
    b.add_cell(2, &[], None);
    b.build()
}

/// Cell layout of the circle-bundle complexes: section cells `(cell x pt)`
/// first in every dimension, then fiber-direction cells `(cell x f)`.
///
/// The Euler twist adds an incidence `e` from the distinguished 2-cell
/// (the lexicographically first triangle) onto the fiber circle over
/// vertex 0.
pub fn circle_bundle(base: &SurfaceModel, e: i64) -> Result<CellComplex, MechanicsError> {
    if !base.is_closed() {
        return Err(MechanicsError::BaseNotClosed);
    }
    base.validate()?;
    let sc = &base.complex;
    let (n0, n1, n2) = (
        sc.simplex_count(0),
        sc.simplex_count(1),
        sc.simplex_count(2),
    );
    let mut b = ComplexBuilder::new();
    // dim 0: v x pt
    for _ in 0..n0 {
        b.add_cell(0, &[], None);
    }
    // dim 1: e x pt, then v x f
    for edge in sc.simplices(1) {
        b.add_cell(1, &simplicial_boundary(sc, edge), None);
    }
    for _ in 0..n0 {
        b.add_cell(1, &[], None);
    }
    // dim 2: t x pt (with the twist on the first), then e x f
    for (ti, tri) in sc.simplices(2).iter().enumerate() {
        let mut chain = simplicial_boundary(sc, tri);
        if ti == 0 && e != 0 {
            chain.push((n1, e)); // fiber over vertex 0
        }
        b.add_cell(2, &chain, None);
    }
    for edge in sc.simplices(1) {
        // d(e x f) = (de) x f
        let chain: Vec<(usize, i64)> = simplicial_boundary(sc, edge)
            .into_iter()
            .map(|(v, c)| (n1 + v, c))
            .collect();
        b.add_cell(2, &chain, None);
    }
    // dim 3: t x f
    for tri in sc.simplices(2).iter() {
        let chain: Vec<(usize, i64)> = simplicial_boundary(sc, tri)
            .into_iter()
            .map(|(ei, c)| (n2 + ei, c))
            .collect();
        b.add_cell(3, &chain, None);
    }
    Ok(b.build())
}

/// The fiber circle over vertex 0 in a `circle_bundle` complex.
pub fn circle_bundle_fiber(base: &SurfaceModel) -> CycleChain {
    CycleChain::new(1, vec![(base.complex.simplex_count(1), 1)])
}

/// The level-set model over a Hill region with boundary: the product
/// `base x S^1` with every fiber over the boundary collapsed to a point.
/// At chain level the fiber-direction cells over boundary simplices are
/// deleted and their incidences dropped.
pub fn collapsed_circle_bundle(base: &SurfaceModel) -> Result<CellComplex, MechanicsError> {
    if base.is_closed() {
        return Err(MechanicsError::BaseClosed);
    }
    base.validate()?;
    let sc = &base.complex;
    let bverts = base.boundary_vertices();
    let bedges = base.boundary_edges();
    let interior_v: Vec<Option<usize>> = {
        let mut next = 0;
        (0..sc.simplex_count(0))
            .map(|v| {
                (!bverts.contains(&v)).then(|| {
                    let i = next;
                    next += 1;
                    i
                })
            })
            .collect()
    };
    let interior_e: Vec<Option<usize>> = {
        let mut next = 0;
        sc.simplices(1)
            .iter()
            .map(|e| {
                (!bedges.contains(&(e[0], e[1]))).then(|| {
                    let i = next;
                    next += 1;
                    i
                })
            })
            .collect()
    };
    let (n0, n1, n2) = (
        sc.simplex_count(0),
        sc.simplex_count(1),
        sc.simplex_count(2),
    );
    let mut b = ComplexBuilder::new();
    for _ in 0..n0 {
        b.add_cell(0, &[], None);
    }
    for edge in sc.simplices(1) {
        b.add_cell(1, &simplicial_boundary(sc, edge), None);
    }
    for v in 0..n0 {
        if interior_v[v].is_some() {
            b.add_cell(1, &[], None);
        }
    }
    for tri in sc.simplices(2) {
        b.add_cell(2, &simplicial_boundary(sc, tri), None);
    }
    for (ei, edge) in sc.simplices(1).iter().enumerate() {
        if interior_e[ei].is_none() {
            continue;
        }
        let chain: Vec<(usize, i64)> = simplicial_boundary(sc, edge)
            .into_iter()
            .filter_map(|(v, c)| interior_v[v].map(|iv| (n1 + iv, c)))
            .collect();
        b.add_cell(2, &chain, None);
    }
    for tri in sc.simplices(2) {
        let chain: Vec<(usize, i64)> = simplicial_boundary(sc, tri)
            .into_iter()
            .filter_map(|(ei, c)| interior_e[ei].map(|ie| (n2 + ie, c)))
            .collect();
        b.add_cell(3, &chain, None);
    }
    Ok(b.build())
}

/// Standard alternating-sign boundary of a simplex, as indices into the
/// dimension below.
fn simplicial_boundary(sc: &SimplicialComplex, verts: &[usize]) -> Vec<(usize, i64)> {
    let mut out = Vec::with_capacity(verts.len());
    for skip in 0..verts.len() {
        let mut f = verts.to_vec();
        f.remove(skip);
        let idx = sc.index_of(&f).expect("closed complex");
        out.push((idx, if skip % 2 == 0 { 1 } else { -1 }));
    }
    out
}

#[cfg(test)]
mod tests;
