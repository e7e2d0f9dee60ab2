use std::collections::{BTreeSet, HashMap};

use super::complex::{CellComplex, ComplexBuilder};

/// An abstract simplicial complex on vertices `0..n_vertices`.
///
/// Simplices are stored per dimension as lexicographically sorted vertex
/// lists, closed under taking faces. The indices within each dimension are
/// the cell addresses of [`SimplicialComplex::to_cell_complex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// Builds the downward closure of the given simplices. Every vertex in
    /// `0..n_vertices` is included even if it appears in no listed simplex.
    pub fn new_closed<I>(n_vertices: usize, maximal: I) -> Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for mut s in maximal {
            s.sort_unstable();
            s.dedup();
            assert!(!s.is_empty(), "empty simplex");
            assert!(
                *s.last().unwrap() < n_vertices,
                "simplex vertex out of range"
            );
            let d = s.len() - 1;
            while by_dim.len() <= d {
                by_dim.push(BTreeSet::new());
            }
            by_dim[d].insert(s);
        }
        if by_dim.is_empty() {
            by_dim.push(BTreeSet::new());
        }
        for v in 0..n_vertices {
            by_dim[0].insert(vec![v]);
        }
        // close downward
        for d in (1..by_dim.len()).rev() {
            let faces: Vec<Vec<usize>> = by_dim[d]
                .iter()
                .flat_map(|s| {
                    (0..s.len()).map(move |i| {
                        let mut f = s.clone();
                        f.remove(i);
                        f
                    })
                })
                .collect();
            by_dim[d - 1].extend(faces);
        }
        let simplices: Vec<Vec<Vec<usize>>> =
            by_dim.into_iter().map(|set| set.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        SimplicialComplex {
            n_vertices,
            simplices,
            index,
        }
    }

    /// The full `n`-simplex (all faces of `{0, .., n}`).
    pub fn full_simplex(n: usize) -> Self {
        SimplicialComplex::new_closed(n + 1, [(0..=n).collect::<Vec<_>>()])
    }

    /// The boundary of the `n`-simplex, a triangulated `(n-1)`-sphere.
    pub fn simplex_boundary(n: usize) -> Self {
        let faces = (0..=n).map(|skip| (0..=n).filter(|&v| v != skip).collect::<Vec<_>>());
        SimplicialComplex::new_closed(n + 1, faces)
    }

    /// A simplicial circle with `n >= 3` vertices.
    pub fn circle(n: usize) -> Self {
        assert!(n >= 3);
        let edges = (0..n).map(|i| vec![i, (i + 1) % n]);
        SimplicialComplex::new_closed(n, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Simplices of dimension `d`, each a sorted vertex list.
    pub fn simplices(&self, d: usize) -> &[Vec<usize>] {
        self.simplices.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn simplex_count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    /// Index of a simplex (given by sorted vertices) within its dimension.
    pub fn index_of(&self, verts: &[usize]) -> Option<usize> {
        self.index.get(verts.len() - 1)?.get(verts).copied()
    }

    pub fn contains(&self, verts: &[usize]) -> bool {
        self.index_of(verts).is_some()
    }

    /// The chain complex with the standard alternating-sign boundary.
    pub fn to_cell_complex(&self) -> CellComplex {
        self.cell_complex_impl(false)
    }

    /// Same, with vertex-list labels on every cell (for reports).
    pub fn to_labeled_cell_complex(&self) -> CellComplex {
        self.cell_complex_impl(true)
    }

    fn cell_complex_impl(&self, labeled: bool) -> CellComplex {
        let mut b = ComplexBuilder::new();
        for (d, list) in self.simplices.iter().enumerate() {
            for s in list {
                let mut boundary = Vec::new();
                if d > 0 {
                    for i in 0..s.len() {
                        let mut f = s.clone();
                        f.remove(i);
                        let idx = self.index[d - 1][&f];
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        boundary.push((idx, sign));
                    }
                }
                let label = labeled.then(|| {
                    s.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(".")
                });
                b.add_cell(d, &boundary, label);
            }
        }
        b.build()
    }

    /// Link of a vertex, reindexed onto a dense vertex set. Returns the link
    /// complex and the map from new vertex index to original vertex id.
    pub fn vertex_link(&self, v: usize) -> (SimplicialComplex, Vec<usize>) {
        let mut link_simplices: Vec<Vec<usize>> = Vec::new();
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for list in &self.simplices {
            for s in list {
                if let Ok(pos) = s.binary_search(&v) {
                    let mut f = s.clone();
                    f.remove(pos);
                    if !f.is_empty() {
                        verts.extend(f.iter().copied());
                        link_simplices.push(f);
                    }
                }
            }
        }
        let order: Vec<usize> = verts.into_iter().collect();
        let back: HashMap<usize, usize> =
            order.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let reindexed = link_simplices
            .into_iter()
            .map(|s| s.into_iter().map(|w| back[&w]).collect());
        (
            SimplicialComplex::new_closed(order.len(), reindexed),
            order,
        )
    }

    /// Full subcomplex spanned by a vertex subset, reindexed densely.
    /// Returns the subcomplex and the map from new index to original vertex.
    pub fn full_subcomplex(&self, keep: &BTreeSet<usize>) -> (SimplicialComplex, Vec<usize>) {
        let order: Vec<usize> = keep.iter().copied().collect();
        let back: HashMap<usize, usize> =
            order.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let mut kept = Vec::new();
        for list in &self.simplices {
            for s in list {
                if s.iter().all(|w| keep.contains(w)) {
                    kept.push(s.iter().map(|w| back[w]).collect::<Vec<_>>());
                }
            }
        }
        (SimplicialComplex::new_closed(order.len(), kept), order)
    }
}

/// Staircase (lexicographic) triangulation of the product of two simplicial
/// complexes. The vertex `(u, w)` receives index `u * b.n_vertices() + w`.
pub fn simplicial_product(a: &SimplicialComplex, b: &SimplicialComplex) -> SimplicialComplex {
    let nb = b.n_vertices();
    let mut top = Vec::new();
    for p in 0..=a.dim() {
        for sa in a.simplices(p) {
            for q in 0..=b.dim() {
                for sb in b.simplices(q) {
                    staircase_paths(sa, sb, &mut |path| {
                        top.push(path.iter().map(|&(u, w)| u * nb + w).collect::<Vec<_>>());
                    });
                }
            }
        }
    }
    SimplicialComplex::new_closed(a.n_vertices() * nb, top)
}

/// Enumerates monotone lattice paths through `sa x sb`; each path is a
/// `(|sa| + |sb| - 1)`-vertex simplex of the product triangulation.
fn staircase_paths(sa: &[usize], sb: &[usize], emit: &mut impl FnMut(&[(usize, usize)])) {
    fn rec(
        sa: &[usize],
        sb: &[usize],
        i: usize,
        j: usize,
        path: &mut Vec<(usize, usize)>,
        emit: &mut impl FnMut(&[(usize, usize)]),
    ) {
        if i + 1 == sa.len() && j + 1 == sb.len() {
            emit(path);
            return;
        }
        if i + 1 < sa.len() {
            path.push((sa[i + 1], sb[j]));
            rec(sa, sb, i + 1, j, path, emit);
            path.pop();
        }
        if j + 1 < sb.len() {
            path.push((sa[i], sb[j + 1]));
            rec(sa, sb, i, j + 1, path, emit);
            path.pop();
        }
    }
    let mut path = vec![(sa[0], sb[0])];
    rec(sa, sb, 0, 0, &mut path, emit);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_boundary_counts() {
        let s2 = SimplicialComplex::simplex_boundary(3);
        assert_eq!(s2.simplex_count(0), 4);
        assert_eq!(s2.simplex_count(1), 6);
        assert_eq!(s2.simplex_count(2), 4);
        assert_eq!(s2.dim(), 2);
        assert!(s2.to_cell_complex().validate().is_valid());
    }

    #[test]
    fn cells_have_simplex_boundaries() {
        // the simplicial specialization: d-cells have exactly d+1 facets,
        // all with unit incidence
        let cc = SimplicialComplex::simplex_boundary(4).to_cell_complex();
        for d in 1..=cc.dim().unwrap() {
            for idx in 0..cc.cell_count(d) {
                let chain: Vec<_> = cc
                    .boundary_of(crate::chaincore::CellId::new(d, idx))
                    .collect();
                assert_eq!(chain.len(), d + 1);
                assert!(chain.iter().all(|&(_, c)| c == 1 || c == -1));
            }
        }
    }

    #[test]
    fn closure_fills_in_faces() {
        let c = SimplicialComplex::new_closed(3, [vec![0, 1, 2]]);
        assert_eq!(c.simplex_count(1), 3);
        assert_eq!(c.simplex_count(0), 3);
        assert!(c.contains(&[0, 2]));
    }

    #[test]
    fn isolated_vertices_are_kept() {
        let c = SimplicialComplex::new_closed(5, [vec![0, 1]]);
        assert_eq!(c.simplex_count(0), 5);
    }

    #[test]
    fn vertex_link_of_octahedron_is_a_circle() {
        // octahedron: suspension of a square
        let faces = vec![
            vec![0, 2, 4],
            vec![2, 1, 4],
            vec![1, 3, 4],
            vec![3, 0, 4],
            vec![0, 2, 5],
            vec![2, 1, 5],
            vec![1, 3, 5],
            vec![3, 0, 5],
        ];
        let oct = SimplicialComplex::new_closed(6, faces);
        let (link, order) = oct.vertex_link(4);
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(link.simplex_count(0), 4);
        assert_eq!(link.simplex_count(1), 4);
        assert_eq!(link.dim(), 1);
    }

    #[test]
    fn product_of_circles_is_a_torus() {
        let c = SimplicialComplex::circle(3);
        let t = simplicial_product(&c, &c);
        let cc = t.to_cell_complex();
        assert!(cc.validate().is_valid());
        assert_eq!(cc.euler_characteristic(), 0);
        assert_eq!(t.simplex_count(0), 9);
        assert_eq!(t.simplex_count(2), 18);
        assert_eq!(t.simplex_count(1), 27);
    }

    #[test]
    fn product_with_point_keeps_counts() {
        let c = SimplicialComplex::circle(4);
        let p = SimplicialComplex::full_simplex(0);
        let prod = simplicial_product(&c, &p);
        assert_eq!(prod.simplex_count(0), 4);
        assert_eq!(prod.simplex_count(1), 4);
    }
}
