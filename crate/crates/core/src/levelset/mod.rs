//! Level sets, bands and sublevel sets of simplexwise-linear fields, plus
//! homology sweeps across levels.
//!
//! A level `a` slices a simplex into the polytope `{f = a}`; combinatorially
//! the slice of a d-simplex is one (d-1)-cell whose facets are the slices of
//! the straddling facets. Bands `{lo <= f <= hi}` keep truncated simplices
//! together with cap cells on each cut level. Cells stay polytopes (no
//! re-triangulation); incidence signs are completed per cell from the
//! diamond condition, which determines them up to orientation.
//!
//! Degeneracy is removed by simulation of simplicity: vertex `i` behaves as
//! `value(i) + (i+1) * eps`, so a vertex exactly at a level counts as above
//! it and no level ever hits a vertex.

pub mod grid;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::chaincore::{CellComplex, CellId, CoefficientSpec, ComplexBuilder, SimplicialComplex};
use crate::homology::{homology, HomologyError, HomologySummary};

#[derive(Debug, Error)]
pub enum LevelsetError {
    #[error("field needs one value per vertex: {values} values for {vertices} vertices")]
    ValueCount { vertices: usize, values: usize },
    #[error("level {level} equals the value of vertex {vertex} and perturbation is disabled")]
    LevelHitsVertex { vertex: usize, level: String },
    #[error("band bounds are not ordered: {lo} >= {hi}")]
    BadBand { lo: String, hi: String },
    #[error("internal orientation failure: {0}")]
    Orientation(String),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// A vertex-valued exact rational field, simplexwise linear on a simplicial
/// complex.
#[derive(Debug, Clone)]
pub struct PLScalarField {
    base: SimplicialComplex,
    values: Vec<BigRational>,
    /// Symbolic perturbation on by default; disabling makes levels that hit
    /// vertex values an error.
    perturb: bool,
}

impl PLScalarField {
    pub fn new(base: SimplicialComplex, values: Vec<BigRational>) -> Result<Self, LevelsetError> {
        if values.len() != base.n_vertices() {
            return Err(LevelsetError::ValueCount {
                vertices: base.n_vertices(),
                values: values.len(),
            });
        }
        Ok(PLScalarField {
            base,
            values,
            perturb: true,
        })
    }

    pub fn with_perturbation(mut self, on: bool) -> Self {
        self.perturb = on;
        self
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// The field with all values negated (same level sets, mirrored indices).
    pub fn negated(&self) -> PLScalarField {
        PLScalarField {
            base: self.base.clone(),
            values: self.values.iter().map(|v| -v).collect(),
            perturb: self.perturb,
        }
    }

    pub fn value_range(&self) -> Option<(BigRational, BigRational)> {
        let mut it = self.values.iter();
        let first = it.next()?.clone();
        let mut lo = first.clone();
        let mut hi = first;
        for v in it {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Some((lo, hi))
    }

    /// Perturbed comparison: is the value of `v` above level `a`?
    /// Ties count as above (`v + (i+1) eps > a`).
    fn above(&self, v: usize, a: &BigRational) -> Result<bool, LevelsetError> {
        match self.values[v].cmp(a) {
            std::cmp::Ordering::Greater => Ok(true),
            std::cmp::Ordering::Less => Ok(false),
            std::cmp::Ordering::Equal => {
                if self.perturb {
                    Ok(true)
                } else {
                    Err(LevelsetError::LevelHitsVertex {
                        vertex: v,
                        level: a.to_string(),
                    })
                }
            }
        }
    }

    /// The level set `f^-1(a)` as a polytopal cell complex.
    pub fn slice(&self, a: &BigRational) -> Result<CellComplex, LevelsetError> {
        let top = self.base.dim();
        // straddling simplices per dimension and their slice indices
        let mut strad: Vec<Vec<bool>> = Vec::with_capacity(top + 1);
        let mut sidx: Vec<Vec<Option<usize>>> = Vec::with_capacity(top + 1);
        for d in 0..=top {
            let list = self.base.simplices(d);
            let mut flags = Vec::with_capacity(list.len());
            let mut idxs = Vec::with_capacity(list.len());
            let mut next = 0;
            for s in list {
                let mut any_above = false;
                let mut any_below = false;
                for &v in s {
                    if self.above(v, a)? {
                        any_above = true;
                    } else {
                        any_below = true;
                    }
                }
                let is_strad = any_above && any_below;
                flags.push(is_strad);
                idxs.push(is_strad.then(|| {
                    let i = next;
                    next += 1;
                    i
                }));
            }
            strad.push(flags);
            sidx.push(idxs);
        }
        // proto cells: slice cell of a (d+1)-simplex has dimension d
        let mut proto: Vec<Vec<Vec<usize>>> = Vec::with_capacity(top);
        for d in 0..top {
            let mut cells = Vec::new();
            for (i, s) in self.base.simplices(d + 1).iter().enumerate() {
                if !strad[d + 1][i] {
                    continue;
                }
                let mut facets = Vec::new();
                if d >= 1 {
                    for skip in 0..s.len() {
                        let mut f = s.clone();
                        f.remove(skip);
                        let fi = self.base.index_of(&f).expect("closed complex");
                        if strad[d][fi] {
                            facets.push(sidx[d][fi].unwrap());
                        }
                    }
                }
                cells.push(facets);
            }
            proto.push(cells);
        }
        orient_complex(&proto)
    }

    /// The band `{lo <= f <= hi}` as a polytopal complex, with the cap cell
    /// sets on each present cut level. `None` bounds are unbounded sides;
    /// `sublevel` is `region(None, Some(a))`.
    pub fn region(
        &self,
        lo: Option<&BigRational>,
        hi: Option<&BigRational>,
    ) -> Result<RegionComplex, LevelsetError> {
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo >= hi {
                return Err(LevelsetError::BadBand {
                    lo: lo.to_string(),
                    hi: hi.to_string(),
                });
            }
        }
        let top = self.base.dim();
        // per dimension: truncation nonempty, straddles lo, straddles hi
        let mut keep: Vec<Vec<bool>> = Vec::new();
        let mut s_lo: Vec<Vec<bool>> = Vec::new();
        let mut s_hi: Vec<Vec<bool>> = Vec::new();
        for d in 0..=top {
            let list = self.base.simplices(d);
            let mut k = Vec::with_capacity(list.len());
            let mut l = Vec::with_capacity(list.len());
            let mut h = Vec::with_capacity(list.len());
            for s in list {
                let mut above_lo = lo.is_none();
                let mut below_lo = false;
                let mut above_hi = false;
                let mut below_hi = hi.is_none();
                for &v in s {
                    if let Some(lo) = lo {
                        if self.above(v, lo)? {
                            above_lo = true;
                        } else {
                            below_lo = true;
                        }
                    }
                    if let Some(hi) = hi {
                        if self.above(v, hi)? {
                            above_hi = true;
                        } else {
                            below_hi = true;
                        }
                    }
                }
                k.push(above_lo && below_hi);
                l.push(above_lo && below_lo);
                h.push(above_hi && below_hi);
            }
            keep.push(k);
            s_lo.push(l);
            s_hi.push(h);
        }
        // dense indices within each family
        let index_of = |flags: &Vec<Vec<bool>>| -> Vec<Vec<Option<usize>>> {
            flags
                .iter()
                .map(|dim_flags| {
                    let mut next = 0;
                    dim_flags
                        .iter()
                        .map(|&f| {
                            f.then(|| {
                                let i = next;
                                next += 1;
                                i
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let t_idx = index_of(&keep);
        let lo_idx = index_of(&s_lo);
        let hi_idx = index_of(&s_hi);
        let count = |flags: &[bool]| flags.iter().filter(|&&f| f).count();
        // output dimension d holds: T-cells from d-simplices, then lo-cap
        // cells from (d+1)-simplices, then hi-cap cells
        let n_t: Vec<usize> = (0..=top).map(|d| count(&keep[d])).collect();
        let n_l: Vec<usize> = (0..=top + 1)
            .map(|d| {
                if d + 1 <= top {
                    count(&s_lo[d + 1])
                } else {
                    0
                }
            })
            .collect();
        let off_l = |d: usize| n_t[d];
        let off_h = |d: usize| n_t[d] + n_l[d];

        let mut proto: Vec<Vec<Vec<usize>>> = Vec::with_capacity(top + 1);
        let mut lower_cap: Vec<CellId> = Vec::new();
        let mut upper_cap: Vec<CellId> = Vec::new();
        for d in 0..=top {
            let mut cells: Vec<Vec<usize>> = Vec::new();
            // truncated simplices
            for (i, s) in self.base.simplices(d).iter().enumerate() {
                if !keep[d][i] {
                    continue;
                }
                let mut facets = Vec::new();
                if d >= 1 {
                    for skip in 0..s.len() {
                        let mut f = s.clone();
                        f.remove(skip);
                        let fi = self.base.index_of(&f).expect("closed complex");
                        if keep[d - 1][fi] {
                            facets.push(t_idx[d - 1][fi].unwrap());
                        }
                    }
                }
                if s_lo[d][i] {
                    facets.push(off_l(d - 1) + lo_idx[d][i].unwrap());
                }
                if s_hi[d][i] {
                    facets.push(off_h(d - 1) + hi_idx[d][i].unwrap());
                }
                cells.push(facets);
            }
            // cap cells of this dimension come from (d+1)-simplices
            if d + 1 <= top {
                for (family, idxs, cap) in [
                    (&s_lo, &lo_idx, 0usize),
                    (&s_hi, &hi_idx, 1usize),
                ] {
                    for (i, s) in self.base.simplices(d + 1).iter().enumerate() {
                        if !family[d + 1][i] {
                            continue;
                        }
                        let mut facets = Vec::new();
                        if d >= 1 {
                            for skip in 0..s.len() {
                                let mut f = s.clone();
                                f.remove(skip);
                                let fi = self.base.index_of(&f).expect("closed complex");
                                if family[d][fi] {
                                    let off = if cap == 0 { off_l(d - 1) } else { off_h(d - 1) };
                                    facets.push(off + idxs[d][fi].unwrap());
                                }
                            }
                        }
                        let own_idx = if cap == 0 {
                            off_l(d) + idxs[d + 1][i].unwrap()
                        } else {
                            off_h(d) + idxs[d + 1][i].unwrap()
                        };
                        debug_assert_eq!(own_idx, cells.len());
                        if cap == 0 {
                            lower_cap.push(CellId::new(d, own_idx));
                        } else {
                            upper_cap.push(CellId::new(d, own_idx));
                        }
                        cells.push(facets);
                    }
                }
            }
            proto.push(cells);
        }
        let complex = orient_complex(&proto)?;
        Ok(RegionComplex {
            complex,
            lower_cap,
            upper_cap,
        })
    }

    /// The sublevel complex `{f <= a}`.
    pub fn sublevel(&self, a: &BigRational) -> Result<RegionComplex, LevelsetError> {
        self.region(None, Some(a))
    }

    /// PL-critical vertices classified by the reduced homology of the lower
    /// link (vertices ordered by perturbed value).
    pub fn critical_vertices(&self) -> Result<Vec<PlCriticalVertex>, LevelsetError> {
        let mut out = Vec::new();
        for v in 0..self.base.n_vertices() {
            let (link, orig) = self.base.vertex_link(v);
            let lower: std::collections::BTreeSet<usize> = (0..link.n_vertices())
                .filter(|&w| self.lower_than(orig[w], v))
                .collect();
            let kind = if lower.is_empty() {
                PlVertexKind::Minimum
            } else {
                let (sub, _) = link.full_subcomplex(&lower);
                let betti = crate::homology::homology_field(
                    &sub.to_cell_complex(),
                    &CoefficientSpec::Rationals,
                )?;
                let mut reduced = betti;
                if !reduced.is_empty() {
                    reduced[0] = reduced[0].saturating_sub(1);
                }
                let nonzero: Vec<(usize, usize)> = reduced
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| b > 0)
                    .map(|(i, &b)| (i, b))
                    .collect();
                match nonzero.as_slice() {
                    [] => PlVertexKind::Regular,
                    [(deg, mult)] => PlVertexKind::Critical {
                        index: deg + 1,
                        multiplicity: *mult,
                    },
                    _ => PlVertexKind::Degenerate,
                }
            };
            out.push(PlCriticalVertex {
                vertex: v,
                value: self.values[v].clone(),
                kind,
            });
        }
        Ok(out)
    }

    /// Strict perturbed order between vertices.
    fn lower_than(&self, u: usize, v: usize) -> bool {
        match self.values[u].cmp(&self.values[v]) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => u < v,
        }
    }

    /// Distinct critical values in increasing order.
    pub fn critical_values(&self) -> Result<Vec<BigRational>, LevelsetError> {
        let mut vals: Vec<BigRational> = self
            .critical_vertices()?
            .into_iter()
            .filter(|c| !matches!(c.kind, PlVertexKind::Regular))
            .map(|c| c.value)
            .collect();
        vals.sort();
        vals.dedup();
        Ok(vals)
    }

    /// Regular levels interleaving the critical values: one below all, one
    /// between each consecutive pair, one above all.
    pub fn auto_levels(&self) -> Result<Vec<BigRational>, LevelsetError> {
        let crit = self.critical_values()?;
        if crit.is_empty() {
            return Ok(match self.value_range() {
                Some((lo, hi)) => vec![(lo + hi) / BigRational::from_integer(2.into())],
                None => Vec::new(),
            });
        }
        let one = BigRational::one();
        let two = BigRational::from_integer(2.into());
        let mut levels = Vec::with_capacity(crit.len() + 1);
        levels.push(crit[0].clone() - &one);
        for w in crit.windows(2) {
            levels.push((&w[0] + &w[1]) / &two);
        }
        levels.push(crit[crit.len() - 1].clone() + &one);
        Ok(levels)
    }
}

/// A band/sublevel complex together with its cut-level cap cells (each cap
/// family is a face-closed subcomplex: the slice at that level).
#[derive(Debug, Clone)]
pub struct RegionComplex {
    pub complex: CellComplex,
    pub lower_cap: Vec<CellId>,
    pub upper_cap: Vec<CellId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlVertexKind {
    Regular,
    Minimum,
    /// Lower link has the reduced homology of a sphere of dimension
    /// `index - 1` (with multiplicity counting parallel classes).
    Critical { index: usize, multiplicity: usize },
    /// Mixed lower-link homology; not a single Morse index.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct PlCriticalVertex {
    pub vertex: usize,
    pub value: BigRational,
    pub kind: PlVertexKind,
}

impl PlCriticalVertex {
    pub fn is_critical(&self) -> bool {
        !matches!(self.kind, PlVertexKind::Regular)
    }

    /// Morse index when the vertex is cleanly critical (a minimum has
    /// index 0).
    pub fn index(&self) -> Option<usize> {
        match self.kind {
            PlVertexKind::Minimum => Some(0),
            PlVertexKind::Critical { index, multiplicity: 1 } => Some(index),
            _ => None,
        }
    }
}

/// Builds a cell complex from per-dimension facet lists by completing
/// incidence signs: 1-cells get opposite endpoint signs, higher cells
/// propagate signs through the diamond condition (each codim-2 face of a
/// cell lies in exactly two of its facets).
pub(crate) fn orient_complex(proto: &[Vec<Vec<usize>>]) -> Result<CellComplex, LevelsetError> {
    let mut builder = ComplexBuilder::new();
    // boundaries already assigned, per dim then cell: (facet, coeff)
    let mut assigned: Vec<Vec<Vec<(usize, i64)>>> = Vec::with_capacity(proto.len());
    for (d, cells) in proto.iter().enumerate() {
        let mut dim_assigned: Vec<Vec<(usize, i64)>> = Vec::with_capacity(cells.len());
        for (ci, facets) in cells.iter().enumerate() {
            let chain: Vec<(usize, i64)> = match d {
                0 => {
                    debug_assert!(facets.is_empty());
                    Vec::new()
                }
                1 => {
                    if facets.len() != 2 || facets[0] == facets[1] {
                        return Err(LevelsetError::Orientation(format!(
                            "1-cell {ci} has endpoints {facets:?}"
                        )));
                    }
                    let (a, b) = (facets[0].min(facets[1]), facets[0].max(facets[1]));
                    vec![(a, -1), (b, 1)]
                }
                _ => orient_cell(d, ci, facets, &assigned[d - 1])?,
            };
            builder.add_cell(d, &chain, None);
            dim_assigned.push(chain);
        }
        assigned.push(dim_assigned);
    }
    Ok(builder.build())
}

fn orient_cell(
    d: usize,
    ci: usize,
    facets: &[usize],
    below: &[Vec<(usize, i64)>],
) -> Result<Vec<(usize, i64)>, LevelsetError> {
    use std::collections::HashMap;
    let k = facets.len();
    // ridge -> the (position, incidence) pairs of facets containing it
    let mut ridges: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for (pos, &f) in facets.iter().enumerate() {
        for &(r, c) in &below[f] {
            ridges.entry(r).or_default().push((pos, c));
        }
    }
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); k];
    for (r, occ) in &ridges {
        if occ.len() != 2 {
            return Err(LevelsetError::Orientation(format!(
                "{d}-cell {ci}: ridge {r} lies in {} facets",
                occ.len()
            )));
        }
        let (p1, c1) = occ[0];
        let (p2, c2) = occ[1];
        if c1.abs() != 1 || c2.abs() != 1 {
            return Err(LevelsetError::Orientation(format!(
                "{d}-cell {ci}: non-unit ridge incidence"
            )));
        }
        // s1*c1 + s2*c2 = 0  =>  s2 = -s1*c1*c2
        adj[p1].push((p2, -c1 * c2));
        adj[p2].push((p1, -c1 * c2));
    }
    let mut sign: Vec<i64> = vec![0; k];
    let mut stack = vec![0usize];
    sign[0] = 1;
    while let Some(p) = stack.pop() {
        for &(q, rel) in &adj[p] {
            let want = sign[p] * rel;
            if sign[q] == 0 {
                sign[q] = want;
                stack.push(q);
            } else if sign[q] != want {
                return Err(LevelsetError::Orientation(format!(
                    "{d}-cell {ci}: inconsistent diamond constraints"
                )));
            }
        }
    }
    if sign.iter().any(|&s| s == 0) {
        return Err(LevelsetError::Orientation(format!(
            "{d}-cell {ci}: facet adjacency graph is disconnected"
        )));
    }
    Ok(facets
        .iter()
        .zip(&sign)
        .map(|(&f, &s)| (f, s))
        .collect())
}

/// A level value: exact rational for PL sweeps, floating for grid sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum Level {
    Rational(BigRational),
    Float(f64),
}

impl Level {
    pub fn as_f64(&self) -> f64 {
        match self {
            Level::Rational(r) => rational_to_f64(r),
            Level::Float(x) => *x,
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Rational(r) => write!(f, "{r}"),
            Level::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// What a sweep computes at each level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepKind {
    /// Homology of the level set `f^-1(a)`.
    LevelSet,
    /// Homology of the sublevel set `{f <= a}`.
    Sublevel,
}

/// Homology summaries over an ordered list of levels, with detected jumps.
#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub entries: Vec<SweepEntry>,
    /// Indices `i` with `entries[i].summary != entries[i+1].summary`.
    pub jumps: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub level: Level,
    pub summary: HomologySummary,
}

impl SweepTable {
    fn from_entries(kind: SweepKind, entries: Vec<SweepEntry>) -> Self {
        let jumps = entries
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].summary != w[1].summary)
            .map(|(i, _)| i)
            .collect();
        SweepTable { kind, entries, jumps }
    }

    /// Betti numbers of one dimension across levels.
    pub fn betti_series(&self, l: usize) -> Vec<usize> {
        self.entries.iter().map(|e| e.summary.betti(l)).collect()
    }

    /// CSV export: `level, b0, b1, .., torsion`.
    pub fn to_csv(&self) -> String {
        let max_dim = self
            .entries
            .iter()
            .map(|e| e.summary.dims.len())
            .max()
            .unwrap_or(0);
        let mut out = String::from("level");
        for l in 0..max_dim {
            out.push_str(&format!(",b{l}"));
        }
        out.push_str(",torsion\n");
        for e in &self.entries {
            out.push_str(&e.level.to_string());
            for l in 0..max_dim {
                out.push_str(&format!(",{}", e.summary.betti(l)));
            }
            let torsion: Vec<String> = e
                .summary
                .dims
                .iter()
                .enumerate()
                .filter(|(_, d)| !d.torsion.is_empty())
                .map(|(l, d)| {
                    let ts: Vec<String> = d.torsion.iter().map(u64::to_string).collect();
                    format!("{l}:{}", ts.join("+"))
                })
                .collect();
            out.push(',');
            if torsion.is_empty() {
                out.push('-');
            } else {
                out.push_str(&torsion.join(" "));
            }
            out.push('\n');
        }
        out
    }

    /// Two-column `level betti_l` block, one line per level (plot-ready).
    pub fn gnuplot_series(&self, l: usize) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{} {}\n", e.level.as_f64(), e.summary.betti(l)));
        }
        out
    }
}

/// Sweeps a PL field across sorted regular levels.
pub fn sweep_pl(
    field: &PLScalarField,
    levels: &[BigRational],
    coeff: &CoefficientSpec,
    kind: SweepKind,
) -> Result<SweepTable, LevelsetError> {
    let mut entries = Vec::with_capacity(levels.len());
    for a in levels {
        let complex = match kind {
            SweepKind::LevelSet => field.slice(a)?,
            SweepKind::Sublevel => field.sublevel(a)?.complex,
        };
        let summary = homology(&complex, coeff)?;
        entries.push(SweepEntry {
            level: Level::Rational(a.clone()),
            summary,
        });
    }
    Ok(SweepTable::from_entries(kind, entries))
}

#[cfg(test)]
mod tests;
