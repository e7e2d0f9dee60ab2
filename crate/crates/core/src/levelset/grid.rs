//! Rectangular grid samples: cubical sublevel complexes and critical-point
//! detection on 2D lattices.

use serde::Serialize;

use crate::chaincore::{CellComplex, CoefficientSpec, ComplexBuilder};
use crate::homology::homology;

use super::{Level, LevelsetError, SweepEntry, SweepKind, SweepTable};

/// Scalar samples on a 2D lattice with a domain mask (excluded points, e.g.
/// near collision singularities).
#[derive(Debug, Clone)]
pub struct GridField {
    nx: usize,
    ny: usize,
    origin: (f64, f64),
    spacing: (f64, f64),
    values: Vec<f64>,
    masked: Vec<bool>,
}

impl GridField {
    /// Samples `f` on `nx x ny` points starting at `origin`; `mask` marks
    /// excluded points.
    pub fn sample(
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        spacing: (f64, f64),
        mut f: impl FnMut(f64, f64) -> f64,
        mut mask: impl FnMut(f64, f64) -> bool,
    ) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        let mut masked = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                let x = origin.0 + i as f64 * spacing.0;
                let y = origin.1 + j as f64 * spacing.1;
                let m = mask(x, y);
                masked.push(m);
                values.push(if m { f64::INFINITY } else { f(x, y) });
            }
        }
        GridField {
            nx,
            ny,
            origin,
            spacing,
            values,
            masked,
        }
    }

    /// Builds from explicit row-major samples (`values[i * ny + j]`).
    /// Masked points are treated as excluded regardless of value.
    pub fn from_values(
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        spacing: (f64, f64),
        mut values: Vec<f64>,
        masked: Vec<bool>,
    ) -> Self {
        assert_eq!(values.len(), nx * ny);
        assert_eq!(masked.len(), nx * ny);
        for (v, &m) in values.iter_mut().zip(&masked) {
            if m {
                *v = f64::INFINITY;
            }
        }
        GridField {
            nx,
            ny,
            origin,
            spacing,
            values,
            masked,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn spacing(&self) -> (f64, f64) {
        self.spacing
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + i as f64 * self.spacing.0,
            self.origin.1 + j as f64 * self.spacing.1,
        )
    }

    fn id(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.id(i, j)]
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.masked[self.id(i, j)]
    }

    /// Perturbed strict comparison between sample points (ties resolved by
    /// linear index).
    fn higher_than(&self, a: (usize, usize), b: (usize, usize)) -> bool {
        let (va, vb) = (self.value(a.0, a.1), self.value(b.0, b.1));
        va > vb || (va == vb && self.id(a.0, a.1) > self.id(b.0, b.1))
    }

    /// Full cubical subcomplex on the unmasked sample points with value at
    /// most `h`: every vertex, edge and square all of whose corners qualify.
    pub fn sublevel(&self, h: f64) -> GridSublevel {
        let keep: Vec<bool> = (0..self.nx * self.ny)
            .map(|k| !self.masked[k] && self.values[k] <= h)
            .collect();
        let mut b = ComplexBuilder::new();
        let mut vmap = vec![None; self.nx * self.ny];
        for i in 0..self.nx {
            for j in 0..self.ny {
                if keep[self.id(i, j)] {
                    vmap[self.id(i, j)] = Some(b.add_cell(0, &[], None));
                }
            }
        }
        // horizontal (+x) edges first, then vertical (+y)
        let mut hmap = vec![None; self.nx * self.ny];
        let mut vmap_e = vec![None; self.nx * self.ny];
        for i in 0..self.nx.saturating_sub(1) {
            for j in 0..self.ny {
                if keep[self.id(i, j)] && keep[self.id(i + 1, j)] {
                    let chain = [
                        (vmap[self.id(i, j)].unwrap(), -1),
                        (vmap[self.id(i + 1, j)].unwrap(), 1),
                    ];
                    hmap[self.id(i, j)] = Some(b.add_cell(1, &chain, None));
                }
            }
        }
        for i in 0..self.nx {
            for j in 0..self.ny.saturating_sub(1) {
                if keep[self.id(i, j)] && keep[self.id(i, j + 1)] {
                    let chain = [
                        (vmap[self.id(i, j)].unwrap(), -1),
                        (vmap[self.id(i, j + 1)].unwrap(), 1),
                    ];
                    vmap_e[self.id(i, j)] = Some(b.add_cell(1, &chain, None));
                }
            }
        }
        let mut flagged = 0usize;
        for i in 0..self.nx.saturating_sub(1) {
            for j in 0..self.ny.saturating_sub(1) {
                let corners = [
                    self.id(i, j),
                    self.id(i + 1, j),
                    self.id(i, j + 1),
                    self.id(i + 1, j + 1),
                ];
                if corners.iter().all(|&k| keep[k]) {
                    // d(square) = (right - left) vertical edges
                    //           - (top - bottom) horizontal edges
                    let chain = [
                        (vmap_e[self.id(i + 1, j)].unwrap(), 1),
                        (vmap_e[self.id(i, j)].unwrap(), -1),
                        (hmap[self.id(i, j + 1)].unwrap(), -1),
                        (hmap[self.id(i, j)].unwrap(), 1),
                    ];
                    b.add_cell(2, &chain, None);
                } else if corners.iter().any(|&k| self.masked[k])
                    && corners.iter().any(|&k| keep[k])
                {
                    flagged += 1;
                }
            }
        }
        GridSublevel {
            complex: b.build(),
            masked_straddling: flagged,
        }
    }

    /// Classifies interior sample points with fully unmasked 3x3
    /// neighborhoods: extrema and saddles by the 8-neighbor sign pattern,
    /// Morse index by the finite-difference Hessian.
    pub fn critical_points(&self) -> Vec<GridCriticalPoint> {
        let mut out = Vec::new();
        if self.nx < 3 || self.ny < 3 {
            return out;
        }
        // cyclic 8-neighborhood
        const RING: [(i64, i64); 8] = [
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ];
        for i in 1..self.nx - 1 {
            'points: for j in 1..self.ny - 1 {
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if self.is_masked(
                            (i as i64 + di) as usize,
                            (j as i64 + dj) as usize,
                        ) {
                            continue 'points;
                        }
                    }
                }
                let higher: Vec<bool> = RING
                    .iter()
                    .map(|&(di, dj)| {
                        self.higher_than(
                            ((i as i64 + di) as usize, (j as i64 + dj) as usize),
                            (i, j),
                        )
                    })
                    .collect();
                let ups = higher.iter().filter(|&&h| h).count();
                let sign_changes = (0..8).filter(|&k| higher[k] != higher[(k + 1) % 8]).count();
                let pattern = if ups == 0 {
                    Some(PatternKind::Maximum)
                } else if ups == 8 {
                    Some(PatternKind::Minimum)
                } else if sign_changes >= 4 {
                    Some(PatternKind::Saddle)
                } else {
                    None
                };
                let Some(pattern) = pattern else { continue };

                let (hx, hy) = self.spacing;
                let f = |di: i64, dj: i64| {
                    self.value((i as i64 + di) as usize, (j as i64 + dj) as usize)
                };
                let fxx = (f(1, 0) - 2.0 * f(0, 0) + f(-1, 0)) / (hx * hx);
                let fyy = (f(0, 1) - 2.0 * f(0, 0) + f(0, -1)) / (hy * hy);
                let fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * hx * hy);
                let det = fxx * fyy - fxy * fxy;
                let scale = RING
                    .iter()
                    .map(|&(di, dj)| f(di, dj).abs())
                    .fold(f(0, 0).abs(), f64::max);
                let non_degenerate = det.abs() >= 1e-8 * scale * scale;
                let index = if !non_degenerate {
                    None
                } else if det < 0.0 {
                    Some(1)
                } else if fxx < 0.0 {
                    Some(2)
                } else {
                    Some(0)
                };
                out.push(GridCriticalPoint {
                    grid: (i, j),
                    location: self.point(i, j),
                    value: f(0, 0),
                    pattern,
                    index,
                    non_degenerate,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternKind {
    Minimum,
    Maximum,
    Saddle,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridCriticalPoint {
    /// Lattice coordinates of the sample point.
    pub grid: (usize, usize),
    /// World coordinates.
    pub location: (f64, f64),
    pub value: f64,
    pub pattern: PatternKind,
    /// Morse index from Hessian eigenvalue signs; `None` when degenerate.
    pub index: Option<usize>,
    pub non_degenerate: bool,
}

/// Cubical sublevel complex plus the count of grid squares that straddle
/// the mask (partially masked, partially below threshold).
#[derive(Debug, Clone)]
pub struct GridSublevel {
    pub complex: CellComplex,
    pub masked_straddling: usize,
}

/// Sweeps a grid field across sublevel thresholds.
pub fn sweep_grid(
    grid: &GridField,
    levels: &[f64],
    coeff: &CoefficientSpec,
) -> Result<SweepTable, LevelsetError> {
    let mut entries = Vec::with_capacity(levels.len());
    for &h in levels {
        let sub = grid.sublevel(h);
        let summary = homology(&sub.complex, coeff)?;
        entries.push(SweepEntry {
            level: Level::Float(h),
            summary,
        });
    }
    Ok(SweepTable::from_entries(SweepKind::Sublevel, entries))
}
